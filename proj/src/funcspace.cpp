#include "intorder/funcspace.hpp"

#include "intorder/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace intorder {

namespace {

void require_same_grid(const Grid& a, const Grid& b, const char* what)
{
    if (a != b) {
        throw DimensionError(std::string(what) + ": grid mismatch (" + std::to_string(a.size()) +
                             " vs " + std::to_string(b.size()) + " points)");
    }
}

// D M D with D = diag(sqrt(w)); its eigenvectors y map back to unit-norm
// eigenfunctions f = y / sqrt(w) of the weighted operator.
Eigen::MatrixXd symmetrized(const GridOperator& op)
{
    const Eigen::VectorXd root_w = op.grid().weights().cwiseSqrt();
    return root_w.asDiagonal() * op.matrix() * root_w.asDiagonal();
}

GridFunction to_eigenfunction(const Grid& grid, Eigen::VectorXd y)
{
    Eigen::VectorXd f = y.cwiseQuotient(grid.weights().cwiseSqrt());
    Eigen::Index imax = 0;
    f.cwiseAbs().maxCoeff(&imax);
    if (f(imax) < 0.0) {
        f = -f;
    }
    return GridFunction(grid, std::move(f));
}

struct PowerResult {
    double value;
    Eigen::VectorXd vector;
    bool converged;
};

PowerResult power_iteration(const Eigen::MatrixXd& b, double tol, int max_iter)
{
    const Eigen::Index n = b.rows();
    std::mt19937_64 gen(0x5eed);
    std::uniform_real_distribution<double> unif(0.5, 1.5);
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        v(i) = unif(gen);
    }
    v.normalize();

    double lambda = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        Eigen::VectorXd w = b * v;
        lambda = v.dot(w);
        const double residual = (w - lambda * v).norm();
        if (residual <= tol * std::abs(lambda) || w.norm() == 0.0) {
            return {lambda, v, true};
        }
        v = w / w.norm();
    }
    return {lambda, v, false};
}

}  // namespace

Grid::Grid(std::size_t size, double lower, double upper)
    : size_(size), lower_(lower), upper_(upper), weights_(static_cast<Eigen::Index>(size))
{
    if (size == 0) {
        throw DimensionError("grid must have at least one point");
    }
    if (!std::isfinite(lower) || !std::isfinite(upper) || (size > 1 && !(upper > lower))) {
        throw DomainError("grid interval must be finite with upper > lower");
    }
    if (size == 1) {
        weights_(0) = 1.0;
    } else {
        const double h = spacing();
        weights_.setConstant(h);
        weights_(0) = 0.5 * h;
        weights_(weights_.size() - 1) = 0.5 * h;
    }
}

double Grid::spacing() const
{
    return size_ > 1 ? (upper_ - lower_) / static_cast<double>(size_ - 1) : 1.0;
}

double Grid::point(std::size_t i) const
{
    return size_ > 1 ? lower_ + spacing() * static_cast<double>(i) : lower_;
}

bool Grid::operator==(const Grid& other) const
{
    return size_ == other.size_ && lower_ == other.lower_ && upper_ == other.upper_;
}

GridFunction::GridFunction(Grid grid, Eigen::VectorXd values) : grid_(std::move(grid)), values_(std::move(values))
{
    if (static_cast<std::size_t>(values_.size()) != grid_.size()) {
        throw DimensionError("GridFunction: " + std::to_string(values_.size()) + " values for a grid of " +
                             std::to_string(grid_.size()));
    }
    if (!values_.allFinite()) {
        throw DomainError("GridFunction: non-finite value");
    }
}

GridFunction GridFunction::zero(const Grid& grid)
{
    return constant(grid, 0.0);
}

GridFunction GridFunction::constant(const Grid& grid, double value)
{
    return GridFunction(grid, Eigen::VectorXd::Constant(static_cast<Eigen::Index>(grid.size()), value));
}

GridFunction GridFunction::sample(const Grid& grid, const std::function<double(double)>& fn)
{
    Eigen::VectorXd v(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        v(static_cast<Eigen::Index>(i)) = fn(grid.point(i));
    }
    return GridFunction(grid, std::move(v));
}

GridOperator::GridOperator(Grid grid, Eigen::MatrixXd matrix) : grid_(std::move(grid)), matrix_(std::move(matrix))
{
    const auto g = static_cast<Eigen::Index>(grid_.size());
    if (matrix_.rows() != g || matrix_.cols() != g) {
        throw DimensionError("GridOperator: matrix is " + std::to_string(matrix_.rows()) + "x" +
                             std::to_string(matrix_.cols()) + ", grid has " + std::to_string(g) + " points");
    }
    if (!matrix_.allFinite()) {
        throw DomainError("GridOperator: non-finite entry");
    }
}

GridOperator GridOperator::zero(const Grid& grid)
{
    const auto g = static_cast<Eigen::Index>(grid.size());
    return GridOperator(grid, Eigen::MatrixXd::Zero(g, g));
}

GridOperator GridOperator::operator*(double c) const
{
    return GridOperator(grid_, matrix_ * c);
}

GridOperator GridOperator::operator+(const GridOperator& other) const
{
    require_same_grid(grid_, other.grid_, "operator+");
    return GridOperator(grid_, matrix_ + other.matrix_);
}

FunctionalPanel::FunctionalPanel(Grid grid, Eigen::MatrixXd rows, int first_index)
    : grid_(std::move(grid)), rows_(std::move(rows)), first_index_(first_index)
{
    if (rows_.rows() < 2) {
        throw DimensionError("panel needs at least two observations, got " + std::to_string(rows_.rows()));
    }
    if (static_cast<std::size_t>(rows_.cols()) != grid_.size()) {
        throw DimensionError("panel has " + std::to_string(rows_.cols()) + " columns for a grid of " +
                             std::to_string(grid_.size()));
    }
    if (!rows_.allFinite()) {
        throw DomainError("panel contains a non-finite value");
    }
    if (first_index < 1) {
        throw DomainError("panel first index must be >= 1");
    }
}

GridFunction FunctionalPanel::row(Eigen::Index i) const
{
    return GridFunction(grid_, rows_.row(i).transpose());
}

double inner(const GridFunction& f, const GridFunction& g)
{
    require_same_grid(f.grid(), g.grid(), "inner");
    return (f.values().cwiseProduct(f.grid().weights())).dot(g.values());
}

double norm(const GridFunction& f)
{
    return std::sqrt(std::max(0.0, inner(f, f)));
}

GridOperator tensor(const GridFunction& f, const GridFunction& g)
{
    require_same_grid(f.grid(), g.grid(), "tensor");
    return GridOperator(f.grid(), f.values() * g.values().transpose());
}

GridFunction apply(const GridOperator& op, const GridFunction& f)
{
    require_same_grid(op.grid(), f.grid(), "apply");
    return GridFunction(f.grid(), op.matrix() * f.values().cwiseProduct(f.grid().weights()));
}

double quadratic_form(const GridOperator& op, const GridFunction& f)
{
    require_same_grid(op.grid(), f.grid(), "quadratic_form");
    const Eigen::VectorXd wf = f.values().cwiseProduct(f.grid().weights());
    return wf.dot(op.matrix() * wf);
}

bool is_symmetric(const GridOperator& op, double rel_tol)
{
    const Eigen::MatrixXd& m = op.matrix();
    const double scale = m.cwiseAbs().maxCoeff();
    return (m - m.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

Eigenpair dominant_eigenpair(const GridOperator& op)
{
    if (!is_symmetric(op)) {
        throw ContractViolation("dominant_eigenpair: operator is not symmetric");
    }
    const Grid& grid = op.grid();
    const auto g = static_cast<Eigen::Index>(grid.size());

    if (op.matrix().cwiseAbs().maxCoeff() == 0.0) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(g);
        e(0) = 1.0;
        return Eigenpair{0.0, to_eigenfunction(grid, e), 0.0, 0.0, true};
    }

    Eigen::MatrixXd b = symmetrized(op);
    b = 0.5 * (b + b.transpose());

    double lambda1 = 0.0;
    double lambda2 = 0.0;
    Eigen::VectorXd y;
    if (grid.size() <= kDenseEigenLimit) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(b);
        if (solver.info() != Eigen::Success) {
            throw NumericError("dominant_eigenpair: symmetric eigensolver failed");
        }
        lambda1 = solver.eigenvalues()(g - 1);
        lambda2 = g > 1 ? solver.eigenvalues()(g - 2) : 0.0;
        y = solver.eigenvectors().col(g - 1);
    } else {
        const PowerResult top = power_iteration(b, 1e-12, 10000);
        if (!top.converged) {
            throw NumericError("dominant_eigenpair: power iteration did not converge in 10000 steps");
        }
        lambda1 = top.value;
        y = top.vector;
        const Eigen::MatrixXd deflated = b - lambda1 * y * y.transpose();
        lambda2 = power_iteration(deflated, 1e-8, 10000).value;
    }

    const double gap = lambda1 > 0.0 ? (lambda1 - lambda2) / lambda1 : 0.0;
    return Eigenpair{lambda1, to_eigenfunction(grid, std::move(y)), lambda2, gap, gap < 1e-12};
}

double smallest_eigenvalue(const GridOperator& op)
{
    Eigen::MatrixXd b = symmetrized(op);
    b = 0.5 * (b + b.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(b, Eigen::EigenvaluesOnly);
    return solver.eigenvalues()(0);
}

}  // namespace intorder
