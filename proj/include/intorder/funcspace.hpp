#pragma once

// Discretized L2 primitives on an equispaced grid: functions, operators,
// panels of curves, quadrature inner products and dominant eigenpairs.

#include <Eigen/Dense>

#include <cstddef>
#include <functional>

namespace intorder {

// Equispaced grid on [lower, upper]. A one-point grid is allowed and acts as
// the scalar case: its single quadrature weight is 1, so inner() reduces to
// an ordinary product.
class Grid {
public:
    explicit Grid(std::size_t size, double lower = 0.0, double upper = 1.0);

    static Grid scalar() { return Grid(1); }

    std::size_t size() const { return size_; }
    double lower() const { return lower_; }
    double upper() const { return upper_; }
    double spacing() const;
    double point(std::size_t i) const;

    // Trapezoid weights: spacing in the interior, spacing/2 at both ends.
    const Eigen::VectorXd& weights() const { return weights_; }

    bool operator==(const Grid& other) const;
    bool operator!=(const Grid& other) const { return !(*this == other); }

private:
    std::size_t size_;
    double lower_;
    double upper_;
    Eigen::VectorXd weights_;
};

class GridFunction {
public:
    GridFunction(Grid grid, Eigen::VectorXd values);

    static GridFunction zero(const Grid& grid);
    static GridFunction constant(const Grid& grid, double value);
    static GridFunction sample(const Grid& grid, const std::function<double(double)>& fn);

    const Grid& grid() const { return grid_; }
    const Eigen::VectorXd& values() const { return values_; }
    std::size_t size() const { return grid_.size(); }
    double operator[](std::size_t i) const { return values_(static_cast<Eigen::Index>(i)); }

private:
    Grid grid_;
    Eigen::VectorXd values_;
};

// Kernel matrix of a linear operator; application integrates against the
// grid's trapezoid weights.
class GridOperator {
public:
    GridOperator(Grid grid, Eigen::MatrixXd matrix);

    static GridOperator zero(const Grid& grid);

    const Grid& grid() const { return grid_; }
    const Eigen::MatrixXd& matrix() const { return matrix_; }
    std::size_t size() const { return grid_.size(); }

    GridOperator operator*(double c) const;
    GridOperator operator+(const GridOperator& other) const;

private:
    Grid grid_;
    Eigen::MatrixXd matrix_;
};

// T curves observed on one grid. Row i holds the observation with time
// index first_index() + i; only valid (in-sample) rows are stored.
class FunctionalPanel {
public:
    FunctionalPanel(Grid grid, Eigen::MatrixXd rows, int first_index = 1);

    const Grid& grid() const { return grid_; }
    const Eigen::MatrixXd& values() const { return rows_; }
    Eigen::Index n_rows() const { return rows_.rows(); }
    Eigen::Index grid_size() const { return rows_.cols(); }
    int first_index() const { return first_index_; }
    int last_index() const { return first_index_ + static_cast<int>(rows_.rows()) - 1; }
    GridFunction row(Eigen::Index i) const;

private:
    Grid grid_;
    Eigen::MatrixXd rows_;
    int first_index_;
};

double inner(const GridFunction& f, const GridFunction& g);
double norm(const GridFunction& f);

GridOperator tensor(const GridFunction& f, const GridFunction& g);
GridFunction apply(const GridOperator& op, const GridFunction& f);

// Quadratic form <A f, f> without materializing A f as a GridFunction.
double quadratic_form(const GridOperator& op, const GridFunction& f);

bool is_symmetric(const GridOperator& op, double rel_tol = 1e-10);

struct Eigenpair {
    double eigenvalue = 0.0;
    GridFunction eigenvector;
    double second_eigenvalue = 0.0;
    // (lambda1 - lambda2) / lambda1, or 0 for the zero operator.
    double relative_gap = 0.0;
    bool degenerate = false;
};

// Largest eigenvalue and a unit-norm eigenvector of a symmetric nonnegative
// operator. The eigenvector's largest-magnitude entry is made positive.
// Dense solve up to kDenseEigenLimit grid points, power iteration above.
inline constexpr std::size_t kDenseEigenLimit = 256;
Eigenpair dominant_eigenpair(const GridOperator& op);

// Smallest eigenvalue of the quadrature-symmetrized operator (diagnostic).
double smallest_eigenvalue(const GridOperator& op);

}  // namespace intorder
