#include "intorder/fracdiff.hpp"

#include "intorder/errors.hpp"

#include <cmath>
#include <string>

namespace intorder {

namespace {

// Drops the exact-zero tail that integer orders produce.
std::size_t effective_length(const FracCoeffs& c)
{
    std::size_t len = c.pi.size();
    while (len > 1 && c.pi[len - 1] == 0.0) {
        --len;
    }
    return len;
}

}  // namespace

FracCoeffs frac_coeffs(double d, std::size_t n)
{
    if (!std::isfinite(d) || std::abs(d) > 100.0) {
        throw DomainError("frac_coeffs: memory parameter must be finite with |d| <= 100, got " + std::to_string(d));
    }
    FracCoeffs c{d, std::vector<double>(n + 1)};
    c.pi[0] = 1.0;
    for (std::size_t j = 1; j <= n; ++j) {
        const double jd = static_cast<double>(j);
        c.pi[j] = c.pi[j - 1] * (jd - 1.0 - d) / jd;
    }
    return c;
}

std::vector<double> frac_diff(std::span<const double> x, double d)
{
    if (x.empty()) {
        throw DimensionError("frac_diff: empty series");
    }
    const FracCoeffs c = frac_coeffs(d, x.size() - 1);
    const std::size_t len = effective_length(c);
    std::vector<double> out(x.size(), 0.0);
    for (std::size_t t = 0; t < x.size(); ++t) {
        const std::size_t jmax = std::min(t + 1, len);
        double acc = 0.0;
        for (std::size_t j = 0; j < jmax; ++j) {
            acc += c.pi[j] * x[t - j];
        }
        out[t] = acc;
    }
    return out;
}

std::vector<double> cumulate(std::span<const double> x, double d)
{
    return frac_diff(x, -d);
}

FunctionalPanel frac_diff(const FunctionalPanel& panel, double d)
{
    const Eigen::MatrixXd& z = panel.values();
    const Eigen::Index n = z.rows();
    const FracCoeffs c = frac_coeffs(d, static_cast<std::size_t>(n - 1));
    const auto len = static_cast<Eigen::Index>(effective_length(c));

    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, z.cols());
    for (Eigen::Index t = 0; t < n; ++t) {
        const Eigen::Index jmax = std::min(t + 1, len);
        for (Eigen::Index j = 0; j < jmax; ++j) {
            out.row(t) += c.pi[static_cast<std::size_t>(j)] * z.row(t - j);
        }
    }
    return FunctionalPanel(panel.grid(), std::move(out), panel.first_index());
}

FunctionalPanel cumulate(const FunctionalPanel& panel, double d)
{
    return frac_diff(panel, -d);
}

FunctionalPanel difference(const FunctionalPanel& panel, int k)
{
    if (k < 0) {
        throw DomainError("difference: order must be nonnegative");
    }
    if (panel.n_rows() < k + 2) {
        throw DimensionError("difference: order " + std::to_string(k) + " needs at least " + std::to_string(k + 2) +
                             " rows, panel has " + std::to_string(panel.n_rows()));
    }
    Eigen::MatrixXd z = panel.values();
    for (int step = 0; step < k; ++step) {
        const Eigen::Index n = z.rows();
        z = (z.bottomRows(n - 1) - z.topRows(n - 1)).eval();
    }
    return FunctionalPanel(panel.grid(), std::move(z), panel.first_index() + k);
}

}  // namespace intorder
