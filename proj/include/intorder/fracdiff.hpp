#pragma once

#include "intorder/funcspace.hpp"

#include <span>
#include <vector>

namespace intorder {

// Coefficients pi_j(d) of the power series of (1 - L)^d, j = 0..n.
struct FracCoeffs {
    double d = 0.0;
    std::vector<double> pi;
};

// pi_0 = 1, pi_j = pi_{j-1} (j - 1 - d) / j. Exact zeros beyond j = d for
// nonnegative integer d. Rejects |d| > 100.
FracCoeffs frac_coeffs(double d, std::size_t n);

// Type-II (sample-truncated) fractional difference of a scalar series:
// out_t = sum_{j=0}^{t} pi_j x_{t-j}.
std::vector<double> frac_diff(std::span<const double> x, double d);

// Column-wise Type-II fractional difference; the first stored row is left
// unchanged and the first index is preserved.
FunctionalPanel frac_diff(const FunctionalPanel& panel, double d);

// Inverse of frac_diff: fractional cumulation of order d (running sums for d = 1).
FunctionalPanel cumulate(const FunctionalPanel& panel, double d);
std::vector<double> cumulate(std::span<const double> x, double d);

// k-th difference restricted to its valid range: each step applies
// frac_diff(., 1) and drops the first row, advancing the first index by one.
FunctionalPanel difference(const FunctionalPanel& panel, int k);

}  // namespace intorder
