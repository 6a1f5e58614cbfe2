#pragma once

// Simulation design for fractionally integrated curve-valued series.
//
// Coordinates l = 1..L carry ARMA(1,1) noise scaled by l^-2, are grouped in
// blocks j with memory d_j (d_1 the largest), fractionally cumulated per
// block, and mapped onto a Fourier basis whose first five members are
// randomly permuted.

#include "intorder/funcspace.hpp"
#include "intorder/lrcov.hpp"
#include "intorder/rng.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace intorder {

enum class Regime {
    Stationary,     // d1 in (-0.49, 0.5)
    Nonstationary,  // d1 in (0.5, 2.5); a stationary block with lead memory 0.25 is appended
    LocalToZero,    // d1 = c / log(T / q), laid out as Stationary
};

std::string_view to_string(Regime regime);

struct DgpConfig {
    long T = 250;
    std::size_t G = 101;
    double d1 = 0.0;
    Regime regime = Regime::Stationary;
    double local_c = 0.0;  // LocalToZero only
    double b = 0.15;       // ARMA coefficients ~ U[-b, b]
    bool with_intercept = false;
    int coordinate_cap = 25;
    BandwidthRule q_rule = BandwidthRule::PowerFifth;  // LocalToZero only
    std::uint64_t seed = 1;
};

// Stationary for d1 < 0.5, Nonstationary otherwise.
Regime regime_for(double d1);

void validate(const DgpConfig& cfg);

// The memory parameter the configuration actually targets.
double target_d1(const DgpConfig& cfg);

struct MemorySpectrum {
    std::vector<double> d;  // strictly decreasing, d[0] = d1
    std::vector<int> p;     // block dimensions
    int coordinates() const;
};

// Uniform law of the j-th memory draw (j >= 2) in the stationary design.
std::pair<double, double> stationary_draw_interval(double d1, int j);
// Uniform law of d2 in the nonstationary design, truncated below d1.
std::pair<double, double> nonstationary_d2_interval(double d1);

MemorySpectrum draw_memory_spectrum(double d1, Regime regime, RandomStream& rng, int coordinate_cap = 25);

// a_t = phi a_{t-1} + e_t + theta e_{t-1} with standard normal e_t, started at
// zero; the first burn_in values are discarded.
std::vector<double> gen_arma(std::size_t n, double phi, double theta, RandomStream& rng, std::size_t burn_in = 200);

// Orthonormal Fourier basis on [0, 1]: e_1 = 1, e_{2m} = sqrt2 cos(2 pi m u),
// e_{2m+1} = sqrt2 sin(2 pi m u).
double fourier_basis(int k, double u);

struct ArmaCoeffs {
    double phi = 0.0;
    double theta = 0.0;
};

struct DgpRealization {
    FunctionalPanel panel;
    double d1 = 0.0;
    MemorySpectrum spectrum;
    std::array<int, 5> basis_perm{};   // coordinate l <= 5 loads on e_{basis_perm[l-1]}
    std::vector<ArmaCoeffs> arma;      // one per coordinate
    std::vector<double> intercept;     // mu_l per coordinate, empty without intercept
    Eigen::MatrixXd coordinates;       // T x L cumulated coordinate series (without intercept)
    DgpConfig config;
};

DgpRealization generate(const DgpConfig& cfg);

}  // namespace intorder
