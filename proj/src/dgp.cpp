#include "intorder/dgp.hpp"

#include "intorder/errors.hpp"
#include "intorder/fracdiff.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace intorder {

namespace {

// floor(U(1, 4)), i.e. 1, 2 or 3.
int draw_block_size(RandomStream& rng)
{
    return static_cast<int>(std::floor(rng.uniform(1.0, 4.0)));
}

void draw_stationary(double d1, RandomStream& rng, int cap, MemorySpectrum& out)
{
    int used = std::min(draw_block_size(rng), cap);
    out.d.push_back(d1);
    out.p.push_back(used);

    std::vector<int> sizes;
    while (used < cap) {
        const int p = std::min(draw_block_size(rng), cap - used);
        sizes.push_back(p);
        used += p;
    }
    std::vector<double> tail;
    tail.reserve(sizes.size());
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        const auto [lo, hi] = stationary_draw_interval(d1, i == 0 ? 2 : 3);
        tail.push_back(rng.uniform(lo, hi));
    }
    std::sort(tail.begin(), tail.end(), std::greater<>());
    out.d.insert(out.d.end(), tail.begin(), tail.end());
    out.p.insert(out.p.end(), sizes.begin(), sizes.end());
}

}  // namespace

std::string_view to_string(Regime regime)
{
    switch (regime) {
    case Regime::Stationary:
        return "stationary";
    case Regime::Nonstationary:
        return "nonstationary";
    case Regime::LocalToZero:
        return "local";
    }
    return "?";
}

Regime regime_for(double d1)
{
    return d1 < 0.5 ? Regime::Stationary : Regime::Nonstationary;
}

int MemorySpectrum::coordinates() const
{
    return std::accumulate(p.begin(), p.end(), 0);
}

double target_d1(const DgpConfig& cfg)
{
    if (cfg.regime == Regime::LocalToZero) {
        const int q = std::max(1, bandwidth(cfg.q_rule, cfg.T));
        return cfg.local_c / std::log(static_cast<double>(cfg.T) / q);
    }
    return cfg.d1;
}

void validate(const DgpConfig& cfg)
{
    if (cfg.T < 4) {
        throw DomainError("DGP: T must be at least 4");
    }
    if (cfg.G < 1) {
        throw DomainError("DGP: grid size must be positive");
    }
    if (!(cfg.b > 0.0 && cfg.b < 1.0)) {
        throw DomainError("DGP: ARMA bound b must lie in (0, 1)");
    }
    if (cfg.coordinate_cap < 7) {
        throw DomainError("DGP: coordinate cap must be at least 7");
    }
    const double d1 = target_d1(cfg);
    switch (cfg.regime) {
    case Regime::Stationary:
    case Regime::LocalToZero:
        if (!(d1 > -0.49 && d1 < 0.5)) {
            throw DomainError("DGP: stationary design needs d1 in (-0.49, 0.5), got " + std::to_string(d1));
        }
        break;
    case Regime::Nonstationary:
        if (!(d1 > 0.5 && d1 < 2.5)) {
            throw DomainError("DGP: nonstationary design needs d1 in (0.5, 2.5), got " + std::to_string(d1));
        }
        break;
    }
}

std::pair<double, double> stationary_draw_interval(double d1, int j)
{
    if (j == 2) {
        return {std::max(d1 - 0.2, -0.5), std::max(d1 - 0.1, -0.49)};
    }
    return {std::max(d1 - 0.5, -0.5), std::max(d1 - 0.2, -0.49)};
}

std::pair<double, double> nonstationary_d2_interval(double d1)
{
    const double lo = std::max(d1 - 0.2, 0.5);
    const double hi = std::max(d1 - 0.1, 0.51);
    return {lo, std::min(hi, d1)};
}

MemorySpectrum draw_memory_spectrum(double d1, Regime regime, RandomStream& rng, int coordinate_cap)
{
    MemorySpectrum out;
    if (regime != Regime::Nonstationary) {
        draw_stationary(d1, rng, coordinate_cap, out);
        return out;
    }
    const int p1 = draw_block_size(rng);
    const int p2 = draw_block_size(rng);
    const auto [lo, hi] = nonstationary_d2_interval(d1);
    const double d2 = rng.uniform(lo, hi);
    out.d = {d1, d2};
    out.p = {p1, p2};
    draw_stationary(0.25, rng, coordinate_cap - p1 - p2, out);
    return out;
}

std::vector<double> gen_arma(std::size_t n, double phi, double theta, RandomStream& rng, std::size_t burn_in)
{
    if (!(std::abs(phi) < 1.0)) {
        throw DomainError("gen_arma: |phi| must be below 1");
    }
    std::vector<double> out(n);
    double a = 0.0;
    double e_prev = 0.0;
    for (std::size_t t = 0; t < burn_in + n; ++t) {
        const double e = rng.normal();
        a = phi * a + e + theta * e_prev;
        e_prev = e;
        if (t >= burn_in) {
            out[t - burn_in] = a;
        }
    }
    return out;
}

double fourier_basis(int k, double u)
{
    if (k < 1) {
        throw DomainError("fourier_basis: index starts at 1");
    }
    if (k == 1) {
        return 1.0;
    }
    const double m = static_cast<double>(k / 2);
    const double arg = 2.0 * std::numbers::pi * m * u;
    return std::numbers::sqrt2 * (k % 2 == 0 ? std::cos(arg) : std::sin(arg));
}

DgpRealization generate(const DgpConfig& cfg)
{
    validate(cfg);
    RandomStream rng(cfg.seed, {0x646770});  // "dgp"
    const double d1 = target_d1(cfg);
    const Regime layout = cfg.regime == Regime::Nonstationary ? Regime::Nonstationary : Regime::Stationary;

    MemorySpectrum spectrum = draw_memory_spectrum(d1, layout, rng, cfg.coordinate_cap);

    std::array<int, 5> perm{1, 2, 3, 4, 5};
    for (int i = 4; i > 0; --i) {
        std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(rng.uniform_int(0, i))]);
    }

    const int n_coords = spectrum.coordinates();
    const auto T = static_cast<std::size_t>(cfg.T);
    Eigen::MatrixXd coords(static_cast<Eigen::Index>(T), n_coords);
    std::vector<ArmaCoeffs> arma;
    arma.reserve(static_cast<std::size_t>(n_coords));

    int l = 0;
    for (std::size_t j = 0; j < spectrum.d.size(); ++j) {
        for (int k = 0; k < spectrum.p[j]; ++k, ++l) {
            ArmaCoeffs c{rng.uniform(-cfg.b, cfg.b), rng.uniform(-cfg.b, cfg.b)};
            arma.push_back(c);
            std::vector<double> a = gen_arma(T, c.phi, c.theta, rng);
            const double sigma = 1.0 / ((l + 1.0) * (l + 1.0));
            for (double& v : a) {
                v *= sigma;
            }
            const std::vector<double> x = cumulate(a, spectrum.d[j]);
            coords.col(l) = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(T));
        }
    }

    std::vector<double> mu;
    if (cfg.with_intercept) {
        mu.resize(static_cast<std::size_t>(n_coords));
        for (double& m : mu) {
            m = rng.normal();
        }
    }

    const Grid grid(cfg.G);
    Eigen::MatrixXd basis(n_coords, static_cast<Eigen::Index>(cfg.G));
    for (int c = 0; c < n_coords; ++c) {
        const int k = c < 5 ? perm[static_cast<std::size_t>(c)] : c + 1;
        for (std::size_t i = 0; i < cfg.G; ++i) {
            basis(c, static_cast<Eigen::Index>(i)) = fourier_basis(k, grid.point(i));
        }
    }

    Eigen::MatrixXd values = coords * basis;
    if (cfg.with_intercept) {
        Eigen::RowVectorXd level = Eigen::RowVectorXd::Zero(static_cast<Eigen::Index>(cfg.G));
        for (int c = 0; c < n_coords; ++c) {
            level += mu[static_cast<std::size_t>(c)] / ((c + 1.0) * (c + 1.0)) * basis.row(c);
        }
        values.rowwise() += level;
    }

    return DgpRealization{FunctionalPanel(grid, std::move(values), 1),
                          d1,
                          std::move(spectrum),
                          perm,
                          std::move(arma),
                          std::move(mu),
                          std::move(coords),
                          cfg};
}

}  // namespace intorder
