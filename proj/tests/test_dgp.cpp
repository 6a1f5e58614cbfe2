#include "helpers.hpp"

#include "intorder/dgp.hpp"
#include "intorder/errors.hpp"
#include "intorder/fracdiff.hpp"
#include "intorder/vtests.hpp"

#include <cmath>
#include <numeric>

using namespace intorder;
using Catch::Matchers::WithinAbs;

namespace {

double lag1_autocorrelation(const std::vector<double>& x)
{
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    double num = 0.0;
    double den = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
        den += (x[t] - mean) * (x[t] - mean);
        if (t > 0) {
            num += (x[t] - mean) * (x[t - 1] - mean);
        }
    }
    return num / den;
}

double variance(const std::vector<double>& x)
{
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    double s = 0.0;
    for (double v : x) {
        s += (v - mean) * (v - mean);
    }
    return s / static_cast<double>(x.size() - 1);
}

}  // namespace

TEST_CASE("memory draw intervals", "[spectrum]")
{
    auto [lo, hi] = stationary_draw_interval(0.25, 2);
    REQUIRE_THAT(lo, WithinAbs(0.05, 1e-15));
    REQUIRE_THAT(hi, WithinAbs(0.15, 1e-15));
    std::tie(lo, hi) = stationary_draw_interval(-0.45, 2);
    REQUIRE(lo == -0.5);
    REQUIRE(hi == -0.49);
    std::tie(lo, hi) = stationary_draw_interval(0.25, 3);
    REQUIRE_THAT(lo, WithinAbs(-0.25, 1e-15));
    REQUIRE_THAT(hi, WithinAbs(0.05, 1e-15));
    std::tie(lo, hi) = nonstationary_d2_interval(0.55);
    REQUIRE(lo == 0.5);
    REQUIRE(hi == 0.51);
    std::tie(lo, hi) = nonstationary_d2_interval(1.0);
    REQUIRE_THAT(lo, WithinAbs(0.8, 1e-15));
    REQUIRE_THAT(hi, WithinAbs(0.9, 1e-15));
}

TEST_CASE("memory spectra respect their laws", "[spectrum]")
{
    RandomStream rng(77);
    for (int trial = 0; trial < 500; ++trial) {
        const bool nonstat = trial % 2 == 1;
        const double d1 = nonstat ? rng.uniform(0.5 + 1e-6, 1.5) : rng.uniform(-0.485, 0.49);
        const MemorySpectrum s = draw_memory_spectrum(d1, nonstat ? Regime::Nonstationary : Regime::Stationary, rng);
        REQUIRE(s.coordinates() == 25);
        REQUIRE(s.d.size() == s.p.size());
        REQUIRE(s.d.front() == d1);
        for (int p : s.p) {
            REQUIRE(p >= 1);
            REQUIRE(p <= 3);
        }
        for (std::size_t j = 1; j < s.d.size(); ++j) {
            REQUIRE(s.d[j] <= s.d[j - 1]);
            REQUIRE(s.d[j] >= -0.5);
        }
        if (nonstat) {
            const auto [lo, hi] = nonstationary_d2_interval(d1);
            REQUIRE(s.d[1] >= lo);
            REQUIRE(s.d[1] <= hi);
            REQUIRE(s.d[2] == 0.25);
        }
    }
}

TEST_CASE("ARMA generator", "[arma]")
{
    RandomStream a(1);
    const auto white = gen_arma(10000, 0.0, 0.0, a);
    REQUIRE_THAT(variance(white), WithinAbs(1.0, 0.1));

    RandomStream b(2);
    REQUIRE_THAT(lag1_autocorrelation(gen_arma(100000, 0.5, 0.0, b)), WithinAbs(0.5, 0.02));

    RandomStream c1(3);
    RandomStream c2(3);
    REQUIRE(gen_arma(500, 0.3, -0.2, c1) == gen_arma(500, 0.3, -0.2, c2));

    RandomStream d(4);
    REQUIRE_THROWS_AS(gen_arma(10, 1.0, 0.0, d), DomainError);
}

TEST_CASE("Fourier basis is orthonormal on the grid", "[basis]")
{
    const Grid g(101);
    for (int j = 1; j <= 9; ++j) {
        const auto ej = GridFunction::sample(g, [&](double u) { return fourier_basis(j, u); });
        for (int k = 1; k <= 9; ++k) {
            const auto ek = GridFunction::sample(g, [&](double u) { return fourier_basis(k, u); });
            REQUIRE_THAT(inner(ej, ek), WithinAbs(j == k ? 1.0 : 0.0, 1e-12));
        }
    }
    REQUIRE_THAT(fourier_basis(2, 0.25), WithinAbs(0.0, 1e-15));
    REQUIRE_THAT(fourier_basis(3, 0.25), WithinAbs(std::sqrt(2.0), 1e-15));
    REQUIRE_THROWS_AS(fourier_basis(0, 0.5), DomainError);
}

TEST_CASE("realizations are deterministic and structured", "[generate]")
{
    DgpConfig cfg;
    cfg.T = 120;
    cfg.G = 31;
    cfg.d1 = 0.3;
    cfg.seed = 12;
    const auto a = generate(cfg);
    const auto b = generate(cfg);
    REQUIRE(a.panel.values() == b.panel.values());
    REQUIRE(a.panel.n_rows() == 120);
    REQUIRE(a.panel.grid_size() == 31);
    REQUIRE(a.arma.size() == 25);
    REQUIRE(a.coordinates.cols() == 25);
    for (const auto& c : a.arma) {
        REQUIRE(std::abs(c.phi) <= 0.15);
        REQUIRE(std::abs(c.theta) <= 0.15);
    }
    std::array<int, 5> sorted = a.basis_perm;
    std::sort(sorted.begin(), sorted.end());
    REQUIRE(sorted == std::array<int, 5>{1, 2, 3, 4, 5});

    cfg.seed = 13;
    REQUIRE(generate(cfg).panel.values() != a.panel.values());
}

TEST_CASE("panel equals coordinates times the permuted basis", "[generate]")
{
    DgpConfig cfg;
    cfg.T = 60;
    cfg.G = 21;
    cfg.d1 = 1.0;
    cfg.regime = Regime::Nonstationary;
    cfg.seed = 5;
    const auto r = generate(cfg);
    const Grid g(21);
    for (Eigen::Index t : {Eigen::Index{0}, Eigen::Index{31}, Eigen::Index{59}}) {
        for (std::size_t i = 0; i < g.size(); ++i) {
            double x = 0.0;
            for (int l = 0; l < 25; ++l) {
                const int k = l < 5 ? r.basis_perm[static_cast<std::size_t>(l)] : l + 1;
                x += r.coordinates(t, l) * fourier_basis(k, g.point(i));
            }
            REQUIRE_THAT(r.panel.values()(t, static_cast<Eigen::Index>(i)), WithinAbs(x, 1e-12));
        }
    }
}

TEST_CASE("coordinate scale and block memory", "[generate]")
{
    DgpConfig cfg;
    cfg.T = 300;
    cfg.G = 11;
    cfg.d1 = 0.2;
    cfg.seed = 44;
    const auto r = generate(cfg);
    // Undo the block cumulation: coordinate l must equal sigma_l times an ARMA path.
    int l = 0;
    for (std::size_t j = 0; j < r.spectrum.d.size(); ++j) {
        for (int k = 0; k < r.spectrum.p[j]; ++k, ++l) {
            std::vector<double> x(static_cast<std::size_t>(cfg.T));
            for (long t = 0; t < cfg.T; ++t) {
                x[static_cast<std::size_t>(t)] = r.coordinates(t, l);
            }
            const auto a = frac_diff(std::span<const double>(x), r.spectrum.d[j]);
            const double sigma = 1.0 / ((l + 1.0) * (l + 1.0));
            // ARMA(1,1) with |phi|, |theta| <= 0.15 has variance within [0.7, 1.5].
            const double v = variance(a) / (sigma * sigma);
            REQUIRE(v > 0.6);
            REQUIRE(v < 1.6);
        }
    }
    REQUIRE(l == 25);
}

TEST_CASE("second coordinate carries a quarter of the ARMA scale", "[generate]")
{
    DgpConfig cfg;
    cfg.T = 50;
    cfg.G = 5;
    cfg.d1 = 0.0;
    cfg.seed = 1;
    const auto r = generate(cfg);
    // Rebuild the innovation stream by replaying the generator's draws.
    RandomStream rng(cfg.seed, {0x646770});
    const MemorySpectrum s = draw_memory_spectrum(0.0, Regime::Stationary, rng);
    for (int i = 4; i > 0; --i) {
        rng.uniform_int(0, i);
    }
    std::vector<double> a0;
    std::vector<double> a1;
    for (int l = 0; l < 2; ++l) {
        const double phi = rng.uniform(-cfg.b, cfg.b);
        const double theta = rng.uniform(-cfg.b, cfg.b);
        (l == 0 ? a0 : a1) = gen_arma(static_cast<std::size_t>(cfg.T), phi, theta, rng);
    }
    std::vector<double> coord1(static_cast<std::size_t>(cfg.T));
    for (long t = 0; t < cfg.T; ++t) {
        coord1[static_cast<std::size_t>(t)] = r.coordinates(t, 1);
    }
    const double d = s.p[0] >= 2 ? s.d[0] : s.d[1];
    const auto undone = frac_diff(std::span<const double>(coord1), d);
    for (std::size_t t = 0; t < undone.size(); ++t) {
        REQUIRE_THAT(undone[t], WithinAbs(0.25 * a1[t], 1e-12));
    }
}

TEST_CASE("intercept only shifts the levels", "[generate]")
{
    DgpConfig cfg;
    cfg.T = 100;
    cfg.G = 21;
    cfg.d1 = 0.1;
    cfg.seed = 3;
    const auto plain = generate(cfg);
    cfg.with_intercept = true;
    const auto shifted = generate(cfg);
    REQUIRE(shifted.intercept.size() == 25);
    const Eigen::MatrixXd diff = shifted.panel.values() - plain.panel.values();
    for (Eigen::Index t = 1; t < diff.rows(); ++t) {
        REQUIRE((diff.row(t) - diff.row(0)).cwiseAbs().maxCoeff() < 1e-12);
    }
    REQUIRE(diff.row(0).cwiseAbs().maxCoeff() > 0.0);
    const double a = v_statistic(plain.panel, 0, true, 3).statistic;
    const double b = v_statistic(shifted.panel, 0, true, 3).statistic;
    REQUIRE_THAT(b, Catch::Matchers::WithinRel(a, 1e-9));
}

TEST_CASE("local-to-zero memory", "[generate]")
{
    DgpConfig cfg;
    cfg.T = 250;
    cfg.regime = Regime::LocalToZero;
    cfg.local_c = 0.9;
    REQUIRE_THAT(target_d1(cfg), WithinAbs(0.9 / std::log(250.0 / 3.0), 1e-15));
    cfg.q_rule = BandwidthRule::LogScaled;
    REQUIRE_THAT(target_d1(cfg), WithinAbs(0.9 / std::log(125.0), 1e-15));
    cfg.G = 11;
    REQUIRE(generate(cfg).d1 == target_d1(cfg));
}

TEST_CASE("configuration validation", "[generate]")
{
    DgpConfig cfg;
    cfg.d1 = 0.5;
    REQUIRE_THROWS_AS(validate(cfg), DomainError);
    cfg.d1 = 0.6;
    cfg.regime = Regime::Nonstationary;
    REQUIRE_NOTHROW(validate(cfg));
    cfg.b = 1.0;
    REQUIRE_THROWS_AS(validate(cfg), DomainError);
    cfg.b = 0.6;
    cfg.T = 3;
    REQUIRE_THROWS_AS(validate(cfg), DomainError);
    REQUIRE(regime_for(0.45) == Regime::Stationary);
    REQUIRE(regime_for(1.0) == Regime::Nonstationary);
}

TEST_CASE("null DGP: V0 inside the band most of the time", "[behaviour]")
{
    const auto& cv = testing::critical_values();
    const auto& motion = cv.get(LimitKind::BrownianMotion);
    int inside = 0;
    const int n = 400;
    for (int seed = 0; seed < n; ++seed) {
        DgpConfig cfg;
        cfg.T = 250;
        cfg.G = 51;
        cfg.d1 = 0.0;
        cfg.b = 0.01;
        cfg.seed = static_cast<std::uint64_t>(seed);
        const auto r = generate(cfg);
        inside += decide(v_statistic(r.panel, 0, false, 3).statistic, motion, 0.025) == Decision::Accept ? 1 : 0;
    }
    REQUIRE_THAT(static_cast<double>(inside) / n, WithinAbs(0.95, 0.04));
}

TEST_CASE("classification at T=1000 with d1=0 settles on {0}", "[behaviour]")
{
    const auto& cv = testing::critical_values();
    int zero = 0;
    const int n = 200;
    for (int seed = 0; seed < n; ++seed) {
        DgpConfig cfg;
        cfg.T = 1000;
        cfg.G = 51;
        cfg.d1 = 0.0;
        cfg.seed = static_cast<std::uint64_t>(seed) + 100000;
        const auto r = generate(cfg);
        SequentialOptions opts;
        opts.q = bandwidth(BandwidthRule::PowerFifth, cfg.T);
        zero += sequential(r.panel, opts, cv).interval == Interval::Zero ? 1 : 0;
    }
    REQUIRE_THAT(static_cast<double>(zero) / n, WithinAbs(0.95, 0.04));
}
