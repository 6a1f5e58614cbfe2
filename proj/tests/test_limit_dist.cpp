#include "helpers.hpp"

#include "intorder/errors.hpp"
#include "intorder/limit_dist.hpp"
#include "intorder/parallel.hpp"
#include "intorder/rng.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

using namespace intorder;
using Catch::Matchers::WithinAbs;

namespace fs = std::filesystem;

namespace {

// Two-pass reference for one replication, drawing from the same stream.
double reference_draw(LimitKind kind, std::size_t n_steps, std::uint64_t seed, std::uint64_t rep)
{
    RandomStream rng(seed, {rep});
    std::vector<double> w(n_steps);
    double acc = 0.0;
    for (double& v : w) {
        acc += rng.normal() / std::sqrt(static_cast<double>(n_steps));
        v = acc;
    }
    double s = 0.0;
    for (std::size_t k = 0; k < n_steps; ++k) {
        const double r = static_cast<double>(k + 1) / static_cast<double>(n_steps);
        const double x = kind == LimitKind::BrownianMotion ? w[k] : w[k] - r * w.back();
        s += x * x;
    }
    return s / static_cast<double>(n_steps);
}

const LimitDistribution& small_motion()
{
    static const LimitDistribution d = simulate_limit(LimitKind::BrownianMotion, 40000, 1000, 3);
    return d;
}

fs::path scratch_dir(const char* name)
{
    fs::path p = fs::temp_directory_path() / ("intorder-test-" + std::string(name));
    fs::remove_all(p);
    return p;
}

}  // namespace

TEST_CASE("streams are keyed, not positional", "[rng]")
{
    RandomStream a(5, {1, 2});
    RandomStream b(5, {1, 2});
    RandomStream c(5, {2, 1});
    const double x = a.normal();
    REQUIRE(x == b.normal());
    REQUIRE(x != c.normal());
    REQUIRE(derive_seed(1, {2}) != derive_seed(2, {1}));
    REQUIRE(hash_label("T1a") != hash_label("T1b"));
}

TEST_CASE("one-pass functionals equal the two-pass definitions", "[oracle]")
{
    for (auto kind : {LimitKind::BrownianMotion, LimitKind::BrownianBridge}) {
        const auto dist = simulate_limit(kind, 1000, 500, 17, 1);
        std::vector<double> ref(1000);
        for (std::size_t r = 0; r < ref.size(); ++r) {
            ref[r] = reference_draw(kind, 500, 17, r);
        }
        std::sort(ref.begin(), ref.end());
        for (std::size_t r = 0; r < ref.size(); ++r) {
            REQUIRE_THAT(dist.samples()[r], WithinAbs(ref[r], 1e-12 * (1.0 + ref[r])));
        }
    }
}

TEST_CASE("functional means", "[limit]")
{
    // E int W^2 = 1/2 and E int (W - rW(1))^2 = 1/6; the Riemann sum adds
    // O(1/n) bias, here 1/(2n) and about 1/(6n) respectively.
    REQUIRE_THAT(small_motion().mean(), WithinAbs(0.5, 0.015));
    const auto bridge = simulate_limit(LimitKind::BrownianBridge, 40000, 1000, 3);
    REQUIRE_THAT(bridge.mean(), WithinAbs(1.0 / 6.0, 0.004));
}

TEST_CASE("identical results for 1, 2 and 8 threads", "[determinism]")
{
    for (auto kind : {LimitKind::BrownianMotion, LimitKind::BrownianBridge}) {
        const auto one = simulate_limit(kind, 3000, 200, 42, 1);
        const auto two = simulate_limit(kind, 3000, 200, 42, 2);
        const auto eight = simulate_limit(kind, 3000, 200, 42, 8);
        REQUIRE(one.samples() == two.samples());
        REQUIRE(one.samples() == eight.samples());
    }
}

TEST_CASE("parallel_for covers each index once and propagates failures", "[parallel]")
{
    std::vector<int> hits(1003, 0);
    parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; }, 7);
    REQUIRE(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
    REQUIRE_THROWS_AS(parallel_for(100, 3, [](std::size_t i) {
                          if (i == 57) {
                              throw NumericError("boom");
                          }
                      }),
                      NumericError);
}

TEST_CASE("quantiles, tails and p-values", "[limit]")
{
    std::vector<double> s(1000);
    std::iota(s.begin(), s.end(), 1.0);
    const LimitDistribution d(LimitKind::BrownianMotion, s, 100, 0);
    REQUIRE(d.quantile(0.025) == 25.0);
    REQUIRE(d.quantile(0.975) == 975.0);
    REQUIRE(d.quantile(0.0) == 1.0);
    REQUIRE(d.quantile(1.0) == 1000.0);
    REQUIRE(d.lower_tail(25.0) == 0.024);
    REQUIRE(d.upper_tail(975.0) == 0.025);

    const double median = d.quantile(0.5);
    REQUIRE_THAT(p_value(median, d), WithinAbs(1.0, 2.0 / 1000.0));
    REQUIRE(p_value(1e9, d) == 0.0);
    REQUIRE_THAT(p_value(d.quantile(0.975), d), WithinAbs(0.05, 2.0 / 1000.0));

    REQUIRE_THROWS_AS(LimitDistribution(LimitKind::BrownianMotion, {2.0, 1.0}, 100, 0), ContractViolation);
    REQUIRE_THROWS_AS(LimitDistribution(LimitKind::BrownianMotion, {0.0, 1.0}, 100, 0), DomainError);
}

TEST_CASE("two-sided decisions", "[limit]")
{
    const auto& d = small_motion();
    REQUIRE(decide(1.0, d, 0.025) == Decision::Accept);
    REQUIRE(decide(0.004, d, 0.025) == Decision::RejectLower);
    REQUIRE(decide(58.06, d, 0.025) == Decision::RejectUpper);
    REQUIRE_THROWS_AS(decide(1.0, d, 0.5), DomainError);
    REQUIRE(describe(Decision::RejectUpper) == "Rejection in the upper tail");
    REQUIRE(describe(Decision::RejectLower) == "Rejection in the lower tail");
}

TEST_CASE("cache roundtrip and key checks", "[cache]")
{
    const fs::path dir = scratch_dir("cache");
    const auto first = load_or_simulate(dir, LimitKind::BrownianBridge, 2000, 150, 9, 1);
    const fs::path file = dir / cache_file_name(LimitKind::BrownianBridge, 2000, 150, 9);
    REQUIRE(fs::exists(file));
    REQUIRE(fs::file_size(file) > 2000 * 8);

    const auto loaded = load_limit_cache(file, LimitKind::BrownianBridge, 2000, 150, 9);
    REQUIRE(loaded.has_value());
    REQUIRE(loaded->samples() == first.samples());
    REQUIRE_FALSE(load_limit_cache(file, LimitKind::BrownianBridge, 2000, 150, 10).has_value());
    REQUIRE_FALSE(load_limit_cache(file, LimitKind::BrownianMotion, 2000, 150, 9).has_value());
    REQUIRE_FALSE(load_limit_cache(dir / "missing.bin", LimitKind::BrownianBridge, 2000, 150, 9).has_value());

    // A truncated file is ignored and rebuilt.
    fs::resize_file(file, fs::file_size(file) - 8);
    REQUIRE_FALSE(load_limit_cache(file, LimitKind::BrownianBridge, 2000, 150, 9).has_value());
    const auto rebuilt = load_or_simulate(dir, LimitKind::BrownianBridge, 2000, 150, 9, 1);
    REQUIRE(rebuilt.samples() == first.samples());
    fs::remove_all(dir);
}

TEST_CASE("simulation arguments are validated", "[limit]")
{
    REQUIRE_THROWS_AS(simulate_limit(LimitKind::BrownianMotion, 999, 1000, 1), DomainError);
    REQUIRE_THROWS_AS(simulate_limit(LimitKind::BrownianMotion, 1000, 99, 1), DomainError);
}
