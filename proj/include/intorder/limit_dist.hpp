#pragma once

// Simulated null distributions of the variance-ratio statistics:
// int_0^1 W(r)^2 dr (Brownian motion) and int_0^1 (W(r) - r W(1))^2 dr
// (Brownian bridge), with empirical quantiles, tail masses and a file cache.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

namespace intorder {

enum class LimitKind { BrownianMotion, BrownianBridge };

std::string_view to_string(LimitKind kind);
std::optional<LimitKind> parse_limit_kind(std::string_view name);

class LimitDistribution {
public:
    // samples must be positive and sorted ascending.
    LimitDistribution(LimitKind kind, std::vector<double> sorted_samples, std::size_t n_steps, std::uint64_t seed);

    LimitKind kind() const { return kind_; }
    const std::vector<double>& samples() const { return samples_; }
    std::size_t n_reps() const { return samples_.size(); }
    std::size_t n_steps() const { return n_steps_; }
    std::uint64_t seed() const { return seed_; }

    // Inverse empirical CDF: smallest sample x with F_n(x) >= p.
    double quantile(double p) const;
    // Fraction of samples strictly below / strictly above x.
    double lower_tail(double x) const;
    double upper_tail(double x) const;
    double mean() const;

private:
    LimitKind kind_;
    std::vector<double> samples_;
    std::size_t n_steps_;
    std::uint64_t seed_;
};

inline constexpr std::size_t kDefaultLimitReps = 200000;
inline constexpr std::size_t kDefaultLimitSteps = 10000;
inline constexpr std::uint64_t kDefaultLimitSeed = 20240911;

// Riemann approximation over n_steps of a Gaussian random walk with step
// variance 1/n_steps. Replication r draws from stream (seed, r).
LimitDistribution simulate_limit(LimitKind kind, std::size_t n_reps, std::size_t n_steps, std::uint64_t seed,
                                 unsigned threads = 0);

enum class Decision { Accept, RejectLower, RejectUpper };

std::string_view to_string(Decision decision);
// Wording used in human-readable reports.
std::string_view describe(Decision decision);

// 2 min(P(V > v), P(V < v)), capped at 1.
double p_value(double statistic, const LimitDistribution& dist);

// Two-sided decision against the alpha and 1 - alpha empirical quantiles;
// alpha is the per-tail mass and must lie in (0, 0.5).
Decision decide(double statistic, const LimitDistribution& dist, double alpha);

// Cache: one text header line, then n_reps little-endian doubles.
std::filesystem::path cache_file_name(LimitKind kind, std::size_t n_reps, std::size_t n_steps, std::uint64_t seed);
// $INTORDER_CACHE_DIR if set, otherwise ./.intorder-cache
std::filesystem::path default_cache_dir();

void save_limit_cache(const std::filesystem::path& path, const LimitDistribution& dist);
// nullopt when the file is missing, malformed, or was built with other settings.
std::optional<LimitDistribution> load_limit_cache(const std::filesystem::path& path, LimitKind kind,
                                                  std::size_t n_reps, std::size_t n_steps, std::uint64_t seed);
LimitDistribution load_or_simulate(const std::filesystem::path& cache_dir, LimitKind kind, std::size_t n_reps,
                                   std::size_t n_steps, std::uint64_t seed, unsigned threads = 0);

}  // namespace intorder
