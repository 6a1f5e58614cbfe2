#include "intorder/limit_dist.hpp"

#include "intorder/errors.hpp"
#include "intorder/parallel.hpp"
#include "intorder/rng.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

namespace intorder {

namespace {

constexpr int kCacheFormatVersion = 1;

std::string cache_header(LimitKind kind, std::size_t n_reps, std::size_t n_steps, std::uint64_t seed)
{
    std::ostringstream os;
    os << "intorder-critval v" << kCacheFormatVersion << " kind=" << to_string(kind) << " reps=" << n_reps
       << " steps=" << n_steps << " seed=" << seed;
    return os.str();
}

double simulate_one(LimitKind kind, std::size_t n_steps, std::uint64_t seed, std::uint64_t rep)
{
    RandomStream rng(seed, {rep});
    const double n = static_cast<double>(n_steps);
    const double step_sd = 1.0 / std::sqrt(n);
    double w = 0.0;
    double sum_sq = 0.0;
    double sum_kw = 0.0;
    for (std::size_t k = 1; k <= n_steps; ++k) {
        w += step_sd * rng.normal();
        sum_sq += w * w;
        sum_kw += static_cast<double>(k) * w;
    }
    if (kind == LimitKind::BrownianMotion) {
        return sum_sq / n;
    }
    // sum_k (W_k - (k/n) W_n)^2 expanded so one pass suffices.
    const double sum_r2 = (n + 1.0) * (2.0 * n + 1.0) / (6.0 * n);
    const double bridge = sum_sq - 2.0 * w * sum_kw / n + w * w * sum_r2;
    return std::max(bridge, 0.0) / n;
}

}  // namespace

std::string_view to_string(LimitKind kind)
{
    return kind == LimitKind::BrownianMotion ? "bm" : "bridge";
}

std::optional<LimitKind> parse_limit_kind(std::string_view name)
{
    if (name == "bm" || name == "brownian-motion") {
        return LimitKind::BrownianMotion;
    }
    if (name == "bridge" || name == "brownian-bridge") {
        return LimitKind::BrownianBridge;
    }
    return std::nullopt;
}

LimitDistribution::LimitDistribution(LimitKind kind, std::vector<double> sorted_samples, std::size_t n_steps,
                                     std::uint64_t seed)
    : kind_(kind), samples_(std::move(sorted_samples)), n_steps_(n_steps), seed_(seed)
{
    if (samples_.empty()) {
        throw DomainError("limit distribution has no samples");
    }
    if (!std::is_sorted(samples_.begin(), samples_.end())) {
        throw ContractViolation("limit distribution samples must be sorted");
    }
    if (!(samples_.front() > 0.0) || !std::isfinite(samples_.back())) {
        throw DomainError("limit distribution samples must be positive and finite");
    }
}

double LimitDistribution::quantile(double p) const
{
    if (!(p >= 0.0 && p <= 1.0)) {
        throw DomainError("quantile level must lie in [0, 1]");
    }
    const double n = static_cast<double>(samples_.size());
    const auto k = static_cast<std::size_t>(std::ceil(p * n - 1e-9));
    return samples_[std::clamp<std::size_t>(k, 1, samples_.size()) - 1];
}

double LimitDistribution::lower_tail(double x) const
{
    const auto it = std::lower_bound(samples_.begin(), samples_.end(), x);
    return static_cast<double>(it - samples_.begin()) / static_cast<double>(samples_.size());
}

double LimitDistribution::upper_tail(double x) const
{
    const auto it = std::upper_bound(samples_.begin(), samples_.end(), x);
    return static_cast<double>(samples_.end() - it) / static_cast<double>(samples_.size());
}

double LimitDistribution::mean() const
{
    return std::accumulate(samples_.begin(), samples_.end(), 0.0) / static_cast<double>(samples_.size());
}

LimitDistribution simulate_limit(LimitKind kind, std::size_t n_reps, std::size_t n_steps, std::uint64_t seed,
                                 unsigned threads)
{
    if (n_reps < 1000) {
        throw DomainError("simulate_limit: need at least 1000 replications, got " + std::to_string(n_reps));
    }
    if (n_steps < 100) {
        throw DomainError("simulate_limit: need at least 100 steps, got " + std::to_string(n_steps));
    }
    std::vector<double> samples(n_reps);
    parallel_for(
        n_reps, threads, [&](std::size_t r) { samples[r] = simulate_one(kind, n_steps, seed, r); }, 256);
    std::sort(samples.begin(), samples.end());
    return LimitDistribution(kind, std::move(samples), n_steps, seed);
}

std::string_view to_string(Decision decision)
{
    switch (decision) {
    case Decision::Accept:
        return "accept";
    case Decision::RejectLower:
        return "reject_lower";
    case Decision::RejectUpper:
        return "reject_upper";
    }
    return "?";
}

std::string_view describe(Decision decision)
{
    switch (decision) {
    case Decision::Accept:
        return "Accept";
    case Decision::RejectLower:
        return "Rejection in the lower tail";
    case Decision::RejectUpper:
        return "Rejection in the upper tail";
    }
    return "?";
}

double p_value(double statistic, const LimitDistribution& dist)
{
    const double tails = std::min(dist.upper_tail(statistic), dist.lower_tail(statistic));
    return std::min(1.0, 2.0 * tails);
}

Decision decide(double statistic, const LimitDistribution& dist, double alpha)
{
    if (!(alpha > 0.0 && alpha < 0.5)) {
        throw DomainError("alpha must lie in (0, 0.5), got " + std::to_string(alpha));
    }
    if (statistic < dist.quantile(alpha)) {
        return Decision::RejectLower;
    }
    if (statistic > dist.quantile(1.0 - alpha)) {
        return Decision::RejectUpper;
    }
    return Decision::Accept;
}

std::filesystem::path cache_file_name(LimitKind kind, std::size_t n_reps, std::size_t n_steps, std::uint64_t seed)
{
    std::ostringstream os;
    os << "critval-" << to_string(kind) << "-r" << n_reps << "-n" << n_steps << "-s" << seed << ".bin";
    return os.str();
}

std::filesystem::path default_cache_dir()
{
    if (const char* env = std::getenv("INTORDER_CACHE_DIR"); env != nullptr && *env != '\0') {
        return env;
    }
    return ".intorder-cache";
}

void save_limit_cache(const std::filesystem::path& path, const LimitDistribution& dist)
{
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot write critical-value cache " + tmp.string());
        }
        out << cache_header(dist.kind(), dist.n_reps(), dist.n_steps(), dist.seed()) << '\n';
        for (double v : dist.samples()) {
            std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
            unsigned char bytes[8];
            for (int b = 0; b < 8; ++b) {
                bytes[b] = static_cast<unsigned char>(bits >> (8 * b));
            }
            out.write(reinterpret_cast<const char*>(bytes), 8);
        }
        if (!out) {
            throw IoError("failed writing critical-value cache " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

std::optional<LimitDistribution> load_limit_cache(const std::filesystem::path& path, LimitKind kind,
                                                  std::size_t n_reps, std::size_t n_steps, std::uint64_t seed)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        return std::nullopt;
    }
    std::string header;
    if (!std::getline(in, header) || header != cache_header(kind, n_reps, n_steps, seed)) {
        return std::nullopt;
    }
    std::vector<double> samples(n_reps);
    for (std::size_t i = 0; i < n_reps; ++i) {
        unsigned char bytes[8];
        if (!in.read(reinterpret_cast<char*>(bytes), 8)) {
            return std::nullopt;
        }
        std::uint64_t bits = 0;
        for (int b = 0; b < 8; ++b) {
            bits |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
        }
        samples[i] = std::bit_cast<double>(bits);
    }
    if (in.peek() != std::char_traits<char>::eof()) {
        return std::nullopt;
    }
    try {
        return LimitDistribution(kind, std::move(samples), n_steps, seed);
    } catch (const Error&) {
        return std::nullopt;
    }
}

LimitDistribution load_or_simulate(const std::filesystem::path& cache_dir, LimitKind kind, std::size_t n_reps,
                                   std::size_t n_steps, std::uint64_t seed, unsigned threads)
{
    const std::filesystem::path path = cache_dir / cache_file_name(kind, n_reps, n_steps, seed);
    if (auto cached = load_limit_cache(path, kind, n_reps, n_steps, seed)) {
        return std::move(*cached);
    }
    LimitDistribution dist = simulate_limit(kind, n_reps, n_steps, seed, threads);
    save_limit_cache(path, dist);
    return dist;
}

}  // namespace intorder
