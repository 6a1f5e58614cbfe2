#include "intorder/lrcov.hpp"

#include "intorder/errors.hpp"

#include <cmath>
#include <cstdlib>

namespace intorder {

namespace {

void require_bandwidth(Eigen::Index n, int q)
{
    if (q < 0) {
        throw DomainError("bandwidth must be nonnegative");
    }
    if (q >= n) {
        throw DomainError("bandwidth q = " + std::to_string(q) + " must be smaller than the sample length " +
                          std::to_string(n));
    }
}

Eigen::MatrixXd demeaned(const Eigen::MatrixXd& z)
{
    const Eigen::RowVectorXd mean = z.colwise().mean();
    return z.rowwise() - mean;
}

Eigen::MatrixXd partial_sum_cov(const Eigen::MatrixXd& z)
{
    Eigen::MatrixXd s = z;
    for (Eigen::Index t = 1; t < s.rows(); ++t) {
        s.row(t) += s.row(t - 1);
    }
    Eigen::MatrixXd k = s.transpose() * s;
    return 0.5 * (k + k.transpose());
}

Eigen::MatrixXd bartlett_cov(const Eigen::MatrixXd& z, int q)
{
    const Eigen::Index n = z.rows();
    require_bandwidth(n, q);
    Eigen::MatrixXd acc = z.transpose() * z;
    for (int s = 1; s <= q; ++s) {
        // sum_{t=s}^{n-1} Z_t (x) Z_{t-s}
        const Eigen::MatrixXd gamma = z.bottomRows(n - s).transpose() * z.topRows(n - s);
        acc += bartlett_weight(s, q) * (gamma + gamma.transpose());
    }
    acc /= static_cast<double>(n);
    return 0.5 * (acc + acc.transpose());
}

}  // namespace

double bartlett_weight(int s, int q)
{
    if (q < 0 || std::abs(s) > q) {
        throw DomainError("bartlett_weight: |s| = " + std::to_string(std::abs(s)) + " exceeds q = " +
                          std::to_string(q));
    }
    return 1.0 - static_cast<double>(std::abs(s)) / static_cast<double>(q + 1);
}

int bandwidth(BandwidthRule rule, long long n_obs)
{
    if (n_obs < 1) {
        throw DomainError("bandwidth: sample length must be positive");
    }
    const double n = static_cast<double>(n_obs);
    // Nudge so that exact powers (e.g. 32^0.2 = 2) are not floored to one less.
    constexpr double nudge = 1e-9;
    switch (rule) {
    case BandwidthRule::PowerFifth:
        return static_cast<int>(std::floor(std::pow(n, 0.2) + nudge));
    case BandwidthRule::PowerQuarter:
        return static_cast<int>(std::floor(std::pow(n, 0.25) + nudge));
    case BandwidthRule::LogScaled:
        return static_cast<int>(std::floor(0.4 * std::log(n) + nudge));
    }
    throw DomainError("bandwidth: unknown rule");
}

std::string_view to_string(BandwidthRule rule)
{
    switch (rule) {
    case BandwidthRule::PowerFifth:
        return "t20";
    case BandwidthRule::PowerQuarter:
        return "t25";
    case BandwidthRule::LogScaled:
        return "log40";
    }
    return "?";
}

std::optional<BandwidthRule> parse_bandwidth_rule(std::string_view name)
{
    if (name == "t20" || name == "auto") {
        return BandwidthRule::PowerFifth;
    }
    if (name == "t25") {
        return BandwidthRule::PowerQuarter;
    }
    if (name == "log40") {
        return BandwidthRule::LogScaled;
    }
    return std::nullopt;
}

GridOperator ksum(const FunctionalPanel& panel)
{
    return GridOperator(panel.grid(), partial_sum_cov(panel.values()));
}

GridOperator ksum_demeaned(const FunctionalPanel& panel)
{
    return GridOperator(panel.grid(), partial_sum_cov(demeaned(panel.values())));
}

GridOperator lrcov(const FunctionalPanel& panel, BartlettConfig cfg)
{
    return GridOperator(panel.grid(), bartlett_cov(panel.values(), cfg.q));
}

GridOperator lrcov_demeaned(const FunctionalPanel& panel, BartlettConfig cfg)
{
    return GridOperator(panel.grid(), bartlett_cov(demeaned(panel.values()), cfg.q));
}

double ksum_scalar(std::span<const double> z)
{
    double partial = 0.0;
    double acc = 0.0;
    for (double v : z) {
        partial += v;
        acc += partial * partial;
    }
    return acc;
}

double lrcov_scalar(std::span<const double> z, int q)
{
    const auto n = static_cast<Eigen::Index>(z.size());
    require_bandwidth(n, q);
    double acc = 0.0;
    for (double v : z) {
        acc += v * v;
    }
    for (int s = 1; s <= q; ++s) {
        double gamma = 0.0;
        for (std::size_t t = static_cast<std::size_t>(s); t < z.size(); ++t) {
            gamma += z[t] * z[t - static_cast<std::size_t>(s)];
        }
        acc += 2.0 * bartlett_weight(s, q) * gamma;
    }
    return acc / static_cast<double>(n);
}

}  // namespace intorder
