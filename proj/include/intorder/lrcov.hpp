#pragma once

// Partial-sum covariance K and Bartlett long-run covariance Lambda of a
// functional panel, in raw and demeaned form, plus the bandwidth rules.

#include "intorder/funcspace.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace intorder {

struct BartlettConfig {
    int q = 0;
};

// 1 - |s| / (q + 1); throws DomainError when |s| > q.
double bartlett_weight(int s, int q);

enum class BandwidthRule {
    PowerFifth,    // floor(T^0.2), the default
    PowerQuarter,  // floor(T^0.25)
    LogScaled,     // floor(0.4 log T)
};

int bandwidth(BandwidthRule rule, long long n_obs);
std::string_view to_string(BandwidthRule rule);
std::optional<BandwidthRule> parse_bandwidth_rule(std::string_view name);

// K = sum_t S_t (x) S_t with S_t the running sum of the panel rows.
GridOperator ksum(const FunctionalPanel& panel);
GridOperator ksum_demeaned(const FunctionalPanel& panel);

// Lambda = n^-1 sum_{|s|<=q} w(s,q) sum_t Z_t (x) Z_{t-s}, both time indices
// in-sample, n the number of stored rows.
GridOperator lrcov(const FunctionalPanel& panel, BartlettConfig cfg);
GridOperator lrcov_demeaned(const FunctionalPanel& panel, BartlettConfig cfg);

// Scalar counterparts, used on projections <Z_t, h>.
double ksum_scalar(std::span<const double> z);
double lrcov_scalar(std::span<const double> z, int q);

}  // namespace intorder
