#pragma once

// Variance-ratio tests of integer integration order for functional time
// series, and the sequential classification built on them.
//
// For order k the statistic is
//
//     V_k = n^-2 <K(Y_k) h, h> / <Lambda(Y_k) h, h>
//
// where Y_k is the k-th difference of the (initialized) level panel, n the
// number of rows of Y_k, K the partial-sum covariance, Lambda the Bartlett
// long-run covariance, and h the dominant eigenvector of K of the levels.
// Under I(k) the statistic converges to int W^2; it collapses toward zero
// for memory below k and diverges above. The demeaned variant replaces h by
// the eigenvector of the demeaned K and, for k = 0 only, demeans the series;
// its order-0 null limit is the Brownian-bridge functional.

#include "intorder/funcspace.hpp"
#include "intorder/limit_dist.hpp"

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace intorder {

struct VStatOptions {
    // Take h from the differenced panel instead of the levels. Off by default.
    bool reestimate_direction = false;
};

struct VStatistic {
    int order = 0;
    bool demeaned = false;
    double statistic = 0.0;
    double numerator = 0.0;    // <K h, h>
    double denominator = 0.0;  // <Lambda h, h>
    long n_obs = 0;
    int q = 0;
    double eigen_gap = 0.0;
    bool degenerate_direction = false;
    bool direction_from_levels = true;
};

// Computes the dominant direction once and evaluates V_k for any order.
class VarianceRatioTest {
public:
    VarianceRatioTest(FunctionalPanel levels, bool demeaned);

    const FunctionalPanel& levels() const { return levels_; }
    bool demeaned() const { return demeaned_; }
    const Eigenpair& direction() const { return direction_; }

    VStatistic statistic(int order, int q, VStatOptions opts = {}) const;

private:
    FunctionalPanel levels_;
    bool demeaned_;
    Eigenpair direction_;
};

VStatistic v_statistic(const FunctionalPanel& levels, int order, bool demeaned, int q, VStatOptions opts = {});

// Null limit of each statistic: the bridge functional for the demeaned
// order-0 test, Brownian motion otherwise.
LimitKind limit_kind_for(int order, bool demeaned);

// Holds the two simulated null distributions a test run may need.
class CriticalValues {
public:
    CriticalValues(const LimitDistribution& motion, const LimitDistribution& bridge);
    explicit CriticalValues(const LimitDistribution& motion);

    const LimitDistribution& get(LimitKind kind) const;
    bool has(LimitKind kind) const;

private:
    const LimitDistribution* motion_;
    const LimitDistribution* bridge_;
};

struct TestReport {
    int order = 0;
    bool demeaned = false;
    double statistic = 0.0;
    double p_value = 1.0;
    Decision decision = Decision::Accept;
    double alpha = 0.025;
    int q = 0;
    long n_obs = 0;
    double eigen_gap = 0.0;
    bool degenerate_direction = false;
    bool direction_from_levels = true;
    LimitKind limit = LimitKind::BrownianMotion;
    double lower_quantile = 0.0;
    double upper_quantile = 0.0;
    std::size_t limit_reps = 0;
};

TestReport make_report(const VStatistic& stat, const LimitDistribution& dist, double alpha);

TestReport run_test(const VarianceRatioTest& test, int order, int q, double alpha, const CriticalValues& cv,
                    VStatOptions opts = {});

// Memory ranges the sequential procedure can settle on.
enum class Interval {
    AntiPersistent,  // (-1/2, 0)
    Zero,            // {0}
    ZeroOne,         // (0, 1)
    One,             // {1}
    OneTwo,          // (1, 2)
    Two,             // {2}
    AboveTwo,        // beyond 2
};

std::string_view to_string(Interval interval);
bool is_integer(Interval interval);

struct SequentialReport {
    int d_seq = 0;  // 1 when an integer order is accepted
    Interval interval = Interval::Zero;
    std::vector<TestReport> stages;
    bool reversed = false;
    int max_order = 1;
};

struct SequentialOptions {
    double alpha = 0.025;
    int q = 0;
    bool demeaned = false;
    int max_order = 1;  // 1 runs V0/V1, 2 adds V2
    bool reversed = false;  // start from V1 and step down to V0
    VStatOptions stat;
};

// Decision tree over stage outcomes. run_stage(k) must return the report of
// the order-k test; it is only called for the stages the tree visits.
SequentialReport sequential(const std::function<TestReport(int)>& run_stage, int max_order, bool reversed);

SequentialReport sequential(const FunctionalPanel& levels, const SequentialOptions& opts, const CriticalValues& cv);

}  // namespace intorder
