#include "intorder/vtests.hpp"

#include "intorder/errors.hpp"
#include "intorder/fracdiff.hpp"
#include "intorder/lrcov.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace intorder {

namespace {

Eigenpair level_direction(const FunctionalPanel& panel, bool demeaned)
{
    return dominant_eigenpair(demeaned ? ksum_demeaned(panel) : ksum(panel));
}

}  // namespace

VarianceRatioTest::VarianceRatioTest(FunctionalPanel levels, bool demeaned)
    : levels_(std::move(levels)), demeaned_(demeaned), direction_(level_direction(levels_, demeaned_))
{
}

VStatistic VarianceRatioTest::statistic(int order, int q, VStatOptions opts) const
{
    if (order < 0) {
        throw DomainError("test order must be nonnegative");
    }
    const FunctionalPanel diffed = difference(levels_, order);

    std::optional<Eigenpair> own;
    if (opts.reestimate_direction && order > 0) {
        own = level_direction(diffed, demeaned_);
    }
    const Eigenpair& dir = own ? *own : direction_;

    const Eigen::VectorXd weighted = dir.eigenvector.values().cwiseProduct(levels_.grid().weights());
    Eigen::VectorXd proj = diffed.values() * weighted;
    if (demeaned_ && order == 0) {
        proj.array() -= proj.mean();
    }
    const std::span<const double> z(proj.data(), static_cast<std::size_t>(proj.size()));

    VStatistic out;
    out.order = order;
    out.demeaned = demeaned_;
    out.n_obs = static_cast<long>(proj.size());
    out.q = q;
    out.eigen_gap = dir.relative_gap;
    out.degenerate_direction = dir.degenerate;
    out.direction_from_levels = !own.has_value();
    out.numerator = ksum_scalar(z);
    out.denominator = lrcov_scalar(z, q);

    const double energy = diffed.values().squaredNorm() / static_cast<double>(diffed.n_rows());
    if (!(out.denominator > 1e-300) || out.denominator <= 1e-26 * energy) {
        throw DegenerateVarianceError("long-run variance along the dominant direction is zero (order " +
                                      std::to_string(order) + "); the statistic is undefined");
    }
    const double n = static_cast<double>(out.n_obs);
    out.statistic = out.numerator / (n * n) / out.denominator;
    if (!std::isfinite(out.statistic)) {
        throw NumericError("variance-ratio statistic is not finite");
    }
    return out;
}

VStatistic v_statistic(const FunctionalPanel& levels, int order, bool demeaned, int q, VStatOptions opts)
{
    return VarianceRatioTest(levels, demeaned).statistic(order, q, opts);
}

LimitKind limit_kind_for(int order, bool demeaned)
{
    return demeaned && order == 0 ? LimitKind::BrownianBridge : LimitKind::BrownianMotion;
}

CriticalValues::CriticalValues(const LimitDistribution& motion, const LimitDistribution& bridge)
    : motion_(&motion), bridge_(&bridge)
{
    if (motion.kind() != LimitKind::BrownianMotion || bridge.kind() != LimitKind::BrownianBridge) {
        throw ContractViolation("CriticalValues: distributions passed in the wrong slots");
    }
}

CriticalValues::CriticalValues(const LimitDistribution& motion) : motion_(&motion), bridge_(nullptr)
{
    if (motion.kind() != LimitKind::BrownianMotion) {
        throw ContractViolation("CriticalValues: expected the Brownian-motion distribution");
    }
}

const LimitDistribution& CriticalValues::get(LimitKind kind) const
{
    const LimitDistribution* d = kind == LimitKind::BrownianMotion ? motion_ : bridge_;
    if (d == nullptr) {
        throw ContractViolation("no critical values loaded for the " + std::string(to_string(kind)) + " limit");
    }
    return *d;
}

bool CriticalValues::has(LimitKind kind) const
{
    return (kind == LimitKind::BrownianMotion ? motion_ : bridge_) != nullptr;
}

TestReport make_report(const VStatistic& stat, const LimitDistribution& dist, double alpha)
{
    TestReport r;
    r.order = stat.order;
    r.demeaned = stat.demeaned;
    r.statistic = stat.statistic;
    r.decision = decide(stat.statistic, dist, alpha);
    r.p_value = p_value(stat.statistic, dist);
    r.alpha = alpha;
    r.q = stat.q;
    r.n_obs = stat.n_obs;
    r.eigen_gap = stat.eigen_gap;
    r.degenerate_direction = stat.degenerate_direction;
    r.direction_from_levels = stat.direction_from_levels;
    r.limit = dist.kind();
    r.lower_quantile = dist.quantile(alpha);
    r.upper_quantile = dist.quantile(1.0 - alpha);
    r.limit_reps = dist.n_reps();
    return r;
}

TestReport run_test(const VarianceRatioTest& test, int order, int q, double alpha, const CriticalValues& cv,
                    VStatOptions opts)
{
    const VStatistic stat = test.statistic(order, q, opts);
    return make_report(stat, cv.get(limit_kind_for(order, test.demeaned())), alpha);
}

}  // namespace intorder
