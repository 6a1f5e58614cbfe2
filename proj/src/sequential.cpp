#include "intorder/errors.hpp"
#include "intorder/vtests.hpp"

namespace intorder {

std::string_view to_string(Interval interval)
{
    switch (interval) {
    case Interval::AntiPersistent:
        return "(-0.5,0)";
    case Interval::Zero:
        return "{0}";
    case Interval::ZeroOne:
        return "(0,1)";
    case Interval::One:
        return "{1}";
    case Interval::OneTwo:
        return "(1,2)";
    case Interval::Two:
        return "{2}";
    case Interval::AboveTwo:
        return ">2";
    }
    return "?";
}

bool is_integer(Interval interval)
{
    return interval == Interval::Zero || interval == Interval::One || interval == Interval::Two;
}

namespace {

// Settles the upper branch once V1 has rejected in the upper tail.
Interval above_one(SequentialReport& report, const std::function<TestReport(int)>& run_stage, int max_order)
{
    if (max_order < 2) {
        return Interval::OneTwo;
    }
    report.stages.push_back(run_stage(2));
    switch (report.stages.back().decision) {
    case Decision::Accept:
        return Interval::Two;
    case Decision::RejectLower:
        return Interval::OneTwo;
    case Decision::RejectUpper:
        return Interval::AboveTwo;
    }
    return Interval::AboveTwo;
}

}  // namespace

SequentialReport sequential(const std::function<TestReport(int)>& run_stage, int max_order, bool reversed)
{
    if (max_order != 1 && max_order != 2) {
        throw DomainError("sequential: max_order must be 1 or 2");
    }
    SequentialReport report;
    report.reversed = reversed;
    report.max_order = max_order;

    if (!reversed) {
        report.stages.push_back(run_stage(0));
        switch (report.stages.back().decision) {
        case Decision::RejectLower:
            report.interval = Interval::AntiPersistent;
            break;
        case Decision::Accept:
            report.interval = Interval::Zero;
            break;
        case Decision::RejectUpper:
            report.stages.push_back(run_stage(1));
            switch (report.stages.back().decision) {
            case Decision::RejectLower:
                report.interval = Interval::ZeroOne;
                break;
            case Decision::Accept:
                report.interval = Interval::One;
                break;
            case Decision::RejectUpper:
                report.interval = above_one(report, run_stage, max_order);
                break;
            }
            break;
        }
    } else {
        report.stages.push_back(run_stage(1));
        switch (report.stages.back().decision) {
        case Decision::RejectUpper:
            report.interval = above_one(report, run_stage, max_order);
            break;
        case Decision::Accept:
            report.interval = Interval::One;
            break;
        case Decision::RejectLower:
            report.stages.push_back(run_stage(0));
            switch (report.stages.back().decision) {
            case Decision::RejectUpper:
                report.interval = Interval::ZeroOne;
                break;
            case Decision::Accept:
                report.interval = Interval::Zero;
                break;
            case Decision::RejectLower:
                report.interval = Interval::AntiPersistent;
                break;
            }
            break;
        }
    }
    report.d_seq = is_integer(report.interval) ? 1 : 0;
    return report;
}

SequentialReport sequential(const FunctionalPanel& levels, const SequentialOptions& opts, const CriticalValues& cv)
{
    const VarianceRatioTest test(levels, opts.demeaned);
    return sequential([&](int order) { return run_test(test, order, opts.q, opts.alpha, cv, opts.stat); },
                      opts.max_order, opts.reversed);
}

}  // namespace intorder
