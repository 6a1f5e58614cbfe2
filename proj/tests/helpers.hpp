#pragma once

#include "intorder/funcspace.hpp"
#include "intorder/rng.hpp"

#include <catch_amalgamated.hpp>

#include <vector>

namespace testing {

inline intorder::FunctionalPanel random_panel(std::uint64_t seed, Eigen::Index rows, std::size_t grid, double scale = 1.0)
{
    intorder::RandomStream rng(seed, {0x7465});
    Eigen::MatrixXd v(rows, static_cast<Eigen::Index>(grid));
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
        for (Eigen::Index j = 0; j < v.cols(); ++j) {
            v(i, j) = scale * rng.normal();
        }
    }
    return intorder::FunctionalPanel(intorder::Grid(grid), std::move(v));
}

inline intorder::FunctionalPanel scalar_panel(std::vector<double> xs)
{
    Eigen::MatrixXd v(static_cast<Eigen::Index>(xs.size()), 1);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        v(static_cast<Eigen::Index>(i), 0) = xs[i];
    }
    return intorder::FunctionalPanel(intorder::Grid::scalar(), std::move(v));
}

inline std::vector<double> column(const intorder::FunctionalPanel& p, Eigen::Index j = 0)
{
    std::vector<double> out(static_cast<std::size_t>(p.n_rows()));
    for (Eigen::Index i = 0; i < p.n_rows(); ++i) {
        out[static_cast<std::size_t>(i)] = p.values()(i, j);
    }
    return out;
}

}  // namespace testing

#include "intorder/limit_dist.hpp"
#include "intorder/vtests.hpp"

namespace testing {

// Moderate-size null distributions shared through the on-disk cache.
inline const intorder::CriticalValues& critical_values()
{
    using namespace intorder;
    static const LimitDistribution motion =
        load_or_simulate(default_cache_dir(), LimitKind::BrownianMotion, 50000, 2000, kDefaultLimitSeed);
    static const LimitDistribution bridge =
        load_or_simulate(default_cache_dir(), LimitKind::BrownianBridge, 50000, 2000, kDefaultLimitSeed);
    static const CriticalValues cv(motion, bridge);
    return cv;
}

}  // namespace testing
