#pragma once

// Deterministic random streams keyed by (seed, stream ids). A stream's output
// depends only on its key, never on which thread draws from it, so parallel
// Monte Carlo runs are reproducible for any worker count.

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace intorder {

std::uint64_t splitmix64(std::uint64_t x);

// Order-sensitive combination of a base seed and a list of identifiers.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> ids);

// FNV-1a, used to fold labels (table ids, cell keys) into seeds.
std::uint64_t hash_label(std::string_view label);

class RandomStream {
public:
    explicit RandomStream(std::uint64_t key) : engine_(splitmix64(key)) {}
    RandomStream(std::uint64_t base, std::initializer_list<std::uint64_t> ids) : RandomStream(derive_seed(base, ids)) {}

    double normal() { return normal_(engine_); }
    double uniform(double lo, double hi) { return boost::random::uniform_real_distribution<double>(lo, hi)(engine_); }
    int uniform_int(int lo, int hi) { return boost::random::uniform_int_distribution<int>(lo, hi)(engine_); }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    boost::random::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace intorder
