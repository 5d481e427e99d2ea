#pragma once

// Seeded fixtures shared by the CLI fuzz mode and the tests.

#include "conditional.hpp"
#include "distributions.hpp"

#include <cstdint>
#include <random>

namespace regbound {

struct FuzzLimits
{
    int max_inputs = 5;
    int max_atoms = 7;
    double min_bound = 0.5;
    double max_bound = 2.0;
};

/// Symmetric distribution with B drawn from [min_bound, max_bound].
inline FiniteDistribution fuzz_distribution(std::uint64_t seed, const FuzzLimits& limits = {})
{
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    const double B = std::uniform_real_distribution<double>(limits.min_bound, limits.max_bound)(rng);
    return random_symmetric_distribution(seed, {limits.max_inputs, limits.max_atoms, B});
}

/// Uniform member of the class: independent values in [-B, B] per input for
/// AllBounded, one shared value for ConstantBounded.
template <class Rng>
Hypothesis random_hypothesis(const FiniteDistribution& dist, const HypothesisClass& cls, Rng& rng)
{
    const double B = std::min(dist.bound(), cls.bound);
    std::uniform_real_distribution<double> u(-B, B);
    if (cls.kind == HypothesisClass::Kind::constant_bounded)
        return Hypothesis::constant(dist, u(rng));
    Hypothesis h;
    for (const auto& p : dist.points())
        h.values[p.id] = u(rng);
    return h;
}

} // namespace regbound
