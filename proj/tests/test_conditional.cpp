#include <regbound/conditional.hpp>
#include <regbound/fuzz.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace regbound;

namespace {

const Conditional pm1({{-1.0, 0.5}, {1.0, 0.5}}, 1.0);

// Two inputs, mu = -0.5 and 0.5, atoms mu +/- 0.5, equal weights.
FiniteDistribution two_input_constant_case()
{
    return FiniteDistribution({{"x0", 0.5, Conditional({{-1.0, 0.5}, {0.0, 0.5}}, 1.0)},
                               {"x1", 0.5, Conditional({{0.0, 0.5}, {1.0, 0.5}}, 1.0)}},
                              1.0);
}

std::vector<LossKind> five_kinds()
{
    return {LossKind::squared(), LossKind::lp(1.5), LossKind::huber(0.3), LossKind::eps_insensitive(0.2),
            LossKind::sq_eps_insensitive(0.25)};
}

} // namespace

TEST(ConditionalError, SpecExamples)
{
    EXPECT_DOUBLE_EQ(conditional_error(LossKind::squared(), 0.0, pm1), 1.0);
    EXPECT_DOUBLE_EQ(conditional_error(LossKind::lp(1.0), 0.0, pm1), 1.0);
    EXPECT_DOUBLE_EQ(conditional_error(LossKind::huber(0.5), 0.0, pm1), 0.375);
    EXPECT_THROW(conditional_error(LossKind::squared(), 1.5, pm1), invalid_argument);
}

TEST(BestConditionalError, SpecExamples)
{
    EXPECT_DOUBLE_EQ(best_conditional_error(LossKind::squared(), pm1, BestMethod::closed_form), 1.0);
    EXPECT_DOUBLE_EQ(best_conditional_error(LossKind::sq_eps_insensitive(2.0), pm1, BestMethod::closed_form), 0.0);
    EXPECT_NEAR(best_conditional_error(LossKind::huber(0.5), pm1, BestMethod::numeric), 0.375, 1e-8);
    EXPECT_THROW(best_conditional_error(LossKind::squared(), Conditional({{0.0, 0.4}, {1.0, 0.6}}, 1.0),
                                        BestMethod::closed_form),
                 not_symmetric);
}

TEST(ConditionalRegret, SpecExamples)
{
    EXPECT_DOUBLE_EQ(conditional_regret(LossKind::squared(), 0.5, pm1), 0.25);
    // (1.5^4 + 0.5^4) / 2 - 1
    EXPECT_DOUBLE_EQ(conditional_regret(LossKind::lp(4.0), 0.5, pm1), 1.5625);
    for (const LossKind& k : five_kinds())
        EXPECT_EQ(conditional_regret(k, 0.0, pm1), 0.0);
}

TEST(ClippedRegret, SpecExamples)
{
    EXPECT_DOUBLE_EQ(clipped_regret(0.3, 0.0), 0.3);
    EXPECT_DOUBLE_EQ(clipped_regret(0.3, 0.3), 0.0);
    EXPECT_DOUBLE_EQ(clipped_regret(0.5, 0.2), 0.5);
    EXPECT_THROW(clipped_regret(-0.1, 0.0), invalid_argument);
}

TEST(GeneralizationError, Examples)
{
    const auto d = two_input_constant_case();
    Hypothesis h;
    h.values = {{"x0", 0.0}, {"x1", 0.5}};
    // Hand sums: x0 at 0 -> (1 + 0)/2, x1 at 0.5 -> (0.25 + 0.25)/2.
    EXPECT_DOUBLE_EQ(generalization_error(LossKind::squared(), h, d), 0.5 * 0.5 + 0.5 * 0.25);

    const auto mu = Hypothesis::conditional_mean_of(d);
    EXPECT_DOUBLE_EQ(generalization_error(LossKind::squared(), mu, d),
                     expected_best_conditional_error(LossKind::squared(), d));

    FiniteDistribution one({{"x0", 1.0, pm1}}, 1.0);
    EXPECT_DOUBLE_EQ(generalization_error(LossKind::huber(0.5), Hypothesis::constant(one, 0.2), one),
                     conditional_error(LossKind::huber(0.5), 0.2, pm1));

    Hypothesis partial;
    partial.values = {{"x0", 0.0}};
    EXPECT_THROW(generalization_error(LossKind::squared(), partial, d), missing_prediction);
}

TEST(BestInClass, SpecExamples)
{
    const auto d = two_input_constant_case();
    EXPECT_NEAR(best_in_class_error(LossKind::squared(), HypothesisClass::all_bounded(1.0), d), 0.25, 1e-10);
    EXPECT_NEAR(best_in_class_error(LossKind::squared(), HypothesisClass::constant_bounded(1.0), d), 0.5, 1e-10);
    FiniteDistribution one({{"x0", 1.0, pm1}}, 1.0);
    EXPECT_NEAR(best_in_class_error(LossKind::huber(0.5), HypothesisClass::all_bounded(1.0), one),
                best_conditional_error(LossKind::huber(0.5), pm1, BestMethod::numeric), 1e-12);
}

TEST(MinimizabilityGap, SpecExamples)
{
    const auto d = two_input_constant_case();
    EXPECT_NEAR(minimizability_gap(LossKind::squared(), HypothesisClass::constant_bounded(1.0), d), 0.25, 1e-9);
    EXPECT_LE(minimizability_gap(LossKind::huber(0.5), HypothesisClass::all_bounded(1.0), d), 1e-9);
    FiniteDistribution one({{"x0", 1.0, pm1}}, 1.0);
    EXPECT_LE(minimizability_gap(LossKind::squared(), HypothesisClass::constant_bounded(1.0), one), 1e-9);
}

TEST(Clamp, RoundingVersusBug)
{
    EXPECT_EQ(detail::clamp_rounding(-1e-14, 1.0, "x"), 0.0);
    EXPECT_EQ(detail::clamp_rounding(0.3, 1.0, "x"), 0.3);
    EXPECT_THROW(detail::clamp_rounding(-1e-6, 1.0, "x"), internal_consistency_error);
}

TEST(HypothesisClassCtor, Validates)
{
    EXPECT_THROW(HypothesisClass::all_bounded(0.0), invalid_argument);
    EXPECT_THROW(HypothesisClass::constant_bounded(1.0, 1), invalid_argument);
}

// Properties

TEST(ConditionalProperties, ClosedFormMatchesNumeric)
{
    std::mt19937_64 rng(42);
    for (int i = 0; i < 500; ++i) {
        const auto d = random_symmetric_distribution(1000 + i, {1, 7, 0.5 + 1.5 * (i % 10) / 9.0});
        const Conditional& c = d.points()[0].cond;
        for (const LossKind& k : five_kinds())
            EXPECT_NEAR(best_conditional_error(k, c, BestMethod::closed_form),
                        best_conditional_error(k, c, BestMethod::numeric), 1e-8);
    }
}

TEST(ConditionalProperties, SquaredRegretIsSquaredDistanceToMean)
{
    std::mt19937_64 rng(7);
    for (int i = 0; i < 2000; ++i) {
        const auto d = random_symmetric_distribution(i, {1, 7, 1.0});
        const Conditional& c = d.points()[0].cond;
        const double mu = conditional_mean(c);
        const double v = std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
        EXPECT_NEAR(conditional_regret(LossKind::squared(), v, c), (v - mu) * (v - mu), 1e-12);
    }
}

TEST(ConditionalProperties, GapsNonnegativeAndRealizableZero)
{
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto d = fuzz_distribution(seed);
        const double B = d.bound();
        for (const LossKind& k : five_kinds()) {
            const double all = minimizability_gap(k, HypothesisClass::all_bounded(B), d);
            const double cst = minimizability_gap(k, HypothesisClass::constant_bounded(B), d);
            EXPECT_GE(all, 0.0);
            EXPECT_LE(all, 1e-9);
            EXPECT_GE(cst, 0.0);
            EXPECT_GE(best_in_class_error(k, HypothesisClass::constant_bounded(B), d),
                      best_in_class_error(k, HypothesisClass::all_bounded(B), d) - 1e-12);
        }
    }
}
