#include <regbound/distributions.hpp>
#include <regbound/io.hpp>

#include <gtest/gtest.h>

using namespace regbound;

namespace {

FiniteDistribution single(std::vector<Atom> atoms, double B = 1.0)
{
    return FiniteDistribution({{"x0", 1.0, Conditional(std::move(atoms), B)}}, B);
}

} // namespace

TEST(ConditionalMean, SpecExamples)
{
    EXPECT_DOUBLE_EQ(conditional_mean(Conditional({{-1.0, 0.5}, {1.0, 0.5}}, 1.0)), 0.0);
    EXPECT_DOUBLE_EQ(conditional_mean(Conditional({{0.0, 0.25}, {2.0, 0.75}}, 2.0)), 1.5);
    EXPECT_DOUBLE_EQ(conditional_mean(Conditional({{-0.8, 0.5}, {0.8, 0.5}}, 1.0)), 0.0);
}

TEST(ConditionalCtor, EnforcesInvariants)
{
    EXPECT_THROW(Conditional({}, 1.0), invalid_argument);
    EXPECT_THROW(Conditional({{0.0, 0.5}, {0.5, 0.6}}, 1.0), invalid_argument);
    EXPECT_THROW(Conditional({{0.0, 0.0}, {0.5, 1.0}}, 1.0), invalid_argument);
    EXPECT_THROW(Conditional({{1.5, 1.0}}, 1.0), invalid_argument);
    EXPECT_THROW(Conditional({{0.5, 0.5}, {0.5, 0.5}}, 1.0), invalid_argument);
    const Conditional c({{0.5, 0.5}, {-0.5, 0.5}}, 1.0);
    EXPECT_LT(c.atoms()[0].label, c.atoms()[1].label);
}

TEST(FiniteDistributionCtor, EnforcesInvariants)
{
    const Conditional c({{0.0, 1.0}}, 1.0);
    EXPECT_THROW(FiniteDistribution({{"a", 0.5, c}, {"b", 0.6, c}}, 1.0), invalid_argument);
    EXPECT_THROW(FiniteDistribution({{"a", 0.5, c}, {"a", 0.5, c}}, 1.0), invalid_argument);
    EXPECT_THROW(FiniteDistribution({{"a", 1.0, Conditional({{0.0, 1.0}}, 2.0)}}, 1.0), invalid_argument);
    EXPECT_THROW(FiniteDistribution({}, 1.0), invalid_argument);
}

TEST(CheckSymmetric, SpecExamples)
{
    auto r1 = check_symmetric(Conditional({{-1.0, 0.5}, {1.0, 0.5}}, 1.0));
    ASSERT_TRUE(r1);
    EXPECT_DOUBLE_EQ(r1.center, 0.0);

    auto r2 = check_symmetric(Conditional({{0.0, 1.0 / 3}, {1.0, 1.0 / 3}, {2.0, 1.0 / 3}}, 2.0));
    ASSERT_TRUE(r2);
    EXPECT_NEAR(r2.center, 1.0, 1e-12);

    const Conditional bad({{0.0, 0.4}, {1.0, 0.6}}, 1.0);
    EXPECT_FALSE(check_symmetric(bad));
    EXPECT_THROW(require_symmetric(bad), not_symmetric);
    try {
        require_symmetric(bad);
    } catch (const not_symmetric& e) {
        EXPECT_TRUE(e.label() == 0.0 || e.label() == 1.0);
    }
}

TEST(Pmin, SpecExamples)
{
    const auto two = single({{-1.0, 0.5}, {1.0, 0.5}});
    EXPECT_DOUBLE_EQ(p_min(two, PminMode::huber_window(1.0)), 0.5);
    EXPECT_DOUBLE_EQ(p_min(two, PminMode::eps_tail(1.5)), 0.0);
    const auto three = single({{-1.0, 0.25}, {0.0, 0.5}, {1.0, 0.25}});
    EXPECT_DOUBLE_EQ(p_min(three, PminMode::huber_window(0.5)), 0.5);
}

TEST(Pmin, MinimumOverInputs)
{
    FiniteDistribution d({{"a", 0.5, Conditional({{-1.0, 0.5}, {1.0, 0.5}}, 1.0)},
                          {"b", 0.5, Conditional({{-0.2, 0.5}, {0.2, 0.5}}, 1.0)}},
                         1.0);
    EXPECT_DOUBLE_EQ(p_min(d, PminMode::eps_tail(0.5)), 0.0);
    EXPECT_DOUBLE_EQ(p_min(d, PminMode::eps_tail(0.1)), 0.5);
}

TEST(Generator, ShapeAndDeterminism)
{
    const auto d = random_symmetric_distribution(1, {1, 2, 1.0});
    ASSERT_EQ(d.points().size(), 1u);
    EXPECT_GE(d.points()[0].cond.atoms().size(), 1u);
    EXPECT_LE(d.points()[0].cond.atoms().size(), 2u);

    const auto a = random_symmetric_distribution(5, {3, 7, 1.5});
    const auto b = random_symmetric_distribution(5, {3, 7, 1.5});
    EXPECT_EQ(distribution_to_json(a), distribution_to_json(b));
}

TEST(Generator, SeedTwoSymmetric)
{
    const auto d = random_symmetric_distribution(2, {3, 7, 2.0});
    for (const auto& p : d.points())
        EXPECT_TRUE(check_symmetric(p.cond));
}

// Properties

TEST(GeneratorProperties, InvariantsOverManySeeds)
{
    for (std::uint64_t seed = 0; seed < 10000; ++seed) {
        const double B = 0.5 + static_cast<double>(seed % 7) * 0.25;
        const auto d = random_symmetric_distribution(seed, {5, 7, B});
        double wsum = 0.0;
        for (const auto& p : d.points()) {
            wsum += p.weight;
            const auto sym = check_symmetric(p.cond);
            ASSERT_TRUE(sym) << "seed " << seed;
            ASSERT_NEAR(sym.center, conditional_mean(p.cond), 1e-12);
            double msum = 0.0;
            for (const Atom& a : p.cond.atoms()) {
                ASSERT_LE(std::abs(a.label), B);
                ASSERT_GT(a.mass, 0.0);
                msum += a.mass;
            }
            ASSERT_NEAR(msum, 1.0, 1e-12);
        }
        ASSERT_NEAR(wsum, 1.0, 1e-12);
    }
}

TEST(PminProperties, Monotone)
{
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        const auto d = random_symmetric_distribution(seed, {4, 7, 1.0});
        double prev_tail = 1.0, prev_window = 0.0;
        for (double w = 0.05; w <= 2.0; w += 0.05) {
            const double tail = p_min(d, PminMode::eps_tail(w));
            const double window = p_min(d, PminMode::huber_window(w));
            EXPECT_LE(tail, prev_tail + 1e-15);
            EXPECT_GE(window, prev_window - 1e-15);
            prev_tail = tail;
            prev_window = window;
        }
    }
}

TEST(DistributionJson, LoadsSpecExample)
{
    const auto j = json::parse(R"({"B": 1.0, "points": [{"id": "x0", "weight": 1.0, "cond": [[-1.0, 0.5], [1.0, 0.5]]}]})");
    const auto d = distribution_from_json(j);
    EXPECT_EQ(d.points().size(), 1u);
    EXPECT_EQ(distribution_to_json(d), j);
}

TEST(DistributionJson, ReportsFirstViolationWithPath)
{
    auto message = [](const char* text) {
        try {
            distribution_from_json(json::parse(text));
        } catch (const parse_error& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    EXPECT_NE(message(R"({"points": []})").find("$.B"), std::string::npos);
    EXPECT_NE(message(R"({"B": 1, "points": [{"id": "a", "weight": 1, "cond": [[2.0, 1.0]]}]})").find("$.points[0].cond[0][0]"),
              std::string::npos);
    EXPECT_NE(message(R"({"B": 1, "points": [{"id": "a", "weight": 1, "cond": [[0.0, 0.5]]}]})").find("$.points[0].cond"),
              std::string::npos);
    EXPECT_NE(message(R"({"B": 1, "points": [{"id": "a", "weight": 0.5, "cond": [[0.0, 1]]},
                                             {"id": "a", "weight": 0.5, "cond": [[0.0, 1]]}]})")
                  .find("$.points[1].id"),
              std::string::npos);
    EXPECT_NE(message(R"({"B": 1, "points": [{"id": "a", "weight": 0.4, "cond": [[0.0, 1]]}]})").find("$.points"),
              std::string::npos);
}
