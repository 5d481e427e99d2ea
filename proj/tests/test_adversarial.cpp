#include "fixtures.hpp"

#include <regbound/adversarial.hpp>
#include <regbound/datagen.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace regbound;

TEST(SmoothnessTerm, SpecExamples)
{
    const LinearModel m{{1.0, -2.0}, 0.0};
    EXPECT_NEAR(smoothness_term(m, 0.01, PerturbationNorm::linf), 0.03, 1e-15);
    // Corner oracle: max <w, s> over the sign corners of the 0.01 cube.
    double corner = 0.0;
    for (double s0 : {-0.01, 0.01})
        for (double s1 : {-0.01, 0.01})
            corner = std::max(corner, s0 - 2.0 * s1);
    EXPECT_NEAR(smoothness_term(m, 0.01, PerturbationNorm::linf), corner, 1e-15);

    for (auto n : {PerturbationNorm::linf, PerturbationNorm::l2, PerturbationNorm::l1})
        EXPECT_EQ(smoothness_term(m, 0.0, n), 0.0);
    EXPECT_DOUBLE_EQ(smoothness_term(LinearModel{{3.0, 4.0}, 0.0}, 1.0, PerturbationNorm::l2), 5.0);
    EXPECT_DOUBLE_EQ(smoothness_term(LinearModel{{3.0, -4.0}, 0.0}, 1.0, PerturbationNorm::l1), 4.0);
    EXPECT_THROW(smoothness_term(m, -0.1, PerturbationNorm::linf), invalid_argument);
}

TEST(SmoothnessTerm, SphereSamplingLowerBound)
{
    const LinearModel m{{3.0, 4.0}, 0.0};
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    double best = 0.0;
    for (int i = 0; i < 20000; ++i) {
        const double a = g(rng), b = g(rng);
        const double r = std::hypot(a, b);
        best = std::max(best, (3.0 * a + 4.0 * b) / r);
    }
    EXPECT_LE(best, smoothness_term(m, 1.0, PerturbationNorm::l2) + 1e-12);
    EXPECT_GT(best, 5.0 - 1e-4);
}

TEST(AdvSquaredLoss, SpecExamples)
{
    const LinearModel m{{1.0}, 0.0};
    EXPECT_NEAR(adv_squared_loss(m, {0.5}, 0.0, 0.1, PerturbationNorm::linf), 0.36, 1e-15);
    EXPECT_DOUBLE_EQ(adv_squared_loss(m, {0.5}, 0.0, 0.0, PerturbationNorm::linf), 0.25);
    EXPECT_NEAR(adv_squared_loss(LinearModel{{2.0}, 0.0}, {0.5}, 1.0, 0.1, PerturbationNorm::linf), 0.04, 1e-15);
    EXPECT_THROW(adv_squared_loss(m, {0.5, 1.0}, 0.0, 0.1, PerturbationNorm::linf), dimension_mismatch);
}

TEST(SmoothAdvLoss, SpecExamples)
{
    AdvConfig cfg;
    cfg.gamma = 0.01;
    cfg.tau = 1.0;
    const LinearModel m{{1.0, -2.0}, 0.0};
    // prediction 0 at the origin, label -0.5 gives residual 0.5
    EXPECT_NEAR(smooth_adv_loss(cfg, m, {0.0, 0.0}, -0.5), 0.28, 1e-15);

    cfg.tau = 0.0;
    EXPECT_DOUBLE_EQ(smooth_adv_loss(cfg, m, {0.0, 0.0}, -0.5), 0.25);

    AdvConfig huber;
    huber.surrogate = LossKind::huber(0.2);
    huber.tau = 1.0;
    EXPECT_NEAR(smooth_adv_loss(huber, LinearModel{{1.0}, 0.0}, {0.1}, 0.0), 0.005, 1e-15);

    AdvConfig bad;
    bad.tau = -1.0;
    EXPECT_THROW(smooth_adv_loss(bad, m, {0.0, 0.0}, 0.0), invalid_argument);
}

TEST(Evaluate, SpecExamples)
{
    const auto syn = synth_linear_dataset({7, 5, 200, 4.0, NoiseSpec::two_point_outliers(0.2, 0.1, 10.0)});
    const LinearModel m{{0.3, -0.1, 0.2, 0.0, 0.5}, 0.1};
    const auto zero = evaluate(m, syn.data, 0.0, PerturbationNorm::linf);
    EXPECT_EQ(zero.clean_mse, zero.robust_mse);

    const auto perfect = evaluate(syn.truth, Dataset{{{{0.1, 0.2, 0.3, 0.4, 0.5}, syn.truth.predict({0.1, 0.2, 0.3, 0.4, 0.5})}}, 5},
                                  0.01, PerturbationNorm::linf);
    EXPECT_EQ(perfect.clean_mse, 0.0);
    const double s = 0.01 * dual_norm(syn.truth.weights, PerturbationNorm::linf);
    EXPECT_NEAR(perfect.robust_mse, s * s, 1e-15);

    // Row-by-row oracle: exact 1-D maximization of (t - y)^2 over the
    // prediction interval [h(x) - s, h(x) + s].
    const double sm = 0.01 * dual_norm(m.weights, PerturbationNorm::linf);
    double clean = 0.0, robust = 0.0;
    for (const auto& row : syn.data.rows) {
        const double h = m.predict(row.features);
        clean += (h - row.label) * (h - row.label);
        robust += std::max((h - sm - row.label) * (h - sm - row.label), (h + sm - row.label) * (h + sm - row.label));
    }
    const auto e = evaluate(m, syn.data, 0.01, PerturbationNorm::linf);
    EXPECT_NEAR(e.clean_mse, clean / 200.0, 1e-12);
    EXPECT_NEAR(e.robust_mse, robust / 200.0, 1e-12);
    EXPECT_GE(e.robust_mse, e.clean_mse);

    EXPECT_THROW(evaluate(LinearModel{{1.0}, 0.0}, syn.data, 0.01, PerturbationNorm::linf), dimension_mismatch);
}

TEST(Train, ExactLinearFit)
{
    Dataset data;
    data.d = 2;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 30; ++i) {
        const double a = u(rng), b = u(rng);
        data.rows.push_back({{a, b}, 0.7 * a - 0.4 * b + 0.25});
    }
    SolverConfig solver;
    const auto r = train(TrainObjective::smooth_adv(AdvConfig{}), data, solver);
    EXPECT_LE(r.objective, solver.tol);
    EXPECT_NEAR(r.model.weights[0], 0.7, 1e-4);
    EXPECT_NEAR(r.model.weights[1], -0.4, 1e-4);
    EXPECT_NEAR(r.model.bias, 0.25, 1e-4);
}

TEST(Train, OneDimensionalMatchesOracle)
{
    const auto data = fixtures::small_adv_problem(11, 1);
    AdvConfig cfg;
    cfg.gamma = 0.1;
    cfg.tau = 1.0;
    const auto obj = TrainObjective::smooth_adv(cfg);
    const auto r = train(obj, data, SolverConfig{});
    EXPECT_LE(r.objective, fixtures::oracle_objective_min(obj, data) + 1e-6);
    EXPECT_NEAR(r.objective, empirical_objective(obj, r.model, data), 1e-12);
}

TEST(Train, ObjectivesMatchOracleOnSmallProblems)
{
    for (std::uint64_t seed = 0; seed < 3; ++seed)
        for (std::size_t d : {1u, 2u}) {
            const auto data = fixtures::small_adv_problem(100 + seed, d);
            AdvConfig sq;
            sq.gamma = 0.05;
            sq.tau = 1.0;
            AdvConfig hub = sq;
            hub.surrogate = LossKind::huber(0.2);
            for (const auto& obj : {TrainObjective::smooth_adv(sq), TrainObjective::smooth_adv(hub),
                                    TrainObjective::adv_sq(0.05, PerturbationNorm::linf),
                                    TrainObjective::adv_sq(0.05, PerturbationNorm::l2)}) {
                const auto r = train(obj, data, SolverConfig{});
                EXPECT_LE(r.objective, fixtures::oracle_objective_min(obj, data) + 1e-6)
                    << obj.name() << " seed " << seed << " d " << d << " " << r.method;
            }
        }
}

TEST(Train, ShrinkageWithTauGamma)
{
    const auto syn = synth_linear_dataset({3, 4, 100, 2.0, NoiseSpec::two_point(0.2)});
    double prev = std::numeric_limits<double>::infinity();
    for (double tau : {0.0, 0.1, 1.0}) {
        AdvConfig cfg;
        cfg.gamma = 1.0;
        cfg.tau = tau;
        const auto r = train(TrainObjective::smooth_adv(cfg), syn.data, SolverConfig{});
        const double l1 = dual_norm(r.model.weights, PerturbationNorm::linf);
        EXPECT_LT(l1, prev) << "tau " << tau;
        prev = l1;
    }
}

TEST(Train, DeterministicAndSeedSensitiveOnlyInInit)
{
    const auto data = fixtures::small_adv_problem(4, 2);
    const auto obj = TrainObjective::adv_sq(0.05, PerturbationNorm::linf);
    const auto a = train(obj, data, SolverConfig{});
    const auto b = train(obj, data, SolverConfig{});
    EXPECT_EQ(a.model.weights, b.model.weights);
    EXPECT_EQ(a.model.bias, b.model.bias);
    EXPECT_EQ(a.objective, b.objective);
    EXPECT_EQ(a.iters, b.iters);
}

TEST(Train, RejectsBadInput)
{
    EXPECT_THROW(train(TrainObjective::adv_sq(0.1, PerturbationNorm::linf), Dataset{}, SolverConfig{}),
                 invalid_argument);
    SolverConfig s;
    s.step0 = 0.0;
    EXPECT_THROW(train(TrainObjective::adv_sq(0.1, PerturbationNorm::linf), fixtures::small_adv_problem(1, 1), s),
                 invalid_argument);
    Dataset ragged;
    ragged.d = 2;
    ragged.rows = {{{1.0, 2.0}, 0.0}, {{1.0}, 0.0}};
    EXPECT_THROW(train(TrainObjective::adv_sq(0.1, PerturbationNorm::linf), ragged, SolverConfig{}),
                 dimension_mismatch);
}

TEST(Train, NonConvergenceCarriesTrace)
{
    const auto syn = synth_linear_dataset({1, 20, 200, 4.0, NoiseSpec::uniform_sym(0.5)});
    SolverConfig s;
    s.max_iters = 5;
    s.tol = 1e-14;
    try {
        train(TrainObjective::adv_sq(0.1, PerturbationNorm::l2), syn.data, s);
        FAIL() << "expected non_convergence";
    } catch (const non_convergence& e) {
        EXPECT_FALSE(e.trace().empty());
    }
}

// Properties

TEST(AdversarialProperties, CornerBruteForce)
{
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (std::size_t d = 1; d <= 10; ++d)
        for (int i = 0; i < 20; ++i) {
            LinearModel m{std::vector<double>(d), u(rng)};
            std::vector<double> x(d);
            for (std::size_t j = 0; j < d; ++j) {
                m.weights[j] = 2.0 * u(rng);
                x[j] = u(rng);
            }
            const double y = u(rng);
            const double gamma = 0.2 * (u(rng) + 1.0);
            EXPECT_NEAR(adv_squared_loss(m, x, y, gamma, PerturbationNorm::linf),
                        fixtures::corner_brute_force(m, x, y, gamma), 1e-12);
        }
}

TEST(AdversarialProperties, ObjectivesConvexInParameters)
{
    const auto data = fixtures::small_adv_problem(8, 2);
    AdvConfig cfg;
    cfg.gamma = 0.3;
    cfg.tau = 0.7;
    cfg.surrogate = LossKind::huber(0.2);
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (const auto& obj : {TrainObjective::smooth_adv(cfg), TrainObjective::adv_sq(0.3, PerturbationNorm::l2),
                            TrainObjective::adv_sq(0.3, PerturbationNorm::l1)})
        for (int i = 0; i < 500; ++i) {
            const LinearModel a{{u(rng), u(rng)}, u(rng)};
            const LinearModel b{{u(rng), u(rng)}, u(rng)};
            const LinearModel mid{{0.5 * (a.weights[0] + b.weights[0]), 0.5 * (a.weights[1] + b.weights[1])},
                                  0.5 * (a.bias + b.bias)};
            const double fa = empirical_objective(obj, a, data), fb = empirical_objective(obj, b, data);
            EXPECT_LE(empirical_objective(obj, mid, data), 0.5 * (fa + fb) + 1e-12);
        }
}

// Upper-bound chain with the factor bound 4B' on |h(x') + h(x) - 2y|. The
// 3B' version is exercised by the acceptance binary.
TEST(AdversarialProperties, UpperBoundChainWithFourB)
{
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const auto data = fixtures::small_adv_problem(31, 3, 50);
    for (int i = 0; i < 2000; ++i) {
        const LinearModel m{{u(rng), u(rng), u(rng)}, u(rng)};
        const double gamma = 0.1 * (u(rng) + 1.0);
        const double s = smoothness_term(m, gamma, PerturbationNorm::linf);
        double bound = 0.0;
        for (const auto& row : data.rows)
            bound = std::max({bound, std::abs(m.predict(row.features)) + s, std::abs(row.label)});
        for (const auto& row : data.rows) {
            const double r = m.predict(row.features) - row.label;
            EXPECT_LE(adv_squared_loss(m, row.features, row.label, gamma, PerturbationNorm::linf),
                      r * r + 4.0 * bound * s + 1e-12);
        }
    }
}

TEST(AdversarialProperties, RobustAtLeastClean)
{
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto syn = synth_linear_dataset({seed, 3, 50, 2.0, NoiseSpec::uniform_sym(0.3)});
        for (auto n : {PerturbationNorm::linf, PerturbationNorm::l2, PerturbationNorm::l1}) {
            const auto e = evaluate(syn.truth, syn.data, 0.05, n);
            EXPECT_GE(e.robust_mse, e.clean_mse);
        }
    }
}

TEST(PerturbationNormTags, RoundTrip)
{
    for (auto n : {PerturbationNorm::linf, PerturbationNorm::l2, PerturbationNorm::l1})
        EXPECT_EQ(parse_perturbation_norm(to_string(n)), n);
    EXPECT_THROW(parse_perturbation_norm("l3"), parse_error);
}
