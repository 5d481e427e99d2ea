#pragma once

/**
 * Negative results: single-input distributions P(Y = y) = P(Y = 2 mu - y) = 1/2
 * on which h_bar(x) = y + w (w = delta or eps) and h*(x) = mu are both
 * best-in-class for the surrogate, while only h* is optimal for the squared
 * loss.
 *
 *   HuberNeg     Huber(delta),                   mu - y > delta
 *   SqEpsNeg     squared eps-insensitive(eps),   mu - y < eps
 *   EpsNegFar    eps-insensitive(eps),           mu - y > eps
 *   EpsNegNear   eps-insensitive(eps),           mu - y < eps
 */

#include "conditional.hpp"
#include "distributions.hpp"
#include "error.hpp"
#include "losses.hpp"

#include <cmath>
#include <string>

namespace regbound {

enum class NegativeTheorem { huber, sq_eps, eps_far, eps_near };

inline std::string to_string(NegativeTheorem t)
{
    switch (t) {
    case NegativeTheorem::huber:
        return "huber";
    case NegativeTheorem::sq_eps:
        return "sqeps";
    case NegativeTheorem::eps_far:
        return "eps-far";
    case NegativeTheorem::eps_near:
        return "eps-near";
    }
    return {};
}

inline NegativeTheorem parse_negative_theorem(const std::string& s)
{
    if (s == "huber")
        return NegativeTheorem::huber;
    if (s == "sqeps")
        return NegativeTheorem::sq_eps;
    if (s == "eps-far")
        return NegativeTheorem::eps_far;
    if (s == "eps-near")
        return NegativeTheorem::eps_near;
    throw parse_error("unknown theorem '" + s + "' (expected huber|sqeps|eps-far|eps-near)");
}

struct CounterexampleParams
{
    double bound;
    double y;
    double mu;
    double width; // delta for huber, eps otherwise
};

struct CounterexampleCase
{
    NegativeTheorem theorem;
    CounterexampleParams params;
    FiniteDistribution dist;
    Hypothesis h_bar;
    Hypothesis h_star;

    LossKind surrogate() const
    {
        switch (theorem) {
        case NegativeTheorem::huber:
            return LossKind::huber(params.width);
        case NegativeTheorem::sq_eps:
            return LossKind::sq_eps_insensitive(params.width);
        case NegativeTheorem::eps_far:
        case NegativeTheorem::eps_near:
            return LossKind::eps_insensitive(params.width);
        }
        return LossKind::squared();
    }
};

inline bool far_regime(NegativeTheorem t) { return t == NegativeTheorem::huber || t == NegativeTheorem::eps_far; }

inline CounterexampleCase build_counterexample(NegativeTheorem theorem, const CounterexampleParams& params)
{
    const auto [B, y, mu, w] = params;
    if (!(B > 0.0))
        throw invalid_params("B > 0 violated");
    if (!(w > 0.0))
        throw invalid_params((theorem == NegativeTheorem::huber ? std::string("delta") : std::string("eps")) +
                             " > 0 violated");
    if (!(-B <= y))
        throw invalid_params("-B <= y violated");
    if (!(y < mu))
        throw invalid_params("y < mu violated");
    if (!(mu <= B))
        throw invalid_params("mu <= B violated");
    const double mirror = 2.0 * mu - y;
    if (!(mirror <= B))
        throw invalid_params("2 mu - y <= B violated (mirror atom out of range)");
    const double gap = mu - y;
    const char* name = theorem == NegativeTheorem::huber ? "delta" : "eps";
    if (far_regime(theorem) && !(gap > w))
        throw invalid_params(std::string("mu - y > ") + name + " violated");
    if (!far_regime(theorem) && !(gap < w))
        throw invalid_params(std::string("mu - y < ") + name + " violated");
    const double h_bar_value = y + w;
    if (!(std::abs(h_bar_value) <= B))
        throw invalid_params("|y + " + std::string(name) + "| <= B violated (h_bar outside the class)");

    FiniteDistribution dist({{"x0", 1.0, Conditional({{y, 0.5}, {mirror, 0.5}}, B)}}, B);
    Hypothesis h_bar = Hypothesis::constant(dist, h_bar_value);
    Hypothesis h_star = Hypothesis::conditional_mean_of(dist);
    return {theorem, params, std::move(dist), std::move(h_bar), std::move(h_star)};
}

struct CounterexampleOutcome
{
    double surrogate_err_hbar = 0.0;
    double surrogate_err_hstar = 0.0;
    double best_surrogate_err = 0.0; // numeric best-in-class conditional error
    double sq_regret_hbar = 0.0;
    bool errors_equal = false;
    bool regret_positive = false;
    bool confirmed = false;
    std::string diagnostics;
};

// Equality tolerance for the two surrogate conditional errors.
inline constexpr double counterexample_equality_tol = 1e-12;

inline CounterexampleOutcome assert_counterexample(const CounterexampleCase& c)
{
    const auto& point = c.dist.points().front();
    const LossKind surrogate = c.surrogate();
    CounterexampleOutcome out;
    out.surrogate_err_hbar = conditional_error(surrogate, c.h_bar.at(point.id), point.cond);
    out.surrogate_err_hstar = conditional_error(surrogate, c.h_star.at(point.id), point.cond);
    out.best_surrogate_err = best_conditional_error(surrogate, point.cond, BestMethod::numeric);
    out.sq_regret_hbar = conditional_regret(LossKind::squared(), c.h_bar.at(point.id), point.cond);

    out.errors_equal = std::abs(out.surrogate_err_hbar - out.surrogate_err_hstar) <= counterexample_equality_tol;
    out.regret_positive = out.sq_regret_hbar > 0.0;
    out.confirmed = out.errors_equal && out.regret_positive;
    if (!out.errors_equal)
        out.diagnostics += "surrogate errors differ: " + std::to_string(out.surrogate_err_hbar) + " vs " +
                           std::to_string(out.surrogate_err_hstar) + "; ";
    if (!out.regret_positive)
        out.diagnostics += "squared regret of h_bar is not positive; ";
    return out;
}

} // namespace regbound
