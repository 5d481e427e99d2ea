#pragma once

/**
 * Conditional errors, best-in-class errors, regrets and minimizability gaps
 * over finite distributions.
 *
 * Best-in-class conditional errors come in two flavours: the closed form
 * C_L(mu(x), x), valid for symmetric conditionals, and an independent numeric
 * route that minimizes the conditional error over [-B, B].
 */

#include "distributions.hpp"
#include "error.hpp"
#include "losses.hpp"
#include "minimize.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace regbound {

struct Hypothesis
{
    std::map<std::string, double> values;

    double at(const std::string& input_id) const
    {
        auto it = values.find(input_id);
        if (it == values.end())
            throw missing_prediction(input_id);
        return it->second;
    }

    // h(x) = c on every input of dist.
    static Hypothesis constant(const FiniteDistribution& dist, double c)
    {
        Hypothesis h;
        for (const auto& p : dist.points())
            h.values[p.id] = c;
        return h;
    }

    // h(x) = mu(x).
    static Hypothesis conditional_mean_of(const FiniteDistribution& dist)
    {
        Hypothesis h;
        for (const auto& p : dist.points())
            h.values[p.id] = conditional_mean(p.cond);
        return h;
    }
};

struct HypothesisClass
{
    enum class Kind { all_bounded, constant_bounded };

    Kind kind;
    double bound;
    int grid_size; // only used by enumerating fuzzers and the Rademacher mesh

    static HypothesisClass all_bounded(double bound, int grid_size = 101) { return make(Kind::all_bounded, bound, grid_size); }

    static HypothesisClass constant_bounded(double bound, int grid_size = 101)
    {
        return make(Kind::constant_bounded, bound, grid_size);
    }

private:
    static HypothesisClass make(Kind kind, double bound, int grid_size)
    {
        if (!(bound > 0.0))
            throw invalid_argument("hypothesis class bound must be positive");
        if (grid_size < 2)
            throw invalid_argument("hypothesis class grid_size must be >= 2");
        return {kind, bound, grid_size};
    }
};

enum class BestMethod { closed_form, numeric };

namespace detail {

// Maps float cancellation noise to zero; anything clearly negative is a bug.
inline double clamp_rounding(double value, double scale, const char* what)
{
    if (value >= 0.0)
        return value;
    if (value > -1e-12 * std::max(1.0, std::abs(scale)))
        return 0.0;
    throw internal_consistency_error(std::string(what) + " is negative: " + std::to_string(value));
}

inline void check_prediction_bound(double prediction, double bound)
{
    if (!(std::abs(prediction) <= bound * (1.0 + 1e-12)))
        throw invalid_argument("prediction " + std::to_string(prediction) + " outside [-B, B] with B = " +
                               std::to_string(bound));
}

} // namespace detail

inline double conditional_error(const LossKind& kind, double prediction, const Conditional& cond)
{
    detail::check_prediction_bound(prediction, cond.bound());
    double err = 0.0;
    for (const Atom& a : cond.atoms())
        err += a.mass * loss_value(kind, prediction, a.label);
    return err;
}

/// Argmin and value of prediction -> conditional_error over [-B, B].
inline Minimum1d minimize_conditional_error(const LossKind& kind, const Conditional& cond)
{
    const double B = cond.bound();
    return minimize_convex_1d([&](double v) { return conditional_error(kind, v, cond); }, -B, B);
}

inline double best_conditional_error(const LossKind& kind, const Conditional& cond, BestMethod method)
{
    if (method == BestMethod::closed_form)
        return conditional_error(kind, require_symmetric(cond), cond);
    return minimize_conditional_error(kind, cond).value;
}

inline double conditional_regret(const LossKind& kind, double prediction, const Conditional& cond)
{
    const double err = conditional_error(kind, prediction, cond);
    const double best = best_conditional_error(kind, cond, BestMethod::closed_form);
    return detail::clamp_rounding(err - best, err, "conditional regret");
}

// The conditional eps-regret: regret if it exceeds eps, else 0.
inline double clipped_regret(double regret, double eps)
{
    if (regret < 0.0)
        throw invalid_argument("clipped_regret requires regret >= 0");
    if (eps < 0.0)
        throw invalid_argument("clipped_regret requires eps >= 0");
    return regret > eps ? regret : 0.0;
}

inline double generalization_error(const LossKind& kind, const Hypothesis& h, const FiniteDistribution& dist)
{
    double err = 0.0;
    for (const auto& p : dist.points())
        err += p.weight * conditional_error(kind, h.at(p.id), p.cond);
    return err;
}

// E_x[C*_L(H, x)] with the closed-form per-input optimum.
inline double expected_best_conditional_error(const LossKind& kind, const FiniteDistribution& dist)
{
    double total = 0.0;
    for (const auto& p : dist.points())
        total += p.weight * best_conditional_error(kind, p.cond, BestMethod::closed_form);
    return total;
}

inline double best_in_class_error(const LossKind& kind, const HypothesisClass& cls, const FiniteDistribution& dist)
{
    const double B = dist.bound();
    if (cls.kind == HypothesisClass::Kind::all_bounded) {
        double total = 0.0;
        for (const auto& p : dist.points())
            total += p.weight * minimize_conditional_error(kind, p.cond).value;
        return total;
    }
    auto objective = [&](double c) {
        double total = 0.0;
        for (const auto& p : dist.points())
            total += p.weight * conditional_error(kind, c, p.cond);
        return total;
    };
    return minimize_convex_1d(objective, -B, B).value;
}

inline double minimizability_gap(const LossKind& kind, const HypothesisClass& cls, const FiniteDistribution& dist)
{
    const double best = best_in_class_error(kind, cls, dist);
    const double gap = best - expected_best_conditional_error(kind, dist);
    return detail::clamp_rounding(gap, best, "minimizability gap");
}

} // namespace regbound
