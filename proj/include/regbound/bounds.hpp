#pragma once

/**
 * H-consistency bounds of the squared loss in terms of surrogate losses.
 *
 * For a finite distribution and a hypothesis h, the checked inequality is
 *
 *   E_l2(h) - E*_l2(H) + M_l2(H)  <=  Gamma( E_L(h) - E*_L(H) + M_L(H) )
 *
 * with Gamma one of:
 *   Huber(delta)        max{2B/delta, 2} / p_min(delta) * t
 *   l_p, 1 < p <= 2     2 / ((8B)^(p-2) p (p-1)) * t
 *   l_p, p >= 2         t^(2/p)
 *   l_1                 sup_{x,y} {|h(x) - y| + |mu(x) - y|} * t   (4B t coarse form)
 *   squared eps-ins.    t / (2 p_min(eps))
 *
 * The epsilon-insensitive loss admits no such Gamma and is rejected.
 */

#include "conditional.hpp"
#include "distributions.hpp"
#include "error.hpp"
#include "losses.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace regbound {

// A report holds when slack >= -slack_tol.
inline constexpr double slack_tol = 1e-8;

struct BoundSpec
{
    enum class Theorem { huber, lp_low, lp_high, l1, sq_eps };

    Theorem theorem;
    double bound = 1.0;
    double param = 0.0;                // delta (huber), p (lp_low / lp_high), eps (sq_eps); unused for l1
    double p_min = 0.0;                // huber and sq_eps only
    std::optional<double> sup_factor;  // l1 only; 4B when unset

    void validate() const
    {
        if (!(bound > 0.0))
            throw invalid_spec("bound B must be positive");
        switch (theorem) {
        case Theorem::huber:
        case Theorem::sq_eps:
            if (!(param > 0.0))
                throw invalid_spec("delta / eps must be positive");
            if (!(p_min > 0.0 && p_min <= 1.0))
                throw invalid_spec("p_min must lie in (0, 1]");
            break;
        case Theorem::lp_low:
            if (!(param > 1.0 && param <= 2.0))
                throw invalid_spec("lp_low requires 1 < p <= 2");
            break;
        case Theorem::lp_high:
            if (!(param >= 2.0))
                throw invalid_spec("lp_high requires p >= 2");
            break;
        case Theorem::l1:
            if (sup_factor && !(*sup_factor >= 0.0))
                throw invalid_spec("l1 sup factor must be nonnegative");
            break;
        }
    }
};

inline std::string gamma_id(const BoundSpec& spec)
{
    switch (spec.theorem) {
    case BoundSpec::Theorem::huber:
        return "huber-linear";
    case BoundSpec::Theorem::lp_low:
        return "lp-low-linear";
    case BoundSpec::Theorem::lp_high:
        return "lp-high-power";
    case BoundSpec::Theorem::l1:
        return spec.sup_factor ? "l1-sup-linear" : "l1-4B-linear";
    case BoundSpec::Theorem::sq_eps:
        return "sqeps-linear";
    }
    return {};
}

inline double gamma_transform(const BoundSpec& spec, double t)
{
    spec.validate();
    if (!(t >= 0.0))
        throw invalid_argument("gamma_transform requires t >= 0");
    const double B = spec.bound;
    switch (spec.theorem) {
    case BoundSpec::Theorem::huber:
        return std::max(2.0 * B / spec.param, 2.0) / spec.p_min * t;
    case BoundSpec::Theorem::lp_low: {
        const double p = spec.param;
        return 2.0 / (std::pow(8.0 * B, p - 2.0) * p * (p - 1.0)) * t;
    }
    case BoundSpec::Theorem::lp_high:
        return std::pow(t, 2.0 / spec.param);
    case BoundSpec::Theorem::l1:
        return spec.sup_factor.value_or(4.0 * B) * t;
    case BoundSpec::Theorem::sq_eps:
        return t / (2.0 * spec.p_min);
    }
    return 0.0;
}

struct BoundComponents
{
    double target_estimation_error = 0.0;    // E_l2(h) - E*_l2(H)
    double target_gap = 0.0;                 // M_l2(H)
    double surrogate_estimation_error = 0.0; // E_L(h) - E*_L(H)
    double surrogate_gap = 0.0;              // M_L(H)
};

struct BoundReport
{
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
    bool holds = false;
    BoundComponents components;
    std::string gamma;
};

inline BoundReport make_report(double lhs, double rhs, const BoundComponents& c, std::string gamma)
{
    BoundReport r;
    r.lhs = lhs;
    r.rhs = rhs;
    r.slack = rhs - lhs;
    r.holds = r.slack >= -slack_tol;
    r.components = c;
    r.gamma = std::move(gamma);
    return r;
}

/// Everything about a (distribution, class, surrogate) triple that does not
/// depend on the hypothesis: best-in-class errors, minimizability gaps and
/// the Gamma template. Building it is the expensive part of a check.
class BoundContext
{
public:
    BoundContext(FiniteDistribution dist, HypothesisClass cls, LossKind surrogate)
        : dist_(std::move(dist)), cls_(cls), surrogate_(surrogate)
    {
        const double B = dist_.bound();
        if (cls_.bound != B)
            throw invalid_argument("hypothesis class and distribution must share B");
        for (const auto& p : dist_.points())
            means_.push_back(require_symmetric(p.cond));

        spec_.bound = B;
        switch (surrogate_.family()) {
        case LossFamily::squared:
            spec_.theorem = BoundSpec::Theorem::lp_high;
            spec_.param = 2.0;
            break;
        case LossFamily::lp: {
            const double p = surrogate_.param();
            spec_.param = p;
            if (p == 1.0)
                spec_.theorem = BoundSpec::Theorem::l1;
            else if (p < 2.0)
                spec_.theorem = BoundSpec::Theorem::lp_low;
            else
                spec_.theorem = BoundSpec::Theorem::lp_high;
            break;
        }
        case LossFamily::huber:
            spec_.theorem = BoundSpec::Theorem::huber;
            spec_.param = surrogate_.param();
            spec_.p_min = p_min(dist_, PminMode::huber_window(spec_.param));
            if (!(spec_.p_min > 0.0))
                throw bound_inapplicable("p_min(delta) = 0: Huber bound does not apply");
            break;
        case LossFamily::sq_eps_insensitive:
            spec_.theorem = BoundSpec::Theorem::sq_eps;
            spec_.param = surrogate_.param();
            spec_.p_min = p_min(dist_, PminMode::eps_tail(spec_.param));
            if (!(spec_.p_min > 0.0))
                throw bound_inapplicable("p_min(eps) = 0: squared eps-insensitive bound does not apply");
            break;
        case LossFamily::eps_insensitive:
            throw invalid_spec("the eps-insensitive loss admits no H-consistency bound w.r.t. the squared loss");
        }

        const LossKind target = LossKind::squared();
        target_best_ = best_in_class_error(target, cls_, dist_);
        target_gap_ = detail::clamp_rounding(target_best_ - expected_best_conditional_error(target, dist_), target_best_,
                                             "squared-loss minimizability gap");
        surrogate_best_ = best_in_class_error(surrogate_, cls_, dist_);
        surrogate_gap_ = detail::clamp_rounding(surrogate_best_ - expected_best_conditional_error(surrogate_, dist_),
                                                surrogate_best_, "surrogate minimizability gap");
    }

    const FiniteDistribution& distribution() const noexcept { return dist_; }
    const HypothesisClass& hypothesis_class() const noexcept { return cls_; }
    const LossKind& surrogate() const noexcept { return surrogate_; }
    const std::vector<double>& means() const noexcept { return means_; }
    double target_best() const noexcept { return target_best_; }
    double target_gap() const noexcept { return target_gap_; }
    double surrogate_best() const noexcept { return surrogate_best_; }
    double surrogate_gap() const noexcept { return surrogate_gap_; }

    // Gamma template; for l1 the sup factor is filled in per hypothesis.
    const BoundSpec& spec() const noexcept { return spec_; }

    // max over support of |h(x) - y| + |mu(x) - y|.
    double l1_sup_factor(const Hypothesis& h) const
    {
        double best = 0.0;
        const auto& pts = dist_.points();
        for (std::size_t i = 0; i < pts.size(); ++i)
            best = std::max(best, l1_spread(h.at(pts[i].id), i));
        return best;
    }

    double l1_spread(double prediction, std::size_t input_index) const
    {
        double best = 0.0;
        for (const Atom& a : dist_.points()[input_index].cond.atoms())
            best = std::max(best, std::abs(prediction - a.label) + std::abs(means_[input_index] - a.label));
        return best;
    }

    BoundSpec spec_for(const Hypothesis& h) const
    {
        BoundSpec s = spec_;
        if (s.theorem == BoundSpec::Theorem::l1)
            s.sup_factor = l1_sup_factor(h);
        return s;
    }

    BoundComponents components(const Hypothesis& h) const
    {
        BoundComponents c;
        c.target_estimation_error = generalization_error(LossKind::squared(), h, dist_) - target_best_;
        c.target_gap = target_gap_;
        c.surrogate_estimation_error = generalization_error(surrogate_, h, dist_) - surrogate_best_;
        c.surrogate_gap = surrogate_gap_;
        return c;
    }

private:
    FiniteDistribution dist_;
    HypothesisClass cls_;
    LossKind surrogate_;
    std::vector<double> means_;
    BoundSpec spec_{BoundSpec::Theorem::lp_high, 1.0, 2.0, 0.0, std::nullopt};
    double target_best_ = 0.0;
    double target_gap_ = 0.0;
    double surrogate_best_ = 0.0;
    double surrogate_gap_ = 0.0;
};

namespace detail {

// E_L(h) - E*_L(H) + M_L(H) is an expectation of regrets, so it is
// nonnegative; the minimizer tolerance can push it a little below zero.
inline double nonnegative_total(double value)
{
    if (value >= 0.0)
        return value;
    if (value > -slack_tol)
        return 0.0;
    throw internal_consistency_error("regret total is negative: " + std::to_string(value));
}

} // namespace detail

inline BoundReport verify_bound_instance(const BoundContext& ctx, const Hypothesis& h)
{
    const BoundComponents c = ctx.components(h);
    const double lhs = c.target_estimation_error + c.target_gap;
    const double t = detail::nonnegative_total(c.surrogate_estimation_error + c.surrogate_gap);
    const BoundSpec spec = ctx.spec_for(h);
    return make_report(lhs, gamma_transform(spec, t), c, gamma_id(spec));
}

inline BoundReport verify_bound_instance(const FiniteDistribution& dist, const HypothesisClass& cls,
                                         const Hypothesis& h, const LossKind& surrogate)
{
    return verify_bound_instance(BoundContext(dist, cls, surrogate), h);
}

// ---------------------------------------------------------------------------
// General convex / concave templates
// ---------------------------------------------------------------------------

/// Closed registry of transforms usable as Psi (convex form) or Gamma
/// (concave form): identity, t -> c t, and t -> t^e.
struct Transform
{
    enum class Shape { identity, linear, power };

    Shape shape = Shape::identity;
    double value = 1.0; // coefficient (linear) or exponent (power)

    static Transform identity() { return {Shape::identity, 1.0}; }
    static Transform linear(double coef) { return {Shape::linear, coef}; }
    static Transform power(double exponent) { return {Shape::power, exponent}; }

    double operator()(double t) const
    {
        switch (shape) {
        case Shape::identity:
            return t;
        case Shape::linear:
            return value * t;
        case Shape::power:
            return t <= 0.0 ? 0.0 : std::pow(t, value);
        }
        return t;
    }
};

enum class TemplateForm { convex, concave };

enum class AlphaMode {
    one,         // alpha = 1
    huber_window, // alpha = 1 / P(0 <= mu - y <= delta | x)
    eps_tail,    // alpha = 1 / (2 P(mu - y >= eps | x))
    l1_spread    // alpha = sup_y |h(x) - y| + |mu(x) - y|
};

/// Checks the general template: verifies the per-input premise
///   convex:  Psi([dC_l2]_eps) <= alpha(h, x) dC_L
///   concave: [dC_l2]_eps <= Gamma(alpha(h, x) dC_L)
/// on every input, then evaluates the conclusion
///   convex:  Psi(S_l2) <= sup alpha * S_L + max{Psi(0), Psi(eps)}
///   concave: S_l2 <= Gamma(sup alpha * S_L) + eps
/// where S_L = E_L(h) - E*_L(H) + M_L(H).
/// Throws premise_failed when some input violates the premise.
inline BoundReport check_general_theorem(const BoundContext& ctx, const Hypothesis& h, TemplateForm form,
                                         const Transform& transform, AlphaMode alpha_mode, double eps)
{
    if (!(eps >= 0.0))
        throw invalid_argument("eps must be nonnegative");
    if ((transform.shape == Transform::Shape::linear && !(transform.value >= 0.0)) ||
        (transform.shape == Transform::Shape::power && form == TemplateForm::convex && !(transform.value >= 1.0)) ||
        (transform.shape == Transform::Shape::power && form == TemplateForm::concave &&
         !(transform.value > 0.0 && transform.value <= 1.0)))
        throw invalid_spec("transform shape does not match the template form");

    const auto& pts = ctx.distribution().points();
    const LossKind target = LossKind::squared();
    const LossKind& surrogate = ctx.surrogate();

    auto alpha_at = [&](std::size_t i, double prediction) -> double {
        switch (alpha_mode) {
        case AlphaMode::one:
            return 1.0;
        case AlphaMode::huber_window: {
            if (surrogate.family() != LossFamily::huber)
                throw invalid_spec("huber_window alpha needs a Huber surrogate");
            const double m = window_mass(pts[i].cond, PminMode::huber_window(surrogate.param()));
            if (!(m > 0.0))
                throw bound_inapplicable("zero Huber window mass at input '" + pts[i].id + "'");
            return 1.0 / m;
        }
        case AlphaMode::eps_tail: {
            if (surrogate.family() != LossFamily::sq_eps_insensitive)
                throw invalid_spec("eps_tail alpha needs a squared eps-insensitive surrogate");
            const double m = window_mass(pts[i].cond, PminMode::eps_tail(surrogate.param()));
            if (!(m > 0.0))
                throw bound_inapplicable("zero eps tail mass at input '" + pts[i].id + "'");
            return 1.0 / (2.0 * m);
        }
        case AlphaMode::l1_spread:
            return ctx.l1_spread(prediction, i);
        }
        return 1.0;
    };

    double sup_alpha = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double v = h.at(pts[i].id);
        const double alpha = alpha_at(i, v);
        sup_alpha = std::max(sup_alpha, alpha);
        const double target_regret = clipped_regret(conditional_regret(target, v, pts[i].cond), eps);
        const double surrogate_regret = conditional_regret(surrogate, v, pts[i].cond);
        double lhs = 0.0;
        double rhs = 0.0;
        if (form == TemplateForm::convex) {
            lhs = transform(target_regret);
            rhs = alpha * surrogate_regret;
        } else {
            lhs = target_regret;
            rhs = transform(alpha * surrogate_regret);
        }
        if (lhs > rhs + 1e-9 * std::max(1.0, std::abs(rhs)))
            throw premise_failed(pts[i].id, lhs, rhs);
    }

    const BoundComponents c = ctx.components(h);
    const double target_total = c.target_estimation_error + c.target_gap;
    const double surrogate_total = detail::nonnegative_total(c.surrogate_estimation_error + c.surrogate_gap);
    if (form == TemplateForm::convex) {
        const double additive = std::max(transform(0.0), transform(eps));
        return make_report(transform(std::max(target_total, 0.0)), sup_alpha * surrogate_total + additive, c,
                           "general-convex");
    }
    return make_report(target_total, transform(sup_alpha * surrogate_total) + eps, c, "general-concave");
}

// ---------------------------------------------------------------------------
// Learning bound
// ---------------------------------------------------------------------------

struct LearningBoundResult
{
    double rhs_value = 0.0;
    // Monte-Carlo estimate of the empirical Rademacher complexity of the loss
    // class; a mesh lower bound of the supremum, clamped at zero.
    double rademacher_estimate = 0.0;
    double surrogate_gap = 0.0;
    double target_gap = 0.0;
    double loss_bound = 0.0;
    double deviation_term = 0.0;
};

/// Evaluates Gamma(M_L + 4 R_m + 2 B_L sqrt(log(2/conf)/(2m))) - M_l2, the
/// squared-loss estimation bound for an empirical surrogate minimizer, with
/// R_m estimated from `trials` seeded samples of size m.
inline LearningBoundResult evaluate_learning_bound(const LossKind& surrogate, const FiniteDistribution& dist,
                                                   const HypothesisClass& cls, int m, double confidence_delta,
                                                   std::uint64_t seed, int trials)
{
    if (m < 1 || trials < 1)
        throw invalid_argument("learning bound needs m >= 1 and trials >= 1");
    if (!(confidence_delta > 0.0 && confidence_delta < 1.0))
        throw invalid_argument("confidence delta must lie in (0, 1)");

    const BoundContext ctx(dist, cls, surrogate);
    BoundSpec spec = ctx.spec(); // l1 falls back to the coarse 4B factor
    const double B = dist.bound();
    const auto& pts = dist.points();

    std::vector<double> mesh(cls.grid_size);
    for (int k = 0; k < cls.grid_size; ++k)
        mesh[k] = -B + 2.0 * B * k / (cls.grid_size - 1);

    std::mt19937_64 rng(seed);
    std::vector<double> input_weights;
    for (const auto& p : pts)
        input_weights.push_back(p.weight);
    std::discrete_distribution<std::size_t> pick_input(input_weights.begin(), input_weights.end());
    std::vector<std::discrete_distribution<std::size_t>> pick_label;
    for (const auto& p : pts) {
        std::vector<double> masses;
        for (const Atom& a : p.cond.atoms())
            masses.push_back(a.mass);
        pick_label.emplace_back(masses.begin(), masses.end());
    }
    std::bernoulli_distribution coin(0.5);

    double sum = 0.0;
    std::vector<double> per_mesh(mesh.size());
    std::vector<std::vector<double>> per_input_mesh(pts.size(), std::vector<double>(mesh.size()));
    for (int trial = 0; trial < trials; ++trial) {
        std::fill(per_mesh.begin(), per_mesh.end(), 0.0);
        for (auto& row : per_input_mesh)
            std::fill(row.begin(), row.end(), 0.0);
        for (int i = 0; i < m; ++i) {
            const std::size_t x = pick_input(rng);
            const double y = pts[x].cond.atoms()[pick_label[x](rng)].label;
            const double sigma = coin(rng) ? 1.0 : -1.0;
            for (std::size_t k = 0; k < mesh.size(); ++k)
                per_input_mesh[x][k] += sigma * loss_value(surrogate, mesh[k], y);
        }
        double sup = 0.0;
        if (cls.kind == HypothesisClass::Kind::constant_bounded) {
            for (const auto& row : per_input_mesh)
                for (std::size_t k = 0; k < mesh.size(); ++k)
                    per_mesh[k] += row[k];
            sup = *std::max_element(per_mesh.begin(), per_mesh.end());
        } else {
            // Predictions are free per input, so the sup splits across inputs.
            for (const auto& row : per_input_mesh)
                sup += *std::max_element(row.begin(), row.end());
        }
        sum += sup / m;
    }

    LearningBoundResult r;
    r.rademacher_estimate = std::max(0.0, sum / trials);
    r.surrogate_gap = ctx.surrogate_gap();
    r.target_gap = ctx.target_gap();
    r.loss_bound = loss_upper_bound(surrogate, B);
    r.deviation_term = 2.0 * r.loss_bound * std::sqrt(std::log(2.0 / confidence_delta) / (2.0 * m));
    r.rhs_value = gamma_transform(spec, r.surrogate_gap + 4.0 * r.rademacher_estimate + r.deviation_term) - r.target_gap;
    return r;
}

} // namespace regbound
