#pragma once

/**
 * Adversarial regression with linear hypotheses h(x) = <w, x> + b.
 *
 * For a perturbation ball {x' : ||x' - x|| <= gamma} the worst-case prediction
 * shift is gamma ||w||_*, which gives closed forms for
 *
 *   adversarial squared loss   (|h(x) - y| + gamma ||w||_*)^2
 *   smooth adversarial loss    L(h(x), y) + tau gamma ||w||_*
 *
 * train() minimizes the empirical mean of either objective over (w, b).
 */

#include "error.hpp"
#include "losses.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace regbound {

enum class PerturbationNorm { linf, l2, l1 };

inline std::string to_string(PerturbationNorm n)
{
    switch (n) {
    case PerturbationNorm::linf:
        return "linf";
    case PerturbationNorm::l2:
        return "l2";
    case PerturbationNorm::l1:
        return "l1";
    }
    return {};
}

inline PerturbationNorm parse_perturbation_norm(std::string_view s)
{
    if (s == "linf")
        return PerturbationNorm::linf;
    if (s == "l2")
        return PerturbationNorm::l2;
    if (s == "l1")
        return PerturbationNorm::l1;
    throw parse_error("unknown norm '" + std::string(s) + "' (expected linf|l2|l1)");
}

struct LinearModel
{
    std::vector<double> weights;
    double bias = 0.0;

    double predict(const std::vector<double>& x) const
    {
        if (x.size() != weights.size())
            throw dimension_mismatch("model has dimension " + std::to_string(weights.size()) + ", input has " +
                                     std::to_string(x.size()));
        double s = bias;
        for (std::size_t j = 0; j < x.size(); ++j)
            s += weights[j] * x[j];
        return s;
    }
};

struct Sample
{
    std::vector<double> features;
    double label;
};

struct Dataset
{
    std::vector<Sample> rows;
    std::size_t d = 0;

    std::size_t size() const noexcept { return rows.size(); }

    // Throws on ragged rows or non-finite values.
    void validate() const
    {
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].features.size() != d)
                throw dimension_mismatch("row " + std::to_string(i) + " has " + std::to_string(rows[i].features.size()) +
                                         " features, expected " + std::to_string(d));
            if (!std::isfinite(rows[i].label))
                throw invalid_argument("row " + std::to_string(i) + " has a non-finite label");
            for (double v : rows[i].features)
                if (!std::isfinite(v))
                    throw invalid_argument("row " + std::to_string(i) + " has a non-finite feature");
        }
    }
};

struct AdvConfig
{
    double gamma = 0.0;
    PerturbationNorm norm = PerturbationNorm::linf;
    double tau = 0.0;
    LossKind surrogate = LossKind::squared();

    void validate() const
    {
        if (!(gamma >= 0.0) || !std::isfinite(gamma))
            throw invalid_argument("gamma must be >= 0");
        if (!(tau >= 0.0) || !std::isfinite(tau))
            throw invalid_argument("tau must be >= 0");
    }
};

struct SolverConfig
{
    int max_iters = 200000;
    double step0 = 1.0;
    double tol = 1e-9;
    std::uint64_t seed = 0;
    // Box constraint |w_j|, |b| <= projection_bound when set.
    std::optional<double> projection_bound;

    void validate() const
    {
        if (max_iters <= 0)
            throw invalid_argument("max_iters must be positive");
        if (!(step0 > 0.0))
            throw invalid_argument("step0 must be positive");
        if (!(tol > 0.0))
            throw invalid_argument("tol must be positive");
        if (projection_bound && !(*projection_bound > 0.0))
            throw invalid_argument("projection_bound must be positive");
    }
};

/// ||w||_* for the dual of the perturbation norm.
inline double dual_norm(const std::vector<double>& w, PerturbationNorm norm)
{
    double s = 0.0;
    switch (norm) {
    case PerturbationNorm::linf:
        for (double v : w)
            s += std::abs(v);
        return s;
    case PerturbationNorm::l2:
        for (double v : w)
            s += v * v;
        return std::sqrt(s);
    case PerturbationNorm::l1:
        for (double v : w)
            s = std::max(s, std::abs(v));
        return s;
    }
    return s;
}

inline double smoothness_term(const LinearModel& model, double gamma, PerturbationNorm norm)
{
    if (!(gamma >= 0.0))
        throw invalid_argument("gamma must be >= 0");
    if (gamma == 0.0)
        return 0.0;
    return gamma * dual_norm(model.weights, norm);
}

inline double adv_squared_loss(const LinearModel& model, const std::vector<double>& x, double y, double gamma,
                               PerturbationNorm norm)
{
    const double worst = std::abs(model.predict(x) - y) + smoothness_term(model, gamma, norm);
    return worst * worst;
}

inline double smooth_adv_loss(const AdvConfig& cfg, const LinearModel& model, const std::vector<double>& x, double y)
{
    cfg.validate();
    return loss_value(cfg.surrogate, model.predict(x), y) + cfg.tau * smoothness_term(model, cfg.gamma, cfg.norm);
}

struct EvalResult
{
    double clean_mse = 0.0;
    double robust_mse = 0.0;
};

inline EvalResult evaluate(const LinearModel& model, const Dataset& data, double gamma, PerturbationNorm norm)
{
    if (data.rows.empty())
        throw invalid_argument("evaluate needs a non-empty dataset");
    if (data.d != model.weights.size())
        throw dimension_mismatch("model has dimension " + std::to_string(model.weights.size()) + ", data has " +
                                 std::to_string(data.d));
    const double s = smoothness_term(model, gamma, norm);
    EvalResult out;
    for (const Sample& row : data.rows) {
        const double r = std::abs(model.predict(row.features) - row.label);
        out.clean_mse += r * r;
        out.robust_mse += (r + s) * (r + s);
    }
    const double m = static_cast<double>(data.rows.size());
    out.clean_mse /= m;
    out.robust_mse /= m;
    return out;
}

struct TrainObjective
{
    enum class Kind { smooth_adv, adv_sq };

    Kind kind;
    AdvConfig cfg; // adv_sq uses only gamma and norm

    static TrainObjective smooth_adv(const AdvConfig& cfg)
    {
        cfg.validate();
        return {Kind::smooth_adv, cfg};
    }

    static TrainObjective adv_sq(double gamma, PerturbationNorm norm)
    {
        AdvConfig cfg;
        cfg.gamma = gamma;
        cfg.norm = norm;
        cfg.validate();
        return {Kind::adv_sq, cfg};
    }

    std::string name() const { return kind == Kind::smooth_adv ? "smooth-adv" : "adv-sq"; }
};

/// Mean of the per-row objective over the dataset.
inline double empirical_objective(const TrainObjective& obj, const LinearModel& model, const Dataset& data)
{
    if (data.rows.empty())
        throw invalid_argument("empirical objective of an empty dataset");
    const double s = smoothness_term(model, obj.cfg.gamma, obj.cfg.norm);
    double total = 0.0;
    for (const Sample& row : data.rows) {
        const double r = model.predict(row.features) - row.label;
        if (obj.kind == TrainObjective::Kind::smooth_adv) {
            total += loss_of_residual(obj.cfg.surrogate, r);
        } else {
            const double worst = std::abs(r) + s;
            total += worst * worst;
        }
    }
    total /= static_cast<double>(data.rows.size());
    if (obj.kind == TrainObjective::Kind::smooth_adv)
        total += obj.cfg.tau * s;
    return total;
}

struct TrainResult
{
    LinearModel model;
    double objective = 0.0;
    int iters = 0; // first-order iterations plus polish iterations
    std::string method; // "prox-gradient", "subgradient", with "+ellipsoid" when polished
    std::optional<double> certified_gap; // from the polish, when it ran
    std::vector<double> trace;
};

namespace detail {

// Parameter vector theta = (w_0, ..., w_{d-1}, b).
using Vec = std::vector<double>;

inline LinearModel to_model(const Vec& theta)
{
    return {Vec(theta.begin(), theta.end() - 1), theta.back()};
}

inline double dot(const Vec& a, const Vec& b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

inline double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

// One subgradient of ||w||_* (bias excluded), written into g[0..d).
inline void add_dual_norm_subgradient(const Vec& theta, PerturbationNorm norm, double scale, Vec& g)
{
    const std::size_t d = theta.size() - 1;
    switch (norm) {
    case PerturbationNorm::linf:
        for (std::size_t j = 0; j < d; ++j)
            g[j] += scale * sign(theta[j]);
        break;
    case PerturbationNorm::l2: {
        double n = 0.0;
        for (std::size_t j = 0; j < d; ++j)
            n += theta[j] * theta[j];
        n = std::sqrt(n);
        if (n > 0.0)
            for (std::size_t j = 0; j < d; ++j)
                g[j] += scale * theta[j] / n;
        break;
    }
    case PerturbationNorm::l1: {
        std::size_t arg = 0;
        double best = -1.0;
        for (std::size_t j = 0; j < d; ++j)
            if (std::abs(theta[j]) > best) {
                best = std::abs(theta[j]);
                arg = j;
            }
        if (best > 0.0)
            g[arg] += scale * sign(theta[arg]);
        break;
    }
    }
}

class Problem
{
public:
    Problem(const TrainObjective& obj, const Dataset& data, std::optional<double> box)
        : obj_(obj), data_(data), box_(box), n_(data.d + 1)
    {}

    std::size_t dim() const noexcept { return n_; }
    const std::optional<double>& box() const noexcept { return box_; }

    double value(const Vec& theta) const { return empirical_objective(obj_, to_model(theta), data_); }

    // Smooth part of the SmoothAdv objective (mean surrogate loss) and its gradient.
    double smooth_value(const Vec& theta) const
    {
        double total = 0.0;
        for (const Sample& row : data_.rows)
            total += loss_of_residual(obj_.cfg.surrogate, residual(theta, row));
        return total / static_cast<double>(data_.rows.size());
    }

    void smooth_gradient(const Vec& theta, Vec& g) const
    {
        std::fill(g.begin(), g.end(), 0.0);
        for (const Sample& row : data_.rows) {
            const double s = residual_subgradient(obj_.cfg.surrogate, residual(theta, row));
            for (std::size_t j = 0; j + 1 < n_; ++j)
                g[j] += s * row.features[j];
            g[n_ - 1] += s;
        }
        const double m = static_cast<double>(data_.rows.size());
        for (double& v : g)
            v /= m;
    }

    // Weight of the separable l1 term handled by the prox path.
    double l1_weight() const { return obj_.cfg.tau * obj_.cfg.gamma; }

    void subgradient(const Vec& theta, Vec& g) const
    {
        const double gamma = obj_.cfg.gamma;
        const PerturbationNorm norm = obj_.cfg.norm;
        if (obj_.kind == TrainObjective::Kind::smooth_adv) {
            smooth_gradient(theta, g);
            if (gamma > 0.0 && obj_.cfg.tau > 0.0)
                add_dual_norm_subgradient(theta, norm, obj_.cfg.tau * gamma, g);
            return;
        }
        std::fill(g.begin(), g.end(), 0.0);
        const double s = gamma * dual_norm(Vec(theta.begin(), theta.end() - 1), norm);
        double outer = 0.0;
        for (const Sample& row : data_.rows) {
            const double r = residual(theta, row);
            const double coef = 2.0 * (std::abs(r) + s);
            const double sr = sign(r);
            for (std::size_t j = 0; j + 1 < n_; ++j)
                g[j] += coef * sr * row.features[j];
            g[n_ - 1] += coef * sr;
            outer += coef;
        }
        if (gamma > 0.0)
            add_dual_norm_subgradient(theta, norm, gamma * outer, g);
        const double m = static_cast<double>(data_.rows.size());
        for (double& v : g)
            v /= m;
    }

    void project(Vec& theta) const
    {
        if (!box_)
            return;
        for (double& v : theta)
            v = std::clamp(v, -*box_, *box_);
    }

private:
    double residual(const Vec& theta, const Sample& row) const
    {
        double pred = theta[n_ - 1];
        for (std::size_t j = 0; j + 1 < n_; ++j)
            pred += theta[j] * row.features[j];
        return pred - row.label;
    }

    const TrainObjective& obj_;
    const Dataset& data_;
    std::optional<double> box_;
    std::size_t n_;
};

struct StageResult
{
    Vec theta;
    double value = 0.0;
    int iters = 0;
    bool converged = false;
};

// Monotone FISTA with backtracking on mean surrogate + lambda ||w||_1.
inline StageResult proximal_stage(const Problem& prob, Vec theta, const SolverConfig& solver, std::vector<double>& trace)
{
    const std::size_t n = prob.dim();
    const double lambda = prob.l1_weight();
    auto prox = [&](Vec& v, double step) {
        for (std::size_t j = 0; j + 1 < n; ++j) {
            const double a = std::abs(v[j]) - lambda * step;
            v[j] = a > 0.0 ? sign(v[j]) * a : 0.0;
        }
        prob.project(v);
    };
    auto full = [&](const Vec& v) {
        double l1 = 0.0;
        for (std::size_t j = 0; j + 1 < n; ++j)
            l1 += std::abs(v[j]);
        return prob.smooth_value(v) + lambda * l1;
    };

    prob.project(theta);
    Vec x = theta, y = theta, z(n), grad(n);
    double fx = full(x);
    double L = 1.0 / solver.step0;
    double t = 1.0;
    trace.push_back(fx);
    StageResult out;
    for (int k = 1; k <= solver.max_iters; ++k) {
        const double fy = prob.smooth_value(y);
        prob.smooth_gradient(y, grad);
        double move2 = 0.0;
        for (;;) {
            for (std::size_t i = 0; i < n; ++i)
                z[i] = y[i] - grad[i] / L;
            prox(z, 1.0 / L);
            double lin = 0.0;
            move2 = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double dz = z[i] - y[i];
                lin += grad[i] * dz;
                move2 += dz * dz;
            }
            if (prob.smooth_value(z) <= fy + lin + 0.5 * L * move2 + 1e-15 * std::max(1.0, std::abs(fy)))
                break;
            L *= 2.0;
            if (!std::isfinite(L))
                throw non_convergence("proximal step size collapsed", trace);
        }
        const double fz = full(z);
        const Vec x_prev = x;
        const double fx_prev = fx;
        if (fz <= fx) {
            x = z;
            fx = fz;
        }
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        for (std::size_t i = 0; i < n; ++i)
            y[i] = x[i] + (t / t_next) * (z[i] - x[i]) + ((t - 1.0) / t_next) * (x[i] - x_prev[i]);
        t = t_next;
        trace.push_back(fx);
        out.iters = k;
        // Objective change and squared gradient-mapping norm both small.
        if (std::abs(fx_prev - fx) < solver.tol && L * L * move2 < solver.tol) {
            out.converged = true;
            break;
        }
    }
    out.theta = x;
    out.value = prob.value(x);
    return out;
}

// Normalized subgradient steps step0 / sqrt(t); iterates are averaged over
// windows [2^k, 2^(k+1)) and the run stops when consecutive window averages
// differ by less than tol in objective.
inline StageResult subgradient_stage(const Problem& prob, Vec theta, const SolverConfig& solver,
                                     std::vector<double>& trace)
{
    const std::size_t n = prob.dim();
    prob.project(theta);
    Vec g(n), sum(n, 0.0), avg(n);
    double prev_window = prob.value(theta);
    trace.push_back(prev_window);
    StageResult out;
    out.theta = theta;
    out.value = prev_window;
    long long window_start = 1, window_end = 2, count = 0;
    for (int t = 1; t <= solver.max_iters; ++t) {
        prob.subgradient(theta, g);
        const double scale = solver.step0 / std::sqrt(static_cast<double>(t)) / std::max(1.0, norm2(g));
        for (std::size_t i = 0; i < n; ++i)
            theta[i] -= scale * g[i];
        prob.project(theta);
        for (std::size_t i = 0; i < n; ++i)
            sum[i] += theta[i];
        ++count;
        out.iters = t;
        if (t + 1 == window_end) {
            for (std::size_t i = 0; i < n; ++i)
                avg[i] = sum[i] / static_cast<double>(count);
            const double v = prob.value(avg);
            trace.push_back(v);
            if (v < out.value) {
                out.value = v;
                out.theta = avg;
            }
            const bool small_change = std::abs(v - prev_window) < solver.tol;
            prev_window = v;
            std::fill(sum.begin(), sum.end(), 0.0);
            count = 0;
            window_start = window_end;
            window_end *= 2;
            if (small_change && window_start > 2) {
                out.converged = true;
                break;
            }
        }
    }
    return out;
}

struct PolishResult
{
    Vec theta;
    double value = 0.0;
    double gap = std::numeric_limits<double>::infinity();
    int iters = 0;
};

// Central-cut ellipsoid method over the ball of the given radius around the
// start. The gap is best value minus the best lower bound from the cuts, so
// it certifies optimality over the ball.
inline PolishResult ellipsoid_run(const Problem& prob, const Vec& start, double radius, double target_gap,
                                  int max_iters)
{
    const std::size_t n = prob.dim();
    const double nd = static_cast<double>(n);
    Vec c = start, g(n), Pg(n);
    std::vector<double> P(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        P[i * n + i] = radius * radius;

    PolishResult out;
    out.theta = start;
    out.value = prob.value(start);
    double lower = -std::numeric_limits<double>::infinity();
    const auto& box = prob.box();
    for (int k = 0; k < max_iters; ++k) {
        out.iters = k + 1;
        bool feasible = true;
        if (box) {
            for (std::size_t i = 0; i < n && feasible; ++i)
                if (std::abs(c[i]) > *box) {
                    std::fill(g.begin(), g.end(), 0.0);
                    g[i] = sign(c[i]);
                    feasible = false;
                }
        }
        if (feasible) {
            const double f = prob.value(c);
            if (f < out.value) {
                out.value = f;
                out.theta = c;
            }
            prob.subgradient(c, g);
        }
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                s += P[i * n + j] * g[j];
            Pg[i] = s;
        }
        const double gPg = dot(g, Pg);
        if (feasible) {
            if (!(gPg > 0.0)) {
                // Zero subgradient: c is optimal.
                lower = out.value;
                out.gap = 0.0;
                return out;
            }
            lower = std::max(lower, prob.value(c) - std::sqrt(gPg));
            out.gap = out.value - lower;
            if (out.gap <= target_gap)
                return out;
        } else if (!(gPg > 0.0)) {
            return out;
        }
        const double root = std::sqrt(gPg);
        for (std::size_t i = 0; i < n; ++i)
            c[i] -= Pg[i] / (root * (nd + 1.0));
        const double a = nd * nd / (nd * nd - 1.0);
        const double b = 2.0 / (nd + 1.0) / gPg;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                P[i * n + j] = a * (P[i * n + j] - b * Pg[i] * Pg[j]);
        // Keep P exactly symmetric.
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                P[i * n + j] = P[j * n + i] = 0.5 * (P[i * n + j] + P[j * n + i]);
    }
    return out;
}

inline PolishResult ellipsoid_polish(const Problem& prob, const Vec& start, double target_gap)
{
    const int max_iters = 400 * static_cast<int>(prob.dim() * prob.dim()) + 4000;
    double radius = 4.0 * std::max(1.0, norm2(start));
    PolishResult total;
    for (int attempt = 0; attempt < 6; ++attempt) {
        PolishResult run = ellipsoid_run(prob, start, radius, target_gap, max_iters);
        total.iters += run.iters;
        total.theta = run.theta;
        total.value = run.value;
        total.gap = run.gap;
        Vec diff(start.size());
        for (std::size_t i = 0; i < diff.size(); ++i)
            diff[i] = run.theta[i] - start[i];
        if (norm2(diff) <= 0.5 * radius)
            break;
        radius *= 2.0;
    }
    return total;
}

// Largest problem (d + 1 parameters) that gets the ellipsoid polish.
inline constexpr std::size_t polish_max_dim = 16;

} // namespace detail

/// Minimizes the empirical objective over (w, b). Deterministic in
/// (objective, data, solver).
inline TrainResult train(const TrainObjective& objective, const Dataset& data, const SolverConfig& solver)
{
    if (data.rows.empty())
        throw invalid_argument("train needs a non-empty dataset");
    data.validate();
    solver.validate();
    objective.cfg.validate();

    const detail::Problem prob(objective, data, solver.projection_bound);
    const std::size_t n = prob.dim();
    detail::Vec theta(n, 0.0);
    std::mt19937_64 rng(solver.seed);
    std::normal_distribution<double> init(0.0, 1e-3);
    for (std::size_t j = 0; j + 1 < n; ++j)
        theta[j] = init(rng);

    const bool prox = objective.kind == TrainObjective::Kind::smooth_adv &&
                      is_continuously_differentiable(objective.cfg.surrogate) &&
                      (objective.cfg.norm == PerturbationNorm::linf || objective.cfg.gamma == 0.0 ||
                       objective.cfg.tau == 0.0);

    TrainResult result;
    detail::StageResult stage = prox ? detail::proximal_stage(prob, theta, solver, result.trace)
                                     : detail::subgradient_stage(prob, theta, solver, result.trace);
    result.method = prox ? "prox-gradient" : "subgradient";
    result.iters = stage.iters;
    detail::Vec best = stage.theta;
    double best_value = stage.value;

    bool certified = false;
    if (n <= detail::polish_max_dim && (!prox || !stage.converged)) {
        const double target = std::min(solver.tol, 1e-10) * std::max(1.0, std::abs(best_value));
        detail::PolishResult polish = detail::ellipsoid_polish(prob, best, target);
        result.iters += polish.iters;
        result.method += "+ellipsoid";
        result.certified_gap = polish.gap;
        certified = polish.gap <= std::max(target, solver.tol);
        if (polish.value < best_value) {
            best_value = polish.value;
            best = polish.theta;
        }
        result.trace.push_back(best_value);
    }
    if (!stage.converged && !certified)
        throw non_convergence(objective.name() + " training did not reach tol " + std::to_string(solver.tol) + " in " +
                                  std::to_string(solver.max_iters) + " iterations",
                              result.trace);
    result.model = detail::to_model(best);
    result.objective = best_value;
    return result;
}

} // namespace regbound
