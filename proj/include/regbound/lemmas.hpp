#pragma once

/**
 * Pointwise inequalities behind the positive bounds, checked on grids.
 *
 * Each lemma concerns F(x, y) = (g(x + y) + g(x - y)) / 2 - g(y) for a loss
 * profile g and asserts F(x, y) >= lower(x) on a domain:
 *
 *   HuberF(delta, B)   g Huber,            |x|, |y| <= B, |y| <= delta,  lower = min{delta/(2B), 1/4} x^2
 *   LpClarkson(p, B)   g = |t|^p, p >= 2,   |x|, |y| <= B,                lower = |x|^p
 *   LpLowF(p, B)       g = |t|^p, 1<p<=2,   |x|, |y| <= B,                lower = (2B)^(p-2) p (p-1) / 2 x^2
 *   SqEpsF(eps, R)     g = max{t^2-eps^2,0}, |x| <= R, eps <= |y| <= R,    lower = x^2
 *
 * The squared-eps lemma holds for every real x; R only bounds the sweep.
 */

#include "error.hpp"
#include "losses.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace regbound {

// Deviations below this count as violations.
inline constexpr double lemma_violation_threshold = -1e-10;

struct LemmaId
{
    enum class Kind { huber_f, lp_clarkson, lp_low_f, sq_eps_f };

    Kind kind;
    double param; // delta, p, p, eps
    double radius; // B (or R for sq_eps_f)

    static LemmaId huber_f(double delta, double bound) { return make(Kind::huber_f, delta, bound); }
    static LemmaId lp_clarkson(double p, double bound) { return make(Kind::lp_clarkson, p, bound); }
    static LemmaId lp_low_f(double p, double bound) { return make(Kind::lp_low_f, p, bound); }
    static LemmaId sq_eps_f(double eps, double radius) { return make(Kind::sq_eps_f, eps, radius); }

    // Sweep radius used when none is given for the squared-eps lemma.
    static double default_sq_eps_radius(double eps) { return std::max(1.0, 4.0 * eps); }

private:
    static LemmaId make(Kind kind, double param, double radius)
    {
        if (!(radius > 0.0))
            throw invalid_argument("lemma radius must be positive");
        switch (kind) {
        case Kind::huber_f:
        case Kind::sq_eps_f:
            if (!(param > 0.0))
                throw invalid_argument("lemma parameter must be positive");
            break;
        case Kind::lp_clarkson:
            if (!(param >= 2.0))
                throw invalid_argument("Clarkson step requires p >= 2");
            break;
        case Kind::lp_low_f:
            if (!(param > 1.0 && param <= 2.0))
                throw invalid_argument("l_p low lemma requires 1 < p <= 2");
            break;
        }
        if (kind == Kind::sq_eps_f && param > radius)
            throw invalid_argument("sweep radius must be at least eps");
        return {kind, param, radius};
    }
};

inline std::string to_string(const LemmaId& lemma)
{
    switch (lemma.kind) {
    case LemmaId::Kind::huber_f:
        return "huberF(delta=" + detail::format_double(lemma.param) + ",B=" + detail::format_double(lemma.radius) + ")";
    case LemmaId::Kind::lp_clarkson:
        return "clarkson(p=" + detail::format_double(lemma.param) + ",B=" + detail::format_double(lemma.radius) + ")";
    case LemmaId::Kind::lp_low_f:
        return "lpLowF(p=" + detail::format_double(lemma.param) + ",B=" + detail::format_double(lemma.radius) + ")";
    case LemmaId::Kind::sq_eps_f:
        return "sqepsF(eps=" + detail::format_double(lemma.param) + ",R=" + detail::format_double(lemma.radius) + ")";
    }
    return {};
}

namespace detail {

inline LossKind lemma_profile(const LemmaId& lemma)
{
    switch (lemma.kind) {
    case LemmaId::Kind::huber_f:
        return LossKind::huber(lemma.param);
    case LemmaId::Kind::lp_clarkson:
    case LemmaId::Kind::lp_low_f:
        return LossKind::lp(lemma.param);
    case LemmaId::Kind::sq_eps_f:
        return LossKind::sq_eps_insensitive(lemma.param);
    }
    return LossKind::squared();
}

inline double lemma_lower_bound(const LemmaId& lemma, double x)
{
    switch (lemma.kind) {
    case LemmaId::Kind::huber_f:
        return std::min(lemma.param / (2.0 * lemma.radius), 0.25) * x * x;
    case LemmaId::Kind::lp_clarkson:
        return std::pow(std::abs(x), lemma.param);
    case LemmaId::Kind::lp_low_f: {
        const double p = lemma.param;
        return std::pow(2.0 * lemma.radius, p - 2.0) * p * (p - 1.0) / 2.0 * x * x;
    }
    case LemmaId::Kind::sq_eps_f:
        return x * x;
    }
    return 0.0;
}

inline bool in_lemma_domain(const LemmaId& lemma, double x, double y)
{
    // Grid points land on the boundary up to rounding.
    const double slack = 1e-12 * lemma.radius;
    const double R = lemma.radius + slack;
    if (std::abs(x) > R || std::abs(y) > R)
        return false;
    switch (lemma.kind) {
    case LemmaId::Kind::huber_f:
        return std::abs(y) <= lemma.param + slack;
    case LemmaId::Kind::sq_eps_f:
        return std::abs(y) >= lemma.param - slack;
    default:
        return true;
    }
}

inline double pair_deviation_unchecked(const LemmaId& lemma, const LossKind& g, double x, double y)
{
    const double f = 0.5 * (loss_of_residual(g, x + y) + loss_of_residual(g, x - y)) - loss_of_residual(g, y);
    return f - lemma_lower_bound(lemma, x);
}

} // namespace detail

/// F(x, y) minus the lemma's lower bound; nonnegative when the lemma holds.
inline double pair_deviation(const LemmaId& lemma, double x, double y)
{
    if (!detail::in_lemma_domain(lemma, x, y))
        throw domain_violation("(" + std::to_string(x) + ", " + std::to_string(y) + ") outside the domain of " +
                               to_string(lemma));
    return detail::pair_deviation_unchecked(lemma, detail::lemma_profile(lemma), x, y);
}

struct LemmaGridResult
{
    double min_deviation = std::numeric_limits<double>::infinity();
    double argmin_x = 0.0;
    double argmin_y = 0.0;
    long long violations = 0;
    long long evaluated = 0;
};

namespace detail {

// Uniform grid of n points over the y-range of the lemma. For the squared-eps
// lemma the range is [-R, -eps] U [eps, R]: the first half of the points
// covers the negative piece, the rest the positive one.
inline std::vector<double> lemma_y_grid(const LemmaId& lemma, int n)
{
    std::vector<double> ys(n);
    auto fill = [](std::vector<double>& out, std::size_t from, std::size_t count, double lo, double hi) {
        for (std::size_t k = 0; k < count; ++k)
            out[from + k] = count == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1);
    };
    switch (lemma.kind) {
    case LemmaId::Kind::huber_f: {
        const double h = std::min(lemma.param, lemma.radius);
        fill(ys, 0, n, -h, h);
        break;
    }
    case LemmaId::Kind::sq_eps_f: {
        const std::size_t neg = static_cast<std::size_t>(n) / 2;
        fill(ys, 0, neg, -lemma.radius, -lemma.param);
        fill(ys, neg, n - neg, lemma.param, lemma.radius);
        break;
    }
    default:
        fill(ys, 0, n, -lemma.radius, lemma.radius);
    }
    return ys;
}

} // namespace detail

/// Evaluates pair_deviation on an n x n uniform grid over the lemma's domain.
inline LemmaGridResult check_lemma_grid(const LemmaId& lemma, int grid_points_per_axis, int threads = 1)
{
    if (grid_points_per_axis < 3)
        throw invalid_argument("lemma grid needs at least 3 points per axis");
    const int n = grid_points_per_axis;
    const double R = lemma.radius;
    const LossKind g = detail::lemma_profile(lemma);
    const std::vector<double> ys = detail::lemma_y_grid(lemma, n);

    std::vector<LemmaGridResult> rows(n);
    parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t i) {
        const double x = -R + 2.0 * R * static_cast<double>(i) / static_cast<double>(n - 1);
        LemmaGridResult& row = rows[i];
        for (double y : ys) {
            const double dev = detail::pair_deviation_unchecked(lemma, g, x, y);
            ++row.evaluated;
            if (dev < row.min_deviation) {
                row.min_deviation = dev;
                row.argmin_x = x;
                row.argmin_y = y;
            }
            if (dev < lemma_violation_threshold)
                ++row.violations;
        }
    });

    LemmaGridResult total;
    for (const auto& row : rows) {
        total.evaluated += row.evaluated;
        total.violations += row.violations;
        if (row.min_deviation < total.min_deviation) {
            total.min_deviation = row.min_deviation;
            total.argmin_x = row.argmin_x;
            total.argmin_y = row.argmin_y;
        }
    }
    return total;
}

} // namespace regbound
