#pragma once

/**
 * Regression losses of the form L(y', y) = psi(y' - y).
 *
 * Supported families: squared, l_p (p >= 1), Huber (delta), epsilon-insensitive
 * and squared epsilon-insensitive. All of them are even in the residual,
 * vanish at zero and are convex.
 */

#include "error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>
#include <string_view>

namespace regbound {

enum class LossFamily { squared, lp, huber, eps_insensitive, sq_eps_insensitive };

class LossKind
{
public:
    static LossKind squared() { return LossKind(LossFamily::squared, 2.0); }

    static LossKind lp(double p)
    {
        if (!(p >= 1.0) || !std::isfinite(p))
            throw invalid_argument("l_p loss requires p >= 1");
        return LossKind(LossFamily::lp, p);
    }

    static LossKind huber(double delta)
    {
        if (!(delta > 0.0) || !std::isfinite(delta))
            throw invalid_argument("Huber loss requires delta > 0");
        return LossKind(LossFamily::huber, delta);
    }

    static LossKind eps_insensitive(double eps)
    {
        if (!(eps > 0.0) || !std::isfinite(eps))
            throw invalid_argument("epsilon-insensitive loss requires eps > 0");
        return LossKind(LossFamily::eps_insensitive, eps);
    }

    static LossKind sq_eps_insensitive(double eps)
    {
        if (!(eps > 0.0) || !std::isfinite(eps))
            throw invalid_argument("squared epsilon-insensitive loss requires eps > 0");
        return LossKind(LossFamily::sq_eps_insensitive, eps);
    }

    LossFamily family() const noexcept { return family_; }

    // p for lp (2 for squared), delta for huber, eps for the two tube losses.
    double param() const noexcept { return param_; }

    friend bool operator==(const LossKind&, const LossKind&) = default;

private:
    LossKind(LossFamily f, double param) : family_(f), param_(param) {}

    LossFamily family_;
    double param_;
};

namespace detail {

inline double abs_pow(double t, double p)
{
    double a = std::abs(t);
    if (a == 0.0)
        return 0.0;
    return std::pow(a, p);
}

inline double huber_profile(double t, double delta)
{
    double a = std::abs(t);
    if (a <= delta)
        return 0.5 * t * t;
    return delta * a - 0.5 * delta * delta;
}

inline double sign(double t) { return t > 0.0 ? 1.0 : (t < 0.0 ? -1.0 : 0.0); }

} // namespace detail

// psi(t) for the loss, t = prediction - label.
inline double loss_of_residual(const LossKind& kind, double t)
{
    switch (kind.family()) {
    case LossFamily::squared:
        return t * t;
    case LossFamily::lp:
        return detail::abs_pow(t, kind.param());
    case LossFamily::huber:
        return detail::huber_profile(t, kind.param());
    case LossFamily::eps_insensitive:
        return std::max(std::abs(t) - kind.param(), 0.0);
    case LossFamily::sq_eps_insensitive:
        return std::max(t * t - kind.param() * kind.param(), 0.0);
    }
    return 0.0;
}

inline double loss_value(const LossKind& kind, double prediction, double label)
{
    return loss_of_residual(kind, prediction - label);
}

// Minimal-magnitude element of the subdifferential of psi at t.
inline double residual_subgradient(const LossKind& kind, double t)
{
    switch (kind.family()) {
    case LossFamily::squared:
        return 2.0 * t;
    case LossFamily::lp: {
        double p = kind.param();
        if (t == 0.0)
            return 0.0;
        if (p == 1.0)
            return detail::sign(t);
        return p * detail::abs_pow(t, p - 1.0) * detail::sign(t);
    }
    case LossFamily::huber: {
        double delta = kind.param();
        if (std::abs(t) <= delta)
            return t;
        return delta * detail::sign(t);
    }
    case LossFamily::eps_insensitive:
        // On |t| == eps the subdifferential is [0, 1] (or [-1, 0]); 0 is minimal.
        return std::abs(t) > kind.param() ? detail::sign(t) : 0.0;
    case LossFamily::sq_eps_insensitive: {
        // At |t| == eps the subdifferential spans [0, 2 eps]; 0 is minimal.
        double eps = kind.param();
        return std::abs(t) > eps ? 2.0 * t : 0.0;
    }
    }
    return 0.0;
}

inline double loss_subgradient(const LossKind& kind, double prediction, double label)
{
    return residual_subgradient(kind, prediction - label);
}

// Supremum of the loss over |prediction| <= bound, |label| <= bound.
inline double loss_upper_bound(const LossKind& kind, double bound)
{
    if (!(bound > 0.0))
        throw invalid_argument("loss_upper_bound requires B > 0");
    return loss_of_residual(kind, 2.0 * bound);
}

// True when the loss is differentiable with a continuous derivative everywhere.
inline bool is_continuously_differentiable(const LossKind& kind)
{
    switch (kind.family()) {
    case LossFamily::squared:
    case LossFamily::huber:
        return true;
    case LossFamily::lp:
        return kind.param() > 1.0;
    case LossFamily::eps_insensitive:
    case LossFamily::sq_eps_insensitive:
        return false;
    }
    return false;
}

namespace detail {

inline double parse_double(std::string_view text, std::string_view context)
{
    std::string s(text);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw parse_error("bad number '" + s + "' in " + std::string(context));
    }
    if (used != s.size())
        throw parse_error("bad number '" + s + "' in " + std::string(context));
    return v;
}

inline std::string format_double(double v)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    std::string s(buf, ptr);
    if (s.find_first_of(".eE") == std::string::npos && s.find("inf") == std::string::npos &&
        s.find("nan") == std::string::npos)
        s += ".0";
    return s;
}

} // namespace detail

// Tagged-string form: "squared", "lp:3.0", "huber:0.2", "eps:0.1", "sqeps:0.1".
inline LossKind parse_loss_kind(std::string_view text)
{
    if (text == "squared")
        return LossKind::squared();
    auto colon = text.find(':');
    if (colon == std::string_view::npos)
        throw parse_error("unknown loss '" + std::string(text) + "'");
    auto tag = text.substr(0, colon);
    double v = detail::parse_double(text.substr(colon + 1), text);
    try {
        if (tag == "lp")
            return LossKind::lp(v);
        if (tag == "huber")
            return LossKind::huber(v);
        if (tag == "eps")
            return LossKind::eps_insensitive(v);
        if (tag == "sqeps")
            return LossKind::sq_eps_insensitive(v);
    } catch (const invalid_argument& e) {
        throw parse_error(std::string(e.what()) + " in '" + std::string(text) + "'");
    }
    throw parse_error("unknown loss tag '" + std::string(tag) + "'");
}

inline std::string to_string(const LossKind& kind)
{
    switch (kind.family()) {
    case LossFamily::squared:
        return "squared";
    case LossFamily::lp:
        return "lp:" + detail::format_double(kind.param());
    case LossFamily::huber:
        return "huber:" + detail::format_double(kind.param());
    case LossFamily::eps_insensitive:
        return "eps:" + detail::format_double(kind.param());
    case LossFamily::sq_eps_insensitive:
        return "sqeps:" + detail::format_double(kind.param());
    }
    return {};
}

} // namespace regbound
