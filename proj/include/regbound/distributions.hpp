#pragma once

/**
 * Finite-support conditional label laws and finite joint distributions.
 *
 * A Conditional is the law of Y given X = x, a list of atoms (label, mass)
 * bounded by B. A FiniteDistribution attaches a Conditional and a weight to
 * each of finitely many opaque input ids.
 */

#include "error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace regbound {

// Tolerance for mass/weight normalization.
inline constexpr double normalization_tol = 1e-12;

// Slack used when classifying mu(x) - y against window edges, so an atom
// sitting exactly on the mean is not lost to rounding of the mean.
inline constexpr double window_tol = 1e-12;

struct Atom
{
    double label;
    double mass;
};

class Conditional
{
public:
    /// Validates and canonicalizes: atoms are sorted by label; duplicates,
    /// nonpositive masses, unnormalized masses and labels outside [-B, B]
    /// are rejected.
    Conditional(std::vector<Atom> atoms, double bound) : atoms_(std::move(atoms)), bound_(bound)
    {
        if (!(bound_ > 0.0) || !std::isfinite(bound_))
            throw invalid_argument("conditional bound B must be positive");
        if (atoms_.empty())
            throw invalid_argument("conditional needs at least one atom");
        std::sort(atoms_.begin(), atoms_.end(), [](const Atom& a, const Atom& b) { return a.label < b.label; });
        double total = 0.0;
        for (std::size_t i = 0; i < atoms_.size(); ++i) {
            const Atom& a = atoms_[i];
            if (!std::isfinite(a.label) || !std::isfinite(a.mass))
                throw invalid_argument("conditional atoms must be finite");
            if (!(a.mass > 0.0))
                throw invalid_argument("atom mass must be positive (label " + std::to_string(a.label) + ")");
            if (std::abs(a.label) > bound_)
                throw invalid_argument("atom label " + std::to_string(a.label) + " exceeds bound B = " +
                                       std::to_string(bound_));
            if (i > 0 && atoms_[i - 1].label == a.label)
                throw invalid_argument("duplicate atom label " + std::to_string(a.label));
            total += a.mass;
        }
        if (std::abs(total - 1.0) > normalization_tol)
            throw invalid_argument("atom masses sum to " + std::to_string(total) + ", expected 1");
    }

    const std::vector<Atom>& atoms() const noexcept { return atoms_; }
    double bound() const noexcept { return bound_; }

private:
    std::vector<Atom> atoms_;
    double bound_;
};

struct InputPoint
{
    std::string id;
    double weight;
    Conditional cond;
};

class FiniteDistribution
{
public:
    FiniteDistribution(std::vector<InputPoint> points, double bound) : points_(std::move(points)), bound_(bound)
    {
        if (!(bound_ > 0.0) || !std::isfinite(bound_))
            throw invalid_argument("distribution bound B must be positive");
        if (points_.empty())
            throw invalid_argument("distribution needs at least one input");
        double total = 0.0;
        for (std::size_t i = 0; i < points_.size(); ++i) {
            const auto& p = points_[i];
            if (!(p.weight > 0.0) || !std::isfinite(p.weight))
                throw invalid_argument("input weight must be positive (input '" + p.id + "')");
            if (p.cond.bound() != bound_)
                throw invalid_argument("input '" + p.id + "' has a conditional with a different bound");
            for (std::size_t j = 0; j < i; ++j)
                if (points_[j].id == p.id)
                    throw invalid_argument("duplicate input id '" + p.id + "'");
            total += p.weight;
        }
        if (std::abs(total - 1.0) > normalization_tol)
            throw invalid_argument("input weights sum to " + std::to_string(total) + ", expected 1");
    }

    const std::vector<InputPoint>& points() const noexcept { return points_; }
    double bound() const noexcept { return bound_; }

private:
    std::vector<InputPoint> points_;
    double bound_;
};

inline double conditional_mean(const Conditional& cond)
{
    double mean = 0.0;
    for (const Atom& a : cond.atoms())
        mean += a.mass * a.label;
    return mean;
}

struct SymmetryResult
{
    bool symmetric;
    double center;          // conditional mean, valid when symmetric
    double offending_label; // first atom without a mirror, valid otherwise

    explicit operator bool() const noexcept { return symmetric; }
};

/// Checks mirror symmetry about the conditional mean: every atom (y, m) must
/// have a partner at 2 mu - y (within tol) whose mass is within tol of m.
inline SymmetryResult check_symmetric(const Conditional& cond, double tol = 1e-12)
{
    const double center = conditional_mean(cond);
    const auto& atoms = cond.atoms();
    for (const Atom& a : atoms) {
        const double mirror = 2.0 * center - a.label;
        auto it = std::lower_bound(atoms.begin(), atoms.end(), mirror - tol,
                                   [](const Atom& x, double v) { return x.label < v; });
        bool matched = false;
        for (; it != atoms.end() && it->label <= mirror + tol; ++it) {
            if (std::abs(it->mass - a.mass) <= tol) {
                matched = true;
                break;
            }
        }
        if (!matched)
            return {false, center, a.label};
    }
    return {true, center, 0.0};
}

inline double require_symmetric(const Conditional& cond, double tol = 1e-12)
{
    auto r = check_symmetric(cond, tol);
    if (!r)
        throw not_symmetric(r.offending_label);
    return r.center;
}

struct PminMode
{
    enum class Kind { huber_window, eps_tail };
    Kind kind;
    double width;

    // P(0 <= mu(x) - y <= delta | x)
    static PminMode huber_window(double delta) { return {Kind::huber_window, delta}; }
    // P(mu(x) - y >= eps | x)
    static PminMode eps_tail(double eps) { return {Kind::eps_tail, eps}; }
};

inline double window_mass(const Conditional& cond, PminMode mode)
{
    const double mu = conditional_mean(cond);
    double mass = 0.0;
    for (const Atom& a : cond.atoms()) {
        const double gap = mu - a.label;
        bool inside = false;
        if (mode.kind == PminMode::Kind::huber_window)
            inside = gap >= -window_tol && gap <= mode.width + window_tol;
        else
            inside = gap >= mode.width - window_tol;
        if (inside)
            mass += a.mass;
    }
    return mass;
}

/// Minimum over inputs of the window mass. Zero means the corresponding
/// bound does not apply.
inline double p_min(const FiniteDistribution& dist, PminMode mode)
{
    double lowest = 1.0;
    for (const auto& p : dist.points()) {
        require_symmetric(p.cond);
        lowest = std::min(lowest, window_mass(p.cond, mode));
    }
    return lowest;
}

struct SymmetricGenConfig
{
    int max_inputs = 1;
    int max_atoms = 1;
    double bound = 1.0;
};

/// Random finite distribution whose conditionals are symmetric by
/// construction. A center y0 is drawn from [-B/2, B/2]; offsets a_j from
/// (0, B - |y0|] give equal-mass pairs (y0 - a_j, y0 + a_j); an odd atom
/// count adds an atom at y0. Deterministic in the seed.
inline FiniteDistribution random_symmetric_distribution(std::uint64_t seed, const SymmetricGenConfig& cfg)
{
    if (cfg.max_inputs < 1 || cfg.max_atoms < 1 || !(cfg.bound > 0.0))
        throw invalid_argument("generator limits must be >= 1 and B > 0");

    std::mt19937_64 rng(seed);
    auto uniform = [&rng](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
    auto uniform_int = [&rng](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    const double B = cfg.bound;

    const int n_inputs = uniform_int(1, cfg.max_inputs);
    std::vector<double> input_w(n_inputs);
    for (double& w : input_w)
        w = uniform(0.1, 1.0);
    double input_total = 0.0;
    for (double w : input_w)
        input_total += w;

    std::vector<InputPoint> points;
    points.reserve(n_inputs);
    for (int i = 0; i < n_inputs; ++i) {
        const int n_atoms = uniform_int(1, cfg.max_atoms);
        const int n_pairs = n_atoms / 2;
        const bool center_atom = (n_atoms % 2) == 1;
        const double y0 = uniform(-0.5 * B, 0.5 * B);
        // Shrink the reach by a hair so y0 +/- a never rounds past B.
        const double reach = (B - std::abs(y0)) * (1.0 - 1e-9);

        std::vector<double> offsets;
        while (static_cast<int>(offsets.size()) < n_pairs) {
            double a = reach * (1.0 - uniform(0.0, 1.0)); // (0, reach]
            if (a <= 0.0)
                continue;
            if (std::find(offsets.begin(), offsets.end(), a) != offsets.end())
                continue;
            offsets.push_back(a);
        }

        std::vector<double> raw(n_pairs + (center_atom ? 1 : 0));
        for (double& r : raw)
            r = uniform(0.1, 1.0);
        double total = 0.0;
        for (int j = 0; j < n_pairs; ++j)
            total += 2.0 * raw[j];
        if (center_atom)
            total += raw.back();

        std::vector<Atom> atoms;
        for (int j = 0; j < n_pairs; ++j) {
            const double m = raw[j] / total;
            atoms.push_back({y0 - offsets[j], m});
            atoms.push_back({y0 + offsets[j], m});
        }
        if (center_atom)
            atoms.push_back({y0, raw.back() / total});

        points.push_back({"x" + std::to_string(i), input_w[i] / input_total, Conditional(std::move(atoms), B)});
    }
    return FiniteDistribution(std::move(points), B);
}

} // namespace regbound
