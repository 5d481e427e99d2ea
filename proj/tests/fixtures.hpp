// Shared test helpers and independent oracles.
#pragma once

#include <regbound/adversarial.hpp>
#include <regbound/counterexamples.hpp>

#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace fixtures {

// Admissible tuple with regime margin >= 0.06, so the squared regret of h_bar
// (the squared margin) stays above 2.5e-3.
inline regbound::CounterexampleParams random_counterexample_params(regbound::NegativeTheorem th, std::mt19937_64& rng)
{
    auto u = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
    const double margin = 0.06;
    for (;;) {
        const double B = u(0.5, 2.0);
        const double w = u(0.05, 0.6 * B);
        if (!regbound::far_regime(th) && w - margin <= 0.01)
            continue;
        const double gap = regbound::far_regime(th) ? w + u(margin, B) : u(0.01, w - margin);
        if (!(gap > 0.0))
            continue;
        const double y = u(-B, B);
        const double mu = y + gap;
        if (mu > B || 2.0 * mu - y > B || std::abs(y + w) > B)
            continue;
        return {B, y, mu, w};
    }
}

// Plain golden-section search on [lo, hi] for a unimodal f; returns min value.
inline double golden_min(const std::function<double(double)>& f, double lo, double hi, double width = 1e-10)
{
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - r * (b - a), d = a + r * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > width) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    return std::min({fc, fd, f(0.5 * (a + b))});
}

// Minimum of a jointly convex f over the cube [lo, hi]^n by nested golden
// sections: the partial minimum over the trailing coordinates stays convex.
inline double nested_golden_min(const std::function<double(const std::vector<double>&)>& f, std::size_t n, double lo,
                                double hi, double width = 1e-10)
{
    std::vector<double> theta(n, 0.0);
    std::function<double(std::size_t)> level = [&](std::size_t k) -> double {
        if (k == n)
            return f(theta);
        return golden_min(
            [&](double v) {
                theta[k] = v;
                return level(k + 1);
            },
            lo, hi, width);
    };
    return level(0);
}

// Small seeded regression problem with d in {1, 2} and a minimizer well inside [-3, 3]^(d+1).
inline regbound::Dataset small_adv_problem(std::uint64_t seed, std::size_t d, std::size_t m = 20)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> w(d);
    for (double& v : w)
        v = u(rng);
    const double b = 0.5 * u(rng);
    regbound::Dataset data;
    data.d = d;
    for (std::size_t i = 0; i < m; ++i) {
        regbound::Sample s;
        s.features.resize(d);
        double y = b;
        for (std::size_t j = 0; j < d; ++j) {
            s.features[j] = u(rng);
            y += w[j] * s.features[j];
        }
        y += 0.3 * u(rng);
        if (i % 7 == 3)
            y += 1.5 * (u(rng) < 0.0 ? -1.0 : 1.0);
        s.label = y;
        data.rows.push_back(s);
    }
    return data;
}

// Oracle minimum of the training objective over (w, b) in [-3, 3]^(d+1).
inline double oracle_objective_min(const regbound::TrainObjective& obj, const regbound::Dataset& data)
{
    const std::size_t d = data.d;
    return nested_golden_min(
        [&](const std::vector<double>& theta) {
            regbound::LinearModel m{{theta.begin(), theta.begin() + static_cast<std::ptrdiff_t>(d)}, theta[d]};
            return regbound::empirical_objective(obj, m, data);
        },
        d + 1, -3.0, 3.0);
}

// Max of (h(x + s) - y)^2 over the 2^d sign corners s of the LInf ball of radius gamma.
inline double corner_brute_force(const regbound::LinearModel& model, const std::vector<double>& x, double y,
                                 double gamma)
{
    const std::size_t d = x.size();
    double best = 0.0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << d); ++mask) {
        std::vector<double> xp = x;
        for (std::size_t j = 0; j < d; ++j)
            xp[j] += (mask >> j & 1U) ? gamma : -gamma;
        const double r = model.predict(xp) - y;
        best = std::max(best, r * r);
    }
    return best;
}

} // namespace fixtures
