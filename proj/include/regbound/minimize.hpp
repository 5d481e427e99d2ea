#pragma once

#include "error.hpp"

#include <cmath>
#include <utility>

namespace regbound {

struct Minimum1d
{
    double argmin;
    double value;
};

/// Derivative-free minimization of a convex function on [lo, hi].
///
/// Golden-section search down to `interval_tol`, then three ternary passes on
/// the final bracket. Ties are broken towards the left, so on a flat optimal
/// interval the reported argmin sits near its left end. The endpoints are
/// evaluated too, which matters when the minimum is attained at a bound.
template <class F>
Minimum1d minimize_convex_1d(F&& f, double lo, double hi, double interval_tol = 1e-12)
{
    if (!(lo <= hi))
        throw invalid_argument("minimize_convex_1d requires lo <= hi");

    Minimum1d best{lo, f(lo)};
    auto consider = [&](double x, double fx) {
        if (fx < best.value) {
            best.argmin = x;
            best.value = fx;
        }
    };
    consider(hi, f(hi));
    if (hi == lo)
        return best;

    constexpr double inv_phi = 0.6180339887498948482;
    double a = lo;
    double b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    // 200 iterations shrink any bracket below the resolution of a double.
    for (int it = 0; it < 200 && (b - a) > interval_tol; ++it) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    consider(c, fc);
    consider(d, fd);

    for (int pass = 0; pass < 3; ++pass) {
        double m1 = a + (b - a) / 3.0;
        double m2 = b - (b - a) / 3.0;
        double f1 = f(m1);
        double f2 = f(m2);
        consider(m1, f1);
        consider(m2, f2);
        if (f1 <= f2)
            b = m2;
        else
            a = m1;
    }
    double mid = 0.5 * (a + b);
    consider(mid, f(mid));
    return best;
}

} // namespace regbound
