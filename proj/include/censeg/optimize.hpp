#ifndef CENSEG_OPTIMIZE_HPP
#define CENSEG_OPTIMIZE_HPP

#include <cmath>
#include <cstddef>
#include <string>

#include "censeg/error.hpp"

namespace censeg {

struct ScalarMin {
    double x = 0.0;
    double f = 0.0;
    bool converged = false;
};

// Brent's bounded derivative-free minimizer on [lo, hi].
template <class F>
ScalarMin minimize_brent(F&& f, double lo, double hi, double tol = 1e-10, int max_iter = 200) {
    constexpr double golden = 0.3819660112501051;
    constexpr double eps = 1e-14;
    double a = lo, b = hi;
    double x = a + golden * (b - a);
    double w = x, v = x;
    double fx = f(x), fw = fx, fv = fx;
    double d = 0.0, e = 0.0;
    for (int iter = 0; iter < max_iter; ++iter) {
        const double m = 0.5 * (a + b);
        const double tol1 = tol + eps * std::fabs(x);
        const double tol2 = 2.0 * tol1;
        if (std::fabs(x - m) <= tol2 - 0.5 * (b - a)) return {x, fx, true};
        bool parabolic = false;
        if (std::fabs(e) > tol1) {
            // trial parabolic fit through (v,fv), (w,fw), (x,fx)
            const double r = (x - w) * (fx - fv);
            double q = (x - v) * (fx - fw);
            double p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if (q > 0.0) p = -p;
            q = std::fabs(q);
            const double e_old = e;
            e = d;
            if (std::fabs(p) < std::fabs(0.5 * q * e_old) && p > q * (a - x) && p < q * (b - x)) {
                d = p / q;
                const double u = x + d;
                if (u - a < tol2 || b - u < tol2) d = (x < m) ? tol1 : -tol1;
                parabolic = true;
            }
        }
        if (!parabolic) {
            e = (x < m) ? b - x : a - x;
            d = golden * e;
        }
        const double u = (std::fabs(d) >= tol1) ? x + d : x + (d > 0.0 ? tol1 : -tol1);
        const double fu = f(u);
        if (fu <= fx) {
            if (u < x) b = x; else a = x;
            v = w; fv = fw;
            w = x; fw = fx;
            x = u; fx = fu;
        } else {
            if (u < x) a = u; else b = u;
            if (fu <= fw || w == x) {
                v = w; fv = fw;
                w = u; fw = fu;
            } else if (fu <= fv || v == x || v == w) {
                v = u; fv = fu;
            }
        }
    }
    return {x, fx, false};
}

// Coarse scan over n_grid points, then Brent inside the bracket around the best point.
// Endpoints are included, so boundary minima are found.
template <class F>
ScalarMin minimize_bracketed(F&& f, double lo, double hi, std::size_t n_grid = 33, double tol = 1e-10) {
    if (!(lo < hi)) return {lo, f(lo), true};
    std::size_t best = 0;
    double best_f = f(lo);
    for (std::size_t i = 1; i < n_grid; ++i) {
        const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n_grid - 1);
        const double fx = f(x);
        if (fx < best_f) { best_f = fx; best = i; }
    }
    const auto at = [&](std::size_t i) {
        return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n_grid - 1);
    };
    const double a = at(best == 0 ? 0 : best - 1);
    const double b = at(best + 1 >= n_grid ? n_grid - 1 : best + 1);
    ScalarMin r = minimize_brent(f, a, b, tol);
    if (!r.converged)
        fail(errc::numeric, "scalar minimizer did not converge (best iterate x=" +
                                std::to_string(r.x) + ", f=" + std::to_string(r.f) + ")");
    if (best_f < r.f) return {at(best), best_f, true};
    return r;
}

}  // namespace censeg

#endif
