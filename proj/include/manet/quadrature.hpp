#pragma once

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <vector>

namespace manet {

namespace detail {

inline double simpson(double a, double fa, double b, double fb, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

template <typename F>
double adaptive_step(F&& f, double a, double fa, double b, double fb, double m, double fm,
                     double whole, double tol, int depth) {
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = simpson(a, fa, m, fm, flm);
    double right = simpson(m, fm, b, fb, frm);
    double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           adaptive_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive composite Simpson rule with absolute tolerance.
template <typename F>
double adaptive_simpson(F&& f, double a, double b, double abs_tol = 1e-8, int max_depth = 52) {
    if (a == b) return 0.0;
    double fa = f(a), fb = f(b), m = 0.5 * (a + b), fm = f(m);
    double whole = detail::simpson(a, fa, b, fb, fm);
    return detail::adaptive_step(f, a, fa, b, fb, m, fm, whole, abs_tol, max_depth);
}

/// Integrate across a piecewise-smooth function, splitting at interior
/// breakpoints so no panel straddles a kink. Breakpoints outside (a, b)
/// are ignored.
template <typename F>
double integrate_piecewise(F&& f, double a, double b, std::initializer_list<double> breaks,
                           double abs_tol = 1e-8) {
    std::vector<double> cuts{a};
    for (double c : breaks)
        if (c > a && c < b) cuts.push_back(c);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    double total = 0.0;
    double piece_tol = abs_tol / static_cast<double>(cuts.size() - 1);
    for (size_t i = 0; i + 1 < cuts.size(); ++i)
        total += adaptive_simpson(f, cuts[i], cuts[i + 1], piece_tol);
    return total;
}

}  // namespace manet
