// Small numerical utilities shared by the library internals: Gauss-Legendre
// rules, adaptive Simpson quadrature, Brent root bracketing and compensated
// summation.  Everything here is deterministic.
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace nhflow::num {

// Gauss-Legendre nodes/weights on [-1,1].  Nodes come out mirror-symmetric
// about 0 (the negative half is copied from the positive half) so that
// symmetric integrands cancel exactly.
void gauss_legendre(int npts, std::vector<double>& x, std::vector<double>& w);

namespace detail {
template <class F>
double simpson_rec(const F& f, double a, double fa, double b, double fb, double m, double fm,
                   double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}
}  // namespace detail

// Adaptive Simpson on [a,b] with an absolute tolerance.
template <class F>
double adaptive_simpson(const F& f, double a, double b, double abs_tol, int max_depth = 48) {
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fm = f(m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::simpson_rec(f, a, fa, b, fb, m, fm, whole, abs_tol, max_depth);
}

// Brent-Dekker root finder.  Requires f(a) and f(b) of opposite sign.
template <class F>
double brent(const F& f, double a, double b, double xtol, int max_iter = 200) {
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0.0) == (fb > 0.0)) throw std::invalid_argument("brent: root not bracketed");
    double c = a, fc = fa, d = b - a, e = d;
    for (int it = 0; it < max_iter; ++it) {
        if ((fb > 0.0) == (fc > 0.0)) { c = a; fc = fa; d = e = b - a; }
        if (std::abs(fc) < std::abs(fb)) { a = b; b = c; c = a; fa = fb; fb = fc; fc = fa; }
        const double tol1 = 2.0 * 1e-16 * std::abs(b) + 0.5 * xtol;
        const double xm = 0.5 * (c - b);
        if (std::abs(xm) <= tol1 || fb == 0.0) return b;
        if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
            double p, q, r;
            const double s = fb / fa;
            if (a == c) { p = 2.0 * xm * s; q = 1.0 - s; }
            else {
                q = fa / fc; r = fb / fc;
                p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
                q = (q - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::abs(p);
            if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
                e = d; d = p / q;
            } else { d = xm; e = d; }
        } else { d = xm; e = d; }
        a = b; fa = fb;
        b += (std::abs(d) > tol1) ? d : (xm > 0.0 ? tol1 : -tol1);
        fb = f(b);
    }
    return b;
}

// Compensated (Kahan) accumulator; keeps long dt sums accurate to ~1 ulp.
struct KahanSum {
    double sum = 0.0;
    double comp = 0.0;
    void add(double x) {
        const double y = x - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    double value() const { return sum; }
};

}  // namespace nhflow::num
