#include "nhflow/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "nhflow/flow.hpp"

namespace nhflow {

void SymmetricTensor3::symmetrize() {
    for (int i = 0; i < n_; ++i)
        for (int j = i; j < n_; ++j)
            for (int k = j; k < n_; ++k) {
                const double avg = (at(i, j, k) + at(i, k, j) + at(j, i, k) + at(j, k, i) +
                                    at(k, i, j) + at(k, j, i)) / 6.0;
                at(i, j, k) = at(i, k, j) = at(j, i, k) = at(j, k, i) = at(k, i, j) =
                    at(k, j, i) = avg;
            }
}

std::vector<double> SymmetricTensor3::trace_vector() const {
    std::vector<double> tr(n_, 0.0);
    for (int i = 0; i < n_; ++i)
        for (int k = 0; k < n_; ++k) tr[i] += at(i, k, k);
    return tr;
}

double SymmetricTensor3::norm2() const {
    double s = 0.0;
    for (double v : a_) s += v * v;
    return s;
}

namespace {

// Oracle-local extended-precision evaluation of the builtin speeds.  Kept
// separate from the library formulas on purpose: the finite-difference checks
// must not share a code path with what they verify.
long double speed_value_ld(const SpeedFunction& f, const std::vector<long double>& k) {
    const int n = static_cast<int>(k.size());
    switch (f.kind()) {
        case SpeedFunction::Kind::ArithmeticMean: {
            long double s = 0.0L;
            for (long double v : k) s += v;
            return s / n;
        }
        case SpeedFunction::Kind::GeometricMean: {
            long double s = 0.0L;
            for (long double v : k) s += std::log(v);
            return std::exp(s / n);
        }
        case SpeedFunction::Kind::Rms: {
            long double s = 0.0L;
            for (long double v : k) s += v * v;
            return std::sqrt(s / n);
        }
        case SpeedFunction::Kind::HarmonicMean: {
            long double s = 0.0L;
            for (long double v : k) s += 1.0L / v;
            return n / s;
        }
        case SpeedFunction::Kind::PowerMean: {
            const long double p = f.power();
            long double s = 0.0L;
            for (long double v : k) s += std::pow(v, p);
            return std::pow(s / n, 1.0L / p);
        }
    }
    return 0.0L;
}

std::vector<long double> to_ld(const std::vector<double>& v) {
    return std::vector<long double>(v.begin(), v.end());
}

}  // namespace

double fd_check_gradient(const SpeedFunction& f, const PrincipalCurvatures& kappa, double h_step) {
    const int n = kappa.dim();
    if (!(kappa.min() > 2.0 * h_step))
        throw std::domain_error("fd_check_gradient: step too large for this curvature vector");
    const std::vector<long double> k0 = to_ld(kappa.values());
    const std::vector<double> grad = f.gradient(kappa);
    const double f0 = f.value(kappa);
    const double scale = f0 / kappa.min();
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        std::vector<long double> kp = k0, km = k0;
        kp[i] += h_step;
        km[i] -= h_step;
        const long double fd = (speed_value_ld(f, kp) - speed_value_ld(f, km)) / (2.0L * h_step);
        const double err = std::abs(static_cast<double>(fd) - grad[i]) /
                           std::max(std::abs(grad[i]), scale);
        worst = std::max(worst, err);
    }
    return worst;
}

double fd_check_hessian(const SpeedFunction& f, const PrincipalCurvatures& kappa, double h_step) {
    const int n = kappa.dim();
    if (!(kappa.min() > 2.0 * h_step))
        throw std::domain_error("fd_check_hessian: step too large for this curvature vector");
    const std::vector<long double> k0 = to_ld(kappa.values());
    const SymMat hess = f.hessian(kappa);
    const double scale = f.value(kappa) / (kappa.min() * kappa.min());
    const long double h = h_step;
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            long double fd;
            if (i == j) {
                std::vector<long double> kp = k0, km = k0;
                kp[i] += h;
                km[i] -= h;
                fd = (speed_value_ld(f, kp) - 2.0L * speed_value_ld(f, k0) +
                      speed_value_ld(f, km)) / (h * h);
            } else {
                std::vector<long double> kpp = k0, kpm = k0, kmp = k0, kmm = k0;
                kpp[i] += h; kpp[j] += h;
                kpm[i] += h; kpm[j] -= h;
                kmp[i] -= h; kmp[j] += h;
                kmm[i] -= h; kmm[j] -= h;
                fd = (speed_value_ld(f, kpp) - speed_value_ld(f, kpm) - speed_value_ld(f, kmp) +
                      speed_value_ld(f, kmm)) / (4.0L * h * h);
            }
            const double err = std::abs(static_cast<double>(fd) - hess(i, j)) /
                               std::max(std::abs(hess(i, j)), scale);
            worst = std::max(worst, err);
        }
    }
    return worst;
}

namespace {

// Cyclic Jacobi eigenvalues of a symmetric matrix, extended precision.
std::vector<long double> jacobi_eigenvalues(std::vector<long double> a, int n) {
    auto idx = [n](int i, int j) { return static_cast<size_t>(i) * n + j; };
    for (int sweep = 0; sweep < 100; ++sweep) {
        long double off = 0.0L;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += a[idx(i, j)] * a[idx(i, j)];
        if (off < 1e-36L) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const long double apq = a[idx(p, q)];
                if (std::abs(apq) < 1e-40L) continue;
                const long double theta = (a[idx(q, q)] - a[idx(p, p)]) / (2.0L * apq);
                const long double t = (theta >= 0.0L ? 1.0L : -1.0L) /
                                      (std::abs(theta) + std::sqrt(theta * theta + 1.0L));
                const long double c = 1.0L / std::sqrt(t * t + 1.0L);
                const long double s = t * c;
                for (int r = 0; r < n; ++r) {
                    const long double arp = a[idx(r, p)], arq = a[idx(r, q)];
                    a[idx(r, p)] = c * arp - s * arq;
                    a[idx(r, q)] = s * arp + c * arq;
                }
                for (int r = 0; r < n; ++r) {
                    const long double apr = a[idx(p, r)], aqr = a[idx(q, r)];
                    a[idx(p, r)] = c * apr - s * aqr;
                    a[idx(q, r)] = s * apr + c * aqr;
                }
            }
        }
    }
    std::vector<long double> eig(n);
    for (int i = 0; i < n; ++i) eig[i] = a[idx(i, i)];
    return eig;
}

}  // namespace

double eigenvalue_perturbation_form(const SpeedFunction& f, const PrincipalCurvatures& kappa,
                                    const SymMat& B, double h_step) {
    const int n = kappa.dim();
    auto value_at = [&](long double s) {
        std::vector<long double> a(static_cast<size_t>(n) * n, 0.0L);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                a[static_cast<size_t>(i) * n + j] = s * B(i, j);
                if (i == j) a[static_cast<size_t>(i) * n + j] += kappa[i];
            }
        return speed_value_ld(f, jacobi_eigenvalues(std::move(a), n));
    };
    const long double h = h_step;
    return static_cast<double>((value_at(h) - 2.0L * value_at(0.0L) + value_at(-h)) / (h * h));
}

namespace {

// Log-uniform curvature vector with ratio bound r; any draw obeys
// kappa_min >= H / (1 + (n-1) r).
std::vector<double> draw_kappa(std::mt19937_64& rng, int n, double ratio_bound) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double lr = std::log(ratio_bound);
    const double scale = std::exp(2.0 * unif(rng) - 1.0);
    std::vector<double> k(n);
    for (int i = 0; i < n; ++i) k[i] = scale * std::exp(unif(rng) * lr);
    return k;
}

}  // namespace

SuiteReport identity_suite_37(int samples, int n, double eps_pinch, std::uint64_t seed) {
    SuiteReport rep;
    rep.name = "identity_suite_37";
    rep.samples = samples;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    // ratio bound that enforces kappa_min >= eps_pinch * H for every draw
    if (!(eps_pinch > 0.0 && eps_pinch < 1.0 / n))
        throw std::invalid_argument("identity_suite_37: pinching must lie in (0, 1/n)");
    const double ratio_bound = (1.0 / eps_pinch - 1.0) / (n - 1.0);

    for (int s = 0; s < samples; ++s) {
        const std::vector<double> k = draw_kappa(rng, n, ratio_bound);
        const PrincipalCurvatures kappa(k);
        const ShapeInvariants inv = shape_invariants(kappa);

        // cubic identities in two algebraic routes
        double rhs1 = 0.0, rhs2 = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                const double d2 = (k[i] - k[j]) * (k[i] - k[j]);
                rhs1 += k[i] * k[j] * d2;
                rhs2 += (k[i] + k[j]) * d2;  // half of the unordered double sum
            }
        const double lhs1 = inv.H * inv.C - inv.normA2 * inv.normA2;
        const double lhs2 = n * inv.C - inv.H * inv.normA2;
        const double scale1 = std::max(std::abs(lhs1), inv.H * inv.C);
        const double scale2 = std::max(std::abs(lhs2), n * inv.C);
        const double res = std::max(std::abs(lhs1 - rhs1) / scale1, std::abs(lhs2 - rhs2) / scale2);
        rep.worst_residual = std::max(rep.worst_residual, res);
        if (res > 1e-12) ++rep.violations;

        // lower bounds under the pinching hypothesis
        const double e = eps_pinch;
        const double m1 = rhs1 - n * e * e * inv.H * inv.H * inv.normA02;
        const double m2 = rhs2 - 2.0 * n * e * inv.H * inv.normA02;
        rep.worst_margin = std::min({rep.worst_margin, m1, m2});
        if (m1 < 0.0 || m2 < 0.0) ++rep.violations;

        // gradient comparison |H T - h (tr T)|^2 >= (n-1)/2 e^2 H^2 |T|^2
        SymmetricTensor3 T(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int kk = 0; kk < n; ++kk) T.at(i, j, kk) = gauss(rng);
        T.symmetrize();
        const std::vector<double> tr = T.trace_vector();
        double lhs3 = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int kk = 0; kk < n; ++kk) {
                    double v = inv.H * T.at(i, j, kk);
                    if (j == kk) v -= k[j] * tr[i];
                    lhs3 += v * v;
                }
        const double m3 = lhs3 - 0.5 * (n - 1) * e * e * inv.H * inv.H * T.norm2();
        rep.worst_margin = std::min(rep.worst_margin, m3);
        if (m3 < 0.0) ++rep.violations;
    }
    rep.pass = rep.violations == 0;
    return rep;
}

SuiteReport gradient_inequality_suite(int samples, int n, std::uint64_t seed) {
    SuiteReport rep;
    rep.name = "gradient_inequality_suite";
    rep.samples = samples;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    double worst_ratio2 = std::numeric_limits<double>::infinity();

    for (int s = 0; s < samples; ++s) {
        SymmetricTensor3 T(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) T.at(i, j, k) = gauss(rng);
        T.symmetrize();
        const std::vector<double> tr = T.trace_vector();
        double tr2 = 0.0;
        for (double v : tr) tr2 += v * v;
        const double margin = T.norm2() - 3.0 / (n + 2.0) * tr2;
        rep.worst_margin = std::min(rep.worst_margin, margin / std::max(T.norm2(), 1e-300));
        if (margin < -1e-12 * T.norm2()) ++rep.violations;

        // trace-free surrogate: subtract the symmetrized delta x trace part
        SymmetricTensor3 T0 = T;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    double corr = 0.0;
                    if (j == k) corr += tr[i];
                    if (i == k) corr += tr[j];
                    if (i == j) corr += tr[k];
                    T0.at(i, j, k) -= corr / (3.0 * n);
                }
        const double lhs = T0.norm2();
        const double rhs = 2.0 * (n - 1.0) / (3.0 * n) * T.norm2();
        if (lhs < rhs) ++rep.reported_only_failures;
        worst_ratio2 = std::min(worst_ratio2, lhs / std::max(T.norm2(), 1e-300));
    }
    rep.notes.push_back("trace-free comparison smallest ratio |T0|^2/|T|^2 = " +
                        std::to_string(worst_ratio2) + " vs bound " +
                        std::to_string(2.0 * (n - 1.0) / (3.0 * n)) + " (reported only)");
    rep.pass = rep.violations == 0;
    return rep;
}

SuiteReport tight_pinch_suite(int samples, int n, std::uint64_t seed) {
    SuiteReport rep;
    rep.name = "tight_pinch_suite";
    rep.samples = samples;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double eps_cap = 1.0 / (n * (n - 1.0));

    for (int s = 0; s < samples; ++s) {
        // trace-free direction scaled to land exactly on |A0|^2 = eps H^2
        const double c = std::exp(2.0 * unif(rng) - 1.0);
        const double eps = unif(rng) * 0.98 * eps_cap + 1e-6;
        std::vector<double> v(n);
        double mean = 0.0;
        for (int i = 0; i < n; ++i) mean += (v[i] = gauss(rng));
        mean /= n;
        double vn2 = 0.0;
        for (int i = 0; i < n; ++i) {
            v[i] -= mean;
            vn2 += v[i] * v[i];
        }
        if (vn2 < 1e-12) continue;
        const double H = n * c;
        const double scale = std::sqrt(eps * H * H / vn2);
        std::vector<double> k(n);
        for (int i = 0; i < n; ++i) k[i] = c + scale * v[i];

        const double root = std::sqrt(n * (n - 1.0) * eps);
        const double lo = (1.0 - root) * H / n;
        const double hi = (1.0 + root) * H / n;
        double kmin = k[0], kmax = k[0];
        double A2 = 0.0, C3 = 0.0;
        for (double kv : k) {
            kmin = std::min(kmin, kv);
            kmax = std::max(kmax, kv);
            A2 += kv * kv;
            C3 += kv * kv * kv;
        }
        const double slack = 1e-12 * H;
        if (!(kmin > 0.0) || kmin < lo - slack || kmax > hi + slack) ++rep.violations;
        // cubic-moment lower bound
        const double m = n * C3 - (1.0 + n * eps) * H * A2 -
                         eps * (1.0 + n * eps) * (1.0 - root) * H * H * H;
        rep.worst_margin = std::min(rep.worst_margin, m / (H * H * H));
        if (m < -1e-12 * H * H * H) ++rep.violations;
        // equivalent pointwise pinching
        const double eps_equiv = (1.0 - root) / n;
        if (kmin < eps_equiv * H - slack) ++rep.violations;
    }
    rep.pass = rep.violations == 0;
    return rep;
}

MuEstimate estimate_mu(const SpeedFunction& f, int n, double sigma0, int samples,
                       std::uint64_t seed) {
    if (!(sigma0 > 0.0 && sigma0 < 1.0 / (n * (n - 1.0))))
        throw std::invalid_argument("estimate_mu: sigma0 outside (0, 1/(n(n-1)))");
    MuEstimate est;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    // nested sigma levels: every level's samples are reused for larger sigma0
    const int levels = 8;
    for (int lev = 1; lev <= levels; ++lev) {
        const double sig = sigma0 * lev / levels;
        for (int s = 0; s < samples / levels + 1; ++s) {
            const double c = std::exp(2.0 * unif(rng) - 1.0);
            std::vector<double> v(n);
            double mean = 0.0;
            for (int i = 0; i < n; ++i) mean += (v[i] = gauss(rng));
            mean /= n;
            double vn2 = 0.0;
            for (int i = 0; i < n; ++i) {
                v[i] -= mean;
                vn2 += v[i] * v[i];
            }
            if (vn2 < 1e-12) continue;
            const double frac = 0.05 + 0.95 * unif(rng);
            const double H = n * c;
            const double A0 = std::sqrt(frac * sig) * H;
            const double scale = A0 / std::sqrt(vn2);
            std::vector<double> k(n);
            for (int i = 0; i < n; ++i) k[i] = c + scale * v[i];
            PrincipalCurvatures kappa(k);

            const double fv = f.value(kappa);
            const auto g = f.gradient(kappa);
            est.mu_value = std::max(est.mu_value, 2.0 * std::abs(n * fv - H) * H / (A0 * A0));
            for (int i = 0; i < n; ++i)
                est.mu_gradient = std::max(est.mu_gradient, std::abs(n * g[i] - 1.0) * H / A0);

            // bilinear second derivative through polarization of the quadratic form
            SymMat P(n), Q(n);
            for (int i = 0; i < n; ++i)
                for (int j = i; j < n; ++j) {
                    P(i, j) = P(j, i) = gauss(rng);
                    Q(i, j) = Q(j, i) = gauss(rng);
                }
            const double np = P.frobenius(), nq = Q.frobenius();
            if (np == 0.0 || nq == 0.0) continue;
            for (double& x : P.a) x /= np;
            for (double& x : Q.a) x /= nq;
            SymMat Sp(n), Sm(n);
            for (size_t idx = 0; idx < P.a.size(); ++idx) {
                Sp.a[idx] = P.a[idx] + Q.a[idx];
                Sm.a[idx] = P.a[idx] - Q.a[idx];
            }
            const double qp = f.second_derivative_form(kappa, Sp);
            const double qm = f.second_derivative_form(kappa, Sm);
            const double bilinear = n * (qp - qm) / 4.0;  // rescaled speed n f
            est.mu_second_derivative =
                std::max(est.mu_second_derivative, std::abs(bilinear) * H);
        }
    }
    est.combined = std::max({est.mu_second_derivative, est.mu_gradient, est.mu_value});
    return est;
}

double chainrule_consistency(const SupportProfile& before, const SupportProfile& after, double dt,
                             const SpeedFunction& f, const PhiProfile& phi) {
    if (!(dt > 0.0)) throw std::invalid_argument("chainrule_consistency: dt must be positive");
    const CosineBasis& b = before.basis();
    const CurvatureField f0 = radii(before);
    const CurvatureField f1 = radii(after);

    const std::vector<double> w = flow_rhs(before, f, phi);
    const std::vector<double> wc = b.project(w);
    std::vector<double> w_dd;
    b.nodes_from_coeffs(wc, b.eval_d2, w_dd);
    std::vector<double> w_nodes;
    b.nodes_from_coeffs(wc, b.eval, w_nodes);

    double worst = 0.0;
    for (int j = 0; j <= b.N; ++j) {
        const double lhs = (f1.r1[j] - f0.r1[j]) / dt;
        const double rhs = w_dd[j] + w_nodes[j];
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

}  // namespace nhflow
