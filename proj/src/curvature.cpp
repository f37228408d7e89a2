#include "nhflow/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace nhflow {

PrincipalCurvatures::PrincipalCurvatures(std::vector<double> values) : values_(std::move(values)) {
    if (values_.size() < 2) throw std::domain_error("principal curvatures: need dimension >= 2");
    for (double k : values_) {
        if (!(k > 0.0) || !std::isfinite(k))
            throw std::domain_error("principal curvatures: entries must be positive and finite");
    }
}

double PrincipalCurvatures::min() const { return *std::min_element(values_.begin(), values_.end()); }
double PrincipalCurvatures::max() const { return *std::max_element(values_.begin(), values_.end()); }

ShapeInvariants shape_invariants(const PrincipalCurvatures& kappa) {
    const auto& k = kappa.values();
    const int n = kappa.dim();
    ShapeInvariants s{};
    s.H = 0.0; s.normA2 = 0.0; s.C = 0.0; s.K = 1.0;
    for (double v : k) {
        s.H += v;
        s.normA2 += v * v;
        s.C += v * v * v;
        s.K *= v;
    }
    double diff2 = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) diff2 += (k[i] - k[j]) * (k[i] - k[j]);
    s.normA02 = diff2 / n;
    s.pinch_ratio = kappa.max() / kappa.min();
    return s;
}

double SymMat::frobenius() const {
    double t = 0.0;
    for (double v : a) t += v * v;
    return std::sqrt(t);
}

std::string to_string(ConcavityClass c) {
    switch (c) {
        case ConcavityClass::Convex: return "convex";
        case ConcavityClass::Concave: return "concave";
        case ConcavityClass::Neither: return "neither";
        case ConcavityClass::Linear: return "linear";
    }
    return "?";
}

SpeedFunction SpeedFunction::arithmetic_mean() { return {Kind::ArithmeticMean, 1.0}; }
SpeedFunction SpeedFunction::geometric_mean() { return {Kind::GeometricMean, 0.0}; }
SpeedFunction SpeedFunction::rms() { return {Kind::Rms, 2.0}; }
SpeedFunction SpeedFunction::harmonic_mean() { return {Kind::HarmonicMean, -1.0}; }
SpeedFunction SpeedFunction::power_mean(double p) {
    if (std::abs(p) < 1e-12) return geometric_mean();
    return {Kind::PowerMean, p};
}

std::string SpeedFunction::name() const {
    switch (kind_) {
        case Kind::ArithmeticMean: return "arithmetic_mean";
        case Kind::GeometricMean: return "geometric_mean";
        case Kind::Rms: return "rms";
        case Kind::HarmonicMean: return "harmonic_mean";
        case Kind::PowerMean: return "power_mean(" + std::to_string(p_) + ")";
    }
    return "?";
}

namespace {
inline double pow_signed(double x, double p) {
    if (p == 1.0) return x;
    if (p == 2.0) return x * x;
    if (p == 3.0) return x * x * x;
    if (p == -1.0) return 1.0 / x;
    if (p == -2.0) return 1.0 / (x * x);
    return std::pow(x, p);
}
}  // namespace

double SpeedFunction::value(const PrincipalCurvatures& kappa) const {
    const auto& k = kappa.values();
    const int n = kappa.dim();
    if (kind_ == Kind::GeometricMean) {
        double s = 0.0;
        for (double v : k) s += std::log(v);
        return std::exp(s / n);
    }
    if (p_ == 1.0) {
        double s = 0.0;
        for (double v : k) s += v;
        return s / n;
    }
    double s = 0.0;
    for (double v : k) s += pow_signed(v, p_);
    return std::pow(s / n, 1.0 / p_);
}

std::vector<double> SpeedFunction::gradient(const PrincipalCurvatures& kappa) const {
    const auto& k = kappa.values();
    const int n = kappa.dim();
    std::vector<double> g(n);
    if (kind_ == Kind::GeometricMean) {
        const double f = value(kappa);
        for (int i = 0; i < n; ++i) g[i] = f / (n * k[i]);
        return g;
    }
    if (p_ == 1.0) {
        std::fill(g.begin(), g.end(), 1.0 / n);
        return g;
    }
    const double m = value(kappa);
    const double m1p = pow_signed(m, 1.0 - p_);
    for (int i = 0; i < n; ++i) g[i] = pow_signed(k[i], p_ - 1.0) * m1p / n;
    return g;
}

SymMat SpeedFunction::hessian(const PrincipalCurvatures& kappa) const {
    const auto& k = kappa.values();
    const int n = kappa.dim();
    SymMat h(n);
    if (kind_ == Kind::GeometricMean) {
        const double f = value(kappa);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                h(i, j) = f / (static_cast<double>(n) * n * k[i] * k[j]);
                if (i == j) h(i, j) -= f / (n * k[i] * k[i]);
            }
        }
        return h;
    }
    if (p_ == 1.0) return h;  // linear: identically zero
    const double m = value(kappa);
    const double m1p = pow_signed(m, 1.0 - p_);
    const double m12p = pow_signed(m, 1.0 - 2.0 * p_);
    for (int i = 0; i < n; ++i) {
        const double ki_pm1 = pow_signed(k[i], p_ - 1.0);
        for (int j = 0; j < n; ++j) {
            const double kj_pm1 = pow_signed(k[j], p_ - 1.0);
            double v = -ki_pm1 * kj_pm1 * m12p / (static_cast<double>(n) * n);
            if (i == j) v += pow_signed(k[i], p_ - 2.0) * m1p / n;
            h(i, j) = (p_ - 1.0) * v;
        }
    }
    return h;
}

double SpeedFunction::second_derivative_form(const PrincipalCurvatures& kappa, const SymMat& B,
                                             bool* near_tie) const {
    const auto& k = kappa.values();
    const int n = kappa.dim();
    if (B.n != n) throw std::invalid_argument("second_derivative_form: dimension mismatch");
    const SymMat h = hessian(kappa);
    const std::vector<double> g = gradient(kappa);
    const double tie_tol = 1e-7 * kappa.max();
    if (near_tie) *near_tie = false;

    double q = 0.0;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) q += h(a, b) * B(a, a) * B(b, b);
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            double w;
            if (std::abs(k[a] - k[b]) < tie_tol) {
                // analytic limit of the difference quotient at equal curvatures
                w = h(a, a) - h(a, b);
                if (near_tie) *near_tie = true;
            } else {
                w = (g[a] - g[b]) / (k[a] - k[b]);
            }
            q += 2.0 * w * B(a, b) * B(a, b);
        }
    }
    return q;
}

double SpeedFunction::dual_value(const std::vector<double>& radii) const {
    std::vector<double> inv(radii.size());
    for (size_t i = 0; i < radii.size(); ++i) {
        if (!(radii[i] > 0.0)) throw std::domain_error("dual speed: radii must be positive");
        inv[i] = 1.0 / radii[i];
    }
    return 1.0 / value(PrincipalCurvatures(std::move(inv)));
}

SpeedFunction SpeedFunction::dual() const {
    if (kind_ == Kind::GeometricMean) return geometric_mean();
    return power_mean(-p_);
}

double SpeedFunction::value_axisym(double k_ax, double k_rot, int n) const {
    if (kind_ == Kind::GeometricMean)
        return std::exp((std::log(k_ax) + (n - 1) * std::log(k_rot)) / n);
    if (p_ == 1.0) return (k_ax + (n - 1) * k_rot) / n;
    const double s = pow_signed(k_ax, p_) + (n - 1) * pow_signed(k_rot, p_);
    return std::pow(s / n, 1.0 / p_);
}

void SpeedFunction::gradient_axisym(double k_ax, double k_rot, int n, double& df_ax,
                                    double& df_rot) const {
    if (kind_ == Kind::GeometricMean) {
        const double f = value_axisym(k_ax, k_rot, n);
        df_ax = f / (n * k_ax);
        df_rot = f / (n * k_rot);
        return;
    }
    if (p_ == 1.0) {
        df_ax = df_rot = 1.0 / n;
        return;
    }
    const double m = value_axisym(k_ax, k_rot, n);
    const double m1p = pow_signed(m, 1.0 - p_);
    df_ax = pow_signed(k_ax, p_ - 1.0) * m1p / n;
    df_rot = pow_signed(k_rot, p_ - 1.0) * m1p / n;
}

namespace {

ConcavityClass classify_forms(double qmin, double qmax, double tol) {
    const bool has_neg = qmin < -tol;
    const bool has_pos = qmax > tol;
    if (!has_neg && !has_pos) return ConcavityClass::Linear;
    if (has_neg && has_pos) return ConcavityClass::Neither;
    return has_neg ? ConcavityClass::Concave : ConcavityClass::Convex;
}

// Sampled Hessian quadratic forms for a speed, scaled by 1/f; returns extremes.
void sample_forms(const SpeedFunction& f, int n, int samples, double ratio_bound,
                  std::mt19937_64& rng, double& qmin, double& qmax) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    qmin = 0.0;
    qmax = 0.0;
    for (int s = 0; s < samples; ++s) {
        const double lr = std::log(ratio_bound);
        std::vector<double> k(n);
        const double scale = std::exp(2.0 * unif(rng) - 1.0);
        for (int i = 0; i < n; ++i) k[i] = scale * std::exp(unif(rng) * lr);
        PrincipalCurvatures kappa(k);
        SymMat B(n);
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) B(i, j) = B(j, i) = gauss(rng);
        const double nb = B.frobenius();
        if (nb == 0.0) continue;
        for (double& v : B.a) v /= nb;
        const double q = f.second_derivative_form(kappa, B) / f.value(kappa);
        qmin = std::min(qmin, q);
        qmax = std::max(qmax, q);
    }
}

}  // namespace

FConditionReport condition_report_f(const SpeedFunction& f, int n, int samples, double ratio_bound,
                                    std::uint64_t seed) {
    if (samples < 1 || ratio_bound < 1.0)
        throw std::invalid_argument("condition_report_f: need samples >= 1, ratio_bound >= 1");
    FConditionReport rep;
    rep.sample_count = samples;
    rep.cone_ratio_bound = ratio_bound;
    rep.seed = seed;

    rep.normalization_ok =
        std::abs(f.value(PrincipalCurvatures(std::vector<double>(n, 1.0))) - 1.0) <= 1e-12;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double lr = std::log(ratio_bound);

    rep.monotone_ok = true;
    rep.homogeneity_residual = 0.0;
    for (int s = 0; s < samples; ++s) {
        std::vector<double> k(n);
        const double scale = std::exp(2.0 * unif(rng) - 1.0);
        for (int i = 0; i < n; ++i) k[i] = scale * std::exp(unif(rng) * lr);
        PrincipalCurvatures kappa(k);
        const double fv = f.value(kappa);
        const auto g = f.gradient(kappa);
        double euler = 0.0;
        for (int i = 0; i < n; ++i) {
            if (!(g[i] > 0.0)) rep.monotone_ok = false;
            euler += g[i] * k[i];
        }
        rep.homogeneity_residual = std::max(rep.homogeneity_residual, std::abs(euler - fv) / fv);
    }

    const double class_tol = 1e-10;
    sample_forms(f, n, samples, ratio_bound, rng, rep.min_quadratic_form, rep.max_quadratic_form);
    rep.concavity_class = classify_forms(rep.min_quadratic_form, rep.max_quadratic_form, class_tol);

    // Inverse concavity: the dual speed (again a builtin) must be concave or linear.
    {
        double dmin = 0.0, dmax = 0.0;
        sample_forms(f.dual(), n, samples, ratio_bound, rng, dmin, dmax);
        const ConcavityClass dual_class = classify_forms(dmin, dmax, class_tol);
        rep.inverse_concave_ok =
            dual_class == ConcavityClass::Concave || dual_class == ConcavityClass::Linear;
    }

    // Boundary behaviour: probe (eps, 1, ..., 1) for shrinking eps.
    auto probe = [&](const SpeedFunction& sf, std::vector<BoundaryProbe>* out) {
        bool decreasing = true;
        double prev = 0.0;
        double last = 0.0;
        const double eps_list[] = {1e-3, 1e-6, 1e-9, 1e-12};
        for (int idx = 0; idx < 4; ++idx) {
            std::vector<double> k(n, 1.0);
            k[0] = eps_list[idx];
            PrincipalCurvatures kappa(k);
            const double fv = sf.value(kappa);
            if (idx > 0 && fv >= prev) decreasing = false;
            prev = fv;
            last = fv;
            if (out) out->push_back({eps_list[idx], fv, (eps_list[idx] + n - 1) / fv});
        }
        return decreasing && last <= 0.05;
    };
    rep.vanishes_on_boundary_ok = probe(f, &rep.boundary_profile);
    rep.dual_vanishes_on_boundary_ok = probe(f.dual(), nullptr);
    return rep;
}

}  // namespace nhflow
