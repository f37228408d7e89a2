#include "nhflow/monitors.hpp"

#include <algorithm>
#include <cmath>

#include "../src/numerics.hpp"

namespace nhflow {

MonitorRecord monitor_sample(const SupportProfile& profile, double t, const SpeedFunction& f,
                             const PhiProfile& phi, double sigma, double delta) {
    const int n = profile.dim();
    if (!(sigma > 0.0 && sigma < 1.0 / (n * (n - 1.0))))
        throw std::invalid_argument("monitor_sample: sigma outside (0, 1/(n(n-1)))");
    if (!(delta > 0.0)) throw std::invalid_argument("monitor_sample: delta must be positive");

    const CurvatureField field = radii(profile);
    const auto u = profile.node_values();
    const int J = profile.nodes();

    MonitorRecord rec;
    rec.t = t;
    rec.coeff = profile.coeff();
    rec.kappa_min = std::numeric_limits<double>::infinity();
    rec.kappa_max = 0.0;
    rec.pinch_ratio = 1.0;
    rec.G_max = 0.0;
    rec.HoverF_max = 0.0;
    rec.KoverFn_min = std::numeric_limits<double>::infinity();
    rec.Zsigma_max = -std::numeric_limits<double>::infinity();
    rec.rPhi_max = 0.0;
    rec.Ztso_max = -std::numeric_limits<double>::infinity();
    rec.speed_min = std::numeric_limits<double>::infinity();
    rec.speed_max = 0.0;

    double u_min = std::numeric_limits<double>::infinity();
    for (int j = 0; j <= J; ++j) {
        const double ka = field.kap_ax(j);
        const double kr = field.kap_rot(j);
        const double kmin = std::min(ka, kr);
        const double kmax = std::max(ka, kr);
        rec.kappa_min = std::min(rec.kappa_min, kmin);
        rec.kappa_max = std::max(rec.kappa_max, kmax);
        rec.pinch_ratio = std::max(rec.pinch_ratio, kmax / kmin);

        const double H = ka + (n - 1) * kr;
        // cancellation-free trace-free norm: (n-1)(ka-kr)^2 / n
        const double dk = (field.r2[j] - field.r1[j]) / (field.r1[j] * field.r2[j]);
        const double A02 = (n - 1) * dk * dk / n;
        rec.G_max = std::max(rec.G_max, n * A02 / (H * H));
        rec.Zsigma_max = std::max(rec.Zsigma_max, A02 - sigma * H * H);

        const double fv = f.value_axisym(ka, kr, n);
        rec.HoverF_max = std::max(rec.HoverF_max, H / fv);
        const double KoverFn = ka * std::pow(kr, n - 1) / std::pow(fv, n);
        rec.KoverFn_min = std::min(rec.KoverFn_min, KoverFn);

        const double speed = phi.value(fv);
        rec.speed_min = std::min(rec.speed_min, speed);
        rec.speed_max = std::max(rec.speed_max, speed);
        rec.rPhi_max = std::max(rec.rPhi_max, std::max(field.r1[j], field.r2[j]) * speed);
        rec.Ztso_max = std::max(rec.Ztso_max, speed / (u[j] - delta));
        u_min = std::min(u_min, u[j]);
    }
    rec.Ztso_valid = (u_min - delta >= 0.5 * delta);
    return rec;
}

MonotonicityReport assert_monotone(const std::vector<double>& times,
                                   const std::vector<double>& values, const std::string& quantity,
                                   const std::string& direction, double rel_tolerance) {
    if (values.size() < 2 || times.size() != values.size())
        throw std::invalid_argument("assert_monotone: need >= 2 aligned samples");
    MonotonicityReport rep;
    rep.quantity = quantity;
    rep.direction = direction;
    rep.tolerance = rel_tolerance;
    rep.worst_violation = -std::numeric_limits<double>::infinity();

    auto note = [&](double viol, double t_at) {
        if (viol > rep.worst_violation) rep.worst_violation = viol;
        if (viol > rel_tolerance && !rep.has_violation_time) {
            rep.first_violation_time = t_at;
            rep.has_violation_time = true;
        }
    };

    const double floor = 1e-300;
    if (direction == "nonincreasing" || direction == "nondecreasing") {
        const double sgn = (direction == "nonincreasing") ? 1.0 : -1.0;
        for (size_t i = 0; i + 1 < values.size(); ++i) {
            const double change = sgn * (values[i + 1] - values[i]);
            note(change / std::max(std::abs(values[i]), floor), times[i + 1]);
        }
    } else if (direction == "bounded") {
        const double bound = values.front();
        for (size_t i = 1; i < values.size(); ++i) {
            note((values[i] - bound) / std::max(std::abs(bound), floor), times[i]);
        }
    } else {
        throw std::invalid_argument("assert_monotone: unknown direction " + direction);
    }
    rep.pass = rep.worst_violation <= rel_tolerance;
    return rep;
}

ShrinkingSphere::ShrinkingSphere(PhiProfile phi, double theta0) : phi_(std::move(phi)), theta0_(theta0) {
    if (!(theta0 > 0.0)) throw std::invalid_argument("shrinking sphere: radius must be positive");
    build_table();
    T_ = cum_.back();
}

ShrinkingSphere ShrinkingSphere::from_extinction_time(PhiProfile phi, double T, double theta_hint) {
    if (!(T > 0.0)) throw std::invalid_argument("shrinking sphere: extinction time must be positive");
    ShrinkingSphere probe(phi, std::max(theta_hint, 1e-8));
    double lo = probe.theta0_, hi = probe.theta0_;
    double flo = probe.T_ - T;
    while (flo > 0.0) {
        hi = lo;
        lo *= 0.5;
        flo = probe.lifetime(lo) - T;
        if (lo < 1e-14) throw std::runtime_error("shrinking sphere: cannot bracket radius");
    }
    double fhi = probe.lifetime(hi) - T;
    while (fhi < 0.0) {
        hi *= 2.0;
        fhi = ShrinkingSphere(phi, hi).T_ - T;
        if (hi > 1e14) throw std::runtime_error("shrinking sphere: cannot bracket radius");
    }
    ShrinkingSphere wide(phi, hi);
    const double theta0 = num::brent([&](double th) { return wide.lifetime(th) - T; }, lo, hi,
                                     1e-14 * std::max(1.0, hi));
    return ShrinkingSphere(phi, theta0);
}

double ShrinkingSphere::segment_integral(double a, double b) const {
    auto integrand = [this](double rho) {
        if (rho <= 0.0) return 0.0;  // speed diverges as the radius vanishes
        return 1.0 / phi_.value(1.0 / rho);
    };
    const double scale = std::max({integrand(a), integrand(0.5 * (a + b)), integrand(b), 1e-30});
    return num::adaptive_simpson(integrand, a, b, 1e-13 * (b - a) * scale);
}

void ShrinkingSphere::build_table() {
    const int K = 2048;
    grid_.resize(K + 1);
    cum_.resize(K + 1);
    grid_[0] = 0.0;
    cum_[0] = 0.0;
    num::KahanSum acc;
    for (int i = 1; i <= K; ++i) {
        grid_[i] = theta0_ * i / K;
        acc.add(segment_integral(grid_[i - 1], grid_[i]));
        cum_[i] = acc.value();
    }
}

double ShrinkingSphere::lifetime(double theta) const {
    if (theta <= 0.0) return 0.0;
    if (theta >= grid_.back())
        return cum_.back() + segment_integral(grid_.back(), theta);
    const auto it = std::upper_bound(grid_.begin(), grid_.end(), theta);
    const size_t i = it - grid_.begin();  // grid_[i-1] <= theta < grid_[i]
    return cum_[i - 1] + segment_integral(grid_[i - 1], theta);
}

double ShrinkingSphere::theta_at(double t) const {
    const double target = T_ - t;
    if (target <= 0.0) return 0.0;
    if (target >= cum_.back()) return theta0_;
    const auto it = std::upper_bound(cum_.begin(), cum_.end(), target);
    const size_t i = it - cum_.begin();  // cum_[i-1] <= target < cum_[i]
    const double lo = grid_[i - 1], hi = grid_[i];
    const double base = cum_[i - 1];
    auto g = [&](double th) { return base + segment_integral(lo, th) - target; };
    if (g(hi) < 0.0) return hi;  // guard against quadrature jitter at the seam
    return num::brent(g, lo, hi, 1e-14 * std::max(1.0, theta0_));
}

double ShrinkingSphere::tau_at(double t) const { return -std::log(theta_at(t)); }

std::pair<std::vector<double>, double> rescale_state(const SupportProfile& profile, double theta,
                                                     double p_axial) {
    if (!(theta > 0.0)) throw std::invalid_argument("rescale_state: theta must be positive");
    const CosineBasis& b = profile.basis();
    std::vector<double> c = profile.coeff();
    c[1] -= p_axial;
    std::vector<double> nodes;
    b.nodes_from_coeffs(c, b.eval, nodes);
    double dev = 0.0;
    for (double& v : nodes) {
        v /= theta;
        dev = std::max(dev, std::abs(v - 1.0));
    }
    return {std::move(nodes), dev};
}

DecayFit fit_decay_rate(const std::vector<double>& taus, const std::vector<double>& devs) {
    if (taus.size() != devs.size() || taus.size() < 8)
        throw std::invalid_argument("fit_decay_rate: need >= 8 aligned samples");
    std::vector<double> x, y;
    for (size_t i = taus.size() / 2; i < taus.size(); ++i) {
        if (devs[i] > 0.0) {
            x.push_back(taus[i]);
            y.push_back(std::log(devs[i]));
        }
    }
    DecayFit fit;
    if (x.size() < 2) {
        fit.infinite = true;
        fit.rate = std::numeric_limits<double>::infinity();
        return fit;
    }
    double sx = 0.0, sy = 0.0;
    for (size_t i = 0; i < x.size(); ++i) { sx += x[i]; sy += y[i]; }
    const double mx = sx / x.size(), my = sy / x.size();
    double sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    const double slope = (sxx > 0.0) ? sxy / sxx : 0.0;
    fit.rate = -slope;
    double rss = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (my + slope * (x[i] - mx));
        rss += r * r;
    }
    fit.residual = std::sqrt(rss / x.size());
    return fit;
}

double z_lambda(const ShapeInvariants& inv, double sigma0, double hbar, double lambda) {
    return inv.normA02 - sigma0 * std::pow(hbar, lambda) * std::pow(inv.H, 2.0 - lambda);
}

}  // namespace nhflow
