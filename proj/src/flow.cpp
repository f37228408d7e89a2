#include "nhflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "../src/numerics.hpp"

namespace nhflow {

SupportProfile make_profile(const ShapeSpec& spec, int n, int modes) {
    switch (spec.kind) {
        case ShapeSpec::Kind::Sphere:
            return make_sphere(spec.R, n, modes);
        case ShapeSpec::Kind::Spheroid:
            return make_spheroid(spec.axial, spec.equatorial, n, modes);
        case ShapeSpec::Kind::PerturbedSphere:
            return make_perturbed_sphere(spec.R, spec.eps, spec.mode, n, modes);
        case ShapeSpec::Kind::Raw: {
            std::vector<double> c = spec.coeffs;
            if (static_cast<int>(c.size()) > modes + 1)
                throw std::invalid_argument("raw shape: more coefficients than modes");
            c.resize(modes + 1, 0.0);
            return SupportProfile(n, std::move(c));
        }
    }
    throw std::invalid_argument("make_profile: unknown shape");
}

FlowState make_state(SupportProfile profile) {
    FlowState s{0.0, 0.0, std::move(profile), {}, 0};
    s.field = radii(s.profile);
    return s;
}

std::vector<double> flow_rhs(const SupportProfile& profile, const SpeedFunction& f,
                             const PhiProfile& phi) {
    const CurvatureField field = radii(profile);
    const int n = profile.dim();
    std::vector<double> w(profile.nodes() + 1);
    for (int j = 0; j <= profile.nodes(); ++j) {
        w[j] = -phi.value(f.value_axisym(field.kap_ax(j), field.kap_rot(j), n));
    }
    return w;
}

double stable_dt(const FlowState& state, const SpeedFunction& f, const PhiProfile& phi,
                 double c_safe) {
    const int n = state.profile.dim();
    const int N = state.profile.nodes();
    double dmax = 0.0;
    for (int j = 0; j <= N; ++j) {
        const double ka = state.field.kap_ax(j);
        const double kr = state.field.kap_rot(j);
        const double fv = f.value_axisym(ka, kr, n);
        double ga, gr;
        f.gradient_axisym(ka, kr, n, ga, gr);
        const double kmax = std::max(ka, kr);
        const double d = phi.eval(fv).d1 * std::max(ga, gr) * kmax * kmax;
        dmax = std::max(dmax, d);
    }
    const double h = std::numbers::pi / N;
    return c_safe * h * h / dmax;
}

namespace {

// RK4 on the mode coefficients; every stage projects the nodal speed back to
// the retained modes (2x oversampling keeps the quadratic aliasing out).
std::vector<double> rk4_coeffs(const SupportProfile& base, double dt, const SpeedFunction& f,
                               const PhiProfile& phi) {
    const CosineBasis& b = base.basis();
    const std::vector<double>& a0 = base.coeff();

    auto deriv = [&](const std::vector<double>& coeff) {
        return b.project(flow_rhs(base.with_coeffs(coeff), f, phi));
    };

    const std::vector<double> k1 = deriv(a0);
    std::vector<double> tmp(a0.size());
    for (size_t i = 0; i < a0.size(); ++i) tmp[i] = a0[i] + 0.5 * dt * k1[i];
    const std::vector<double> k2 = deriv(tmp);
    for (size_t i = 0; i < a0.size(); ++i) tmp[i] = a0[i] + 0.5 * dt * k2[i];
    const std::vector<double> k3 = deriv(tmp);
    for (size_t i = 0; i < a0.size(); ++i) tmp[i] = a0[i] + dt * k3[i];
    const std::vector<double> k4 = deriv(tmp);

    std::vector<double> out(a0.size());
    for (size_t i = 0; i < a0.size(); ++i)
        out[i] = a0[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

}  // namespace

FlowState step(const FlowState& state, double dt, const SpeedFunction& f, const PhiProfile& phi,
               double* dt_used) {
    double trial = dt;
    for (int attempt = 0; attempt < 20; ++attempt) {
        try {
            FlowState next = state;
            next.profile = state.profile.with_coeffs(rk4_coeffs(state.profile, trial, f, phi));
            next.field = radii(next.profile);  // validates convexity of the result
            num::KahanSum acc{state.t, state.t_comp};
            acc.add(trial);
            next.t = acc.sum;
            next.t_comp = acc.comp;
            next.step_count = state.step_count + 1;
            if (dt_used) *dt_used = trial;
            return next;
        } catch (const ConvexityError&) {
            trial *= 0.5;
        }
    }
    throw std::runtime_error("convexity breakdown at t=" + std::to_string(state.t));
}

ExtinctionEstimate estimate_extinction(const FlowState& final_state, const PhiProfile& phi) {
    ExtinctionEstimate est;
    est.p_est = steiner_axial_offset(final_state.profile);
    std::vector<double> c = final_state.profile.coeff();
    c[1] -= est.p_est;
    const SupportProfile recentered = final_state.profile.with_coeffs(std::move(c));
    est.theta_bar = mean_support(recentered);

    double pinch = 1.0;
    const CurvatureField& fl = final_state.field;
    for (size_t j = 0; j < fl.r1.size(); ++j) {
        const double hi = std::max(fl.r1[j], fl.r2[j]);
        const double lo = std::min(fl.r1[j], fl.r2[j]);
        pinch = std::max(pinch, hi / lo);
    }
    est.confident = pinch <= 1.05;

    auto integrand = [&phi](double rho) {
        if (rho <= 0.0) return 0.0;
        return 1.0 / phi.value(1.0 / rho);
    };
    const double scale = std::max(integrand(est.theta_bar), 1e-30);
    const double tail =
        num::adaptive_simpson(integrand, 0.0, est.theta_bar, 1e-13 * est.theta_bar * scale);
    est.T_est = final_state.t + tail;
    return est;
}

RunResult run_flow(const RunConfig& config) {
    if (!(config.c_safe > 0.0 && config.c_safe <= 1.0))
        throw std::invalid_argument("run_flow: c_safe must lie in (0, 1]");
    if (config.monitor_stride < 1) throw std::invalid_argument("run_flow: monitor_stride >= 1");

    FlowState state = make_state(make_profile(config.shape, config.n, config.modes));

    // Resolve the classification gate before any stepping.
    RunResult result;
    {
        const FConditionReport fr = condition_report_f(config.f, config.n, 512, 16.0);
        const PhiConditionReport pr = condition_report_phi(config.phi);
        result.classification = classify_case(fr, pr, config.n, /*axially_symmetric=*/true);
        if (result.classification.empty() && !config.override_classification)
            throw ClassificationEmptyError(
                "no convergence case applies to this speed/profile pair (set "
                "override_classification to run anyway)");
    }

    // Effective defaults from the initial state.
    const auto [recentered0, z0] = steiner_recenter(state.profile);
    const double min_u0 = recentered0.min_support();
    result.delta_eff = (config.delta > 0.0) ? config.delta : 0.5 * min_u0;
    const double sigma_cap = 0.5 / (config.n * (config.n - 1.0));
    if (config.sigma > 0.0) {
        result.sigma_eff = config.sigma;
    } else {
        double ratio0 = 0.0;
        const int n = config.n;
        for (size_t j = 0; j < state.field.r1.size(); ++j) {
            const double ka = state.field.kap_ax(static_cast<int>(j));
            const double kr = state.field.kap_rot(static_cast<int>(j));
            const double H = ka + (n - 1) * kr;
            const double dk = ka - kr;
            const double A02 = (n - 1) * dk * dk / n;
            ratio0 = std::max(ratio0, A02 / (H * H));
        }
        // 10% headroom over the initial ratio keeps Z_sigma strictly negative
        // at the start; floor covers exactly round initial data.
        result.sigma_eff = std::min(std::max(ratio0 / 0.9, 1e-8), sigma_cap);
    }
    result.r_stop_eff =
        (config.r_stop > 0.0) ? config.r_stop : 1e-2 * mean_support(state.profile);
    if (!(result.r_stop_eff < state.profile.min_support()))
        throw std::invalid_argument("run_flow: r_stop must be below the initial min support");

    // Snapshot thresholds: eighths of the initial min support, then the final state.
    std::vector<double> snap_levels;
    for (int k = 8; k >= 1; --k) snap_levels.push_back(state.profile.min_support() * k / 8.0);
    size_t next_snap = 0;
    auto maybe_snapshot = [&](const FlowState& s) {
        const double umin = s.profile.min_support();
        while (next_snap < snap_levels.size() && umin <= snap_levels[next_snap] + 1e-15) {
            result.snapshots.push_back({static_cast<int>(result.snapshots.size()), s.t,
                                        s.profile.coeff()});
            ++next_snap;
        }
    };

    auto record = [&](const FlowState& s) {
        result.series.push_back(monitor_sample(s.profile, s.t, config.f, config.phi,
                                               result.sigma_eff, result.delta_eff));
    };

    record(state);
    maybe_snapshot(state);
    long last_recorded_step = 0;

    result.termination_reason = "max_steps";
    while (state.step_count < config.max_steps) {
        if (state.profile.min_support() <= result.r_stop_eff) {
            result.termination_reason = "r_stop";
            break;
        }
        const double dt = stable_dt(state, config.f, config.phi, config.c_safe);
        state = step(state, dt, config.f, config.phi);
        maybe_snapshot(state);
        if (state.step_count % config.monitor_stride == 0) {
            record(state);
            last_recorded_step = state.step_count;
        }
    }
    if (state.step_count >= config.max_steps) result.termination_reason = "max_steps";
    if (last_recorded_step != state.step_count) record(state);
    if (result.snapshots.empty() || result.snapshots.back().t != state.t)
        result.snapshots.push_back({static_cast<int>(result.snapshots.size()), state.t,
                                    state.profile.coeff()});

    result.steps = state.step_count;
    result.t_final = state.t;
    result.final_coeff = state.profile.coeff();
    result.nodes = state.profile.nodes();
    result.extinction = estimate_extinction(state, config.phi);

    // Rescaling pass: radius history of the sphere with the same extinction time.
    const ShrinkingSphere comparison = ShrinkingSphere::from_extinction_time(
        config.phi, result.extinction.T_est, std::max(result.extinction.theta_bar, 1e-6));
    for (MonitorRecord& rec : result.series) {
        rec.theta = comparison.theta_at(rec.t);
        rec.tau = -std::log(rec.theta);
        const auto [nodes, dev] = rescale_state(state.profile.with_coeffs(rec.coeff), rec.theta,
                                                result.extinction.p_est);
        (void)nodes;
        rec.sup_dev_unit = dev;
    }

    // Standard monotonicity reports over the recorded series.
    {
        std::vector<double> t, pinch, g, hf, kfn, rphi, tau, dev;
        std::vector<double> t_valid, ztso;
        for (const MonitorRecord& r : result.series) {
            t.push_back(r.t);
            pinch.push_back(r.pinch_ratio);
            g.push_back(r.G_max);
            hf.push_back(r.HoverF_max);
            kfn.push_back(r.KoverFn_min);
            rphi.push_back(r.rPhi_max);
            tau.push_back(r.tau);
            dev.push_back(r.sup_dev_unit);
            if (r.Ztso_valid) {
                t_valid.push_back(r.t);
                ztso.push_back(r.Ztso_max);
            }
        }
        const double tol = 1e-6;
        result.monotonicity.push_back(assert_monotone(t, pinch, "pinch_ratio", "nonincreasing", tol));
        result.monotonicity.push_back(assert_monotone(t, g, "G_max", "nonincreasing", tol));
        result.monotonicity.push_back(assert_monotone(t, hf, "HoverF_max", "nonincreasing", tol));
        result.monotonicity.push_back(assert_monotone(t, kfn, "KoverFn_min", "nondecreasing", tol));
        result.monotonicity.push_back(assert_monotone(t, rphi, "rPhi_max", "nonincreasing", tol));
        if (ztso.size() >= 2)
            result.monotonicity.push_back(assert_monotone(t_valid, ztso, "Ztso_max", "bounded", 0.05));
        if (dev.size() >= 8) result.decay = fit_decay_rate(tau, dev);
    }

    // Invariants of the result: strictly increasing sample times, extinction
    // estimate beyond the last recorded time.
    for (size_t i = 1; i < result.series.size(); ++i) {
        if (!(result.series[i].t > result.series[i - 1].t))
            throw std::runtime_error("run_flow: monitor times not strictly increasing");
    }
    if (!(result.extinction.T_est > result.t_final))
        throw std::runtime_error("run_flow: extinction estimate not beyond the final time");
    return result;
}

}  // namespace nhflow
