// Time integration of the support-function contraction du/dt = -Phi(f(kappa))
// with classical RK4, stability-limited steps, convexity guarding and
// extinction estimation from the near-round final state.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nhflow/curvature.hpp"
#include "nhflow/monitors.hpp"
#include "nhflow/phi.hpp"
#include "nhflow/support.hpp"

namespace nhflow {

struct ShapeSpec {
    enum class Kind { Sphere, Spheroid, PerturbedSphere, Raw };
    Kind kind = Kind::Sphere;
    double R = 1.0;               // sphere / perturbed sphere radius
    double axial = 1.0;           // spheroid semi-axes
    double equatorial = 1.0;
    double eps = 0.0;             // perturbation amplitude
    int mode = 2;                 // perturbation mode (even)
    std::vector<double> coeffs;   // raw coefficients
};

SupportProfile make_profile(const ShapeSpec& spec, int n, int modes);

struct RunConfig {
    int n = 2;
    SpeedFunction f = SpeedFunction::geometric_mean();
    PhiProfile phi = PhiProfile::power_sum({{1.0, 1.0}, {1.0, 3.0}});
    ShapeSpec shape;
    int modes = 64;
    double c_safe = 0.2;
    double r_stop = 0.0;          // <= 0: 1e-2 of the initial mean support
    double sigma = 0.0;           // <= 0: from the initial trace-free ratio
    double delta = 0.0;           // <= 0: half the initial min recentered support
    int monitor_stride = 16;
    long max_steps = 2000000;
    std::uint64_t seed = 0;
    bool override_classification = false;
};

struct FlowState {
    double t = 0.0;
    double t_comp = 0.0;  // Kahan compensation for the time accumulator
    SupportProfile profile;
    CurvatureField field;
    long step_count = 0;
};

FlowState make_state(SupportProfile profile);

// Normal speed at the collocation nodes: -Phi(f(kappa)); strictly negative.
std::vector<double> flow_rhs(const SupportProfile& profile, const SpeedFunction& f,
                             const PhiProfile& phi);

// Stability-limited explicit step: c_safe (pi/N)^2 over the largest linearized
// diffusion coefficient Phi'(f) max_i(df/dk_i) kappa_max^2 across nodes.
double stable_dt(const FlowState& state, const SpeedFunction& f, const PhiProfile& phi,
                 double c_safe);

// One RK4 step.  Convexity loss at any stage rejects the step and retries
// with half the step size, up to 20 times; dt_used reports the accepted size.
FlowState step(const FlowState& state, double dt, const SpeedFunction& f, const PhiProfile& phi,
               double* dt_used = nullptr);

struct ExtinctionEstimate {
    double T_est = 0.0;
    double p_est = 0.0;         // axial coordinate of the collapse point
    double theta_bar = 0.0;     // equivalent sphere radius at the stop time
    bool confident = false;     // final pinch ratio within 1.05
};

ExtinctionEstimate estimate_extinction(const FlowState& final_state, const PhiProfile& phi);

struct Snapshot {
    int index = 0;
    double t = 0.0;
    std::vector<double> coeff;
};

struct RunResult {
    // effective scalar settings after defaults were resolved
    double r_stop_eff = 0.0;
    double sigma_eff = 0.0;
    double delta_eff = 0.0;

    std::vector<MonitorRecord> series;
    std::vector<Snapshot> snapshots;
    ExtinctionEstimate extinction;
    std::string termination_reason;  // "r_stop" | "max_steps"
    long steps = 0;
    double t_final = 0.0;
    CaseClassification classification;
    std::vector<MonotonicityReport> monotonicity;
    DecayFit decay;                  // fit of the rescaled deviation
    std::vector<double> final_coeff;
    int nodes = 0;
};

struct ClassificationEmptyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

RunResult run_flow(const RunConfig& config);

}  // namespace nhflow
