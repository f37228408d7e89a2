// Tracked scalars along a flow: curvature extremes, the degree-zero pinching
// quantities, the speed-over-clearance bound, rescaling against the
// equivalent shrinking sphere, monotonicity assertions and exponential decay
// fitting.
#pragma once

#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "nhflow/curvature.hpp"
#include "nhflow/phi.hpp"
#include "nhflow/support.hpp"

namespace nhflow {

struct MonitorRecord {
    double t = 0.0;
    double tau = std::numeric_limits<double>::quiet_NaN();    // -ln theta, filled by rescale pass
    double theta = std::numeric_limits<double>::quiet_NaN();  // comparison sphere radius
    double kappa_min = 0.0, kappa_max = 0.0;
    double pinch_ratio = 1.0;   // worst per-node ratio of largest to smallest curvature
    double G_max = 0.0;         // n |A0|^2 / H^2
    double HoverF_max = 0.0;    // H / f, equals n on round bodies
    double KoverFn_min = 0.0;   // K / f^n, equals 1 on round bodies
    double Zsigma_max = 0.0;    // |A0|^2 - sigma H^2
    double rPhi_max = 0.0;      // largest radius times Phi(f)
    double Ztso_max = 0.0;      // Phi(f) / (u - delta)
    bool Ztso_valid = false;    // u - delta >= delta/2 at every node
    double speed_min = 0.0, speed_max = 0.0;
    double sup_dev_unit = std::numeric_limits<double>::quiet_NaN();  // rescaled |u~ - 1|
    std::vector<double> coeff;  // profile coefficients at sample time (for rescaling)
};

MonitorRecord monitor_sample(const SupportProfile& profile, double t, const SpeedFunction& f,
                             const PhiProfile& phi, double sigma, double delta);

struct MonotonicityReport {
    std::string quantity;
    std::string direction;          // "nonincreasing" | "nondecreasing" | "bounded"
    double worst_violation = 0.0;   // signed, relative to current magnitude
    double first_violation_time = std::numeric_limits<double>::quiet_NaN();
    bool has_violation_time = false;
    bool pass = false;
    double tolerance = 0.0;
};

MonotonicityReport assert_monotone(const std::vector<double>& times,
                                   const std::vector<double>& values, const std::string& quantity,
                                   const std::string& direction, double rel_tolerance);

// Radius history of the sphere collapsing under the same profile: lifetime
// integral, extinction time and the inverse evaluator theta(t).
class ShrinkingSphere {
  public:
    ShrinkingSphere(PhiProfile phi, double theta0);
    static ShrinkingSphere from_extinction_time(PhiProfile phi, double T, double theta_hint);

    double extinction_time() const { return T_; }
    double initial_radius() const { return theta0_; }

    // Time for a sphere of radius theta to collapse: integral of 1/Phi(1/r).
    double lifetime(double theta) const;
    // Radius at time t in [0, T]; strictly decreasing, theta(T) = 0.
    double theta_at(double t) const;
    double tau_at(double t) const;

  private:
    void build_table();
    double segment_integral(double a, double b) const;

    PhiProfile phi_;
    double theta0_ = 0.0;
    double T_ = 0.0;
    std::vector<double> grid_;  // radii 0 .. theta0
    std::vector<double> cum_;   // lifetime at grid points
};

// Rescaled support (u - p cos(theta)) / theta at the nodes and its sup
// deviation from the unit sphere.
std::pair<std::vector<double>, double> rescale_state(const SupportProfile& profile, double theta,
                                                     double p_axial);

struct DecayFit {
    double rate = 0.0;
    double residual = 0.0;
    bool infinite = false;  // all deviations were zero
};

// Least-squares slope of ln(dev) against tau over the trailing half of the
// series; zero deviations are dropped.
DecayFit fit_decay_rate(const std::vector<double>& taus, const std::vector<double>& devs);

// Pointwise tightened pinching quantity |A0|^2 - sigma0 hbar^lambda H^{2-lambda}
// for a user-chosen exponent lambda; no default assertion is attached to it.
double z_lambda(const ShapeInvariants& inv, double sigma0, double hbar, double lambda);

}  // namespace nhflow
