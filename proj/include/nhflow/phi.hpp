// Scalar speed profiles: the builtin families (positive power sums, ln(1+s),
// e^s - 1 and sums of those), exact derivative evaluation, a grid-based
// verification report of the structure conditions, the pinching threshold and
// the matching of (speed, profile) pairs to the convergence cases they enable.
#pragma once

#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "nhflow/curvature.hpp"

namespace nhflow {

class PhiProfile {
  public:
    enum class Kind { PowerSum, Log1p, Expm1, Sum };

    // Phi(s) = sum_i c_i s^{k_i}, all c_i > 0, k_i > 0.
    static PhiProfile power_sum(std::vector<std::pair<double, double>> terms);
    static PhiProfile log1p_profile();  // ln(1 + s)
    static PhiProfile expm1_profile();  // e^s - 1
    static PhiProfile sum(std::vector<PhiProfile> parts);

    struct Eval {
        double phi;
        double d1;
        double d2;
    };

    // Exact closed-form value and first two derivatives.  s = 0 is allowed;
    // derivatives there are the one-sided limits (possibly +inf).
    Eval eval(double s) const;
    double value(double s) const { return eval(s).phi; }

    Kind kind() const { return kind_; }
    const std::vector<std::pair<double, double>>& terms() const { return terms_; }
    const std::vector<PhiProfile>& parts() const { return parts_; }
    std::string name() const;

  private:
    PhiProfile(Kind k) : kind_(k) {}

    Kind kind_;
    std::vector<std::pair<double, double>> terms_;  // PowerSum only
    std::vector<PhiProfile> parts_;                 // Sum only
};

struct PhiGrid {
    double s_min = 1e-6;
    double s_max = 1e6;
    int points = 2048;  // log-spaced sample count (>= 1000 for reports)
};

// Grid-certified structure conditions of a profile.  Letters follow the
// report schema used throughout this project:
//   a: Phi(0) = 0                      b: Phi -> inf
//   c: Phi' > 0                        d_i / d_ii / d_iii: sign of Phi's - Phi
//   e: Phi's^2/Phi -> 0 at 0           f: Phi's^2/Phi -> inf at inf
//   g: Phi'' >= 0                      h: s|Phi''| <= c Phi' for a finite c
//   i: Phi'' Phi^2 s + 2 Phi' [Phi^2 - (Phi')^2 s^2] > 0
struct PhiConditionReport {
    bool a = false, b = false, c = false;
    bool d_i = false, d_ii = false, d_iii = false;
    bool e = false, f = false, g = false, h = false, i = false;
    double d_ii_epsilon = 0.0;      // inf over grid of (Phi's - Phi)/(Phi's), clamped at 0
    double empirical_c_for_h = 0.0; // sup over grid of s|Phi''|/Phi'
    bool h_unbounded = false;       // tail-growth verdict: ratio still climbing past 1e3
    // For pure power sums, the two candidate closed-form bounds for h and
    // which one the empirical supremum actually attains.
    double h_bound_coeff_weighted = std::numeric_limits<double>::quiet_NaN();
    double h_bound_termwise = std::numeric_limits<double>::quiet_NaN();
    std::string h_tight_bound;
    PhiGrid grid;
};

PhiConditionReport condition_report_phi(const PhiProfile& phi, const PhiGrid& grid = {});

// One convergence case: identifier, whether the speed-side class matches,
// the profile-side requirements with their verdicts, and the combined result.
struct CaseRequirement {
    std::string condition;
    bool satisfied;
};

struct CaseStatus {
    std::string id;
    bool certifiable = true;  // liminf-comparison cases cannot be certified numerically
    bool f_side_ok = false;
    std::string f_side_note;
    std::vector<CaseRequirement> phi_requirements;
    bool applicable = false;
};

struct CaseClassification {
    std::vector<CaseStatus> cases;               // all eight candidate cases
    std::vector<std::string> applicable_cases;   // ids with both sides satisfied
    bool empty() const { return applicable_cases.empty(); }
};

CaseClassification classify_case(const FConditionReport& fr, const PhiConditionReport& pr, int n,
                                 bool axially_symmetric);

// Curvature pinching threshold 1 + 2 Phi'(f) / (Phi''(f) f); +inf when the
// profile is concave at f (no constraint).
double pinch_threshold(const PhiProfile& phi, double f_value);

}  // namespace nhflow
