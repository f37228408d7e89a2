// Pointwise algebra of symmetric curvature functions: the builtin degree-one
// homogeneous speeds, their derivatives, the dual (inverse) speed, shape
// invariants of a curvature vector, and a sampled verification report for the
// structure conditions a speed has to satisfy.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace nhflow {

// A point of the positive cone: n >= 2 strictly positive principal curvatures.
class PrincipalCurvatures {
  public:
    explicit PrincipalCurvatures(std::vector<double> values);

    int dim() const { return static_cast<int>(values_.size()); }
    const std::vector<double>& values() const { return values_; }
    double operator[](int i) const { return values_[i]; }
    double min() const;
    double max() const;

  private:
    std::vector<double> values_;
};

// Scalar invariants of a curvature vector.  The trace-free norm is carried in
// the cancellation-free pairwise-difference form, which keeps it accurate for
// nearly umbilic points.
struct ShapeInvariants {
    double H;            // sum of curvatures
    double normA2;       // sum of squares
    double normA02;      // normA2 - H^2/n, computed as (1/n) sum_{i<j} (k_i-k_j)^2
    double C;            // sum of cubes
    double K;            // product
    double pinch_ratio;  // k_max / k_min >= 1
};

ShapeInvariants shape_invariants(const PrincipalCurvatures& kappa);

// Dense symmetric matrix, row-major, just large enough for this module.
struct SymMat {
    int n = 0;
    std::vector<double> a;

    SymMat() = default;
    explicit SymMat(int dim) : n(dim), a(static_cast<size_t>(dim) * dim, 0.0) {}
    double& operator()(int i, int j) { return a[static_cast<size_t>(i) * n + j]; }
    double operator()(int i, int j) const { return a[static_cast<size_t>(i) * n + j]; }
    double frobenius() const;
};

enum class ConcavityClass { Convex, Concave, Neither, Linear };

std::string to_string(ConcavityClass c);

// Sampled verification of the structure conditions for a speed function:
// normalization f(1,...,1)=1, monotonicity, the Euler identity, concavity
// class of the Hessian, inverse concavity and boundary behaviour.
struct BoundaryProbe {
    double eps;        // curvature vector (eps, 1, ..., 1)
    double f_value;    // f at the probe
    double sum_over_f; // (eps + n - 1) / f, the mean-curvature-to-speed ratio
};

struct FConditionReport {
    bool normalization_ok = false;
    double homogeneity_residual = 0.0;  // max over samples of |sum f_i k_i - f| / f
    bool monotone_ok = false;
    ConcavityClass concavity_class = ConcavityClass::Neither;
    bool inverse_concave_ok = false;
    bool vanishes_on_boundary_ok = false;
    bool dual_vanishes_on_boundary_ok = false;
    int sample_count = 0;
    double cone_ratio_bound = 1.0;
    std::uint64_t seed = 0;
    double min_quadratic_form = 0.0;  // extremes of sampled Hessian forms, scaled by 1/f
    double max_quadratic_form = 0.0;
    std::vector<BoundaryProbe> boundary_profile;
};

// The builtin degree-one homogeneous symmetric speeds.  All are normalized to
// f(1,...,1) = 1.  rms/arithmetic/harmonic are members of the power-mean
// family (p = 2, 1, -1); the geometric mean is its p -> 0 limit.
class SpeedFunction {
  public:
    enum class Kind { ArithmeticMean, GeometricMean, Rms, HarmonicMean, PowerMean };

    static SpeedFunction arithmetic_mean();
    static SpeedFunction geometric_mean();
    static SpeedFunction rms();
    static SpeedFunction harmonic_mean();
    static SpeedFunction power_mean(double p);

    Kind kind() const { return kind_; }
    double power() const { return p_; }
    std::string name() const;

    double value(const PrincipalCurvatures& kappa) const;
    std::vector<double> gradient(const PrincipalCurvatures& kappa) const;
    SymMat hessian(const PrincipalCurvatures& kappa) const;

    // Second derivative of the matrix extension F in direction B, evaluated at
    // a diagonal argument:  sum_kl hess_kl B_kk B_ll
    // + 2 sum_{k<l} (f_k - f_l)/(kappa_k - kappa_l) B_kl^2.
    // Near-equal curvature pairs use the analytic limit hess_kk - hess_kl of
    // the difference quotient; *near_tie reports whether that happened.
    double second_derivative_form(const PrincipalCurvatures& kappa, const SymMat& B,
                                  bool* near_tie = nullptr) const;

    // Dual speed on principal radii: f_*(r) = 1 / f(1/r_1, ..., 1/r_n).
    double dual_value(const std::vector<double>& radii) const;
    // The dual speed is again a builtin (power mean of the opposite exponent).
    SpeedFunction dual() const;

    // Fast paths for rotationally symmetric curvature vectors
    // (k_ax, k_rot, ..., k_rot): no allocation, same formulas.
    double value_axisym(double k_ax, double k_rot, int n) const;
    void gradient_axisym(double k_ax, double k_rot, int n, double& df_ax, double& df_rot) const;

  private:
    SpeedFunction(Kind kind, double p) : kind_(kind), p_(p) {}

    Kind kind_;
    double p_;  // power-mean exponent; 0 marks the geometric mean
};

FConditionReport condition_report_f(const SpeedFunction& f, int n, int samples,
                                    double ratio_bound, std::uint64_t seed = 12345);

}  // namespace nhflow
