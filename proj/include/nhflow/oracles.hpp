// Independent verification oracles: finite-difference derivative checks
// against a separate extended-precision evaluation of the speeds, eigenvalue
// perturbation for the matrix second derivative, identity and inequality
// suites over sampled curvature vectors and symmetric 3-tensors, and the
// second-derivative-bound estimator over nearly umbilic cones.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nhflow/curvature.hpp"
#include "nhflow/phi.hpp"
#include "nhflow/support.hpp"

namespace nhflow {

// Totally symmetric 3-tensor with its trace vector; stands in for the
// derivative of the second fundamental form in the gradient inequalities.
class SymmetricTensor3 {
  public:
    explicit SymmetricTensor3(int n) : n_(n), a_(static_cast<size_t>(n) * n * n, 0.0) {}

    int dim() const { return n_; }
    double& at(int i, int j, int k) { return a_[(static_cast<size_t>(i) * n_ + j) * n_ + k]; }
    double at(int i, int j, int k) const { return a_[(static_cast<size_t>(i) * n_ + j) * n_ + k]; }

    void symmetrize();
    std::vector<double> trace_vector() const;  // (tr T)_i = sum_k T_ikk
    double norm2() const;

  private:
    int n_;
    std::vector<double> a_;
};

// Max relative error of central differences against the analytic gradient /
// Hessian.  The difference stencil evaluates the speed in extended precision
// through an oracle-local formula, independent of the library's derivatives.
double fd_check_gradient(const SpeedFunction& f, const PrincipalCurvatures& kappa, double h_step);
double fd_check_hessian(const SpeedFunction& f, const PrincipalCurvatures& kappa, double h_step);

// d^2/ds^2 f(eigenvalues(diag(kappa) + s B)) at s = 0 by second-order central
// differences with an oracle-local Jacobi eigensolver.
double eigenvalue_perturbation_form(const SpeedFunction& f, const PrincipalCurvatures& kappa,
                                    const SymMat& B, double h_step);

struct SuiteReport {
    std::string name;
    int samples = 0;
    int violations = 0;
    double worst_residual = 0.0;       // largest relative identity mismatch
    double worst_margin = 0.0;         // most negative inequality slack
    int reported_only_failures = 0;    // checks that are reported, not asserted
    bool pass = false;
    std::vector<std::string> notes;
};

// Exact symmetric-polynomial identities for pinched curvature vectors and the
// gradient comparison for symmetric 3-tensors under the same pinching.
SuiteReport identity_suite_37(int samples, int n, double eps_pinch, std::uint64_t seed = 2024);

// |T|^2 >= 3/(n+2) |tr T|^2 (asserted) and the trace-free comparison
// |T0|^2 >= 2(n-1)/(3n) |T|^2 (reported only).
SuiteReport gradient_inequality_suite(int samples, int n, std::uint64_t seed = 2025);

// Bounds implied by a tight trace-free pinching |A0|^2 = eps H^2 with
// eps < 1/(n(n-1)): positivity, the two-sided curvature bracket and the
// cubic-moment lower bound.
SuiteReport tight_pinch_suite(int samples, int n, std::uint64_t seed = 2026);

struct MuEstimate {
    double mu_second_derivative = 0.0;  // H |F..(P,Q)| <= mu |P||Q|
    double mu_gradient = 0.0;           // |n f_i - 1| <= mu |A0| / H
    double mu_value = 0.0;              // |n f - H| <= (mu/2) |A0|^2 / H
    double combined = 0.0;
};

// Smallest constants satisfying the three nearly-umbilic bounds of the
// rescaled speed n f over sampled cones |A0|^2 <= sigma0 H^2.  Sampling is
// nested across sigma levels so the estimate is monotone in sigma0.
MuEstimate estimate_mu(const SpeedFunction& f, int n, double sigma0, int samples,
                       std::uint64_t seed = 2027);

// Consistency of the radius evolution with the speed: compares the time
// difference of the meridional radius across one step against the spatial
// expansion (-Phi)'' + (-Phi) of the nodal speed at the earlier state.
double chainrule_consistency(const SupportProfile& before, const SupportProfile& after, double dt,
                             const SpeedFunction& f, const PhiProfile& phi);

}  // namespace nhflow
