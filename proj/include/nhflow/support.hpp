// Axially symmetric convex hypersurfaces represented by their support
// function u(theta) on [0, pi] as a truncated cosine series.  The basis is
// collocated at theta_j = j pi / N with N >= 2M; differentiation is exact on
// the basis and the rotational radius uses the analytic pole limit.
#pragma once

#include <array>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace nhflow {

struct ConvexityError : std::runtime_error {
    ConvexityError(const std::string& what, int node_index, double theta_value)
        : std::runtime_error(what), node(node_index), theta(theta_value) {}
    int node;
    double theta;
};

// Shared per-(M,N) tables: collocation angles, node-evaluation matrices for
// u, u' and u''+u, the mode projection, and a Gauss-Legendre rule in
// x = cos(theta) for the weighted axial integrals.
struct CosineBasis {
    CosineBasis(int modes, int nodes);

    int M;  // highest retained mode
    int N;  // nodes + 1 collocation points at j pi / N

    std::vector<double> theta;      // N+1
    std::vector<double> cot_theta;  // interior values; 0 at the poles (unused there)

    // Row-major (N+1) x (M+1) node evaluation tables.
    std::vector<double> eval;     // cos(m theta_j)
    std::vector<double> eval_d1;  // -m sin(m theta_j); exact zero rows at the poles
    std::vector<double> eval_d2;  // -m^2 cos(m theta_j)
    std::vector<double> eval_r1;  // (1 - m^2) cos(m theta_j)

    // (M+1) x (N+1) trapezoid-weighted projection (truncated cosine
    // transform); rows m >= 1 are applied to deviations from the first node
    // value so that constant node data projects to an exactly radial result.
    std::vector<double> proj;

    std::vector<double> gl_x, gl_w;  // 2N-point rule on [-1, 1]

    void nodes_from_coeffs(const std::vector<double>& coeff, const std::vector<double>& table,
                           std::vector<double>& out) const;
    std::vector<double> project(const std::vector<double>& node_values) const;
    // Series value at arbitrary x = cos(theta) via the Chebyshev recurrence.
    double series_at(const std::vector<double>& coeff, double x) const;
};

// Principal radii and curvatures at the collocation nodes; rotational values
// carry multiplicity n-1.
struct CurvatureField {
    std::vector<double> r1;  // meridional radius u'' + u
    std::vector<double> r2;  // rotational radius u + u' cot(theta); pole limit r1
    double kap_ax(int j) const { return 1.0 / r1[j]; }
    double kap_rot(int j) const { return 1.0 / r2[j]; }
};

class SupportProfile {
  public:
    // Construct from coefficients; validates positivity of the support and of
    // both radii at every node.
    SupportProfile(int n_dim, std::vector<double> coeff, int nodes = -1);

    int dim() const { return n_; }
    int modes() const { return basis_->M; }
    int nodes() const { return basis_->N; }
    const std::vector<double>& coeff() const { return coeff_; }
    const CosineBasis& basis() const { return *basis_; }
    std::shared_ptr<const CosineBasis> basis_ptr() const { return basis_; }

    // Same basis, new coefficients, no validation (flow stages validate
    // through radii()).
    SupportProfile with_coeffs(std::vector<double> coeff) const;

    std::vector<double> node_values() const;       // u(theta_j)
    std::vector<double> node_derivatives() const;  // u'(theta_j)
    double value_at(double x) const { return basis_->series_at(coeff_, x); }

    double min_support() const;
    double max_support() const;

  private:
    SupportProfile(std::shared_ptr<const CosineBasis> basis, int n_dim, std::vector<double> coeff);

    std::shared_ptr<const CosineBasis> basis_;
    int n_;
    std::vector<double> coeff_;
};

SupportProfile make_sphere(double R, int n, int modes, int nodes = -1);
SupportProfile make_spheroid(double axial, double equatorial, int n, int modes, int nodes = -1);
SupportProfile make_perturbed_sphere(double R, double eps, int mode, int n, int modes,
                                     int nodes = -1);

// Radii of curvature at all nodes; throws ConvexityError naming the first
// violating node if u, r1 or r2 fails to be positive.
CurvatureField radii(const SupportProfile& profile);

// Axial component of the curvature-weighted centroid and the translated
// profile with that component removed.  Recentered profiles recenter to zero.
std::pair<SupportProfile, double> steiner_recenter(const SupportProfile& profile);
double steiner_axial_offset(const SupportProfile& profile);

// Weighted mean of the support over the sphere of normals.
double mean_support(const SupportProfile& profile);

// Support-function proxies for the inradius and circumradius: node extremes
// of a recentered profile.
std::pair<double, double> radius_bounds(const SupportProfile& profile);

// Generating curve (z, rho) at the collocation normals.
std::vector<std::array<double, 2>> embed_profile(const SupportProfile& profile);

}  // namespace nhflow
