#include "nhflow/support.hpp"

#include <cmath>
#include <numbers>

#include "../src/numerics.hpp"

namespace nhflow {

CosineBasis::CosineBasis(int modes, int nodes) : M(modes), N(nodes) {
    if (M < 2) throw std::invalid_argument("basis: need at least 3 modes");
    if (N < 2 * M) throw std::invalid_argument("basis: collocation requires N >= 2M");

    theta.resize(N + 1);
    cot_theta.assign(N + 1, 0.0);
    for (int j = 0; j <= N; ++j) {
        theta[j] = std::numbers::pi * j / N;
        if (j > 0 && j < N) cot_theta[j] = std::cos(theta[j]) / std::sin(theta[j]);
    }

    const size_t rows = N + 1, cols = M + 1;
    eval.assign(rows * cols, 0.0);
    eval_d1.assign(rows * cols, 0.0);
    eval_d2.assign(rows * cols, 0.0);
    eval_r1.assign(rows * cols, 0.0);
    for (int j = 0; j <= N; ++j) {
        for (int m = 0; m <= M; ++m) {
            double c, s;
            if (j == 0) { c = 1.0; s = 0.0; }
            else if (j == N) { c = (m % 2 == 0) ? 1.0 : -1.0; s = 0.0; }
            else { c = std::cos(m * theta[j]); s = std::sin(m * theta[j]); }
            const size_t idx = j * cols + m;
            eval[idx] = c;
            eval_d1[idx] = -m * s;
            eval_d2[idx] = -static_cast<double>(m) * m * c;
            eval_r1[idx] = (1.0 - static_cast<double>(m) * m) * c;
        }
    }

    // Trapezoid-weighted truncated cosine transform: proj * eval = identity on
    // the retained modes by the discrete orthogonality of cos(m j pi / N).
    proj.assign(cols * rows, 0.0);
    for (int m = 0; m <= M; ++m) {
        const double scale = (m == 0) ? 1.0 / N : 2.0 / N;
        for (int j = 0; j <= N; ++j) {
            const double tw = (j == 0 || j == N) ? 0.5 : 1.0;
            proj[m * rows + j] = scale * tw * eval[j * cols + m];
        }
    }

    num::gauss_legendre(2 * N, gl_x, gl_w);
}

void CosineBasis::nodes_from_coeffs(const std::vector<double>& coeff,
                                    const std::vector<double>& table,
                                    std::vector<double>& out) const {
    const size_t cols = M + 1;
    out.resize(N + 1);
    for (int j = 0; j <= N; ++j) {
        const double* row = table.data() + j * cols;
        double acc = 0.0;
        for (size_t m = 0; m < cols; ++m) acc += row[m] * coeff[m];
        out[j] = acc;
    }
}

std::vector<double> CosineBasis::project(const std::vector<double>& node_values) const {
    const size_t rows = N + 1;
    std::vector<double> coeff(M + 1, 0.0);
    {
        const double* row = proj.data();
        double acc = 0.0;
        for (size_t j = 0; j < rows; ++j) acc += row[j] * node_values[j];
        coeff[0] = acc;
    }
    // Rows m >= 1 annihilate constants analytically; applying them to the
    // deviation from the first node value makes that exact in floating point,
    // so round bodies stay exactly radial under projection.
    const double w0 = node_values[0];
    for (int m = 1; m <= M; ++m) {
        const double* row = proj.data() + static_cast<size_t>(m) * rows;
        double acc = 0.0;
        for (size_t j = 0; j < rows; ++j) acc += row[j] * (node_values[j] - w0);
        coeff[m] = acc;
    }
    return coeff;
}

double CosineBasis::series_at(const std::vector<double>& coeff, double x) const {
    // Clenshaw for sum a_m T_m(x) with T_m(cos t) = cos(m t).
    double b1 = 0.0, b2 = 0.0;
    for (int m = M; m >= 1; --m) {
        const double b0 = coeff[m] + 2.0 * x * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    return coeff[0] + x * b1 - b2;
}

SupportProfile::SupportProfile(std::shared_ptr<const CosineBasis> basis, int n_dim,
                               std::vector<double> coeff)
    : basis_(std::move(basis)), n_(n_dim), coeff_(std::move(coeff)) {}

SupportProfile::SupportProfile(int n_dim, std::vector<double> coeff, int nodes) {
    if (n_dim < 2) throw std::invalid_argument("support profile: dimension must be >= 2");
    if (coeff.size() < 3) throw std::invalid_argument("support profile: need at least 3 modes");
    const int M = static_cast<int>(coeff.size()) - 1;
    const int N = (nodes < 0) ? 2 * M : nodes;
    basis_ = std::make_shared<CosineBasis>(M, N);
    n_ = n_dim;
    coeff_ = std::move(coeff);
    radii(*this);  // validates positivity of support and radii at every node
}

SupportProfile SupportProfile::with_coeffs(std::vector<double> coeff) const {
    return SupportProfile(basis_, n_, std::move(coeff));
}

std::vector<double> SupportProfile::node_values() const {
    std::vector<double> u;
    basis_->nodes_from_coeffs(coeff_, basis_->eval, u);
    return u;
}

std::vector<double> SupportProfile::node_derivatives() const {
    std::vector<double> up;
    basis_->nodes_from_coeffs(coeff_, basis_->eval_d1, up);
    return up;
}

double SupportProfile::min_support() const {
    const auto u = node_values();
    double m = u[0];
    for (double v : u) m = std::min(m, v);
    return m;
}

double SupportProfile::max_support() const {
    const auto u = node_values();
    double m = u[0];
    for (double v : u) m = std::max(m, v);
    return m;
}

CurvatureField radii(const SupportProfile& profile) {
    const CosineBasis& b = profile.basis();
    CurvatureField f;
    std::vector<double> u, up;
    b.nodes_from_coeffs(profile.coeff(), b.eval, u);
    b.nodes_from_coeffs(profile.coeff(), b.eval_d1, up);
    b.nodes_from_coeffs(profile.coeff(), b.eval_r1, f.r1);
    f.r2.resize(b.N + 1);
    for (int j = 0; j <= b.N; ++j) {
        if (!(u[j] > 0.0))
            throw ConvexityError("support function nonpositive at node " + std::to_string(j), j,
                                 b.theta[j]);
        f.r2[j] = (j == 0 || j == b.N) ? f.r1[j] : u[j] + up[j] * b.cot_theta[j];
    }
    for (int j = 0; j <= b.N; ++j) {
        if (!(f.r1[j] > 0.0))
            throw ConvexityError("meridional radius nonpositive at node " + std::to_string(j), j,
                                 b.theta[j]);
        if (!(f.r2[j] > 0.0))
            throw ConvexityError("rotational radius nonpositive at node " + std::to_string(j), j,
                                 b.theta[j]);
    }
    return f;
}

namespace {

// Axial moments of the support against the rotationally invariant measure
// sin^{n-1}(theta) d theta, written in x = cos(theta).  The denominator of the
// offset uses the same quadrature applied to cos^2, which equals the
// normalized measure analytically and makes translates recenter exactly.
struct AxialMoments {
    double mass;    // integral of the weight
    double mean_u;  // weighted mean of u
    double offset;  // weighted <u, cos> / <cos, cos>
};

AxialMoments axial_moments(const SupportProfile& p) {
    const CosineBasis& b = p.basis();
    const double half_power = 0.5 * (p.dim() - 2);
    double mass = 0.0, num_u = 0.0, num_ux = 0.0, den_x2 = 0.0;
    for (size_t i = 0; i < b.gl_x.size(); ++i) {
        const double x = b.gl_x[i];
        double w = b.gl_w[i];
        if (half_power != 0.0) w *= std::pow(1.0 - x * x, half_power);
        const double uv = p.value_at(x);
        mass += w;
        num_u += w * uv;
        num_ux += w * uv * x;
        den_x2 += w * x * x;
    }
    return {mass, num_u / mass, num_ux / den_x2};
}

}  // namespace

double steiner_axial_offset(const SupportProfile& profile) {
    return axial_moments(profile).offset;
}

double mean_support(const SupportProfile& profile) { return axial_moments(profile).mean_u; }

std::pair<SupportProfile, double> steiner_recenter(const SupportProfile& profile) {
    const double z = steiner_axial_offset(profile);
    std::vector<double> c = profile.coeff();
    c[1] -= z;
    return {profile.with_coeffs(std::move(c)), z};
}

std::pair<double, double> radius_bounds(const SupportProfile& profile) {
    return {profile.min_support(), profile.max_support()};
}

std::vector<std::array<double, 2>> embed_profile(const SupportProfile& profile) {
    const CosineBasis& b = profile.basis();
    const auto u = profile.node_values();
    const auto up = profile.node_derivatives();
    std::vector<std::array<double, 2>> pts(b.N + 1);
    for (int j = 0; j <= b.N; ++j) {
        const double ct = std::cos(b.theta[j]);
        const double st = std::sin(b.theta[j]);
        pts[j] = {u[j] * ct - up[j] * st, u[j] * st + up[j] * ct};
    }
    return pts;
}

SupportProfile make_sphere(double R, int n, int modes, int nodes) {
    if (!(R > 0.0)) throw std::invalid_argument("sphere: radius must be positive");
    std::vector<double> c(modes + 1, 0.0);
    c[0] = R;
    return SupportProfile(n, std::move(c), nodes);
}

SupportProfile make_spheroid(double axial, double equatorial, int n, int modes, int nodes) {
    if (!(axial > 0.0) || !(equatorial > 0.0))
        throw std::invalid_argument("spheroid: semi-axes must be positive");
    const int M = modes;
    const int N = (nodes < 0) ? 2 * M : nodes;
    auto basis = std::make_shared<CosineBasis>(M, N);
    std::vector<double> exact(N + 1);
    for (int j = 0; j <= N; ++j) {
        const double ct = std::cos(basis->theta[j]);
        const double st = std::sin(basis->theta[j]);
        exact[j] = std::sqrt(axial * axial * ct * ct + equatorial * equatorial * st * st);
    }
    std::vector<double> coeff = basis->project(exact);
    return SupportProfile(n, std::move(coeff), N);
}

SupportProfile make_perturbed_sphere(double R, double eps, int mode, int n, int modes, int nodes) {
    if (!(R > 0.0)) throw std::invalid_argument("perturbed sphere: radius must be positive");
    if (mode < 2 || mode % 2 != 0)
        throw std::invalid_argument("perturbed sphere: mode must be even and >= 2");
    if (mode > modes) throw std::invalid_argument("perturbed sphere: mode exceeds resolution");
    std::vector<double> c(modes + 1, 0.0);
    c[0] = R;
    c[mode] = eps;
    return SupportProfile(n, std::move(c), nodes);
}

}  // namespace nhflow
