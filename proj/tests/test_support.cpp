/// @file test_support.cpp
/// @brief Cosine-basis support profiles: construction, radii of curvature,
/// recentering, bounds and the embedding of the generating curve.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nhflow/support.hpp"

using namespace nhflow;

namespace {
constexpr double kPi = std::numbers::pi;
}

// ============================================================================
// Construction
// ============================================================================

TEST_CASE("sphere profile") {
    const SupportProfile s = make_sphere(1.0, 2, 16);
    CHECK(s.coeff()[0] == 1.0);
    for (size_t m = 1; m < s.coeff().size(); ++m) CHECK(s.coeff()[m] == 0.0);
    const CurvatureField f = radii(s);
    for (int j = 0; j <= s.nodes(); ++j) {
        CHECK(f.r1[j] == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(f.r2[j] == doctest::Approx(1.0).epsilon(1e-15));
    }
}

TEST_CASE("spheroid with equal axes reduces to the sphere") {
    const SupportProfile s = make_spheroid(1.0, 1.0, 3, 32);
    CHECK(s.coeff()[0] == doctest::Approx(1.0).epsilon(1e-13));
    for (size_t m = 1; m < s.coeff().size(); ++m) CHECK(std::abs(s.coeff()[m]) <= 1e-12);
}

TEST_CASE("spheroid collocation fit is spectrally accurate") {
    for (double b : {1.15, 2.0}) {
        const SupportProfile s = make_spheroid(1.0, b, 3, 64);
        double worst = 0.0;
        for (int j = 0; j <= 1000; ++j) {
            const double th = kPi * j / 1000;
            const double exact = std::sqrt(std::cos(th) * std::cos(th) +
                                           b * b * std::sin(th) * std::sin(th));
            worst = std::max(worst, std::abs(s.value_at(std::cos(th)) - exact));
        }
        CHECK(worst < 1e-10);
    }
}

TEST_CASE("spheroid curvatures at pole and equator") {
    const double a = 1.0, b = 1.15;
    const SupportProfile s = make_spheroid(a, b, 3, 64);
    const CurvatureField f = radii(s);
    const int N = s.nodes();
    CHECK(f.r1[0] == doctest::Approx(b * b / a).epsilon(1e-10));      // pole, both radii
    CHECK(f.r2[0] == doctest::Approx(b * b / a).epsilon(1e-10));
    CHECK(f.r1[N / 2] == doctest::Approx(a * a / b).epsilon(1e-10));  // equator meridional
    CHECK(f.r2[N / 2] == doctest::Approx(b).epsilon(1e-10));          // equator rotational
}

TEST_CASE("perturbed sphere radii in closed form") {
    const double eps = 0.1;
    const SupportProfile s = make_perturbed_sphere(1.0, eps, 2, 2, 16);
    const CurvatureField f = radii(s);
    const CosineBasis& b = s.basis();
    for (int j = 0; j <= b.N; ++j) {
        const double th = b.theta[j];
        CHECK(f.r1[j] == doctest::Approx(1.0 - 3.0 * eps * std::cos(2 * th)).epsilon(1e-13));
        const double r2_exact = (j == 0 || j == b.N)
                                    ? 1.0 - 3.0 * eps
                                    : 1.0 - eps - 2.0 * eps * std::cos(th) * std::cos(th);
        CHECK(f.r2[j] == doctest::Approx(r2_exact).epsilon(1e-12));
    }
    CHECK_THROWS_AS(make_perturbed_sphere(1.0, 0.4, 2, 2, 16), ConvexityError);
    CHECK_THROWS_AS(make_perturbed_sphere(1.0, 0.1, 3, 2, 16), std::invalid_argument);
}

TEST_CASE("convexity error names the first violating node") {
    try {
        make_perturbed_sphere(1.0, 0.4, 2, 2, 16);
        FAIL("expected a convexity error");
    } catch (const ConvexityError& e) {
        CHECK(e.node == 0);  // r1(0) = 1 - 3 eps < 0 first at the pole
        CHECK(std::string(e.what()).find("node 0") != std::string::npos);
    }
}

// ============================================================================
// Basis properties
// ============================================================================

TEST_CASE("spectral differentiation is exact on the basis") {
    const CosineBasis b(16, 32);
    for (int m = 0; m <= 16; ++m) {
        std::vector<double> coeff(17, 0.0);
        coeff[m] = 1.0;
        std::vector<double> dd;
        b.nodes_from_coeffs(coeff, b.eval_d2, dd);
        for (int j = 0; j <= b.N; ++j) {
            CHECK(dd[j] == doctest::Approx(-double(m) * m * std::cos(m * b.theta[j]))
                               .epsilon(1e-12).scale(std::max(1.0, double(m) * m)));
        }
    }
}

TEST_CASE("pole derivative rows vanish identically") {
    const SupportProfile s = make_spheroid(1.0, 1.7, 3, 48);
    const auto up = s.node_derivatives();
    CHECK(up.front() == 0.0);
    CHECK(up.back() == 0.0);
}

TEST_CASE("projection inverts evaluation on retained modes") {
    const CosineBasis b(12, 24);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> coeff(13);
    for (double& c : coeff) c = gauss(rng);
    std::vector<double> nodes;
    b.nodes_from_coeffs(coeff, b.eval, nodes);
    const std::vector<double> back = b.project(nodes);
    for (int m = 0; m <= 12; ++m) CHECK(back[m] == doctest::Approx(coeff[m]).epsilon(1e-13));
    // constants project to an exactly radial result
    const std::vector<double> c0 = b.project(std::vector<double>(b.N + 1, 0.73));
    CHECK(c0[0] == doctest::Approx(0.73).epsilon(1e-15));
    for (int m = 1; m <= 12; ++m) CHECK(c0[m] == 0.0);
}

TEST_CASE("pole umbilicity and the approach rate at adjacent nodes") {
    double prev = 0.0;
    for (int M : {16, 32, 64}) {
        const SupportProfile s = make_spheroid(1.0, 1.5, 3, M);
        const CurvatureField f = radii(s);
        CHECK(f.r2[0] == f.r1[0]);
        CHECK(f.r2[s.nodes()] == f.r1[s.nodes()]);
        const double gap = std::abs(f.r2[1] - f.r1[1]);
        if (prev > 0.0) CHECK(gap < prev / 3.0);  // second-order in the node spacing
        prev = gap;
    }
}

TEST_CASE("rotational radius matches an extended-precision series oracle") {
    const SupportProfile s = make_spheroid(1.0, 1.4, 3, 32);
    const CosineBasis& b = s.basis();
    const CurvatureField f = radii(s);
    // u + u' cot(theta) through the Chebyshev second-kind recurrence:
    // sin(m t)/sin(t) = U_{m-1}(cos t), so u' cot = -sum a_m m U_{m-1}(x) x.
    for (int j : {1, 2, b.N / 2, b.N - 1}) {
        const long double t = b.theta[j];
        const long double x = std::cos(t);
        std::vector<long double> U(b.M + 1);
        U[0] = 1.0L;
        U[1] = 2.0L * x;
        for (int m = 2; m <= b.M; ++m) U[m] = 2.0L * x * U[m - 1] - U[m - 2];
        long double oracle = s.coeff()[0];
        for (int m = 1; m <= b.M; ++m) {
            const long double am = s.coeff()[m];
            oracle += am * std::cos(m * t);       // u
            oracle -= am * m * U[m - 1] * x;      // u' cot(theta)
        }
        CHECK(f.r2[j] == doctest::Approx(static_cast<double>(oracle)).epsilon(1e-8));
    }
}

// ============================================================================
// Recentering
// ============================================================================

TEST_CASE("recentering fixed points") {
    for (int n : {2, 3}) {
        const SupportProfile s = make_sphere(2.0, n, 16);
        const auto [rs, z] = steiner_recenter(s);
        CHECK(std::abs(z) <= 1e-14);

        // translated sphere: support 1 + delta cos(theta)
        std::vector<double> c(17, 0.0);
        c[0] = 1.0;
        c[1] = 0.25;
        const SupportProfile t(n, std::move(c));
        const auto [rt, zt] = steiner_recenter(t);
        CHECK(zt == doctest::Approx(0.25).epsilon(1e-12));
        CHECK(rt.coeff()[1] == doctest::Approx(0.0).epsilon(1e-13));
        CHECK(rt.coeff()[0] == doctest::Approx(1.0).epsilon(1e-13));
    }
}

TEST_CASE("recentering is idempotent and radii are translation covariant") {
    std::vector<double> c(25, 0.0);
    c[0] = 1.0; c[1] = 0.15; c[2] = 0.05; c[4] = 0.02;
    const SupportProfile p(3, std::vector<double>(c));
    const auto [q, z1] = steiner_recenter(p);
    const auto [q2, z2] = steiner_recenter(q);
    CHECK(std::abs(z2) < 1e-10);
    for (size_t m = 0; m < c.size(); ++m)
        CHECK(q.coeff()[m] == doctest::Approx(q2.coeff()[m]).epsilon(1e-12));

    // translation only shifts the first mode; both radii are unchanged
    const CurvatureField fp = radii(p);
    const CurvatureField fq = radii(q);
    for (int j = 0; j <= p.nodes(); ++j) {
        CHECK(fp.r1[j] == doctest::Approx(fq.r1[j]).epsilon(1e-10));
        CHECK(fp.r2[j] == doctest::Approx(fq.r2[j]).epsilon(1e-10));
    }
    (void)z1;
}

// ============================================================================
// Bounds and embedding
// ============================================================================

TEST_CASE("support bounds") {
    const SupportProfile s = make_sphere(1.5, 2, 16);
    const auto [lo, hi] = radius_bounds(s);
    CHECK(lo == doctest::Approx(1.5));
    CHECK(hi == doctest::Approx(1.5));

    const SupportProfile p = make_perturbed_sphere(1.0, 0.08, 2, 2, 32);
    const auto [plo, phi_] = radius_bounds(p);
    CHECK(plo == doctest::Approx(0.92).epsilon(1e-12));
    CHECK(phi_ == doctest::Approx(1.08).epsilon(1e-12));
    CHECK(phi_ / plo >= 1.0);
}

TEST_CASE("embedding fixed points") {
    const SupportProfile s = make_sphere(1.0, 2, 16);
    const auto pts = embed_profile(s);
    const int N = s.nodes();
    CHECK(pts[0][0] == doctest::Approx(1.0));
    CHECK(pts[0][1] == doctest::Approx(0.0));
    CHECK(pts[N / 2][0] == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(pts[N / 2][1] == doctest::Approx(1.0));

    // translated sphere embeds as the shifted circle
    std::vector<double> c(17, 0.0);
    c[0] = 1.0; c[1] = 0.3;
    const SupportProfile t(2, std::move(c));
    for (const auto& pt : embed_profile(t)) {
        const double r = std::hypot(pt[0] - 0.3, pt[1]);
        CHECK(r == doctest::Approx(1.0).epsilon(1e-12));
    }
}
