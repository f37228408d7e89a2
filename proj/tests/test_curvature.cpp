/// @file test_curvature.cpp
/// @brief Speed-function algebra: values, derivatives, the matrix second
/// derivative, shape invariants, dual speeds and the sampled condition report.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "nhflow/curvature.hpp"
#include "nhflow/oracles.hpp"

using namespace nhflow;

namespace {

PrincipalCurvatures kv(std::initializer_list<double> v) {
    return PrincipalCurvatures(std::vector<double>(v));
}

std::vector<SpeedFunction> all_builtins() {
    return {SpeedFunction::arithmetic_mean(), SpeedFunction::geometric_mean(),
            SpeedFunction::rms(), SpeedFunction::harmonic_mean(), SpeedFunction::power_mean(3.0)};
}

PrincipalCurvatures random_kappa(std::mt19937_64& rng, int n, double ratio_bound) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> k(n);
    const double scale = std::exp(2.0 * unif(rng) - 1.0);
    for (int i = 0; i < n; ++i) k[i] = scale * std::exp(unif(rng) * std::log(ratio_bound));
    return PrincipalCurvatures(k);
}

SymMat random_sym(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    SymMat B(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) B(i, j) = B(j, i) = gauss(rng);
    const double nb = B.frobenius();
    for (double& v : B.a) v /= nb;
    return B;
}

}  // namespace

// ============================================================================
// Values
// ============================================================================

TEST_CASE("speed values at fixed points") {
    CHECK(SpeedFunction::arithmetic_mean().value(kv({1, 2, 3})) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(SpeedFunction::geometric_mean().value(kv({1, 1, 1})) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(SpeedFunction::rms().value(kv({3, 4})) == doctest::Approx(5.0 / std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("domain rejection") {
    CHECK_THROWS_AS(kv({1.0, 0.0}), std::domain_error);
    CHECK_THROWS_AS(kv({1.0, -2.0}), std::domain_error);
    CHECK_THROWS_AS(kv({1.0}), std::domain_error);
}

TEST_CASE("normalization, homogeneity and permutation symmetry") {
    std::mt19937_64 rng(11);
    for (const auto& f : all_builtins()) {
        for (int n : {2, 3, 4}) {
            CHECK(f.value(PrincipalCurvatures(std::vector<double>(n, 1.0))) ==
                  doctest::Approx(1.0).epsilon(1e-13));
        }
        for (int rep = 0; rep < 50; ++rep) {
            const auto kappa = random_kappa(rng, 3, 8.0);
            const double fv = f.value(kappa);
            // degree-one homogeneity
            std::vector<double> scaled = kappa.values();
            for (double& v : scaled) v *= 3.7;
            CHECK(f.value(PrincipalCurvatures(scaled)) == doctest::Approx(3.7 * fv).epsilon(1e-12));
            // permutation invariance
            std::vector<double> perm = kappa.values();
            std::swap(perm[0], perm[2]);
            CHECK(f.value(PrincipalCurvatures(perm)) == doctest::Approx(fv).epsilon(1e-13));
        }
    }
}

// ============================================================================
// Gradients and Hessians
// ============================================================================

TEST_CASE("gradient fixed points") {
    const auto g1 = SpeedFunction::arithmetic_mean().gradient(kv({0.3, 5.0, 2.0}));
    for (double v : g1) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

    const auto g2 = SpeedFunction::geometric_mean().gradient(kv({1, 2}));
    CHECK(g2[0] == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-14));
    CHECK(g2[1] == doctest::Approx(std::sqrt(2.0) / 4.0).epsilon(1e-14));
}

TEST_CASE("Euler identity at sampled points, every builtin") {
    std::mt19937_64 rng(12);
    for (const auto& f : all_builtins()) {
        for (int n : {2, 3, 4}) {
            for (int rep = 0; rep < 100; ++rep) {
                const auto kappa = random_kappa(rng, n, 16.0);
                const auto g = f.gradient(kappa);
                double euler = 0.0;
                for (int i = 0; i < n; ++i) {
                    CHECK(g[i] > 0.0);
                    euler += g[i] * kappa[i];
                }
                CHECK(euler == doctest::Approx(f.value(kappa)).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("gradients match central differences") {
    std::mt19937_64 rng(13);
    for (const auto& f : all_builtins()) {
        for (int rep = 0; rep < 20; ++rep) {
            const auto kappa = random_kappa(rng, 3, 10.0);
            CHECK(fd_check_gradient(f, kappa, 1e-5 * kappa.min()) <= 1e-6);
        }
    }
}

TEST_CASE("hessian structure and finite differences") {
    std::mt19937_64 rng(14);
    // linear case: identically zero
    const SymMat h0 = SpeedFunction::arithmetic_mean().hessian(kv({1, 4, 2}));
    for (double v : h0.a) CHECK(v == 0.0);

    for (const auto& f : all_builtins()) {
        for (int rep = 0; rep < 30; ++rep) {
            const auto kappa = random_kappa(rng, 3, 10.0);
            const SymMat h = f.hessian(kappa);
            // symmetry and the radial degeneracy hess * kappa = 0
            const double scale = f.value(kappa) / (kappa.min() * kappa.min());
            for (int i = 0; i < 3; ++i) {
                CHECK(h(i, 2) == doctest::Approx(h(2, i)).epsilon(1e-13));
                double dot = 0.0;
                for (int j = 0; j < 3; ++j) dot += h(i, j) * kappa[j];
                CHECK(std::abs(dot) <= 1e-10 * std::max(scale, 1.0));
            }
        }
        CHECK(fd_check_hessian(f, kv({1, 2}), 1e-4) <= 1e-5);
        CHECK(fd_check_hessian(f, kv({1, 2, 3}), 1e-4) <= 1e-5);
    }
}

// ============================================================================
// Matrix second derivative in direction B
// ============================================================================

TEST_CASE("second derivative form: linear speed vanishes") {
    std::mt19937_64 rng(15);
    const auto f = SpeedFunction::arithmetic_mean();
    for (int rep = 0; rep < 20; ++rep) {
        const auto kappa = random_kappa(rng, 3, 6.0);
        const SymMat B = random_sym(rng, 3);
        CHECK(std::abs(f.second_derivative_form(kappa, B)) <= 1e-14);
    }
}

TEST_CASE("second derivative form: sign by concavity class") {
    std::mt19937_64 rng(16);
    for (int rep = 0; rep < 200; ++rep) {
        const auto kappa = random_kappa(rng, 3, 12.0);
        const SymMat B = random_sym(rng, 3);
        const double tol = 1e-10 * SpeedFunction::geometric_mean().value(kappa);
        CHECK(SpeedFunction::geometric_mean().second_derivative_form(kappa, B) <= tol);
        CHECK(SpeedFunction::harmonic_mean().second_derivative_form(kappa, B) <= tol);
        CHECK(SpeedFunction::rms().second_derivative_form(kappa, B) >=
              -1e-10 * SpeedFunction::rms().value(kappa));
        CHECK(SpeedFunction::power_mean(3.0).second_derivative_form(kappa, B) >=
              -1e-10 * SpeedFunction::power_mean(3.0).value(kappa));
    }
}

TEST_CASE("second derivative form matches eigenvalue perturbation") {
    std::mt19937_64 rng(17);
    for (const auto& f : all_builtins()) {
        for (int rep = 0; rep < 10; ++rep) {
            const auto kappa = kv({1.0 + 0.1 * rep, 2.0, 3.3});
            const SymMat B = random_sym(rng, 3);
            const double direct = f.second_derivative_form(kappa, B);
            const double oracle = eigenvalue_perturbation_form(f, kappa, B, 1e-4);
            const double scale = std::max(1.0, f.value(kappa) / (kappa.min() * kappa.min()));
            CHECK(std::abs(direct - oracle) <= 1e-5 * scale);
        }
    }
    // rms at the fixed point of the contract: random direction
    const SymMat B = random_sym(rng, 2);
    const auto kappa = kv({1, 2});
    const auto f = SpeedFunction::rms();
    CHECK(std::abs(f.second_derivative_form(kappa, B) -
                   eigenvalue_perturbation_form(f, kappa, B, 1e-4)) <= 1e-5);
}

TEST_CASE("second derivative form: tie handling is continuous") {
    const auto f = SpeedFunction::geometric_mean();
    SymMat B(2);
    B(0, 0) = 0.3; B(1, 1) = -0.2; B(0, 1) = B(1, 0) = 0.7;
    bool tie = false;
    const double at_tie = f.second_derivative_form(kv({1.0, 1.0 + 1e-12}), B, &tie);
    CHECK(tie);
    const double near_tie = f.second_derivative_form(kv({1.0, 1.0 + 1e-5}), B, &tie);
    CHECK(!tie);
    CHECK(at_tie == doctest::Approx(near_tie).epsilon(1e-3));
}

// ============================================================================
// Shape invariants
// ============================================================================

TEST_CASE("shape invariants fixed points") {
    const ShapeInvariants s = shape_invariants(kv({1, 2}));
    CHECK(s.H == doctest::Approx(3.0));
    CHECK(s.normA2 == doctest::Approx(5.0));
    CHECK(s.normA02 == doctest::Approx(0.5));
    CHECK(s.C == doctest::Approx(9.0));
    CHECK(s.K == doctest::Approx(2.0));
    CHECK(s.pinch_ratio == doctest::Approx(2.0));

    const ShapeInvariants u = shape_invariants(kv({0.7, 0.7, 0.7}));
    CHECK(u.normA02 == 0.0);
    CHECK(u.pinch_ratio == 1.0);
}

TEST_CASE("trace-free norm: both formulas agree") {
    std::mt19937_64 rng(18);
    for (int n : {2, 3, 4}) {
        for (int rep = 0; rep < 200; ++rep) {
            const auto kappa = random_kappa(rng, n, 16.0);
            const ShapeInvariants s = shape_invariants(kappa);
            const double alt = s.normA2 - s.H * s.H / n;
            CHECK(s.normA02 == doctest::Approx(alt).epsilon(1e-12));
            CHECK(s.normA02 >= 0.0);
        }
    }
}

// ============================================================================
// Dual speed
// ============================================================================

TEST_CASE("dual speed fixed points") {
    CHECK(SpeedFunction::geometric_mean().dual_value({1, 1, 1}) == doctest::Approx(1.0));
    // the dual of the harmonic mean is the arithmetic mean of the radii
    CHECK(SpeedFunction::harmonic_mean().dual_value({1, 2, 6}) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(SpeedFunction::rms().dual_value({1, 2}) ==
          doctest::Approx(std::sqrt(8.0 / 5.0)).epsilon(1e-14));
}

TEST_CASE("dual speed: closed form matches the dual builtin, homogeneous") {
    std::mt19937_64 rng(19);
    for (const auto& f : all_builtins()) {
        const SpeedFunction d = f.dual();
        for (int rep = 0; rep < 50; ++rep) {
            const auto r = random_kappa(rng, 3, 9.0);
            CHECK(f.dual_value(r.values()) == doctest::Approx(d.value(r)).epsilon(1e-12));
            std::vector<double> scaled = r.values();
            for (double& v : scaled) v *= 2.5;
            CHECK(f.dual_value(scaled) == doctest::Approx(2.5 * f.dual_value(r.values())).epsilon(1e-12));
        }
    }
}

// ============================================================================
// Axisymmetric fast path
// ============================================================================

TEST_CASE("axisymmetric evaluation agrees with the vector path") {
    std::mt19937_64 rng(20);
    std::uniform_real_distribution<double> unif(0.2, 5.0);
    for (const auto& f : all_builtins()) {
        for (int n : {2, 3, 5}) {
            for (int rep = 0; rep < 40; ++rep) {
                const double ka = unif(rng), kr = unif(rng);
                std::vector<double> k(n, kr);
                k[0] = ka;
                const PrincipalCurvatures kappa(k);
                CHECK(f.value_axisym(ka, kr, n) == doctest::Approx(f.value(kappa)).epsilon(1e-14));
                double ga, gr;
                f.gradient_axisym(ka, kr, n, ga, gr);
                const auto g = f.gradient(kappa);
                CHECK(ga == doctest::Approx(g[0]).epsilon(1e-13));
                CHECK(gr == doctest::Approx(g[1]).epsilon(1e-13));
            }
        }
    }
}

// ============================================================================
// Speed-versus-mean-curvature comparisons
// ============================================================================

TEST_CASE("convexity comparisons against the mean") {
    std::mt19937_64 rng(21);
    struct Case { SpeedFunction f; bool convex; };
    const Case cases[] = {{SpeedFunction::rms(), true},
                          {SpeedFunction::power_mean(3.0), true},
                          {SpeedFunction::geometric_mean(), false},
                          {SpeedFunction::harmonic_mean(), false}};
    for (const auto& c : cases) {
        for (int n : {2, 3, 4}) {
            for (int rep = 0; rep < 100; ++rep) {
                const auto kappa = random_kappa(rng, n, 16.0);
                const ShapeInvariants s = shape_invariants(kappa);
                const double fv = c.f.value(kappa);
                const auto g = c.f.gradient(kappa);
                double trace = 0.0, fhh = 0.0;
                for (int i = 0; i < n; ++i) {
                    trace += g[i];
                    fhh += g[i] * kappa[i] * kappa[i];
                }
                const double tol = 1e-12 * s.H;
                if (c.convex) {
                    CHECK(fv >= s.H / n - tol);
                    CHECK(trace <= 1.0 + 1e-12);
                    CHECK(fv * s.normA2 - s.H * fhh <= tol * s.normA2);
                    CHECK(fv * s.C - s.normA2 * fhh <= tol * s.C);
                } else {
                    CHECK(fv <= s.H / n + tol);
                    CHECK(trace >= 1.0 - 1e-12);
                    CHECK(fv * s.normA2 - s.H * fhh >= -tol * s.normA2);
                    CHECK(fv * s.C - s.normA2 * fhh >= -tol * s.C);
                }
            }
        }
    }
}

// ============================================================================
// Condition report
// ============================================================================

TEST_CASE("condition report classifies the builtins") {
    const FConditionReport geo = condition_report_f(SpeedFunction::geometric_mean(), 3, 400, 16.0);
    CHECK(geo.concavity_class == ConcavityClass::Concave);
    CHECK(geo.inverse_concave_ok);
    CHECK(geo.vanishes_on_boundary_ok);
    CHECK(geo.dual_vanishes_on_boundary_ok);
    CHECK(geo.normalization_ok);
    CHECK(geo.monotone_ok);

    const FConditionReport r = condition_report_f(SpeedFunction::rms(), 3, 400, 16.0);
    CHECK(r.concavity_class == ConcavityClass::Convex);
    CHECK_FALSE(r.vanishes_on_boundary_ok);
    CHECK(r.inverse_concave_ok);  // dual is the (-2)-power mean, concave

    const FConditionReport a = condition_report_f(SpeedFunction::arithmetic_mean(), 3, 400, 16.0);
    CHECK(a.concavity_class == ConcavityClass::Linear);
    CHECK(a.homogeneity_residual <= 1e-12);
}

TEST_CASE("condition report is stable across seeds") {
    for (std::uint64_t seed : {1ull, 99ull, 31415ull}) {
        const FConditionReport rep =
            condition_report_f(SpeedFunction::power_mean(3.0), 3, 300, 12.0, seed);
        CHECK(rep.concavity_class == ConcavityClass::Convex);
        CHECK(rep.monotone_ok);
        CHECK_FALSE(rep.vanishes_on_boundary_ok);
    }
}
