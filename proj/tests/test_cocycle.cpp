#include <doctest.h>

#include <cmath>

#include "centerfield/cocycle.hpp"
#include "centerfield/errors.hpp"
#include "centerfield/systems.hpp"

using namespace centerfield;

namespace {

Eigen::VectorXd vec2(double a, double b) {
    Eigen::VectorXd v(2);
    v << a, b;
    return v;
}

BenchmarkSystem planar() { return build_benchmark("det-2d"); }

/// Affine random map x -> A x + b(omega) with its stationary point solved
/// from the geometric series (A contracting).
SystemBundle affine_bundle(const Eigen::MatrixXd& a) {
    SystemBundle bundle;
    bundle.field = FiberField::constant(FiberSpec{.dimension = 2});
    bundle.cocycle.step = [a](const Realization& omega, const Eigen::VectorXd& v) {
        return Eigen::VectorXd(a * v + omega.symbol(0));
    };
    bundle.cocycle.differential = [a](const Realization&, const Eigen::VectorXd&) { return a; };
    bundle.stationary.at = [a](const Realization& omega) {
        // Y_omega = sum_{j >= 0} A^j b(theta^{-j-1} omega)
        Eigen::VectorXd y = Eigen::VectorXd::Zero(2);
        Eigen::MatrixXd power = Eigen::MatrixXd::Identity(2, 2);
        for (int j = 0; j < 120; ++j) {
            y += power * omega.symbol(-j - 1);
            power = a * power;
        }
        return y;
    };
    bundle.stationary.residual_tol = 1e-12;
    bundle.cutoff = CutoffSpec::constants(0.5);
    bundle.linear = linearize(bundle.cocycle, bundle.stationary, bundle.field);
    return bundle;
}

DriverSpec small_noise(std::uint64_t seed = 5) {
    DriverSpec spec;
    spec.kind = DriverKind::iid_sequence;
    spec.dimension = 2;
    spec.low = -0.1;
    spec.high = 0.1;
    spec.seed = seed;
    return spec;
}

} // namespace

TEST_CASE("iterate: zero steps is the identity") {
    BenchmarkSystem sys = planar();
    Realization omega(sys.driver);
    const Eigen::VectorXd x = vec2(0.3, -0.2);
    CHECK(iterate(sys.bundle.cocycle, sys.bundle.field, omega, x, 0) == x);
}

TEST_CASE("iterate: constant linear map composes to the matrix power") {
    Eigen::MatrixXd a(2, 2);
    a << 0.4, 0.1, -0.2, 0.3;
    SystemBundle bundle = affine_bundle(a);
    DriverSpec driver;
    driver.kind = DriverKind::deterministic_point;
    driver.point = {0.0, 0.0};
    Realization omega(driver);

    const Eigen::VectorXd x = vec2(1.0, -2.0);
    const Eigen::VectorXd expected = a * a * a * x;
    CHECK((iterate(bundle.cocycle, bundle.field, omega, x, 3) - expected).norm() < 1e-15);
}

TEST_CASE("iterate: one step of the planar benchmark") {
    BenchmarkSystem sys = planar();
    Realization omega(sys.driver);
    const Eigen::VectorXd out = iterate(sys.bundle.cocycle, sys.bundle.field, omega, vec2(0.1, 0.0), 1);
    CHECK(out[0] == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(out[1] == doctest::Approx(0.01).epsilon(1e-15));
}

TEST_CASE("cocycle law holds exactly") {
    BenchmarkSystem sys = build_benchmark("random-diag");
    Realization omega(sys.driver);
    const Eigen::VectorXd x = (Eigen::VectorXd(3) << 0.02, -0.01, 0.03).finished();
    for (std::int64_t m : {0, 1, 3, 7, 20}) {
        for (std::int64_t n : {0, 2, 5, 20}) {
            const Eigen::VectorXd joint = iterate(sys.bundle.cocycle, sys.bundle.field, omega, x, n + m);
            const Eigen::VectorXd staged = iterate(
                sys.bundle.cocycle, sys.bundle.field, shift(omega, m),
                iterate(sys.bundle.cocycle, sys.bundle.field, omega, x, m), n);
            CHECK(joint == staged); // same arithmetic, bitwise equal
        }
    }
}

TEST_CASE("linearize: planar benchmark at the origin") {
    BenchmarkSystem sys = planar();
    Realization omega(sys.driver);
    const Eigen::MatrixXd psi = linearize_at(sys.bundle.cocycle, sys.bundle.stationary,
                                             sys.bundle.field, omega);
    Eigen::MatrixXd expected(2, 2);
    expected << 1.0, 0.0, 0.0, 0.5;
    CHECK((psi - expected).norm() < 1e-14);
    check_linearization(sys.bundle.cocycle, sys.bundle.stationary, sys.bundle.field, omega, psi);
}

TEST_CASE("linearize: affine map returns its matrix at the random stationary point") {
    Eigen::MatrixXd a(2, 2);
    a << 0.4, 0.1, -0.2, 0.3;
    SystemBundle bundle = affine_bundle(a);
    Realization omega(small_noise());

    // stationarity of the geometric-series point
    const Eigen::VectorXd y = bundle.stationary.at(omega);
    const Eigen::VectorXd pushed = bundle.cocycle.step(omega, y);
    CHECK((pushed - bundle.stationary.at(shift(omega, 1))).norm() < 1e-12);

    const Eigen::MatrixXd psi = linearize_at(bundle.cocycle, bundle.stationary, bundle.field, omega);
    CHECK((psi - a).norm() < 1e-14);
}

TEST_CASE("linearize: finite differences agree with the analytic differential") {
    BenchmarkSystem sys = build_benchmark("det-3d");
    Realization omega(sys.driver);
    const Eigen::MatrixXd analytic = linearize_at(sys.bundle.cocycle, sys.bundle.stationary,
                                                  sys.bundle.field, omega);
    Eigen::MatrixXd expected = Eigen::Vector3d(2.0, 1.0, 0.5).asDiagonal();
    CHECK((analytic - expected).norm() < 1e-14);

    Cocycle no_diff = sys.bundle.cocycle;
    no_diff.differential = nullptr;
    const Eigen::MatrixXd fd = linearize_at(no_diff, sys.bundle.stationary, sys.bundle.field, omega);
    CHECK((fd - expected).norm() < 1e-8);
}

TEST_CASE("remainder of the planar benchmark subtracts the linear part") {
    BenchmarkSystem sys = planar();
    Realization omega(sys.driver);
    const Eigen::VectorXd xi = vec2(0.3, -0.7);
    const Eigen::VectorXd p = remainder(sys.bundle.cocycle, sys.bundle.stationary, sys.bundle.linear,
                                        sys.bundle.field, omega, xi);
    CHECK(p[0] == doctest::Approx(0.3 * -0.7).epsilon(1e-14));
    CHECK(p[1] == doctest::Approx(0.09).epsilon(1e-14));

    const Eigen::VectorXd tiny = vec2(1e-3, 1e-3);
    const Eigen::VectorXd pt = remainder(sys.bundle.cocycle, sys.bundle.stationary,
                                         sys.bundle.linear, sys.bundle.field, omega, tiny);
    CHECK(pt.norm() <= 2e-6);
}

TEST_CASE("remainder of a linear cocycle vanishes") {
    Eigen::MatrixXd a(2, 2);
    a << 0.4, 0.1, -0.2, 0.3;
    SystemBundle bundle = affine_bundle(a);
    Realization omega(small_noise());
    for (double scale : {0.01, 0.3, 2.0}) {
        const Eigen::VectorXd p = remainder(bundle.cocycle, bundle.stationary, bundle.linear,
                                            bundle.field, omega, vec2(scale, -scale));
        CHECK(p.norm() < 1e-12);
    }
}

TEST_CASE("remainder outside the validity radius is rejected") {
    BenchmarkSystem sys = planar();
    Realization omega(sys.driver);
    CHECK_THROWS_AS(remainder(sys.bundle.cocycle, sys.bundle.stationary, sys.bundle.linear,
                              sys.bundle.field, omega, vec2(2.0, 0.0), 1.0),
                    Error);
}

TEST_CASE("remainder order: quadratic decay along shrinking vectors") {
    BenchmarkSystem sys = planar();
    Realization omega(sys.driver);
    double previous = std::numeric_limits<double>::infinity();
    for (int k = 3; k <= 12; ++k) {
        const double scale = std::pow(2.0, -k);
        const Eigen::VectorXd xi = vec2(scale, scale) / std::sqrt(2.0);
        const double ratio = remainder(sys.bundle.cocycle, sys.bundle.stationary, sys.bundle.linear,
                                       sys.bundle.field, omega, xi)
                                 .norm() /
                             scale;
        CHECK(ratio < previous);
        previous = ratio;
    }
    CHECK(previous < 1e-3);
}

TEST_CASE("bump satisfies its three constraints") {
    CHECK(bump(0.5) == 1.0);
    CHECK(bump(-1.0) == 1.0);
    CHECK(bump(2.5) == 0.0);
    CHECK(bump(-2.0) == 0.0);
    for (double x = -3.0; x <= 3.0; x += 0.001) {
        const double v = bump(x);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        const double derivative = (bump(x + 5e-7) - bump(x - 5e-7)) / 1e-6;
        CHECK(std::abs(derivative) <= 2.0);
    }
}

TEST_CASE("cutoff remainder: exact inside, zero beyond twice the radius") {
    BenchmarkSystem sys = planar();
    Realization omega(sys.driver);
    const double rho = sys.bundle.cutoff.rho_at(shift(omega, 1));

    const Eigen::VectorXd inside = vec2(rho / 2.0, 0.0);
    const Eigen::VectorXd p = remainder(sys.bundle.cocycle, sys.bundle.stationary, sys.bundle.linear,
                                        sys.bundle.field, omega, inside);
    CHECK((cutoff_remainder(sys.bundle, omega, inside) - p).norm() == 0.0);

    const Eigen::VectorXd outside = vec2(3.0 * rho, 0.0);
    CHECK(cutoff_remainder(sys.bundle, omega, outside).norm() == 0.0);
}

TEST_CASE("cutoff remainder satisfies the global Lipschitz estimate") {
    BenchmarkSystem sys = planar();
    Realization omega(sys.driver);
    const Realization next = shift(omega, 1);
    const double rho = sys.bundle.cutoff.rho_at(next);
    const double f = sys.bundle.cutoff.f_at(next);
    const double bound_factor = 5.0 * f * sys.bundle.cutoff.modulus_h(4.0 * rho);

    detail::SplitMix rng(17);
    for (int trial = 0; trial < 500; ++trial) {
        const Eigen::VectorXd u = rng.vector(2) * 2.5 * rho;
        const Eigen::VectorXd w = rng.vector(2) * 2.5 * rho;
        const double gap = (u - w).norm();
        if (gap < 1e-14) continue;
        const double spread =
            (cutoff_remainder(sys.bundle, omega, u) - cutoff_remainder(sys.bundle, omega, w)).norm();
        CHECK(spread <= bound_factor * gap * (1.0 + 1e-9));
    }
}

TEST_CASE("verify_assumption: linear cocycle has zero violation ratio") {
    Eigen::MatrixXd a(2, 2);
    a << 0.4, 0.1, -0.2, 0.3;
    SystemBundle bundle = affine_bundle(a);
    Realization omega(small_noise());
    AssumptionOptions options;
    options.orbit_samples = 8;
    const AssumptionReport report = verify_assumption(bundle, omega, options);
    CHECK(report.max_violation_ratio < 1e-10);
    CHECK(report.f_slope_ok);
    CHECK(report.rho_slope_ok);
}

TEST_CASE("verify_assumption: planar benchmark with f = 1 and h = id on the unit ball") {
    BenchmarkSystem sys = planar();
    Realization omega(sys.driver);
    AssumptionOptions options;
    options.orbit_samples = 4;
    options.pairs_per_index = 64;
    options.sample_radius = 1.0;
    const AssumptionReport report = verify_assumption(sys.bundle, omega, options);
    CHECK(report.max_violation_ratio <= 1.0 + 1e-12);
    CHECK(report.max_violation_ratio > 0.1); // the bound is actually exercised
    CHECK(report.samples > 0);
}

TEST_CASE("verify_assumption: constant moduli have zero log slope") {
    BenchmarkSystem sys = build_benchmark("random-diag");
    Realization omega(sys.driver);
    AssumptionOptions options;
    options.orbit_samples = 24;
    options.pairs_per_index = 4;
    options.sample_radius = 0.05;
    const AssumptionReport report = verify_assumption(sys.bundle, omega, options);
    CHECK(std::abs(report.f_slope) < 1e-12);
    CHECK(std::abs(report.rho_slope) < 1e-12);
    CHECK(report.max_violation_ratio <= 1.0 + 1e-9);
}

TEST_CASE("stationarity drift stays within the per-step tolerance") {
    for (const char* name : {"det-2d", "additive-noise", "driven-ode"}) {
        BenchmarkSystem sys = build_benchmark(name);
        Realization omega(sys.driver);
        Eigen::VectorXd state = sys.bundle.stationary.at(omega);
        for (std::int64_t n = 1; n <= 50; ++n) {
            state = sys.bundle.cocycle.step(shift(omega, n - 1), state);
            const double gap =
                (state - sys.bundle.stationary.at(shift(omega, n))).norm();
            CHECK(gap <= static_cast<double>(n) * sys.bundle.stationary.residual_tol);
        }
    }
}

TEST_CASE("chain rule: matrix products match the multi-step differential") {
    BenchmarkSystem sys = build_benchmark("additive-noise");
    Realization omega(sys.driver);
    const std::int64_t steps = 6;

    Eigen::MatrixXd product = Eigen::MatrixXd::Identity(2, 2);
    for (std::int64_t j = 0; j < steps; ++j)
        product = sys.bundle.linear.matrix(shift(omega, j)) * product;

    // finite differences of the composed map at the stationary point
    const Eigen::VectorXd y = sys.bundle.stationary.at(omega);
    const double h = 1e-6;
    Eigen::MatrixXd fd(2, 2);
    for (int c = 0; c < 2; ++c) {
        Eigen::VectorXd up = y, down = y;
        up[c] += h;
        down[c] -= h;
        fd.col(c) = (iterate(sys.bundle.cocycle, sys.bundle.field, omega, up, steps) -
                     iterate(sys.bundle.cocycle, sys.bundle.field, omega, down, steps)) /
                    (2.0 * h);
    }
    CHECK((product - fd).norm() < 1e-6);
}

TEST_CASE("estimate_modulus_f recovers the scale of the remainder bound") {
    BenchmarkSystem sys = planar();
    Realization omega(sys.driver);
    const double f = estimate_modulus_f(sys.bundle, omega, 1.0, 4, 64);
    CHECK(f > 0.3);
    CHECK(f <= 1.5);
}

TEST_CASE("a wrong differential fails the consistency ladder") {
    BenchmarkSystem sys = planar();
    Realization omega(sys.driver);
    Eigen::MatrixXd wrong(2, 2);
    wrong << 1.0, 0.3, 0.0, 0.5; // off-diagonal entry does not match the map
    CHECK_THROWS_AS(
        check_linearization(sys.bundle.cocycle, sys.bundle.stationary, sys.bundle.field, omega, wrong),
        Error);
}

TEST_CASE("cutoff engaged outside a finite validity radius is an error") {
    BenchmarkSystem sys = planar();
    sys.bundle.cutoff = CutoffSpec::constants(0.05, 1.0, 1.0, /*validity=*/0.06);
    Realization omega(sys.driver);
    // bump is still positive at |xi| = 0.07 < 2 rho, but P is undefined there
    CHECK_THROWS_AS(cutoff_remainder(sys.bundle, omega, vec2(0.07, 0.0)), Error);
    // far outside the bump support the zero extension needs no evaluation
    CHECK(cutoff_remainder(sys.bundle, omega, vec2(0.5, 0.0)).norm() == 0.0);
}
