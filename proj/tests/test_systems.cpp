#include <doctest.h>

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "centerfield/errors.hpp"
#include "centerfield/manifold.hpp"
#include "centerfield/pipeline.hpp"
#include "centerfield/systems.hpp"

using namespace centerfield;

TEST_CASE("catalog lists the six benchmarks") {
    const auto names = catalog_names();
    REQUIRE(names.size() == 6);
    CHECK(names[0] == "det-2d");
    CHECK(names[1] == "det-3d");
    CHECK(names[2] == "random-diag");
    CHECK(names[3] == "additive-noise");
    CHECK(names[4] == "delay-companion");
    CHECK(names[5] == "driven-ode");
    for (const auto& [name, description] : catalog()) CHECK(!description.empty());
}

TEST_CASE("unknown names and parameters are rejected") {
    CHECK_THROWS_AS(build_benchmark("lorenz"), Error);
    CHECK_THROWS_AS(build_benchmark("det-2d", {{"speed", 2.0}}), Error);
}

TEST_CASE("every system satisfies the cocycle law and stationarity") {
    for (const auto& name : catalog_names()) {
        CAPTURE(name);
        BenchmarkSystem sys = build_benchmark(name);
        Realization omega(sys.driver);
        const int dim = sys.bundle.field.dimension(omega);
        const Eigen::VectorXd x =
            sys.bundle.stationary.at(omega) + Eigen::VectorXd::Constant(dim, 0.01);

        const Eigen::VectorXd joint = iterate(sys.bundle.cocycle, sys.bundle.field, omega, x, 9);
        const Eigen::VectorXd staged =
            iterate(sys.bundle.cocycle, sys.bundle.field, shift(omega, 4),
                    iterate(sys.bundle.cocycle, sys.bundle.field, omega, x, 4), 5);
        CHECK(joint == staged);

        Eigen::VectorXd state = sys.bundle.stationary.at(omega);
        for (std::int64_t n = 1; n <= 30; ++n) {
            state = sys.bundle.cocycle.step(shift(omega, n - 1), state);
            CHECK((state - sys.bundle.stationary.at(shift(omega, n))).norm() <=
                  static_cast<double>(n) * sys.bundle.stationary.residual_tol);
        }
    }
}

TEST_CASE("every system passes the remainder-bound diagnostics") {
    for (const auto& name : catalog_names()) {
        CAPTURE(name);
        BenchmarkSystem sys = build_benchmark(name);
        Realization omega(sys.driver);
        AssumptionOptions options;
        options.orbit_samples = 16;
        options.pairs_per_index = 16;
        options.sample_radius = 0.5;
        const AssumptionReport report = verify_assumption(sys.bundle, omega, options);
        CHECK(report.max_violation_ratio <= 1.0 + 1e-9);
        CHECK(report.f_slope_ok);
        CHECK(report.rho_slope_ok);
        CHECK(std::isfinite(report.mean_log_plus_psi));
    }
}

TEST_CASE("every system linearizes consistently at its stationary point") {
    for (const auto& name : catalog_names()) {
        CAPTURE(name);
        BenchmarkSystem sys = build_benchmark(name);
        Realization omega(sys.driver);
        const Eigen::MatrixXd psi = sys.bundle.linear.matrix(omega);
        check_linearization(sys.bundle.cocycle, sys.bundle.stationary, sys.bundle.field, omega, psi);

        Cocycle finite = sys.bundle.cocycle;
        finite.differential = nullptr;
        const Eigen::MatrixXd fd = linearize_at(finite, sys.bundle.stationary, sys.bundle.field, omega);
        CHECK((psi - fd).norm() < 1e-6 * std::max(1.0, psi.norm()));
    }
}

TEST_CASE("additive-noise stationary orbit solves the geometric recursion") {
    BenchmarkSystem sys = build_benchmark("additive-noise");
    Realization omega(sys.driver);
    for (std::int64_t n : {-5, 0, 3, 17}) {
        const Realization at = shift(omega, n);
        const double eta = sys.bundle.stationary.at(at)[1];
        const double eta_next = sys.bundle.stationary.at(shift(at, 1))[1];
        // Y_{theta omega} = xi(omega) + Y_omega / 2, truncated far below
        // double precision by the 64-term geometric tail
        CHECK(eta_next == doctest::Approx(at.symbol(0)[0] + 0.5 * eta).epsilon(1e-13));
    }
    const Eigen::VectorXd y = sys.bundle.stationary.at(omega);
    const Eigen::VectorXd pushed = sys.bundle.cocycle.step(omega, y);
    CHECK((pushed - sys.bundle.stationary.at(shift(omega, 1))).norm() < 1e-12);
}

TEST_CASE("delay companion factors into the characteristic roots") {
    BenchmarkSystem sys = build_benchmark("delay-companion");
    // r^2 - 1.5 r + 0.5 = (r - 1)(r - 0.5)
    Eigen::MatrixXd companion(2, 2);
    companion << 1.5, -0.5, 1.0, 0.0;
    Eigen::EigenSolver<Eigen::MatrixXd> eigen(companion);
    std::vector<double> roots{eigen.eigenvalues()[0].real(), eigen.eigenvalues()[1].real()};
    std::sort(roots.begin(), roots.end());
    CHECK(roots[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(roots[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sys.oracle_exponents[0] == 0.0);
    CHECK(sys.oracle_exponents[1] == doctest::Approx(std::log(0.5)));
}

TEST_CASE("random-diag chart matches the closed-form orbit series") {
    RunConfig config;
    config.system_name = "random-diag";
    config.met_steps = 20000;
    config.grid_radius = 0.02;
    Analysis analysis = analyze(config);
    const OrbitModel& model = analysis.model;
    Realization omega = analysis.omega;

    // split directions are the axes for the diagonal cocycle
    CHECK((model.splitting.center_at(0).col(0) - Eigen::Vector3d::UnitY()).norm() < 1e-9);

    auto rate_a = [&](std::int64_t j) { return 0.4 + 0.2 * omega.symbol(j)[0]; };
    auto rate_c = [&](std::int64_t j) { return -0.4 + 0.2 * omega.symbol(j)[1]; };

    for (double x : {-0.02, 0.011}) {
        const Eigen::VectorXd h = chart_value(model, 0, Eigen::Vector3d::UnitY() * x);
        // u_0 = -x^3 sum_{j >= 0} exp(-(a_0 + ... + a_j))
        double acc = 0.0, partial = 0.0;
        for (int j = 0; j < 400; ++j) {
            partial += rate_a(j);
            acc += std::exp(-partial);
        }
        const double u_expected = -x * x * x * acc;
        // y_0 = x^3 (1 + sum_{m >= 1} exp(c_{-1} + ... + c_{-m}))
        double acc_s = 1.0;
        partial = 0.0;
        for (int m = 1; m < 400; ++m) {
            partial += rate_c(-m);
            acc_s += std::exp(partial);
        }
        const double y_expected = x * x * x * acc_s;

        CHECK(h[0] == doctest::Approx(u_expected).epsilon(2e-4));
        CHECK(h[1] == doctest::Approx(x).epsilon(1e-12));
        CHECK(h[2] == doctest::Approx(y_expected).epsilon(2e-4));
        CHECK(std::abs(h[0] - u_expected) < 1e-9);
        CHECK(std::abs(h[2] - y_expected) < 1e-9);
    }
}

TEST_CASE("driven-ode spectrum matches the rotation average") {
    BenchmarkSystem sys = build_benchmark("driven-ode");
    Realization omega(sys.driver);
    const std::int64_t n = 30000;
    const LyapunovSpectrum spectrum =
        lyapunov_spectrum(sys.bundle.linear, sys.bundle.field, omega, 2, n);
    const double dt = sys.params.at("dt");
    const double oracle = birkhoff_average(
        [dt](const Eigen::VectorXd& s) {
            return std::log(std::abs(1.0 + dt * (std::cos(2.0 * M_PI * s[0]) - 1.0)));
        },
        omega, n);
    CHECK(std::abs(spectrum.exponents[0]) < 1e-12);
    CHECK(spectrum.exponents[1] == doctest::Approx(oracle).epsilon(1e-10));
    CHECK(spectrum.exponents[1] < -0.05);
}

TEST_CASE("parameters reshape the systems") {
    BenchmarkSystem narrow = build_benchmark("det-2d", {{"cutoff_radius", 0.01}});
    Realization omega(narrow.driver);
    CHECK(narrow.bundle.cutoff.rho_at(omega) == 0.01);

    BenchmarkSystem strong = build_benchmark("random-diag", {{"a_mean", 0.6}});
    CHECK(strong.params.at("a_mean") == 0.6);
    CHECK_THROWS_AS(build_benchmark("random-diag", {{"a_mean", 0.1}}), Error);
    CHECK_THROWS_AS(build_benchmark("driven-ode", {{"dt", 0.9}}), Error);
}
