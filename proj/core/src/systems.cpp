#include "centerfield/systems.hpp"

#include <cmath>

#include "centerfield/errors.hpp"

namespace centerfield {

namespace {

std::map<std::string, double> merge_params(const std::map<std::string, double>& defaults,
                                           const std::map<std::string, double>& overrides) {
    std::map<std::string, double> merged = defaults;
    for (const auto& [key, value] : overrides) {
        auto it = merged.find(key);
        if (it == merged.end())
            raise(errc::invalid_argument, "unknown system parameter '" + key + "'");
        it->second = value;
    }
    return merged;
}

CutoffSpec cutoff_from(const std::map<std::string, double>& p, double f, double h_exponent) {
    return CutoffSpec::constants(p.at("cutoff_radius"), f, h_exponent);
}

BenchmarkSystem det2d(const std::map<std::string, double>& overrides, std::uint64_t seed) {
    const auto p = merge_params({{"cutoff_radius", 0.05}}, overrides);

    BenchmarkSystem sys;
    sys.name = "det-2d";
    sys.description = "planar map (x + x y, y/2 + x^2): neutral x, contracting y";
    sys.driver = DriverSpec{DriverKind::deterministic_point, 1, NoiseLaw::uniform,
                            -1.0, 1.0, 1.0, 0.0, 0.0, {0.0}, seed};
    sys.params = p;
    sys.oracle_exponents = {0.0, -std::log(2.0)};

    sys.bundle.field = FiberField::constant(FiberSpec{.dimension = 2});
    sys.bundle.cocycle.step = [](const Realization&, const Eigen::VectorXd& v) {
        Eigen::VectorXd out(2);
        out << v[0] + v[0] * v[1], 0.5 * v[1] + v[0] * v[0];
        return out;
    };
    sys.bundle.cocycle.differential = [](const Realization&, const Eigen::VectorXd& v) {
        Eigen::MatrixXd jac(2, 2);
        jac << 1.0 + v[1], v[0], 2.0 * v[0], 0.5;
        return jac;
    };
    sys.bundle.stationary.at = [](const Realization&) { return Eigen::VectorXd::Zero(2); };
    sys.bundle.stationary.residual_tol = 1e-14;
    sys.bundle.cutoff = cutoff_from(p, 1.0, 1.0);
    sys.bundle.linear = linearize(sys.bundle.cocycle, sys.bundle.stationary, sys.bundle.field);
    return sys;
}

BenchmarkSystem det3d(const std::map<std::string, double>& overrides, std::uint64_t seed) {
    const auto p = merge_params({{"cutoff_radius", 0.05}}, overrides);

    BenchmarkSystem sys;
    sys.name = "det-3d";
    sys.description = "(2u + x^2, x + x y, y/2 + x^2): expanding u, neutral x, contracting y";
    sys.driver = DriverSpec{DriverKind::deterministic_point, 1, NoiseLaw::uniform,
                            -1.0, 1.0, 1.0, 0.0, 0.0, {0.0}, seed};
    sys.params = p;
    sys.oracle_exponents = {std::log(2.0), 0.0, -std::log(2.0)};

    sys.bundle.field = FiberField::constant(FiberSpec{.dimension = 3});
    sys.bundle.cocycle.step = [](const Realization&, const Eigen::VectorXd& v) {
        Eigen::VectorXd out(3);
        out << 2.0 * v[0] + v[1] * v[1], v[1] + v[1] * v[2], 0.5 * v[2] + v[1] * v[1];
        return out;
    };
    sys.bundle.cocycle.differential = [](const Realization&, const Eigen::VectorXd& v) {
        Eigen::MatrixXd jac(3, 3);
        jac << 2.0, 2.0 * v[1], 0.0,
               0.0, 1.0 + v[2], v[1],
               0.0, 2.0 * v[1], 0.5;
        return jac;
    };
    sys.bundle.stationary.at = [](const Realization&) { return Eigen::VectorXd::Zero(3); };
    sys.bundle.stationary.residual_tol = 1e-14;
    sys.bundle.cutoff = cutoff_from(p, 1.5, 1.0);
    sys.bundle.linear = linearize(sys.bundle.cocycle, sys.bundle.stationary, sys.bundle.field);
    return sys;
}

BenchmarkSystem random_diag(const std::map<std::string, double>& overrides, std::uint64_t seed) {
    const auto p = merge_params({{"a_mean", 0.4},
                                 {"c_mean", -0.4},
                                 {"amplitude", 0.2},
                                 {"cubic", 1.0},
                                 {"cutoff_radius", 0.05}},
                                overrides);
    const double a0 = p.at("a_mean");
    const double c0 = p.at("c_mean");
    const double amp = p.at("amplitude");
    const double cubic = p.at("cubic");
    if (!(a0 - amp > 0.0) || !(c0 + amp < 0.0))
        raise(errc::invalid_argument, "random-diag needs a bounded away from 0 on both sides");

    BenchmarkSystem sys;
    sys.name = "random-diag";
    sys.description = "diag(e^a, 1, e^c) with iid bounded a, c plus a cubic center feed";
    sys.driver = DriverSpec{DriverKind::iid_sequence, 2, NoiseLaw::uniform,
                            -1.0, 1.0, 1.0, 0.0, 0.0, {}, seed};
    sys.params = p;

    auto rates = [a0, c0, amp](const Realization& omega) {
        const Eigen::VectorXd s = omega.symbol(0);
        return std::pair<double, double>{a0 + amp * s[0], c0 + amp * s[1]};
    };

    sys.bundle.field = FiberField::constant(FiberSpec{.dimension = 3});
    sys.bundle.cocycle.step = [rates, cubic](const Realization& omega, const Eigen::VectorXd& v) {
        const auto [a, c] = rates(omega);
        const double x3 = cubic * v[1] * v[1] * v[1];
        Eigen::VectorXd out(3);
        out << std::exp(a) * v[0] + x3, v[1], std::exp(c) * v[2] + x3;
        return out;
    };
    sys.bundle.cocycle.differential = [rates, cubic](const Realization& omega,
                                                     const Eigen::VectorXd& v) {
        const auto [a, c] = rates(omega);
        const double dx3 = 3.0 * cubic * v[1] * v[1];
        Eigen::MatrixXd jac(3, 3);
        jac << std::exp(a), dx3, 0.0,
               0.0, 1.0, 0.0,
               0.0, dx3, std::exp(c);
        return jac;
    };
    sys.bundle.stationary.at = [](const Realization&) { return Eigen::VectorXd::Zero(3); };
    sys.bundle.stationary.residual_tol = 1e-14;
    sys.bundle.cutoff = cutoff_from(p, std::max(1.1, 1.1 * cubic), 2.0);
    sys.bundle.linear = linearize(sys.bundle.cocycle, sys.bundle.stationary, sys.bundle.field);
    return sys;
}

BenchmarkSystem additive_noise(const std::map<std::string, double>& overrides,
                               std::uint64_t seed) {
    const auto p = merge_params({{"noise_scale", 0.1}, {"cutoff_radius", 0.05}}, overrides);
    const double scale = p.at("noise_scale");

    BenchmarkSystem sys;
    sys.name = "additive-noise";
    sys.description = "y' = y/2 + noise coupled to a neutral x: random stationary orbit";
    sys.driver = DriverSpec{DriverKind::iid_sequence, 1, NoiseLaw::uniform,
                            -scale, scale, 1.0, 0.0, 0.0, {}, seed};
    sys.params = p;
    sys.oracle_exponents = {0.0, -std::log(2.0)};

    // Stationary second component: geometric sum over the past noise,
    // truncated far below double precision.
    auto eta = [](const Realization& omega) {
        double sum = 0.0;
        double weight = 1.0;
        for (int j = 0; j < 64; ++j) {
            sum += weight * omega.symbol(-j - 1)[0];
            weight *= 0.5;
        }
        return sum;
    };

    sys.bundle.field = FiberField::constant(FiberSpec{.dimension = 2});
    sys.bundle.cocycle.step = [eta](const Realization& omega, const Eigen::VectorXd& v) {
        Eigen::VectorXd out(2);
        out << v[0] + v[0] * (v[1] - eta(omega)),
               0.5 * v[1] + omega.symbol(0)[0] + v[0] * v[0];
        return out;
    };
    sys.bundle.cocycle.differential = [eta](const Realization& omega, const Eigen::VectorXd& v) {
        Eigen::MatrixXd jac(2, 2);
        jac << 1.0 + (v[1] - eta(omega)), v[0], 2.0 * v[0], 0.5;
        return jac;
    };
    sys.bundle.stationary.at = [eta](const Realization& omega) {
        Eigen::VectorXd y(2);
        y << 0.0, eta(omega);
        return y;
    };
    sys.bundle.stationary.residual_tol = 1e-12;
    sys.bundle.cutoff = cutoff_from(p, 1.0, 1.0);
    sys.bundle.linear = linearize(sys.bundle.cocycle, sys.bundle.stationary, sys.bundle.field);
    return sys;
}

BenchmarkSystem delay_companion(const std::map<std::string, double>& overrides,
                                std::uint64_t seed) {
    const auto p = merge_params({{"quad", 0.25}, {"cutoff_radius", 0.05}}, overrides);
    const double quad = p.at("quad");

    BenchmarkSystem sys;
    sys.name = "delay-companion";
    sys.description = "segment form of x_n = 1.5 x_{n-1} - 0.5 x_{n-2} plus a quadratic term";
    sys.driver = DriverSpec{DriverKind::deterministic_point, 1, NoiseLaw::uniform,
                            -1.0, 1.0, 1.0, 0.0, 0.0, {0.0}, seed};
    sys.params = p;
    sys.oracle_exponents = {0.0, std::log(0.5)};

    sys.bundle.field = FiberField::constant(FiberSpec{.dimension = 2});
    sys.bundle.cocycle.step = [quad](const Realization&, const Eigen::VectorXd& v) {
        Eigen::VectorXd out(2);
        out << 1.5 * v[0] - 0.5 * v[1] + quad * v[0] * v[0], v[0];
        return out;
    };
    sys.bundle.cocycle.differential = [quad](const Realization&, const Eigen::VectorXd& v) {
        Eigen::MatrixXd jac(2, 2);
        jac << 1.5 + 2.0 * quad * v[0], -0.5, 1.0, 0.0;
        return jac;
    };
    sys.bundle.stationary.at = [](const Realization&) { return Eigen::VectorXd::Zero(2); };
    sys.bundle.stationary.residual_tol = 1e-14;
    sys.bundle.cutoff = cutoff_from(p, std::max(1.0, 2.0 * quad), 1.0);
    sys.bundle.linear = linearize(sys.bundle.cocycle, sys.bundle.stationary, sys.bundle.field);
    return sys;
}

BenchmarkSystem driven_ode(const std::map<std::string, double>& overrides, std::uint64_t seed) {
    const auto p = merge_params({{"dt", 0.1},
                                 {"alpha", 0.61803398874989485},
                                 {"cutoff_radius", 0.05}},
                                overrides);
    const double dt = p.at("dt");
    if (!(dt > 0.0) || !(dt < 0.5))
        raise(errc::invalid_argument, "driven-ode step must lie in (0, 0.5)");

    BenchmarkSystem sys;
    sys.name = "driven-ode";
    sys.description = "explicit step of dx = V0(x) dt + V(x) dW along a smooth rotation driver";
    sys.driver = DriverSpec{DriverKind::finite_rotation, 1, NoiseLaw::uniform,
                            -1.0, 1.0, 1.0, p.at("alpha"), 0.0, {}, seed};
    sys.params = p;

    auto increment = [](const Realization& omega) {
        return std::cos(2.0 * M_PI * omega.symbol(0)[0]);
    };

    sys.bundle.field = FiberField::constant(FiberSpec{.dimension = 2});
    sys.bundle.cocycle.step = [dt, increment](const Realization& omega, const Eigen::VectorXd& v) {
        const double w = increment(omega);
        Eigen::VectorXd out(2);
        out << v[0] + dt * v[0] * v[1],
               v[1] + dt * (-v[1] + v[1] * w + v[0] * v[0]);
        return out;
    };
    sys.bundle.cocycle.differential = [dt, increment](const Realization& omega,
                                                      const Eigen::VectorXd& v) {
        const double w = increment(omega);
        Eigen::MatrixXd jac(2, 2);
        jac << 1.0 + dt * v[1], dt * v[0],
               2.0 * dt * v[0], 1.0 + dt * (w - 1.0);
        return jac;
    };
    sys.bundle.stationary.at = [](const Realization&) { return Eigen::VectorXd::Zero(2); };
    sys.bundle.stationary.residual_tol = 1e-14;
    sys.bundle.cutoff = cutoff_from(p, std::max(0.2, 2.0 * dt), 1.0);
    sys.bundle.linear = linearize(sys.bundle.cocycle, sys.bundle.stationary, sys.bundle.field);
    return sys;
}

} // namespace

std::vector<std::string> catalog_names() {
    return {"det-2d", "det-3d", "random-diag", "additive-noise", "delay-companion", "driven-ode"};
}

std::vector<std::pair<std::string, std::string>> catalog() {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& name : catalog_names()) out.emplace_back(name, build_benchmark(name).description);
    return out;
}

BenchmarkSystem build_benchmark(const std::string& name,
                                const std::map<std::string, double>& params, std::uint64_t seed) {
    if (name == "det-2d") return det2d(params, seed);
    if (name == "det-3d") return det3d(params, seed);
    if (name == "random-diag") return random_diag(params, seed);
    if (name == "additive-noise") return additive_noise(params, seed);
    if (name == "delay-companion") return delay_companion(params, seed);
    if (name == "driven-ode") return driven_ode(params, seed);
    raise(errc::invalid_argument, "unknown benchmark '" + name + "'");
}

} // namespace centerfield
