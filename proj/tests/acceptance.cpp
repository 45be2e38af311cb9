// Acceptance suite: every criterion prints one pass/fail line and the
// binary exits nonzero when any of them fails. Tolerances are fixed here,
// not configurable.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "centerfield/io.hpp"
#include "centerfield/manifold.hpp"
#include "centerfield/pipeline.hpp"
#include "centerfield/systems.hpp"

using namespace centerfield;

namespace {

int failures = 0;

void criterion(const std::string& name, bool passed, const std::string& detail) {
    std::printf("%s  %-34s %s\n", passed ? "PASS" : "FAIL", name.c_str(), detail.c_str());
    if (!passed) ++failures;
}

std::string fmt(double v) { return format_double(v); }

double slope(const std::vector<double>& ys) {
    const double n = static_cast<double>(ys.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < ys.size(); ++i) {
        const double x = static_cast<double>(i);
        sx += x;
        sy += ys[i];
        sxx += x * x;
        sxy += x * ys[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

RunConfig base_config(const std::string& name) {
    RunConfig config;
    config.system_name = name;
    config.met_steps = 20000;
    config.met_orbit = 100;
    config.grid_radius = 0.02;
    config.grid_points = 21;
    return config;
}

const std::vector<std::string> kAll = {"det-2d",         "det-3d",          "random-diag",
                                       "additive-noise", "delay-companion", "driven-ode"};
const std::vector<std::string> kConstant = {"det-2d", "det-3d", "delay-companion"};

std::map<std::string, Analysis>& analyses() {
    static std::map<std::string, Analysis> cache = [] {
        std::map<std::string, Analysis> out;
        for (const auto& name : kAll) out.emplace(name, analyze(base_config(name)));
        return out;
    }();
    return cache;
}

bool is_constant(const std::string& name) {
    for (const auto& c : kConstant)
        if (c == name) return true;
    return false;
}

LyapunovSpectrum spectrum_of(const std::string& name, std::int64_t steps) {
    BenchmarkSystem sys = build_benchmark(name);
    Realization omega(sys.driver);
    return lyapunov_spectrum(sys.bundle.linear, sys.bundle.field, omega,
                             sys.bundle.field.dimension(omega), steps);
}

void criterion_1_spectrum() {
    bool ok = true;
    std::string detail;

    {
        const LyapunovSpectrum s = spectrum_of("det-2d", 10000);
        const double err =
            std::max(std::abs(s.exponents[0]), std::abs(s.exponents[1] + std::log(2.0)));
        ok = ok && err < 1e-9;
        detail += "det-2d=" + fmt(err);
    }
    {
        const LyapunovSpectrum s = spectrum_of("det-3d", 10000);
        const double err = std::max({std::abs(s.exponents[0] - std::log(2.0)),
                                     std::abs(s.exponents[1]),
                                     std::abs(s.exponents[2] + std::log(2.0))});
        ok = ok && err < 1e-9;
        detail += " det-3d=" + fmt(err);
    }
    {
        const LyapunovSpectrum s = spectrum_of("random-diag", 100000);
        const std::vector<double> target = {0.4, 0.0, -0.4};
        bool inside = s.exponents.size() == 3;
        double worst = 0.0;
        for (std::size_t i = 0; inside && i < 3; ++i) {
            const double tolerance = std::max(3.0 * s.standard_errors[i], 1e-12);
            const double err = std::abs(s.exponents[i] - target[i]);
            worst = std::max(worst, err / tolerance);
            inside = inside && err <= tolerance;
        }
        ok = ok && inside;
        detail += " random-diag(err/3se)=" + fmt(worst);
    }
    {
        const LyapunovSpectrum s = spectrum_of("delay-companion", 10000);
        const double err =
            std::max(std::abs(s.exponents[0]), std::abs(s.exponents[1] - std::log(0.5)));
        ok = ok && err < 1e-3;
        detail += " delay=" + fmt(err);
    }
    criterion("1 spectrum-oracle", ok, detail);
}

void criterion_2_equivariance() {
    bool ok = true;
    std::string detail;
    for (const auto& name : kAll) {
        const Analysis& a = analyses().at(name);
        const EquivarianceReport eq = check_equivariance(
            a.system.bundle.linear, a.system.bundle.field, a.splitting, -100, 100);
        const double bound = is_constant(name) ? 1e-6 : 1e-3;
        const double worst = std::max({eq.unstable, eq.center, eq.stable_complement});
        ok = ok && worst < bound;
        detail += name + "=" + fmt(worst) + " ";
    }
    criterion("2 splitting-equivariance", ok, detail);
}

void criterion_3_projection_slope() {
    bool ok = true;
    std::string detail;
    for (const auto& name : kAll) {
        const Analysis& a = analyses().at(name);
        std::vector<double> log_c, log_u, log_s;
        for (std::int64_t n = -100; n <= 100; ++n) {
            const ProjectionNorms norms = projection_norms(a.splitting, a.system.bundle.field, n);
            if (norms.center > 0.0) log_c.push_back(std::log(norms.center));
            if (norms.unstable > 0.0) log_u.push_back(std::log(norms.unstable));
            if (norms.stable > 0.0) log_s.push_back(std::log(norms.stable));
        }
        double worst = std::abs(slope(log_c));
        if (!log_u.empty()) worst = std::max(worst, std::abs(slope(log_u)));
        if (!log_s.empty()) worst = std::max(worst, std::abs(slope(log_s)));
        ok = ok && worst < 1e-2;
        detail += name + "=" + fmt(worst) + " ";
    }
    criterion("3 projection-subexponential", ok, detail);
}

void criterion_4_contraction() {
    bool ok = true;
    std::string detail;
    for (const auto& name : kAll) {
        const Analysis& a = analyses().at(name);
        ok = ok && a.model.certificate.five_l_eps <= 0.5;

        LyapunovPerron op(a.model, 0);
        const Eigen::VectorXd v = a.model.splitting.center_at(0).col(0) * (0.2 * a.model.rho_at(0));
        detail::SplitMix rng(2024);
        double worst = 0.0;
        for (int pair = 0; pair < 100; ++pair) {
            SequenceWindow ga = op.zero_window();
            SequenceWindow gb = op.zero_window();
            for (std::int64_t n = ga.lo; n <= ga.hi; ++n) {
                const int d = a.model.dimension_at(n);
                const double amp =
                    rng.uniform() * std::exp(a.model.config.nu * std::abs(double(n)));
                ga.at(n) = rng.vector(d).normalized() * amp;
                gb.at(n) = ga.at(n) + rng.vector(d) * (0.4 * amp * rng.uniform());
            }
            auto clip = [&](SequenceWindow& g) {
                const double norm = weighted_norm(g, a.system.bundle.field);
                if (norm > 1.0)
                    for (auto& e : g.entries) e /= norm;
            };
            clip(ga);
            clip(gb);
            const double gap =
                weighted_norm(window_difference(ga, gb), a.system.bundle.field);
            if (gap < 1e-13) continue;
            const double spread = weighted_norm(
                window_difference(op.apply(v, ga), op.apply(v, gb)), a.system.bundle.field);
            worst = std::max(worst, spread / gap);
        }
        ok = ok && worst <= a.model.certificate.five_l_eps;
        detail += name + "=" + fmt(worst) + " ";
    }
    criterion("4 contraction-certificate", ok, detail);
}

std::map<std::string, CenterChart>& charts() {
    static std::map<std::string, CenterChart> cache = [] {
        std::map<std::string, CenterChart> out;
        for (const auto& name : kAll) {
            const Analysis& a = analyses().at(name);
            out.emplace(name, sample_manifold(a.model, 0, GridSpec{0.02, 21}));
        }
        return out;
    }();
    return cache;
}

void criterion_5_fixed_points() {
    bool ok = true;
    std::string detail;
    for (const auto& name : kAll) {
        const Analysis& a = analyses().at(name);
        const CenterChart& chart = charts().at(name);
        LyapunovPerron op(a.model, 0);

        bool solved = chart.failures.empty() && a.model.config.window == 40;
        double worst_residual = 0.0, worst_recover = 0.0;
        bool bound_ok = true;
        for (const auto& point : chart.points) {
            worst_residual = std::max(worst_residual, point.residual);
            if (!point.window) continue;
            const double norm = weighted_norm(*point.window, a.system.bundle.field);
            const double ceiling = a.model.growth_eps.center_max_at(0) *
                                   a.model.fiber_norm_at(0, point.center) /
                                   (1.0 - a.model.certificate.l_eps);
            bound_ok = bound_ok && norm <= ceiling * (1.0 + 1e-9) + 1e-300;
            worst_recover =
                std::max(worst_recover, (op.recover_center(*point.window) - point.center).norm());
        }
        const bool system_ok =
            solved && worst_residual < 1e-12 && bound_ok && worst_recover < 1e-10;
        ok = ok && system_ok;
        detail += name + "(res=" + fmt(worst_residual) + ",rec=" + fmt(worst_recover) + ") ";
    }
    criterion("5 fixed-point-suite", ok, detail);
}

void criterion_6_manifold_oracle() {
    const PolynomialFit planar =
        taylor_fit(analyses().at("det-2d").model, charts().at("det-2d"), 6);
    const double quad = planar.coefficients(0, 2);
    const double quartic = planar.coefficients(0, 4);

    const PolynomialFit spatial =
        taylor_fit(analyses().at("det-3d").model, charts().at("det-3d"), 6);
    const double lead_u = spatial.coefficients(0, 2);
    const double lead_s = spatial.coefficients(1, 2);

    const bool ok = std::abs(quad - 2.0) < 1e-2 && std::abs(quartic + 16.0) < 2.0 &&
                    std::abs(lead_u + 1.0) < 1e-2 && std::abs(lead_s - 2.0) < 1e-2;
    criterion("6 center-manifold-oracle", ok,
              "det-2d quad=" + fmt(quad) + " quartic=" + fmt(quartic) + " det-3d u=" +
                  fmt(lead_u) + " s=" + fmt(lead_s));
}

void criterion_7_regularity() {
    bool ok = true;
    std::string detail;
    for (const auto& name : kAll) {
        const Analysis& a = analyses().at(name);
        const RegularityReport report = verify_chart_regularity(a.model, charts().at(name));
        bool system_ok = report.lipschitz <= report.lipschitz_bound &&
                         report.inverse_lipschitz <= 2.0 + 1e-6;
        if (name == "det-2d") {
            system_ok = system_ok && report.tangency_order >= 0.95;
            detail += "det-2d(order=" + fmt(report.tangency_order) + ") ";
        }
        ok = ok && system_ok;
    }
    criterion("7 regularity-bounds", ok, detail + "lipschitz and injectivity on all benchmarks");
}

void criterion_8_invariance() {
    bool ok = true;
    std::string detail;
    for (const auto& name : {std::string("det-2d"), std::string("det-3d")}) {
        const Analysis& a = analyses().at(name);
        const InvarianceReport report = verify_invariance(a.model, charts().at(name), 5);
        const bool system_ok = report.one_step_distance < 1e-6 &&
                               report.one_step_points == charts().at(name).points.size() &&
                               report.multi_step_distance < 1e-6 && report.multi_step_points > 0;
        ok = ok && system_ok;
        detail += name + "(1step=" + fmt(report.one_step_distance) +
                  ",5step=" + fmt(report.multi_step_distance) + ") ";
    }
    double worst_transport = 0.0;
    for (const auto& name : kAll) {
        const Analysis& a = analyses().at(name);
        const InvarianceReport report = verify_invariance(a.model, charts().at(name), 1);
        worst_transport =
            std::max(worst_transport, report.transport_residual / a.model.config.tolerance);
        ok = ok && report.transport_residual < 10.0 * a.model.config.tolerance;
    }
    criterion("8 manifold-invariance", ok,
              detail + "transport(max/tol)=" + fmt(worst_transport));
}

void criterion_9_determinism() {
    namespace fs = std::filesystem;
    const fs::path root = fs::temp_directory_path() / "centerfield-acceptance";
    fs::remove_all(root);
    bool ok = true;
    for (const auto& name : {std::string("det-2d"), std::string("random-diag")}) {
        RunConfig config = base_config(name);
        config.met_steps = 2000;
        config.met_orbit = 80;
        for (Command command : {Command::spectrum, Command::split, Command::manifold}) {
            const fs::path dir_a = root / (name + "-a");
            const fs::path dir_b = root / (name + "-b");
            const ExecutionResult first = execute(command, config, dir_a);
            const ExecutionResult second = execute(command, config, dir_b);
            ok = ok && first.exit_code == 0 && second.exit_code == 0 &&
                 first.artifacts.size() == second.artifacts.size();
            for (std::size_t i = 0; ok && i < first.artifacts.size(); ++i)
                ok = read_text_file(first.artifacts[i]) == read_text_file(second.artifacts[i]);
        }
    }
    criterion("9 artifact-determinism", ok, "spectrum, split, manifold on two systems");
}

} // namespace

int main() {
    std::printf("acceptance suite: benchmark systems at seed 42\n");
    criterion_1_spectrum();
    criterion_2_equivariance();
    criterion_3_projection_slope();
    criterion_4_contraction();
    criterion_5_fixed_points();
    criterion_6_manifold_oracle();
    criterion_7_regularity();
    criterion_8_invariance();
    criterion_9_determinism();
    if (failures) {
        std::printf("%d criterion(s) failed\n", failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
