#include "centerfield/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "centerfield/errors.hpp"
#include "centerfield/io.hpp"
#include "centerfield/linalg.hpp"

namespace centerfield {

namespace {

using ordered_json = nlohmann::ordered_json;

double slope_against_index(const std::vector<double>& ys) {
    const std::size_t n = ys.size();
    if (n < 2) return 0.0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = static_cast<double>(i);
        sx += x;
        sy += ys[i];
        sxx += x * x;
        sxy += x * ys[i];
    }
    const double denom = static_cast<double>(n) * sxx - sx * sx;
    return (static_cast<double>(n) * sxy - sx * sy) / denom;
}

bool deterministic_driver(const BenchmarkSystem& system) {
    return system.driver.kind == DriverKind::deterministic_point;
}

} // namespace

std::optional<Command> parse_command(const std::string& name) {
    if (name == "spectrum") return Command::spectrum;
    if (name == "split") return Command::split;
    if (name == "manifold") return Command::manifold;
    if (name == "verify") return Command::verify;
    if (name == "catalog") return Command::catalog;
    return std::nullopt;
}

Analysis analyze(const RunConfig& config) {
    BenchmarkSystem system = build_benchmark(config.system_name, config.system_params, config.seed);
    Realization omega(system.driver);

    if (config.fiber_norm) {
        FiberSpec spec = system.bundle.field.spec(omega);
        spec.norm = *config.fiber_norm;
        if (*config.fiber_norm == NormKind::weighted_p) {
            spec.p = 2.0;
            if (config.fiber_weights.size() != static_cast<std::size_t>(spec.dimension))
                raise(errc::config_error, "fiber.weights length does not match the fiber dimension");
            spec.weights = Eigen::Map<const Eigen::VectorXd>(
                config.fiber_weights.data(), static_cast<Eigen::Index>(config.fiber_weights.size()));
        }
        validate_fiber_spec(spec);
        system.bundle.field = FiberField::constant(spec);
        system.bundle.linear =
            linearize(system.bundle.cocycle, system.bundle.stationary, system.bundle.field);
    }

    const int dim = system.bundle.field.dimension(omega);
    const int k = config.met_exponents.value_or(dim);

    SpectrumOptions spectrum_options;
    spectrum_options.gap_threshold = config.met_gap;
    spectrum_options.warmup = config.met_warmup;
    LyapunovSpectrum spectrum = lyapunov_spectrum(system.bundle.linear, system.bundle.field, omega,
                                                  k, config.met_steps, spectrum_options);

    LPConfig lp = resolve_lp_config(config.lp, spectrum);
    lp.horizon = config.met_horizon;
    lp.safety = config.met_safety;

    const std::int64_t orbit_half = config.met_orbit.value_or(
        lp.window + lp.horizon + std::max<std::int64_t>(config.verify_steps, 2) + 4);
    OseledetsSplitting splitting =
        oseledets_split(system.bundle.linear, system.bundle.field, omega, spectrum, orbit_half);

    OrbitModel model = build_orbit_model(system.bundle, omega, spectrum, splitting, lp);
    return Analysis{std::move(system), std::move(omega), std::move(spectrum), std::move(splitting),
                    std::move(model)};
}

GridSpec grid_from(const RunConfig& config, const OrbitModel& model) {
    GridSpec grid;
    grid.points = config.grid_points;
    grid.radius = config.grid_radius.value_or(std::min(model.rho_at(0), model.rho_at(1)) / 2.0);
    return grid;
}

void VerificationSummary::add(const std::string& name, double measured, double bound,
                              const std::string& detail) {
    VerificationCheck check;
    check.name = name;
    check.measured = measured;
    check.bound = bound;
    check.passed = measured <= bound;
    check.detail = detail;
    checks.push_back(check);
    all_passed = all_passed && check.passed;
}

void VerificationSummary::add_min(const std::string& name, double measured, double floor,
                                  const std::string& detail) {
    VerificationCheck check;
    check.name = name;
    check.measured = measured;
    check.bound = floor;
    check.passed = measured >= floor;
    check.detail = detail.empty() ? "bound is a floor" : detail + " (bound is a floor)";
    checks.push_back(check);
    all_passed = all_passed && check.passed;
}

VerificationSummary run_verification(const RunConfig& config, const Analysis& analysis) {
    const auto& model = analysis.model;
    const auto& system = analysis.system;
    const auto& field = system.bundle.field;
    VerificationSummary summary;

    if (model.splitting.dim_unstable == 0) summary.add_flag("no-unstable-directions");

    // Stationarity of the random fixed trajectory along the orbit.
    {
        double worst = 0.0;
        Eigen::VectorXd state = system.bundle.stationary.at(analysis.omega);
        for (std::int64_t n = 0; n < 50; ++n) {
            state = system.bundle.cocycle.step(analysis.omega.shifted(n), state);
            const Realization next = analysis.omega.shifted(n + 1);
            worst = std::max(worst,
                             field.norm(next, state - system.bundle.stationary.at(next)));
        }
        summary.add("stationary-orbit", worst, 50.0 * system.bundle.stationary.residual_tol);
    }

    // Sampled remainder bound and subexponential moduli.
    {
        AssumptionOptions options;
        options.orbit_samples = config.verify_samples;
        options.sample_radius = std::min(1.0, 10.0 * model.rho_at(0));
        const AssumptionReport report = verify_assumption(system.bundle, analysis.omega, options);
        summary.add("remainder-bound", report.max_violation_ratio, 1.0 + 1e-9);
        summary.add("modulus-growth", std::max(std::abs(report.f_slope), std::abs(report.rho_slope)),
                     options.slope_tolerance);
        summary.add("linear-growth-integrable", report.mean_log_plus_psi, 1e6,
                    "finite empirical mean of log+ |psi|");
    }

    // Equivariance of the splitting along a window.
    {
        const double bound = deterministic_driver(system) ? 1e-6 : 1e-3;
        const EquivarianceReport eq = check_equivariance(system.bundle.linear, field,
                                                         analysis.splitting, model.lo, model.hi);
        summary.add("equivariance-unstable", eq.unstable, model.splitting.dim_unstable ? bound : 0.0);
        summary.add("equivariance-center", eq.center, bound);
        summary.add("equivariance-stable-complement", eq.stable_complement, bound);
    }

    // Projection norms grow subexponentially along the orbit.
    {
        std::vector<double> log_c, log_u, log_s;
        for (std::int64_t n = model.lo; n <= model.hi; ++n) {
            const ProjectionNorms norms = projection_norms(analysis.splitting, field, n);
            if (norms.center > 0.0) log_c.push_back(std::log(norms.center));
            if (norms.unstable > 0.0) log_u.push_back(std::log(norms.unstable));
            if (norms.stable > 0.0) log_s.push_back(std::log(norms.stable));
        }
        const double slope = std::max({std::abs(slope_against_index(log_c)),
                                       std::abs(slope_against_index(log_u)),
                                       std::abs(slope_against_index(log_s))});
        summary.add("projection-subexponential", slope, 1e-2);
    }

    // Spectrum against exact oracle values where the system has them.
    if (!system.oracle_exponents.empty()) {
        double worst = 0.0;
        double tolerance = 1e-9;
        const auto& exp = analysis.spectrum.exponents;
        if (exp.size() != system.oracle_exponents.size()) {
            worst = 1.0;
            tolerance = 0.0;
        } else {
            for (std::size_t i = 0; i < exp.size(); ++i) {
                worst = std::max(worst, std::abs(exp[i] - system.oracle_exponents[i]));
                tolerance = std::max(
                    {tolerance, 3.0 * analysis.spectrum.standard_errors[i],
                     10.0 / static_cast<double>(analysis.spectrum.steps)});
            }
        }
        summary.add("spectrum-oracle", worst, tolerance);
    }

    // Contraction certificate and its empirical counterpart.
    summary.add("contraction-certificate", model.certificate.five_l_eps, 0.5 + 1e-12);
    summary.add("injectivity-certificate", model.certificate.five_l_tilde, 1.0 + 1e-12);
    {
        LyapunovPerron op(model, 0);
        detail::SplitMix rng(config.seed ^ 0xC0117Aull);
        const Eigen::VectorXd v =
            model.splitting.center_at(0) *
            Eigen::VectorXd::Ones(model.splitting.dim_center) * (0.25 * model.rho_at(0));
        double worst = 0.0;
        for (std::int64_t s = 0; s < config.verify_samples; ++s) {
            SequenceWindow a = op.zero_window();
            SequenceWindow b = op.zero_window();
            for (std::int64_t n = a.lo; n <= a.hi; ++n) {
                const int d = model.dimension_at(n);
                const double amp = rng.uniform() * std::exp(model.config.nu * std::abs(double(n)));
                a.at(n) = rng.vector(d).normalized() * amp * rng.uniform();
                b.at(n) = a.at(n) + rng.vector(d) * (0.3 * amp * rng.uniform());
            }
            const double gap = weighted_norm(window_difference(a, b), field);
            if (gap < 1e-14) continue;
            const double spread =
                weighted_norm(window_difference(op.apply(v, a), op.apply(v, b)), field);
            worst = std::max(worst, spread / gap);
        }
        summary.add("contraction-empirical", worst, model.certificate.five_l_eps,
                    "operator Lipschitz ratio over random window pairs");
    }

    // Chart solve on the configured grid plus the regularity and invariance
    // suites.
    const GridSpec grid = grid_from(config, model);
    const CenterChart chart = sample_manifold(model, 0, grid);
    {
        double worst_residual = 0.0;
        bool apriori_ok = true;
        LyapunovPerron op(model, 0);
        for (const auto& point : chart.points) {
            worst_residual = std::max(worst_residual, point.residual);
            if (point.window) {
                const double norm = weighted_norm(*point.window, field);
                const double bound = model.growth_eps.center_max_at(0) *
                                     model.fiber_norm_at(0, point.center) /
                                     (1.0 - model.certificate.l_eps);
                apriori_ok = apriori_ok && norm <= bound * (1.0 + 1e-9) + 1e-300;
            }
        }
        summary.add("fixed-point-residuals", worst_residual, model.config.tolerance);
        summary.add("fixed-point-failures", static_cast<double>(chart.failures.size()), 0.0);
        summary.add("apriori-bound", apriori_ok ? 0.0 : 1.0, 0.0,
                    "weighted norm within the closed-form ceiling");
    }

    // Lipschitz dependence of the fixed point on the center vector.
    {
        double worst = 0.0;
        const double ceiling = 2.0 * model.growth_nu.center_max_at(0);
        for (std::size_t i = 0; i + 1 < chart.points.size(); ++i) {
            const auto& p = chart.points[i];
            const auto& q = chart.points[i + 1];
            if (!p.window || !q.window) continue;
            const double dv = model.fiber_norm_at(0, p.center - q.center);
            if (dv <= 0.0) continue;
            const double dg = weighted_norm(window_difference(*p.window, *q.window), field);
            worst = std::max(worst, dg / dv);
        }
        summary.add("fixed-point-lipschitz", worst, ceiling);
    }

    {
        const RegularityReport reg = verify_chart_regularity(model, chart);
        summary.add("chart-lipschitz", reg.lipschitz, reg.lipschitz_bound);
        summary.add("chart-injectivity", reg.inverse_lipschitz,
                    reg.inverse_lipschitz_bound + 1e-6);
        summary.add_min("tangency-order", reg.tangency_order, 0.95,
                        "fitted order of |h(v) - v| / |v| against |v|");
        summary.add("origin-fixed", reg.origin_fixed ? 0.0 : 1.0, 0.0);
    }

    {
        const InvarianceReport inv = verify_invariance(model, chart, config.verify_steps);
        const double bound = deterministic_driver(system) ? 1e-6 : 1e-5;
        summary.add("invariance-one-step", inv.one_step_distance, bound,
                    std::to_string(inv.one_step_points) + " points inside the cutoff ball");
        summary.add("invariance-modified", inv.modified_one_step_distance, bound);
        summary.add("invariance-multi-step", inv.multi_step_distance, bound,
                    std::to_string(inv.multi_step_points) + " points stay in the domain");
        summary.add("fixed-point-transport", inv.transport_residual,
                    10.0 * model.config.tolerance);
        summary.add("orbit-expansion-identity", inv.orbit_identity_residual, 1e-10);
        summary.add("recover-center", inv.recover_residual, 1e-10);
        summary.add("center-component", inv.center_component_residual, 1e-10);
    }

    return summary;
}

namespace {

std::string spectrum_csv(const LyapunovSpectrum& spectrum) {
    std::string out = "exponent,multiplicity,standard_error\n";
    for (std::size_t i = 0; i < spectrum.exponents.size(); ++i) {
        out += format_double(spectrum.exponents[i]);
        out += ',';
        out += std::to_string(spectrum.multiplicities[i]);
        out += ',';
        out += format_double(spectrum.standard_errors[i]);
        out += '\n';
    }
    return out;
}

std::string splitting_csv(const OseledetsSplitting& splitting) {
    std::string out = "orbit_index,subspace,column,components\n";
    auto emit = [&](std::int64_t n, const char* name, const Eigen::MatrixXd& basis) {
        for (Eigen::Index c = 0; c < basis.cols(); ++c) {
            out += std::to_string(n);
            out += ',';
            out += name;
            out += ',';
            out += std::to_string(c);
            out += ',';
            out += format_vector(basis.col(c));
            out += '\n';
        }
    };
    for (std::int64_t n = splitting.lo; n <= splitting.hi; ++n) {
        emit(n, "U", splitting.unstable_at(n));
        emit(n, "C", splitting.center_at(n));
        emit(n, "S", splitting.stable_at(n));
    }
    return out;
}

std::string projection_csv(const Analysis& analysis) {
    const auto& splitting = analysis.splitting;
    std::string out = "orbit_index,center_norm,unstable_norm,stable_norm\n";
    for (std::int64_t n = splitting.lo; n <= splitting.hi; ++n) {
        const ProjectionNorms norms =
            projection_norms(splitting, analysis.system.bundle.field, n);
        out += std::to_string(n);
        out += ',';
        out += format_double(norms.center);
        out += ',';
        out += format_double(norms.unstable);
        out += ',';
        out += format_double(norms.stable);
        out += '\n';
    }
    return out;
}

std::string chart_csv(const CenterChart& chart) {
    std::string out = "center_coords,value_coords,residual,iterations\n";
    for (const auto& point : chart.points) {
        if (!point.value.size()) continue;
        out += format_vector(point.coeffs);
        out += ',';
        out += format_vector(point.value);
        out += ',';
        out += format_double(point.residual);
        out += ',';
        out += std::to_string(point.iterations);
        out += '\n';
    }
    return out;
}

ordered_json solver_json(const RunConfig& config, const Analysis& analysis,
                         const CenterChart& chart) {
    const auto& model = analysis.model;
    ordered_json j;
    j["system"] = analysis.system.name;
    j["seed"] = config.seed;
    j["nu"] = model.config.nu;
    j["epsilon"] = model.config.epsilon;
    j["m_eps"] = model.config.m_eps;
    j["m_tilde"] = model.config.m_tilde;
    j["l_eps"] = model.certificate.l_eps;
    j["l_tilde"] = model.certificate.l_tilde;
    j["five_l_eps"] = model.certificate.five_l_eps;
    j["five_l_tilde"] = model.certificate.five_l_tilde;
    j["window"] = model.config.window;
    j["tolerance"] = model.config.tolerance;
    j["horizon"] = model.config.horizon;
    j["safety"] = model.config.safety;
    j["radius_mode"] = model.config.radius_mode == RadiusMode::system ? "system" : "certified";
    j["rho_cutoff_at_base"] = model.rho_at(0);
    j["rho_certified_at_base"] = model.rho_certified[model.slot(0)];
    j["unstable_dimension"] = model.splitting.dim_unstable;
    j["center_dimension"] = model.splitting.dim_center;

    ordered_json points = ordered_json::array();
    for (const auto& point : chart.points) {
        ordered_json p;
        p["center"] = ordered_json::array();
        for (Eigen::Index i = 0; i < point.coeffs.size(); ++i) p["center"].push_back(point.coeffs[i]);
        p["value"] = ordered_json::array();
        for (Eigen::Index i = 0; i < point.value.size(); ++i) p["value"].push_back(point.value[i]);
        p["iterations"] = point.iterations;
        p["residual"] = point.residual;
        p["contraction_ratio"] = point.contraction_ratio;
        points.push_back(std::move(p));
    }
    j["points"] = std::move(points);

    ordered_json failures = ordered_json::array();
    for (const auto& failure : chart.failures) {
        ordered_json f;
        f["point"] = failure.point_index;
        f["message"] = failure.message;
        failures.push_back(std::move(f));
    }
    j["failures"] = std::move(failures);
    return j;
}

ordered_json verification_json(const VerificationSummary& summary) {
    ordered_json j;
    j["all_passed"] = summary.all_passed;
    j["flags"] = summary.flags;
    ordered_json checks = ordered_json::array();
    for (const auto& check : summary.checks) {
        ordered_json c;
        c["name"] = check.name;
        c["passed"] = check.passed;
        c["measured"] = check.measured;
        c["bound"] = check.bound;
        if (!check.detail.empty()) c["detail"] = check.detail;
        checks.push_back(std::move(c));
    }
    j["checks"] = std::move(checks);
    return j;
}

} // namespace

std::string catalog_text() {
    std::string out;
    for (const auto& [name, description] : catalog()) {
        out += name;
        out += "  -  ";
        out += description;
        out += '\n';
    }
    return out;
}

ExecutionResult execute(Command command, const RunConfig& config,
                        const std::optional<std::filesystem::path>& output_override) {
    ExecutionResult result;

    if (command == Command::catalog) {
        result.message = catalog_text();
        return result;
    }

    const std::filesystem::path outdir =
        output_override.value_or(std::filesystem::path(config.output_directory));

    try {
        Analysis analysis = analyze(config);
        std::filesystem::create_directories(outdir);

        auto emit = [&](const std::filesystem::path& name, const std::string& content) {
            const auto path = outdir / name;
            write_text_file(path, content);
            result.artifacts.push_back(path);
        };

        switch (command) {
            case Command::spectrum: {
                emit("spectrum.csv", spectrum_csv(analysis.spectrum));
                break;
            }
            case Command::split: {
                emit("splitting.csv", splitting_csv(analysis.splitting));
                emit("projections.csv", projection_csv(analysis));
                break;
            }
            case Command::manifold: {
                const GridSpec grid = grid_from(config, analysis.model);
                const CenterChart chart = sample_manifold(analysis.model, 0, grid);
                emit("chart.csv", chart_csv(chart));
                emit("solver.json", solver_json(config, analysis, chart).dump(2) + "\n");
                break;
            }
            case Command::verify: {
                const VerificationSummary summary = run_verification(config, analysis);
                emit("verification.json", verification_json(summary).dump(2) + "\n");
                std::string lines;
                for (const auto& check : summary.checks) {
                    lines += check.passed ? "PASS " : "FAIL ";
                    lines += check.name;
                    lines += "  measured=" + format_double(check.measured);
                    lines += "  bound=" + format_double(check.bound);
                    lines += '\n';
                }
                result.message = lines;
                if (!summary.all_passed) result.exit_code = 4;
                break;
            }
            case Command::catalog:
                break;
        }
    } catch (const Error& e) {
        result.exit_code = e.code() == errc::config_error ? 2 : 3;
        result.message = e.what();
    }
    return result;
}

} // namespace centerfield
