#include "centerfield/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "centerfield/errors.hpp"
#include "centerfield/linalg.hpp"

namespace centerfield {

namespace {

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body) {
    unsigned hw = std::thread::hardware_concurrency();
    std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads)
                                      : std::max<std::size_t>(1, hw);
    workers = std::min(workers, count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < count; i += workers) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

std::vector<Eigen::VectorXd> grid_coefficients(const GridSpec& grid, int axes) {
    if (grid.points < 1) raise(errc::invalid_argument, "grid needs at least one point per axis");
    if (!(grid.radius > 0.0)) raise(errc::invalid_argument, "grid radius must be positive");
    std::vector<double> axis(static_cast<std::size_t>(grid.points));
    for (int i = 0; i < grid.points; ++i)
        axis[static_cast<std::size_t>(i)] =
            grid.points == 1 ? 0.0
                             : -grid.radius + 2.0 * grid.radius * static_cast<double>(i) /
                                                  static_cast<double>(grid.points - 1);

    std::vector<Eigen::VectorXd> out;
    std::vector<int> idx(static_cast<std::size_t>(axes), 0);
    while (true) {
        Eigen::VectorXd c(axes);
        for (int a = 0; a < axes; ++a) c[a] = axis[static_cast<std::size_t>(idx[static_cast<std::size_t>(a)])];
        out.push_back(std::move(c));
        int a = axes - 1;
        while (a >= 0 && ++idx[static_cast<std::size_t>(a)] == grid.points) {
            idx[static_cast<std::size_t>(a)] = 0;
            --a;
        }
        if (a < 0) break;
    }
    return out;
}

} // namespace

const ChartPoint* CenterChart::origin() const {
    for (const auto& p : points)
        if (p.coeffs.size() && p.coeffs.cwiseAbs().maxCoeff() == 0.0) return &p;
    return nullptr;
}

Eigen::VectorXd modified_step(const OrbitModel& model, std::int64_t n,
                              const Eigen::VectorXd& state) {
    const Eigen::VectorXd xi = state - model.y_at(n);
    return model.y_at(n + 1) + model.step_at(n) * xi + model.cutoff_p(n, xi);
}

Eigen::VectorXd modified_iterate(const OrbitModel& model, std::int64_t from,
                                 const Eigen::VectorXd& state, std::int64_t n) {
    if (n < 0) raise(errc::invalid_argument, "iteration count must be nonnegative");
    Eigen::VectorXd current = state;
    for (std::int64_t j = 0; j < n; ++j) current = modified_step(model, from + j, current);
    return current;
}

Eigen::VectorXd chart_value(const OrbitModel& model, std::int64_t base_index,
                            const Eigen::VectorXd& v) {
    LyapunovPerron op(model, base_index);
    return op.solve(v).window.at(0);
}

CenterChart sample_manifold(const OrbitModel& model, std::int64_t base_index, const GridSpec& grid,
                            int threads) {
    const Eigen::MatrixXd& c_basis = model.splitting.center_at(base_index);
    const int axes = static_cast<int>(c_basis.cols());
    const auto coeffs = grid_coefficients(grid, axes);

    LyapunovPerron op(model, base_index);
    CenterChart chart;
    chart.base_index = base_index;
    chart.grid = grid;
    chart.nu = model.config.nu;
    chart.points.resize(coeffs.size());

    std::vector<std::string> errors(coeffs.size());
    parallel_for(coeffs.size(), threads, [&](std::size_t i) {
        ChartPoint& point = chart.points[i];
        point.coeffs = coeffs[i];
        point.center = c_basis * coeffs[i];
        try {
            FixedPointResult fp = op.solve(point.center);
            point.value = fp.window.at(0);
            point.iterations = fp.iterations;
            point.residual = fp.residual;
            point.contraction_ratio = fp.contraction_ratio;
            point.window = std::move(fp.window);
        } catch (const Error& e) {
            errors[i] = e.what();
        }
    });
    for (std::size_t i = 0; i < errors.size(); ++i)
        if (!errors[i].empty()) chart.failures.push_back({i, errors[i]});
    return chart;
}

double distance_to_chart(const OrbitModel& model, const CenterChart& chart,
                         const Eigen::VectorXd& deviation) {
    if (chart.points.empty()) raise(errc::invalid_argument, "chart has no points");
    auto norm_at = [&](const Eigen::VectorXd& v) {
        return model.fiber_norm_at(chart.base_index, v);
    };

    std::size_t best = 0;
    double best_distance = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < chart.points.size(); ++i) {
        if (!chart.points[i].value.size()) continue;
        const double d = norm_at(deviation - chart.points[i].value);
        if (d < best_distance) {
            best_distance = d;
            best = i;
        }
    }

    // Local quadratic refinement along the center coordinate; at the edges
    // the three-point stencil is shifted inward.
    const int axes = static_cast<int>(chart.points.front().coeffs.size());
    if (axes != 1 || chart.points.size() < 3) return best_distance;
    const std::size_t mid = std::clamp<std::size_t>(best, 1, chart.points.size() - 2);
    const ChartPoint& l = chart.points[mid - 1];
    const ChartPoint& c = chart.points[mid];
    const ChartPoint& r = chart.points[mid + 1];
    if (!l.value.size() || !c.value.size() || !r.value.size()) return best_distance;

    const double dl = std::pow(norm_at(deviation - l.value), 2);
    const double dc = std::pow(norm_at(deviation - c.value), 2);
    const double dr = std::pow(norm_at(deviation - r.value), 2);
    const double curvature = dl - 2.0 * dc + dr;
    if (!(curvature > 0.0)) return best_distance;
    double t = std::clamp(0.5 * (dl - dr) / curvature, -1.0, 1.0);

    // Newton refinement of the squared distance to the quadratically
    // interpolated chart curve v(t), t in node-spacing units.
    const Eigen::VectorXd a0 = c.value;
    const Eigen::VectorXd a1 = 0.5 * (r.value - l.value);
    const Eigen::VectorXd a2 = 0.5 * (r.value + l.value) - c.value;
    for (int it = 0; it < 4; ++it) {
        const Eigen::VectorXd v = a0 + t * a1 + t * t * a2;
        const Eigen::VectorXd dv = a1 + 2.0 * t * a2;
        const Eigen::VectorXd gap = deviation - v;
        const double grad = -2.0 * gap.dot(dv);
        const double hess = 2.0 * (dv.dot(dv) - gap.dot(2.0 * a2));
        if (!(hess > 0.0)) break;
        t = std::clamp(t - grad / hess, -1.0, 1.0);
    }
    const Eigen::VectorXd interpolated = a0 + t * a1 + t * t * a2;
    return std::min(best_distance, norm_at(deviation - interpolated));
}

namespace {

// Comparison chart at a shifted base: margin to cover the images of the
// grid, and enough density for the local refinement to resolve distances
// well below the one-step tolerance.
CenterChart comparison_chart(const OrbitModel& model, std::int64_t base_index,
                             const GridSpec& grid) {
    GridSpec wide = grid;
    wide.radius = grid.radius * 1.3;
    wide.points = std::max(grid.points + (grid.points % 2 ? 0 : 1), 21);
    return sample_manifold(model, base_index, wide);
}

} // namespace

InvarianceReport verify_invariance(const OrbitModel& model, const CenterChart& chart,
                                   std::int64_t steps) {
    if (steps < 1) raise(errc::invalid_argument, "invariance check needs at least one step");
    const std::int64_t b = chart.base_index;

    InvarianceReport report;
    report.steps = steps;

    std::vector<CenterChart> shifted;
    for (std::int64_t j = 1; j <= steps; ++j)
        shifted.push_back(comparison_chart(model, b + j, chart.grid));

    LyapunovPerron op(model, b);
    LyapunovPerron op_next(model, b + 1);

    for (std::size_t i = 0; i < chart.points.size(); ++i) {
        const ChartPoint& point = chart.points[i];
        if (!point.value.size()) continue;
        const Eigen::VectorXd state = model.y_at(b) + point.value;

        // One step of the original cocycle, inside the rho-ball only.
        const double xi_norm = model.fiber_norm_at(b, point.value);
        if (xi_norm <= model.rho_at(b + 1)) {
            const Eigen::VectorXd image = model.system.cocycle.step(model.base.shifted(b), state);
            const double d = distance_to_chart(model, shifted[0], image - model.y_at(b + 1));
            report.one_step_distance = std::max(report.one_step_distance, d);
            ++report.one_step_points;
        } else {
            report.out_of_domain.push_back(i);
        }

        // One step of the modified cocycle, every point.
        {
            const Eigen::VectorXd image = modified_step(model, b, state);
            const double d = distance_to_chart(model, shifted[0], image - model.y_at(b + 1));
            report.modified_one_step_distance = std::max(report.modified_one_step_distance, d);
        }

        // Multi-step invariance on the domain where the whole orbit stays
        // inside the per-index rho-balls.
        {
            bool inside = true;
            Eigen::VectorXd current = state;
            for (std::int64_t j = 0; j < steps && inside; ++j) {
                if (model.fiber_norm_at(b + j, current - model.y_at(b + j)) > model.rho_at(b + j + 1)) {
                    inside = false;
                    break;
                }
                current = model.system.cocycle.step(model.base.shifted(b + j), current);
            }
            if (inside) {
                const double d = distance_to_chart(model, shifted[static_cast<std::size_t>(steps - 1)],
                                                   current - model.y_at(b + steps));
                report.multi_step_distance = std::max(report.multi_step_distance, d);
                ++report.multi_step_points;
            }
        }

        if (point.window) {
            // Transported fixed point: shift the window and measure the
            // fixed-point residual at the next base. The center vector of
            // the shifted window is its recovered center (the pushed center
            // plus the center part of the first cutoff remainder).
            const SequenceWindow moved = shift_window(*point.window);
            const Eigen::VectorXd v_next = op_next.recover_center(moved);
            const SequenceWindow image = op_next.apply(v_next, moved);
            report.transport_residual =
                std::max(report.transport_residual,
                         weighted_norm(window_difference(image, moved), model.system.field));

            // Orbit expansion of the modified cocycle: linear flow of the
            // deviation plus propagated cutoff remainders.
            Eigen::VectorXd propagated = point.value;
            for (std::int64_t j = 0; j < steps; ++j)
                propagated = model.step_at(b + j) * propagated;
            Eigen::VectorXd current = point.value;
            for (std::int64_t j = 0; j < steps; ++j) {
                Eigen::VectorXd term = model.cutoff_p(b + j, current);
                for (std::int64_t k = b + j + 1; k < b + steps; ++k) term = model.step_at(k) * term;
                propagated += term;
                current = modified_step(model, b + j, model.y_at(b + j) + current) -
                          model.y_at(b + j + 1);
            }
            const Eigen::VectorXd direct =
                modified_iterate(model, b, state, steps) - model.y_at(b + steps);
            report.orbit_identity_residual =
                std::max(report.orbit_identity_residual,
                         model.fiber_norm_at(b + steps, direct - propagated));

            const Eigen::VectorXd recovered = op.recover_center(*point.window);
            report.recover_residual = std::max(
                report.recover_residual, model.fiber_norm_at(b, recovered - point.center));
            const Eigen::VectorXd center_part = model.proj_c_at(b) * point.value;
            report.center_component_residual =
                std::max(report.center_component_residual,
                         model.fiber_norm_at(b, center_part - point.center));
        }
    }
    return report;
}

RegularityReport verify_chart_regularity(const OrbitModel& model, const CenterChart& chart) {
    if (chart.points.size() < 3)
        raise(errc::invalid_argument, "regularity check needs at least three grid points");
    const std::int64_t b = chart.base_index;

    RegularityReport report;
    report.lipschitz_bound = 2.0 * model.growth_nu.center_max_at(b);

    for (std::size_t i = 0; i < chart.points.size(); ++i) {
        if (!chart.points[i].value.size()) continue;
        for (std::size_t j = i + 1; j < chart.points.size(); ++j) {
            if (!chart.points[j].value.size()) continue;
            const double dv =
                model.fiber_norm_at(b, chart.points[i].center - chart.points[j].center);
            const double dh = model.fiber_norm_at(b, chart.points[i].value - chart.points[j].value);
            if (dv > 0.0 && dh > 0.0) {
                report.lipschitz = std::max(report.lipschitz, dh / dv);
                report.inverse_lipschitz = std::max(report.inverse_lipschitz, dv / dh);
            }
        }
    }

    if (const ChartPoint* zero = chart.origin())
        report.origin_fixed = zero->value.size() && zero->value.cwiseAbs().maxCoeff() == 0.0;

    // Tangency ladder: chart minus identity at shrinking center scales.
    const Eigen::MatrixXd& c_basis = model.splitting.center_at(b);
    const int axes = static_cast<int>(c_basis.cols());
    std::vector<double> log_s, log_ratio;
    for (int k = 0; k <= 8; ++k) {
        const double s = chart.grid.radius * std::pow(2.0, -k);
        double worst = 0.0;
        for (int a = 0; a < axes; ++a) {
            for (double sign : {-1.0, 1.0}) {
                Eigen::VectorXd v = c_basis.col(a) * (sign * s);
                const Eigen::VectorXd h = chart_value(model, b, v);
                worst = std::max(worst, model.fiber_norm_at(b, h - v) / s);
            }
        }
        report.tangency.push_back({s, worst});
        if (worst > 0.0) {
            log_s.push_back(std::log(s));
            log_ratio.push_back(std::log(worst));
        }
    }
    if (log_s.size() >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double n = static_cast<double>(log_s.size());
        for (std::size_t i = 0; i < log_s.size(); ++i) {
            sx += log_s[i];
            sy += log_ratio[i];
            sxx += log_s[i] * log_s[i];
            sxy += log_s[i] * log_ratio[i];
        }
        report.tangency_order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    }
    return report;
}

PolynomialFit taylor_fit(const OrbitModel& model, const CenterChart& chart, int degree) {
    const std::int64_t b = chart.base_index;
    const Eigen::MatrixXd& u_basis = model.splitting.unstable_at(b);
    const Eigen::MatrixXd& c_basis = model.splitting.center_at(b);
    const Eigen::MatrixXd& s_basis = model.splitting.stable_at(b);
    if (c_basis.cols() != 1)
        raise(errc::invalid_argument, "polynomial fit needs a one-dimensional center");

    std::vector<const ChartPoint*> solved;
    for (const auto& p : chart.points)
        if (p.value.size()) solved.push_back(&p);
    if (degree < 0 || static_cast<std::size_t>(degree) + 1 > solved.size())
        raise(errc::invalid_argument, "fit degree must be below the number of grid points");

    // Symmetry of the grid about the origin.
    double sum = 0.0, max_abs = 0.0;
    for (const auto* p : solved) {
        sum += p->coeffs[0];
        max_abs = std::max(max_abs, std::abs(p->coeffs[0]));
    }
    if (max_abs > 0.0 && std::abs(sum) > 1e-9 * max_abs * static_cast<double>(solved.size()))
        raise(errc::invalid_argument, "fit grid must be symmetric about zero");

    const int dim = static_cast<int>(c_basis.rows());
    Eigen::MatrixXd frame(dim, dim);
    frame << u_basis, c_basis, s_basis;
    const auto solver = frame.partialPivLu();

    const int rows_out = dim - 1;
    const auto n_pts = static_cast<Eigen::Index>(solved.size());
    Eigen::MatrixXd targets(n_pts, rows_out);
    Eigen::MatrixXd vandermonde(n_pts, degree + 1);
    const double scale = std::max(max_abs, 1e-300);
    for (Eigen::Index i = 0; i < n_pts; ++i) {
        const Eigen::VectorXd coords = solver.solve(solved[static_cast<std::size_t>(i)]->value);
        int r = 0;
        for (int k = 0; k < dim; ++k) {
            if (k == u_basis.cols()) continue; // skip the center coordinate
            targets(i, r++) = coords[k];
        }
        const double t = solved[static_cast<std::size_t>(i)]->coeffs[0] / scale;
        double power = 1.0;
        for (int d = 0; d <= degree; ++d) {
            vandermonde(i, d) = power;
            power *= t;
        }
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(vandermonde);
    if (qr.rank() < degree + 1) raise(errc::fit_failure, "vandermonde matrix is rank deficient");

    PolynomialFit fit;
    fit.unstable_rows = static_cast<int>(u_basis.cols());
    fit.coefficients.resize(rows_out, degree + 1);
    for (int r = 0; r < rows_out; ++r) {
        const Eigen::VectorXd scaled = qr.solve(targets.col(r));
        for (int d = 0; d <= degree; ++d)
            fit.coefficients(r, d) = scaled[d] / std::pow(scale, d);
        fit.max_residual = std::max(
            fit.max_residual, (vandermonde * scaled - targets.col(r)).cwiseAbs().maxCoeff());
    }
    return fit;
}

} // namespace centerfield
