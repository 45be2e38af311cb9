#include "centerfield/cocycle.hpp"

#include <cmath>
#include <vector>

#include "centerfield/errors.hpp"
#include "centerfield/linalg.hpp"

namespace centerfield {

double Modulus::operator()(double x) const {
    if (x < 0.0) raise(errc::invalid_argument, "modulus argument must be nonnegative");
    if (exponent == 1.0) return x;
    return std::pow(x, exponent);
}

double Modulus::inverse(double y) const {
    if (y < 0.0) raise(errc::radius_failure, "modulus inverse undefined for negative values");
    if (exponent == 1.0) return y;
    return std::pow(y, 1.0 / exponent);
}

double CutoffSpec::rho_at(const Realization& omega) const {
    if (!rho) raise(errc::invalid_argument, "cutoff radius not set");
    double r = rho(omega);
    if (!(r > 0.0)) raise(errc::radius_failure, "cutoff radius must be positive");
    return r;
}

double CutoffSpec::validity_at(const Realization& omega) const {
    if (!validity) return std::numeric_limits<double>::infinity();
    return validity(omega);
}

double CutoffSpec::f_at(const Realization& omega) const {
    if (!modulus_f) return 1.0;
    return modulus_f(omega);
}

CutoffSpec CutoffSpec::constants(double rho, double f, double h_exponent, double validity) {
    CutoffSpec spec;
    spec.rho = [rho](const Realization&) { return rho; };
    spec.validity = [validity](const Realization&) { return validity; };
    spec.modulus_f = [f](const Realization&) { return f; };
    spec.modulus_h = Modulus{h_exponent};
    return spec;
}

double bump(double x) {
    const double t = std::abs(x) - 1.0;
    if (t <= 0.0) return 1.0;
    if (t >= 1.0) return 0.0;
    // smoothstep 1 - t^3 (10 - 15 t + 6 t^2); |d/dx| peaks at 15/8 < 2
    return 1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
}

Eigen::VectorXd iterate(const Cocycle& c, const FiberField& field, const Realization& omega,
                        const Eigen::VectorXd& x, std::int64_t n) {
    if (n < 0) raise(errc::invalid_argument, "iteration count must be nonnegative");
    if (x.size() != field.dimension(omega))
        raise(errc::invalid_argument, "state does not lie in the fiber over omega");
    Eigen::VectorXd state = x;
    for (std::int64_t j = 0; j < n; ++j) state = c.step(omega.shifted(j), state);
    return state;
}

namespace {

Eigen::MatrixXd central_difference(const Cocycle& c, const FiberField& field,
                                   const Realization& omega, const Eigen::VectorXd& at) {
    const int n_in = static_cast<int>(at.size());
    const int n_out = field.dimension(omega.shifted(1));
    const double h = std::max(1e-6, 1e-6 * at.norm());
    Eigen::MatrixXd jac(n_out, n_in);
    Eigen::VectorXd probe = at;
    for (int j = 0; j < n_in; ++j) {
        probe[j] = at[j] + h;
        Eigen::VectorXd fp = c.step(omega, probe);
        probe[j] = at[j] - h;
        Eigen::VectorXd fm = c.step(omega, probe);
        probe[j] = at[j];
        jac.col(j) = (fp - fm) / (2.0 * h);
    }
    return jac;
}

} // namespace

Eigen::MatrixXd linearize_at(const Cocycle& c, const StationaryPoint& y, const FiberField& field,
                             const Realization& omega) {
    const Eigen::VectorXd at = y.at(omega);
    if (at.size() != field.dimension(omega))
        raise(errc::invalid_argument, "stationary point does not lie in the fiber over omega");
    if (c.differential) return c.differential(omega, at);
    return central_difference(c, field, omega, at);
}

LinearCocycle linearize(const Cocycle& c, const StationaryPoint& y, const FiberField& field) {
    return LinearCocycle{[c, y, field](const Realization& omega) {
        return linearize_at(c, y, field, omega);
    }};
}

void check_linearization(const Cocycle& c, const StationaryPoint& y, const FiberField& field,
                         const Realization& omega, const Eigen::MatrixXd& differential) {
    const Eigen::VectorXd at = y.at(omega);
    const Eigen::VectorXd image = c.step(omega, at);
    const int dim = static_cast<int>(at.size());
    detail::SplitMix rng(omega.spec().seed ^ 0x5ca1ab1eull);
    Eigen::VectorXd direction = rng.vector(dim);
    direction.normalize();

    const Realization next = omega.shifted(1);
    const double base = std::max(1.0, at.norm());
    double previous = std::numeric_limits<double>::infinity();
    double first = 0.0, last = 0.0;
    for (int k = 4; k <= 10; ++k) {
        const double eps = base * std::pow(2.0, -k);
        const Eigen::VectorXd xi = eps * direction;
        const double err =
            field.norm(next, c.step(omega, at + xi) - image - differential * xi) / eps;
        if (k == 4) first = err;
        last = err;
        if (err > previous * 1.5 + 1e-9)
            raise(errc::linearization_failure,
                  "first-order error grows along the shrinking-perturbation ladder");
        previous = err;
    }
    if (!(last <= 0.75 * first + 1e-12))
        raise(errc::linearization_failure, "first-order error does not decay; differential suspect");
}

Eigen::VectorXd remainder(const Cocycle& c, const StationaryPoint& y, const LinearCocycle& psi,
                          const FiberField& field, const Realization& omega,
                          const Eigen::VectorXd& xi, double validity_radius) {
    const double norm_xi = field.norm(omega, xi);
    if (!(norm_xi < validity_radius))
        raise(errc::outside_validity_radius,
              "perturbation norm " + std::to_string(norm_xi) + " exceeds validity radius");
    const Eigen::VectorXd at = y.at(omega);
    return c.step(omega, at + xi) - c.step(omega, at) - psi.matrix(omega) * xi;
}

Eigen::VectorXd cutoff_remainder(const SystemBundle& sys, const Realization& omega,
                                 const Eigen::VectorXd& xi) {
    const double rho_next = sys.cutoff.rho_at(omega.shifted(1));
    const double norm_xi = sys.field.norm(omega, xi);
    const double delta = bump(norm_xi / rho_next);
    const int out_dim = sys.field.dimension(omega.shifted(1));
    if (delta == 0.0) return Eigen::VectorXd::Zero(out_dim);
    const Eigen::VectorXd p =
        remainder(sys.cocycle, sys.stationary, sys.linear, sys.field, omega, xi,
                  sys.cutoff.validity_at(omega));
    return delta * p;
}

namespace {

double least_squares_slope(const std::vector<double>& ys) {
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

} // namespace

AssumptionReport verify_assumption(const SystemBundle& sys, const Realization& omega,
                                   const AssumptionOptions& options) {
    if (options.orbit_samples < 1)
        raise(errc::invalid_argument, "assumption check needs at least one orbit sample");

    AssumptionReport report;
    detail::SplitMix rng(options.sample_seed);
    std::vector<double> log_f, log_rho;
    double sum_log_plus = 0.0;

    for (std::int64_t n = 0; n < options.orbit_samples; ++n) {
        const Realization base = omega.shifted(n);
        const Eigen::MatrixXd psi = sys.linear.matrix(base);
        sum_log_plus += std::max(0.0, std::log(linalg::operator_norm(psi)));

        const double f_next = sys.cutoff.f_at(base.shifted(1));
        log_f.push_back(std::max(0.0, std::log(std::max(f_next, 1e-300))));
        log_rho.push_back(std::log(sys.cutoff.rho_at(base)));

        const double radius = std::min(options.sample_radius, sys.cutoff.validity_at(base));
        const int dim = sys.field.dimension(base);
        for (int p = 0; p < options.pairs_per_index; ++p) {
            Eigen::VectorXd u = rng.vector(dim) * radius * 0.5;
            Eigen::VectorXd v = rng.vector(dim) * radius * 0.5;
            const double gap = sys.field.norm(base, u - v);
            if (gap < 1e-14) continue;
            const Eigen::VectorXd pu =
                remainder(sys.cocycle, sys.stationary, sys.linear, sys.field, base, u, radius * 1.01);
            const Eigen::VectorXd pv =
                remainder(sys.cocycle, sys.stationary, sys.linear, sys.field, base, v, radius * 1.01);
            const double bound = gap * f_next *
                                 sys.cutoff.modulus_h(sys.field.norm(base, u) + sys.field.norm(base, v));
            if (bound <= 0.0) continue;
            const double ratio = sys.field.norm(base.shifted(1), pu - pv) / bound;
            report.max_violation_ratio = std::max(report.max_violation_ratio, ratio);
            ++report.samples;
        }
    }

    report.mean_log_plus_psi = sum_log_plus / static_cast<double>(options.orbit_samples);
    report.f_slope = least_squares_slope(log_f);
    report.rho_slope = least_squares_slope(log_rho);
    report.f_slope_ok = std::abs(report.f_slope) <= options.slope_tolerance;
    report.rho_slope_ok = std::abs(report.rho_slope) <= options.slope_tolerance;
    return report;
}

double estimate_modulus_f(const SystemBundle& sys, const Realization& omega, double radius,
                          std::int64_t orbit_samples, int pairs_per_index,
                          std::uint64_t sample_seed) {
    SystemBundle probe = sys;
    probe.cutoff.modulus_f = [](const Realization&) { return 1.0; };
    AssumptionOptions options;
    options.orbit_samples = orbit_samples;
    options.pairs_per_index = pairs_per_index;
    options.sample_radius = radius;
    options.sample_seed = sample_seed;
    return verify_assumption(probe, omega, options).max_violation_ratio;
}

} // namespace centerfield
