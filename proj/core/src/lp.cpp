#include "centerfield/lp.hpp"

#include <cmath>
#include <limits>

#include "centerfield/errors.hpp"
#include "centerfield/linalg.hpp"

namespace centerfield {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double finite_or(double value, double fallback) { return std::isfinite(value) ? value : fallback; }

} // namespace

SequenceWindow::SequenceWindow(Realization b, std::int64_t l, std::int64_t h, double weight)
    : base(std::move(b)), lo(l), hi(h), nu(weight) {
    if (hi < lo) raise(errc::invalid_argument, "sequence window support is empty");
    entries.resize(static_cast<std::size_t>(hi - lo + 1));
}

Eigen::VectorXd& SequenceWindow::at(std::int64_t n) {
    if (!covers(n)) raise(errc::invalid_argument, "sequence index outside window support");
    return entries[static_cast<std::size_t>(n - lo)];
}

const Eigen::VectorXd& SequenceWindow::at(std::int64_t n) const {
    if (!covers(n)) raise(errc::invalid_argument, "sequence index outside window support");
    return entries[static_cast<std::size_t>(n - lo)];
}

SequenceWindow SequenceWindow::zero(const FiberField& field, const Realization& base,
                                    std::int64_t lo, std::int64_t hi, double nu) {
    SequenceWindow gamma(base, lo, hi, nu);
    for (std::int64_t n = lo; n <= hi; ++n)
        gamma.at(n) = Eigen::VectorXd::Zero(field.dimension(base.shifted(n)));
    return gamma;
}

double weighted_norm(const SequenceWindow& gamma, const FiberField& field) {
    double sup = 0.0;
    for (std::int64_t n = gamma.lo; n <= gamma.hi; ++n) {
        const double w = std::exp(-gamma.nu * static_cast<double>(std::llabs(n)));
        sup = std::max(sup, w * field.norm(gamma.base.shifted(n), gamma.at(n)));
    }
    return sup;
}

SequenceWindow window_difference(const SequenceWindow& a, const SequenceWindow& b) {
    if (a.lo != b.lo || a.hi != b.hi)
        raise(errc::invalid_argument, "sequence windows have different supports");
    SequenceWindow out(a.base, a.lo, a.hi, a.nu);
    for (std::int64_t n = a.lo; n <= a.hi; ++n) out.at(n) = a.at(n) - b.at(n);
    return out;
}

SequenceWindow shift_window(const SequenceWindow& gamma) {
    if (gamma.hi == gamma.lo) raise(errc::invalid_argument, "cannot shift a single-entry window");
    SequenceWindow out(gamma.base.shifted(1), gamma.lo - 1, gamma.hi - 1, gamma.nu);
    for (std::int64_t n = out.lo; n <= out.hi; ++n) out.at(n) = gamma.at(n + 1);
    return out;
}

double contraction_factor(double nu, double epsilon, const LyapunovSpectrum& spectrum,
                          bool with_center_term) {
    if (!(nu > 0.0)) raise(errc::parameters_infeasible, "nu must be positive");
    if (!(epsilon > 0.0) || !(epsilon < nu))
        raise(errc::parameters_infeasible, "need 0 < epsilon < nu");
    const double mu_plus = spectrum.mu_plus().value_or(kInf);
    const double mu_minus = spectrum.mu_minus().value_or(-kInf);
    if (!(nu < mu_plus) || !(nu < -mu_minus))
        raise(errc::parameters_infeasible, "nu must lie below the spectral gaps");
    const double up = -mu_plus + epsilon + nu;
    const double down = mu_minus + epsilon + nu;
    if (!(up < 0.0) || !(down < 0.0))
        raise(errc::parameters_infeasible, "epsilon + nu must stay below the spectral gaps");

    const double unstable_term = std::isinf(mu_plus) ? 0.0 : std::exp(up) / (1.0 - std::exp(up));
    const double stable_term = 1.0 / (1.0 - std::exp(down));
    const double center_term = with_center_term ? 1.0 / (1.0 - std::exp(epsilon - nu)) : 0.0;
    return std::exp(nu) * (center_term + unstable_term + stable_term);
}

ContractionCertificate contraction_bound(const LPConfig& config, const LyapunovSpectrum& spectrum) {
    ContractionCertificate cert;
    cert.nu = config.nu;
    cert.epsilon = config.epsilon;
    cert.m_eps = config.m_eps;
    cert.m_tilde = config.m_tilde;
    cert.l_eps = config.m_eps * contraction_factor(config.nu, config.epsilon, spectrum, true);
    cert.l_tilde = config.m_tilde * contraction_factor(config.nu, config.epsilon, spectrum, false);
    cert.five_l_eps = 5.0 * cert.l_eps;
    cert.five_l_tilde = 5.0 * cert.l_tilde;
    cert.contraction_ok = cert.five_l_eps < 1.0;
    cert.injectivity_ok = cert.five_l_tilde <= 1.0;
    return cert;
}

double default_epsilon(const LyapunovSpectrum& spectrum, double nu) {
    double bound = nu;
    if (auto mp = spectrum.mu_plus()) bound = std::min(bound, *mp - nu);
    if (auto mm = spectrum.mu_minus()) bound = std::min(bound, -*mm - nu);
    if (!(bound > 0.0)) raise(errc::parameters_infeasible, "no admissible epsilon below the gaps");
    return bound / 4.0;
}

namespace {
// shaved so the certificates stay strict after the rounding of m * factor
constexpr double kCertificateMargin = 1.0 - 1e-9;
} // namespace

double max_m_for_contraction(double nu, double epsilon, const LyapunovSpectrum& spectrum) {
    return kCertificateMargin * 0.1 / contraction_factor(nu, epsilon, spectrum, true);
}

double max_m_for_injectivity(double nu, double epsilon, const LyapunovSpectrum& spectrum) {
    return kCertificateMargin * 0.2 / contraction_factor(nu, epsilon, spectrum, false);
}

LPConfig resolve_lp_config(const LPSettings& settings, const LyapunovSpectrum& spectrum) {
    LPConfig config;
    const double mu_plus = spectrum.mu_plus().value_or(kInf);
    const double mu_minus = spectrum.mu_minus().value_or(-kInf);
    const double gap = std::min(finite_or(mu_plus, kInf), finite_or(-mu_minus, kInf));

    config.nu = settings.nu_auto ? (std::isfinite(gap) ? gap / 3.0 : 0.2) : settings.nu;
    if (!(config.nu > 0.0) || !(config.nu < gap))
        raise(errc::parameters_infeasible,
              "nu = " + std::to_string(config.nu) + " is not inside (0, " + std::to_string(gap) + ")");
    config.epsilon = settings.epsilon_auto ? default_epsilon(spectrum, config.nu) : settings.epsilon;
    if (settings.m_auto) {
        config.m_eps = max_m_for_contraction(config.nu, config.epsilon, spectrum);
        config.m_tilde = max_m_for_injectivity(config.nu, config.epsilon, spectrum);
    } else {
        config.m_eps = settings.m_eps;
        config.m_tilde = settings.m_tilde;
    }
    config.window = settings.window;
    config.tolerance = settings.tolerance;
    config.max_iterations = settings.max_iterations;
    config.horizon = settings.horizon;
    config.safety = settings.safety;
    config.radius_mode = settings.radius_mode;

    if (config.window < 2) raise(errc::invalid_argument, "solver window must be at least 2");
    if (!(config.tolerance > 0.0)) raise(errc::invalid_argument, "tolerance must be positive");
    return config;
}

std::size_t OrbitModel::slot(std::int64_t n) const {
    if (n < lo || n > hi)
        raise(errc::invalid_argument,
              "orbit index " + std::to_string(n) + " outside the model window");
    return static_cast<std::size_t>(n - lo);
}

const Eigen::MatrixXd& OrbitModel::step_at(std::int64_t n) const {
    if (n < lo || n >= hi) raise(errc::invalid_argument, "step index outside the model window");
    return step[static_cast<std::size_t>(n - lo)];
}
const Eigen::MatrixXd& OrbitModel::proj_c_at(std::int64_t n) const { return proj_c[slot(n)]; }
const Eigen::MatrixXd& OrbitModel::proj_u_at(std::int64_t n) const { return proj_u[slot(n)]; }
const Eigen::MatrixXd& OrbitModel::proj_s_at(std::int64_t n) const { return proj_s[slot(n)]; }
const Eigen::MatrixXd& OrbitModel::inv_c_at(std::int64_t n) const {
    if (n < lo || n >= hi) raise(errc::invalid_argument, "inverse index outside the model window");
    return inv_c[static_cast<std::size_t>(n - lo)];
}
const Eigen::MatrixXd& OrbitModel::inv_u_at(std::int64_t n) const {
    if (n < lo || n >= hi) raise(errc::invalid_argument, "inverse index outside the model window");
    return inv_u[static_cast<std::size_t>(n - lo)];
}
const Eigen::VectorXd& OrbitModel::y_at(std::int64_t n) const { return y[slot(n)]; }
double OrbitModel::rho_at(std::int64_t n) const { return rho[slot(n)]; }
double OrbitModel::f_at(std::int64_t n) const { return f[slot(n)]; }

double OrbitModel::fiber_norm_at(std::int64_t n, const Eigen::VectorXd& v) const {
    return system.field.norm(base.shifted(n), v);
}

int OrbitModel::dimension_at(std::int64_t n) const {
    return system.field.dimension(base.shifted(n));
}

Eigen::VectorXd OrbitModel::cutoff_p(std::int64_t n, const Eigen::VectorXd& xi) const {
    const double norm_xi = fiber_norm_at(n, xi);
    const double delta = bump(norm_xi / rho_at(n + 1));
    const int out_dim = dimension_at(n + 1);
    if (delta == 0.0) return Eigen::VectorXd::Zero(out_dim);
    const double validity = system.cutoff.validity_at(base.shifted(n));
    if (!(norm_xi < validity))
        raise(errc::outside_validity_radius,
              "cutoff engaged outside the remainder's validity radius");
    const Realization at = base.shifted(n);
    const Eigen::VectorXd p =
        system.cocycle.step(at, y_at(n) + xi) - phi_y[static_cast<std::size_t>(n - lo)] -
        step_at(n) * xi;
    return delta * p;
}

RadiusBreakdown certified_radius(const OrbitModel& model, std::int64_t n) {
    const double f_here = model.f_at(n);
    if (!(f_here > 0.0)) raise(errc::radius_failure, "modulus f must be positive");
    const auto& ge = model.growth_eps;
    const auto& gn = model.growth_nu;
    const double pi_c = model.pi_c_norm[model.slot(n)];
    const double pi_u = model.pi_u_norm[model.slot(n)];
    const double pi_s = model.pi_s_norm[model.slot(n)];

    double t_min = kInf;
    t_min = std::min(t_min, 1.0 / (ge.center_forward_at(n) * pi_c));
    t_min = std::min(t_min, 1.0 / (ge.center_backward_at(n) * pi_c));
    if (model.splitting.dim_unstable > 0) t_min = std::min(t_min, 1.0 / (ge.unstable_at(n) * pi_u));
    if (pi_s > 0.0) t_min = std::min(t_min, 1.0 / (ge.stable_at(n) * pi_s));

    RadiusBreakdown out;
    out.t = model.config.m_eps / f_here * t_min;
    if (!(out.t > 0.0)) raise(errc::radius_failure, "certificate radius collapsed to zero");

    double tilde_min = kInf;
    if (model.splitting.dim_unstable > 0)
        tilde_min = std::min(tilde_min, 1.0 / (ge.unstable_at(n) * pi_u));
    if (pi_s > 0.0) tilde_min = std::min(tilde_min, 1.0 / (ge.stable_at(n) * pi_s));
    const double center_max_nu = std::max(gn.center_forward_at(n), gn.center_backward_at(n));
    out.t_tilde = std::isfinite(tilde_min)
                      ? model.config.m_tilde / (4.0 * f_here * center_max_nu) * tilde_min
                      : kInf;

    const Modulus& h = model.system.cutoff.modulus_h;
    double rho = 0.25 * h.inverse(out.t);
    if (std::isfinite(out.t_tilde)) rho = std::min(rho, 0.25 * h.inverse(out.t_tilde));
    if (!(rho > 0.0)) raise(errc::radius_failure, "certificate radius is not positive");
    out.rho = rho;
    return out;
}

OrbitModel build_orbit_model(const SystemBundle& system, const Realization& omega,
                             const LyapunovSpectrum& spectrum, const OseledetsSplitting& splitting,
                             const LPConfig& config) {
    if (splitting.base.offset() != omega.offset())
        raise(errc::invalid_argument, "splitting was computed along a different base point");
    OrbitModel model{system, omega, spectrum, splitting,
                     growth_constants(system.linear, system.field, splitting, spectrum,
                                      config.epsilon, config.horizon, config.safety),
                     growth_constants(system.linear, system.field, splitting, spectrum, config.nu,
                                      config.horizon, config.safety),
                     contraction_bound(config, spectrum), config};

    if (!model.certificate.contraction_ok)
        raise(errc::parameters_infeasible, "contraction certificate 5 L < 1 fails");
    if (!model.certificate.injectivity_ok)
        raise(errc::parameters_infeasible, "injectivity certificate 5 L~ <= 1 fails");

    model.lo = model.growth_eps.lo;
    model.hi = model.growth_eps.hi;
    const auto count = static_cast<std::size_t>(model.hi - model.lo + 1);

    model.proj_c.reserve(count);
    model.proj_u.reserve(count);
    model.proj_s.reserve(count);
    for (std::int64_t n = model.lo; n <= model.hi; ++n) {
        model.proj_c.push_back(projection_matrix(splitting, Component::center, n));
        model.proj_u.push_back(projection_matrix(splitting, Component::unstable, n));
        model.proj_s.push_back(projection_matrix(splitting, Component::stable, n));
        const ProjectionNorms norms = projection_norms(splitting, system.field, n);
        model.pi_c_norm.push_back(norms.center);
        model.pi_u_norm.push_back(norms.unstable);
        model.pi_s_norm.push_back(norms.stable);

        const Realization at = omega.shifted(n);
        model.y.push_back(system.stationary.at(at));
        model.f.push_back(system.cutoff.f_at(at));
        model.rho_system.push_back(system.cutoff.rho_at(at));
    }

    for (std::int64_t n = model.lo; n < model.hi; ++n) {
        const Realization at = omega.shifted(n);
        Eigen::MatrixXd a = system.linear.matrix(at);
        model.phi_y.push_back(system.cocycle.step(at, model.y_at(n)));

        const Eigen::MatrixXd& c_basis = splitting.center_at(n);
        const Eigen::MatrixXd& u_basis = splitting.unstable_at(n);
        if (c_basis.cols() > 0) {
            const Eigen::MatrixXd pushed = a * c_basis;
            model.inv_c.push_back(
                c_basis * pushed.completeOrthogonalDecomposition().pseudoInverse());
        } else {
            model.inv_c.push_back(Eigen::MatrixXd::Zero(a.cols(), a.rows()));
        }
        if (u_basis.cols() > 0) {
            const Eigen::MatrixXd pushed = a * u_basis;
            model.inv_u.push_back(
                u_basis * pushed.completeOrthogonalDecomposition().pseudoInverse());
        } else {
            model.inv_u.push_back(Eigen::MatrixXd::Zero(a.cols(), a.rows()));
        }
        model.step.push_back(std::move(a));
    }

    for (std::int64_t n = model.lo; n <= model.hi; ++n)
        model.rho_certified.push_back(certified_radius(model, n).rho);

    model.rho = config.radius_mode == RadiusMode::system ? model.rho_system : model.rho_certified;
    return model;
}

LyapunovPerron::LyapunovPerron(const OrbitModel& model, std::int64_t base_index)
    : model_(&model), base_(base_index) {
    if (!model.covers(base_index, base_index))
        raise(errc::invalid_argument, "operator base index outside the model window");
}

void LyapunovPerron::require_window(const SequenceWindow& gamma) const {
    if (gamma.lo > -1 || gamma.hi < 1)
        raise(errc::invalid_argument, "sequence window must straddle the base index");
    if (!(base_ + gamma.lo >= model_->lo && base_ + gamma.hi + 1 <= model_->hi))
        raise(errc::invalid_argument,
              "model orbit window is smaller than the requested sequence window");
    if (gamma.nu != model_->config.nu)
        raise(errc::invalid_argument, "sequence weight differs from the configured nu");
}

SequenceWindow LyapunovPerron::zero_window() const {
    const std::int64_t n = model_->config.window;
    return SequenceWindow::zero(model_->system.field, model_->base.shifted(base_), -n, n,
                                model_->config.nu);
}

SequenceWindow LyapunovPerron::apply(const Eigen::VectorXd& center_v,
                                     const SequenceWindow& gamma) const {
    require_window(gamma);
    const OrbitModel& m = *model_;
    const std::int64_t lo = gamma.lo;
    const std::int64_t hi = gamma.hi;

    const double v_norm = m.fiber_norm_at(base_, center_v);
    if (v_norm > 0.0) {
        const Eigen::VectorXd off_center = center_v - m.proj_c_at(base_) * center_v;
        if (m.fiber_norm_at(base_, off_center) > m.config.center_tol * v_norm)
            raise(errc::not_in_center, "input vector has a component off the center subspace");
    }

    // Cutoff remainders p[j] of the entries, living in the fiber at j.
    // Entries beyond the window are zero, so p vanishes outside [lo+1, hi+1].
    std::vector<Eigen::VectorXd> ps(static_cast<std::size_t>(hi - lo + 1));
    for (std::int64_t j = lo + 1; j <= hi + 1; ++j)
        ps[static_cast<std::size_t>(j - lo - 1)] = m.cutoff_p(base_ + j - 1, gamma.at(j - 1));
    auto p_at = [&](std::int64_t j) -> Eigen::VectorXd {
        if (j < lo + 1 || j > hi + 1) return Eigen::VectorXd::Zero(m.dimension_at(base_ + j));
        return ps[static_cast<std::size_t>(j - lo - 1)];
    };

    SequenceWindow out(gamma.base, lo, hi, gamma.nu);

    // Homogeneous center orbit of v: forward by the one-step matrices,
    // backward by the restricted inverse on the center. Forward pushes are
    // re-projected onto the center: a no-op in exact arithmetic, it stops
    // roundoff in the expanding directions from growing exponentially.
    std::vector<Eigen::VectorXd> hom(static_cast<std::size_t>(hi - lo + 1));
    auto hom_at = [&](std::int64_t n) -> Eigen::VectorXd& {
        return hom[static_cast<std::size_t>(n - lo)];
    };
    hom_at(0) = center_v;
    for (std::int64_t n = 1; n <= hi; ++n)
        hom_at(n) = m.proj_c_at(base_ + n) * (m.step_at(base_ + n - 1) * hom_at(n - 1));
    for (std::int64_t n = -1; n >= lo; --n) hom_at(n) = m.inv_c_at(base_ + n) * hom_at(n + 1);

    // Center partial sums: forward recursion for n > 0, backward for n < 0.
    std::vector<Eigen::VectorXd> center(static_cast<std::size_t>(hi - lo + 1));
    auto center_at = [&](std::int64_t n) -> Eigen::VectorXd& {
        return center[static_cast<std::size_t>(n - lo)];
    };
    center_at(0) = Eigen::VectorXd::Zero(m.dimension_at(base_));
    for (std::int64_t n = 1; n <= hi; ++n)
        center_at(n) = m.proj_c_at(base_ + n) *
                       (m.step_at(base_ + n - 1) * center_at(n - 1) + p_at(n));
    if (lo <= -1) {
        // T(n) = sum_{j=n+1..0} psi^{n-j} Pi_C p_j; the center term is
        // -T(n). This range makes the center components telescope with the
        // one-step recursion, which the fixed-point / orbit equivalence and
        // the shift transport rely on.
        Eigen::VectorXd t = Eigen::VectorXd::Zero(m.dimension_at(base_));
        for (std::int64_t n = -1; n >= lo; --n) {
            t = m.inv_c_at(base_ + n) * (t + m.proj_c_at(base_ + n + 1) * p_at(n + 1));
            center_at(n) = -t;
        }
    }

    // Unstable tail R(n) = sum_{j >= n+1} psi^{n-j} Pi_U p_j, pulled back
    // one restricted-inverse step at a time.
    std::vector<Eigen::VectorXd> tail(static_cast<std::size_t>(hi - lo + 1));
    auto tail_at = [&](std::int64_t n) -> Eigen::VectorXd& {
        return tail[static_cast<std::size_t>(n - lo)];
    };
    if (m.splitting.dim_unstable > 0) {
        Eigen::VectorXd r = Eigen::VectorXd::Zero(m.dimension_at(base_ + hi + 1));
        for (std::int64_t n = hi; n >= lo; --n) {
            r = m.inv_u_at(base_ + n) * (m.proj_u_at(base_ + n + 1) * p_at(n + 1) + r);
            tail_at(n) = r;
        }
    } else {
        for (std::int64_t n = lo; n <= hi; ++n)
            tail_at(n) = Eigen::VectorXd::Zero(m.dimension_at(base_ + n));
    }

    // Stable sum S(n) = sum_{j <= n} psi^{n-j} Pi_S p_j.
    std::vector<Eigen::VectorXd> stab(static_cast<std::size_t>(hi - lo + 1));
    auto stab_at = [&](std::int64_t n) -> Eigen::VectorXd& {
        return stab[static_cast<std::size_t>(n - lo)];
    };
    stab_at(lo) = Eigen::VectorXd::Zero(m.dimension_at(base_ + lo));
    for (std::int64_t n = lo + 1; n <= hi; ++n)
        stab_at(n) = m.proj_s_at(base_ + n) *
                     (m.step_at(base_ + n - 1) * stab_at(n - 1) + p_at(n));

    for (std::int64_t n = lo; n <= hi; ++n) {
        out.at(n) = hom_at(n) + center_at(n) - tail_at(n) + stab_at(n);
        if (!out.at(n).allFinite())
            raise(errc::numerical_failure, "operator produced a non-finite entry");
    }
    return out;
}

FixedPointResult LyapunovPerron::solve(const Eigen::VectorXd& center_v) const {
    const OrbitModel& m = *model_;
    if (!m.certificate.contraction_ok)
        raise(errc::parameters_infeasible, "contraction certificate does not hold");

    SequenceWindow gamma = zero_window();
    double previous_residual = -1.0;
    double ratio = 0.0;

    for (std::int64_t k = 1; k <= m.config.max_iterations; ++k) {
        SequenceWindow next = apply(center_v, gamma);
        const double residual = weighted_norm(window_difference(next, gamma), m.system.field);
        gamma = std::move(next);
        if (previous_residual > 0.0 && residual > 0.0)
            ratio = std::max(ratio, residual / previous_residual);
        if (residual < m.config.tolerance) {
            // k applications were made; the last one only certified the
            // fixed point, so k - 1 updates did the work.
            FixedPointResult result{std::move(gamma), k - 1, residual, ratio, 0.0, 0.0, true};
            result.norm = weighted_norm(result.window, m.system.field);
            const double f_c = m.growth_eps.center_max_at(base_);
            result.apriori_bound =
                f_c * m.fiber_norm_at(base_, center_v) / (1.0 - m.certificate.l_eps);
            result.apriori_ok = result.norm <= result.apriori_bound * (1.0 + 1e-9) + 1e-300;
            return result;
        }
        previous_residual = residual;
    }
    raise(errc::fixed_point_not_converged,
          "residual " + std::to_string(previous_residual) + " after " +
              std::to_string(model_->config.max_iterations) +
              " iterations; empirical contraction ratio " + std::to_string(ratio));
}

Eigen::VectorXd LyapunovPerron::recover_center(const SequenceWindow& gamma) const {
    require_window(gamma);
    const OrbitModel& m = *model_;

    Eigen::VectorXd v = gamma.at(0);

    if (m.splitting.dim_unstable > 0) {
        Eigen::VectorXd r = Eigen::VectorXd::Zero(m.dimension_at(base_ + gamma.hi + 1));
        for (std::int64_t n = gamma.hi; n >= 0; --n)
            r = m.inv_u_at(base_ + n) *
                (m.proj_u_at(base_ + n + 1) * m.cutoff_p(base_ + n, gamma.at(n)) + r);
        v += r;
    }

    Eigen::VectorXd s = Eigen::VectorXd::Zero(m.dimension_at(base_ + gamma.lo));
    for (std::int64_t n = gamma.lo + 1; n <= 0; ++n)
        s = m.proj_s_at(base_ + n) *
            (m.step_at(base_ + n - 1) * s + m.cutoff_p(base_ + n - 1, gamma.at(n - 1)));
    v -= s;
    // The sums cancel the off-center parts of the leading entry; project to
    // keep roundoff from leaking into the expanding directions downstream.
    return m.proj_c_at(base_) * v;
}

} // namespace centerfield
