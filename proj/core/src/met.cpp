#include "centerfield/met.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "centerfield/errors.hpp"
#include "centerfield/linalg.hpp"

namespace centerfield {

namespace {

double gap_half(const LyapunovSpectrum& s) { return 0.5 * s.gap_threshold; }

Eigen::VectorXd scale_of(const FiberField& field, const Realization& omega) {
    const FiberSpec spec = field.spec(omega);
    if (!norm_is_quadratic(spec))
        raise(errc::invalid_argument, "operator-norm computations need a quadratic fiber norm");
    return norm_scaling(spec);
}

// One-step matrix in scaled coordinates, where the fiber norm is euclidean.
Eigen::MatrixXd scaled_step(const LinearCocycle& psi, const FiberField& field,
                            const Realization& at) {
    Eigen::MatrixXd a = psi.matrix(at);
    const Eigen::VectorXd d_in = scale_of(field, at);
    const Eigen::VectorXd d_out = scale_of(field, at.shifted(1));
    if (a.cols() != d_in.size() || a.rows() != d_out.size())
        raise(errc::invalid_argument, "one-step matrix shape does not match fiber dimensions");
    return d_out.asDiagonal() * a * d_in.cwiseInverse().asDiagonal();
}

} // namespace

std::optional<int> LyapunovSpectrum::center_cluster() const {
    for (std::size_t i = 0; i < exponents.size(); ++i)
        if (std::abs(exponents[i]) < gap_half(*this)) return static_cast<int>(i);
    return std::nullopt;
}

std::optional<double> LyapunovSpectrum::mu_plus() const {
    std::optional<double> best;
    for (double mu : exponents)
        if (mu > gap_half(*this) && (!best || mu < *best)) best = mu;
    return best;
}

std::optional<double> LyapunovSpectrum::mu_minus() const {
    std::optional<double> best;
    for (double mu : exponents)
        if (mu < -gap_half(*this) && (!best || mu > *best)) best = mu;
    return best;
}

int LyapunovSpectrum::unstable_dimension() const {
    int d = 0;
    for (std::size_t i = 0; i < exponents.size(); ++i)
        if (exponents[i] > gap_half(*this)) d += multiplicities[i];
    return d;
}

int LyapunovSpectrum::center_dimension() const {
    auto ic = center_cluster();
    return ic ? multiplicities[static_cast<std::size_t>(*ic)] : 0;
}

int LyapunovSpectrum::direction_count() const {
    int d = 0;
    for (int m : multiplicities) d += m;
    return d;
}

LyapunovSpectrum lyapunov_spectrum(const LinearCocycle& psi, const FiberField& field,
                                   const Realization& omega, int k, std::int64_t n,
                                   const SpectrumOptions& options) {
    if (k < 1) raise(errc::invalid_argument, "need at least one exponent");
    if (n < 1) raise(errc::invalid_argument, "need at least one step");
    if (k > field.dimension(omega))
        raise(errc::invalid_argument, "more exponents requested than the fiber dimension");

    detail::SplitMix rng(omega.spec().seed ^ 0xBE77E771ull);
    Eigen::MatrixXd frame = linalg::orthonormalize(rng.matrix(field.dimension(omega), k));

    // Welford running moments of the per-step log stretches.
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(k);
    Eigen::VectorXd m2 = Eigen::VectorXd::Zero(k);

    const std::int64_t warmup = std::max<std::int64_t>(0, options.warmup);
    for (std::int64_t j = -warmup; j < n; ++j) {
        const Realization at = omega.shifted(j);
        if (k > field.dimension(at.shifted(1)))
            raise(errc::invalid_argument, "fiber dimension drops below the requested frame size");
        const Eigen::MatrixXd pushed = scaled_step(psi, field, at) * frame;
        if (!pushed.allFinite()) raise(errc::numerical_failure, "non-finite cocycle matrix product");
        auto qr = linalg::thin_qr(pushed);
        frame = std::move(qr.q);
        if (j < 0) continue; // alignment only
        for (int i = 0; i < k; ++i) {
            const double stretch = qr.stretches[i];
            if (!(stretch > 0.0) || !std::isfinite(stretch))
                raise(errc::numerical_failure, "degenerate stretch factor during frame push");
            const double l = std::log(stretch);
            const double count = static_cast<double>(j + 1);
            const double delta = l - mean[i];
            mean[i] += delta / count;
            m2[i] += delta * (l - mean[i]);
        }
    }

    std::vector<double> lambda(k), se(k);
    for (int i = 0; i < k; ++i) {
        lambda[i] = mean[i];
        const double var = n > 1 ? std::max(0.0, m2[i] / static_cast<double>(n - 1)) : 0.0;
        se[i] = std::sqrt(var / static_cast<double>(n));
    }

    // QR keeps the directions ordered by growth; enforce descending order
    // before clustering in case of near-ties.
    std::vector<int> order(k);
    for (int i = 0; i < k; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return lambda[a] > lambda[b]; });

    LyapunovSpectrum spectrum;
    spectrum.gap_threshold = options.gap_threshold;
    spectrum.steps = n;
    double cluster_sum = lambda[order[0]];
    double cluster_se = se[order[0]];
    int count = 1;
    for (int idx = 1; idx <= k; ++idx) {
        const bool flush = idx == k || (lambda[order[idx - 1]] - lambda[order[idx]]) > options.gap_threshold;
        if (flush) {
            spectrum.exponents.push_back(cluster_sum / count);
            spectrum.multiplicities.push_back(count);
            spectrum.standard_errors.push_back(cluster_se);
            if (idx == k) break;
            cluster_sum = 0.0;
            cluster_se = 0.0;
            count = 0;
        }
        cluster_sum += lambda[order[idx]];
        cluster_se = std::max(cluster_se, se[order[idx]]);
        ++count;
    }
    return spectrum;
}

std::size_t OseledetsSplitting::slot(std::int64_t n) const {
    if (n < lo || n > hi)
        raise(errc::invalid_argument,
              "orbit index " + std::to_string(n) + " outside the computed window [" +
                  std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return static_cast<std::size_t>(n - lo);
}

const Eigen::MatrixXd& OseledetsSplitting::unstable_at(std::int64_t n) const {
    return unstable[slot(n)];
}
const Eigen::MatrixXd& OseledetsSplitting::center_at(std::int64_t n) const {
    return center[slot(n)];
}
const Eigen::MatrixXd& OseledetsSplitting::stable_at(std::int64_t n) const {
    return stable[slot(n)];
}
const Eigen::MatrixXd& OseledetsSplitting::annihilator_at(std::int64_t n) const {
    return annihilator[slot(n)];
}
int OseledetsSplitting::dimension_at(std::int64_t n) const {
    return static_cast<int>(center[slot(n)].rows());
}

namespace {

struct ScaledOrbit {
    const LinearCocycle* psi;
    const FiberField* field;
    Realization base;

    Eigen::MatrixXd step(std::int64_t n) const { return scaled_step(*psi, *field, base.shifted(n)); }
    Eigen::VectorXd scale(std::int64_t n) const { return scale_of(*field, base.shifted(n)); }
    int dim(std::int64_t n) const { return field->dimension(base.shifted(n)); }
};

// Push a random frame forward from index (anchor - spin) to anchor.
Eigen::MatrixXd forward_frame(const ScaledOrbit& orbit, std::int64_t anchor, std::int64_t spin,
                              int cols, std::uint64_t seed) {
    detail::SplitMix rng(seed);
    Eigen::MatrixXd frame = linalg::orthonormalize(rng.matrix(orbit.dim(anchor - spin), cols));
    for (std::int64_t j = anchor - spin; j < anchor; ++j)
        frame = linalg::thin_qr(orbit.step(j) * frame).q;
    return frame;
}

// Push a random frame backward via transposes from (anchor + spin) to anchor.
Eigen::MatrixXd adjoint_frame(const ScaledOrbit& orbit, std::int64_t anchor, std::int64_t spin,
                              int cols, std::uint64_t seed) {
    detail::SplitMix rng(seed);
    Eigen::MatrixXd frame = linalg::orthonormalize(rng.matrix(orbit.dim(anchor + spin), cols));
    for (std::int64_t j = anchor + spin - 1; j >= anchor; --j)
        frame = linalg::thin_qr(orbit.step(j).transpose() * frame).q;
    return frame;
}

using FrameBuilder = Eigen::MatrixXd (*)(const ScaledOrbit&, std::int64_t, std::int64_t, int,
                                         std::uint64_t);

// Double the spin-up until successive frames agree, both for the leading
// unstable block and for the whole frame.
Eigen::MatrixXd converged_frame(const ScaledOrbit& orbit, std::int64_t anchor, int cols,
                                int leading, const SplitOptions& options, FrameBuilder builder,
                                std::uint64_t seed) {
    Eigen::MatrixXd previous;
    std::int64_t spin = options.initial_spinup;
    while (spin <= options.max_spinup) {
        Eigen::MatrixXd current = builder(orbit, anchor, spin, cols, seed + static_cast<std::uint64_t>(spin));
        if (previous.size() != 0) {
            const double full = linalg::principal_angle(previous, current);
            const double lead =
                leading > 0 ? linalg::principal_angle(previous.leftCols(leading),
                                                      current.leftCols(leading))
                            : 0.0;
            if (full < options.cauchy_tol && lead < options.cauchy_tol) return current;
        }
        previous = std::move(current);
        spin *= 2;
    }
    raise(errc::splitting_not_converged,
          "subspace-angle Cauchy test did not reach " + std::to_string(options.cauchy_tol));
}

} // namespace

OseledetsSplitting oseledets_split(const LinearCocycle& psi, const FiberField& field,
                                   const Realization& omega, const LyapunovSpectrum& spectrum,
                                   std::int64_t n_orbit, const SplitOptions& options) {
    if (n_orbit < 0) raise(errc::invalid_argument, "orbit half-width must be nonnegative");
    if (!spectrum.center_cluster())
        raise(errc::no_center_exponent, "spectrum has no exponent within half a gap of zero");

    const int d_u = spectrum.unstable_dimension();
    const int d_c = spectrum.center_dimension();
    const int k = d_u + d_c;

    ScaledOrbit orbit{&psi, &field, omega};
    const std::int64_t lo = -n_orbit;
    const std::int64_t hi = n_orbit;
    const std::size_t count = static_cast<std::size_t>(hi - lo + 1);

    omega.prefetch(lo, hi);

    Eigen::MatrixXd fwd = converged_frame(orbit, lo, k, d_u, options, forward_frame,
                                          omega.spec().seed ^ 0xF0D4Dull);
    Eigen::MatrixXd adj = converged_frame(orbit, hi, k, d_u, options, adjoint_frame,
                                          omega.spec().seed ^ 0xAD707ull);

    std::vector<Eigen::MatrixXd> fast(count), slow(count);
    fast.front() = fwd;
    for (std::int64_t n = lo; n < hi; ++n)
        fast[static_cast<std::size_t>(n - lo + 1)] =
            linalg::thin_qr(orbit.step(n) * fast[static_cast<std::size_t>(n - lo)]).q;
    slow.back() = adj;
    for (std::int64_t n = hi - 1; n >= lo; --n)
        slow[static_cast<std::size_t>(n - lo)] =
            linalg::thin_qr(orbit.step(n).transpose() * slow[static_cast<std::size_t>(n - lo + 1)]).q;

    OseledetsSplitting split(omega);
    split.lo = lo;
    split.hi = hi;
    split.dim_unstable = d_u;
    split.dim_center = d_c;
    split.unstable.resize(count);
    split.center.resize(count);
    split.stable.resize(count);
    split.annihilator.resize(count);

    for (std::size_t i = 0; i < count; ++i) {
        const std::int64_t n = lo + static_cast<std::int64_t>(i);
        const int dim = orbit.dim(n);
        if (dim < k)
            raise(errc::numerical_failure,
                  "fiber dimension below unstable + center dimension at index " + std::to_string(n));
        const Eigen::VectorXd d = orbit.scale(n);
        const Eigen::VectorXd d_inv = d.cwiseInverse();

        const Eigen::MatrixXd u_scaled = fast[i].leftCols(d_u);
        Eigen::MatrixXd c_scaled;
        if (d_u == 0) {
            c_scaled = fast[i];
        } else {
            const Eigen::MatrixXd overlap = slow[i].leftCols(d_u).transpose() * fast[i];
            const Eigen::MatrixXd coeffs = linalg::kernel_basis(overlap, d_c);
            c_scaled = linalg::orthonormalize(fast[i] * coeffs);
        }
        const Eigen::MatrixXd s_scaled = linalg::orthonormal_complement(slow[i]);

        split.unstable[i] = linalg::sign_stabilized(d_inv.asDiagonal() * u_scaled);
        split.center[i] = linalg::sign_stabilized(d_inv.asDiagonal() * c_scaled);
        split.stable[i] = linalg::sign_stabilized(d_inv.asDiagonal() * s_scaled);
        split.annihilator[i] = linalg::sign_stabilized(d_inv.asDiagonal() * slow[i]);
    }
    return split;
}

namespace {

Eigen::MatrixXd component_basis(const OseledetsSplitting& s, Component which, std::int64_t n) {
    switch (which) {
        case Component::center: return s.center_at(n);
        case Component::unstable: return s.unstable_at(n);
        case Component::stable: return s.stable_at(n);
    }
    raise(errc::invalid_argument, "unknown component");
}

} // namespace

Eigen::MatrixXd projection_matrix(const OseledetsSplitting& splitting, Component which,
                                  std::int64_t n) {
    const Eigen::MatrixXd& u = splitting.unstable_at(n);
    const Eigen::MatrixXd& c = splitting.center_at(n);
    const Eigen::MatrixXd& s = splitting.stable_at(n);
    const int dim = static_cast<int>(c.rows());
    Eigen::MatrixXd all(dim, u.cols() + c.cols() + s.cols());
    all << u, c, s;
    if (all.cols() != dim)
        raise(errc::numerical_failure, "subspace dimensions do not fill the fiber");
    const Eigen::MatrixXd inverse = all.partialPivLu().inverse();
    Eigen::Index first = 0, cols = 0;
    switch (which) {
        case Component::unstable: first = 0; cols = u.cols(); break;
        case Component::center: first = u.cols(); cols = c.cols(); break;
        case Component::stable: first = u.cols() + c.cols(); cols = s.cols(); break;
    }
    if (cols == 0) return Eigen::MatrixXd::Zero(dim, dim);
    return all.middleCols(first, cols) * inverse.middleRows(first, cols);
}

Eigen::VectorXd project(const OseledetsSplitting& splitting, Component which, std::int64_t n,
                        const Eigen::VectorXd& v) {
    const Eigen::MatrixXd basis = component_basis(splitting, which, n);
    if (v.size() != basis.rows())
        raise(errc::invalid_argument, "vector does not lie in the fiber at the given index");
    return projection_matrix(splitting, which, n) * v;
}

const Eigen::MatrixXd& ProjectionSet::center_at(std::int64_t n) const {
    if (n < lo || n > hi) raise(errc::invalid_argument, "projection index outside window");
    return center[static_cast<std::size_t>(n - lo)];
}
const Eigen::MatrixXd& ProjectionSet::unstable_at(std::int64_t n) const {
    if (n < lo || n > hi) raise(errc::invalid_argument, "projection index outside window");
    return unstable[static_cast<std::size_t>(n - lo)];
}
const Eigen::MatrixXd& ProjectionSet::stable_at(std::int64_t n) const {
    if (n < lo || n > hi) raise(errc::invalid_argument, "projection index outside window");
    return stable[static_cast<std::size_t>(n - lo)];
}

ProjectionSet make_projections(const OseledetsSplitting& splitting) {
    ProjectionSet set;
    set.lo = splitting.lo;
    set.hi = splitting.hi;
    for (std::int64_t n = splitting.lo; n <= splitting.hi; ++n) {
        set.center.push_back(projection_matrix(splitting, Component::center, n));
        set.unstable.push_back(projection_matrix(splitting, Component::unstable, n));
        set.stable.push_back(projection_matrix(splitting, Component::stable, n));
    }
    return set;
}

ProjectionNorms projection_norms(const OseledetsSplitting& splitting, const FiberField& field,
                                 std::int64_t n) {
    const Eigen::VectorXd d = scale_of(field, splitting.base.shifted(n));
    const Eigen::MatrixXd scale = d.asDiagonal();
    const Eigen::MatrixXd unscale = d.cwiseInverse().asDiagonal();
    ProjectionNorms norms;
    auto scaled_norm = [&](Component which) {
        return linalg::operator_norm(scale * projection_matrix(splitting, which, n) * unscale);
    };
    norms.center = splitting.dim_center ? scaled_norm(Component::center) : 0.0;
    norms.unstable = splitting.dim_unstable ? scaled_norm(Component::unstable) : 0.0;
    const int d_s = splitting.dimension_at(n) - splitting.dim_center - splitting.dim_unstable;
    norms.stable = d_s > 0 ? scaled_norm(Component::stable) : 0.0;
    return norms;
}

std::size_t GrowthConstants::slot(std::int64_t n) const {
    if (n < lo || n > hi)
        raise(errc::invalid_argument, "growth constants not computed at index " + std::to_string(n));
    return static_cast<std::size_t>(n - lo);
}
double GrowthConstants::stable_at(std::int64_t n) const { return stable[slot(n)]; }
double GrowthConstants::unstable_at(std::int64_t n) const { return unstable[slot(n)]; }
double GrowthConstants::center_forward_at(std::int64_t n) const { return center_forward[slot(n)]; }
double GrowthConstants::center_backward_at(std::int64_t n) const { return center_backward[slot(n)]; }
double GrowthConstants::center_max_at(std::int64_t n) const {
    return std::max(center_forward_at(n), center_backward_at(n));
}

GrowthConstants growth_constants(const LinearCocycle& psi, const FiberField& field,
                                 const OseledetsSplitting& splitting,
                                 const LyapunovSpectrum& spectrum, double epsilon,
                                 std::int64_t horizon, double safety) {
    if (!(epsilon > 0.0)) raise(errc::invalid_argument, "epsilon must be positive");
    if (horizon < 1) raise(errc::invalid_argument, "growth horizon must be at least 1");
    if (splitting.hi - splitting.lo < 2 * horizon)
        raise(errc::invalid_argument, "splitting window too small for the growth horizon");

    ScaledOrbit orbit{&psi, &field, splitting.base};
    const double mu_minus = spectrum.mu_minus().value_or(-std::numeric_limits<double>::infinity());
    const double mu_plus = spectrum.mu_plus().value_or(std::numeric_limits<double>::infinity());

    GrowthConstants constants;
    constants.epsilon = epsilon;
    constants.horizon = horizon;
    constants.safety = safety;
    constants.lo = splitting.lo + horizon;
    constants.hi = splitting.hi - horizon;

    auto scaled_basis = [&](const Eigen::MatrixXd& basis, std::int64_t n) {
        return Eigen::MatrixXd(orbit.scale(n).asDiagonal() * basis);
    };

    for (std::int64_t b = constants.lo; b <= constants.hi; ++b) {
        double f_s = 1.0, f_u = 1.0, f_c1 = 1.0, f_c2 = 1.0;

        // forward: running products applied to the stable / center bases
        Eigen::MatrixXd t_s = scaled_basis(splitting.stable_at(b), b);
        Eigen::MatrixXd t_c = scaled_basis(splitting.center_at(b), b);
        for (std::int64_t n = 1; n <= horizon; ++n) {
            const Eigen::MatrixXd a = orbit.step(b + n - 1);
            if (t_s.cols()) {
                t_s = a * t_s;
                f_s = std::max(f_s, linalg::operator_norm(t_s) *
                                        std::exp(-static_cast<double>(n) * (mu_minus + epsilon)));
            }
            if (t_c.cols()) {
                t_c = a * t_c;
                f_c1 = std::max(f_c1, linalg::operator_norm(t_c) *
                                          std::exp(-static_cast<double>(n) * epsilon));
            }
        }

        // backward: restricted inverses via the product from b-m up to b
        Eigen::MatrixXd product = Eigen::MatrixXd::Identity(orbit.dim(b), orbit.dim(b));
        for (std::int64_t m = 1; m <= horizon; ++m) {
            product = product * orbit.step(b - m);
            if (splitting.dim_center) {
                const double smin =
                    linalg::smallest_singular_value(product * scaled_basis(splitting.center_at(b - m), b - m));
                if (!(smin > 0.0))
                    raise(errc::numerical_failure, "restricted inverse singular on the center");
                f_c2 = std::max(f_c2, (1.0 / smin) * std::exp(-static_cast<double>(m) * epsilon));
            }
            if (splitting.dim_unstable) {
                const double smin = linalg::smallest_singular_value(
                    product * scaled_basis(splitting.unstable_at(b - m), b - m));
                if (!(smin > 0.0))
                    raise(errc::numerical_failure, "restricted inverse singular on the unstable sum");
                f_u = std::max(f_u, (1.0 / smin) *
                                        std::exp(static_cast<double>(m) * (mu_plus - epsilon)));
            }
        }

        constants.stable.push_back(safety * f_s);
        constants.unstable.push_back(safety * f_u);
        constants.center_forward.push_back(safety * f_c1);
        constants.center_backward.push_back(safety * f_c2);
    }
    return constants;
}

Eigen::VectorXd restricted_inverse(const LinearCocycle& psi, const FiberField& field,
                                   const OseledetsSplitting& splitting, std::int64_t n_from,
                                   std::int64_t steps, const Eigen::VectorXd& v,
                                   double s_component_tol) {
    if (steps < 0) raise(errc::invalid_argument, "steps must be nonnegative");
    if (!splitting.covers(n_from - steps, n_from))
        raise(errc::invalid_argument, "restricted inverse leaves the splitting window");

    const double v_norm = field.norm(splitting.base.shifted(n_from), v);
    if (v_norm > 0.0) {
        const Eigen::VectorXd s_part = project(splitting, Component::stable, n_from, v);
        const double s_norm = field.norm(splitting.base.shifted(n_from), s_part);
        if (s_norm > s_component_tol * v_norm)
            raise(errc::not_invertible_direction,
                  "vector has a stable component beyond tolerance: " + std::to_string(s_norm));
    }

    ScaledOrbit orbit{&psi, &field, splitting.base};
    Eigen::VectorXd current = orbit.scale(n_from).asDiagonal() * v;
    for (std::int64_t k = 0; k < steps; ++k) {
        const std::int64_t target = n_from - k - 1;
        const Eigen::MatrixXd& u = splitting.unstable_at(target);
        const Eigen::MatrixXd& c = splitting.center_at(target);
        Eigen::MatrixXd basis(u.rows(), u.cols() + c.cols());
        basis << u, c;
        const Eigen::MatrixXd pushed = orbit.step(target) * (orbit.scale(target).asDiagonal() * basis);
        if (linalg::smallest_singular_value(pushed) < 1e-13 * std::max(1.0, linalg::operator_norm(pushed)))
            raise(errc::numerical_failure, "pushed basis is numerically singular");
        const Eigen::VectorXd coeffs = linalg::lsq(pushed, current);
        const double residual = (pushed * coeffs - current).norm();
        if (residual > 1e-6 * std::max(1.0, current.norm()))
            raise(errc::not_invertible_direction, "vector is not in the range of the restricted cocycle");
        current = orbit.scale(target).asDiagonal() * (basis * coeffs);
    }
    return orbit.scale(n_from - steps).cwiseInverse().asDiagonal() * current;
}

EquivarianceReport check_equivariance(const LinearCocycle& psi, const FiberField& field,
                                      const OseledetsSplitting& splitting, std::int64_t lo,
                                      std::int64_t hi) {
    if (!splitting.covers(lo, hi)) raise(errc::invalid_argument, "window not covered by splitting");
    ScaledOrbit orbit{&psi, &field, splitting.base};
    EquivarianceReport report;
    auto scaled = [&](const Eigen::MatrixXd& basis, std::int64_t n) {
        return linalg::orthonormalize(orbit.scale(n).asDiagonal() * basis);
    };
    for (std::int64_t n = lo; n < hi; ++n) {
        const Eigen::MatrixXd a = orbit.step(n);
        if (splitting.dim_unstable) {
            const double angle = linalg::principal_angle(
                linalg::orthonormalize(a * scaled(splitting.unstable_at(n), n)),
                scaled(splitting.unstable_at(n + 1), n + 1));
            report.unstable = std::max(report.unstable, angle);
        }
        if (splitting.dim_center) {
            const double angle = linalg::principal_angle(
                linalg::orthonormalize(a * scaled(splitting.center_at(n), n)),
                scaled(splitting.center_at(n + 1), n + 1));
            report.center = std::max(report.center, angle);
        }
        const double angle = linalg::principal_angle(
            linalg::orthonormalize(a.transpose() * scaled(splitting.annihilator_at(n + 1), n + 1)),
            scaled(splitting.annihilator_at(n), n));
        report.stable_complement = std::max(report.stable_complement, angle);
    }
    return report;
}

} // namespace centerfield
