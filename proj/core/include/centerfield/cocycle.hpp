#pragma once

#include <cstdint>
#include <functional>
#include <limits>

#include <Eigen/Core>

#include "centerfield/driver.hpp"
#include "centerfield/fiber.hpp"

namespace centerfield {

/// Nonlinear one-step maps over the driving system, their stationary
/// trajectories, linearizations, and the cutoff nonlinear remainder.

struct Cocycle {
    /// One-step map phi: E_omega -> E_{theta omega}.
    std::function<Eigen::VectorXd(const Realization&, const Eigen::VectorXd&)> step;
    /// Optional analytic differential at a point; empty means finite
    /// differences.
    std::function<Eigen::MatrixXd(const Realization&, const Eigen::VectorXd&)> differential;
    /// Differentiability order of the step maps.
    int order = 2;
};

/// Random fixed trajectory: phi(Y_omega) = Y_{theta omega}.
struct StationaryPoint {
    std::function<Eigen::VectorXd(const Realization&)> at;
    double residual_tol = 1e-10;
};

/// One-step matrices of the linearization along the stationary orbit.
struct LinearCocycle {
    std::function<Eigen::MatrixXd(const Realization&)> matrix;
};

/// h(x) = x^r: the modulus controlling the remainder's local Lipschitz
/// growth. Strictly increasing with h(0) = 0, so the inverse is explicit.
struct Modulus {
    double exponent = 1.0;

    double operator()(double x) const;
    double inverse(double y) const;
};

/// Bump data and remainder moduli: radius rho, validity radius R, and the
/// pair (f, h) bounding |P(u) - P(v)| <= |u - v| f(theta omega) h(|u|+|v|).
struct CutoffSpec {
    std::function<double(const Realization&)> rho;
    std::function<double(const Realization&)> validity; ///< R; empty = +inf
    std::function<double(const Realization&)> modulus_f;
    Modulus modulus_h;

    double rho_at(const Realization& omega) const;
    double validity_at(const Realization& omega) const;
    double f_at(const Realization& omega) const;

    static CutoffSpec constants(double rho, double f = 1.0, double h_exponent = 1.0,
                                double validity = std::numeric_limits<double>::infinity());
};

/// Everything attached to one analyzed system: the map, its stationary
/// point, the linearization, the fiber field, and the cutoff data.
struct SystemBundle {
    Cocycle cocycle;
    StationaryPoint stationary;
    LinearCocycle linear;
    FiberField field;
    CutoffSpec cutoff;
};

/// Smooth cutoff: 1 on [-1,1], 0 outside [-2,2], |derivative| <= 2.
/// Polynomial smoothstep on the shoulders; the derivative peaks at 15/8.
double bump(double x);

/// n-step iteration phi^n_omega(x). n >= 0; n = 0 is the identity.
Eigen::VectorXd iterate(const Cocycle& c, const FiberField& field, const Realization& omega,
                        const Eigen::VectorXd& x, std::int64_t n);

/// One-step differential at the stationary point. Uses the analytic
/// differential when supplied, otherwise central finite differences with a
/// step tuned to the fiber scale.
Eigen::MatrixXd linearize_at(const Cocycle& c, const StationaryPoint& y, const FiberField& field,
                             const Realization& omega);

/// Wrap linearize_at as a linear cocycle evaluator.
LinearCocycle linearize(const Cocycle& c, const StationaryPoint& y, const FiberField& field);

/// Shrinking-perturbation consistency check for the differential at Y;
/// raises linearization-failure when the first-order error does not decay.
void check_linearization(const Cocycle& c, const StationaryPoint& y, const FiberField& field,
                         const Realization& omega, const Eigen::MatrixXd& differential);

/// Nonlinear remainder P(xi) = phi(Y + xi) - phi(Y) - psi xi.
/// Requires |xi| < validity_radius.
Eigen::VectorXd remainder(const Cocycle& c, const StationaryPoint& y, const LinearCocycle& psi,
                          const FiberField& field, const Realization& omega,
                          const Eigen::VectorXd& xi,
                          double validity_radius = std::numeric_limits<double>::infinity());

/// Cutoff remainder bump(|xi| / rho(theta omega)) * P(xi), extended by zero
/// outside the support of the bump.
Eigen::VectorXd cutoff_remainder(const SystemBundle& sys, const Realization& omega,
                                 const Eigen::VectorXd& xi);

struct AssumptionOptions {
    std::int64_t orbit_samples = 32;   ///< orbit indices 0..n-1
    int pairs_per_index = 8;           ///< sampled remainder pairs per index
    double sample_radius = 1.0;        ///< radius of the sampled ball
    double slope_tolerance = 1e-2;
    std::uint64_t sample_seed = 7;
};

/// Sampled diagnostics for the standing assumptions: integrability of
/// log+ |psi|, the remainder Lipschitz bound, and subexponential growth of
/// f and rho along the orbit.
struct AssumptionReport {
    double mean_log_plus_psi = 0.0;
    double max_violation_ratio = 0.0; ///< |P(u)-P(v)| / (|u-v| f h(|u|+|v|))
    double f_slope = 0.0;             ///< least-squares slope of log+ f(theta^n)
    double rho_slope = 0.0;           ///< least-squares slope of log rho(theta^n)
    bool f_slope_ok = true;
    bool rho_slope_ok = true;
    std::int64_t samples = 0;
};

AssumptionReport verify_assumption(const SystemBundle& sys, const Realization& omega,
                                   const AssumptionOptions& options = {});

/// Sampled estimate of the smallest constant f making the remainder bound
/// hold with the given modulus h on a ball.
double estimate_modulus_f(const SystemBundle& sys, const Realization& omega, double radius,
                          std::int64_t orbit_samples = 16, int pairs_per_index = 16,
                          std::uint64_t sample_seed = 7);

} // namespace centerfield
