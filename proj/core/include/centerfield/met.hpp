#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "centerfield/cocycle.hpp"
#include "centerfield/driver.hpp"
#include "centerfield/fiber.hpp"

namespace centerfield {

/// Numerical multiplicative ergodic layer: Lyapunov exponents, the
/// stable/center/unstable splitting along an orbit window, oblique
/// projections, restricted inverses, and subexponential growth constants.

struct LyapunovSpectrum {
    std::vector<double> exponents;       ///< clustered, strictly decreasing
    std::vector<int> multiplicities;
    std::vector<double> standard_errors; ///< per cluster, 0 for exact cases
    double gap_threshold = 0.05;
    std::int64_t steps = 0;

    /// Cluster whose exponent lies within gap_threshold/2 of zero.
    std::optional<int> center_cluster() const;
    /// Smallest positive exponent.
    std::optional<double> mu_plus() const;
    /// Largest negative exponent.
    std::optional<double> mu_minus() const;
    int unstable_dimension() const;
    int center_dimension() const;
    int direction_count() const;
};

struct SpectrumOptions {
    double gap_threshold = 0.05;
    /// Frame-alignment steps before log stretches are accumulated.
    std::int64_t warmup = 256;
};

/// Top-k exponents by pushing an orthonormal frame forward with QR
/// re-orthonormalization every step and averaging the log stretch factors
/// over the steps after the warmup.
LyapunovSpectrum lyapunov_spectrum(const LinearCocycle& psi, const FiberField& field,
                                   const Realization& omega, int k, std::int64_t n,
                                   const SpectrumOptions& options = {});

/// Orbit-indexed bases of the unstable, center, and stable subspaces on
/// [lo, hi]. Basis columns are orthonormal in the fiber inner product and
/// sign-stabilized; `annihilator` holds the adjoint-covariant frames whose
/// orthogonal complement is the stable space (its leading unstable-many
/// columns annihilate center + stable).
struct OseledetsSplitting {
    Realization base;
    std::int64_t lo = 0;
    std::int64_t hi = 0;
    int dim_unstable = 0;
    int dim_center = 0;
    std::vector<Eigen::MatrixXd> unstable;
    std::vector<Eigen::MatrixXd> center;
    std::vector<Eigen::MatrixXd> stable;
    std::vector<Eigen::MatrixXd> annihilator;

    explicit OseledetsSplitting(Realization b) : base(std::move(b)) {}

    bool covers(std::int64_t a, std::int64_t b) const { return lo <= a && b <= hi; }
    std::size_t slot(std::int64_t n) const;
    const Eigen::MatrixXd& unstable_at(std::int64_t n) const;
    const Eigen::MatrixXd& center_at(std::int64_t n) const;
    const Eigen::MatrixXd& stable_at(std::int64_t n) const;
    const Eigen::MatrixXd& annihilator_at(std::int64_t n) const;
    int dimension_at(std::int64_t n) const;
};

struct SplitOptions {
    std::int64_t initial_spinup = 16;
    std::int64_t max_spinup = 8192;
    double cauchy_tol = 1e-9;
    std::uint64_t frame_seed = 1;
};

/// Fast-growing sums from a forward frame push started in the far past,
/// slow filtration complements from the adjoint cocycle pushed from the far
/// future; spin-up doubles until the subspace-angle Cauchy increment drops
/// below tolerance.
OseledetsSplitting oseledets_split(const LinearCocycle& psi, const FiberField& field,
                                   const Realization& omega, const LyapunovSpectrum& spectrum,
                                   std::int64_t n_orbit, const SplitOptions& options = {});

enum class Component { center, unstable, stable };

/// Oblique projection matrix onto the component along the two others.
Eigen::MatrixXd projection_matrix(const OseledetsSplitting& splitting, Component which,
                                  std::int64_t n);

/// Oblique projection of v at orbit index n.
Eigen::VectorXd project(const OseledetsSplitting& splitting, Component which, std::int64_t n,
                        const Eigen::VectorXd& v);

/// The three projections per orbit index.
struct ProjectionSet {
    std::int64_t lo = 0;
    std::int64_t hi = 0;
    std::vector<Eigen::MatrixXd> center;
    std::vector<Eigen::MatrixXd> unstable;
    std::vector<Eigen::MatrixXd> stable;

    const Eigen::MatrixXd& center_at(std::int64_t n) const;
    const Eigen::MatrixXd& unstable_at(std::int64_t n) const;
    const Eigen::MatrixXd& stable_at(std::int64_t n) const;
};

ProjectionSet make_projections(const OseledetsSplitting& splitting);

struct ProjectionNorms {
    double center = 0.0;
    double unstable = 0.0;
    double stable = 0.0;
};

/// Operator norms of the three projections in the fiber geometry.
ProjectionNorms projection_norms(const OseledetsSplitting& splitting, const FiberField& field,
                                 std::int64_t n);

/// Finite-horizon suprema of the restricted cocycle growth, discounted at
/// the spectral rates shifted by epsilon, then multiplied by the safety
/// factor. Entries are per orbit index on [splitting.lo + horizon,
/// splitting.hi - horizon].
struct GrowthConstants {
    double epsilon = 0.0;
    std::int64_t horizon = 0;
    double safety = 1.0;
    std::int64_t lo = 0;
    std::int64_t hi = 0;
    std::vector<double> stable;          ///< sup_n |psi^n|_S| e^{-n(mu- + eps)}
    std::vector<double> unstable;        ///< sup_{n<=0} |psi^n|_U| e^{n(-mu+ + eps)}
    std::vector<double> center_forward;  ///< sup_n |psi^n|_C| e^{-n eps}
    std::vector<double> center_backward; ///< sup_{n<=0} |psi^n|_C| e^{n eps}

    std::size_t slot(std::int64_t n) const;
    double stable_at(std::int64_t n) const;
    double unstable_at(std::int64_t n) const;
    double center_forward_at(std::int64_t n) const;
    double center_backward_at(std::int64_t n) const;
    double center_max_at(std::int64_t n) const;
};

GrowthConstants growth_constants(const LinearCocycle& psi, const FiberField& field,
                                 const OseledetsSplitting& splitting,
                                 const LyapunovSpectrum& spectrum, double epsilon,
                                 std::int64_t horizon, double safety = 1.25);

/// Backward application of the cocycle restricted to the unstable + center
/// sum: expresses v in the pushed-forward basis at n_from and pulls the
/// coefficients back `steps` steps.
Eigen::VectorXd restricted_inverse(const LinearCocycle& psi, const FiberField& field,
                                   const OseledetsSplitting& splitting, std::int64_t n_from,
                                   std::int64_t steps, const Eigen::VectorXd& v,
                                   double s_component_tol = 1e-8);

/// Largest equivariance defect angles over [lo, hi-1]: forward images of
/// the unstable/center bases against the next fiber's bases, and adjoint
/// images of the stable-complement frames backward.
struct EquivarianceReport {
    double unstable = 0.0;
    double center = 0.0;
    double stable_complement = 0.0;
};

EquivarianceReport check_equivariance(const LinearCocycle& psi, const FiberField& field,
                                      const OseledetsSplitting& splitting, std::int64_t lo,
                                      std::int64_t hi);

} // namespace centerfield
