#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "centerfield/cocycle.hpp"
#include "centerfield/driver.hpp"
#include "centerfield/fiber.hpp"
#include "centerfield/met.hpp"

namespace centerfield {

/// Weighted sequence spaces over an orbit, the Lyapunov-Perron operator,
/// its contraction certificate, and the Picard fixed-point solver.

/// Truncated element of the nu-weighted sequence space: one fiber vector
/// per orbit index n in [lo, hi], relative to `base`. Entries outside the
/// support are treated as zero by every consumer.
struct SequenceWindow {
    Realization base;
    std::int64_t lo = 0;
    std::int64_t hi = 0;
    double nu = 0.0;
    std::vector<Eigen::VectorXd> entries;

    SequenceWindow(Realization b, std::int64_t l, std::int64_t h, double weight);

    bool covers(std::int64_t n) const { return lo <= n && n <= hi; }
    Eigen::VectorXd& at(std::int64_t n);
    const Eigen::VectorXd& at(std::int64_t n) const;

    static SequenceWindow zero(const FiberField& field, const Realization& base, std::int64_t lo,
                               std::int64_t hi, double nu);
};

/// sup_n |entry(n)| e^{-nu |n|} over the support.
double weighted_norm(const SequenceWindow& gamma, const FiberField& field);

/// Entry-wise difference; supports and bases must agree.
SequenceWindow window_difference(const SequenceWindow& a, const SequenceWindow& b);

/// Rebase to the shifted orbit point: entry(n) of the result is entry(n+1)
/// of the input, on the support [lo-1, hi-1]. Relative to the new base the
/// window ends one slot earlier on the right; no entry is dropped.
SequenceWindow shift_window(const SequenceWindow& gamma);

enum class RadiusMode {
    system,    ///< cutoff radius supplied by the system's cutoff data
    certified, ///< cutoff radius from the contraction certificate formulas
};

/// Resolved operator parameters. nu is the sequence weight, epsilon the
/// growth-constant shift, m_eps / m_tilde the certificate multipliers.
struct LPConfig {
    double nu = 0.2;
    double epsilon = 0.05;
    double m_eps = 0.0;
    double m_tilde = 0.0;
    std::int64_t window = 40;       ///< half-width N of solver windows
    double tolerance = 1e-12;
    std::int64_t max_iterations = 200;
    std::int64_t horizon = 25;      ///< N_F for growth constants
    double safety = 1.25;
    RadiusMode radius_mode = RadiusMode::system;
    double center_tol = 1e-7;       ///< relative tolerance for "v lies in C"
};

/// Raw settings before resolving the auto policies against a spectrum.
struct LPSettings {
    bool nu_auto = true;
    double nu = 0.2;
    bool epsilon_auto = true;
    double epsilon = 0.0;
    bool m_auto = true;
    double m_eps = 0.0;
    double m_tilde = 0.0;
    std::int64_t window = 40;
    double tolerance = 1e-12;
    std::int64_t max_iterations = 200;
    std::int64_t horizon = 25;
    double safety = 1.25;
    RadiusMode radius_mode = RadiusMode::system;
};

/// Closed-form contraction data: l_eps bounds the Lipschitz constant of the
/// operator in the sequence variable (up to the factor five), l_tilde the
/// companion constant without the center term.
struct ContractionCertificate {
    double nu = 0.0;
    double epsilon = 0.0;
    double m_eps = 0.0;
    double m_tilde = 0.0;
    double l_eps = 0.0;
    double l_tilde = 0.0;
    double five_l_eps = 0.0;
    double five_l_tilde = 0.0;
    bool contraction_ok = false; ///< 5 l_eps < 1
    bool injectivity_ok = false; ///< 5 l_tilde <= 1
};

/// Geometric-series factor multiplying m_eps in l_eps (and m_tilde in
/// l_tilde when `with_center_term` is false). Raises parameters-infeasible
/// when the sign conditions on (nu, epsilon) fail.
double contraction_factor(double nu, double epsilon, const LyapunovSpectrum& spectrum,
                          bool with_center_term);

ContractionCertificate contraction_bound(const LPConfig& config, const LyapunovSpectrum& spectrum);

/// epsilon = min{nu, mu+ - nu, -mu- - nu} / 4 over the gaps that exist.
double default_epsilon(const LyapunovSpectrum& spectrum, double nu);

/// Largest multipliers with 5 l_eps <= 1/2 and 5 l_tilde <= 1.
double max_m_for_contraction(double nu, double epsilon, const LyapunovSpectrum& spectrum);
double max_m_for_injectivity(double nu, double epsilon, const LyapunovSpectrum& spectrum);

/// Resolve the auto policies against a computed spectrum.
LPConfig resolve_lp_config(const LPSettings& settings, const LyapunovSpectrum& spectrum);

/// Everything the operator needs along one orbit window, precomputed per
/// index: one-step matrices, oblique projections, restricted one-step
/// inverses on the center and unstable directions, stationary points,
/// cutoff radii (system and certified), moduli, and growth constants at
/// both the epsilon and the nu shift.
struct OrbitModel {
    SystemBundle system;
    Realization base;
    LyapunovSpectrum spectrum;
    OseledetsSplitting splitting;
    GrowthConstants growth_eps;
    GrowthConstants growth_nu;
    ContractionCertificate certificate;
    LPConfig config;

    std::int64_t lo = 0;
    std::int64_t hi = 0;
    std::vector<Eigen::MatrixXd> step;    ///< [lo, hi-1]
    std::vector<Eigen::MatrixXd> proj_c;  ///< [lo, hi]
    std::vector<Eigen::MatrixXd> proj_u;
    std::vector<Eigen::MatrixXd> proj_s;
    std::vector<Eigen::MatrixXd> inv_c;   ///< [lo, hi-1], maps E_{n+1} -> E_n
    std::vector<Eigen::MatrixXd> inv_u;
    std::vector<Eigen::VectorXd> y;       ///< stationary points [lo, hi]
    std::vector<Eigen::VectorXd> phi_y;   ///< step images of y, [lo, hi-1]
    std::vector<double> f;                ///< modulus f per index
    std::vector<double> rho_system;      ///< cutoff data radius per index
    std::vector<double> rho_certified;   ///< certificate radius per index
    std::vector<double> rho;             ///< the radius in effect (per radius_mode)
    std::vector<double> pi_c_norm, pi_u_norm, pi_s_norm;

    std::size_t slot(std::int64_t n) const;
    const Eigen::MatrixXd& step_at(std::int64_t n) const;
    const Eigen::MatrixXd& proj_c_at(std::int64_t n) const;
    const Eigen::MatrixXd& proj_u_at(std::int64_t n) const;
    const Eigen::MatrixXd& proj_s_at(std::int64_t n) const;
    const Eigen::MatrixXd& inv_c_at(std::int64_t n) const;
    const Eigen::MatrixXd& inv_u_at(std::int64_t n) const;
    const Eigen::VectorXd& y_at(std::int64_t n) const;
    double rho_at(std::int64_t n) const;
    double f_at(std::int64_t n) const;
    double fiber_norm_at(std::int64_t n, const Eigen::VectorXd& v) const;
    int dimension_at(std::int64_t n) const;
    bool covers(std::int64_t a, std::int64_t b) const { return lo <= a && b <= hi; }

    /// Cutoff remainder with the model's effective radius: the remainder at
    /// base index n (fiber vector xi over theta^n omega), scaled by the
    /// bump of |xi| / rho(n+1). Returns a vector in the fiber over n+1.
    Eigen::VectorXd cutoff_p(std::int64_t n, const Eigen::VectorXd& xi) const;
};

/// Certificate radius at one index from the growth constants, projection
/// norms, and moduli: the four-slot minimum, its two-slot refinement, and
/// a quarter of the modulus inverse of the smaller of the two.
struct RadiusBreakdown {
    double t = 0.0;
    double t_tilde = 0.0;
    double rho = 0.0;
};

RadiusBreakdown certified_radius(const OrbitModel& model, std::int64_t n);

OrbitModel build_orbit_model(const SystemBundle& system, const Realization& omega,
                             const LyapunovSpectrum& spectrum, const OseledetsSplitting& splitting,
                             const LPConfig& config);

struct FixedPointResult {
    SequenceWindow window;
    std::int64_t iterations = 0;
    double residual = 0.0;
    double contraction_ratio = 0.0;
    double norm = 0.0;
    double apriori_bound = 0.0;
    bool apriori_ok = true;
};

/// The Lyapunov-Perron operator family based at one orbit index of a model.
class LyapunovPerron {
public:
    explicit LyapunovPerron(const OrbitModel& model, std::int64_t base_index = 0);

    /// One application of the operator: homogeneous center orbit of v plus
    /// the center partial sums, minus the unstable tail (via restricted
    /// inverses), plus the stable sum, each fed by the cutoff remainders of
    /// the current entries. Sums truncate at the window edges.
    SequenceWindow apply(const Eigen::VectorXd& center_v, const SequenceWindow& gamma) const;

    /// Picard iteration from the zero window until the weighted residual
    /// drops below tolerance. Raises fixed-point-not-converged at the
    /// iteration cap.
    FixedPointResult solve(const Eigen::VectorXd& center_v) const;

    /// Center vector reproducing a fixed point: entry(0) plus the unstable
    /// tail minus the stable sum.
    Eigen::VectorXd recover_center(const SequenceWindow& gamma) const;

    SequenceWindow zero_window() const;
    std::int64_t base_index() const { return base_; }
    const OrbitModel& model() const { return *model_; }

private:
    void require_window(const SequenceWindow& gamma) const;

    const OrbitModel* model_;
    std::int64_t base_;
};

} // namespace centerfield
