#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "centerfield/lp.hpp"

namespace centerfield {

/// The locally modified cocycle, the sampled center chart, and the
/// verification suite for Lipschitz bounds, injectivity, tangency, and
/// invariance of the sampled manifold.

/// Symmetric tensor grid in center coordinates: `points` samples per axis
/// on [-radius, radius]. Odd counts include the origin.
struct GridSpec {
    double radius = 0.01;
    int points = 21;
};

struct ChartPoint {
    Eigen::VectorXd coeffs;  ///< coordinates in the center basis
    Eigen::VectorXd center;  ///< the same vector embedded in the fiber
    Eigen::VectorXd value;   ///< chart value: deviation of the manifold point
    std::int64_t iterations = 0;
    double residual = 0.0;
    double contraction_ratio = 0.0;
    std::optional<SequenceWindow> window; ///< the solved fixed point
};

struct ChartFailure {
    std::size_t point_index = 0;
    std::string message;
};

struct CenterChart {
    std::int64_t base_index = 0;
    GridSpec grid;
    double nu = 0.0;
    std::vector<ChartPoint> points;
    std::vector<ChartFailure> failures;

    const ChartPoint* origin() const; ///< the grid point at 0, if present
};

/// One step of the cocycle with the nonlinearity faded out by the bump of
/// |x - Y| / rho(n+1): coincides with the original map inside the rho-ball
/// and with the linearization outside twice the radius.
Eigen::VectorXd modified_step(const OrbitModel& model, std::int64_t n, const Eigen::VectorXd& state);

/// n-fold composition of modified steps starting at orbit index `from`.
Eigen::VectorXd modified_iterate(const OrbitModel& model, std::int64_t from,
                                 const Eigen::VectorXd& state, std::int64_t n);

/// Chart value at one center vector (fiber coordinates, must lie in the
/// center subspace at base_index).
Eigen::VectorXd chart_value(const OrbitModel& model, std::int64_t base_index,
                            const Eigen::VectorXd& v);

/// Solve the chart on a grid; grid points are solved independently in a
/// parallel map and failures are collected per point.
CenterChart sample_manifold(const OrbitModel& model, std::int64_t base_index, const GridSpec& grid,
                            int threads = 0);

/// Distance from a deviation vector to the sampled manifold: minimum over
/// the chart grid refined by a local quadratic model along the center
/// coordinate (one-dimensional centers; higher dimensions use the grid
/// minimum).
double distance_to_chart(const OrbitModel& model, const CenterChart& chart,
                         const Eigen::VectorXd& deviation);

struct InvarianceReport {
    std::int64_t steps = 0;
    /// original cocycle, one step, points inside the rho-ball
    double one_step_distance = 0.0;
    std::size_t one_step_points = 0;
    std::vector<std::size_t> out_of_domain; ///< grid indices excluded at step one
    /// modified cocycle, one step, every chart point
    double modified_one_step_distance = 0.0;
    /// original cocycle, `steps` steps, points whose whole orbit stays in
    /// the per-index rho-balls
    double multi_step_distance = 0.0;
    std::size_t multi_step_points = 0;
    /// residual of the shifted fixed point under the operator at the
    /// shifted base
    double transport_residual = 0.0;
    /// modified-orbit expansion: linear part plus propagated cutoff
    /// remainders against the iterated modified map
    double orbit_identity_residual = 0.0;
    /// recovered center vector against the grid center vector
    double recover_residual = 0.0;
    /// center projection of the chart value against the grid center vector
    double center_component_residual = 0.0;
};

InvarianceReport verify_invariance(const OrbitModel& model, const CenterChart& chart,
                                   std::int64_t steps);

struct TangencySample {
    double scale = 0.0;
    double ratio = 0.0; ///< sup_{|v| = scale} |h(v) - v| / scale
};

struct RegularityReport {
    double lipschitz = 0.0;          ///< max over grid pairs
    double lipschitz_bound = 0.0;    ///< 2 max center growth constants at nu
    double inverse_lipschitz = 0.0;  ///< max |dv| / |dh| over grid pairs
    double inverse_lipschitz_bound = 2.0;
    std::vector<TangencySample> tangency;
    double tangency_order = 0.0;     ///< fitted slope of log ratio vs log scale
    bool origin_fixed = false;       ///< h(0) == 0
};

RegularityReport verify_chart_regularity(const OrbitModel& model, const CenterChart& chart);

/// Least-squares polynomial fit of the non-center frame coefficients of the
/// chart against the center coordinate (one-dimensional centers). Row r of
/// `coefficients` holds the fit for the r-th non-center coordinate, unstable
/// rows first; column k is the coefficient of s^k.
struct PolynomialFit {
    Eigen::MatrixXd coefficients;
    int unstable_rows = 0;
    double max_residual = 0.0;
};

PolynomialFit taylor_fit(const OrbitModel& model, const CenterChart& chart, int degree);

} // namespace centerfield
