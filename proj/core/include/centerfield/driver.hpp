#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Core>

namespace centerfield {

/// Ergodic driving systems realized as seeded bi-infinite symbol sequences.
/// Symbols are generated by a counter-based generator keyed on (seed, index),
/// so shifting by any j is O(1) and negative time needs no pre-simulation.

enum class DriverKind {
    iid_sequence,        ///< independent symbols per integer index
    finite_rotation,     ///< circle rotation by a fixed angle, symbol = phase
    deterministic_point, ///< single-point base, constant symbol
};

enum class NoiseLaw {
    uniform, ///< components uniform on [low, high]
    coin,    ///< components +/- scale with equal probability
};

struct DriverSpec {
    DriverKind kind = DriverKind::iid_sequence;
    int dimension = 1;
    NoiseLaw law = NoiseLaw::uniform;
    double low = -1.0;
    double high = 1.0;
    double scale = 1.0;
    /// rotation parameters; the starting phase is drawn from the seed and
    /// offset by `phase`
    double alpha = 0.61803398874989485;
    double phase = 0.0;
    /// constant symbol for deterministic_point
    std::vector<double> point;
    std::uint64_t seed = 42;
};

/// One base point of the driving system together with its whole orbit:
/// symbol(j) of a realization equals symbol(0) of the realization shifted
/// by j. Shifted copies share one lazily grown symbol cache (two one-sided
/// arrays), so realizations are cheap to copy and safe to share across
/// threads once a window has been materialized.
class Realization {
public:
    explicit Realization(const DriverSpec& spec);

    /// Symbol of the shifted base point theta^j omega.
    Eigen::VectorXd symbol(std::int64_t j) const;

    /// Realization representing theta^j omega.
    Realization shifted(std::int64_t j) const;

    /// Eagerly materialize symbols for absolute orbit indices [lo, hi].
    void prefetch(std::int64_t lo, std::int64_t hi) const;

    std::int64_t offset() const noexcept { return offset_; }
    int symbol_dimension() const noexcept;
    const DriverSpec& spec() const noexcept;

private:
    struct Source;
    Realization(std::shared_ptr<const Source> source, std::int64_t offset);

    std::shared_ptr<const Source> source_;
    std::int64_t offset_ = 0;
};

inline Realization shift(const Realization& omega, std::int64_t j) {
    return omega.shifted(j);
}

/// (1/n) sum_{j=0}^{n-1} g(symbol(j)). Requires n >= 1.
double birkhoff_average(const std::function<double(const Eigen::VectorXd&)>& g,
                        const Realization& omega, std::int64_t n);

namespace detail {

/// SplitMix64 finalizer; the workhorse of the counter-based generator.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Deterministic stream keyed on (seed, index, component), uniform in [0,1).
double counter_uniform(std::uint64_t seed, std::int64_t index, int component) noexcept;

/// Small deterministic RNG for frame initialization and sampling.
class SplitMix {
public:
    explicit SplitMix(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next() noexcept;
    double uniform() noexcept;                  ///< [0, 1)
    double uniform(double lo, double hi) noexcept;
    Eigen::VectorXd vector(int n) noexcept;     ///< components in [-1, 1)
    Eigen::MatrixXd matrix(int rows, int cols) noexcept;

private:
    std::uint64_t state_;
};

} // namespace detail

} // namespace centerfield
