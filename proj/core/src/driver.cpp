#include "centerfield/driver.hpp"

#include <cmath>
#include <mutex>

#include "centerfield/errors.hpp"

namespace centerfield {

namespace detail {

std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

namespace {

// Map a signed index to an unsigned counter without collisions.
std::uint64_t zigzag(std::int64_t j) noexcept {
    return (static_cast<std::uint64_t>(j) << 1) ^ static_cast<std::uint64_t>(j >> 63);
}

double to_unit(std::uint64_t bits) noexcept {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

} // namespace

double counter_uniform(std::uint64_t seed, std::int64_t index, int component) noexcept {
    std::uint64_t s = mix64(seed ^ 0xD1B54A32D192ED03ull);
    s = mix64(s + zigzag(index));
    s = mix64(s + static_cast<std::uint64_t>(component) + 1);
    return to_unit(s);
}

std::uint64_t SplitMix::next() noexcept {
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

double SplitMix::uniform() noexcept { return to_unit(next()); }

double SplitMix::uniform(double lo, double hi) noexcept {
    return lo + (hi - lo) * uniform();
}

Eigen::VectorXd SplitMix::vector(int n) noexcept {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = uniform(-1.0, 1.0);
    return v;
}

Eigen::MatrixXd SplitMix::matrix(int rows, int cols) noexcept {
    Eigen::MatrixXd m(rows, cols);
    for (int c = 0; c < cols; ++c)
        for (int r = 0; r < rows; ++r) m(r, c) = uniform(-1.0, 1.0);
    return m;
}

} // namespace detail

namespace {

double fractional(double x) noexcept {
    double f = x - std::floor(x);
    return (f >= 1.0) ? 0.0 : f;
}

void validate(const DriverSpec& spec) {
    if (spec.dimension < 1)
        raise(errc::invalid_argument, "driver symbol dimension must be >= 1");
    switch (spec.kind) {
        case DriverKind::iid_sequence:
            if (spec.law == NoiseLaw::uniform && !(spec.low < spec.high))
                raise(errc::invalid_argument, "uniform law requires low < high");
            if (spec.law == NoiseLaw::coin && !(spec.scale > 0.0))
                raise(errc::invalid_argument, "coin law requires positive scale");
            break;
        case DriverKind::finite_rotation:
            break;
        case DriverKind::deterministic_point:
            if (spec.point.empty())
                raise(errc::invalid_argument, "deterministic driver needs a point");
            break;
    }
}

} // namespace

/// Shared generator + cache. Two one-sided growable arrays hold materialized
/// symbols for non-negative and negative absolute indices; generation itself
/// is pure, the cache only avoids rehashing on repeated access.
struct Realization::Source {
    DriverSpec spec;
    double phase0 = 0.0; // rotation starting phase, derived from the seed
    mutable std::mutex guard;
    mutable std::vector<Eigen::VectorXd> forward;  // indices 0, 1, 2, ...
    mutable std::vector<Eigen::VectorXd> backward; // indices -1, -2, ...

    explicit Source(const DriverSpec& s) : spec(s) {
        phase0 = fractional(spec.phase + detail::counter_uniform(spec.seed, 0, 0));
    }

    int dimension() const noexcept {
        if (spec.kind == DriverKind::deterministic_point)
            return static_cast<int>(spec.point.size());
        if (spec.kind == DriverKind::finite_rotation) return 1;
        return spec.dimension;
    }

    Eigen::VectorXd generate(std::int64_t index) const {
        switch (spec.kind) {
            case DriverKind::deterministic_point: {
                return Eigen::Map<const Eigen::VectorXd>(spec.point.data(),
                                                         static_cast<int>(spec.point.size()));
            }
            case DriverKind::finite_rotation: {
                Eigen::VectorXd v(1);
                v[0] = fractional(phase0 + static_cast<double>(index) * spec.alpha);
                return v;
            }
            case DriverKind::iid_sequence: {
                const int d = spec.dimension;
                Eigen::VectorXd v(d);
                for (int c = 0; c < d; ++c) {
                    const double u = detail::counter_uniform(spec.seed, index, c);
                    if (spec.law == NoiseLaw::uniform)
                        v[c] = spec.low + (spec.high - spec.low) * u;
                    else
                        v[c] = (u < 0.5) ? -spec.scale : spec.scale;
                }
                return v;
            }
        }
        raise(errc::invalid_argument, "unknown driver kind");
    }

    const Eigen::VectorXd& at(std::int64_t index) const {
        std::lock_guard<std::mutex> lock(guard);
        if (index >= 0) {
            auto k = static_cast<std::size_t>(index);
            while (forward.size() <= k) forward.push_back(generate(static_cast<std::int64_t>(forward.size())));
            return forward[k];
        }
        auto k = static_cast<std::size_t>(-index - 1);
        while (backward.size() <= k)
            backward.push_back(generate(-static_cast<std::int64_t>(backward.size()) - 1));
        return backward[k];
    }
};

Realization::Realization(const DriverSpec& spec) : offset_(0) {
    validate(spec);
    source_ = std::make_shared<const Source>(spec);
}

Realization::Realization(std::shared_ptr<const Source> source, std::int64_t offset)
    : source_(std::move(source)), offset_(offset) {}

Eigen::VectorXd Realization::symbol(std::int64_t j) const { return source_->at(offset_ + j); }

Realization Realization::shifted(std::int64_t j) const { return Realization(source_, offset_ + j); }

void Realization::prefetch(std::int64_t lo, std::int64_t hi) const {
    for (std::int64_t j = lo; j <= hi; ++j) (void)source_->at(offset_ + j);
}

int Realization::symbol_dimension() const noexcept { return source_->dimension(); }

const DriverSpec& Realization::spec() const noexcept { return source_->spec; }

double birkhoff_average(const std::function<double(const Eigen::VectorXd&)>& g,
                        const Realization& omega, std::int64_t n) {
    if (n < 1) raise(errc::invalid_argument, "birkhoff average needs n >= 1");
    double sum = 0.0;
    for (std::int64_t j = 0; j < n; ++j) sum += g(omega.symbol(j));
    return sum / static_cast<double>(n);
}

} // namespace centerfield
