#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "centerfield/driver.hpp"

namespace centerfield {

/// Finite-dimensional fibers, one per base point, with a choice of norm.

enum class NormKind {
    euclidean,
    weighted_p, ///< ( sum (w_i |v_i|)^p )^(1/p), p in {1, 2} or sup via NormKind::sup
    sup,
};

struct FiberSpec {
    int dimension = 1;
    NormKind norm = NormKind::euclidean;
    double p = 2.0;
    Eigen::VectorXd weights; ///< empty means unweighted
    std::vector<std::string> labels;
};

/// Vector in the fiber over orbit index `index` (relative to a fixed base).
struct FiberVector {
    Eigen::VectorXd coords;
    std::int64_t index = 0;
};

double fiber_norm(const FiberSpec& spec, const Eigen::VectorXd& v);
double fiber_norm(const FiberSpec& spec, const FiberVector& v);

/// True when the norm comes from an inner product, so operator norms are
/// singular values after diagonal scaling.
bool norm_is_quadratic(const FiberSpec& spec) noexcept;

/// Diagonal scaling D with ||v||_spec = |D v|_2 for quadratic norms.
Eigen::VectorXd norm_scaling(const FiberSpec& spec);

void validate_fiber_spec(const FiberSpec& spec);

/// Field of fibers along an orbit: per-base-point dimension and norm. The
/// dimension may vary along the orbit (keyed on the symbol of the base
/// point); all shipped benchmark systems use a constant schedule.
class FiberField {
public:
    FiberField() = default;
    explicit FiberField(std::function<FiberSpec(const Realization&)> schedule)
        : schedule_(std::move(schedule)) {}

    static FiberField constant(FiberSpec spec);

    FiberSpec spec(const Realization& omega) const;
    int dimension(const Realization& omega) const;
    double norm(const Realization& omega, const Eigen::VectorXd& v) const;

private:
    std::function<FiberSpec(const Realization&)> schedule_;
};

} // namespace centerfield
