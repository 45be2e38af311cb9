#include "centerfield/fiber.hpp"

#include <cmath>
#include <limits>

#include "centerfield/errors.hpp"

namespace centerfield {

void validate_fiber_spec(const FiberSpec& spec) {
    if (spec.dimension < 1) raise(errc::invalid_argument, "fiber dimension must be >= 1");
    if (spec.norm == NormKind::weighted_p) {
        if (!(spec.p >= 1.0)) raise(errc::invalid_argument, "norm exponent p must be >= 1");
        if (spec.weights.size() != 0 && spec.weights.size() != spec.dimension)
            raise(errc::invalid_argument, "weight vector length must match dimension");
        for (int i = 0; i < spec.weights.size(); ++i)
            if (!(spec.weights[i] > 0.0))
                raise(errc::invalid_argument, "norm weights must be strictly positive");
    }
}

double fiber_norm(const FiberSpec& spec, const Eigen::VectorXd& v) {
    if (v.size() != spec.dimension)
        raise(errc::invalid_argument, "vector dimension " + std::to_string(v.size()) +
                                          " does not match fiber dimension " +
                                          std::to_string(spec.dimension));
    switch (spec.norm) {
        case NormKind::euclidean:
            return v.norm();
        case NormKind::sup:
            return v.size() ? v.cwiseAbs().maxCoeff() : 0.0;
        case NormKind::weighted_p: {
            Eigen::VectorXd scaled = v.cwiseAbs();
            if (spec.weights.size()) scaled = scaled.cwiseProduct(spec.weights);
            if (std::isinf(spec.p)) return scaled.maxCoeff();
            if (spec.p == 1.0) return scaled.sum();
            if (spec.p == 2.0) return scaled.norm();
            double acc = 0.0;
            for (int i = 0; i < scaled.size(); ++i) acc += std::pow(scaled[i], spec.p);
            return std::pow(acc, 1.0 / spec.p);
        }
    }
    raise(errc::invalid_argument, "unknown norm kind");
}

double fiber_norm(const FiberSpec& spec, const FiberVector& v) { return fiber_norm(spec, v.coords); }

bool norm_is_quadratic(const FiberSpec& spec) noexcept {
    return spec.norm == NormKind::euclidean ||
           (spec.norm == NormKind::weighted_p && spec.p == 2.0);
}

Eigen::VectorXd norm_scaling(const FiberSpec& spec) {
    if (!norm_is_quadratic(spec))
        raise(errc::invalid_argument, "norm is not induced by an inner product");
    if (spec.norm == NormKind::euclidean || spec.weights.size() == 0)
        return Eigen::VectorXd::Ones(spec.dimension);
    return spec.weights;
}

FiberField FiberField::constant(FiberSpec spec) {
    validate_fiber_spec(spec);
    return FiberField([spec](const Realization&) { return spec; });
}

FiberSpec FiberField::spec(const Realization& omega) const {
    if (!schedule_) raise(errc::invalid_argument, "fiber field has no schedule");
    return schedule_(omega);
}

int FiberField::dimension(const Realization& omega) const { return spec(omega).dimension; }

double FiberField::norm(const Realization& omega, const Eigen::VectorXd& v) const {
    return fiber_norm(spec(omega), v);
}

} // namespace centerfield
