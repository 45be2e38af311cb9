#include "centerfield/errors.hpp"

namespace centerfield {

const char* errc_name(errc code) noexcept {
    switch (code) {
        case errc::invalid_argument: return "invalid-argument";
        case errc::linearization_failure: return "linearization-failure";
        case errc::outside_validity_radius: return "outside-validity-radius";
        case errc::numerical_failure: return "numerical-failure";
        case errc::no_center_exponent: return "no-center-exponent";
        case errc::splitting_not_converged: return "splitting-not-converged";
        case errc::not_invertible_direction: return "not-invertible-direction";
        case errc::not_in_center: return "not-in-center";
        case errc::parameters_infeasible: return "parameters-infeasible";
        case errc::radius_failure: return "radius-failure";
        case errc::fixed_point_not_converged: return "fixed-point-not-converged";
        case errc::fit_failure: return "fit-failure";
        case errc::config_error: return "config-error";
        case errc::verification_failure: return "verification-failure";
    }
    return "unknown-error";
}

Error::Error(errc code, const std::string& what)
    : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

void raise(errc code, const std::string& message) {
    throw Error(code, message);
}

} // namespace centerfield
