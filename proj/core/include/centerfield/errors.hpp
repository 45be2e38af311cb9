#pragma once

#include <stdexcept>
#include <string>

namespace centerfield {

/// Failure categories surfaced by the toolkit. The CLI maps these to exit
/// codes: config_error -> 2, verification_failure -> 4, everything else -> 3.
enum class errc {
    invalid_argument,
    linearization_failure,
    outside_validity_radius,
    numerical_failure,
    no_center_exponent,
    splitting_not_converged,
    not_invertible_direction,
    not_in_center,
    parameters_infeasible,
    radius_failure,
    fixed_point_not_converged,
    fit_failure,
    config_error,
    verification_failure,
};

const char* errc_name(errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& what);
    errc code() const noexcept { return code_; }

private:
    errc code_;
};

[[noreturn]] void raise(errc code, const std::string& message);

} // namespace centerfield
