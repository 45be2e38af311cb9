#pragma once

#include <map>
#include <string>
#include <vector>

#include "centerfield/cocycle.hpp"
#include "centerfield/driver.hpp"

namespace centerfield {

/// Benchmark systems with known structure: deterministic polynomial maps,
/// random diagonal cocycles, an additive-noise system with a random
/// stationary orbit, a delay recursion in companion form, and a driven ODE
/// discretized at a fixed time step.

struct BenchmarkSystem {
    std::string name;
    std::string description;
    DriverSpec driver;
    SystemBundle bundle;
    std::map<std::string, double> params;   ///< resolved values incl. defaults
    std::vector<double> oracle_exponents;   ///< exact exponents, empty if none
};

std::vector<std::string> catalog_names();

/// name -> one-line description, for the catalog listing.
std::vector<std::pair<std::string, std::string>> catalog();

BenchmarkSystem build_benchmark(const std::string& name,
                                const std::map<std::string, double>& params = {},
                                std::uint64_t seed = 42);

} // namespace centerfield
