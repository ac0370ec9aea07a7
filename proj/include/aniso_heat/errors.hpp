#pragma once

#include <stdexcept>
#include <string>

namespace aniso_heat {

/// Bad input data: malformed measure/config entries, domain violations.
class validation_error : public std::runtime_error {
public:
    explicit validation_error(const std::string& what) : std::runtime_error(what) {}
};

/// A numerical procedure failed to stabilize (PV extrapolation, degenerate fits).
class convergence_error : public std::runtime_error {
public:
    explicit convergence_error(const std::string& what) : std::runtime_error(what) {}
};

/// Requested evaluation point lies outside the gridded domain.
class range_error : public std::runtime_error {
public:
    explicit range_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace aniso_heat
