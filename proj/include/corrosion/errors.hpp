#pragma once

#include <stdexcept>
#include <string>

namespace corrosion {

/// Invalid geometry, coefficient or configuration text.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Linear-algebra failure in one of the boundary-integral systems.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Sampling point outside the admissible region.
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Kernel evaluated at coincident source and target.
class SingularEvaluation : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

} // namespace corrosion
