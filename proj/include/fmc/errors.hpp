#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace fmc {

/// Invalid argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Transform evaluated on the support of the measure (or at an atom).
class SingularityError : public DomainError {
public:
    using DomainError::DomainError;
};

/// zm(z)+1 vanished, so M has a pole at the reported location.
class PoleError : public std::runtime_error {
public:
    PoleError(const std::string& what, std::complex<double> where)
        : std::runtime_error(what), location(where) {}
    std::complex<double> location;
};

/// Iterative solver did not reach its tolerance.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input violates the structural hypotheses of the edge machinery.
class StructureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace fmc
