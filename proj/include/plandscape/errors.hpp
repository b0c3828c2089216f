#pragma once

#include <stdexcept>
#include <string>

namespace plandscape {

/// Invalid sizes, out-of-range vertices, infeasible overlap constraints.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// The first moment curve has no value at this overlap: the log-count term
/// exceeds ln 2 times the free pair count, so h^{-1} has no preimage.
class CurveUndefined : public DomainError {
public:
    CurveUndefined(long long z, const std::string& why)
        : DomainError("curve undefined at z=" + std::to_string(z) + ": " + why), z_(z) {}
    long long z() const noexcept { return z_; }

private:
    long long z_;
};

/// An exhaustive routine would exceed its enumeration budget. Callers decide
/// whether to fall back to a heuristic; nothing falls back silently.
class BudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Certification requested on a heuristic (non-exact) curve.
class NotCertifiable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace plandscape
