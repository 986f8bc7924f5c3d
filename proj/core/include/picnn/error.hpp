#pragma once

#include <stdexcept>
#include <string>

namespace picnn {

/// Argument outside the mathematical domain of an operation (chart domain,
/// ln of a nonpositive value, fractional order out of range, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Metric determinant below the degeneracy threshold (pole approach).
class DegenerateMetric : public DomainError {
public:
    using DomainError::DomainError;
};

/// Mismatched sizes, layouts, or tables.
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Linear-algebra failure that is reported instead of being patched (no jitter).
class FactorizationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-finite loss during optimization.
class TrainingDiverged : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace picnn
