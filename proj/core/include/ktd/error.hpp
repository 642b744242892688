#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ktd {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A covariance could not be factored, even after jitter.
class DecompositionError : public Error {
public:
    DecompositionError(const std::string& what, std::size_t dimension, double min_eigenvalue,
                       double max_asymmetry)
        : Error(what), dimension_(dimension), min_eigenvalue_(min_eigenvalue),
          max_asymmetry_(max_asymmetry) {}

    std::size_t dimension() const noexcept { return dimension_; }
    double min_eigenvalue() const noexcept { return min_eigenvalue_; }
    double max_asymmetry() const noexcept { return max_asymmetry_; }

private:
    std::size_t dimension_;
    double min_eigenvalue_;
    double max_asymmetry_;
};

/// A user mapping threw while being evaluated on a sigma point.
class EvaluationError : public Error {
public:
    EvaluationError(const std::string& what, std::size_t point_index)
        : Error(what), point_index_(point_index) {}

    std::size_t point_index() const noexcept { return point_index_; }

private:
    std::size_t point_index_;
};

/// Arguments do not satisfy an operation's preconditions (shape, variant, range).
class ContractViolation : public Error {
public:
    using Error::Error;
};

/// Innovation variance was not strictly positive.
class SingularInnovation : public Error {
public:
    using Error::Error;
};

/// Recursive least-squares denominator vanished.
class SingularUpdate : public Error {
public:
    using Error::Error;
};

/// Colored-noise filters cannot learn off-policy (Q-optimization transitions).
class OffPolicyUnsupported : public Error {
public:
    using Error::Error;
};

/// Capability not provided by an approximator (e.g. gradients).
class Unsupported : public Error {
public:
    using Error::Error;
};

class UndefinedMetric : public Error {
public:
    using Error::Error;
};

/// Invalid experiment configuration. Maps to CLI exit code 1.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace ktd
