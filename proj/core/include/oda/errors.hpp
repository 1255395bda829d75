#pragma once

#include <stdexcept>
#include <string>

namespace oda {

// Input/configuration problems: bad files, bad config, bad shapes.
// The CLI maps these to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : ConfigError {
    using ConfigError::ConfigError;
};

struct EmptyFile : ConfigError {
    using ConfigError::ConfigError;
};

struct RaggedRows : ConfigError {
    using ConfigError::ConfigError;
};

struct SpecError : ConfigError {
    using ConfigError::ConfigError;
};

struct InvalidK : ConfigError {
    using ConfigError::ConfigError;
};

// Runtime numerical/model failures. The CLI maps these to exit code 3.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DomainError : NumericalError {
    using NumericalError::NumericalError;
};

struct DimensionMismatch : NumericalError {
    using NumericalError::NumericalError;
};

struct DegenerateModel : NumericalError {
    using NumericalError::NumericalError;
};

struct AlignmentError : NumericalError {
    using NumericalError::NumericalError;
};

struct CapacityExceeded : NumericalError {
    using NumericalError::NumericalError;
};

struct InsufficientSamples : NumericalError {
    using NumericalError::NumericalError;
};

struct StreamExhausted : NumericalError {
    using NumericalError::NumericalError;
};

struct UntrainedModel : NumericalError {
    using NumericalError::NumericalError;
};

struct IndexError : NumericalError {
    using NumericalError::NumericalError;
};

}  // namespace oda
