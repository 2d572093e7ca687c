#pragma once

#include <stdexcept>
#include <string>

namespace csmv {

// Base classes map onto CLI exit codes: ConfigError -> 2, DataError -> 3,
// NumericError -> 4.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BadMagic : DataError {
    using DataError::DataError;
};

struct Truncated : DataError {
    using DataError::DataError;
};

struct NonFinite : DataError {
    using DataError::DataError;
};

struct UnknownLabel : DataError {
    using DataError::DataError;
};

struct MissingField : DataError {
    using DataError::DataError;
};

struct DuplicateId : DataError {
    using DataError::DataError;
};

struct EmptyCorpus : DataError {
    using DataError::DataError;
};

struct LengthMismatch : DataError {
    using DataError::DataError;
};

struct MissingComment : DataError {
    using DataError::DataError;
};

struct DanglingReferent : DataError {
    using DataError::DataError;
};

struct DimMismatch : DataError {
    using DataError::DataError;
};

struct IdOutOfRange : DataError {
    using DataError::DataError;
};

struct EmptyText : DataError {
    using DataError::DataError;
};

struct LabelOutOfRange : DataError {
    using DataError::DataError;
};

struct ConfigMismatch : DataError {
    using DataError::DataError;
};

struct InvalidConfig : ConfigError {
    using ConfigError::ConfigError;
};

struct UnknownMode : ConfigError {
    using ConfigError::ConfigError;
};

struct NonFiniteLoss : NumericError {
    using NumericError::NumericError;
};

}  // namespace csmv
