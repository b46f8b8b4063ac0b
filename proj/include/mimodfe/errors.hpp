#pragma once

#include <stdexcept>
#include <string>

namespace mimodfe {

/// Base class for all errors thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input has the wrong shape or size.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Input value outside the mathematical domain of the operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A matrix factorization broke down; carries the failing pivot index.
class FactorizationError : public Error {
public:
    FactorizationError(const std::string& what, int pivot)
        : Error(what), pivot_(pivot) {}
    int pivot() const noexcept { return pivot_; }

private:
    int pivot_ = -1;
};

/// Input is (numerically) rank deficient; carries the detected rank.
class RankError : public Error {
public:
    RankError(const std::string& what, int numerical_rank)
        : Error(what), rank_(numerical_rank) {}
    int numerical_rank() const noexcept { return rank_; }

private:
    int rank_ = 0;
};

/// Inconsistent or unsupported configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// File could not be read or written.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace mimodfe
