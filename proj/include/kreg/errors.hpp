#pragma once

#include <stdexcept>
#include <string>

namespace kreg {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid argument values (non-finite inputs, empty vectors, bad levels).
class DomainError : public Error {
public:
    using Error::Error;
};

// Every kernel weight underflowed: the anchor is unreachably far from the
// sample at the given bandwidth.
class EmptyNeighborhoodError : public Error {
public:
    using Error::Error;
};

// Sample has no usable spread (constant series, zero IQR and variance).
class DegenerateSampleError : public Error {
public:
    using Error::Error;
};

// Rank-deficient global regression design.
class SingularDesignError : public Error {
public:
    using Error::Error;
};

// Weighted local design is numerically singular at a specific anchor.
class LocalSingularityError : public Error {
public:
    LocalSingularityError(const std::string& what, double anchor)
        : Error(what), anchor_(anchor) {}
    explicit LocalSingularityError(const std::string& what)
        : Error(what), anchor_(0.0) {}
    double anchor() const noexcept { return anchor_; }

private:
    double anchor_;
};

// Too few observations for the requested fit.
class InsufficientDataError : public Error {
public:
    using Error::Error;
};

// Malformed input files (message carries line numbers where known).
class DataFormatError : public Error {
public:
    using Error::Error;
};

// Filesystem problems: missing inputs, unwritable destinations.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace kreg
