#pragma once

#include <stdexcept>
#include <string>

namespace lsnm {

// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct ConstantColumnError : Error {
    explicit ConstantColumnError(const std::string& msg) : Error(msg) {}
};

struct EmptySplitError : Error {
    explicit EmptySplitError(const std::string& msg) : Error(msg) {}
};

struct InvalidParamsError : Error {
    explicit InvalidParamsError(const std::string& msg) : Error(msg) {}
};

struct NonFiniteError : Error {
    explicit NonFiniteError(const std::string& msg) : Error(msg) {}
};

struct DivergedTrainingError : Error {
    explicit DivergedTrainingError(const std::string& msg) : Error(msg) {}
};

struct LengthMismatchError : Error {
    explicit LengthMismatchError(const std::string& msg) : Error(msg) {}
};

struct AllIdenticalError : Error {
    explicit AllIdenticalError(const std::string& msg) : Error(msg) {}
};

struct TooFewPointsError : Error {
    explicit TooFewPointsError(const std::string& msg) : Error(msg) {}
};

struct MissingMetaError : Error {
    explicit MissingMetaError(const std::string& msg) : Error(msg) {}
};

struct MalformedPairError : Error {
    explicit MalformedPairError(const std::string& msg) : Error(msg) {}
};

struct TimeoutError : Error {
    explicit TimeoutError(const std::string& msg) : Error(msg) {}
};

}  // namespace lsnm
