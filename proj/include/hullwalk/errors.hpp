#pragma once

#include <stdexcept>
#include <string>

namespace hullwalk {

// Base for all errors raised by the library.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Invalid user-supplied configuration (CLI exit code 2).
struct ConfigError : Error {
    using Error::Error;
};

// A violated internal invariant, e.g. a certificate that fails its own
// re-check (CLI exit code 3).
struct InternalError : Error {
    using Error::Error;
};

struct RankDeficientError : Error {
    using Error::Error;
};

struct BlockBudgetExceededError : Error {
    using Error::Error;
};

struct NonPositiveConstantError : Error {
    using Error::Error;
};

struct MissingGridTimeError : Error {
    using Error::Error;
};

struct GridTooCoarseError : Error {
    using Error::Error;
};

struct ZeroPointError : Error {
    using Error::Error;
};

struct IterationLimitError : Error {
    using Error::Error;
};

}  // namespace hullwalk
