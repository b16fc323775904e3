#pragma once

#include <stdexcept>
#include <string>

namespace mdms {

/// Base class for all errors raised by the library.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid specs, mismatched groups, out-of-range arguments.
struct SpecError : Error {
    using Error::Error;
};

/// A materialization would exceed the group-size cap.
struct CapError : Error {
    using Error::Error;
};

/// An admissible-pair enumeration would exceed the pair budget.
/// The message always carries the exact count that was refused.
struct BudgetError : Error {
    using Error::Error;
};

/// Malformed JSON or unreadable files.
struct IoError : Error {
    using Error::Error;
};

}  // namespace mdms
