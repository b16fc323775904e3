#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <string>

namespace mdms {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Parses "p/q" or a bare integer "p". Throws SpecError on anything else
/// (including q == 0). Whitespace is not accepted.
Rational parse_rational(const std::string& text);

/// Canonical wire form: "p/q" in lowest terms, or "p" when the
/// denominator is 1. All rationals in JSON artifacts use this form.
std::string rational_to_string(const Rational& value);

std::string bigint_to_string(const BigInt& value);

/// Largest integer <= value (value must be >= 0 here).
BigInt rational_floor(const Rational& value);

}  // namespace mdms
