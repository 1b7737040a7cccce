#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace ctxscope {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Parses "3/100", "0.03", "7", "-1.5e-2" into an exact fraction.
/// Decimal literals are read digit by digit, never through a binary float.
Rational parse_rational(std::string_view text);

/// Always "num/den", including integers ("1/1"), so the format is uniform.
std::string to_fraction_string(const Rational& value);

/// Human rendering with the given number of significant digits.
std::string to_decimal_string(const Rational& value, int significant = 6);

/// Exact decimal expansion when the denominator has only factors 2 and 5.
std::optional<std::string> to_exact_decimal(const Rational& value);

/// Exact decimal when it terminates, "num/den" otherwise. Round-trips through parse_rational.
std::string to_literal(const Rational& value);

double to_double(const Rational& value);

}  // namespace ctxscope
