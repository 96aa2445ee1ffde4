#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace akit {

/// Exact arbitrary-precision rational, always kept in lowest terms.
using Rational = mpq_class;

/// Parses "p" or "p/q" (optional leading '-'); throws std::invalid_argument.
Rational parse_rational(std::string_view text);

std::string to_string(const Rational& value);

inline double to_double(const Rational& value) { return value.get_d(); }

}  // namespace akit
