#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

namespace qgraph {

using Rational = mpq_class;

/// Parses "p/q", an integer, or a decimal with optional exponent ("1.25",
/// "-3e-2") into an exact rational. Throws Error(SyntaxError).
Rational parse_rational(std::string_view text);

/// Canonical "p/q" form; integers are printed without a denominator.
std::string to_string(const Rational& q);

/// Best rational approximation by continued fractions with denominator at
/// most `max_denominator`.
Rational rationalize(double x, std::int64_t max_denominator = 1000000);

inline double to_double(const Rational& q) { return q.get_d(); }

}  // namespace qgraph
