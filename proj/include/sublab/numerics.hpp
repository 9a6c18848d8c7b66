#pragma once

#include <boost/rational.hpp>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sublab {

using Rational = boost::rational<long long>;

/// Pairwise (cascade) summation; the fixed reduction tree keeps results
/// bit-identical across runs and thread counts.
double pairwise_sum(std::span<const double> values);

/// 17 significant digits, '.' decimal separator, locale independent.
std::string format_double(double value);

/// FNV-1a 64-bit over bytes, hex-encoded.
std::string fnv1a_hex(const std::string& bytes);

/// Best rational approximation with denominator <= max_den (continued
/// fractions). Intended for recovering simple exponents like 4/3 from
/// their double representation.
Rational rational_from_double(double value, long long max_den = 1000000);

double rational_to_double(const Rational& r);

/// "a/b" or "a" when b == 1.
std::string rational_to_string(const Rational& r);

}  // namespace sublab
