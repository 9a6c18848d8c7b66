#include "sublab/numerics.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace sublab {

double pairwise_sum(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n == 0) return 0.0;
  if (n <= 8) {
    double acc = 0.0;
    for (double v : values) acc += v;
    return acc;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(values.subspan(0, half)) +
         pairwise_sum(values.subspan(half));
}

std::string format_double(double value) {
  std::array<char, 64> buf;
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                           std::chars_format::general, 17);
  return std::string(buf.data(), res.ptr);
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char out[17];
  std::snprintf(out, sizeof(out), "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(out);
}

Rational rational_from_double(double value, long long max_den) {
  if (!std::isfinite(value))
    throw std::domain_error("cannot convert non-finite value to rational");
  const bool neg = value < 0.0;
  double x = std::abs(value);
  long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double frac = x;
  for (int it = 0; it < 64; ++it) {
    const double a_f = std::floor(frac);
    if (a_f > static_cast<double>(1LL << 60)) break;
    const long long a = static_cast<long long>(a_f);
    long long p2 = a * p1 + p0;
    long long q2 = a * q1 + q0;
    if (q2 > max_den) break;
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    const double rem = frac - a_f;
    if (rem < 1e-15 * std::max(1.0, x)) break;
    frac = 1.0 / rem;
  }
  if (q1 == 0) return Rational(0);
  Rational r(p1, q1);
  return neg ? -r : r;
}

double rational_to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) /
         static_cast<double>(r.denominator());
}

std::string rational_to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

}  // namespace sublab
