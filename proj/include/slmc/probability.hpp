#ifndef SLMC_PROBABILITY_HPP_
#define SLMC_PROBABILITY_HPP_

#include <charconv>
#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace slmc {

// Exact probability scalar for small-model validation runs. The main
// pipeline uses double; every template below accepts either.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

template <class P>
inline constexpr bool is_rational_v = std::is_same_v<P, Rational>;

template <class P>
double to_double(const P& p) {
  if constexpr (is_rational_v<P>) {
    return p.template convert_to<double>();
  } else {
    return static_cast<double>(p);
  }
}

namespace detail {

inline BigInt parse_bigint(std::string_view s) {
  if (s.empty()) throw std::invalid_argument("empty integer");
  for (char c : s) {
    if (c < '0' || c > '9') throw std::invalid_argument("malformed integer: '" + std::string(s) + "'");
  }
  auto first = s.find_first_not_of('0');
  return BigInt(std::string(first == std::string_view::npos ? "0" : s.substr(first)));
}

inline Rational rational_from_decimal(std::string_view s) {
  // "0.25" -> 1/4, "1" -> 1, ".5" -> 1/2, "5e-3" -> 1/200
  long exponent = 0;
  auto epos = s.find_first_of("eE");
  if (epos != std::string_view::npos) {
    std::string exp_str(s.substr(epos + 1));
    std::size_t used = 0;
    exponent = std::stol(exp_str, &used);
    if (used != exp_str.size()) {
      throw std::invalid_argument("malformed probability: '" + std::string(s) + "'");
    }
    s = s.substr(0, epos);
  }
  auto dot = s.find('.');
  std::string digits;
  long frac_len = 0;
  if (dot == std::string_view::npos) {
    digits.assign(s);
  } else {
    digits.assign(s.substr(0, dot));
    digits.append(s.substr(dot + 1));
    frac_len = static_cast<long>(s.size() - dot - 1);
  }
  if (digits.empty()) throw std::invalid_argument("empty number: '" + std::string(s) + "'");
  BigInt num = parse_bigint(digits);
  BigInt den = 1;
  long net = frac_len - exponent;
  for (long i = 0; i < std::abs(net); ++i) {
    if (net > 0) den *= 10; else num *= 10;
  }
  return Rational(num, den);
}

}  // namespace detail

// Parses "0.5", "1/2", "1" into the requested scalar. Rational parsing of
// decimals is exact.
template <class P>
P parse_probability(std::string_view s) {
  auto slash = s.find('/');
  if constexpr (is_rational_v<P>) {
    if (slash != std::string_view::npos) {
      BigInt num = detail::parse_bigint(s.substr(0, slash));
      BigInt den = detail::parse_bigint(s.substr(slash + 1));
      if (den == 0) throw std::invalid_argument("zero denominator: '" + std::string(s) + "'");
      return Rational(num, den);
    }
    return detail::rational_from_decimal(s);
  } else {
    if (slash != std::string_view::npos) {
      Rational r = parse_probability<Rational>(s);
      return to_double(r);
    }
    double v = 0.0;
    auto* first = s.data();
    auto* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last) {
      throw std::invalid_argument("malformed probability: '" + std::string(s) + "'");
    }
    return v;
  }
}

// Shortest decimal that round-trips the exact 64-bit value.
inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw std::runtime_error("to_chars failed");
  return std::string(buf, ptr);
}

template <class P>
std::string format_probability(const P& p) {
  if constexpr (is_rational_v<P>) {
    return format_double(to_double(p));
  } else {
    return format_double(p);
  }
}

}  // namespace slmc

#endif  // SLMC_PROBABILITY_HPP_
