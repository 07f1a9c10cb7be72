#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <string>

namespace singtrack {

// Exact rational; cpp_rational keeps gcd(num, den) = 1 and den > 0.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline Rational rat(long long num, long long den = 1) { return Rational(BigInt(num), BigInt(den)); }

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

inline std::string num_str(const Rational& r) { return boost::multiprecision::numerator(r).str(); }
inline std::string den_str(const Rational& r) { return boost::multiprecision::denominator(r).str(); }

inline std::string to_string(const Rational& r) {
    auto d = boost::multiprecision::denominator(r);
    return d == 1 ? num_str(r) : num_str(r) + "/" + den_str(r);
}

}  // namespace singtrack
