#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

namespace sadic {

using Int = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Int int_pow(Int base, unsigned long e) {
    Int out = 1;
    while (e) {
        if (e & 1) out *= base;
        base *= base;
        e >>= 1;
    }
    return out;
}

inline Rational rat(long num, long den = 1) { return Rational(num, den); }

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

inline std::string rat_str(const Rational& r) {
    std::string s = numerator(r).str();
    if (denominator(r) != 1) s += "/" + denominator(r).str();
    return s;
}

inline std::size_t bit_size(const Int& v) {
    return v == 0 ? 0 : msb(abs(v)) + 1;
}

/// Nearest dyadic rational with denominator 2^bits; |result - r| <= 2^-(bits+1).
inline Rational round_to_bits(const Rational& r, unsigned bits) {
    Int scale = Int(1) << bits;
    Int num = numerator(r) * scale;
    Int den = denominator(r);
    Int q = num / den, rem = num % den;
    if (rem * 2 >= den) ++q;
    return Rational(q, scale);
}

inline Rational pow2_neg(unsigned bits) { return Rational(1, Int(1) << bits); }

}  // namespace sadic
