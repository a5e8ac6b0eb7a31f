#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

#include "treefree/error.hpp"

namespace treefree {

// Exact arithmetic scalar.  Always stored in reduced form with positive
// denominator (cpp_rational maintains both invariants).
using Rat = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline double to_double(const Rat& r) { return r.convert_to<double>(); }

// Serializes as "p" or "p/q".
inline std::string rat_to_string(const Rat& r) {
    if (denominator(r) == 1) return numerator(r).str();
    return numerator(r).str() + "/" + denominator(r).str();
}

inline Rat rat_from_string(const std::string& s) {
    const auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rat(BigInt(s));
        BigInt num(s.substr(0, slash));
        BigInt den(s.substr(slash + 1));
        if (den == 0) throw validation_error("rational with zero denominator: " + s);
        return Rat(num, den);
    } catch (const std::runtime_error&) {
        throw validation_error("cannot parse rational: " + s);
    }
}

inline Rat rat_pow(const Rat& base, long e) {
    if (e < 0) {
        if (base == 0) throw validation_error("0 raised to a negative power");
        return Rat(1) / rat_pow(base, -e);
    }
    Rat out(1), b = base;
    while (e > 0) {
        if (e & 1) out *= b;
        b *= b;
        e >>= 1;
    }
    return out;
}

// Conversion hook used by code templated over Rat / double.
template <class S>
inline S scalar_from_rat(const Rat& r);
template <>
inline Rat scalar_from_rat<Rat>(const Rat& r) { return r; }
template <>
inline double scalar_from_rat<double>(const Rat& r) { return to_double(r); }

} // namespace treefree
