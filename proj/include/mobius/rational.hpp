#pragma once

#include <boost/rational.hpp>
#include <cstdint>
#include <string>

namespace mobius {

/// Exact rational arithmetic for the probability reports; counts at desk
/// scale stay far below 2^63.
using Rational = boost::rational<long long>;

inline std::string rational_string(const Rational& r) {
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

inline double rational_double(const Rational& r) {
    return double(r.numerator()) / double(r.denominator());
}

} // namespace mobius
