#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <string>

namespace ske {

using bigint = boost::multiprecision::cpp_int;
using rational = boost::multiprecision::cpp_rational;

inline double to_double(const rational& r) { return r.convert_to<double>(); }

inline std::string to_string(const rational& r) { return r.str(); }

inline rational pow_rat(const rational& base, unsigned e) {
    rational acc(1);
    for (unsigned i = 0; i < e; ++i) acc *= base;
    return acc;
}

inline bigint pow_int(const bigint& base, unsigned e) {
    bigint acc(1);
    for (unsigned i = 0; i < e; ++i) acc *= base;
    return acc;
}

inline bigint factorial(unsigned n) {
    bigint acc(1);
    for (unsigned i = 2; i <= n; ++i) acc *= i;
    return acc;
}

} // namespace ske
