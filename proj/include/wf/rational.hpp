#pragma once

#include <gmpxx.h>

#include <string>

namespace wf {

using Rational = mpq_class;

inline Rational rat(long p, long q = 1) {
    Rational r(p, q);
    r.canonicalize();
    return r;
}

// Accepts "p", "p/q", "-p/q".
Rational parse_rational(const std::string& s);
std::string to_string(const Rational& r);

} // namespace wf
