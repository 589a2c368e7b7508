#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>
#include <string_view>

namespace equilab {

/// Exact rational number. GMP keeps every value in lowest terms with a
/// positive denominator once canonicalized, and all arithmetic results are
/// canonical.
using Rat = mpq_class;
using BigInt = mpz_class;

class DimensionMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class ParseError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Parses "p", "p/q" or a finite decimal such as "-1.25" into an exact value.
inline Rat parse_rat(std::string_view text) {
    std::string s(text);
    auto first = s.find_first_not_of(" \t");
    auto last = s.find_last_not_of(" \t");
    if (first == std::string::npos) throw ParseError("empty rational literal");
    s = s.substr(first, last - first + 1);
    if (!s.empty() && s.front() == '+') s.erase(0, 1);

    auto dot = s.find('.');
    if (dot != std::string::npos) {
        if (s.find('/') != std::string::npos) throw ParseError("bad rational literal: " + s);
        std::string digits = s.substr(0, dot) + s.substr(dot + 1);
        std::size_t frac_len = s.size() - dot - 1;
        if (digits.empty() || digits == "-") throw ParseError("bad rational literal: " + s);
        BigInt num;
        if (num.set_str(digits, 10) != 0) throw ParseError("bad rational literal: " + s);
        BigInt den;
        mpz_ui_pow_ui(den.get_mpz_t(), 10, frac_len);
        Rat r(num, den);
        r.canonicalize();
        return r;
    }

    Rat r;
    if (r.set_str(s, 10) != 0) throw ParseError("bad rational literal: " + s);
    if (r.get_den() == 0) throw ParseError("zero denominator: " + s);
    r.canonicalize();
    return r;
}

/// Canonical text form: "p" for integers, "p/q" otherwise.
inline std::string to_string(const Rat& r) { return r.get_str(); }

inline double to_double(const Rat& r) { return r.get_d(); }

/// Exact conversion of a finite double (every double is a dyadic rational).
inline Rat rat_from_double(double x) {
    Rat r(x);
    r.canonicalize();
    return r;
}

inline bool is_zero(const Rat& r) { return sgn(r) == 0; }

}  // namespace equilab
