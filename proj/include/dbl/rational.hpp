#pragma once

// Exact rational arithmetic used throughout the set algebra. A single ulp
// error can flip a containment test and change an integer distance, so no
// floating point is allowed anywhere near the set operations.

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string>

namespace dbl {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Rat make_rat(long num, long den = 1) { return Rat(Int(num), Int(den)); }

// Parses "p/q", plain integers, and decimal literals such as "-1.25".
inline Rat parse_rat(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("empty rational literal");
    auto slash = text.find('/');
    if (slash != std::string::npos) {
        Int num(text.substr(0, slash));
        Int den(text.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator: " + text);
        return Rat(num, den);
    }
    auto dot = text.find('.');
    if (dot == std::string::npos) return Rat(Int(text));
    std::string digits = text.substr(0, dot) + text.substr(dot + 1);
    std::size_t frac_len = text.size() - dot - 1;
    if (frac_len == 0) return Rat(Int(digits));
    Int den = 1;
    for (std::size_t i = 0; i < frac_len; ++i) den *= 10;
    return Rat(Int(digits), den);
}

inline std::string rat_to_string(const Rat& q) {
    if (denominator(q) == 1) return numerator(q).str();
    return numerator(q).str() + "/" + denominator(q).str();
}

inline double rat_to_double(const Rat& q) { return q.convert_to<double>(); }

inline Rat rat_abs(const Rat& q) { return q < 0 ? Rat(-q) : q; }

inline Rat rat_pow(const Rat& base, unsigned exp) {
    Rat acc = 1, b = base;
    unsigned e = exp;
    while (e > 0) {
        if (e & 1u) acc *= b;
        b *= b;
        e >>= 1;
    }
    return acc;
}

// Smallest n >= 0 with 2^n >= q. Requires q > 0.
inline unsigned ceil_log2(const Rat& q) {
    if (q <= 0) throw std::domain_error("ceil_log2 needs a positive argument");
    unsigned n = 0;
    Rat p = 1;
    while (p < q) {
        p *= 2;
        ++n;
        if (n > 100000) throw std::overflow_error("ceil_log2 runaway");
    }
    return n;
}

// Largest p/q with c^p <= r^q: a certified rational lower bound on log_c(r).
// Exact integer-power comparisons only.
inline Rat log_lower_bound(const Rat& c, const Rat& r, unsigned q = 32, unsigned p_max = 4096) {
    if (c <= 1 || r <= 1) return 0;
    Rat rq = rat_pow(r, q);
    unsigned lo = 0, hi = 1;
    while (hi < p_max && rat_pow(c, hi) <= rq) hi *= 2;
    while (lo + 1 < hi) {
        unsigned mid = (lo + hi) / 2;
        if (rat_pow(c, mid) <= rq)
            lo = mid;
        else
            hi = mid;
    }
    return Rat(lo, q);
}

// Smallest p/q with c^p >= r^q: a certified rational upper bound on log_c(r).
inline Rat log_upper_bound(const Rat& c, const Rat& r, unsigned q = 32, unsigned p_max = 4096) {
    if (c <= 1) throw std::domain_error("log base must exceed one");
    if (r <= 1) return 0;
    Rat lo = log_lower_bound(c, r, q, p_max);
    Int p = numerator(lo * q);
    if (rat_pow(c, p.convert_to<unsigned>()) == rat_pow(r, q)) return lo;
    return lo + Rat(1, q);
}

}  // namespace dbl
