#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace picardkit {

using Int = boost::multiprecision::mpz_int;
using Rational = boost::multiprecision::mpq_rational;

inline Int ipow(Int base, unsigned exp) {
    Int r = 1;
    while (exp) {
        if (exp & 1u) r *= base;
        base *= base;
        exp >>= 1u;
    }
    return r;
}

inline Int gcd(const Int& a, const Int& b) { return boost::multiprecision::gcd(a, b); }

inline Int lcm(const Int& a, const Int& b) {
    if (a == 0 || b == 0) return 0;
    return boost::multiprecision::abs(a / gcd(a, b) * b);
}

/// Floor division and nonnegative remainder.
inline Int floor_div(const Int& a, const Int& b) {
    Int q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

inline Int mod(const Int& a, const Int& m) {
    Int r = a % m;
    if (r < 0) r += m;
    return r;
}

inline bool is_integer(const Rational& r) { return boost::multiprecision::denominator(r) == 1; }

inline Int numer(const Rational& r) { return boost::multiprecision::numerator(r); }
inline Int denom(const Rational& r) { return boost::multiprecision::denominator(r); }

inline std::string to_string(const Int& v) { return v.str(); }
inline std::string to_string(const Rational& v) { return v.str(); }

/// Exact valuation of a nonzero integer at a prime.
inline unsigned valuation(Int v, const Int& prime) {
    unsigned k = 0;
    if (v == 0) return ~0u;
    while (v % prime == 0) {
        v /= prime;
        ++k;
    }
    return k;
}

inline bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull}) {
        if (n % d == 0) return n == d;
    }
    for (std::uint64_t d = 17; d * d <= n; d += 2)
        if (n % d == 0) return false;
    return true;
}

/// Prime factors (without multiplicity) of a machine integer.
inline std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
            out.push_back(d);
            while (n % d == 0) n /= d;
        }
    }
    if (n > 1) out.push_back(n);
    return out;
}

} // namespace picardkit
