#pragma once

// Dense univariate polynomials in T over Z and Q, coefficients low-to-high.

#include "bigint.hpp"
#include "errors.hpp"

#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace picardkit {

using ZPoly = std::vector<Int>;
using QPoly = std::vector<Rational>;

template <class P>
void strip_zeros(P& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

template <class P>
P trimmed(P a) {
    strip_zeros(a);
    return a;
}

/// Degree, -1 for the zero polynomial.
template <class P>
long degree(const P& a) {
    long d = static_cast<long>(a.size()) - 1;
    while (d >= 0 && a[static_cast<std::size_t>(d)] == 0) --d;
    return d;
}

template <class P>
P poly_add(const P& a, const P& b) {
    P r(std::max(a.size(), b.size()));
    for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    strip_zeros(r);
    return r;
}

template <class P>
P poly_sub(const P& a, const P& b) {
    P r(std::max(a.size(), b.size()));
    for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
    strip_zeros(r);
    return r;
}

template <class P>
P poly_mul(const P& a, const P& b) {
    if (a.empty() || b.empty()) return {};
    P r(a.size() + b.size() - 1);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    }
    strip_zeros(r);
    return r;
}

template <class P, class S>
P poly_scale(P a, const S& s) {
    for (auto& c : a) c *= s;
    strip_zeros(a);
    return a;
}

template <class P>
P poly_pow(const P& a, unsigned e) {
    P r{typename P::value_type(1)};
    for (unsigned i = 0; i < e; ++i) r = poly_mul(r, a);
    return r;
}

template <class P>
P derivative(const P& a) {
    P r;
    for (std::size_t i = 1; i < a.size(); ++i) r.push_back(a[i] * static_cast<long>(i));
    strip_zeros(r);
    return r;
}

/// a(c T)
template <class P, class S>
P substitute_scale(const P& a, const S& c) {
    P r(a.size());
    S pw = 1;
    for (std::size_t i = 0; i < a.size(); ++i, pw *= c) r[i] = a[i] * pw;
    strip_zeros(r);
    return r;
}

inline QPoly to_q(const ZPoly& a) {
    QPoly r(a.begin(), a.end());
    strip_zeros(r);
    return r;
}

/// Quotient and remainder over Q.
inline std::pair<QPoly, QPoly> divmod(QPoly a, QPoly b) {
    strip_zeros(a);
    strip_zeros(b);
    require(!b.empty(), ErrorKind::division_by_zero, "polynomial division by zero");
    if (a.size() < b.size()) return {{}, a};
    QPoly q(a.size() - b.size() + 1);
    const Rational lb = b.back();
    while (!a.empty() && a.size() >= b.size()) {
        const std::size_t shift = a.size() - b.size();
        const Rational c = a.back() / lb;
        q[shift] = c;
        for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] -= c * b[i];
        a.pop_back();
        strip_zeros(a);
    }
    strip_zeros(q);
    return {q, a};
}

inline Int content(const ZPoly& a) {
    Int g = 0;
    for (const auto& c : a) g = gcd(g, c);
    return g;
}

/// Integer multiple of a rational polynomial with coprime integer coefficients.
inline ZPoly primitive_part(const QPoly& a) {
    Int l = 1;
    for (const auto& c : a) l = lcm(l, denom(c));
    ZPoly r;
    for (const auto& c : a) r.push_back(numer(c * l));
    strip_zeros(r);
    const Int g = content(r);
    if (g > 1)
        for (auto& c : r) c /= g;
    return r;
}

inline ZPoly primitive_part(const ZPoly& a) {
    ZPoly r = trimmed(a);
    const Int g = content(r);
    if (g > 1)
        for (auto& c : r) c /= g;
    return r;
}

/// Exact quotient a / b over Z, if b divides a.
inline std::optional<ZPoly> exact_divide(const ZPoly& a, const ZPoly& b) {
    ZPoly r = trimmed(a);
    const ZPoly d = trimmed(b);
    require(!d.empty(), ErrorKind::division_by_zero, "polynomial division by zero");
    if (r.empty()) return ZPoly{};
    if (r.size() < d.size()) return std::nullopt;
    ZPoly q(r.size() - d.size() + 1);
    const Int& ld = d.back();
    while (!r.empty() && r.size() >= d.size()) {
        const std::size_t shift = r.size() - d.size();
        if (r.back() % ld != 0) return std::nullopt;
        const Int c = r.back() / ld;
        q[shift] = c;
        for (std::size_t i = 0; i < d.size(); ++i) r[shift + i] -= c * d[i];
        r.pop_back();
        strip_zeros(r);
    }
    if (!r.empty()) return std::nullopt;
    strip_zeros(q);
    return q;
}

/// Monic gcd over Q.
inline QPoly gcd_q(QPoly a, QPoly b) {
    strip_zeros(a);
    strip_zeros(b);
    while (!b.empty()) {
        QPoly r = divmod(a, b).second;
        a = std::move(b);
        b = std::move(r);
    }
    if (!a.empty()) {
        const Rational l = a.back();
        for (auto& c : a) c /= l;
    }
    return a;
}

template <class P>
typename P::value_type evaluate(const P& a, const typename P::value_type& x) {
    typename P::value_type acc = 0;
    for (std::size_t i = a.size(); i-- > 0;) acc = acc * x + a[i];
    return acc;
}

/// x^{deg} a(1/x)
template <class P>
P reversed(P a) {
    strip_zeros(a);
    std::reverse(a.begin(), a.end());
    strip_zeros(a);
    return a;
}

/// "1 - 3*T + 5*T^2" style rendering.
template <class P>
std::string poly_string(const P& a, const std::string& var = "T") {
    std::ostringstream os;
    bool first = true;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        auto c = a[i];
        const bool negative = c < 0;
        if (negative) c = -c;
        if (first) os << (negative ? "-" : "");
        else os << (negative ? " - " : " + ");
        first = false;
        const std::string cs = to_string(c);
        if (i == 0) os << cs;
        else {
            if (cs != "1") os << cs << "*";
            os << var;
            if (i > 1) os << "^" << i;
        }
    }
    if (first) os << "0";
    return os.str();
}

} // namespace picardkit
