#pragma once

// Zeta functions as exact rational functions in T.
//
// Conventions: Z(T) = num(T) / den(T), both with constant term 1.
// chi = deg den - deg num, the alternating sum of the Betti numbers.

#include "counting.hpp"
#include "errors.hpp"
#include "zpoly.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace picardkit {

struct ZetaFunction {
    std::uint64_t q = 0;
    unsigned dim = 0;
    ZPoly num{1};
    ZPoly den{1};

    long chi() const { return degree(den) - degree(num); }
    bool operator==(const ZetaFunction&) const = default;
};

enum class BudgetSource { user_config, hypersurface_formula };

struct DegreeBudget {
    unsigned B = 0;
    BudgetSource source = BudgetSource::user_config;
};

/// What betti_budget needs to know about a variety.
struct VarietyDescriptor {
    std::optional<unsigned> user_budget;
    std::optional<unsigned> hypersurface_degree;
    unsigned dim = 0;   // dimension of X (the hypersurface lives in P^{dim+1})
};

/// Betti numbers b_0..b_{2n} of a smooth degree-D hypersurface of dimension n.
inline std::vector<Int> hypersurface_betti(unsigned D, unsigned n) {
    require(D >= 1, ErrorKind::invalid_input, "hypersurface degree must be positive");
    // primitive middle cohomology: ((D-1)^{n+2} + (-1)^n (D-1)) / D
    const Int dm1 = D - 1;
    Int prim = ipow(dm1, n + 2) + ((n % 2) ? -dm1 : dm1);
    prim /= D;
    std::vector<Int> b(2 * n + 1, 0);
    for (unsigned i = 0; i <= 2 * n; i += 2) b[i] = 1;
    b[n] += prim;
    return b;
}

inline DegreeBudget betti_budget(const VarietyDescriptor& v) {
    if (v.user_budget) {
        require(*v.user_budget >= 2, ErrorKind::invalid_input, "degree budget must be at least 2");
        return {*v.user_budget, BudgetSource::user_config};
    }
    if (v.hypersurface_degree) {
        Int total = 0;
        for (const auto& b : hypersurface_betti(*v.hypersurface_degree, v.dim)) total += b;
        return {static_cast<unsigned>(total), BudgetSource::hypersurface_formula};
    }
    fail(ErrorKind::missing_budget, "no degree budget: supply one or declare a smooth hypersurface degree");
}

namespace detail {

/// Power sums of the reciprocal roots: coefficients of -T P'(T) / P(T), n = 1..n_max.
inline std::vector<Int> reciprocal_power_sums(const ZPoly& P, unsigned n_max) {
    require(!P.empty() && P[0] == 1, ErrorKind::invalid_input, "polynomial must have constant term 1");
    std::vector<Int> s(n_max + 1, 0);
    auto c = [&](std::size_t k) { return k < P.size() ? P[k] : Int(0); };
    for (unsigned n = 1; n <= n_max; ++n) {
        Int v = -Int(n) * c(n);
        for (unsigned k = 1; k < n; ++k) v -= c(k) * s[n - k];
        s[n] = v;
    }
    return s;
}

/// Coefficients of exp(sum N_n T^n / n) up to T^order.
inline QPoly exp_series(const std::vector<Int>& N, unsigned order) {
    QPoly s(order + 1, 0);
    s[0] = 1;
    for (unsigned n = 1; n <= order; ++n) {
        Rational acc = 0;
        for (unsigned k = 1; k <= n; ++k) acc += Rational(N[k - 1]) * s[n - k];
        s[n] = acc / n;
    }
    return s;
}

/// Solve A x = b exactly; nullopt if inconsistent. Free variables are set to 0.
inline std::optional<std::vector<Rational>> solve_linear(std::vector<std::vector<Rational>> A, std::vector<Rational> b) {
    const std::size_t rows = A.size(), cols = rows ? A[0].size() : 0;
    std::vector<std::size_t> pivcol;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t piv = r;
        while (piv < rows && A[piv][c] == 0) ++piv;
        if (piv == rows) continue;
        std::swap(A[piv], A[r]);
        std::swap(b[piv], b[r]);
        const Rational inv = 1 / A[r][c];
        for (std::size_t j = c; j < cols; ++j) A[r][j] *= inv;
        b[r] *= inv;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || A[i][c] == 0) continue;
            const Rational f = A[i][c];
            for (std::size_t j = c; j < cols; ++j) A[i][j] -= f * A[r][j];
            b[i] -= f * b[r];
        }
        pivcol.push_back(c);
        ++r;
    }
    for (std::size_t i = r; i < rows; ++i)
        if (b[i] != 0) return std::nullopt;
    std::vector<Rational> x(cols, 0);
    for (std::size_t i = 0; i < r; ++i) x[pivcol[i]] = b[i];
    return x;
}

inline ZPoly integral_or_throw(const QPoly& p, const char* what) {
    ZPoly r;
    for (const auto& c : p) {
        require(is_integer(c), ErrorKind::non_integer,
                std::string(what) + " has non-integer coefficient " + c.str() + " (corrupted counts?)");
        r.push_back(numer(c));
    }
    strip_zeros(r);
    return r;
}

} // namespace detail

/// N_n for n = 1..n_max.
inline CountSeries expand(const ZetaFunction& Z, unsigned n_max) {
    const auto sd = detail::reciprocal_power_sums(Z.den, n_max);
    const auto sn = detail::reciprocal_power_sums(Z.num, n_max);
    CountSeries s;
    s.q = Z.q;
    for (unsigned n = 1; n <= n_max; ++n) s.counts.push_back(sd[n] - sn[n]);
    return s;
}

/// Reduced rational function with deg num + deg den <= B matching the counts.
inline ZetaFunction reconstruct(const CountSeries& counts, const DegreeBudget& budget, unsigned dim = 0) {
    const unsigned B = budget.B;
    require(B >= 1, ErrorKind::invalid_input, "degree budget must be positive");
    require(counts.counts.size() >= 2 * B, ErrorKind::invalid_input,
            "reconstruction with B = " + std::to_string(B) + " needs " + std::to_string(2 * B) + " counts, got " +
                std::to_string(counts.counts.size()));
    const unsigned order = 2 * B;
    const QPoly S = detail::exp_series(counts.counts, order);
    for (unsigned b = 0; b <= B; ++b) {
        const unsigned a = B - b;
        // unknowns d_1..d_b of den; coefficients a+1..2B of S*den vanish
        std::vector<std::vector<Rational>> A;
        std::vector<Rational> rhs;
        for (unsigned k = a + 1; k <= order; ++k) {
            std::vector<Rational> row(b);
            for (unsigned i = 1; i <= b; ++i) row[i - 1] = (k >= i) ? S[k - i] : Rational(0);
            A.push_back(std::move(row));
            rhs.push_back(-S[k]);
        }
        std::optional<std::vector<Rational>> sol;
        if (b == 0) {
            bool ok = true;
            for (const auto& v : rhs) ok = ok && v == 0;
            if (ok) sol = std::vector<Rational>{};
        } else {
            sol = detail::solve_linear(A, rhs);
        }
        if (!sol) continue;
        QPoly den(b + 1);
        den[0] = 1;
        for (unsigned i = 1; i <= b; ++i) den[i] = (*sol)[i - 1];
        QPoly num(a + 1, 0);
        for (unsigned k = 0; k <= a; ++k)
            for (unsigned i = 0; i <= std::min(k, b); ++i) num[k] += den[i] * S[k - i];
        strip_zeros(den);
        strip_zeros(num);
        // Reduce and normalize constant terms to 1.
        const QPoly g = gcd_q(num, den);
        num = divmod(num, g).first;
        den = divmod(den, g).first;
        const Rational n0 = num[0], d0 = den[0];
        for (auto& c : num) c /= n0;
        for (auto& c : den) c /= d0;
        ZetaFunction Z;
        Z.q = counts.q;
        Z.dim = dim;
        Z.num = detail::integral_or_throw(num, "reconstructed numerator");
        Z.den = detail::integral_or_throw(den, "reconstructed denominator");
        const auto back = expand(Z, static_cast<unsigned>(counts.counts.size()));
        require(back.counts == counts.counts, ErrorKind::no_solution,
                "reconstructed zeta function does not reproduce the supplied counts");
        return Z;
    }
    fail(ErrorKind::no_solution,
         "no rational function of degree <= " + std::to_string(B) + " matches the counts (budget too small?)");
}

struct FunctionalEquation {
    bool holds = false;
    int sign = 0;
};

/// Tests Z(1/(q^d T)) = sign * q^{d chi/2} T^chi Z(T).
inline FunctionalEquation functional_equation_check(const ZetaFunction& Z) {
    const Int qd = ipow(Int(Z.q), Z.dim);
    // q^{d deg P} T^{deg P} P(1/(q^d T)), an integer polynomial
    auto twist = [&](const ZPoly& P) {
        const long deg = degree(P);
        ZPoly r(static_cast<std::size_t>(deg + 1));
        for (long k = 0; k <= deg; ++k)
            r[static_cast<std::size_t>(deg - k)] = P[static_cast<std::size_t>(k)] * ipow(qd, static_cast<unsigned>(deg - k));
        return r;
    };
    const long dn = degree(Z.num), dd = degree(Z.den);
    // Identity after clearing: twist(num) * den * q^{d dd} = c' * num * twist(den) * q^{d dn}
    const ZPoly lhs = poly_mul(twist(Z.num), Z.den);
    const ZPoly rhs = poly_mul(Z.num, twist(Z.den));
    if (lhs.size() != rhs.size() || lhs.empty()) return {};
    std::size_t k = 0;
    while (rhs[k] == 0) ++k;
    const Rational c(lhs[k], rhs[k]);
    for (std::size_t i = 0; i < lhs.size(); ++i)
        if (Rational(lhs[i]) != c * rhs[i]) return {};
    // c = sign * q^{d chi / 2} * q^{d (dn - dd)}; compare squares.
    const long e2 = static_cast<long>(Z.dim) * (dd - dn) + 2 * static_cast<long>(Z.dim) * (dn - dd);
    Rational expected = 1;
    const Rational qr(Int(Z.q));
    for (long i = 0; i < std::abs(e2); ++i) {
        if (e2 > 0) expected *= qr;
        else expected /= qr;
    }
    if (c * c != expected) return {};
    return {true, c > 0 ? 1 : -1};
}

inline nlohmann::json to_json(const ZetaFunction& Z) {
    auto arr = [](const ZPoly& p) {
        nlohmann::json a = nlohmann::json::array();
        for (const auto& c : p) a.push_back(c.str());
        return a;
    };
    return {{"q", Z.q}, {"dim", Z.dim}, {"num", arr(Z.num)}, {"den", arr(Z.den)}};
}

inline ZetaFunction zeta_from_json(const nlohmann::json& j) {
    ZetaFunction Z;
    Z.q = j.at("q").get<std::uint64_t>();
    Z.dim = j.at("dim").get<unsigned>();
    auto read = [](const nlohmann::json& a) {
        ZPoly p;
        for (const auto& c : a) p.push_back(c.is_string() ? Int(c.get<std::string>()) : Int(c.get<long long>()));
        strip_zeros(p);
        return p;
    };
    Z.num = read(j.at("num"));
    Z.den = read(j.at("den"));
    require(!Z.num.empty() && Z.num[0] == 1 && !Z.den.empty() && Z.den[0] == 1, ErrorKind::invalid_input,
            "zeta numerator and denominator need constant term 1");
    return Z;
}

} // namespace picardkit
