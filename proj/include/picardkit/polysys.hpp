#pragma once

// Hilbert polynomials, dimension and degree of projective schemes, proper
// intersection numbers and the Jacobian smoothness test.
//
// Limitation: dimension checks look at the whole ideal only. An ideal that is
// not equidimensional (embedded or lower-dimensional components) is reported by
// its top dimension; no associated primes are computed.

#include "groebner.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace picardkit {

/// Polynomial in t with rational coefficients, low-to-high.
struct HilbertPoly {
    std::vector<Rational> coeffs;

    int degree() const { return static_cast<int>(coeffs.size()) - 1; }
    bool is_zero() const { return coeffs.empty(); }

    Rational operator()(const Rational& t) const {
        Rational acc = 0;
        for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * t + coeffs[i];
        return acc;
    }

    bool operator==(const HilbertPoly&) const = default;
};

namespace detail {

using IntPolyT = std::vector<Int>;   // polynomial in t, low-to-high

inline IntPolyT tpoly_mul(const IntPolyT& a, const IntPolyT& b) {
    if (a.empty() || b.empty()) return {};
    IntPolyT r(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

inline IntPolyT tpoly_add(IntPolyT a, const IntPolyT& b, const Int& scale = 1, std::size_t shift = 0) {
    if (a.size() < b.size() + shift) a.resize(b.size() + shift, 0);
    for (std::size_t i = 0; i < b.size(); ++i) a[i + shift] += scale * b[i];
    while (!a.empty() && a.back() == 0) a.pop_back();
    return a;
}

inline std::vector<Monomial> minimalize(std::vector<Monomial> gens) {
    std::sort(gens.begin(), gens.end(), [](const Monomial& a, const Monomial& b) {
        if (a.degree() != b.degree()) return a.degree() < b.degree();
        return a < b;
    });
    std::vector<Monomial> out;
    for (const auto& m : gens) {
        bool dominated = false;
        for (const auto& o : out)
            if (o.divides(m)) {
                dominated = true;
                break;
            }
        if (!dominated) out.push_back(m);
    }
    return out;
}

/// Numerator K(t) of the Hilbert series K(t)/(1-t)^n of S/(gens), by the
/// pivot recursion K(I) = K(I + x_i) + t K(I : x_i).
inline IntPolyT monomial_numerator(std::vector<Monomial> gens) {
    gens = minimalize(std::move(gens));
    if (gens.empty()) return {1};
    const std::size_t n = gens[0].size();
    std::vector<unsigned> occurrences(n, 0);
    for (const auto& m : gens)
        for (std::size_t i = 0; i < n; ++i)
            if (m[i]) ++occurrences[i];
    std::size_t pivot = n;
    unsigned best = 1;
    for (std::size_t i = 0; i < n; ++i)
        if (occurrences[i] > best) {
            best = occurrences[i];
            pivot = i;
        }
    if (pivot == n) {
        // Pairwise coprime generators form a regular sequence.
        IntPolyT k{1};
        for (const auto& m : gens) {
            IntPolyT f(m.degree() + 1, 0);
            f[0] = 1;
            f[m.degree()] -= 1;
            k = tpoly_mul(k, f);
        }
        return k;
    }
    const Monomial xi = Monomial::var(n, pivot);
    std::vector<Monomial> plus{xi}, colon;
    for (const auto& m : gens) {
        if (!m[pivot]) plus.push_back(m);
        Monomial c = m;
        if (c[pivot]) c[pivot] = static_cast<std::uint16_t>(c[pivot] - 1);
        colon.push_back(c);
    }
    return tpoly_add(monomial_numerator(std::move(plus)), monomial_numerator(std::move(colon)), 1, 1);
}

/// C(t + s, m) as a polynomial in t (s may be negative).
inline std::vector<Rational> binomial_poly(long s, unsigned m) {
    std::vector<Rational> p{Rational(1)};
    for (unsigned i = 1; i <= m; ++i) {
        // multiply by (t + s - m + i) / i
        const Rational shift = Rational(s - static_cast<long>(m) + static_cast<long>(i));
        std::vector<Rational> r(p.size() + 1, Rational(0));
        for (std::size_t k = 0; k < p.size(); ++k) {
            r[k + 1] += p[k] / Rational(i);
            r[k] += p[k] * shift / Rational(i);
        }
        p = std::move(r);
    }
    return p;
}

} // namespace detail

template <class F>
std::vector<Monomial> initial_monomials(const HomIdeal<F>& I) {
    std::vector<Monomial> lead;
    for (const auto& g : groebner(I)) lead.push_back(leading_monomial(g, I.order));
    return lead;
}

/// Hilbert series numerator K(t) with HS(S/I) = K(t)/(1-t)^{nvars}.
template <class F>
std::vector<Int> hilbert_numerator(const HomIdeal<F>& I) {
    auto lead = initial_monomials(I);
    if (lead.empty()) return {1};
    return detail::monomial_numerator(std::move(lead));
}

/// Hilbert polynomial of Proj(S/I), through the initial ideal.
template <class F>
HilbertPoly hilbert_polynomial(const HomIdeal<F>& I) {
    const auto K = hilbert_numerator(I);
    const unsigned m = static_cast<unsigned>(I.nvars) - 1;
    std::vector<Rational> acc(m + 1, Rational(0));
    for (std::size_t k = 0; k < K.size(); ++k) {
        if (K[k] == 0) continue;
        // dim (S/I)_d = sum_k K_k C(d - k + m, m) for d >= deg K.
        const auto b = detail::binomial_poly(static_cast<long>(m) - static_cast<long>(k), m);
        for (std::size_t i = 0; i < b.size(); ++i) acc[i] += Rational(K[k]) * b[i];
    }
    while (!acc.empty() && acc.back() == 0) acc.pop_back();
    return HilbertPoly{acc};
}

/// Degree at and beyond which the Hilbert function equals the polynomial.
template <class F>
unsigned hilbert_regularity_bound(const HomIdeal<F>& I) {
    const auto K = hilbert_numerator(I);
    return K.empty() ? 0u : static_cast<unsigned>(K.size() - 1);
}

/// dim_k (S/I)_d: count standard monomials of degree d.
template <class F>
Int hilbert_function(const HomIdeal<F>& I, unsigned d) {
    const auto lead = initial_monomials(I);
    const std::size_t n = I.nvars;
    Int count = 0;
    Monomial m(n);
    // enumerate exponent vectors of total degree d
    std::function<void(std::size_t, unsigned)> rec = [&](std::size_t i, unsigned left) {
        if (i + 1 == n) {
            m[i] = static_cast<std::uint16_t>(left);
            for (const auto& l : lead)
                if (l.divides(m)) return;
            ++count;
            return;
        }
        for (unsigned k = 0; k <= left; ++k) {
            m[i] = static_cast<std::uint16_t>(k);
            rec(i + 1, left - k);
        }
    };
    if (n > 0) rec(0, d);
    return count;
}

struct DimensionDegree {
    int dimension = -1;                  // -1 for the empty scheme
    std::optional<Int> degree;           // undefined for the empty scheme
};

template <class F>
DimensionDegree dimension_degree(const HomIdeal<F>& I) {
    const HilbertPoly h = hilbert_polynomial(I);
    DimensionDegree out;
    if (h.is_zero()) return out;
    out.dimension = h.degree();
    Rational lead = h.coeffs.back();
    for (int i = 2; i <= out.dimension; ++i) lead *= i;
    require(is_integer(lead), ErrorKind::inconsistent, "non-integral degree");
    out.degree = numer(lead);
    return out;
}

/// Degree of the zero-dimensional scheme Z ∩ Y on X.
template <class F>
Int proper_intersection_number(const HomIdeal<F>& X, const HomIdeal<F>& Z, const HomIdeal<F>& Y) {
    const int dx = dimension_degree(X).dimension;
    const int dz = dimension_degree(Z).dimension;
    const int dy = dimension_degree(Y).dimension;
    require(dz + dy == dx, ErrorKind::invalid_input,
            "cycle dimensions " + std::to_string(dz) + " + " + std::to_string(dy) + " do not add up to dim X = " + std::to_string(dx));
    HomIdeal<F> J = X + Z + Y;
    const auto dd = dimension_degree(J);
    if (dd.dimension < 0) return 0;
    if (dd.dimension > 0)
        fail(ErrorKind::improper_intersection,
             "cycles meet in dimension " + std::to_string(dd.dimension) + "; a moving-lemma search would be required");
    return *dd.degree;
}

namespace detail {

template <class F>
MultiPoly<F> poly_det(const std::vector<std::vector<MultiPoly<F>>>& M) {
    const std::size_t n = M.size();
    if (n == 1) return M[0][0];
    const auto& K = M[0][0].field();
    MultiPoly<F> acc(K, M[0][0].nvars());
    for (std::size_t c = 0; c < n; ++c) {
        if (M[0][c].is_zero()) continue;
        std::vector<std::vector<MultiPoly<F>>> sub;
        for (std::size_t r = 1; r < n; ++r) {
            std::vector<MultiPoly<F>> row;
            for (std::size_t k = 0; k < n; ++k)
                if (k != c) row.push_back(M[r][k]);
            sub.push_back(std::move(row));
        }
        MultiPoly<F> term = M[0][c] * poly_det(sub);
        acc = (c % 2 == 0) ? acc + term : acc - term;
    }
    return acc;
}

inline void for_each_subset(std::size_t n, std::size_t k, const std::function<void(const std::vector<std::size_t>&)>& fn) {
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    if (k > n) return;
    for (;;) {
        fn(idx);
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
        if (i == 0) return;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

} // namespace detail

/// Jacobian criterion: I plus the c x c minors of the Jacobian (c = codimension)
/// cuts out the empty projective scheme.
template <class F>
bool smoothness_check(const HomIdeal<F>& I) {
    const auto dd = dimension_degree(I);
    if (dd.dimension < 0) return true;
    const std::size_t c = I.nvars - 1 - static_cast<std::size_t>(dd.dimension);
    if (c == 0) return true;
    const auto& gens = I.generators;
    std::vector<std::vector<MultiPoly<F>>> jac;
    for (const auto& g : gens) {
        std::vector<MultiPoly<F>> row;
        for (std::size_t v = 0; v < I.nvars; ++v) row.push_back(g.derivative(v));
        jac.push_back(std::move(row));
    }
    HomIdeal<F> J(I.field, I.nvars, gens, I.order);
    detail::for_each_subset(gens.size(), c, [&](const std::vector<std::size_t>& rows) {
        detail::for_each_subset(I.nvars, c, [&](const std::vector<std::size_t>& cols) {
            std::vector<std::vector<MultiPoly<F>>> M;
            for (auto r : rows) {
                std::vector<MultiPoly<F>> row;
                for (auto cc : cols) row.push_back(jac[r][cc]);
                M.push_back(std::move(row));
            }
            MultiPoly<F> minor = detail::poly_det(M);
            if (minor.is_homogeneous()) J.add(std::move(minor));
        });
    });
    return dimension_degree(J).dimension < 0;
}

} // namespace picardkit
