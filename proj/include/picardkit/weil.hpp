#pragma once

// Weight classification of zeta factors and the Tate-class bound dim V_mu.
//
// Roots are approximated with Aberth iteration at a fixed binary precision,
// rounded to exact rationals, and enclosed in inclusion disks
//   D(z_i, k |f(z_i)| / prod_{j != i} |z_i - z_j|)
// whose union contains every root. A disk that meets exactly one circle
// |z| = q^{w/2} pins the weight of the roots inside it; all comparisons are
// exact squared inequalities over Q. Precision doubles from 64 bits up to the
// configured cap.

#include "errors.hpp"
#include "zeta.hpp"
#include "zfactor.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <map>
#include <mutex>
#include <optional>
#include <vector>

namespace picardkit {

struct WeilFactor {
    unsigned weight = 0;
    ZPoly poly{1};
};

struct WeightedPiece {
    ZPoly factor;          // irreducible over Q, constant term 1
    unsigned multiplicity = 1;
    unsigned weight = 0;
    bool in_numerator = false;
};

struct WeightClassification {
    std::vector<WeilFactor> P;          // P[i] for i = 0..2d
    std::vector<WeightedPiece> pieces;
};

struct CyclotomicPart {
    unsigned m = 0;
    unsigned multiplicity = 0;
};

struct CyclotomicCount {
    unsigned total = 0;                 // sum of multiplicity * phi(m)
    std::vector<CyclotomicPart> parts;
};

struct TateFactor {
    ZPoly factor;
    unsigned multiplicity = 1;
    CyclotomicCount cyclotomic;
};

struct TateBound {
    unsigned p = 0;
    unsigned vMu = 0;
    std::vector<TateFactor> perFactor;
};

namespace detail {

struct QComplex {
    Rational re, im;
};

inline QComplex qc_mul(const QComplex& a, const QComplex& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

inline Rational qc_norm2(const QComplex& a) { return a.re * a.re + a.im * a.im; }

template <unsigned Bits>
using BinFloat = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<Bits, boost::multiprecision::digit_base_2>,
                                               boost::multiprecision::et_off>;

template <class F>
Rational exact_rational(const F& x) {
    if (x == 0) return 0;
    int e = 0;
    const F m = frexp(x, &e);
    constexpr int shift = std::numeric_limits<F>::digits + 2;
    const boost::multiprecision::cpp_int ci = static_cast<boost::multiprecision::cpp_int>(ldexp(m, shift));
    Rational r(static_cast<Int>(ci));
    const int ex = e - shift;
    if (ex >= 0) r *= Rational(Int(1) << ex);
    else r /= Rational(Int(1) << (-ex));
    return r;
}

/// Approximate roots of a monic integer polynomial.
template <unsigned Bits>
std::vector<QComplex> aberth_roots(const ZPoly& g) {
    using F = BinFloat<Bits>;
    struct C {
        F re, im;
    };
    auto add = [](const C& a, const C& b) { return C{a.re + b.re, a.im + b.im}; };
    auto sub = [](const C& a, const C& b) { return C{a.re - b.re, a.im - b.im}; };
    auto mul = [](const C& a, const C& b) { return C{a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re}; };
    auto div = [](const C& a, const C& b) {
        const F d = b.re * b.re + b.im * b.im;
        return C{(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
    };
    auto absv = [](const C& a) { return sqrt(a.re * a.re + a.im * a.im); };

    const std::size_t k = g.size() - 1;
    std::vector<F> c(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) c[i] = F(g[i].str());
    auto eval = [&](const C& z, C& val, C& der) {
        val = C{c[k], 0};
        der = C{0, 0};
        for (std::size_t i = k; i-- > 0;) {
            der = add(mul(der, z), val);
            val = add(mul(val, z), C{c[i], 0});
        }
    };
    F r0 = (c[0] == 0) ? F(1) : pow(abs(c[0]), F(1) / F(static_cast<unsigned>(k)));
    const F pi = boost::math::constants::pi<F>();
    std::vector<C> z(k);
    for (std::size_t j = 0; j < k; ++j) {
        const F ang = 2 * pi * F(static_cast<unsigned>(j)) / F(static_cast<unsigned>(k)) + F(0.4);
        z[j] = C{r0 * cos(ang), r0 * sin(ang)};
    }
    const F eps = ldexp(F(1), -static_cast<int>(Bits) + 12);
    for (int iter = 0; iter < 4000; ++iter) {
        F worst = 0;
        for (std::size_t i = 0; i < k; ++i) {
            C val, der;
            eval(z[i], val, der);
            if (val.re == 0 && val.im == 0) continue;
            const C ratio = div(val, der);
            C sum{0, 0};
            for (std::size_t j = 0; j < k; ++j)
                if (j != i) sum = add(sum, div(C{1, 0}, sub(z[i], z[j])));
            const C w = div(ratio, sub(C{1, 0}, mul(ratio, sum)));
            z[i] = sub(z[i], w);
            worst = std::max(worst, absv(w) / (1 + absv(z[i])));
        }
        if (worst < eps) break;
    }
    std::vector<QComplex> out;
    for (const auto& zi : z) out.push_back({exact_rational(zi.re), exact_rational(zi.im)});
    return out;
}

/// Does the disk |z - c| <= r meet the circle |z|^2 = R2? (c2 = |c|^2, r2 = r^2)
inline bool disk_meets_circle(const Rational& c2, const Rational& r2, const Rational& R2) {
    // |c| <= R + r  <=>  c2 - R2 - r2 <= 2 R r
    const Rational up = c2 - R2 - r2;
    const bool below = up <= 0 || up * up <= 4 * R2 * r2;
    // |c| >= R - r
    bool above = true;
    if (R2 > r2) {
        const Rational lo = R2 + r2 - c2;
        above = lo <= 0 || lo * lo <= 4 * R2 * r2;
    }
    return below && above;
}

/// Certified weights of the roots of monic g at one precision; nullopt if undecided.
template <unsigned Bits>
std::optional<std::vector<unsigned>> certify_weights(const ZPoly& g, std::uint64_t q, unsigned wmax) {
    const auto z = aberth_roots<Bits>(g);
    const std::size_t k = z.size();
    std::vector<unsigned> out;
    for (std::size_t i = 0; i < k; ++i) {
        QComplex val{0, 0};
        for (std::size_t t = g.size(); t-- > 0;) {
            val = qc_mul(val, z[i]);
            val.re += Rational(g[t]);
        }
        Rational denom = 1;
        for (std::size_t j = 0; j < k; ++j)
            if (j != i) denom *= qc_norm2({z[i].re - z[j].re, z[i].im - z[j].im});
        if (denom == 0) return std::nullopt;
        const Rational r2 = Rational(Int(k * k)) * qc_norm2(val) / denom;
        const Rational c2 = qc_norm2(z[i]);
        std::vector<unsigned> hits;
        for (unsigned w = 0; w <= wmax; ++w)
            if (disk_meets_circle(c2, r2, Rational(ipow(Int(q), w)))) hits.push_back(w);
        if (hits.empty())
            fail(ErrorKind::unclassifiable, "a root of " + poly_string(g, "x") + " lies on no circle |z| = q^{w/2}");
        if (hits.size() > 1) return std::nullopt;
        out.push_back(hits[0]);
    }
    return out;
}

} // namespace detail

/// Weight w with every reciprocal root of f of modulus q^{w/2}.
inline unsigned certified_weight(const ZPoly& f, std::uint64_t q, unsigned wmax, unsigned max_bits = 1024) {
    require(!f.empty() && f[0] == 1, ErrorKind::invalid_input, "weight classification needs constant term 1");
    if (degree(f) == 0) return 0;
    const ZPoly g = reversed(f);   // monic; its roots are the reciprocal roots of f
    std::optional<std::vector<unsigned>> ws;
    for (unsigned bits = 64; bits <= max_bits && !ws; bits *= 2) {
        switch (bits) {
        case 64: ws = detail::certify_weights<64>(g, q, wmax); break;
        case 128: ws = detail::certify_weights<128>(g, q, wmax); break;
        case 256: ws = detail::certify_weights<256>(g, q, wmax); break;
        case 512: ws = detail::certify_weights<512>(g, q, wmax); break;
        case 1024: ws = detail::certify_weights<1024>(g, q, wmax); break;
        case 2048: ws = detail::certify_weights<2048>(g, q, wmax); break;
        default: break;
        }
    }
    if (!ws)
        fail(ErrorKind::unclassifiable,
             "weights of " + poly_string(f) + " undecided at " + std::to_string(max_bits) + " bits");
    for (unsigned w : *ws)
        if (w != ws->front())
            fail(ErrorKind::unclassifiable, "roots of irreducible factor " + poly_string(f) + " have different weights");
    return ws->front();
}

inline WeightClassification classify_weights(const ZetaFunction& Z, unsigned max_bits = 1024) {
    const unsigned wmax = 2 * Z.dim;
    WeightClassification C;
    C.P.resize(wmax + 1);
    for (unsigned i = 0; i <= wmax; ++i) C.P[i].weight = i;
    auto place = [&](const ZPoly& poly, bool numerator) {
        const auto fac = factor_z_poly(poly);
        for (const auto& [f, m] : fac.factors) {
            const unsigned w = certified_weight(f, Z.q, wmax, max_bits);
            if ((w % 2 == 1) != numerator)
                fail(ErrorKind::unclassifiable, "factor " + poly_string(f) + " of weight " + std::to_string(w) + " sits in the " +
                                                    (numerator ? "numerator" : "denominator"));
            C.P[w].poly = poly_mul(C.P[w].poly, poly_pow(f, m));
            C.pieces.push_back({f, m, w, numerator});
        }
    };
    place(Z.num, true);
    place(Z.den, false);
    return C;
}

inline std::vector<unsigned> betti_numbers(const WeightClassification& C) {
    std::vector<unsigned> b;
    for (const auto& P : C.P) b.push_back(static_cast<unsigned>(degree(P.poly)));
    return b;
}

inline std::vector<unsigned> betti_numbers(const ZetaFunction& Z, unsigned max_bits = 1024) {
    return betti_numbers(classify_weights(Z, max_bits));
}

inline unsigned euler_phi(unsigned m) {
    unsigned r = m;
    for (unsigned p = 2; p * p <= m; ++p)
        if (m % p == 0) {
            while (m % p == 0) m /= p;
            r -= r / p;
        }
    if (m > 1) r -= r / m;
    return r;
}

/// Phi_m(T), low-to-high.
inline ZPoly cyclotomic_poly(unsigned m) {
    static std::map<unsigned, ZPoly> memo;
    static std::mutex mu;
    {
        std::lock_guard<std::mutex> lock(mu);
        if (auto it = memo.find(m); it != memo.end()) return it->second;
    }
    ZPoly r(m + 1, 0);
    r[0] = -1;
    r[m] = 1;
    for (unsigned d = 1; d < m; ++d)
        if (m % d == 0) r = *exact_divide(r, cyclotomic_poly(d));
    std::lock_guard<std::mutex> lock(mu);
    memo[m] = r;
    return r;
}

inline CyclotomicCount cyclotomic_multiplicity(const ZPoly& P) {
    ZPoly f = trimmed(P);
    require(!f.empty(), ErrorKind::invalid_input, "cyclotomic multiplicity of the zero polynomial");
    CyclotomicCount out;
    const unsigned n = static_cast<unsigned>(degree(f));
    // phi(m) >= sqrt(m / 2), so phi(m) <= n forces m <= 2 n^2.
    const unsigned mmax = std::max(2u, 2 * n * n);
    for (unsigned m = 1; m <= mmax && degree(f) > 0; ++m) {
        const unsigned ph = euler_phi(m);
        if (ph > static_cast<unsigned>(degree(f))) continue;
        const ZPoly cm = cyclotomic_poly(m);
        unsigned mult = 0;
        while (degree(f) >= static_cast<long>(ph)) {
            auto q = exact_divide(f, cm);
            if (!q) break;
            f = std::move(*q);
            ++mult;
        }
        if (mult) {
            out.parts.push_back({m, mult});
            out.total += mult * ph;
        }
    }
    return out;
}

inline CyclotomicCount cyclotomic_multiplicity(const QPoly& P) { return cyclotomic_multiplicity(primitive_part(P)); }

/// Integer multiple of f(T / q^p).
inline ZPoly untwist(const ZPoly& f, std::uint64_t q, unsigned p) {
    const long d = degree(f);
    const Int qp = ipow(Int(q), p);
    ZPoly r(static_cast<std::size_t>(d + 1));
    for (long i = 0; i <= d; ++i) r[static_cast<std::size_t>(i)] = f[static_cast<std::size_t>(i)] * ipow(qp, static_cast<unsigned>(d - i));
    return r;
}

inline TateBound dim_v_mu(const WeightClassification& C, std::uint64_t q, unsigned dim, unsigned p) {
    require(p <= dim, ErrorKind::invalid_input, "codimension exceeds the dimension");
    TateBound T;
    T.p = p;
    for (const auto& piece : C.pieces) {
        if (piece.weight != 2 * p || piece.in_numerator) continue;
        TateFactor tf{piece.factor, piece.multiplicity, cyclotomic_multiplicity(untwist(piece.factor, q, p))};
        T.vMu += tf.cyclotomic.total * piece.multiplicity;
        T.perFactor.push_back(std::move(tf));
    }
    return T;
}

inline TateBound dim_v_mu(const ZetaFunction& Z, unsigned p, unsigned max_bits = 1024) {
    return dim_v_mu(classify_weights(Z, max_bits), Z.q, Z.dim, p);
}

inline unsigned picard_upper_bound(const ZetaFunction& Z, unsigned max_bits = 1024) {
    require(Z.dim >= 1, ErrorKind::invalid_input, "Picard bound needs positive dimension");
    return dim_v_mu(Z, 1, max_bits).vMu;
}

// ---------------------------------------------------------------------------
// Surfaces with b1 = b3 = 0: Z = 1 / ((1 - T) P2(T) (1 - q^2 T)).

struct SurfaceReconstruction {
    std::vector<ZetaFunction> candidates;   // one unless the sign is ambiguous
    std::vector<int> signs;
    bool ambiguous() const { return candidates.size() > 1; }
};

inline SurfaceReconstruction reconstruct_surface(const CountSeries& counts, unsigned b2, unsigned max_bits = 1024) {
    const std::uint64_t q = counts.q;
    const unsigned m = static_cast<unsigned>(counts.counts.size());
    require(2 * m >= b2, ErrorKind::invalid_input,
            "b2 = " + std::to_string(b2) + " needs at least " + std::to_string((b2 + 1) / 2) + " counts");
    // Power sums of the reciprocal roots of P2, then Newton's identities.
    const Int Q(q);
    std::vector<Int> s(m + 1, 0);
    for (unsigned n = 1; n <= m; ++n) s[n] = counts.counts[n - 1] - 1 - ipow(Q * Q, n);
    const unsigned known = std::min(m, b2);
    std::vector<Int> c(known + 1, 0);
    c[0] = 1;
    for (unsigned n = 1; n <= known; ++n) {
        Int v = -s[n];
        for (unsigned k = 1; k < n; ++k) v -= c[k] * s[n - k];
        require(v % n == 0, ErrorKind::non_integer, "counts give a non-integral coefficient of P2");
        c[n] = v / n;
    }
    SurfaceReconstruction out;
    for (int eps : {1, -1}) {
        // c_{b-k} = eps q^{b-2k} c_k
        ZPoly P(b2 + 1, 0);
        std::vector<bool> set(b2 + 1, false);
        for (unsigned k = 0; k <= known; ++k) {
            P[k] = c[k];
            set[k] = true;
        }
        bool ok = true;
        for (unsigned k = 0; k <= b2 && ok; ++k) {
            const unsigned j = b2 - k;
            if (!set[k]) continue;
            // value forced at j by the functional equation (q^{b-2k} may be fractional)
            const long e = static_cast<long>(b2) - 2 * static_cast<long>(k);
            Rational forced = Rational(P[k]) * eps;
            if (e >= 0) forced *= Rational(ipow(Q, static_cast<unsigned>(e)));
            else forced /= Rational(ipow(Q, static_cast<unsigned>(-e)));
            if (set[j]) {
                ok = Rational(P[j]) == forced;
            } else {
                if (!is_integer(forced)) ok = false;
                else {
                    P[j] = numer(forced);
                    set[j] = true;
                }
            }
        }
        if (!ok) continue;
        ZetaFunction Z;
        Z.q = q;
        Z.dim = 2;
        Z.num = {1};
        Z.den = poly_mul(poly_mul(ZPoly{1, -1}, trimmed(P)), ZPoly{1, -(Q * Q)});
        if (expand(Z, m).counts != counts.counts) continue;
        bool moduli_ok = true;
        if (b2 > 0) {
            try {
                for (const auto& [f, mult] : factor_z_poly(trimmed(P)).factors)
                    if (certified_weight(f, q, 4, max_bits) != 2) moduli_ok = false;
            } catch (const Error& err) {
                if (err.kind() != ErrorKind::unclassifiable) throw;
                moduli_ok = false;
            }
        }
        if (!moduli_ok) continue;
        if (b2 == 0 && !out.candidates.empty()) continue;   // both signs give P2 = 1
        out.candidates.push_back(Z);
        out.signs.push_back(eps);
    }
    require(!out.candidates.empty(), ErrorKind::no_solution, "no functional-equation sign is consistent with the counts");
    return out;
}

} // namespace picardkit
