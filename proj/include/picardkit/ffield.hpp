#pragma once

// Finite fields F_{p^e} in the power basis of a deterministically chosen
// irreducible modulus, plus embeddings F_q -> F_{q^n}.

#include "bigint.hpp"
#include "errors.hpp"

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

namespace picardkit {

/// A finite field F_{p^e}: prime, degree, and a monic irreducible modulus
/// stored low-to-high (modulus.size() == e + 1, modulus.back() == 1).
struct FieldDesc {
    std::uint32_t p = 2;
    unsigned e = 1;
    std::vector<std::uint32_t> modulus{0, 1};

    std::uint64_t size() const {
        std::uint64_t q = 1;
        for (unsigned i = 0; i < e; ++i) q *= p;
        return q;
    }

    bool operator==(const FieldDesc&) const = default;
};

/// Coordinates of an element in the power basis 1, a, ..., a^{e-1}.
struct FieldElement {
    std::vector<std::uint32_t> coeffs;

    bool operator==(const FieldElement&) const = default;
};

namespace detail {

// Dense polynomials over Z/p, low-to-high, no trailing zeros (zero poly = {}).
using ModPoly = std::vector<std::uint32_t>;

inline void mp_trim(ModPoly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

inline std::uint32_t mp_inv(std::uint32_t a, std::uint32_t p) {
    // p prime: a^{p-2}
    std::uint64_t r = 1, b = a % p;
    std::uint64_t e = p - 2;
    while (e) {
        if (e & 1u) r = r * b % p;
        b = b * b % p;
        e >>= 1u;
    }
    return static_cast<std::uint32_t>(r);
}

inline ModPoly mp_sub(ModPoly a, const ModPoly& b, std::uint32_t p) {
    if (a.size() < b.size()) a.resize(b.size(), 0);
    for (std::size_t i = 0; i < b.size(); ++i) a[i] = (a[i] + p - b[i]) % p;
    mp_trim(a);
    return a;
}

inline ModPoly mp_mul(const ModPoly& a, const ModPoly& b, std::uint32_t p) {
    if (a.empty() || b.empty()) return {};
    std::vector<std::uint64_t> acc(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i]) continue;
        for (std::size_t j = 0; j < b.size(); ++j) acc[i + j] = (acc[i + j] + std::uint64_t(a[i]) * b[j]) % p;
    }
    ModPoly r(acc.begin(), acc.end());
    mp_trim(r);
    return r;
}

/// Remainder of a modulo a nonzero m.
inline ModPoly mp_rem(ModPoly a, const ModPoly& m, std::uint32_t p) {
    mp_trim(a);
    const std::size_t dm = m.size() - 1;
    const std::uint64_t lead_inv = mp_inv(m.back(), p);
    while (!a.empty() && a.size() - 1 >= dm) {
        const std::size_t shift = a.size() - 1 - dm;
        const std::uint64_t c = a.back() * lead_inv % p;
        for (std::size_t i = 0; i <= dm; ++i) a[shift + i] = static_cast<std::uint32_t>((a[shift + i] + p - c * m[i] % p) % p);
        mp_trim(a);
    }
    return a;
}

inline ModPoly mp_gcd(ModPoly a, ModPoly b, std::uint32_t p) {
    mp_trim(a);
    mp_trim(b);
    while (!b.empty()) {
        ModPoly r = mp_rem(a, b, p);
        a = std::move(b);
        b = std::move(r);
    }
    if (!a.empty()) {
        const std::uint64_t li = mp_inv(a.back(), p);
        for (auto& c : a) c = static_cast<std::uint32_t>(c * li % p);
    }
    return a;
}

inline ModPoly mp_powmod(ModPoly base, Int exp, const ModPoly& m, std::uint32_t p) {
    ModPoly r{1};
    base = mp_rem(base, m, p);
    while (exp > 0) {
        if ((exp & 1) != 0) r = mp_rem(mp_mul(r, base, p), m, p);
        base = mp_rem(mp_mul(base, base, p), m, p);
        exp >>= 1;
    }
    return r;
}

} // namespace detail

/// Irreducibility of a monic polynomial over Z/p: x^{p^e} = x mod f and
/// gcd(x^{p^k} - x, f) = 1 for all 1 <= k < e.
inline bool is_irreducible(const std::vector<std::uint32_t>& f, std::uint32_t p) {
    using namespace detail;
    ModPoly m(f.begin(), f.end());
    mp_trim(m);
    if (m.size() < 2) return false;
    const unsigned e = static_cast<unsigned>(m.size() - 1);
    if (e == 1) return true;
    const ModPoly x{0, 1};
    ModPoly xp = x;
    for (unsigned k = 1; k <= e; ++k) {
        xp = mp_powmod(xp, Int(p), m, p);
        if (k < e) {
            ModPoly g = mp_gcd(m, mp_sub(xp, x, p), p);
            if (g.size() > 1) return false;
        }
    }
    ModPoly diff = mp_sub(xp, x, p);
    return diff.empty();
}

/// F_{p^e} with the first irreducible monic modulus in base-p counting order
/// of its non-leading coefficients.
inline FieldDesc make_field(std::uint32_t p, unsigned e) {
    require(is_prime_u64(p), ErrorKind::invalid_input, "characteristic " + std::to_string(p) + " is not prime");
    require(e >= 1, ErrorKind::invalid_input, "extension degree must be positive");
    require(p < (1u << 31), ErrorKind::invalid_input, "characteristic too large");
    FieldDesc F;
    F.p = p;
    F.e = e;
    require(F.size() > 0 && F.size() < (std::uint64_t(1) << 62), ErrorKind::invalid_input, "field too large");
    std::vector<std::uint32_t> f(e + 1, 0);
    f[e] = 1;
    const std::uint64_t candidates = F.size();
    for (std::uint64_t k = 0; k < candidates; ++k) {
        std::uint64_t v = k;
        for (unsigned i = 0; i < e; ++i) {
            f[i] = static_cast<std::uint32_t>(v % p);
            v /= p;
        }
        if (is_irreducible(f, p)) {
            F.modulus = f;
            return F;
        }
    }
    fail(ErrorKind::invalid_input, "no irreducible polynomial found");
}

/// Coefficient-vector arithmetic in F_{p^e}; valid for any field size.
class FiniteField {
public:
    explicit FiniteField(FieldDesc desc) : desc_(std::move(desc)) {
        mod_.assign(desc_.modulus.begin(), desc_.modulus.end());
    }

    const FieldDesc& desc() const { return desc_; }
    std::uint32_t characteristic() const { return desc_.p; }
    unsigned degree() const { return desc_.e; }
    std::uint64_t size() const { return desc_.size(); }

    FieldElement zero() const { return FieldElement{std::vector<std::uint32_t>(desc_.e, 0)}; }
    FieldElement one() const { return from_int(1); }

    /// The class of x modulo the field's modulus.
    FieldElement generator() const { return from_poly({0, 1}); }

    FieldElement from_int(long long v) const {
        FieldElement r = zero();
        long long m = v % static_cast<long long>(desc_.p);
        if (m < 0) m += desc_.p;
        r.coeffs[0] = static_cast<std::uint32_t>(m);
        return r;
    }

    bool is_zero(const FieldElement& a) const {
        return std::all_of(a.coeffs.begin(), a.coeffs.end(), [](std::uint32_t c) { return c == 0; });
    }

    FieldElement add(const FieldElement& a, const FieldElement& b) const {
        FieldElement r = zero();
        for (unsigned i = 0; i < desc_.e; ++i) r.coeffs[i] = (a.coeffs[i] + b.coeffs[i]) % desc_.p;
        return r;
    }

    FieldElement neg(const FieldElement& a) const {
        FieldElement r = zero();
        for (unsigned i = 0; i < desc_.e; ++i) r.coeffs[i] = (desc_.p - a.coeffs[i]) % desc_.p;
        return r;
    }

    FieldElement sub(const FieldElement& a, const FieldElement& b) const { return add(a, neg(b)); }

    FieldElement mul(const FieldElement& a, const FieldElement& b) const {
        return from_poly(detail::mp_rem(detail::mp_mul(to_poly(a), to_poly(b), desc_.p), mod_, desc_.p));
    }

    FieldElement pow(const FieldElement& a, Int exp) const {
        if (exp < 0) return pow(inv(a), -exp);
        return from_poly(detail::mp_powmod(to_poly(a), exp, mod_, desc_.p));
    }

    FieldElement inv(const FieldElement& a) const {
        if (is_zero(a)) throw Error(ErrorKind::division_by_zero, "inverse of zero in F_" + std::to_string(size()));
        // a^{q-2}
        return pow(a, Int(size()) - 2);
    }

    FieldElement frobenius(const FieldElement& a) const { return pow(a, Int(desc_.p)); }

    /// Base-p integer sum_i c_i p^i; this is the enumeration order.
    std::uint64_t to_index(const FieldElement& a) const {
        std::uint64_t v = 0;
        for (unsigned i = desc_.e; i-- > 0;) v = v * desc_.p + a.coeffs[i];
        return v;
    }

    FieldElement from_index(std::uint64_t v) const {
        FieldElement r = zero();
        for (unsigned i = 0; i < desc_.e; ++i) {
            r.coeffs[i] = static_cast<std::uint32_t>(v % desc_.p);
            v /= desc_.p;
        }
        return r;
    }

    std::vector<FieldElement> enumerate() const {
        std::vector<FieldElement> out;
        const std::uint64_t q = size();
        out.reserve(static_cast<std::size_t>(q));
        for (std::uint64_t i = 0; i < q; ++i) out.push_back(from_index(i));
        return out;
    }

    /// Multiplicative order of a nonzero element.
    std::uint64_t order(const FieldElement& a) const {
        const std::uint64_t n = size() - 1;
        std::uint64_t ord = n;
        for (std::uint64_t f : prime_factors(n)) {
            while (ord % f == 0 && pow(a, Int(ord / f)) == one()) ord /= f;
        }
        return ord;
    }

    /// Smallest element (in enumeration order) of multiplicative order q - 1.
    FieldElement primitive_element() const {
        const std::uint64_t q = size();
        for (std::uint64_t i = 1; i < q; ++i) {
            FieldElement g = from_index(i);
            if (order(g) == q - 1) return g;
        }
        fail(ErrorKind::invalid_input, "no primitive element");
    }

    /// Evaluate a polynomial with coefficients in this field (low-to-high).
    FieldElement eval(const std::vector<FieldElement>& poly, const FieldElement& x) const {
        FieldElement acc = zero();
        for (std::size_t i = poly.size(); i-- > 0;) acc = add(mul(acc, x), poly[i]);
        return acc;
    }

    std::string to_string(const FieldElement& a, const std::string& gen = "a") const {
        std::string s;
        for (unsigned i = desc_.e; i-- > 0;) {
            const std::uint32_t c = a.coeffs[i];
            if (!c) continue;
            if (!s.empty()) s += " + ";
            if (i == 0) {
                s += std::to_string(c);
            } else {
                if (c != 1) s += std::to_string(c) + "*";
                s += gen;
                if (i > 1) s += "^" + std::to_string(i);
            }
        }
        return s.empty() ? "0" : s;
    }

private:
    detail::ModPoly to_poly(const FieldElement& a) const {
        detail::ModPoly r(a.coeffs.begin(), a.coeffs.end());
        detail::mp_trim(r);
        return r;
    }

    FieldElement from_poly(detail::ModPoly r) const {
        r = detail::mp_rem(std::move(r), mod_, desc_.p);
        FieldElement out = zero();
        for (std::size_t i = 0; i < r.size(); ++i) out.coeffs[i] = r[i];
        return out;
    }

    FieldDesc desc_;
    detail::ModPoly mod_;
};

/// Field homomorphism F_{p^e} -> F_{p^{en}}, determined by the image of the
/// source generator.
struct Embedding {
    FieldDesc source;
    FieldDesc target;
    FieldElement generator_image;

    FieldElement operator()(const FieldElement& x) const {
        FiniteField T(target);
        FieldElement acc = T.zero();
        for (std::size_t i = source.e; i-- > 0;) acc = T.add(T.mul(acc, generator_image), T.from_int(x.coeffs[i]));
        return acc;
    }
};

struct Extension {
    FieldDesc field;
    Embedding embedding;
};

/// F_{q^n} built over the prime field, with the embedding of F_q given by the
/// first root of the F_q modulus among powers of a subfield generator.
inline Extension extend(const FieldDesc& base, unsigned n) {
    require(n >= 1, ErrorKind::invalid_input, "extension degree must be positive");
    Extension ext;
    ext.field = (n == 1) ? base : make_field(base.p, base.e * n);
    FiniteField T(ext.field);
    ext.embedding.source = base;
    ext.embedding.target = ext.field;
    if (n == 1) {
        ext.embedding.generator_image = T.generator();
        return ext;
    }
    std::vector<FieldElement> modulus;
    for (std::uint32_t c : base.modulus) modulus.push_back(T.from_int(c));
    if (base.e == 1) {
        // The generator of a prime field is the root of x - c, i.e. the constant -m_0.
        ext.embedding.generator_image = T.neg(modulus[0]);
        return ext;
    }
    const std::uint64_t Q = T.size(), q = base.size();
    const FieldElement h = T.pow(T.primitive_element(), Int((Q - 1) / (q - 1)));
    FieldElement cur = T.one();
    for (std::uint64_t k = 0; k + 1 < q; ++k) {
        if (T.is_zero(T.eval(modulus, cur))) {
            ext.embedding.generator_image = cur;
            return ext;
        }
        cur = T.mul(cur, h);
    }
    fail(ErrorKind::invalid_input, "base modulus has no root in the extension");
}

} // namespace picardkit
