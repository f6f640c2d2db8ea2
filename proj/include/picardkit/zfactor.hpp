#pragma once

// Factorization of integer polynomials into irreducibles over Q.

#include "zpoly.hpp"

#include <algorithm>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace picardkit {

struct ZFactorization {
    Int unit = 1;   // P = unit * prod factor^mult
    std::vector<std::pair<ZPoly, unsigned>> factors;

    ZPoly expand() const {
        ZPoly r{unit};
        for (const auto& [f, m] : factors) r = poly_mul(r, poly_pow(f, m));
        return r;
    }
};

namespace detail {

// ---- arithmetic in F_p[x], p a small odd prime --------------------------------

using PPoly = std::vector<std::uint64_t>;

struct ModP {
    std::uint64_t p;

    std::uint64_t inv(std::uint64_t a) const {
        std::uint64_t r = 1, b = a % p, e = p - 2;
        while (e) {
            if (e & 1) r = r * b % p;
            b = b * b % p;
            e >>= 1;
        }
        return r;
    }
    void strip_zeros(PPoly& a) const {
        while (!a.empty() && a.back() == 0) a.pop_back();
    }
    PPoly reduce(const ZPoly& f) const {
        PPoly r;
        for (const auto& c : f) r.push_back(static_cast<std::uint64_t>(mod(c, Int(p))));
        strip_zeros(r);
        return r;
    }
    PPoly sub(const PPoly& a, const PPoly& b) const {
        PPoly r(std::max(a.size(), b.size()), 0);
        for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i];
        for (std::size_t i = 0; i < b.size(); ++i) r[i] = (r[i] + p - b[i]) % p;
        strip_zeros(r);
        return r;
    }
    PPoly mul(const PPoly& a, const PPoly& b) const {
        if (a.empty() || b.empty()) return {};
        PPoly r(a.size() + b.size() - 1, 0);
        for (std::size_t i = 0; i < a.size(); ++i)
            for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + a[i] * b[j]) % p;
        strip_zeros(r);
        return r;
    }
    std::pair<PPoly, PPoly> divmod(PPoly a, const PPoly& b) const {
        strip_zeros(a);
        const std::uint64_t li = inv(b.back());
        if (a.size() < b.size()) return {{}, a};
        PPoly q(a.size() - b.size() + 1, 0);
        while (!a.empty() && a.size() >= b.size()) {
            const std::size_t s = a.size() - b.size();
            const std::uint64_t c = a.back() * li % p;
            q[s] = c;
            for (std::size_t i = 0; i < b.size(); ++i) a[s + i] = (a[s + i] + p - c * b[i] % p) % p;
            strip_zeros(a);
        }
        strip_zeros(q);
        return {q, a};
    }
    PPoly rem(const PPoly& a, const PPoly& b) const { return divmod(a, b).second; }
    PPoly monic(PPoly a) const {
        strip_zeros(a);
        if (a.empty()) return a;
        const std::uint64_t li = inv(a.back());
        for (auto& c : a) c = c * li % p;
        return a;
    }
    PPoly gcd(PPoly a, PPoly b) const {
        strip_zeros(a);
        strip_zeros(b);
        while (!b.empty()) {
            PPoly r = rem(a, b);
            a = std::move(b);
            b = std::move(r);
        }
        return monic(a);
    }
    /// s, t with s a + t b = 1 (a, b coprime).
    std::pair<PPoly, PPoly> bezout(const PPoly& a, const PPoly& b) const {
        PPoly r0 = a, r1 = b, s0{1}, s1{}, t0{}, t1{1};
        while (!r1.empty()) {
            auto [q, r] = divmod(r0, r1);
            PPoly s2 = sub(s0, mul(q, s1)), t2 = sub(t0, mul(q, t1));
            r0 = std::move(r1);
            r1 = std::move(r);
            s0 = std::move(s1);
            s1 = std::move(s2);
            t0 = std::move(t1);
            t1 = std::move(t2);
        }
        // r0 is a nonzero constant
        const std::uint64_t ci = inv(r0[0]);
        for (auto& c : s0) c = c * ci % p;
        for (auto& c : t0) c = c * ci % p;
        return {s0, t0};
    }
    PPoly powmod(PPoly base, Int e, const PPoly& m) const {
        PPoly r{1};
        base = rem(base, m);
        while (e > 0) {
            if (e % 2 == 1) r = rem(mul(r, base), m);
            e /= 2;
            if (e > 0) base = rem(mul(base, base), m);
        }
        return r;
    }
    PPoly derivative(const PPoly& a) const {
        PPoly r;
        for (std::size_t i = 1; i < a.size(); ++i) r.push_back(a[i] * (i % p) % p);
        strip_zeros(r);
        return r;
    }
};

/// Monic irreducible factors of a squarefree monic polynomial over F_p (p odd).
inline std::vector<PPoly> factor_mod_p(const ModP& F, const PPoly& f, std::mt19937_64& rng) {
    std::vector<PPoly> out;
    // distinct-degree factorization
    std::vector<std::pair<PPoly, unsigned>> ddf;
    PPoly rest = f, xp{0, 1};
    PPoly h = xp;
    for (unsigned d = 1; 2 * d <= static_cast<unsigned>(rest.size() - 1); ++d) {
        h = F.powmod(h, Int(F.p), rest);
        const PPoly g = F.gcd(rest, F.sub(h, xp));
        if (g.size() > 1) {
            ddf.emplace_back(g, d);
            rest = F.divmod(rest, g).first;
            h = F.rem(h, rest);
        }
    }
    if (rest.size() > 1) ddf.emplace_back(F.monic(rest), static_cast<unsigned>(rest.size() - 1));
    // equal-degree splitting
    for (auto& [g, d] : ddf) {
        std::vector<PPoly> stack{g};
        while (!stack.empty()) {
            PPoly u = stack.back();
            stack.pop_back();
            if (u.size() - 1 == d) {
                out.push_back(F.monic(u));
                continue;
            }
            const Int e = (ipow(Int(F.p), d) - 1) / 2;
            for (;;) {
                PPoly r(u.size() - 1);
                for (auto& c : r) c = rng() % F.p;
                F.strip_zeros(r);
                if (r.size() < 2) continue;
                PPoly w = F.powmod(r, e, u);
                w = F.sub(w, PPoly{1});
                const PPoly s = F.gcd(u, w);
                if (s.size() > 1 && s.size() < u.size()) {
                    stack.push_back(s);
                    stack.push_back(F.monic(F.divmod(u, s).first));
                    break;
                }
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

// ---- Hensel lifting -------------------------------------------------------------

inline Int inv_mod(const Int& a, const Int& m) {
    Int r0 = m, r1 = mod(a, m), s0 = 0, s1 = 1;
    while (r1 != 0) {
        const Int q = r0 / r1;
        Int t = r0 - q * r1;
        r0 = r1;
        r1 = t;
        t = s0 - q * s1;
        s0 = s1;
        s1 = t;
    }
    require(r0 == 1, ErrorKind::division_by_zero, "not invertible modulo " + m.str());
    return mod(s0, m);
}

inline ZPoly mod_poly(const ZPoly& a, const Int& m) {
    ZPoly r;
    for (const auto& c : a) r.push_back(mod(c, m));
    strip_zeros(r);
    return r;
}

inline ZPoly to_z(const PPoly& a) { return ZPoly(a.begin(), a.end()); }

/// Lift f = g0 h0 (mod p), g0 monic and coprime to h0, to f = g h (mod p^K).
inline std::pair<ZPoly, ZPoly> hensel_pair(const ZPoly& f, const PPoly& g0, const PPoly& h0, const ModP& F, unsigned K) {
    const Int p(F.p);
    const auto [s, t] = F.bezout(g0, h0);
    (void)s;
    ZPoly g = to_z(g0), h = to_z(h0);
    h.back() = f.back();   // leading coefficient carried exactly by h
    Int pk = p;
    for (unsigned k = 1; k < K; ++k) {
        const ZPoly diff = poly_sub(f, poly_mul(g, h));
        ZPoly e;
        for (const auto& c : diff) e.push_back(c / pk);   // exact
        const PPoly ep = F.reduce(e);
        // dg = t e mod g0, dh = (e - dg h) / g mod p
        const PPoly dg = F.rem(F.mul(t, ep), g0);
        const PPoly dh = F.divmod(F.sub(ep, F.mul(dg, F.reduce(h))), g0).first;
        g = poly_add(g, poly_scale(to_z(dg), pk));
        h = poly_add(h, poly_scale(to_z(dh), pk));
        pk *= p;
        g = mod_poly(g, pk);
        h = mod_poly(h, pk);
        h.back() = f.back();
    }
    return {g, h};
}

/// Lifts of the monic modular factors of f (with f = lc * prod factors mod p).
inline void hensel_tree(const ZPoly& f, const std::vector<PPoly>& factors, const ModP& F, unsigned K, const Int& pK,
                        std::vector<ZPoly>& out) {
    if (factors.size() == 1) {
        const Int li = inv_mod(f.back(), pK);
        out.push_back(mod_poly(poly_scale(f, li), pK));
        return;
    }
    const std::size_t half = factors.size() / 2;
    std::vector<PPoly> left(factors.begin(), factors.begin() + static_cast<long>(half));
    std::vector<PPoly> right(factors.begin() + static_cast<long>(half), factors.end());
    PPoly g0{1}, h0{static_cast<std::uint64_t>(mod(f.back(), Int(F.p)))};
    for (const auto& u : left) g0 = F.mul(g0, u);
    for (const auto& u : right) h0 = F.mul(h0, u);
    auto [g, h] = hensel_pair(mod_poly(f, pK), g0, h0, F, K);
    hensel_tree(g, left, F, K, pK, out);
    hensel_tree(h, right, F, K, pK, out);
}

inline ZPoly symmetric(const ZPoly& a, const Int& m) {
    ZPoly r;
    const Int half = m / 2;
    for (const auto& c : a) {
        Int v = mod(c, m);
        if (v > half) v -= m;
        r.push_back(v);
    }
    strip_zeros(r);
    return r;
}

/// Irreducible factors of a primitive squarefree polynomial of degree >= 2.
inline std::vector<ZPoly> factor_squarefree(ZPoly f) {
    const long n = degree(f);
    if (n <= 1) return {f};
    // Choose among the first few good primes the one with fewest modular factors.
    std::mt19937_64 rng(0x5eed);
    std::vector<PPoly> best;
    std::uint64_t best_p = 0;
    int good = 0;
    for (std::uint64_t p = 3; good < 5 && p < 100000; p += 2) {
        if (!is_prime_u64(p) || f.back() % Int(p) == 0) continue;
        const ModP F{p};
        const PPoly fp = F.reduce(f);
        if (F.gcd(fp, F.derivative(fp)).size() != 1) continue;
        ++good;
        auto facs = factor_mod_p(F, F.monic(fp), rng);
        if (best_p == 0 || facs.size() < best.size()) {
            best = std::move(facs);
            best_p = p;
        }
        if (best.size() == 1) break;
    }
    require(best_p != 0, ErrorKind::invalid_input, "no good prime for factoring");
    if (best.size() == 1) return {f};
    const ModP F{best_p};
    // Coefficient bound for lc(f) * (any factor).
    Int maxc = 0;
    for (const auto& c : f) maxc = std::max(maxc, Int(abs(c)));
    const Int bound = 2 * abs(f.back()) * ipow(Int(2), static_cast<unsigned>(n)) * (n + 1) * maxc;
    unsigned K = 1;
    Int pK = best_p;
    while (pK <= bound) {
        pK *= best_p;
        ++K;
    }
    std::vector<ZPoly> lifted;
    hensel_tree(f, best, F, K, pK, lifted);

    // Zassenhaus recombination.
    std::vector<ZPoly> result;
    std::vector<std::size_t> alive(lifted.size());
    for (std::size_t i = 0; i < alive.size(); ++i) alive[i] = i;
    for (std::size_t s = 1; 2 * s <= alive.size();) {
        bool found = false;
        std::vector<std::size_t> idx(s);
        for (std::size_t i = 0; i < s; ++i) idx[i] = i;
        for (;;) {
            ZPoly g{f.back()};
            for (auto i : idx) g = mod_poly(poly_mul(g, lifted[alive[i]]), pK);
            g = primitive_part(symmetric(g, pK));
            if (auto q = exact_divide(f, g)) {
                result.push_back(g);
                f = *q;
                std::vector<std::size_t> next;
                for (std::size_t i = 0, k = 0; i < alive.size(); ++i) {
                    if (k < s && idx[k] == i) {
                        ++k;
                        continue;
                    }
                    next.push_back(alive[i]);
                }
                alive = std::move(next);
                found = true;
                break;
            }
            // next combination
            std::size_t i = s;
            while (i-- > 0) {
                if (idx[i] != i + alive.size() - s) {
                    ++idx[i];
                    for (std::size_t j = i + 1; j < s; ++j) idx[j] = idx[j - 1] + 1;
                    break;
                }
                if (i == 0) {
                    i = static_cast<std::size_t>(-1);
                    break;
                }
            }
            if (i == static_cast<std::size_t>(-1)) break;
        }
        if (!found) ++s;
    }
    if (degree(f) > 0) result.push_back(primitive_part(f));
    return result;
}

/// Squarefree decomposition over Q: primitive integer polynomials with multiplicities.
inline std::vector<std::pair<ZPoly, unsigned>> squarefree_decomposition(const ZPoly& f) {
    std::vector<std::pair<ZPoly, unsigned>> out;
    const QPoly fq = to_q(f);
    QPoly a0 = gcd_q(fq, derivative(fq));
    QPoly b = divmod(fq, a0).first;
    QPoly c = divmod(derivative(fq), a0).first;
    QPoly d = poly_sub(c, derivative(b));
    for (unsigned i = 1; degree(b) > 0; ++i) {
        const QPoly a = gcd_q(b, d);
        if (degree(a) > 0) out.emplace_back(primitive_part(a), i);
        b = divmod(b, a).first;
        c = divmod(d, a).first;
        d = poly_sub(c, derivative(b));
    }
    return out;
}

inline void normalize_factor(ZPoly& g) {
    // Constant term +1 when it is a unit, otherwise positive leading coefficient.
    const bool flip = (abs(g[0]) == 1) ? g[0] < 0 : g.back() < 0;
    if (flip)
        for (auto& c : g) c = -c;
}

} // namespace detail

inline ZFactorization factor_z_poly(const ZPoly& P) {
    ZPoly f = trimmed(P);
    require(!f.empty(), ErrorKind::invalid_input, "cannot factor the zero polynomial");
    ZFactorization out;
    unsigned tpow = 0;
    while (f[0] == 0) {
        f.erase(f.begin());
        ++tpow;
    }
    if (tpow) out.factors.push_back({ZPoly{0, 1}, tpow});
    for (auto& [sq, m] : detail::squarefree_decomposition(f))
        for (auto g : detail::factor_squarefree(sq)) {
            detail::normalize_factor(g);
            out.factors.push_back({g, m});
        }
    std::sort(out.factors.begin(), out.factors.end(), [](const auto& a, const auto& b) {
        if (a.first.size() != b.first.size()) return a.first.size() < b.first.size();
        if (a.first != b.first) return a.first < b.first;
        return a.second < b.second;
    });
    ZPoly prod{1};
    for (const auto& [g, m] : out.factors) prod = poly_mul(prod, poly_pow(g, m));
    out.unit = P.empty() ? Int(0) : trimmed(P).back() / prod.back();
    return out;
}

} // namespace picardkit
