#pragma once

// Buchberger's algorithm with the normal selection strategy and both
// Buchberger criteria (coprime leading terms, chain criterion).

#include "multipoly.hpp"

#include <optional>
#include <set>
#include <utility>
#include <vector>

namespace picardkit {

/// Homogeneous ideal given by generators in n+1 variables (P^n).
template <class F>
struct HomIdeal {
    F field{};
    std::size_t nvars = 0;
    std::vector<MultiPoly<F>> generators;
    TermOrder order = TermOrder::degrevlex;
    mutable std::optional<std::vector<MultiPoly<F>>> cached_basis;

    HomIdeal() = default;
    HomIdeal(F f, std::size_t n, std::vector<MultiPoly<F>> gens = {}, TermOrder o = TermOrder::degrevlex)
        : field(std::move(f)), nvars(n), order(o) {
        for (auto& g : gens) add(std::move(g));
    }

    /// Zero generators are dropped; nonhomogeneous ones are rejected.
    void add(MultiPoly<F> g) {
        require(g.nvars() == nvars, ErrorKind::invalid_input, "generator has wrong number of variables");
        require(g.is_homogeneous(), ErrorKind::invalid_input, "generator is not homogeneous: " + to_string(g));
        if (g.is_zero()) return;
        generators.push_back(std::move(g));
        cached_basis.reset();
    }

    HomIdeal operator+(const HomIdeal& o) const {
        HomIdeal r(field, nvars, generators, order);
        for (const auto& g : o.generators) r.add(g);
        return r;
    }
};

namespace detail {

template <class F>
struct SortedPoly {
    using C = typename F::value_type;
    std::vector<std::pair<Monomial, C>> t;   // descending

    bool empty() const { return t.empty(); }
    const Monomial& lm() const { return t.front().first; }
    const C& lc() const { return t.front().second; }
};

template <class F>
SortedPoly<F> to_sorted(const MultiPoly<F>& f, TermOrder order) {
    return SortedPoly<F>{f.sorted_terms(order)};
}

template <class F>
MultiPoly<F> from_sorted(const F& K, std::size_t nvars, const SortedPoly<F>& s) {
    MultiPoly<F> r(K, nvars);
    for (const auto& [m, c] : s.t) r.add_term(m, c);
    return r;
}

/// a - s * mono * b, merging descending term lists.
template <class F>
SortedPoly<F> sub_mul(const F& K, TermOrder order, const SortedPoly<F>& a, const typename F::value_type& s,
                      const Monomial& mono, const SortedPoly<F>& b) {
    SortedPoly<F> r;
    r.t.reserve(a.t.size() + b.t.size());
    std::size_t i = 0, j = 0;
    while (i < a.t.size() || j < b.t.size()) {
        if (j == b.t.size()) {
            r.t.push_back(a.t[i++]);
            continue;
        }
        const Monomial mb = b.t[j].first * mono;
        if (i == a.t.size() || term_greater(mb, a.t[i].first, order)) {
            r.t.emplace_back(mb, K.neg(K.mul(s, b.t[j].second)));
            ++j;
        } else if (term_greater(a.t[i].first, mb, order)) {
            r.t.push_back(a.t[i++]);
        } else {
            auto c = K.sub(a.t[i].second, K.mul(s, b.t[j].second));
            if (!K.is_zero(c)) r.t.emplace_back(mb, c);
            ++i;
            ++j;
        }
    }
    return r;
}

template <class F>
void make_monic(const F& K, SortedPoly<F>& f) {
    if (f.empty()) return;
    const auto inv = K.inv(f.lc());
    for (auto& [m, c] : f.t) c = K.mul(c, inv);
}

/// Full reduction of f modulo the list G (every term reduced).
template <class F>
SortedPoly<F> normal_form(const F& K, TermOrder order, SortedPoly<F> f, const std::vector<SortedPoly<F>>& G,
                          std::size_t skip = static_cast<std::size_t>(-1)) {
    SortedPoly<F> rem;
    while (!f.empty()) {
        const Monomial lm = f.lm();
        bool reduced = false;
        for (std::size_t k = 0; k < G.size(); ++k) {
            if (k == skip || G[k].empty()) continue;
            if (G[k].lm().divides(lm)) {
                const auto s = K.mul(f.lc(), K.inv(G[k].lc()));
                f = sub_mul(K, order, f, s, G[k].lm().quotient_of(lm), G[k]);
                reduced = true;
                break;
            }
        }
        if (!reduced) {
            rem.t.push_back(f.t.front());
            f.t.erase(f.t.begin());
        }
    }
    return rem;
}

template <class F>
SortedPoly<F> s_poly(const F& K, TermOrder order, const SortedPoly<F>& f, const SortedPoly<F>& g) {
    const Monomial l = f.lm().lcm(g.lm());
    SortedPoly<F> a;
    const auto cf = K.inv(f.lc());
    const Monomial mf = f.lm().quotient_of(l);
    for (const auto& [m, c] : f.t) a.t.emplace_back(m * mf, K.mul(c, cf));
    return sub_mul(K, order, a, K.inv(g.lc()), g.lm().quotient_of(l), g);
}

} // namespace detail

/// Reduced Groebner basis, monic, sorted by ascending leading monomial.
template <class F>
std::vector<MultiPoly<F>> groebner(const HomIdeal<F>& I) {
    if (I.cached_basis) return *I.cached_basis;
    using SP = detail::SortedPoly<F>;
    const F& K = I.field;
    const TermOrder order = I.order;

    std::vector<SP> G;
    std::set<std::pair<std::size_t, std::size_t>> pairs;

    auto insert = [&](SP h) {
        detail::make_monic(K, h);
        const std::size_t idx = G.size();
        G.push_back(std::move(h));
        for (std::size_t k = 0; k < idx; ++k)
            if (!G[k].empty()) pairs.emplace(k, idx);
    };

    for (const auto& g : I.generators) {
        SP h = detail::normal_form(K, order, detail::to_sorted(g, order), G);
        if (!h.empty()) insert(std::move(h));
    }

    auto pending = [&](std::size_t a, std::size_t b) { return pairs.count({std::min(a, b), std::max(a, b)}) > 0; };

    while (!pairs.empty()) {
        // Normal strategy: smallest lcm first, ties by index.
        auto best = pairs.begin();
        Monomial best_lcm = G[best->first].lm().lcm(G[best->second].lm());
        for (auto it = std::next(pairs.begin()); it != pairs.end(); ++it) {
            const Monomial l = G[it->first].lm().lcm(G[it->second].lm());
            if (term_greater(best_lcm, l, order)) {
                best = it;
                best_lcm = l;
            }
        }
        const auto [i, j] = *best;
        pairs.erase(best);
        if (G[i].empty() || G[j].empty()) continue;

        if (G[i].lm().coprime(G[j].lm())) continue;
        bool chain = false;
        for (std::size_t k = 0; k < G.size() && !chain; ++k) {
            if (k == i || k == j || G[k].empty()) continue;
            if (G[k].lm().divides(best_lcm) && !pending(i, k) && !pending(j, k)) chain = true;
        }
        if (chain) continue;

        SP h = detail::normal_form(K, order, detail::s_poly(K, order, G[i], G[j]), G);
        if (!h.empty()) insert(std::move(h));
    }

    // Minimal basis, then interreduce.
    std::vector<SP> M;
    for (std::size_t a = 0; a < G.size(); ++a) {
        bool redundant = false;
        for (std::size_t b = 0; b < G.size() && !redundant; ++b) {
            if (a == b) continue;
            if (G[b].lm().divides(G[a].lm()) && (!(G[b].lm() == G[a].lm()) || b < a)) redundant = true;
        }
        if (!redundant) M.push_back(G[a]);
    }
    for (std::size_t a = 0; a < M.size(); ++a) {
        SP tail;
        tail.t.assign(M[a].t.begin() + 1, M[a].t.end());
        SP red = detail::normal_form(K, order, tail, M, a);
        red.t.insert(red.t.begin(), M[a].t.front());
        M[a] = std::move(red);
    }
    std::sort(M.begin(), M.end(), [order](const SP& x, const SP& y) { return term_greater(y.lm(), x.lm(), order); });

    std::vector<MultiPoly<F>> out;
    for (const auto& s : M) out.push_back(detail::from_sorted(K, I.nvars, s));
    I.cached_basis = out;
    return out;
}

template <class F>
Monomial leading_monomial(const MultiPoly<F>& f, TermOrder order) {
    require(!f.is_zero(), ErrorKind::invalid_input, "zero polynomial has no leading monomial");
    Monomial best = f.terms().begin()->first;
    for (const auto& [m, c] : f.terms())
        if (term_greater(m, best, order)) best = m;
    return best;
}

/// Remainder of f on division by a Groebner basis.
template <class F>
MultiPoly<F> reduce(const MultiPoly<F>& f, const std::vector<MultiPoly<F>>& basis, TermOrder order) {
    std::vector<detail::SortedPoly<F>> G;
    for (const auto& g : basis) G.push_back(detail::to_sorted(g, order));
    return detail::from_sorted(f.field(), f.nvars(), detail::normal_form(f.field(), order, detail::to_sorted(f, order), G));
}

template <class F>
bool ideal_contains(const HomIdeal<F>& I, const MultiPoly<F>& f) {
    return reduce(f, groebner(I), I.order).is_zero();
}

} // namespace picardkit
