#pragma once

// Finite Galois modules over Z/l^n given in diagonal presentation
// (+) Z/l^{e_j}, with the group acting through integer matrices.

#include "bigint.hpp"
#include "errors.hpp"
#include "lattice.hpp"

#include <json.hpp>

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace picardkit {

/// l for odd l, 4 for l = 2.
inline std::uint64_t lprime(std::uint64_t ell) {
    require(is_prime_u64(ell), ErrorKind::invalid_input, std::to_string(ell) + " is not prime");
    return ell == 2 ? 4 : ell;
}

struct FiniteLModule {
    std::uint64_t ell = 0;
    unsigned n = 0;
    std::vector<unsigned> invariantFactors;   // nonincreasing exponents, each <= n
    std::vector<IntMatrix> actions;

    std::size_t size() const { return invariantFactors.size(); }
    Int modulus(std::size_t i) const { return ipow(Int(ell), invariantFactors[i]); }

    unsigned log_order() const {
        unsigned s = 0;
        for (auto e : invariantFactors) s += e;
        return s;
    }

    void validate() const {
        require(is_prime_u64(ell), ErrorKind::invalid_input, "module prime is not prime");
        const std::size_t k = size();
        for (std::size_t i = 0; i < k; ++i) {
            require(invariantFactors[i] <= n, ErrorKind::invalid_input, "invariant factor exceeds the level n");
            if (i) require(invariantFactors[i] <= invariantFactors[i - 1], ErrorKind::invalid_input,
                           "invariant factors must be nonincreasing");
        }
        for (const auto& A : actions) {
            require(A.rows() == k && A.cols() == k, ErrorKind::invalid_input, "action matrix has wrong size");
            // maps the relation lattice diag(l^{e_j}) into itself
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t j = 0; j < k; ++j) {
                    if (invariantFactors[i] <= invariantFactors[j]) continue;
                    const Int m = ipow(Int(ell), invariantFactors[i] - invariantFactors[j]);
                    require(A(i, j) % m == 0, ErrorKind::invalid_input,
                            "action matrix entry (" + std::to_string(i) + "," + std::to_string(j) + ") is not well defined");
                }
            require(mod(det(A), Int(ell)) != 0, ErrorKind::invalid_input, "action matrix is not invertible mod l");
        }
    }

    /// Whether every generator acts as the identity.
    bool acts_trivially() const {
        for (const auto& A : actions)
            for (std::size_t i = 0; i < size(); ++i)
                for (std::size_t j = 0; j < size(); ++j) {
                    const Int d = A(i, j) - (i == j ? 1 : 0);
                    if (d % modulus(i) != 0) return false;
                }
        return true;
    }
};

struct InvariantsResult {
    Int order;
    unsigned log_order = 0;
    std::vector<unsigned> structure;   // exponents of the cyclic factors, nonincreasing
};

/// T^G as L / D Z^k, where L = {x in Z^k : (g - 1) x in D Z^k for all g}.
inline InvariantsResult invariants(const FiniteLModule& T) {
    T.validate();
    const std::size_t k = T.size();
    const std::size_t g = T.actions.size();
    IntMatrix gens(0, k);
    std::vector<IntMatrix> rows;
    for (std::size_t i = 0; i < k; ++i) {
        IntMatrix r(1, k);
        r(0, i) = T.modulus(i);
        rows.push_back(r);
    }
    if (g > 0) {
        // kernel of [A_1 - I, -D, 0, ...; A_2 - I, 0, -D, ...]
        IntMatrix M(k * g, k + k * g);
        for (std::size_t h = 0; h < g; ++h)
            for (std::size_t i = 0; i < k; ++i) {
                for (std::size_t j = 0; j < k; ++j) M(h * k + i, j) = T.actions[h](i, j) - (i == j ? 1 : 0);
                M(h * k + i, k + h * k + i) = -T.modulus(i);
            }
        const auto S = snf(M);
        for (std::size_t c = S.rank(); c < M.cols(); ++c) {
            IntMatrix r(1, k);
            for (std::size_t j = 0; j < k; ++j) r(0, j) = S.V(j, c);
            rows.push_back(r);
        }
    } else {
        rows.push_back(IntMatrix::identity(k));
    }
    const IntMatrix L = hermite_rows(IntMatrix::stack(rows, k));
    require(L.rows() == k, ErrorKind::inconsistent, "invariant lattice is not of full rank");
    IntMatrix X(k, k);
    for (std::size_t i = 0; i < k; ++i) {
        std::vector<Int> v(k, 0);
        v[i] = T.modulus(i);
        const auto x = hermite_coordinates(L, v);
        require(x.has_value(), ErrorKind::inconsistent, "relation lattice is not inside the invariant lattice");
        for (std::size_t j = 0; j < k; ++j) X(i, j) = (*x)[j];
    }
    InvariantsResult R;
    R.order = 1;
    for (const auto& d : snf(X).diagonal()) {
        if (d == 1) continue;
        const unsigned e = valuation(d, Int(T.ell));
        require(ipow(Int(T.ell), e) == d, ErrorKind::inconsistent, "invariant factor is not a power of l");
        R.structure.push_back(e);
        R.order *= d;
        R.log_order += e;
    }
    std::sort(R.structure.rbegin(), R.structure.rend());
    return R;
}

struct RankBounds {
    std::vector<std::pair<unsigned, unsigned>> u;   // (n, u_n)
    unsigned min = 0;
};

/// u_n = floor(log_l #T_{l^n}^G / (n - t)) over the members with n > t.
/// The family must contain the member at the level of l' so the hypothesis can be checked.
inline RankBounds rank_upper_bounds(const std::vector<FiniteLModule>& family, unsigned t) {
    require(!family.empty(), ErrorKind::invalid_input, "empty module family");
    const std::uint64_t ell = family.front().ell;
    const unsigned level = ell == 2 ? 2 : 1;
    const FiniteLModule* base = nullptr;
    for (const auto& T : family) {
        require(T.ell == ell, ErrorKind::invalid_input, "family mixes primes");
        if (T.n == level) base = &T;
    }
    if (!base)
        fail(ErrorKind::hypothesis_violation,
             "family has no member at level n = " + std::to_string(level) + ", so triviality on T_{l'} cannot be checked");
    base->validate();
    require(base->acts_trivially(), ErrorKind::hypothesis_violation, "G acts nontrivially on T_{l'}");
    RankBounds R;
    std::optional<unsigned> best;
    for (const auto& T : family) {
        if (T.n <= t) continue;
        const unsigned un = invariants(T).log_order / (T.n - t);
        R.u.emplace_back(T.n, un);
        best = best ? std::min(*best, un) : un;
    }
    require(best.has_value(), ErrorKind::invalid_input, "family has no member with n > t");
    std::sort(R.u.begin(), R.u.end());
    R.min = *best;
    return R;
}

// ---------------------------------------------------------------------------

struct SizeTable {
    std::uint64_t ell = 0;
    std::vector<unsigned> betti;                               // b_0..b_{2d}
    std::map<std::pair<unsigned, unsigned>, unsigned> sizes;   // (j, n) -> log_l #H^j(Z/l^n)

    unsigned top_degree() const { return betti.empty() ? 0 : static_cast<unsigned>(betti.size() - 1); }

    /// Largest M with entries for every degree and every n <= M.
    unsigned complete_levels() const {
        unsigned M = 0;
        for (;;) {
            for (unsigned j = 0; j <= top_degree(); ++j)
                if (!sizes.count({j, M + 1})) return M;
            ++M;
        }
    }
};

struct TorsionGroup {
    std::vector<unsigned> multiplicities;   // r_1, r_2, ...: number of Z/l^n summands
    bool complete = true;
    unsigned exponent_lower_bound = 0;      // when incomplete: further summands have exponent >= this
    unsigned unresolved_summands = 0;       // how many such summands

    /// Summand exponents in nonincreasing order (complete part only).
    std::vector<unsigned> exponents() const {
        std::vector<unsigned> e;
        for (std::size_t n = multiplicities.size(); n >= 1; --n)
            for (unsigned c = 0; c < multiplicities[n - 1]; ++c) e.push_back(static_cast<unsigned>(n));
        return e;
    }
    bool trivial() const { return complete && exponents().empty(); }
};

/// Recovers H^i(Z_l)_tors from the sizes of H^j(Z/l^n), running the induction upward and downward.
inline TorsionGroup torsion_from_sizes(const SizeTable& table, unsigned i) {
    require(is_prime_u64(table.ell), ErrorKind::invalid_input, "table prime is not prime");
    require(!table.betti.empty(), ErrorKind::invalid_input, "table has no Betti numbers");
    require(i <= table.top_degree(), ErrorKind::invalid_input, "degree beyond the top degree");
    const unsigned top = table.top_degree();
    const unsigned M = table.complete_levels();
    require(M >= 1, ErrorKind::inconsistent, "table lacks level n = 1 for some degree");
    // A[j][n] = log_l a_{j,n}; a_{j,0} = 1.
    using Grid = std::vector<std::vector<long>>;
    Grid up(top + 2, std::vector<long>(M + 1, 0)), down(top + 2, std::vector<long>(M + 1, 0));
    for (unsigned n = 1; n <= M; ++n) {
        for (unsigned j = 0; j <= top; ++j)   // a_{j+1} = size_j / (l^{n b_j} a_j)
            up[j + 1][n] = static_cast<long>(table.sizes.at({j, n})) - static_cast<long>(n * table.betti[j]) - up[j][n];
        for (unsigned j = top + 1; j-- > 0;)  // a_j = size_j / (l^{n b_j} a_{j+1})
            down[j][n] = static_cast<long>(table.sizes.at({j, n})) - static_cast<long>(n * table.betti[j]) - down[j + 1][n];
    }
    for (unsigned j = 0; j <= top + 1; ++j)
        for (unsigned n = 1; n <= M; ++n) {
            require(up[j][n] == down[j][n], ErrorKind::inconsistent,
                    "ascending and descending inductions disagree at j = " + std::to_string(j) + ", n = " + std::to_string(n));
            require(up[j][n] >= 0, ErrorKind::inconsistent, "non-integral a_{j,n}");
            require(up[j][n] >= up[j][n - 1], ErrorKind::inconsistent, "a_{j,n} is not monotone in n");
        }
    const auto& a = up[i];
    TorsionGroup G;
    std::optional<unsigned> N;
    for (unsigned n = 0; n < M; ++n)
        if (a[n] == a[n + 1]) {
            N = n;
            break;
        }
    const unsigned last = N ? *N : M - 1;   // r_n is computable for n <= last
    for (unsigned n = 1; n <= last; ++n) {
        const long r = 2 * a[n] - a[n - 1] - a[n + 1];
        require(r >= 0, ErrorKind::inconsistent, "negative multiplicity r_" + std::to_string(n));
        G.multiplicities.push_back(static_cast<unsigned>(r));
    }
    if (N) {
        for (unsigned n = *N; n <= M; ++n)
            require(a[n] == a[*N], ErrorKind::inconsistent, "a_{i,n} grows again after stabilizing");
    } else {
        G.complete = false;
        G.exponent_lower_bound = M;
        G.unresolved_summands = static_cast<unsigned>(a[M] - a[M - 1]);
    }
    return G;
}

/// Checks #H^j(Z/l^n) = l^{n b_j} #(tors_j / l^n) #(tors_{j+1}[l^n]) on every table entry.
inline bool kummer_size_check(const SizeTable& table, const std::vector<unsigned>& betti,
                              const std::vector<std::vector<unsigned>>& torsion) {
    auto tors = [&](unsigned j, unsigned n) {
        unsigned s = 0;
        if (j < torsion.size())
            for (auto e : torsion[j]) s += std::min(e, n);
        return s;
    };
    for (const auto& [key, size] : table.sizes) {
        const auto [j, n] = key;
        if (j >= betti.size()) return false;
        if (size != n * betti[j] + tors(j, n) + tors(j + 1, n)) return false;
    }
    return true;
}

/// Whether M is the identity modulo l'. Finite-order matrices passing this are the identity.
inline bool minkowski_trivial(const IntMatrix& M, std::uint64_t ell) {
    require(M.rows() == M.cols(), ErrorKind::invalid_input, "matrix is not square");
    const Int lp(lprime(ell));
    require(mod(det(M), Int(ell)) != 0, ErrorKind::invalid_input, "matrix is not invertible over Z_l");
    for (std::size_t i = 0; i < M.rows(); ++i)
        for (std::size_t j = 0; j < M.cols(); ++j)
            if ((M(i, j) - (i == j ? 1 : 0)) % lp != 0) return false;
    return true;
}

// ---------------------------------------------------------------------------

inline SizeTable size_table_from_json(const nlohmann::json& j) {
    SizeTable t;
    t.ell = j.at("ell").get<std::uint64_t>();
    t.betti = j.at("betti").get<std::vector<unsigned>>();
    for (const auto& e : j.at("sizes")) {
        const auto key = std::make_pair(e.at("i").get<unsigned>(), e.at("n").get<unsigned>());
        require(key.second >= 1, ErrorKind::invalid_input, "levels start at n = 1");
        require(!t.sizes.count(key), ErrorKind::invalid_input, "duplicate size entry");
        t.sizes[key] = e.at("log_ell_size").get<unsigned>();
    }
    return t;
}

inline nlohmann::json to_json(const SizeTable& t) {
    nlohmann::json sizes = nlohmann::json::array();
    for (const auto& [key, v] : t.sizes) sizes.push_back({{"i", key.first}, {"n", key.second}, {"log_ell_size", v}});
    return {{"ell", t.ell}, {"betti", t.betti}, {"sizes", sizes}};
}

inline FiniteLModule module_from_json(const nlohmann::json& j, std::uint64_t ell) {
    FiniteLModule T;
    T.ell = j.contains("ell") ? j.at("ell").get<std::uint64_t>() : ell;
    T.n = j.at("n").get<unsigned>();
    T.invariantFactors = j.at("invariantFactors").get<std::vector<unsigned>>();
    for (const auto& a : j.value("actions", nlohmann::json::array())) T.actions.push_back(int_matrix_from_json(a));
    T.validate();
    return T;
}

inline nlohmann::json to_json(const FiniteLModule& T) {
    nlohmann::json acts = nlohmann::json::array();
    for (const auto& A : T.actions) acts.push_back(to_json(A));
    return {{"n", T.n}, {"invariantFactors", T.invariantFactors}, {"actions", acts}};
}

struct ModuleFamily {
    std::uint64_t ell = 0;
    unsigned t = 0;
    std::vector<FiniteLModule> modules;
};

/// {ell, t, modules: [{n, invariantFactors, actions}]}
inline ModuleFamily module_family_from_json(const nlohmann::json& j) {
    ModuleFamily F;
    F.ell = j.at("ell").get<std::uint64_t>();
    F.t = j.value("t", 0u);
    for (const auto& m : j.at("modules")) F.modules.push_back(module_from_json(m, F.ell));
    return F;
}

inline nlohmann::json to_json(const ModuleFamily& F) {
    nlohmann::json mods = nlohmann::json::array();
    for (const auto& m : F.modules) mods.push_back(to_json(m));
    return {{"ell", F.ell}, {"t", F.t}, {"modules", mods}};
}

} // namespace picardkit
