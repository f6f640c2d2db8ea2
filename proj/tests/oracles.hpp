#pragma once

// Independent reference computations shared by the unit tests and the acceptance runner.

#include <picardkit/bigint.hpp>
#include <picardkit/fields.hpp>
#include <picardkit/multipoly.hpp>
#include <picardkit/lattice.hpp>
#include <picardkit/zpoly.hpp>

#include <algorithm>
#include <random>
#include <set>
#include <stdexcept>
#include <vector>

namespace oracles {

using namespace picardkit;

inline IntMatrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c, int lo, int hi, double zero_prob = 0.2) {
    std::uniform_int_distribution<int> d(lo, hi);
    std::uniform_real_distribution<double> z(0, 1);
    IntMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) m(i, j) = z(rng) < zero_prob ? 0 : d(rng);
    return m;
}

/// Cofactor expansion, independent of the elimination code.
inline Int cofactor_det(const IntMatrix& A) {
    const std::size_t n = A.rows();
    if (n == 0) return 1;
    if (n == 1) return A(0, 0);
    Int acc = 0;
    for (std::size_t c = 0; c < n; ++c) {
        std::vector<std::size_t> rows, cols;
        for (std::size_t i = 1; i < n; ++i) rows.push_back(i);
        for (std::size_t j = 0; j < n; ++j)
            if (j != c) cols.push_back(j);
        const Int t = A(0, c) * cofactor_det(A.submatrix(rows, cols));
        if (c % 2) acc -= t;
        else acc += t;
    }
    return acc;
}

/// Rank over Q by fraction-valued Gaussian elimination.
inline std::size_t rational_rank(const IntMatrix& A) {
    std::vector<std::vector<Rational>> m(A.rows(), std::vector<Rational>(A.cols()));
    for (std::size_t i = 0; i < A.rows(); ++i)
        for (std::size_t j = 0; j < A.cols(); ++j) m[i][j] = Rational(A(i, j));
    std::size_t r = 0;
    for (std::size_t c = 0; c < A.cols() && r < A.rows(); ++c) {
        std::size_t piv = r;
        while (piv < A.rows() && m[piv][c] == 0) ++piv;
        if (piv == A.rows()) continue;
        std::swap(m[r], m[piv]);
        for (std::size_t i = 0; i < A.rows(); ++i) {
            if (i == r || m[i][c] == 0) continue;
            const Rational f = m[i][c] / m[r][c];
            for (std::size_t j = c; j < A.cols(); ++j) m[i][j] -= f * m[r][j];
        }
        ++r;
    }
    return r;
}

inline Int gram_det(const IntMatrix& B) { return det(B * B.transpose()); }

/// Closure of the generated group, as a list of matrices.
inline std::vector<IntMatrix> enumerate_group(const std::vector<IntMatrix>& gens, std::size_t k, std::size_t limit = 4000) {
    std::vector<IntMatrix> elems{IntMatrix::identity(k)};
    std::set<std::vector<std::vector<Int>>> seen{elems[0].to_rows()};
    for (std::size_t i = 0; i < elems.size(); ++i)
        for (const auto& g : gens) {
            IntMatrix h = elems[i] * g;
            if (seen.insert(h.to_rows()).second) elems.push_back(h);
            if (elems.size() > limit) throw std::runtime_error("group too large");
        }
    return elems;
}

inline IntMatrix signed_permutation(const std::vector<std::size_t>& perm, const std::vector<int>& signs) {
    IntMatrix m(perm.size(), perm.size());
    for (std::size_t j = 0; j < perm.size(); ++j) m(perm[j], j) = signs[j];
    return m;
}

inline IntMatrix companion(const ZPoly& monic) {
    const std::size_t d = monic.size() - 1;
    IntMatrix C(d, d);
    for (std::size_t i = 1; i < d; ++i) C(i, i - 1) = 1;
    for (std::size_t i = 0; i < d; ++i) C(i, d - 1) = -monic[i];
    return C;
}

inline IntMatrix block_diag(const std::vector<IntMatrix>& blocks) {
    std::size_t k = 0;
    for (const auto& b : blocks) k += b.rows();
    IntMatrix M(k, k);
    std::size_t pos = 0;
    for (const auto& b : blocks) {
        for (std::size_t i = 0; i < b.rows(); ++i)
            for (std::size_t j = 0; j < b.cols(); ++j) M(pos + i, pos + j) = b(i, j);
        pos += b.rows();
    }
    return M;
}

/// Random signed-permutation group (1 or 2 generators) conjugated out of the permutation basis,
/// with relations g^{order(g)} = 1.
struct RationalRep {
    std::size_t k = 0;
    std::vector<IntMatrix> gens;
    std::vector<std::vector<std::size_t>> relations;
};

inline RationalRep random_rational_rep(std::mt19937_64& rng, std::size_t k, int ngens) {
    RationalRep R;
    R.k = k;
    for (int gi = 0; gi < ngens; ++gi) {
        std::vector<std::size_t> perm(k);
        for (std::size_t i = 0; i < k; ++i) perm[i] = i;
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<int> signs(k);
        for (auto& s : signs) s = (rng() % 3 == 0) ? -1 : 1;
        R.gens.push_back(signed_permutation(perm, signs));
    }
    IntMatrix P = IntMatrix::identity(k);
    for (int s = 0; s < 6; ++s) {
        const std::size_t a = rng() % k, b = rng() % k;
        if (a != b) P.add_row(a, b, static_cast<long>(rng() % 5) - 2);
    }
    const IntMatrix Pinv = inverse_unimodular(P);
    for (auto& g : R.gens) g = P * g * Pinv;
    for (std::size_t gi = 0; gi < R.gens.size(); ++gi) {
        IntMatrix acc = R.gens[gi];
        std::vector<std::size_t> word{gi};
        while (!(acc == IntMatrix::identity(k))) {
            acc = acc * R.gens[gi];
            word.push_back(gi);
        }
        R.relations.push_back(word);
    }
    return R;
}

/// (1/|G|) sum of traces over the enumerated group.
inline Rational averaged_trace(const RationalRep& R) {
    const auto group = enumerate_group(R.gens, R.k);
    Int trace_sum = 0;
    for (const auto& h : group)
        for (std::size_t i = 0; i < R.k; ++i) trace_sum += h(i, i);
    return Rational(trace_sum, Int(group.size()));
}

/// Global slot at which task i receives its h-th quantum, from the closed form of the doubling schedule.
inline unsigned long long reference_slot(unsigned i, unsigned long long h) {
    // quanta of task i after round R: 2^{R-i+1} - 1
    unsigned R = i;
    while ((1ULL << (R - i + 1)) - 1 < h) ++R;
    const unsigned long long before = (1ULL << (R - i)) - 1;   // quanta in rounds < R
    const unsigned long long j = h - before;                  // j-th quantum inside round R
    const unsigned long long k = (1ULL << (i - 1)) * (2 * j - 1);
    unsigned long long earlier = 0;
    for (unsigned r = 1; r < R; ++r) earlier += (1ULL << r) - 1;
    return earlier + k;
}

/// Random finite-order integer matrix: conjugated block sum of signed permutations and cyclotomic companions.
inline IntMatrix random_finite_order(std::mt19937_64& rng, const std::vector<ZPoly>& cyclotomics, bool unsigned_perms,
                                     std::size_t max_dim = 6) {
    for (;;) {
        std::vector<IntMatrix> blocks;
        const int nb = 1 + rng() % 3;
        for (int b = 0; b < nb; ++b) {
            if (rng() % 2) {
                const std::size_t k = 1 + rng() % 3;
                std::vector<std::size_t> perm(k);
                for (std::size_t i = 0; i < k; ++i) perm[i] = i;
                std::shuffle(perm.begin(), perm.end(), rng);
                IntMatrix S(k, k);
                for (std::size_t j = 0; j < k; ++j) S(perm[j], j) = unsigned_perms ? 1 : ((rng() % 2) ? 1 : -1);
                blocks.push_back(S);
            } else {
                blocks.push_back(companion(cyclotomics[rng() % cyclotomics.size()]));
            }
        }
        IntMatrix M = block_diag(blocks);
        if (M.rows() > max_dim) continue;
        IntMatrix P = IntMatrix::identity(M.rows());
        for (int s = 0; s < 8 && M.rows() > 1; ++s) {
            const std::size_t a = rng() % M.rows(), b = rng() % M.rows();
            if (a != b) P.add_row(a, b, static_cast<long>(rng() % 5) - 2);
        }
        return P * M * inverse_unimodular(P);
    }
}

/// #V(gens)(F_{p^n}) by enumerating normalized points of P^{nvars-1}. Integer coefficients only.
inline std::uint64_t brute_projective_count(std::uint32_t p, unsigned n, std::size_t nvars, const std::vector<std::string>& gens) {
    const GaloisField K(make_field(p, n));
    std::vector<MultiPoly<GaloisField>> polys;
    for (const auto& g : gens) polys.push_back(parse_poly(K, nvars, g));
    const std::uint64_t Q = K.size();
    std::uint64_t count = 0;
    std::vector<std::uint32_t> pt(nvars);
    for (std::size_t lead = 0; lead < nvars; ++lead) {
        // coordinates before lead are 0, lead is 1, the rest run over F_Q
        const std::size_t free = nvars - lead - 1;
        std::uint64_t total = 1;
        for (std::size_t i = 0; i < free; ++i) total *= Q;
        for (std::uint64_t idx = 0; idx < total; ++idx) {
            std::fill(pt.begin(), pt.end(), 0);
            pt[lead] = K.one();
            std::uint64_t rest = idx;
            for (std::size_t i = lead + 1; i < nvars; ++i) {
                pt[i] = static_cast<std::uint32_t>(rest % Q);
                rest /= Q;
            }
            bool on = true;
            for (const auto& f : polys) on = on && K.is_zero(f.evaluate(pt));
            count += on;
        }
    }
    return count;
}

} // namespace oracles
