#pragma once

// Integer matrices, Smith and Hermite forms, saturation, lattices with a
// finite group action, and the certified rank loop.

#include "bigint.hpp"
#include "errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace picardkit {

class IntMatrix {
public:
    IntMatrix() = default;
    IntMatrix(std::size_t rows, std::size_t cols) : r_(rows), c_(cols), a_(rows * cols, 0) {}
    IntMatrix(std::initializer_list<std::initializer_list<long long>> rows) {
        r_ = rows.size();
        c_ = r_ ? rows.begin()->size() : 0;
        for (const auto& row : rows) {
            require(row.size() == c_, ErrorKind::invalid_input, "ragged matrix literal");
            for (long long v : row) a_.emplace_back(v);
        }
    }
    static IntMatrix from_rows(const std::vector<std::vector<Int>>& rows, std::size_t cols = 0) {
        IntMatrix m(rows.size(), rows.empty() ? cols : rows[0].size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            require(rows[i].size() == m.c_, ErrorKind::invalid_input, "ragged matrix");
            for (std::size_t j = 0; j < m.c_; ++j) m(i, j) = rows[i][j];
        }
        return m;
    }
    static IntMatrix identity(std::size_t n) {
        IntMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }

    std::size_t rows() const { return r_; }
    std::size_t cols() const { return c_; }
    Int& operator()(std::size_t i, std::size_t j) { return a_[i * c_ + j]; }
    const Int& operator()(std::size_t i, std::size_t j) const { return a_[i * c_ + j]; }

    std::vector<Int> row(std::size_t i) const { return {a_.begin() + static_cast<long>(i * c_), a_.begin() + static_cast<long>((i + 1) * c_)}; }
    std::vector<std::vector<Int>> to_rows() const {
        std::vector<std::vector<Int>> out;
        for (std::size_t i = 0; i < r_; ++i) out.push_back(row(i));
        return out;
    }

    IntMatrix transpose() const {
        IntMatrix t(c_, r_);
        for (std::size_t i = 0; i < r_; ++i)
            for (std::size_t j = 0; j < c_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    IntMatrix operator*(const IntMatrix& o) const {
        require(c_ == o.r_, ErrorKind::invalid_input, "matrix shapes do not match");
        IntMatrix m(r_, o.c_);
        for (std::size_t i = 0; i < r_; ++i)
            for (std::size_t k = 0; k < c_; ++k) {
                const Int& v = (*this)(i, k);
                if (v == 0) continue;
                for (std::size_t j = 0; j < o.c_; ++j) m(i, j) += v * o(k, j);
            }
        return m;
    }
    IntMatrix operator-(const IntMatrix& o) const {
        IntMatrix m = *this;
        for (std::size_t i = 0; i < a_.size(); ++i) m.a_[i] -= o.a_[i];
        return m;
    }
    bool operator==(const IntMatrix& o) const = default;

    bool is_zero() const {
        return std::all_of(a_.begin(), a_.end(), [](const Int& v) { return v == 0; });
    }

    void swap_rows(std::size_t a, std::size_t b) {
        for (std::size_t j = 0; j < c_; ++j) std::swap((*this)(a, j), (*this)(b, j));
    }
    void swap_cols(std::size_t a, std::size_t b) {
        for (std::size_t i = 0; i < r_; ++i) std::swap((*this)(i, a), (*this)(i, b));
    }
    /// row_dst += f * row_src
    void add_row(std::size_t dst, std::size_t src, const Int& f) {
        if (f == 0) return;
        for (std::size_t j = 0; j < c_; ++j) (*this)(dst, j) += f * (*this)(src, j);
    }
    void add_col(std::size_t dst, std::size_t src, const Int& f) {
        if (f == 0) return;
        for (std::size_t i = 0; i < r_; ++i) (*this)(i, dst) += f * (*this)(i, src);
    }
    void negate_row(std::size_t i) {
        for (std::size_t j = 0; j < c_; ++j) (*this)(i, j) = -(*this)(i, j);
    }

    /// Rows listed in `idx`, columns in `jdx`.
    IntMatrix submatrix(const std::vector<std::size_t>& idx, const std::vector<std::size_t>& jdx) const {
        IntMatrix m(idx.size(), jdx.size());
        for (std::size_t i = 0; i < idx.size(); ++i)
            for (std::size_t j = 0; j < jdx.size(); ++j) m(i, j) = (*this)(idx[i], jdx[j]);
        return m;
    }

    /// Vertical concatenation.
    static IntMatrix stack(const std::vector<IntMatrix>& parts, std::size_t cols) {
        std::size_t total = 0;
        for (const auto& p : parts) total += p.rows();
        IntMatrix m(total, cols);
        std::size_t r = 0;
        for (const auto& p : parts) {
            require(p.cols() == cols, ErrorKind::invalid_input, "stacked matrices differ in width");
            for (std::size_t i = 0; i < p.rows(); ++i, ++r)
                for (std::size_t j = 0; j < cols; ++j) m(r, j) = p(i, j);
        }
        return m;
    }

private:
    std::size_t r_ = 0, c_ = 0;
    std::vector<Int> a_;
};

inline nlohmann::json to_json(const IntMatrix& m) {
    nlohmann::json a = nlohmann::json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) {
            const Int& v = m(i, j);
            if (abs(v) < Int(1) << 62) row.push_back(static_cast<long long>(v));
            else row.push_back(v.str());
        }
        a.push_back(row);
    }
    return a;
}

inline IntMatrix int_matrix_from_json(const nlohmann::json& j) {
    std::vector<std::vector<Int>> rows;
    for (const auto& r : j) {
        std::vector<Int> row;
        for (const auto& v : r) row.push_back(v.is_string() ? Int(v.get<std::string>()) : Int(v.get<long long>()));
        rows.push_back(std::move(row));
    }
    return IntMatrix::from_rows(rows);
}

struct SNFResult {
    IntMatrix U, D, V, Vinv;   // U * M * V = D, V * Vinv = I

    std::vector<Int> diagonal() const {
        std::vector<Int> d;
        for (std::size_t i = 0; i < std::min(D.rows(), D.cols()); ++i) d.push_back(D(i, i));
        return d;
    }
    std::size_t rank() const {
        std::size_t r = 0;
        for (const auto& v : diagonal()) r += (v != 0);
        return r;
    }
};

namespace detail {
inline void positive_diagonal(SNFResult& R) {
    for (std::size_t t = 0; t < std::min(R.D.rows(), R.D.cols()); ++t)
        if (R.D(t, t) < 0) {
            R.D.negate_row(t);
            R.U.negate_row(t);
        }
}
} // namespace detail

/// Smith normal form. Pivot: smallest nonzero |entry|, ties to the lowest row, then column.
inline SNFResult snf(const IntMatrix& M) {
    const std::size_t m = M.rows(), n = M.cols();
    SNFResult R{IntMatrix::identity(m), M, IntMatrix::identity(n), IntMatrix::identity(n)};
    IntMatrix& D = R.D;
    auto row_add = [&](std::size_t dst, std::size_t src, const Int& f) {
        D.add_row(dst, src, f);
        R.U.add_row(dst, src, f);
    };
    auto col_add = [&](std::size_t dst, std::size_t src, const Int& f) {
        D.add_col(dst, src, f);
        R.V.add_col(dst, src, f);
        R.Vinv.add_row(src, dst, -f);
    };
    auto row_swap = [&](std::size_t a, std::size_t b) {
        if (a == b) return;
        D.swap_rows(a, b);
        R.U.swap_rows(a, b);
    };
    auto col_swap = [&](std::size_t a, std::size_t b) {
        if (a == b) return;
        D.swap_cols(a, b);
        R.V.swap_cols(a, b);
        R.Vinv.swap_rows(a, b);
    };
    for (std::size_t t = 0; t < std::min(m, n); ++t) {
        for (;;) {
            // pivot search
            std::optional<std::pair<std::size_t, std::size_t>> piv;
            for (std::size_t i = t; i < m; ++i)
                for (std::size_t j = t; j < n; ++j) {
                    if (D(i, j) == 0) continue;
                    if (!piv || abs(D(i, j)) < abs(D(piv->first, piv->second))) piv = {i, j};
                }
            if (!piv) {
                detail::positive_diagonal(R);
                return R;
            }
            row_swap(t, piv->first);
            col_swap(t, piv->second);
            bool clean = true;
            for (std::size_t i = t + 1; i < m; ++i) {
                if (D(i, t) == 0) continue;
                row_add(i, t, -Int(D(i, t) / D(t, t)));
                if (D(i, t) != 0) clean = false;
            }
            for (std::size_t j = t + 1; j < n; ++j) {
                if (D(t, j) == 0) continue;
                col_add(j, t, -Int(D(t, j) / D(t, t)));
                if (D(t, j) != 0) clean = false;
            }
            if (!clean) continue;
            // divisibility of the remaining block
            std::optional<std::size_t> bad;
            for (std::size_t i = t + 1; i < m && !bad; ++i)
                for (std::size_t j = t + 1; j < n; ++j)
                    if (D(i, j) % D(t, t) != 0) {
                        bad = i;
                        break;
                    }
            if (!bad) break;
            row_add(t, *bad, 1);
        }
    }
    detail::positive_diagonal(R);
    return R;
}

/// Row-style Hermite normal form with zero rows removed (canonical basis of the row lattice).
inline IntMatrix hermite_rows(IntMatrix A) {
    const std::size_t m = A.rows(), n = A.cols();
    std::size_t r = 0;
    for (std::size_t c = 0; c < n && r < m; ++c) {
        // Euclid down the column
        for (;;) {
            std::optional<std::size_t> piv;
            for (std::size_t i = r; i < m; ++i)
                if (A(i, c) != 0 && (!piv || abs(A(i, c)) < abs(A(*piv, c)))) piv = i;
            if (!piv) break;
            A.swap_rows(r, *piv);
            bool done = true;
            for (std::size_t i = r + 1; i < m; ++i) {
                if (A(i, c) == 0) continue;
                A.add_row(i, r, -Int(A(i, c) / A(r, c)));
                if (A(i, c) != 0) done = false;
            }
            if (done) break;
        }
        if (r >= m || A(r, c) == 0) continue;
        if (A(r, c) < 0) A.negate_row(r);
        for (std::size_t i = 0; i < r; ++i) A.add_row(i, r, -floor_div(A(i, c), A(r, c)));
        ++r;
    }
    std::vector<std::size_t> keep(r), cols(n);
    for (std::size_t i = 0; i < r; ++i) keep[i] = i;
    for (std::size_t j = 0; j < n; ++j) cols[j] = j;
    return A.submatrix(keep, cols);
}

/// x with x * H = v for H in Hermite form, if it exists.
inline std::optional<std::vector<Int>> hermite_coordinates(const IntMatrix& H, const std::vector<Int>& v) {
    require(v.size() == H.cols(), ErrorKind::invalid_input, "vector has wrong length");
    std::vector<Int> x(H.rows(), 0), rest = v;
    std::size_t col = 0;
    for (std::size_t i = 0; i < H.rows(); ++i) {
        while (H(i, col) == 0) ++col;
        if (rest[col] % H(i, col) != 0) return std::nullopt;
        x[i] = rest[col] / H(i, col);
        for (std::size_t j = 0; j < H.cols(); ++j) rest[j] -= x[i] * H(i, j);
    }
    for (const auto& r : rest)
        if (r != 0) return std::nullopt;
    return x;
}

inline std::size_t rank(const IntMatrix& M) { return hermite_rows(M).rows(); }

/// Determinant by fraction-free elimination.
inline Int det(IntMatrix A) {
    const std::size_t n = A.rows();
    require(n == A.cols(), ErrorKind::invalid_input, "determinant of a non-square matrix");
    Int sign = 1, prev = 1;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        while (p < n && A(p, k) == 0) ++p;
        if (p == n) return 0;
        if (p != k) {
            A.swap_rows(p, k);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j) A(i, j) = (A(i, j) * A(k, k) - A(i, k) * A(k, j)) / prev;
            A(i, k) = 0;
        }
        prev = A(k, k);
    }
    return sign * A(n - 1, n - 1);
}

/// Inverse of a unimodular matrix (throws if not invertible over Z).
inline IntMatrix inverse_unimodular(const IntMatrix& A) {
    const auto R = snf(A);
    require(A.rows() == A.cols(), ErrorKind::invalid_input, "inverse of a non-square matrix");
    for (const auto& d : R.diagonal())
        require(d == 1, ErrorKind::invalid_input, "matrix is not invertible over Z");
    // U A V = I  =>  A^{-1} = V U
    return R.V * R.U;
}

/// Basis (Hermite form) of {b in Z^k : m b in span for some m != 0}.
inline IntMatrix saturate(const IntMatrix& span, std::size_t ambient_rank) {
    require(span.rows() == 0 || span.cols() == ambient_rank, ErrorKind::invalid_input, "span vectors have wrong length");
    if (span.rows() == 0) return IntMatrix(0, ambient_rank);
    const auto R = snf(span);
    const std::size_t r = R.rank();
    std::vector<std::size_t> idx(r), cols(ambient_rank);
    for (std::size_t i = 0; i < r; ++i) idx[i] = i;
    for (std::size_t j = 0; j < ambient_rank; ++j) cols[j] = j;
    return hermite_rows(R.Vinv.submatrix(idx, cols));
}

struct IndependenceCertificate {
    std::size_t rank = 0;
    std::vector<std::size_t> rows, cols;   // a nonsingular rank x rank minor
    Int minor_det = 1;
};

inline IndependenceCertificate independence_certificate(const IntMatrix& M) {
    IndependenceCertificate C;
    std::vector<std::size_t> all_cols(M.cols());
    for (std::size_t j = 0; j < M.cols(); ++j) all_cols[j] = j;
    // greedy rows
    for (std::size_t i = 0; i < M.rows(); ++i) {
        auto trial = C.rows;
        trial.push_back(i);
        if (rank(M.submatrix(trial, all_cols)) == trial.size()) C.rows = std::move(trial);
    }
    C.rank = C.rows.size();
    // greedy columns within those rows
    const IntMatrix Rsub = M.submatrix(C.rows, all_cols).transpose();
    std::vector<std::size_t> chosen;
    for (std::size_t j = 0; j < Rsub.rows() && chosen.size() < C.rank; ++j) {
        auto trial = chosen;
        trial.push_back(j);
        std::vector<std::size_t> rc(Rsub.cols());
        for (std::size_t k = 0; k < rc.size(); ++k) rc[k] = k;
        if (rank(Rsub.submatrix(trial, rc)) == trial.size()) chosen = std::move(trial);
    }
    C.cols = std::move(chosen);
    C.minor_det = C.rank ? det(M.submatrix(C.rows, C.cols)) : Int(1);
    return C;
}

// ---------------------------------------------------------------------------

/// Free Z-module of rank k with a finite group given by generator matrices and relations.
struct GLattice {
    std::size_t rank = 0;
    std::vector<IntMatrix> generators;
    std::vector<std::vector<std::size_t>> relations;   // words in generator indices equal to the identity
    std::vector<std::string> labels;

    GLattice() = default;
    GLattice(std::size_t k, std::vector<IntMatrix> gens, std::vector<std::vector<std::size_t>> rels,
             std::vector<std::string> labs = {})
        : rank(k), generators(std::move(gens)), relations(std::move(rels)), labels(std::move(labs)) {
        validate();
    }

    void validate() const {
        for (const auto& g : generators) {
            require(g.rows() == rank && g.cols() == rank, ErrorKind::invalid_input, "action matrix has wrong size");
            const Int d = det(g);
            require(d == 1 || d == -1, ErrorKind::relation_violation, "action matrix is not invertible over Z");
        }
        for (const auto& w : relations) {
            IntMatrix prod = IntMatrix::identity(rank);
            for (auto i : w) {
                require(i < generators.size(), ErrorKind::invalid_input, "relation names an unknown generator");
                prod = prod * generators[i];
            }
            require(prod == IntMatrix::identity(rank), ErrorKind::relation_violation, "group relation does not hold");
        }
    }
};

inline std::size_t invariants_rank(const GLattice& L) {
    L.validate();
    if (L.generators.empty()) return L.rank;
    std::vector<IntMatrix> parts;
    for (const auto& g : L.generators) parts.push_back(g - IntMatrix::identity(L.rank));
    return L.rank - rank(IntMatrix::stack(parts, L.rank));
}

/// The lattice N inside Hom(Y, Z) with coordinates for further cycles.
struct NLattice {
    GLattice lattice;
    IntMatrix basis;   // rows: basis of N in Hom(Y, Z) coordinates

    /// Coordinates of a pairing vector against Y in the basis of N.
    std::vector<Int> coordinates(const std::vector<Int>& v) const {
        auto x = hermite_coordinates(basis, v);
        require(x.has_value(), ErrorKind::invalid_input, "vector is not in N");
        return *x;
    }
};

/// Saturated span of the pairing rows inside Hom(Y, Z), with the dual G-action.
/// `actionOnY[g]` acts on coordinate columns of Y.
inline NLattice build_N(const IntMatrix& pairings, const std::vector<IntMatrix>& actionOnY,
                        const std::vector<std::vector<std::size_t>>& relations, std::size_t rho) {
    const std::size_t k = pairings.cols();
    const std::size_t r = rank(pairings);
    require(r == rho, ErrorKind::rank_mismatch,
            "pairing matrix has rank " + std::to_string(r) + " but rho = " + std::to_string(rho));
    GLattice onY(k, actionOnY, relations);   // validates the action on Y
    NLattice N;
    N.basis = saturate(pairings, k);
    std::vector<IntMatrix> induced;
    for (const auto& A : actionOnY) {
        const IntMatrix image = N.basis * inverse_unimodular(A);   // phi -> phi o g^{-1}
        IntMatrix C(r, r);
        for (std::size_t i = 0; i < r; ++i) {
            const auto x = N.coordinates(image.row(i));
            for (std::size_t j = 0; j < r; ++j) C(i, j) = x[j];
        }
        // Row convention: image = C * basis; act on coordinate columns by C^T.
        induced.push_back(C.transpose());
    }
    N.lattice = GLattice(r, std::move(induced), relations);
    return N;
}

// ---------------------------------------------------------------------------

struct RankCertificate {
    enum class Kind { lower, upper };
    Kind kind = Kind::lower;
    unsigned value = 0;
    std::vector<std::string> rowLabels, colLabels;   // lower: cycles y_i and z_j of the minor
    IntMatrix minor;                                 // lower: the intersection minor
    std::string reference;                           // upper: description of the bound

    /// Re-checks a lower certificate: the minor is square of size value and nonsingular.
    bool recheck() const {
        if (kind == Kind::upper) return true;
        return minor.rows() == value && minor.cols() == value && (value == 0 || det(minor) != 0);
    }
};

/// Lower certificate from an intersection matrix (rows y_i, columns z_j).
inline RankCertificate lower_certificate(const IntMatrix& M, const std::vector<std::string>& rowLabels,
                                         const std::vector<std::string>& colLabels) {
    const auto C = independence_certificate(M);
    RankCertificate R;
    R.value = static_cast<unsigned>(C.rank);
    R.minor = M.submatrix(C.rows, C.cols);
    for (auto i : C.rows) R.rowLabels.push_back(i < rowLabels.size() ? rowLabels[i] : "y" + std::to_string(i));
    for (auto j : C.cols) R.colLabels.push_back(j < colLabels.size() ? colLabels[j] : "z" + std::to_string(j));
    return R;
}

/// Consumes lower certificates until one reaches the Tate upper bound.
class AlgorithmB {
public:
    AlgorithmB(unsigned p, unsigned vMu, std::string inputs_digest)
        : p_(p), vMu_(vMu), digest_(std::move(inputs_digest)) {}

    /// Returns true once the best lower bound equals vMu.
    bool offer(const RankCertificate& c) {
        require(c.kind == RankCertificate::Kind::lower, ErrorKind::invalid_input, "only lower certificates are consumed");
        require(c.recheck(), ErrorKind::certificate_invalid, "certificate minor is singular or misshapen");
        require(c.value <= vMu_, ErrorKind::certificate_invalid,
                "certificate claims rank " + std::to_string(c.value) + " above the upper bound " + std::to_string(vMu_));
        ++offered_;
        if (c.value > best_) {
            best_ = c.value;
            best_cert_ = c;
        }
        history_.push_back(best_);
        return halted();
    }

    bool halted() const { return best_ == vMu_; }
    unsigned best() const { return best_; }
    unsigned upper() const { return vMu_; }
    unsigned codimension() const { return p_; }
    const std::vector<unsigned>& history() const { return history_; }
    const std::optional<RankCertificate>& best_certificate() const { return best_cert_; }

    nlohmann::json checkpoint() const {
        nlohmann::json j{{"p", p_}, {"vMu", vMu_}, {"digest", digest_}, {"best", best_}, {"offered", offered_},
                         {"history", history_}};
        if (best_cert_) {
            j["certificate"] = {{"value", best_cert_->value},
                                {"rows", best_cert_->rowLabels},
                                {"cols", best_cert_->colLabels},
                                {"minor", to_json(best_cert_->minor)}};
        }
        return j;
    }

    static AlgorithmB resume(const nlohmann::json& j, const std::string& expected_digest) {
        require(j.at("digest").get<std::string>() == expected_digest, ErrorKind::invalid_input,
                "checkpoint belongs to different inputs");
        AlgorithmB a(j.at("p").get<unsigned>(), j.at("vMu").get<unsigned>(), expected_digest);
        a.offered_ = j.at("offered").get<unsigned>();
        a.history_ = j.at("history").get<std::vector<unsigned>>();
        if (j.contains("certificate")) {
            RankCertificate c;
            const auto& cj = j.at("certificate");
            c.value = cj.at("value").get<unsigned>();
            c.rowLabels = cj.at("rows").get<std::vector<std::string>>();
            c.colLabels = cj.at("cols").get<std::vector<std::string>>();
            c.minor = int_matrix_from_json(cj.at("minor"));
            require(c.recheck(), ErrorKind::certificate_invalid, "checkpointed certificate fails its recheck");
            a.best_cert_ = c;
            a.best_ = c.value;
        }
        require(a.best_ == j.at("best").get<unsigned>(), ErrorKind::invalid_input, "checkpoint is internally inconsistent");
        return a;
    }

private:
    unsigned p_, vMu_;
    std::string digest_;
    unsigned best_ = 0, offered_ = 0;
    std::vector<unsigned> history_;
    std::optional<RankCertificate> best_cert_;
};

} // namespace picardkit
