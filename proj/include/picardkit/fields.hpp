#pragma once

// Coefficient-field contexts used by the polynomial and counting code.
//
// A context F provides value_type and zero/one/from_int/add/sub/neg/mul/inv,
// is_zero, characteristic and to_string. Rationals is stateless; GaloisField
// shares immutable log/antilog tables between copies.

#include "bigint.hpp"
#include "errors.hpp"
#include "ffield.hpp"

#include <memory>
#include <string>
#include <vector>

namespace picardkit {

struct Rationals {
    using value_type = Rational;

    value_type zero() const { return 0; }
    value_type one() const { return 1; }
    value_type from_int(long long v) const { return v; }
    value_type from_rational(const Rational& r) const { return r; }
    value_type add(const value_type& a, const value_type& b) const { return a + b; }
    value_type sub(const value_type& a, const value_type& b) const { return a - b; }
    value_type neg(const value_type& a) const { return -a; }
    value_type mul(const value_type& a, const value_type& b) const { return a * b; }
    value_type inv(const value_type& a) const {
        if (a == 0) throw Error(ErrorKind::division_by_zero, "inverse of zero in Q");
        return 1 / a;
    }
    bool is_zero(const value_type& a) const { return a == 0; }
    std::uint64_t characteristic() const { return 0; }
    std::string to_string(const value_type& a) const { return a.str(); }
    bool operator==(const Rationals&) const { return true; }
};

/// Largest field for which GaloisField builds full tables.
inline constexpr std::uint64_t kMaxTableField = std::uint64_t(1) << 22;

/// Table-backed F_q with elements encoded by their enumeration index.
class GaloisField {
public:
    using value_type = std::uint32_t;

    explicit GaloisField(const FieldDesc& desc) : t_(std::make_shared<Tables>(desc)) {}

    const FieldDesc& desc() const { return t_->desc; }
    std::uint64_t characteristic() const { return t_->desc.p; }
    std::uint64_t size() const { return t_->q; }
    unsigned degree() const { return t_->desc.e; }

    value_type zero() const { return 0; }
    value_type one() const { return 1; }
    value_type from_int(long long v) const {
        long long m = v % static_cast<long long>(t_->desc.p);
        if (m < 0) m += t_->desc.p;
        return static_cast<value_type>(m);
    }
    value_type from_rational(const Rational& r) const {
        const Int p = t_->desc.p;
        const Int d = mod(denom(r), p);
        if (d == 0) throw Error(ErrorKind::invalid_input, "denominator divisible by the characteristic");
        const auto n = static_cast<long long>(mod(numer(r), p));
        return mul(from_int(n), inv(from_int(static_cast<long long>(d))));
    }

    /// The class of x in F_p[x]/(modulus).
    value_type generator() const { return static_cast<value_type>(t_->desc.e == 1 ? (t_->desc.p - t_->desc.modulus[0]) % t_->desc.p : t_->desc.p); }

    bool is_zero(value_type a) const { return a == 0; }

    value_type add(value_type a, value_type b) const {
        if (t_->desc.p == 2) return a ^ b;
        if (t_->desc.e == 1) {
            const std::uint32_t s = a + b;
            return s >= t_->desc.p ? s - t_->desc.p : s;
        }
        if (a == 0) return b;
        if (b == 0) return a;
        const std::uint32_t la = t_->log[a], lb = t_->log[b];
        const std::uint32_t d = lb >= la ? lb - la : lb + t_->order - la;
        const std::uint32_t z = t_->zech[d];
        if (z == kNone) return 0;
        return t_->exp[la + z];
    }

    value_type neg(value_type a) const {
        if (t_->desc.p == 2 || a == 0) return a;
        if (t_->desc.e == 1) return t_->desc.p - a;
        return t_->exp[t_->log[a] + t_->order / 2];
    }

    value_type sub(value_type a, value_type b) const { return add(a, neg(b)); }

    value_type mul(value_type a, value_type b) const {
        if (a == 0 || b == 0) return 0;
        return t_->exp[t_->log[a] + t_->log[b]];
    }

    value_type inv(value_type a) const {
        if (a == 0) throw Error(ErrorKind::division_by_zero, "inverse of zero in F_" + std::to_string(t_->q));
        const std::uint32_t l = t_->log[a];
        return t_->exp[l == 0 ? 0 : t_->order - l];
    }

    value_type pow(value_type a, std::uint64_t e) const {
        if (e == 0) return 1;
        if (a == 0) return 0;
        const std::uint64_t l = (std::uint64_t(t_->log[a]) * (e % t_->order)) % t_->order;
        return t_->exp[l];
    }

    /// Discrete log to the base of the primitive element; a must be nonzero.
    std::uint32_t log(value_type a) const { return t_->log[a]; }
    value_type exp(std::uint64_t k) const { return t_->exp[k % t_->order]; }
    std::uint32_t group_order() const { return t_->order; }

    /// Absolute trace to F_p of a (table lookup).
    std::uint32_t trace(value_type a) const { return t_->trace[a]; }

    value_type frobenius(value_type a) const { return pow(a, t_->desc.p); }

    FieldElement element(value_type a) const { return FiniteField(t_->desc).from_index(a); }
    value_type code(const FieldElement& x) const { return static_cast<value_type>(FiniteField(t_->desc).to_index(x)); }

    std::string to_string(value_type a) const {
        if (t_->desc.e == 1) return std::to_string(a);
        const std::string s = FiniteField(t_->desc).to_string(element(a));
        return (s.find('+') != std::string::npos) ? "(" + s + ")" : s;
    }

    bool operator==(const GaloisField& o) const { return t_ == o.t_ || t_->desc == o.t_->desc; }

private:
    static constexpr std::uint32_t kNone = 0xffffffffu;

    struct Tables {
        FieldDesc desc;
        std::uint64_t q;
        std::uint32_t order;
        std::vector<std::uint32_t> log, exp, zech, trace;

        explicit Tables(const FieldDesc& d) : desc(d), q(d.size()) {
            require(q <= kMaxTableField, ErrorKind::budget_exceeded,
                    "field of size " + std::to_string(q) + " exceeds the table limit");
            order = static_cast<std::uint32_t>(q - 1);
            FiniteField F(desc);
            log.assign(q, 0);
            exp.assign(2 * std::size_t(order) + 1, 0);
            const FieldElement g = F.primitive_element();
            FieldElement cur = F.one();
            for (std::uint32_t k = 0; k < order; ++k) {
                const auto c = static_cast<std::uint32_t>(F.to_index(cur));
                exp[k] = c;
                log[c] = k;
                cur = F.mul(cur, g);
            }
            for (std::uint32_t k = order; k < exp.size(); ++k) exp[k] = exp[k - order];
            zech.assign(order, kNone);
            for (std::uint32_t k = 0; k < order; ++k) {
                // 1 + g^k: bump the constant digit.
                std::uint64_t c = exp[k];
                const std::uint64_t d0 = c % desc.p;
                c = c - d0 + (d0 + 1) % desc.p;
                if (c != 0) zech[k] = log[c];
            }
            // Absolute trace is additive: trace(sum c_i a^i) = sum c_i trace(a^i).
            std::vector<std::uint32_t> basis_trace(desc.e, 0);
            for (unsigned i = 0; i < desc.e; ++i) {
                FieldElement x = F.from_index(0);
                x.coeffs[i] = 1;
                FieldElement acc = F.zero(), y = x;
                for (unsigned j = 0; j < desc.e; ++j) {
                    acc = F.add(acc, y);
                    y = F.frobenius(y);
                }
                basis_trace[i] = acc.coeffs[0];
            }
            trace.assign(q, 0);
            for (std::uint64_t c = 0; c < q; ++c) {
                std::uint64_t v = c, t = 0;
                for (unsigned i = 0; i < desc.e; ++i) {
                    t += (v % desc.p) * basis_trace[i];
                    v /= desc.p;
                }
                trace[c] = static_cast<std::uint32_t>(t % desc.p);
            }
        }
    };

    std::shared_ptr<const Tables> t_;
};

} // namespace picardkit
