#pragma once

// Sparse multivariate polynomials over a coefficient-field context, with the
// plain-text grammar used by variety files:
//
//   poly    = [ "+" | "-" ] term { ( "+" | "-" ) term } ;
//   term    = factor { "*" factor } ;
//   factor  = primary [ "^" integer ] ;
//   primary = integer [ "/" integer ] | "a" | "x" integer | "(" poly ")" ;
//
// Variables are x0..x{n-1}. "a" is the generator of the coefficient field
// F_p[a]/(modulus) and is rejected over Q. Whitespace is ignored.

#include "errors.hpp"
#include "fields.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace picardkit {

inline constexpr std::size_t kMaxVars = 16;

struct Monomial {
    std::array<std::uint16_t, kMaxVars> e{};
    std::uint8_t n = 0;

    Monomial() = default;
    explicit Monomial(std::size_t nvars) : n(static_cast<std::uint8_t>(nvars)) {
        require(nvars <= kMaxVars, ErrorKind::invalid_input, "too many variables");
    }

    static Monomial var(std::size_t nvars, std::size_t i, unsigned power = 1) {
        Monomial m(nvars);
        m.e[i] = static_cast<std::uint16_t>(power);
        return m;
    }

    std::uint16_t operator[](std::size_t i) const { return e[i]; }
    std::uint16_t& operator[](std::size_t i) { return e[i]; }
    std::size_t size() const { return n; }

    unsigned degree() const {
        unsigned d = 0;
        for (std::size_t i = 0; i < n; ++i) d += e[i];
        return d;
    }

    Monomial operator*(const Monomial& o) const {
        Monomial r(n);
        for (std::size_t i = 0; i < n; ++i) r.e[i] = static_cast<std::uint16_t>(e[i] + o.e[i]);
        return r;
    }

    bool divides(const Monomial& o) const {
        for (std::size_t i = 0; i < n; ++i)
            if (e[i] > o.e[i]) return false;
        return true;
    }

    /// o / this, assuming divisibility.
    Monomial quotient_of(const Monomial& o) const {
        Monomial r(n);
        for (std::size_t i = 0; i < n; ++i) r.e[i] = static_cast<std::uint16_t>(o.e[i] - e[i]);
        return r;
    }

    Monomial lcm(const Monomial& o) const {
        Monomial r(n);
        for (std::size_t i = 0; i < n; ++i) r.e[i] = std::max(e[i], o.e[i]);
        return r;
    }

    Monomial gcd(const Monomial& o) const {
        Monomial r(n);
        for (std::size_t i = 0; i < n; ++i) r.e[i] = std::min(e[i], o.e[i]);
        return r;
    }

    bool coprime(const Monomial& o) const {
        for (std::size_t i = 0; i < n; ++i)
            if (e[i] && o.e[i]) return false;
        return true;
    }

    bool operator==(const Monomial& o) const { return n == o.n && e == o.e; }
    bool operator<(const Monomial& o) const { return e < o.e; }
};

enum class TermOrder { degrevlex, lex };

/// True when a is strictly larger than b in the given order.
inline bool term_greater(const Monomial& a, const Monomial& b, TermOrder order) {
    if (order == TermOrder::degrevlex) {
        const unsigned da = a.degree(), db = b.degree();
        if (da != db) return da > db;
        for (std::size_t i = a.n; i-- > 0;)
            if (a.e[i] != b.e[i]) return a.e[i] < b.e[i];
        return false;
    }
    for (std::size_t i = 0; i < a.n; ++i)
        if (a.e[i] != b.e[i]) return a.e[i] > b.e[i];
    return false;
}

template <class F>
class MultiPoly {
public:
    using coeff_type = typename F::value_type;
    using TermMap = std::map<Monomial, coeff_type>;

    MultiPoly() = default;
    MultiPoly(F field, std::size_t nvars) : field_(std::move(field)), nvars_(nvars) {
        require(nvars <= kMaxVars, ErrorKind::invalid_input, "too many variables");
    }

    static MultiPoly constant(const F& field, std::size_t nvars, const coeff_type& c) {
        MultiPoly r(field, nvars);
        r.add_term(Monomial(nvars), c);
        return r;
    }

    static MultiPoly variable(const F& field, std::size_t nvars, std::size_t i) {
        MultiPoly r(field, nvars);
        r.add_term(Monomial::var(nvars, i), field.one());
        return r;
    }

    static MultiPoly monomial(const F& field, const Monomial& m, const coeff_type& c) {
        MultiPoly r(field, m.size());
        r.add_term(m, c);
        return r;
    }

    const F& field() const { return field_; }
    std::size_t nvars() const { return nvars_; }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t num_terms() const { return terms_.size(); }

    void add_term(const Monomial& m, const coeff_type& c) {
        if (field_.is_zero(c)) return;
        auto it = terms_.find(m);
        if (it == terms_.end()) {
            terms_.emplace(m, c);
            return;
        }
        it->second = field_.add(it->second, c);
        if (field_.is_zero(it->second)) terms_.erase(it);
    }

    coeff_type coefficient(const Monomial& m) const {
        auto it = terms_.find(m);
        return it == terms_.end() ? field_.zero() : it->second;
    }

    /// Largest total degree; -1 for the zero polynomial.
    int total_degree() const {
        int d = -1;
        for (const auto& [m, c] : terms_) d = std::max(d, static_cast<int>(m.degree()));
        return d;
    }

    int degree_in(std::size_t var) const {
        int d = -1;
        for (const auto& [m, c] : terms_) d = std::max(d, static_cast<int>(m[var]));
        return d;
    }

    bool is_homogeneous() const {
        if (terms_.empty()) return true;
        const unsigned d = terms_.begin()->first.degree();
        return std::all_of(terms_.begin(), terms_.end(), [d](const auto& t) { return t.first.degree() == d; });
    }

    MultiPoly operator+(const MultiPoly& o) const {
        MultiPoly r = *this;
        for (const auto& [m, c] : o.terms_) r.add_term(m, c);
        return r;
    }

    MultiPoly operator-() const {
        MultiPoly r(field_, nvars_);
        for (const auto& [m, c] : terms_) r.terms_.emplace(m, field_.neg(c));
        return r;
    }

    MultiPoly operator-(const MultiPoly& o) const { return *this + (-o); }

    MultiPoly operator*(const MultiPoly& o) const {
        MultiPoly r(field_, nvars_);
        for (const auto& [m1, c1] : terms_)
            for (const auto& [m2, c2] : o.terms_) r.add_term(m1 * m2, field_.mul(c1, c2));
        return r;
    }

    MultiPoly scaled(const coeff_type& s) const {
        MultiPoly r(field_, nvars_);
        if (field_.is_zero(s)) return r;
        for (const auto& [m, c] : terms_) r.terms_.emplace(m, field_.mul(c, s));
        return r;
    }

    MultiPoly pow(unsigned k) const {
        MultiPoly r = constant(field_, nvars_, field_.one());
        for (unsigned i = 0; i < k; ++i) r = r * *this;
        return r;
    }

    MultiPoly derivative(std::size_t var) const {
        MultiPoly r(field_, nvars_);
        for (const auto& [m, c] : terms_) {
            if (m[var] == 0) continue;
            Monomial d = m;
            d[var] = static_cast<std::uint16_t>(d[var] - 1);
            r.add_term(d, field_.mul(c, field_.from_int(m[var])));
        }
        return r;
    }

    coeff_type evaluate(const std::vector<coeff_type>& point) const {
        coeff_type acc = field_.zero();
        for (const auto& [m, c] : terms_) {
            coeff_type t = c;
            for (std::size_t i = 0; i < nvars_; ++i)
                for (unsigned k = 0; k < m[i]; ++k) t = field_.mul(t, point[i]);
            acc = field_.add(acc, t);
        }
        return acc;
    }

    /// Replace every variable x_i by images[i] (polynomials over a common ring).
    MultiPoly substitute(const std::vector<MultiPoly>& images) const {
        require(images.size() == nvars_, ErrorKind::invalid_input, "substitution arity mismatch");
        const std::size_t out_vars = images.empty() ? 0 : images[0].nvars();
        MultiPoly r(field_, out_vars);
        for (const auto& [m, c] : terms_) {
            MultiPoly t = constant(field_, out_vars, c);
            for (std::size_t i = 0; i < nvars_; ++i)
                if (m[i]) t = t * images[i].pow(m[i]);
            r = r + t;
        }
        return r;
    }

    /// Apply a coefficient map into another field context.
    template <class G, class Fn>
    MultiPoly<G> map_coefficients(const G& target, Fn&& fn) const {
        MultiPoly<G> r(target, nvars_);
        for (const auto& [m, c] : terms_) r.add_term(m, fn(c));
        return r;
    }

    /// Terms in descending order for the given term order.
    std::vector<std::pair<Monomial, coeff_type>> sorted_terms(TermOrder order = TermOrder::degrevlex) const {
        std::vector<std::pair<Monomial, coeff_type>> v(terms_.begin(), terms_.end());
        std::sort(v.begin(), v.end(), [order](const auto& a, const auto& b) { return term_greater(a.first, b.first, order); });
        return v;
    }

    bool operator==(const MultiPoly& o) const { return nvars_ == o.nvars_ && terms_ == o.terms_; }

private:
    F field_{};
    std::size_t nvars_ = 0;
    TermMap terms_;
};

// ---------------------------------------------------------------------------
// Printing

namespace detail {

inline bool is_plain_number(const std::string& s) {
    if (s.empty()) return false;
    std::size_t i = (s[0] == '-') ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i])) && s[i] != '/') return false;
    return true;
}

} // namespace detail

template <class F>
std::string to_string(const MultiPoly<F>& f) {
    if (f.is_zero()) return "0";
    const F& K = f.field();
    std::string out;
    for (const auto& [m, c] : f.sorted_terms()) {
        std::string mono;
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (!m[i]) continue;
            if (!mono.empty()) mono += "*";
            mono += "x" + std::to_string(i);
            if (m[i] > 1) mono += "^" + std::to_string(m[i]);
        }
        std::string cs = K.to_string(c);
        bool negative = false;
        if (!cs.empty() && cs[0] == '-' && detail::is_plain_number(cs)) {
            negative = true;
            cs = cs.substr(1);
        }
        if (out.empty()) {
            if (negative) out += "-";
        } else {
            out += negative ? " - " : " + ";
        }
        if (mono.empty()) {
            out += cs;
        } else if (cs == "1") {
            out += mono;
        } else {
            out += cs + "*" + mono;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

template <class F>
class PolyParser {
public:
    using P = MultiPoly<F>;

    PolyParser(const F& field, std::size_t nvars, const std::string& text) : K_(field), n_(nvars), s_(text) {}

    P parse() {
        P r = poly();
        skip();
        if (pos_ != s_.size()) error("unexpected '" + std::string(1, s_[pos_]) + "'");
        return r;
    }

private:
    [[noreturn]] void error(const std::string& msg) const {
        fail(ErrorKind::invalid_input, "polynomial parse error at offset " + std::to_string(pos_) + " in \"" + s_ + "\": " + msg);
    }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Int integer() {
        skip();
        const std::size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (start == pos_) error("expected integer");
        return Int(s_.substr(start, pos_ - start));
    }

    P poly() {
        P r(K_, n_);
        bool negate = false;
        if (accept('-')) negate = true;
        else accept('+');
        P t = term();
        r = negate ? r - t : r + t;
        for (;;) {
            if (accept('+')) r = r + term();
            else if (accept('-')) r = r - term();
            else break;
        }
        return r;
    }

    P term() {
        P r = factor();
        while (accept('*')) r = r * factor();
        return r;
    }

    P factor() {
        P base = primary();
        if (accept('^')) {
            const Int e = integer();
            if (e > 10000) error("exponent too large");
            base = base.pow(static_cast<unsigned>(e));
        }
        return base;
    }

    P primary() {
        skip();
        if (pos_ >= s_.size()) error("unexpected end of input");
        const char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            P r = poly();
            if (!accept(')')) error("expected ')'");
            return r;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            Rational v(integer());
            if (accept('/')) {
                const Int d = integer();
                if (d == 0) error("zero denominator");
                v /= Rational(d);
            }
            return P::constant(K_, n_, K_.from_rational(v));
        }
        if (c == 'x') {
            ++pos_;
            const Int i = integer();
            if (i >= Int(n_)) error("variable index out of range");
            return P::variable(K_, n_, static_cast<std::size_t>(i));
        }
        if (c == 'a') {
            ++pos_;
            if constexpr (requires(const F& k) { k.generator(); }) {
                return P::constant(K_, n_, K_.generator());
            } else {
                error("field generator 'a' is not available over Q");
            }
        }
        error("unexpected '" + std::string(1, c) + "'");
    }

    const F& K_;
    std::size_t n_;
    std::string s_;
    std::size_t pos_ = 0;
};

} // namespace detail

template <class F>
MultiPoly<F> parse_poly(const F& field, std::size_t nvars, const std::string& text) {
    return detail::PolyParser<F>(field, nvars, text).parse();
}

} // namespace picardkit
