#pragma once

// Exhaustive projective point counting over F_{q^n}.
//
// Each affine chart {x_0 = ... = x_{j-1} = 0, x_j = 1} is compiled once:
// generators are restricted to the chart, variables that no longer occur
// contribute a factor Q, and one remaining variable (the one of least degree)
// is treated as the "innermost" coordinate. For every assignment of the other
// ("outer") coordinates the generators become univariate polynomials in the
// innermost one, and their common roots in F_Q are counted exactly as
// deg gcd(g_1, ..., g_r, y^Q - y). The evaluation budget counts outer
// assignments.

#include "errors.hpp"
#include "fields.hpp"
#include "groebner.hpp"

#include <json.hpp>

#include <sys/file.h>
#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace picardkit {

struct CountOptions {
    /// Maximum number of outer-coordinate assignments per count_points call.
    std::uint64_t budget = std::uint64_t(1) << 34;
    unsigned threads = 1;
    /// Heartbeat sink (the CLI sends these to stderr).
    std::function<void(const std::string&)> progress;
};

struct CountSeries {
    std::uint64_t q = 0;
    std::vector<Int> counts;        // counts[n-1] = #X(F_{q^n})
    std::string variety_hash;

    bool operator==(const CountSeries&) const = default;
};

namespace detail {

using UPoly = std::vector<std::uint32_t>;   // univariate over GaloisField codes, low-to-high

inline void utrim(UPoly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

inline UPoly urem(const GaloisField& K, UPoly a, const UPoly& m) {
    utrim(a);
    const std::size_t dm = m.size() - 1;
    const std::uint32_t li = K.inv(m.back());
    while (!a.empty() && a.size() - 1 >= dm) {
        const std::size_t shift = a.size() - 1 - dm;
        const std::uint32_t c = K.mul(a.back(), li);
        for (std::size_t i = 0; i <= dm; ++i) a[shift + i] = K.sub(a[shift + i], K.mul(c, m[i]));
        utrim(a);
    }
    return a;
}

inline UPoly ugcd(const GaloisField& K, UPoly a, UPoly b) {
    utrim(a);
    utrim(b);
    while (!b.empty()) {
        UPoly r = urem(K, a, b);
        a = std::move(b);
        b = std::move(r);
    }
    return a;
}

inline UPoly umulmod(const GaloisField& K, const UPoly& a, const UPoly& b, const UPoly& m) {
    if (a.empty() || b.empty()) return {};
    UPoly r(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i]) continue;
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = K.add(r[i + j], K.mul(a[i], b[j]));
    }
    return urem(K, std::move(r), m);
}

/// Number of distinct roots in F_Q of a nonzero polynomial h.
inline std::uint64_t count_roots(const GaloisField& K, UPoly h) {
    utrim(h);
    const std::size_t d = h.size() - 1;
    if (d == 0) return 0;
    if (d == 1) return 1;
    const std::uint32_t p = static_cast<std::uint32_t>(K.characteristic());
    if (d == 2) {
        const std::uint32_t a = h[2], b = h[1], c = h[0];
        if (p == 2) {
            if (b == 0) return 1;  // every element is a square
            // a y^2 + b y + c has roots iff trace(a c / b^2) = 0
            const std::uint32_t t = K.mul(K.mul(a, c), K.inv(K.mul(b, b)));
            return K.trace(t) == 0 ? 2 : 0;
        }
        const std::uint32_t disc = K.sub(K.mul(b, b), K.mul(K.from_int(4), K.mul(a, c)));
        if (disc == 0) return 1;
        return (K.log(disc) % 2 == 0) ? 2 : 0;
    }
    // y^Q mod h by iterated p-th powers.
    UPoly y{0, 1};
    UPoly cur = urem(K, y, h);
    for (unsigned step = 0; step < K.degree(); ++step) {
        UPoly base = cur, acc{1};
        std::uint32_t e = p;
        while (e) {
            if (e & 1u) acc = umulmod(K, acc, base, h);
            e >>= 1u;
            if (e) base = umulmod(K, base, base, h);
        }
        cur = std::move(acc);
    }
    // cur - y
    if (cur.size() < 2) cur.resize(2, 0);
    cur[1] = K.sub(cur[1], 1);
    utrim(cur);
    if (cur.empty()) return d;  // h divides y^Q - y
    const UPoly g = ugcd(K, h, cur);
    return g.size() - 1;
}

struct CompiledTerm {
    std::vector<std::uint16_t> outer_exp;   // exponents of the outer variables
    std::uint32_t log_coeff = 0;
};

struct CompiledGenerator {
    // coefficient of y^k for k = 0..deg, each a list of terms in outer variables
    std::vector<std::vector<CompiledTerm>> by_power;
};

struct CompiledChart {
    std::size_t chart = 0;
    bool empty = false;                 // some generator restricts to a nonzero constant
    unsigned absent = 0;                // free variables absent from every generator
    std::size_t outer_vars = 0;
    bool has_inner = false;
    std::vector<CompiledGenerator> gens;
};

inline CompiledChart compile_chart(const GaloisField& L, const std::vector<MultiPoly<GaloisField>>& gens,
                                   std::size_t nvars, std::size_t j) {
    CompiledChart C;
    C.chart = j;
    // Restrict to the chart: free variables are j+1..nvars-1.
    std::vector<std::map<Monomial, std::uint32_t>> restricted;
    const std::size_t nfree = nvars - j - 1;
    for (const auto& g : gens) {
        std::map<Monomial, std::uint32_t> r;
        for (const auto& [m, c] : g.terms()) {
            bool vanishes = false;
            for (std::size_t i = 0; i < j; ++i)
                if (m[i]) vanishes = true;
            if (vanishes) continue;
            Monomial fm(nfree);
            for (std::size_t i = 0; i < nfree; ++i) fm[i] = m[j + 1 + i];
            auto it = r.find(fm);
            if (it == r.end()) r.emplace(fm, c);
            else it->second = L.add(it->second, c);
        }
        for (auto it = r.begin(); it != r.end();) it = (it->second == 0) ? r.erase(it) : std::next(it);
        if (r.empty()) continue;
        if (r.size() == 1 && r.begin()->first.degree() == 0) {
            C.empty = true;
            return C;
        }
        restricted.push_back(std::move(r));
    }
    // Variables present, and the degree of each.
    std::vector<int> maxdeg(nfree, 0);
    for (const auto& r : restricted)
        for (const auto& [m, c] : r)
            for (std::size_t i = 0; i < nfree; ++i) maxdeg[i] = std::max(maxdeg[i], static_cast<int>(m[i]));
    std::vector<std::size_t> present;
    for (std::size_t i = 0; i < nfree; ++i) {
        if (maxdeg[i] == 0) ++C.absent;
        else present.push_back(i);
    }
    if (present.empty()) return C;
    std::size_t inner = present.back();
    for (std::size_t i : present)
        if (maxdeg[i] < maxdeg[inner]) inner = i;
    std::vector<std::size_t> outer;
    for (std::size_t i : present)
        if (i != inner) outer.push_back(i);
    C.outer_vars = outer.size();
    C.has_inner = true;
    for (const auto& r : restricted) {
        CompiledGenerator cg;
        cg.by_power.resize(static_cast<std::size_t>(maxdeg[inner]) + 1);
        for (const auto& [m, c] : r) {
            CompiledTerm t;
            for (std::size_t i : outer) t.outer_exp.push_back(m[i]);
            t.log_coeff = L.log(c);
            cg.by_power[m[inner]].push_back(std::move(t));
        }
        C.gens.push_back(std::move(cg));
    }
    return C;
}

/// Points of the chart for a fixed range of the first outer coordinate.
inline std::uint64_t count_chart_range(const GaloisField& L, const CompiledChart& C, std::uint64_t first_lo,
                                       std::uint64_t first_hi) {
    const std::uint64_t Q = L.size();
    const std::size_t k = C.outer_vars;
    const std::uint32_t order = L.group_order();
    std::vector<std::uint64_t> point(k, 0);
    if (k > 0) point[0] = first_lo;
    std::vector<std::uint32_t> logs(k, 0);
    std::vector<bool> zero(k, true);
    std::uint64_t total = 0;
    std::vector<UPoly> polys(C.gens.size());

    auto refresh = [&](std::size_t i) {
        zero[i] = point[i] == 0;
        if (!zero[i]) logs[i] = L.log(static_cast<std::uint32_t>(point[i]));
    };
    for (std::size_t i = 0; i < k; ++i) refresh(i);

    if (k > 0 && first_lo >= first_hi) return 0;
    for (;;) {
        // Specialize every generator at the current outer point.
        bool all_zero = true;
        for (std::size_t g = 0; g < C.gens.size(); ++g) {
            const auto& cg = C.gens[g];
            UPoly& u = polys[g];
            u.assign(cg.by_power.size(), 0);
            for (std::size_t pw = 0; pw < cg.by_power.size(); ++pw) {
                std::uint32_t acc = 0;
                for (const auto& t : cg.by_power[pw]) {
                    std::uint64_t l = t.log_coeff;
                    bool vanish = false;
                    for (std::size_t i = 0; i < k; ++i) {
                        const std::uint16_t ex = t.outer_exp[i];
                        if (!ex) continue;
                        if (zero[i]) {
                            vanish = true;
                            break;
                        }
                        l += std::uint64_t(ex) * logs[i];
                    }
                    if (!vanish) acc = L.add(acc, L.exp(l % order));
                }
                u[pw] = acc;
            }
            utrim(u);
            if (!u.empty()) all_zero = false;
        }
        if (all_zero) {
            total += Q;
        } else {
            UPoly h;
            for (const auto& u : polys) {
                if (u.empty()) continue;
                h = h.empty() ? u : ugcd(L, h, u);
                if (h.size() == 1) break;
            }
            total += count_roots(L, h);
        }
        // Advance the outer point (last coordinate fastest).
        if (k == 0) break;
        std::size_t i = k;
        while (i-- > 0) {
            ++point[i];
            const std::uint64_t limit = (i == 0) ? first_hi : Q;
            if (point[i] < limit) {
                refresh(i);
                break;
            }
            if (i == 0) return total;
            point[i] = 0;
            refresh(i);
        }
    }
    return total;
}

inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

} // namespace detail

/// Content digest of the ideal and its base field (generator order ignored).
inline std::string variety_hash(const HomIdeal<GaloisField>& I) {
    const FieldDesc& F = I.field.desc();
    std::vector<std::string> gens;
    for (const auto& g : I.generators) gens.push_back(to_string(g));
    std::sort(gens.begin(), gens.end());
    std::ostringstream os;
    os << "p=" << F.p << ";e=" << F.e << ";mod=";
    for (auto c : F.modulus) os << c << ",";
    os << ";n=" << I.nvars << ";";
    for (const auto& g : gens) os << g << ";";
    return detail::hex64(detail::fnv1a(os.str()));
}

/// Outer-assignment cost of counting I over F_Q.
inline Int count_cost(const HomIdeal<GaloisField>& I, std::uint64_t Q) {
    Int cost = 0;
    for (std::size_t j = 0; j < I.nvars; ++j) {
        const auto C = detail::compile_chart(I.field, I.generators, I.nvars, j);
        if (C.empty || !C.has_inner) continue;
        cost += ipow(Int(Q), static_cast<unsigned>(C.outer_vars));
    }
    return cost;
}

/// #Proj(S/I)(F_Q) where ext embeds the ideal's base field into F_Q.
inline Int count_points(const HomIdeal<GaloisField>& I, const Extension& ext, const CountOptions& opt = {}) {
    require(I.field.desc() == ext.embedding.source, ErrorKind::invalid_input, "extension does not start at the ideal's field");
    require(ext.field.size() <= kMaxTableField, ErrorKind::budget_exceeded,
            "F_" + std::to_string(ext.field.size()) + " exceeds the table limit for counting");
    const GaloisField L(ext.field);
    const GaloisField& K = I.field;
    // Coefficient map F_q -> F_Q.
    std::vector<std::uint32_t> image(K.size());
    for (std::uint64_t c = 0; c < K.size(); ++c)
        image[c] = L.code(ext.embedding(K.element(static_cast<std::uint32_t>(c))));
    std::vector<MultiPoly<GaloisField>> gens;
    for (const auto& g : I.generators) gens.push_back(g.map_coefficients(L, [&](std::uint32_t c) { return image[c]; }));

    const std::uint64_t Q = L.size();
    std::vector<detail::CompiledChart> charts;
    Int cost = 0;
    for (std::size_t j = 0; j < I.nvars; ++j) {
        charts.push_back(detail::compile_chart(L, gens, I.nvars, j));
        const auto& C = charts.back();
        if (!C.empty && C.has_inner) cost += ipow(Int(Q), static_cast<unsigned>(C.outer_vars));
    }
    if (cost > Int(opt.budget))
        throw BudgetError("counting over F_" + std::to_string(Q) + " needs " + cost.str() + " evaluations, budget is " +
                          std::to_string(opt.budget));

    Int total = 0;
    for (const auto& C : charts) {
        if (C.empty) continue;
        const Int absent_factor = ipow(Int(Q), C.absent);
        if (!C.has_inner) {
            total += absent_factor;
            continue;
        }
        std::uint64_t chart_total = 0;
        if (C.outer_vars == 0) {
            chart_total = detail::count_chart_range(L, C, 0, 1);
        } else {
            const unsigned T = std::max(1u, std::min<unsigned>(opt.threads, static_cast<unsigned>(Q)));
            std::vector<std::uint64_t> partial(T, 0);
            std::vector<std::thread> pool;
            for (unsigned t = 0; t < T; ++t) {
                const std::uint64_t lo = Q * t / T, hi = Q * (t + 1) / T;
                if (T == 1) partial[t] = detail::count_chart_range(L, C, lo, hi);
                else pool.emplace_back([&, t, lo, hi] { partial[t] = detail::count_chart_range(L, C, lo, hi); });
            }
            for (auto& th : pool) th.join();
            for (auto v : partial) chart_total += v;
        }
        total += Int(chart_total) * absent_factor;
        if (opt.progress) opt.progress("chart " + std::to_string(C.chart) + " over F_" + std::to_string(Q) + " done");
    }
    return total;
}

// ---------------------------------------------------------------------------
// Persistent cache: newline-delimited JSON records {"hash", "n", "count"}.

class CountCache {
public:
    CountCache() = default;

    /// Cache file inside dir; PICARDKIT_CACHE overrides dir when set.
    static CountCache open(std::optional<std::filesystem::path> dir) {
        if (const char* env = std::getenv("PICARDKIT_CACHE"); env && *env) dir = std::filesystem::path(env);
        CountCache c;
        if (!dir) return c;
        std::filesystem::create_directories(*dir);
        c.path_ = *dir / "counts.ndjson";
        c.load();
        return c;
    }

    static CountCache at_file(const std::filesystem::path& file) {
        CountCache c;
        c.path_ = file;
        c.load();
        return c;
    }

    bool enabled() const { return !path_.empty(); }
    const std::filesystem::path& path() const { return path_; }

    std::optional<Int> lookup(const std::string& hash, unsigned n) const {
        auto it = entries_.find({hash, n});
        if (it == entries_.end()) return std::nullopt;
        return it->second;
    }

    void store(const std::string& hash, unsigned n, const Int& count) {
        if (entries_.count({hash, n})) return;
        entries_[{hash, n}] = count;
        if (!enabled()) return;
        nlohmann::json rec;
        rec["hash"] = hash;
        rec["n"] = n;
        if (count <= Int(std::numeric_limits<std::uint64_t>::max())) rec["count"] = static_cast<std::uint64_t>(count);
        else rec["count"] = count.str();
        const std::string line = rec.dump() + "\n";
        const int fd = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
        require(fd >= 0, ErrorKind::invalid_input, "cannot open cache file " + path_.string());
        ::flock(fd, LOCK_EX);
        const auto written = ::write(fd, line.data(), line.size());
        ::flock(fd, LOCK_UN);
        ::close(fd);
        require(written == static_cast<ssize_t>(line.size()), ErrorKind::invalid_input, "short write to cache file");
    }

    std::size_t size() const { return entries_.size(); }

private:
    void load() {
        std::ifstream in(path_, std::ios::binary);
        if (!in) return;
        std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        std::size_t pos = 0, good_end = 0;
        while (pos < content.size()) {
            const std::size_t nl = content.find('\n', pos);
            if (nl == std::string::npos) break;   // unterminated tail record
            const std::string line = content.substr(pos, nl - pos);
            try {
                const auto rec = nlohmann::json::parse(line);
                const Int count = rec.at("count").is_string() ? Int(rec.at("count").get<std::string>())
                                                              : Int(rec.at("count").get<std::uint64_t>());
                entries_[{rec.at("hash").get<std::string>(), rec.at("n").get<unsigned>()}] = count;
            } catch (const std::exception&) {
                break;
            }
            pos = nl + 1;
            good_end = pos;
        }
        if (good_end < content.size()) std::filesystem::resize_file(path_, good_end);
    }

    std::filesystem::path path_;
    std::map<std::pair<std::string, unsigned>, Int> entries_;
};

/// Partial result attached to a budget failure in count_tower.
class TowerBudgetError : public BudgetError {
public:
    TowerBudgetError(const std::string& what, CountSeries partial)
        : BudgetError(what, static_cast<unsigned>(partial.counts.size())), partial_(std::move(partial)) {}
    const CountSeries& partial() const { return partial_; }

private:
    CountSeries partial_;
};

inline CountSeries count_tower(const HomIdeal<GaloisField>& I, unsigned n_max, CountCache* cache = nullptr,
                               const CountOptions& opt = {}) {
    CountSeries s;
    s.q = I.field.size();
    s.variety_hash = variety_hash(I);
    for (unsigned n = 1; n <= n_max; ++n) {
        if (cache) {
            if (auto hit = cache->lookup(s.variety_hash, n)) {
                s.counts.push_back(*hit);
                continue;
            }
        }
        Int c;
        try {
            c = count_points(I, extend(I.field.desc(), n), opt);
        } catch (const BudgetError& e) {
            throw TowerBudgetError(e.message() + " (largest completed n = " + std::to_string(n - 1) + ")", s);
        }
        if (cache) cache->store(s.variety_hash, n, c);
        s.counts.push_back(c);
        if (opt.progress) opt.progress("N_" + std::to_string(n) + " = " + c.str());
    }
    return s;
}

/// Upper bound #P^m(F_{q^n}) and the closed-point decomposition check.
inline bool counts_are_plausible(const CountSeries& s, std::size_t ambient_dim) {
    std::vector<Int> closed(s.counts.size() + 1, 0);   // closed[d] = points of exact degree d
    for (std::size_t n = 1; n <= s.counts.size(); ++n) {
        Int proj = 0, Qn = ipow(Int(s.q), static_cast<unsigned>(n));
        for (std::size_t i = 0; i <= ambient_dim; ++i) proj += ipow(Qn, static_cast<unsigned>(i));
        if (s.counts[n - 1] < 0 || s.counts[n - 1] > proj) return false;
        Int rest = s.counts[n - 1];
        for (std::size_t d = 1; d < n; ++d)
            if (n % d == 0) rest -= Int(d) * closed[d];
        if (rest < 0 || rest % Int(n) != 0) return false;
        closed[n] = rest / Int(n);
    }
    return true;
}

} // namespace picardkit
