#include <picardkit/counting.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

using namespace picardkit;

namespace {

HomIdeal<GaloisField> ideal_of(const GaloisField& K, std::size_t n, std::initializer_list<std::string> gens) {
    HomIdeal<GaloisField> I(K, n);
    for (const auto& g : gens) I.add(parse_poly(K, n, g));
    return I;
}

// Brute force: walk every normalized projective point of P^{n-1}(F_Q).
Int brute_count(const HomIdeal<GaloisField>& I, unsigned ext_degree) {
    const Extension ext = extend(I.field.desc(), ext_degree);
    const GaloisField L(ext.field);
    std::vector<MultiPoly<GaloisField>> gens;
    for (const auto& g : I.generators)
        gens.push_back(g.map_coefficients(L, [&](std::uint32_t c) { return L.code(ext.embedding(I.field.element(c))); }));
    const std::uint64_t Q = L.size();
    const std::size_t n = I.nvars;
    Int total = 0;
    for (std::size_t lead = 0; lead < n; ++lead) {
        const std::size_t free = n - lead - 1;
        std::uint64_t combos = 1;
        for (std::size_t i = 0; i < free; ++i) combos *= Q;
        for (std::uint64_t k = 0; k < combos; ++k) {
            std::vector<std::uint32_t> pt(n, 0);
            pt[lead] = 1;
            std::uint64_t r = k;
            for (std::size_t i = lead + 1; i < n; ++i, r /= Q) pt[i] = static_cast<std::uint32_t>(r % Q);
            bool on = true;
            for (const auto& g : gens)
                if (g.evaluate(pt) != 0) {
                    on = false;
                    break;
                }
            if (on) total += 1;
        }
    }
    return total;
}

std::string random_form(std::mt19937_64& rng, const GaloisField& K, std::size_t nvars, unsigned deg, double density) {
    std::uniform_real_distribution<double> coin(0, 1);
    std::uniform_int_distribution<std::uint32_t> coef(1, static_cast<std::uint32_t>(K.size() - 1));
    MultiPoly<GaloisField> f(K, nvars);
    // all monomials of degree deg
    std::vector<unsigned> e(nvars, 0);
    std::function<void(std::size_t, unsigned)> rec = [&](std::size_t i, unsigned left) {
        if (i + 1 == nvars) {
            e[i] = left;
            if (coin(rng) < density) {
                Monomial m(nvars);
                for (std::size_t k = 0; k < nvars; ++k) m[k] = static_cast<std::uint16_t>(e[k]);
                f.add_term(m, coef(rng));
            }
            return;
        }
        for (unsigned d = 0; d <= left; ++d) {
            e[i] = d;
            rec(i + 1, left - d);
        }
    };
    rec(0, deg);
    return to_string(f);
}

} // namespace

TEST(CountPoints, ProjectiveSpaces) {
    const GaloisField F2(make_field(2, 1)), F3(make_field(3, 1));
    EXPECT_EQ(count_points(HomIdeal<GaloisField>(F2, 2), extend(F2.desc(), 1)), Int(3));
    EXPECT_EQ(count_points(HomIdeal<GaloisField>(F3, 3), extend(F3.desc(), 1)), Int(13));
    const auto s = count_tower(HomIdeal<GaloisField>(F2, 2), 3);
    EXPECT_EQ(s.counts, (std::vector<Int>{3, 5, 9}));
}

TEST(CountPoints, ProjectiveSpaceIsSumOfPowers) {
    for (auto [p, e] : std::vector<std::pair<std::uint32_t, unsigned>>{{2, 1}, {3, 1}, {2, 2}, {5, 1}}) {
        const GaloisField K(make_field(p, e));
        for (std::size_t m = 0; m <= 5; ++m)
            for (unsigned n = 1; n <= 4; ++n) {
                const Int Q = ipow(Int(K.size()), n);
                Int expected = 0;
                for (std::size_t i = 0; i <= m; ++i) expected += ipow(Q, static_cast<unsigned>(i));
                EXPECT_EQ(count_points(HomIdeal<GaloisField>(K, m + 1), extend(K.desc(), n)), expected);
            }
    }
}

TEST(CountPoints, SplitQuadricSurface) {
    const GaloisField F2(make_field(2, 1));
    const auto I = ideal_of(F2, 4, {"x0*x3 - x1*x2"});
    const auto s = count_tower(I, 4);
    for (unsigned n = 1; n <= 4; ++n) {
        const Int qn1 = ipow(Int(2), n) + 1;
        EXPECT_EQ(s.counts[n - 1], qn1 * qn1);
    }
}

TEST(CountPoints, NormFormQuadricSurface) {
    // Non-split quadric: Frobenius eigenvalues q, -q on H^2 (lines conjugate over F4).
    const GaloisField F2(make_field(2, 1));
    const auto I = ideal_of(F2, 4, {"x0*x3 + x1^2 + x1*x2 + x2^2"});
    const auto s = count_tower(I, 4);
    for (unsigned n = 1; n <= 4; ++n) {
        const Int qn = ipow(Int(2), n);
        EXPECT_EQ(s.counts[n - 1], qn * qn + 1 + qn + (n % 2 ? -qn : qn));
    }
}

TEST(CountPoints, AgreesWithBruteForce) {
    std::mt19937_64 rng(2024);
    const std::vector<std::pair<std::uint32_t, unsigned>> fields = {{2, 1}, {3, 1}, {2, 2}, {5, 1}, {3, 2}};
    for (auto [p, e] : fields) {
        const GaloisField K(make_field(p, e));
        for (int trial = 0; trial < 6; ++trial) {
            const std::size_t nv = 3 + trial % 2;
            const unsigned deg = 1 + static_cast<unsigned>(trial % 4);
            HomIdeal<GaloisField> I(K, nv);
            I.add(parse_poly(K, nv, random_form(rng, K, nv, deg, 0.6)));
            if (trial % 3 == 2) I.add(parse_poly(K, nv, random_form(rng, K, nv, 2, 0.5)));
            const unsigned nmax = K.size() <= 3 ? 2 : 1;
            for (unsigned n = 1; n <= nmax; ++n)
                EXPECT_EQ(count_points(I, extend(K.desc(), n)), brute_count(I, n))
                    << p << "^" << e << " n=" << n << " " << to_string(I.generators[0]);
        }
    }
}

TEST(CountPoints, EllipticCurvesSatisfyHasse) {
    const GaloisField F5(make_field(5, 1));
    for (auto g : {"x1^2*x2 - x0^3 - x0*x2^2 - x2^3", "x1^2*x2 - x0^3 - 2*x0*x2^2 - x2^3", "x1^2*x2 - x0^3 - x2^3"}) {
        const auto s = count_tower(ideal_of(F5, 3, {g}), 3);
        for (unsigned n = 1; n <= 3; ++n) {
            const Int qn = ipow(Int(5), n);
            const Int dev = s.counts[n - 1] - qn - 1;
            EXPECT_LE(dev * dev, 4 * qn) << g << " n=" << n;
        }
        EXPECT_TRUE(counts_are_plausible(s, 2));
    }
}

TEST(CountPoints, ThreadCountDoesNotChangeResult) {
    const GaloisField F3(make_field(3, 1));
    const auto I = ideal_of(F3, 4, {"x0^3 + x1^3 + x2^3 + x3^3 + x0*x1*x2"});
    CountOptions one, four;
    four.threads = 4;
    for (unsigned n = 1; n <= 3; ++n)
        EXPECT_EQ(count_points(I, extend(F3.desc(), n), one), count_points(I, extend(F3.desc(), n), four));
}

TEST(CountPoints, BudgetIsEnforced) {
    const GaloisField F2(make_field(2, 1));
    const auto I = ideal_of(F2, 4, {"x0^3 + x1^3 + x2^3 + x3^3"});
    CountOptions tight;
    tight.budget = 100;   // F_8 alone needs 8^2 + 8 + ... outer points
    try {
        count_tower(I, 5, nullptr, tight);
        FAIL() << "expected budget failure";
    } catch (const TowerBudgetError& e) {
        EXPECT_EQ(e.kind(), ErrorKind::budget_exceeded);
        EXPECT_GE(e.partial().counts.size(), 1u);
        EXPECT_EQ(e.last_completed(), e.partial().counts.size());
        EXPECT_EQ(e.partial().counts[0], brute_count(I, 1));
    }
    EXPECT_LE(count_cost(I, 2), Int(100));
}

TEST(CountRoots, MatchesBruteForce) {
    std::mt19937_64 rng(5);
    for (auto [p, e] : std::vector<std::pair<std::uint32_t, unsigned>>{{2, 3}, {2, 4}, {3, 2}, {7, 1}, {5, 2}}) {
        const GaloisField K(make_field(p, e));
        std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(K.size() - 1));
        for (int trial = 0; trial < 200; ++trial) {
            detail::UPoly h(1 + trial % 7);
            for (auto& c : h) c = pick(rng);
            // Force repeated roots sometimes: (y - r)^2 (y - s).
            if (trial % 5 == 0) {
                auto mul = [&](const detail::UPoly& a, const detail::UPoly& b) {
                    detail::UPoly c(a.size() + b.size() - 1, 0);
                    for (std::size_t i = 0; i < a.size(); ++i)
                        for (std::size_t j = 0; j < b.size(); ++j) c[i + j] = K.add(c[i + j], K.mul(a[i], b[j]));
                    return c;
                };
                const detail::UPoly lr{K.neg(pick(rng)), 1}, ls{K.neg(pick(rng)), 1};
                h = mul(mul(lr, lr), ls);
            }
            detail::utrim(h);
            if (h.empty()) continue;
            std::uint64_t roots = 0;
            for (std::uint32_t x = 0; x < K.size(); ++x) {
                std::uint32_t acc = 0;
                for (std::size_t i = h.size(); i-- > 0;) acc = K.add(K.mul(acc, x), h[i]);
                roots += (acc == 0);
            }
            EXPECT_EQ(detail::count_roots(K, h), roots);
        }
    }
}

TEST(CountCache, IsTransparentAndPersistent) {
    const auto dir = std::filesystem::temp_directory_path() / "picardkit_cache_test";
    std::filesystem::remove_all(dir);
    const GaloisField F2(make_field(2, 1));
    const auto I = ideal_of(F2, 3, {"x0^3 + x1^3 + x2^3"});
    const auto plain = count_tower(I, 4);
    {
        auto cache = CountCache::at_file(dir.string() + ".ndjson");
        EXPECT_EQ(count_tower(I, 4, &cache), plain);
    }
    auto reopened = CountCache::at_file(dir.string() + ".ndjson");
    EXPECT_EQ(reopened.size(), 4u);
    EXPECT_EQ(*reopened.lookup(plain.variety_hash, 2), plain.counts[1]);
    std::filesystem::remove(dir.string() + ".ndjson");
}

TEST(CountCache, TruncatesCorruptTail) {
    const auto file = std::filesystem::temp_directory_path() / "picardkit_cache_corrupt.ndjson";
    {
        std::ofstream out(file, std::ios::trunc);
        out << R"({"hash":"abc","n":1,"count":7})" << "\n";
        out << R"({"hash":"abc","n":2,"count":11})" << "\n";
        out << R"({"hash":"abc","n":3,"cou)";
    }
    auto cache = CountCache::at_file(file);
    EXPECT_EQ(cache.size(), 2u);
    EXPECT_EQ(*cache.lookup("abc", 2), Int(11));
    EXPECT_FALSE(cache.lookup("abc", 3).has_value());
    cache.store("abc", 3, Int(13));
    auto again = CountCache::at_file(file);
    EXPECT_EQ(again.size(), 3u);
    EXPECT_EQ(*again.lookup("abc", 3), Int(13));
    std::filesystem::remove(file);
}

TEST(VarietyHash, IgnoresGeneratorOrderButNotContent) {
    const GaloisField F3(make_field(3, 1));
    const auto a = ideal_of(F3, 4, {"x0*x1 - x2*x3", "x0^2 + x3^2"});
    const auto b = ideal_of(F3, 4, {"x0^2 + x3^2", "x0*x1 - x2*x3"});
    const auto c = ideal_of(F3, 4, {"x0^2 + x3^2", "x0*x1 + x2*x3"});
    EXPECT_EQ(variety_hash(a), variety_hash(b));
    EXPECT_NE(variety_hash(a), variety_hash(c));
    const GaloisField F9(make_field(3, 2));
    EXPECT_NE(variety_hash(a), variety_hash(ideal_of(F9, 4, {"x0*x1 - x2*x3", "x0^2 + x3^2"})));
}

TEST(Plausibility, RejectsImpossibleSeries) {
    CountSeries s;
    s.q = 2;
    s.counts = {3, 5, 9};
    EXPECT_TRUE(counts_are_plausible(s, 1));
    s.counts = {3, 4, 9};   // degree-2 closed points would number 1/2
    EXPECT_FALSE(counts_are_plausible(s, 1));
    s.counts = {4, 5, 9};   // exceeds #P^1(F_2)
    EXPECT_FALSE(counts_are_plausible(s, 1));
}
