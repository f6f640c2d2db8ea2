#include <picardkit/counting.hpp>
#include <picardkit/weil.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace picardkit;

namespace {

ZPoly prod_linear(std::initializer_list<long> roots) {
    ZPoly r{1};
    for (long a : roots) r = poly_mul(r, ZPoly{1, -a});
    return r;
}

ZetaFunction projective_zeta(std::uint64_t q, unsigned m) {
    ZPoly den{1};
    for (unsigned i = 0; i <= m; ++i) den = poly_mul(den, ZPoly{1, -ipow(Int(q), i)});
    return {q, m, {1}, den};
}

} // namespace

TEST(FactorZPoly, SmallExamples) {
    const auto f = factor_z_poly(ZPoly{1, 0, -1});
    ASSERT_EQ(f.factors.size(), 2u);
    EXPECT_EQ(f.expand(), (ZPoly{1, 0, -1}));
    EXPECT_EQ(f.factors[0].first, (ZPoly{1, -1}));
    EXPECT_EQ(f.factors[1].first, (ZPoly{1, 1}));

    const ZPoly g = poly_mul(poly_pow(ZPoly{1, -2}, 2), ZPoly{1, -1});
    const auto fg = factor_z_poly(g);
    ASSERT_EQ(fg.factors.size(), 2u);
    EXPECT_EQ(fg.factors[0], (std::pair<ZPoly, unsigned>{{1, -2}, 2}));
    EXPECT_EQ(fg.factors[1], (std::pair<ZPoly, unsigned>{{1, -1}, 1}));
    EXPECT_EQ(fg.expand(), g);
}

TEST(FactorZPoly, ContentAndPowersOfT) {
    const ZPoly p = poly_scale(poly_mul(ZPoly{0, 0, 1}, ZPoly{3, 1}), Int(-6));
    const auto f = factor_z_poly(p);
    EXPECT_EQ(f.expand(), p);
    EXPECT_EQ(f.factors[0], (std::pair<ZPoly, unsigned>{{0, 1}, 2}));
}

TEST(FactorZPoly, IrreducibleThatSplitsModEveryPrime) {
    // x^4 - 10 x^2 + 1 is irreducible over Q but reducible modulo every prime.
    const auto f = factor_z_poly(ZPoly{1, 0, -10, 0, 1});
    ASSERT_EQ(f.factors.size(), 1u);
    EXPECT_EQ(f.factors[0].second, 1u);
    // (x^2 - 2)(x^2 - 3) has the same reductions but does split.
    EXPECT_EQ(factor_z_poly(poly_mul(ZPoly{-2, 0, 1}, ZPoly{-3, 0, 1})).factors.size(), 2u);
}

TEST(FactorZPoly, RecoversRandomCyclotomicProducts) {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<unsigned> pick(1, 30);
    for (int trial = 0; trial < 40; ++trial) {
        std::map<unsigned, unsigned> planted;
        ZPoly p{1};
        for (int k = 0; k < 4; ++k) {
            const unsigned m = pick(rng);
            ++planted[m];
            p = poly_mul(p, cyclotomic_poly(m));
        }
        const auto f = factor_z_poly(p);
        EXPECT_EQ(f.expand(), p);
        std::map<ZPoly, unsigned> got;
        for (const auto& [g, mult] : f.factors) got[g] += mult;
        ASSERT_EQ(got.size(), planted.size());
        for (const auto& [m, mult] : planted) {
            ZPoly phi = cyclotomic_poly(m);
            detail::normalize_factor(phi);
            EXPECT_EQ(got[phi], mult) << "m=" << m;
        }
    }
}

TEST(FactorZPoly, ReMultiplicationOracleOnRandomProducts) {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> coef(-6, 6);
    for (int trial = 0; trial < 60; ++trial) {
        ZPoly p{1};
        for (int k = 0; k < 3; ++k) {
            ZPoly g(1 + static_cast<std::size_t>(1 + trial % 4));
            for (auto& c : g) c = coef(rng);
            g[0] = 1;
            if (g.back() == 0) g.back() = 1;
            p = poly_mul(p, g);
        }
        const auto f = factor_z_poly(p);
        EXPECT_EQ(f.expand(), p);
        std::size_t total = 0;
        for (const auto& [g, m] : f.factors) total += m * static_cast<std::size_t>(degree(g));
        EXPECT_EQ(total, static_cast<std::size_t>(degree(p)));
    }
}

TEST(ClassifyWeights, ProjectivePlane) {
    const auto C = classify_weights(projective_zeta(2, 2));
    ASSERT_EQ(C.P.size(), 5u);
    EXPECT_EQ(C.P[0].poly, (ZPoly{1, -1}));
    EXPECT_EQ(C.P[1].poly, ZPoly{1});
    EXPECT_EQ(C.P[2].poly, (ZPoly{1, -2}));
    EXPECT_EQ(C.P[3].poly, ZPoly{1});
    EXPECT_EQ(C.P[4].poly, (ZPoly{1, -4}));
    EXPECT_EQ(betti_numbers(C), (std::vector<unsigned>{1, 0, 1, 0, 1}));
}

TEST(ClassifyWeights, EllipticCurveRootsOnCircleOfRadiusSqrt5) {
    const ZetaFunction Z{5, 1, {1, -2, 5}, prod_linear({1, 5})};
    const auto C = classify_weights(Z);
    EXPECT_EQ(C.P[1].poly, (ZPoly{1, -2, 5}));
    EXPECT_EQ(betti_numbers(C), (std::vector<unsigned>{1, 2, 1}));
}

TEST(ClassifyWeights, RejectsNonWeilInput) {
    try {
        classify_weights(ZetaFunction{5, 1, {1, -3}, prod_linear({1, 5})});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::unclassifiable);
    }
    try {
        // weight-2 factor in the numerator
        classify_weights(ZetaFunction{2, 1, {1, -2}, prod_linear({1, 1})});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::unclassifiable);
    }
}

TEST(ClassifyWeights, BettiSumMatchesDegrees) {
    const ZetaFunction Z{2, 2, {1}, poly_mul(prod_linear({1, 4}), poly_mul(ZPoly{1, 0, 4}, ZPoly{1, 2, 4}))};
    const auto C = classify_weights(Z);
    const auto b = betti_numbers(C);
    unsigned total = 0;
    long chi = 0;
    for (std::size_t i = 0; i < b.size(); ++i) {
        total += b[i];
        chi += (i % 2 ? -1 : 1) * static_cast<long>(b[i]);
    }
    EXPECT_EQ(total, static_cast<unsigned>(degree(Z.num) + degree(Z.den)));
    EXPECT_EQ(chi, Z.chi());
    EXPECT_EQ(b, (std::vector<unsigned>{1, 0, 4, 0, 1}));
}

TEST(Cyclotomic, Examples) {
    EXPECT_EQ(cyclotomic_multiplicity(poly_mul(ZPoly{1, 0, -1}, ZPoly{1, -2})).total, 2u);
    EXPECT_EQ(cyclotomic_multiplicity(ZPoly{1, 0, 1}).total, 2u);
    const auto c = cyclotomic_multiplicity(poly_pow(ZPoly{-1, 1}, 3));
    EXPECT_EQ(c.total, 3u);
    ASSERT_EQ(c.parts.size(), 1u);
    EXPECT_EQ(c.parts[0].m, 1u);
    EXPECT_EQ(c.parts[0].multiplicity, 3u);
}

TEST(Cyclotomic, PolynomialsMatchDefinition) {
    // Phi_m has degree phi(m) and prod_{d | m} Phi_d = T^m - 1.
    for (unsigned m = 1; m <= 60; ++m) {
        EXPECT_EQ(degree(cyclotomic_poly(m)), static_cast<long>(euler_phi(m)));
        ZPoly prod{1};
        for (unsigned d = 1; d <= m; ++d)
            if (m % d == 0) prod = poly_mul(prod, cyclotomic_poly(d));
        ZPoly expected(m + 1, 0);
        expected[0] = -1;
        expected[m] = 1;
        EXPECT_EQ(prod, expected);
    }
}

TEST(Cyclotomic, InvariantUnderNegatingT) {
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<unsigned> pick(1, 24);
    for (int trial = 0; trial < 50; ++trial) {
        ZPoly p{1, -3};   // a non-cyclotomic factor too
        for (int k = 0; k < 3; ++k) p = poly_mul(p, cyclotomic_poly(pick(rng)));
        EXPECT_EQ(cyclotomic_multiplicity(p).total, cyclotomic_multiplicity(substitute_scale(p, Int(-1))).total);
    }
}

TEST(DimVMu, ProjectiveSpacesAndQuadric) {
    for (unsigned m = 1; m <= 3; ++m)
        for (unsigned p = 0; p <= m; ++p) EXPECT_EQ(dim_v_mu(projective_zeta(3, m), p).vMu, 1u);
    const ZetaFunction quadric{2, 2, {1}, prod_linear({1, 2, 2, 4})};
    EXPECT_EQ(dim_v_mu(quadric, 1).vMu, 2u);
    EXPECT_EQ(dim_v_mu(quadric, 0).vMu, 1u);
    EXPECT_EQ(dim_v_mu(quadric, 2).vMu, 1u);
    EXPECT_EQ(picard_upper_bound(quadric), 2u);
    EXPECT_EQ(picard_upper_bound(projective_zeta(2, 2)), 1u);
    // A weight-2 factor that is not q times a root of unity contributes nothing.
    const ZetaFunction twisted{2, 2, {1}, poly_mul(prod_linear({1, 4}), poly_mul(ZPoly{1, -2}, ZPoly{1, 2, 4}))};
    EXPECT_EQ(dim_v_mu(twisted, 1).vMu, 3u);
    const ZetaFunction generic{2, 2, {1}, poly_mul(prod_linear({1, 4}), poly_mul(ZPoly{1, -2}, ZPoly{1, -1, 4}))};
    EXPECT_EQ(dim_v_mu(generic, 1).vMu, 1u);
}

TEST(ReconstructSurface, SplitQuadricIsForced) {
    CountSeries s;
    s.q = 2;
    s.counts = {9};
    const auto R = reconstruct_surface(s, 2);
    ASSERT_FALSE(R.ambiguous());
    EXPECT_EQ(R.candidates[0].den, prod_linear({1, 2, 2, 4}));
    EXPECT_EQ(betti_numbers(R.candidates[0]), (std::vector<unsigned>{1, 0, 2, 0, 1}));
}

TEST(ReconstructSurface, NormQuadricNeedsSecondCount) {
    CountSeries s;
    s.q = 2;
    s.counts = {5};
    const auto R1 = reconstruct_surface(s, 2);
    EXPECT_TRUE(R1.ambiguous());
    s.counts = {5, 25};
    const auto R2 = reconstruct_surface(s, 2);
    ASSERT_FALSE(R2.ambiguous());
    EXPECT_EQ(R2.candidates[0].den, poly_mul(prod_linear({1, 4}), ZPoly{1, 0, -4}));
    EXPECT_EQ(picard_upper_bound(R2.candidates[0]), 2u);
}

TEST(ReconstructSurface, EdgeCasesAndErrors) {
    CountSeries s;
    s.q = 3;
    s.counts = {10};
    const auto R = reconstruct_surface(s, 0);
    ASSERT_EQ(R.candidates.size(), 1u);
    EXPECT_EQ(R.candidates[0].den, prod_linear({1, 9}));
    s.counts = {};
    EXPECT_THROW(reconstruct_surface(s, 4), Error);
    s.counts = {1000, 1};
    EXPECT_THROW(reconstruct_surface(s, 2), Error);
}

TEST(ReconstructSurface, FermatCubicOverF2) {
    const GaloisField F2(make_field(2, 1));
    HomIdeal<GaloisField> I(F2, 4);
    I.add(parse_poly(F2, 4, "x0^3 + x1^3 + x2^3 + x3^3"));
    const auto counts = count_tower(I, 4);
    const auto R = reconstruct_surface(counts, 7);
    ASSERT_EQ(R.candidates.size(), 1u);
    const auto& Z = R.candidates[0];
    EXPECT_EQ(betti_numbers(Z), (std::vector<unsigned>{1, 0, 7, 0, 1}));
    EXPECT_EQ(picard_upper_bound(Z), 7u);
    EXPECT_TRUE(functional_equation_check(Z).holds);
}
