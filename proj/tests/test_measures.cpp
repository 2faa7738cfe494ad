#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "dbl/measures.hpp"

using namespace dbl;

namespace {

FiniteSpacePtr two_points(const Rat& d = 1) {
    return std::make_shared<FiniteSpace>(
        std::vector<std::vector<Rat>>{{Rat(0), d}, {d, Rat(0)}});
}

IntervalSet random_interval_set(std::mt19937& rng) {
    std::uniform_int_distribution<int> coord(-32, 32);
    std::uniform_int_distribution<int> count(1, 3);
    int k = count(rng);
    std::vector<int> pts;
    while (static_cast<int>(pts.size()) < 2 * k) {
        int c = coord(rng);
        if (std::find(pts.begin(), pts.end(), c) == pts.end()) pts.push_back(c);
    }
    std::sort(pts.begin(), pts.end());
    std::vector<Interval> parts;
    for (int i = 0; i < k; ++i) parts.push_back({Rat(pts[2 * i], 4), Rat(pts[2 * i + 1], 4)});
    return IntervalSet(std::move(parts));
}

}  // namespace

TEST_CASE("measure evaluation per backend") {
    REQUIRE(PiecewiseDensity::lebesgue().measure(IntervalSet::single(0, 2)) == 2);
    REQUIRE(BernoulliWeights({Rat(1, 2), Rat(1, 2)}).measure(CylinderSet(2, {"01"})) == Rat(1, 4));
    PointWeights pw(two_points(), {Rat(1), Rat(3)});
    REQUIRE(pw.measure(0b10) == 3);

    PiecewiseDensity pd({Rat(0), Rat(1), Rat(2)}, {Rat(3), Rat(5)}, Rat(1));
    // integral over (-1, 3): 1 + 3 + 5 + 1
    REQUIRE(pd.measure_interval(-1, 3) == 10);
    REQUIRE(pd.measure_interval(Rat(1, 2), Rat(3, 2)) == Rat(3, 2) + Rat(5, 2));
}

TEST_CASE("measure representations validate their invariants") {
    REQUIRE_THROWS_AS(PiecewiseDensity({Rat(1), Rat(0)}, {Rat(1)}, Rat(1)), std::invalid_argument);
    REQUIRE_THROWS_AS(PiecewiseDensity({Rat(0), Rat(1)}, {Rat(0)}, Rat(1)), std::invalid_argument);
    REQUIRE_THROWS_AS(BernoulliWeights({Rat(1, 2), Rat(1, 3)}), std::invalid_argument);
    REQUIRE_THROWS_AS(PointWeights(two_points(), {Rat(1), Rat(0)}), std::domain_error);
}

TEST_CASE("doubling constants in closed form") {
    REQUIRE(doubling_evidence(PiecewiseDensity::lebesgue()).exact == Rat(2));
    REQUIRE(doubling_evidence(PiecewiseDensity::constant(Rat(7, 3))).exact == Rat(2));
    REQUIRE(doubling_evidence(BernoulliWeights({Rat(1, 4), Rat(3, 4)})).exact == Rat(4));
    REQUIRE(doubling_evidence(MeasureRep(PointWeights(two_points(), {Rat(1), Rat(3)}))).exact ==
            Rat(4));
}

TEST_CASE("bernoulli constant agrees with a brute-force ratio scan") {
    BernoulliWeights mu({Rat(1, 4), Rat(3, 4)});
    Rat best = 1;
    std::vector<std::string> words{""};
    for (unsigned depth = 0; depth < 5; ++depth) {
        std::vector<std::string> next;
        for (const auto& w : words)
            for (char c : {'0', '1'}) next.push_back(w + c);
        // ratio of a cylinder to its parent is the doubled-ball ratio
        for (const auto& w : next)
            best = std::max(best, Rat(mu.cylinder_mass(w.substr(0, w.size() - 1)) /
                                      mu.cylinder_mass(w)));
        words = std::move(next);
    }
    REQUIRE(best == mu.doubling_constant());
}

TEST_CASE("piecewise densities get a sound upper bound") {
    PiecewiseDensity pd({Rat(0), Rat(1)}, {Rat(4)}, Rat(1));
    DoublingEvidence ev = doubling_evidence(pd);
    REQUIRE_FALSE(ev.exact.has_value());
    REQUIRE(ev.certified_upper == 8);
    REQUIRE(ev.sampled_lower >= 2.0);
    REQUIRE(ev.sampled_lower <= rat_to_double(ev.certified_upper));
}

TEST_CASE("comparison theorem on the documented instances") {
    SECTION("lebesgue with nested intervals, sharp exponent") {
        auto rep = verify_comparison(PiecewiseDensity::lebesgue(),
                                     OpenSetHandle(IntervalSet::single(0, 1)),
                                     OpenSetHandle(IntervalSet::single(0, 2)));
        REQUIRE(rep.directed == 2);
        REQUIRE(rep.sharp_exponent);
        REQUIRE(rep.holds);
    }
    SECTION("containment gives exponent zero") {
        auto rep = verify_comparison(PiecewiseDensity::lebesgue(),
                                     OpenSetHandle(IntervalSet::single(0, 2)),
                                     OpenSetHandle(IntervalSet::single(0, 1)));
        REQUIRE(rep.directed == 0);
        REQUIRE(rep.holds);
    }
    SECTION("bernoulli tightness at U=[01], V=Sigma") {
        BernoulliWeights mu({Rat(1, 2), Rat(1, 2)});
        OpenSetHandle u{CylinderSet(2, {"01"})};
        OpenSetHandle v{CylinderSet::whole(2)};
        auto rep = verify_comparison(mu, u, v);
        REQUIRE(rep.directed == 2);
        REQUIRE(rep.holds);
        // exact equality: 1/4 = 2^{-2} * 1
        REQUIRE(measure_of(MeasureRep(mu), u) ==
                measure_of(MeasureRep(mu), v) / rat_pow(rep.constant_used, 2));
    }
}

TEST_CASE("comparison theorem randomized, zero violations") {
    std::mt19937 rng(808);
    std::uniform_int_distribution<int> den(1, 4);

    SECTION("realline") {
        for (int trial = 0; trial < 200; ++trial) {
            std::vector<Rat> breaks{Rat(-8), Rat(0), Rat(8)};
            std::vector<Rat> ds{Rat(den(rng)), Rat(den(rng))};
            PiecewiseDensity mu(breaks, ds, Rat(den(rng)));
            auto rep = verify_comparison(mu, OpenSetHandle(random_interval_set(rng)),
                                         OpenSetHandle(random_interval_set(rng)));
            REQUIRE(rep.holds);
        }
    }
    SECTION("symbolic") {
        std::uniform_int_distribution<unsigned> depth(0, 3);
        std::uniform_int_distribution<unsigned> letter(0, 1);
        auto random_words = [&] {
            std::vector<std::string> ws;
            for (int i = 0; i < 3; ++i) {
                std::string w;
                for (unsigned j = depth(rng); j > 0; --j) w += char('0' + letter(rng));
                ws.push_back(w);
            }
            return CylinderSet(2, std::move(ws));
        };
        for (int trial = 0; trial < 200; ++trial) {
            int a = den(rng);
            BernoulliWeights mu({Rat(a, 8), Rat(8 - a, 8)});
            auto rep = verify_comparison(mu, OpenSetHandle(random_words()),
                                         OpenSetHandle(random_words()));
            REQUIRE(rep.holds);
            REQUIRE(rep.sharp_exponent);
        }
    }
    SECTION("finite") {
        std::vector<Rat> menu{Rat(1), Rat(3, 2), Rat(2)};
        std::uniform_int_distribution<std::size_t> pick(0, menu.size() - 1);
        std::uniform_int_distribution<int> wgen(1, 9);
        for (int trial = 0; trial < 200; ++trial) {
            std::size_t n = 2 + trial % 3;
            std::vector<std::vector<Rat>> d(n, std::vector<Rat>(n, Rat(0)));
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j) d[i][j] = d[j][i] = menu[pick(rng)];
            auto sp = std::make_shared<FiniteSpace>(std::move(d));
            std::vector<Rat> w;
            for (std::size_t i = 0; i < n; ++i) w.push_back(Rat(wgen(rng)));
            PointWeights mu(sp, w);
            std::uniform_int_distribution<Mask> mgen(1, sp->whole());
            auto rep = verify_comparison(MeasureRep(mu), OpenSetHandle(FinitePointSet{sp, mgen(rng)}),
                                         OpenSetHandle(FinitePointSet{sp, mgen(rng)}));
            REQUIRE(rep.holds);
        }
    }
}

TEST_CASE("absolutely continuous measures ignore puncture sets") {
    std::mt19937 rng(909);
    PiecewiseDensity mu({Rat(-4), Rat(4)}, {Rat(3)}, Rat(1));
    for (int trial = 0; trial < 50; ++trial) {
        IntervalSet u = random_interval_set(rng);
        for (unsigned n : {0u, 2u, 5u})
            REQUIRE(mu.measure(minus_truncated(u, n)) == mu.measure(u));
    }
}

TEST_CASE("reweighting a part by two at most doubles the constant") {
    // nu(B) = 2 mu(B and E1) + mu(B \ E1) on a finite space
    std::mt19937 rng(111);
    std::uniform_int_distribution<int> wgen(1, 9);
    std::vector<Rat> menu{Rat(1), Rat(2)};
    std::uniform_int_distribution<std::size_t> pick(0, 1);
    for (int trial = 0; trial < 40; ++trial) {
        std::size_t n = 3 + trial % 3;
        std::vector<std::vector<Rat>> d(n, std::vector<Rat>(n, Rat(0)));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) d[i][j] = d[j][i] = menu[pick(rng)];
        auto sp = std::make_shared<FiniteSpace>(std::move(d));
        std::vector<Rat> w;
        for (std::size_t i = 0; i < n; ++i) w.push_back(Rat(wgen(rng)));
        std::uniform_int_distribution<Mask> mgen(0, sp->whole());
        Mask e1 = mgen(rng);
        std::vector<Rat> w2 = w;
        for (std::size_t i = 0; i < n; ++i)
            if (e1 & (Mask(1) << i)) w2[i] *= 2;
        REQUIRE(sp->doubling_constant(w2) <= 2 * sp->doubling_constant(w));
    }
}

TEST_CASE("density products refine breakpoints") {
    PiecewiseDensity a({Rat(0), Rat(2)}, {Rat(3)}, Rat(1));
    PiecewiseDensity b({Rat(1), Rat(3)}, {Rat(5)}, Rat(1));
    PiecewiseDensity c = a.multiply(b);
    REQUIRE(c.density_at(Rat(1, 2)) == 3);
    REQUIRE(c.density_at(Rat(3, 2)) == 15);
    REQUIRE(c.density_at(Rat(5, 2)) == 5);
    REQUIRE(c.density_at(Rat(10)) == 1);
}

TEST_CASE("doubling certification by branch and bound") {
    SECTION("constant densities certify immediately") {
        auto cert = certify_doubling_upper(PiecewiseDensity::lebesgue(), Rat(3));
        REQUIRE(cert.certified);
    }
    SECTION("a single jump certifies at (3+s)/2") {
        PiecewiseDensity pd({Rat(0)}, {}, Rat(1));
        auto cert = certify_doubling_upper(pd, Rat(3));
        REQUIRE(cert.certified);
    }
    SECTION("jump of ratio 5 attains worst ratio (3+5)/2 = 4") {
        PiecewiseDensity pd({Rat(0), Rat(100)}, {Rat(5)}, Rat(1));
        // certifies strictly above the attained supremum
        REQUIRE(certify_doubling_upper(pd, Rat(4) + Rat(1, 1000)).certified);
        auto too_low = certify_doubling_upper(pd, Rat(7, 2));
        REQUIRE_FALSE(too_low.certified);
        // and sampling actually witnesses a ratio above the refused threshold
        REQUIRE(too_low.sampled_lower > 3.5);
    }
    SECTION("certified bound beats the global range bound on a wide density") {
        PiecewiseDensity pd({Rat(0), Rat(1), Rat(2)}, {Rat(16), Rat(4)}, Rat(1));
        // global bound is 32; true constant is far below 12
        REQUIRE(certify_doubling_upper(pd, Rat(12)).certified);
    }
}
