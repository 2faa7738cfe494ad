#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "dbl/interval_set.hpp"

using namespace dbl;

namespace {

IntervalSet make(std::initializer_list<std::pair<const char*, const char*>> parts) {
    std::vector<Interval> v;
    for (const auto& [lo, hi] : parts) v.push_back({parse_rat(lo), parse_rat(hi)});
    return IntervalSet(std::move(v));
}

// Independent predecessor oracle: enumerate balls O(x,r) contained in U with
// centers and radii on a fine rational grid, union the doubled balls, and
// compare against the closed form at grid resolution.
IntervalSet predecessor_grid_oracle(const IntervalSet& u, const Rat& step) {
    Rat lo = u.min() - u.total_length();
    Rat hi = u.max() + u.total_length();
    Rat max_r = (u.max() - u.min()) / 2 + step;
    std::vector<Interval> doubled;
    for (Rat x = lo; x <= hi; x += step) {
        for (Rat r = step; r <= max_r; r += step) {
            if (u.contains(IntervalSet::single(x - r, x + r)))
                doubled.push_back({x - 2 * r, x + 2 * r});
        }
    }
    return IntervalSet(std::move(doubled));
}

}  // namespace

TEST_CASE("normalization merges strict overlaps and keeps touching parts") {
    IntervalSet s = make({{"0", "2"}, {"1", "3"}});
    REQUIRE(s.component_count() == 1);
    REQUIRE(s.components()[0] == Interval{0, 3});

    IntervalSet t = make({{"0", "1"}, {"1", "2"}});
    REQUIRE(t.component_count() == 2);
    REQUIRE_FALSE(t.contains_point(1));

    // idempotent: rebuilding from the canonical components changes nothing
    IntervalSet again(t.components());
    REQUIRE(again == t);
}

TEST_CASE("containment needs a single covering component") {
    IntervalSet u = make({{"0", "1"}, {"1", "2"}});
    REQUIRE_FALSE(u.contains(IntervalSet::single(Rat(1, 2), Rat(3, 2))));
    REQUIRE(u.contains(IntervalSet::single(Rat(1, 4), Rat(3, 4))));
    REQUIRE(make({{"0", "2"}}).contains(u));
}

TEST_CASE("single-interval predecessor closed form") {
    IntervalSet u = IntervalSet::single(0, 2);
    IntervalSet p = predecessor(u);
    REQUIRE(p == IntervalSet::single(-1, 3));
    // |pred(a,b)| = 2(b-a) exactly
    REQUIRE(p.total_length() == 2 * u.total_length());
}

TEST_CASE("identity case n=0") {
    IntervalSet u = make({{"1/3", "2/3"}, {"1", "7"}});
    REQUIRE(iterate_predecessor(u, 0) == u);
}

TEST_CASE("predecessor merges overlapping doubled components") {
    // (0,1) u (1,2): the doubled halves overlap and the puncture at 1 is
    // swallowed.
    IntervalSet u = make({{"0", "1"}, {"1", "2"}});
    IntervalSet p = iterate_predecessor(u, 1);
    REQUIRE(p == IntervalSet::single(Rat(-1, 2), Rat(5, 2)));

    IntervalSet oracle = predecessor_grid_oracle(u, Rat(1, 64));
    REQUIRE(p.contains(oracle));
    REQUIRE(p.total_length() - oracle.total_length() <= Rat(1, 4));
}

TEST_CASE("predecessor keeps separated components separate") {
    IntervalSet u = make({{"0", "1"}, {"2", "3"}});
    IntervalSet p = predecessor(u);
    REQUIRE(p == make({{"-1/2", "3/2"}, {"3/2", "7/2"}}));
    REQUIRE_FALSE(p.contains_point(Rat(3, 2)));

    IntervalSet oracle = predecessor_grid_oracle(u, Rat(1, 64));
    REQUIRE(p.contains(oracle));
}

TEST_CASE("minus punctures for (0,4)") {
    IntervalSet v = IntervalSet::single(0, 4);

    SECTION("N=1 gives the documented puncture set") {
        IntervalSet m = minus_truncated(v, 1);
        REQUIRE(m == make({{"0", "1/3"}, {"1/3", "1"}, {"1", "3"}, {"3", "11/3"}, {"11/3", "4"}}));
    }
    SECTION("N=0 keeps one puncture per side") {
        IntervalSet m = minus_truncated(v, 0);
        REQUIRE(m == make({{"0", "1"}, {"1", "3"}, {"3", "4"}}));
    }
    SECTION("minus applies componentwise to punctured sets") {
        IntervalSet u = make({{"0", "1"}, {"1", "2"}});
        IntervalSet m = minus_truncated(u, 0);
        REQUIRE(m.component_count() == 6);
        for (const auto& c : m.components()) REQUIRE(c.length() > 0);
    }
}

TEST_CASE("truncated minus predecessor overshoots the base") {
    // pred of the N=2 truncation of (0,4)_- covers (0,4) plus exactly 1/18
    // on each side: the outer stubs (0,y_2) and (x_2,4) have length 1/9.
    IntervalSet v = IntervalSet::single(0, 4);
    IntervalSet trunc = minus_truncated(v, 2);
    IntervalSet p = predecessor(trunc);
    REQUIRE(p.contains(v));
    REQUIRE(p == IntervalSet::single(Rat(-1, 18), Rat(4) + Rat(1, 18)));
}

TEST_CASE("minus-then-predecessor overshoot shrinks monotonically in N") {
    IntervalSet v = IntervalSet::single(0, 4);
    Rat prev_overshoot = -1;
    for (unsigned n = 0; n <= 10; ++n) {
        IntervalSet p = predecessor(minus_truncated(v, n));
        REQUIRE(p.contains(v));
        Rat overshoot = (v.min() - p.min()) + (p.max() - v.max());
        REQUIRE(overshoot > 0);
        if (prev_overshoot >= 0) REQUIRE(overshoot < prev_overshoot);
        prev_overshoot = overshoot;
    }
}

TEST_CASE("components cover lists the maximal balls") {
    IntervalSet u = make({{"0", "1"}, {"2", "3"}});
    auto cover = components_cover(u);
    REQUIRE(cover.size() == 2);
    REQUIRE(cover[0].center == Rat(1, 2));
    REQUIRE(cover[0].radius == Rat(1, 2));
    REQUIRE(cover[1].center == Rat(5, 2));
    REQUIRE(cover[1].radius == Rat(1, 2));

    IntervalSet punctured = make({{"-1", "0"}, {"0", "1"}});
    auto cover2 = components_cover(punctured);
    REQUIRE(cover2[0].center == Rat(-1, 2));
    REQUIRE(cover2[1].center == Rat(1, 2));
}

TEST_CASE("doubled cover equals the predecessor on random sets") {
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> coord(-64, 64);
    std::uniform_int_distribution<int> count(1, 4);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<int> pts;
        int k = count(rng);
        while (static_cast<int>(pts.size()) < 2 * k) {
            int c = coord(rng);
            if (std::find(pts.begin(), pts.end(), c) == pts.end()) pts.push_back(c);
        }
        std::sort(pts.begin(), pts.end());
        std::vector<Interval> parts;
        for (int i = 0; i < k; ++i)
            parts.push_back({Rat(pts[2 * i], 8), Rat(pts[2 * i + 1], 8)});
        IntervalSet u(std::move(parts));

        std::vector<Interval> doubled;
        for (const auto& ball : components_cover(u))
            doubled.push_back({ball.center - 2 * ball.radius, ball.center + 2 * ball.radius});
        REQUIRE(IntervalSet(std::move(doubled)) == predecessor(u));

        // the cover is pairwise disjoint by construction of the components
        auto cover = components_cover(u);
        for (std::size_t i = 0; i + 1 < cover.size(); ++i)
            REQUIRE(cover[i].center + cover[i].radius <= cover[i + 1].center - cover[i + 1].radius);
    }
}

TEST_CASE("similarity transforms endpoints") {
    IntervalSet u = IntervalSet::single(0, 1);
    REQUIRE(similarity_apply(u, 2, 3) == IntervalSet::single(3, 5));
    REQUIRE(similarity_apply(u, 1, 0) == u);
    REQUIRE_THROWS_AS(similarity_apply(u, 0, 0), std::domain_error);
}

TEST_CASE("set helpers: subtract_closure and remove_points") {
    IntervalSet u = IntervalSet::single(0, 10);
    IntervalSet cut = u.subtract_closure(make({{"2", "3"}, {"5", "6"}}));
    REQUIRE(cut == make({{"0", "2"}, {"3", "5"}, {"6", "10"}}));

    IntervalSet punct = u.remove_points({Rat(4), Rat(20)});
    REQUIRE(punct == make({{"0", "4"}, {"4", "10"}}));
}
