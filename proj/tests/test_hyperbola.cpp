#include <catch2/catch_amalgamated.hpp>

#include <hyperbox/hyperbola.hpp>

#include <algorithm>
#include <set>
#include <stdexcept>
#include <vector>

using namespace hyperbox;

namespace {

bool on_curve(const HyperbolaInstance& inst, Point pt) {
    const u64 p = inst.p().value();
    return pt.x >= 1 && pt.x < p && pt.y >= 1 && pt.y < p &&
           detail::mul_mod_raw(pt.x, pt.y, p) == inst.c();
}

// Does the cyclic window {X+1, ..., X+H} contain v?
bool window_covers(u64 X, u64 v, u64 H, u64 p) {
    return (v + p - (X + 1) % p) % p < H;
}

// A box of side h_star must exist that holds both witness points; try the
// corners one below each coordinate and demand box_count sees the pair.
void check_enclosing_box(const HyperbolaInstance& inst, const MinBoxResult& res) {
    const u64 p = inst.p().value();
    const auto [s, t] = res.witness;
    for (u64 X : {(s.x + p - 1) % p, (t.x + p - 1) % p}) {
        if (!window_covers(X, s.x, res.h_star, p) || !window_covers(X, t.x, res.h_star, p))
            continue;
        for (u64 Y : {(s.y + p - 1) % p, (t.y + p - 1) % p}) {
            if (!window_covers(Y, s.y, res.h_star, p) || !window_covers(Y, t.y, res.h_star, p))
                continue;
            REQUIRE(box_count(inst, {X, Y, res.h_star}) >= 2);
            return;
        }
    }
    FAIL("no corner placement covers the witness pair");
}

void check_witness(const HyperbolaInstance& inst, const MinBoxResult& res) {
    const auto [s, t] = res.witness;
    REQUIRE(on_curve(inst, s));
    REQUIRE(on_curve(inst, t));
    REQUIRE(s != t);
    REQUIRE(s < t);
    const Modulus m = inst.p();
    REQUIRE(res.offset.a == circ_dist(s.x, t.x, m));
    REQUIRE(res.offset.b_magnitude == circ_dist(s.y, t.y, m));
    REQUIRE(std::max(res.offset.a, res.offset.b_magnitude) == res.h_star - 1);
    REQUIRE((res.offset.b_sign == 1 || res.offset.b_sign == -1));
    check_enclosing_box(inst, res);
}

} // namespace

TEST_CASE("HyperbolaInstance validates and reduces c", "[hyperbola]") {
    const Modulus m(7);
    REQUIRE(HyperbolaInstance(m, 10).c() == 3);
    REQUIRE_THROWS_AS(HyperbolaInstance(m, 0), std::invalid_argument);
    REQUIRE_THROWS_AS(HyperbolaInstance(m, 14), std::invalid_argument);
}

TEST_CASE("enumerate_points lists the curve in x order", "[hyperbola]") {
    const Modulus m(7);
    const std::vector<Point> unit = {{1, 1}, {2, 4}, {3, 5}, {4, 2}, {5, 3}, {6, 6}};
    REQUIRE(enumerate_points(HyperbolaInstance(m, 1)) == unit);
    const std::vector<Point> three = {{1, 3}, {2, 5}, {3, 1}, {4, 6}, {5, 2}, {6, 4}};
    REQUIRE(enumerate_points(HyperbolaInstance(m, 3)) == three);

    const HyperbolaInstance inst(Modulus(31), 10);
    const auto pts = enumerate_points(inst);
    REQUIRE(pts.size() == 30);
    for (const Point pt : pts) REQUIRE(on_curve(inst, pt));
    REQUIRE(std::is_sorted(pts.begin(), pts.end()));
}

TEST_CASE("circ_dist measures the residue circle", "[hyperbola]") {
    const Modulus m(7);
    REQUIRE(circ_dist(5, 5, m) == 0);
    REQUIRE(circ_dist(1, 6, m) == 2);
    REQUIRE(circ_dist(6, 1, m) == 2);
    REQUIRE(circ_dist(2, 4, m) == 2);
    const Modulus m11(11);
    for (u64 u = 0; u < 11; ++u)
        for (u64 v = 0; v < 11; ++v) {
            REQUIRE(circ_dist(u, v, m11) == circ_dist(v, u, m11));
            REQUIRE(circ_dist(u, v, m11) <= 5);
        }
    REQUIRE_THROWS_AS(circ_dist(7, 0, m), std::invalid_argument);
}

TEST_CASE("box_count counts points in cyclic windows", "[hyperbola]") {
    const Modulus m(7);
    const HyperbolaInstance unit(m, 1);
    REQUIRE(box_count(unit, {1, 3, 2}) == 2);
    REQUIRE(box_count(unit, {0, 1, 1}) == 0);
    REQUIRE(box_count(unit, {0, 0, 7}) == 6); // whole plane sees all p-1 points
    REQUIRE(box_count(unit, {3, 3, 7}) == 6);
    // Wrapping box: x in {6, 0, 1}, y in {6, 0, 1} catches (6,6) and (1,1).
    REQUIRE(box_count(unit, {5, 5, 3}) == 2);
    REQUIRE_THROWS_AS(box_count(unit, {7, 0, 1}), std::invalid_argument);
    REQUIRE_THROWS_AS(box_count(unit, {0, 0, 0}), std::invalid_argument);
    REQUIRE_THROWS_AS(box_count(unit, {0, 0, 8}), std::invalid_argument);
}

TEST_CASE("min_box_oracle finds the smallest two-point box", "[hyperbola]") {
    const Modulus m(7);

    const auto r1 = min_box_oracle(HyperbolaInstance(m, 1));
    REQUIRE(r1.h_star == 2);
    REQUIRE(r1.witness == std::pair<Point, Point>{{2, 4}, {3, 5}});

    const auto r3 = min_box_oracle(HyperbolaInstance(m, 3));
    REQUIRE(r3.h_star == 3);
    REQUIRE(r3.witness == std::pair<Point, Point>{{1, 3}, {2, 5}});
    REQUIRE(r3.offset.a == 1);
    REQUIRE(r3.offset.b_magnitude == 2);
    REQUIRE(r3.offset.b_sign == 1);

    // Ties at h_star = 2 resolve to the x-lexicographically first pair.
    const auto r5 = min_box_oracle(HyperbolaInstance(m, 5));
    REQUIRE(r5.h_star == 2);
    REQUIRE(r5.witness == std::pair<Point, Point>{{1, 5}, {2, 6}});

    for (u64 c = 1; c < 7; ++c)
        check_witness(HyperbolaInstance(m, c), min_box_oracle(HyperbolaInstance(m, c)));

    REQUIRE_THROWS_AS(min_box_oracle(HyperbolaInstance(Modulus(3), 1)),
                      std::invalid_argument);
}

TEST_CASE("criterion_decide matches the worked examples", "[hyperbola]") {
    const Modulus m(7);
    const HyperbolaInstance c3(m, 3);

    const auto hit = criterion_decide(c3, 3);
    REQUIRE(hit.has_value());
    REQUIRE(hit->a == 1);
    REQUIRE(hit->b_magnitude == 2);
    REQUIRE(hit->b_sign == 1);
    REQUIRE_FALSE(criterion_decide(c3, 2).has_value());

    const auto unit = criterion_decide(HyperbolaInstance(m, 1), 2);
    REQUIRE(unit.has_value());
    REQUIRE(unit->a == 1);
    REQUIRE(unit->b_magnitude == 1);
    REQUIRE(unit->b_sign == 1);

    REQUIRE_THROWS_AS(criterion_decide(c3, 1), std::invalid_argument);
    REQUIRE_THROWS_AS(criterion_decide(c3, 8), std::invalid_argument);
}

TEST_CASE("criterion table and descent evaluators agree", "[hyperbola]") {
    const Modulus m(31);
    const LegendreTable table(m);
    for (u64 c = 1; c < 31; ++c) {
        const HyperbolaInstance inst(m, c);
        for (u64 H = 2; H <= 31; ++H) {
            const auto a = criterion_decide(inst, H);
            const auto b = criterion_decide(inst, H, table);
            REQUIRE(a.has_value() == b.has_value());
            if (a) {
                REQUIRE(a->a == b->a);
                REQUIRE(a->b_magnitude == b->b_magnitude);
                REQUIRE(a->b_sign == b->b_sign);
            }
        }
    }
}

TEST_CASE("criterion_even restricts to doubled offsets", "[hyperbola]") {
    const Modulus m(7);
    const HyperbolaInstance c3(m, 3);

    const auto hit = criterion_even(c3, 6);
    REQUIRE(hit.has_value());
    REQUIRE(hit->a == 4);
    REQUIRE(hit->b_magnitude == 4);
    REQUIRE(hit->b_sign == 1);

    REQUIRE_FALSE(criterion_even(c3, 3).has_value());
    // H = 2 leaves no even offsets at all.
    for (u64 c = 1; c < 7; ++c)
        REQUIRE_FALSE(criterion_even(HyperbolaInstance(m, c), 2).has_value());
}

TEST_CASE("even criterion success implies the full criterion", "[hyperbola]") {
    for (u64 p : {5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL}) {
        const Modulus m(p);
        const LegendreTable table(m);
        for (u64 c = 1; c < p; ++c) {
            const HyperbolaInstance inst(m, c);
            for (u64 H = 2; H <= p; ++H)
                if (criterion_even(inst, H, table))
                    REQUIRE(criterion_decide(inst, H, table).has_value());
        }
    }
}

TEST_CASE("criterion decides exactly when the oracle box fits", "[hyperbola]") {
    for (u64 p : {5ULL, 7ULL, 11ULL, 13ULL}) {
        const Modulus m(p);
        const LegendreTable table(m);
        for (u64 c = 1; c < p; ++c) {
            const HyperbolaInstance inst(m, c);
            const u64 h_star = min_box_oracle(inst).h_star;
            for (u64 H = 2; H <= p; ++H)
                REQUIRE(criterion_decide(inst, H, table).has_value() == (h_star <= H));
        }
    }
}

TEST_CASE("min_box_fast reproduces the oracle minimum", "[hyperbola]") {
    for (u64 p : {5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 37ULL, 61ULL}) {
        const Modulus m(p);
        const LegendreTable table(m);
        for (u64 c = 1; c < p; ++c) {
            const HyperbolaInstance inst(m, c);
            const auto fast = min_box_fast(inst, table);
            REQUIRE(fast.h_star == min_box_oracle(inst).h_star);
            check_witness(inst, fast);
            const auto plain = min_box_fast(inst);
            REQUIRE(plain.h_star == fast.h_star);
            REQUIRE(plain.witness == fast.witness);
        }
    }

    // Worked case: offsets (1, -1) fire first and the quadratic pins the pair.
    const auto r = min_box_fast(HyperbolaInstance(Modulus(11), 1));
    REQUIRE(r.h_star == 2);
    REQUIRE(r.witness == std::pair<Point, Point>{{3, 4}, {4, 3}});
    REQUIRE(r.offset.a == 1);
    REQUIRE(r.offset.b_magnitude == 1);
    REQUIRE(r.offset.b_sign == -1);
}

TEST_CASE("the p = 7 minimum-box profile is pinned", "[hyperbola]") {
    const Modulus m(7);
    const std::vector<u64> expected = {2, 2, 3, 3, 2, 2};
    for (u64 c = 1; c < 7; ++c)
        REQUIRE(min_box_fast(HyperbolaInstance(m, c)).h_star == expected[c - 1]);
}

TEST_CASE("max_min_box reports the worst class", "[hyperbola]") {
    const auto w7 = max_min_box(Modulus(7));
    REQUIRE(w7.h_star == 3);
    REQUIRE(w7.c == 3); // smallest c attaining the maximum

    const auto w5 = max_min_box(Modulus(5));
    REQUIRE(w5.h_star == 2);
    REQUIRE(w5.c == 1);

    const auto w23 = max_min_box(Modulus(23));
    REQUIRE(w23.h_star == 3);
    REQUIRE(w23.c == 1);

    for (u64 p : {5ULL, 11ULL, 29ULL, 43ULL})
        REQUIRE(max_min_box(Modulus(p)).h_star >= 2);
    REQUIRE_THROWS_AS(max_min_box(Modulus(3)), std::invalid_argument);
}

TEST_CASE("the point set is symmetric under swap and negation", "[hyperbola]") {
    for (u64 p : {11ULL, 13ULL, 29ULL}) {
        const Modulus m(p);
        for (u64 c : {u64{1}, u64{2}, p - 1}) {
            const auto pts = enumerate_points(HyperbolaInstance(m, c));
            const std::set<Point> base(pts.begin(), pts.end());
            std::set<Point> swapped, negated;
            for (const Point pt : pts) {
                swapped.insert({pt.y, pt.x});
                negated.insert({p - pt.x, p - pt.y});
            }
            REQUIRE(swapped == base);
            REQUIRE(negated == base);
        }
    }
}
