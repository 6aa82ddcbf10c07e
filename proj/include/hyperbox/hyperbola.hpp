#pragma once

// Geometry of the modular hyperbola xy = c (mod p): point enumeration,
// cyclic boxes, the exact minimal two-point box by pair scan, and the
// character criterion that finds the same minimum with O(h^2) Legendre
// evaluations instead of O(p^2) point pairs.
//
// The algebra behind the criterion: (x, y) and (x+a, y+beta) both lie on
// the hyperbola iff beta*x^2 + a*beta*x + a*c = 0 (mod p); completing the
// square gives (2*beta*x + u)^2 = u*(u - 4c) with u = a*beta. So a pair
// at offset (a, beta) exists iff u*(u - 4c) is a square mod p, where a
// vanishing discriminant still counts (the double root is a valid x).
// Both y-directions have to be tried: a pair can sit at (+a, -b) while no
// pair sits at (+a, +b).

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

#include "modarith.hpp"

namespace hyperbox {

/// One hyperbola point. Coordinates are reduced residues; both are
/// nonzero and x*y = c (mod p) for the instance that produced it.
struct Point {
    u64 x;
    u64 y;

    friend bool operator==(Point a, Point b) noexcept { return a.x == b.x && a.y == b.y; }
    friend bool operator!=(Point a, Point b) noexcept { return !(a == b); }
    friend bool operator<(Point a, Point b) noexcept {
        return a.x != b.x ? a.x < b.x : a.y < b.y;
    }
};

/// The curve xy = c (mod p) with gcd(c, p) = 1; has exactly p-1 points.
class HyperbolaInstance {
public:
    HyperbolaInstance(Modulus p, u64 c) : p_(p), c_(c % p.value()) {
        if (c_ == 0)
            throw std::invalid_argument("HyperbolaInstance: c must be nonzero mod p");
    }

    Modulus p() const noexcept { return p_; }
    u64 c() const noexcept { return c_; }

private:
    Modulus p_;
    u64 c_;
};

/// Cyclic square covering {X+1, ..., X+H} x {Y+1, ..., Y+H} mod p.
/// Note the corner convention: the box starts one past (X, Y).
struct BoxSpec {
    u64 X;
    u64 Y;
    u64 H;
};

/// Coordinate difference between two hyperbola points:
/// dx = a, dy = b_sign * b_magnitude (mod p).
struct OffsetWitness {
    u64 a;
    u64 b_magnitude;
    int b_sign; // +1 or -1
};

/// Minimal box side h_star admitting two points, with a realizing pair
/// (sorted by x) and its offset. The offset is orientation-canonical:
/// a and b_magnitude are the circular coordinate distances (both at most
/// floor(p/2)), and b_sign relates dy to the direction that realizes a.
/// max(a, b_magnitude) = h_star - 1.
struct MinBoxResult {
    u64 h_star;
    std::pair<Point, Point> witness;
    OffsetWitness offset;
};

/// Distance on the residue circle: min(|u-v|, p-|u-v|), in [0, p/2].
inline u64 circ_dist(u64 u, u64 v, Modulus m) {
    const u64 p = m.value();
    if (u >= p || v >= p)
        throw std::invalid_argument("circ_dist: arguments must be reduced mod p");
    const u64 d = u >= v ? u - v : v - u;
    return std::min(d, p - d);
}

/// All p-1 points, sorted by x. Costs one O(p) inverse table.
inline std::vector<Point> enumerate_points(const HyperbolaInstance& inst) {
    const u64 p = inst.p().value();
    const auto inv = detail::inverse_table(inst.p());
    std::vector<Point> pts;
    pts.reserve(static_cast<std::size_t>(p - 1));
    for (u64 x = 1; x < p; ++x)
        pts.push_back({x, detail::mul_mod_raw(inst.c(), inv[static_cast<std::size_t>(x)], p)});
    return pts;
}

/// Number of hyperbola points inside the cyclic box.
inline u64 box_count(const HyperbolaInstance& inst, BoxSpec box) {
    const u64 p = inst.p().value();
    if (box.X >= p || box.Y >= p)
        throw std::invalid_argument("box_count: corner must be reduced mod p");
    if (box.H < 1 || box.H > p)
        throw std::invalid_argument("box_count: side must be in [1, p]");
    u64 count = 0;
    for (u64 i = 0; i < box.H; ++i) {
        const u64 x = (box.X + 1 + i) % p;
        if (x == 0) continue;
        const u64 y = mul_mod(Residue{inst.c(), inst.p()}, inv_mod(Residue{x, inst.p()})).value();
        // y sits in {Y+1, ..., Y+H} iff its cyclic offset from Y+1 is < H
        const u64 off = (y + p - (box.Y + 1) % p) % p;
        if (off < box.H) ++count;
    }
    return count;
}

namespace detail {

// Discriminant test for one offset (a, beta): is u*(u-4c) a square mod p?
// chi must map a reduced nonzero residue to its Legendre symbol.
template <class Chi>
bool offset_pair_exists(u64 a, u64 beta, u64 c4, u64 p, const Chi& chi) {
    const u64 u = mul_mod_raw(a, beta, p);
    const u64 v = u >= c4 ? u - c4 : u + p - c4;
    if (v == 0) return true; // double root
    return chi(u) == chi(v); // u != 0 since p divides neither a nor beta
}

// First solvable offset with max(a, b) in [m_lo, m_hi], scanning shells
// of growing max; within a shell, (a, m) for a < m then (m, b) for
// b <= m, each with sign +1 before -1. The shell order makes the found
// witness one of minimal max(a, b), which is what the box search needs.
template <class Chi>
std::optional<OffsetWitness> offset_search(u64 m_lo, u64 m_hi, u64 c, u64 p, const Chi& chi) {
    const u64 c4 = mul_mod_raw(4 % p, c, p);
    for (u64 m = m_lo; m <= m_hi; ++m) {
        for (u64 k = 1; k <= 2 * m - 1; ++k) {
            const u64 a = k < m ? k : m;
            const u64 b = k < m ? m : k - m + 1;
            if (offset_pair_exists(a, b, c4, p, chi))
                return OffsetWitness{a, b, +1};
            if (offset_pair_exists(a, p - b, c4, p, chi))
                return OffsetWitness{a, b, -1};
        }
    }
    return std::nullopt;
}

inline int chi_descent(u64 r, Modulus m) {
    return legendre(static_cast<i64>(r), m);
}

} // namespace detail

/// Decides whether two hyperbola points fit in some cyclic box of side H,
/// i.e. whether a pair exists at offsets a, b in [1, H-1] (either sign).
/// Returns the witness offset when one exists. Agrees with
/// min_box_oracle(inst).h_star <= H for every H in [2, p].
template <class Chi>
std::optional<OffsetWitness> criterion_decide(const HyperbolaInstance& inst, u64 H,
                                              const Chi& chi) {
    const u64 p = inst.p().value();
    if (H < 2 || H > p)
        throw std::invalid_argument("criterion_decide: H must be in [2, p]");
    return detail::offset_search(1, H - 1, inst.c(), p, chi);
}

inline std::optional<OffsetWitness> criterion_decide(const HyperbolaInstance& inst, u64 H) {
    return criterion_decide(inst, H,
                            [m = inst.p()](u64 r) { return detail::chi_descent(r, m); });
}

inline std::optional<OffsetWitness> criterion_decide(const HyperbolaInstance& inst, u64 H,
                                                     const LegendreTable& table) {
    return criterion_decide(inst, H, [&table](u64 r) { return table.at(r); });
}

/// Even-offset restriction: a', b' in [1, floor((H-1)/2)] with
/// chi(a'b') * chi(a'b' - c) = +1 strictly (a vanishing factor does not
/// count here). Success implies criterion_decide(inst, H) via the doubled
/// offset a = 2a', b = 2b', sign +1, because chi(4) = +1 turns the full
/// discriminant condition at (2a', 2b') into exactly this product.
/// The converse fails, so this is a one-directional test.
template <class Chi>
std::optional<OffsetWitness> criterion_even(const HyperbolaInstance& inst, u64 H,
                                            const Chi& chi) {
    const u64 p = inst.p().value();
    if (H < 2 || H > p)
        throw std::invalid_argument("criterion_even: H must be in [2, p]");
    const u64 half = (H - 1) / 2;
    const u64 c = inst.c();
    for (u64 m = 1; m <= half; ++m) {
        for (u64 k = 1; k <= 2 * m - 1; ++k) {
            const u64 a = k < m ? k : m;
            const u64 b = k < m ? m : k - m + 1;
            const u64 u = detail::mul_mod_raw(a, b, p);
            const u64 v = u >= c ? u - c : u + p - c;
            if (v != 0 && chi(u) == chi(v))
                return OffsetWitness{2 * a, 2 * b, +1};
        }
    }
    return std::nullopt;
}

inline std::optional<OffsetWitness> criterion_even(const HyperbolaInstance& inst, u64 H) {
    return criterion_even(inst, H,
                          [m = inst.p()](u64 r) { return detail::chi_descent(r, m); });
}

inline std::optional<OffsetWitness> criterion_even(const HyperbolaInstance& inst, u64 H,
                                                   const LegendreTable& table) {
    return criterion_even(inst, H, [&table](u64 r) { return table.at(r); });
}

namespace detail {

// Canonical offset of a point pair: orient so the x-distance is the
// circular one (p odd makes the orientation unique), then read the
// y-offset in that direction.
inline OffsetWitness offsets_of_pair(Point s, Point t, u64 p) {
    u64 dx = t.x >= s.x ? t.x - s.x : t.x + p - s.x;
    u64 dy;
    if (dx <= p / 2) {
        dy = t.y >= s.y ? t.y - s.y : t.y + p - s.y;
    } else {
        dx = p - dx;
        dy = s.y >= t.y ? s.y - t.y : s.y + p - t.y;
    }
    if (dy <= p / 2) return {dx, dy, +1};
    return {dx, p - dy, -1};
}

} // namespace detail

/// Exhaustive minimal-box search: scans all point pairs, O(p^2).
/// h_star = (min over pairs of max of the two circular coordinate
/// distances) + 1. Ties broken by the first pair in x-sorted order,
/// which is the lexicographically smallest witness.
inline MinBoxResult min_box_oracle(const HyperbolaInstance& inst) {
    const u64 p = inst.p().value();
    if (p < 5)
        throw std::invalid_argument("min_box_oracle: need p >= 5");
    const auto pts = enumerate_points(inst);
    const std::size_t n = pts.size();
    u64 best = p;
    std::size_t bi = 0, bj = 1;
    for (std::size_t i = 0; i < n && best > 1; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const u64 ddx = pts[j].x - pts[i].x; // positive: sorted by x
            const u64 dx = std::min(ddx, p - ddx);
            if (dx >= best) continue;
            const u64 ddy = pts[j].y >= pts[i].y ? pts[j].y - pts[i].y : pts[i].y - pts[j].y;
            const u64 d = std::max(dx, std::min(ddy, p - ddy));
            if (d < best) {
                best = d;
                bi = i;
                bj = j;
                if (best == 1) break; // distinct points never share a coordinate
            }
        }
    }
    return {best + 1, {pts[bi], pts[bj]}, detail::offsets_of_pair(pts[bi], pts[bj], p)};
}

namespace detail {

// Solve (2*beta*x + u)^2 = u*(u - 4c) for x and return the point pair at
// offset (a, beta), lex-least normalization over the (up to two) roots.
// The caller guarantees the discriminant is a square, so roots exist;
// neither root can be 0 or -a (substituting either into the quadratic
// leaves a*c != 0).
inline std::pair<Point, Point> reconstruct_pair(const HyperbolaInstance& inst,
                                                const OffsetWitness& w) {
    const Modulus m = inst.p();
    const u64 p = m.value();
    const u64 c = inst.c();
    const u64 beta = w.b_sign > 0 ? w.b_magnitude : p - w.b_magnitude;
    const u64 u = mul_mod_raw(w.a, beta, p);
    const u64 c4 = mul_mod_raw(4 % p, c, p);
    const u64 v = u >= c4 ? u - c4 : u + p - c4;
    const u64 disc = mul_mod_raw(u, v, p);

    u64 roots[2];
    int nroots;
    const u64 inv2beta = inv_mod(Residue{mul_mod_raw(2, beta, p), m}).value();
    if (disc == 0) {
        roots[0] = mul_mod_raw(p - u, inv2beta, p);
        nroots = 1;
    } else {
        const auto t = sqrt_mod(Residue{disc, m});
        const u64 tv = t->value();
        roots[0] = mul_mod_raw((tv + p - u) % p, inv2beta, p);
        roots[1] = mul_mod_raw((p - tv + p - u) % p, inv2beta, p);
        nroots = 2;
    }

    std::optional<std::pair<Point, Point>> bestPair;
    for (int i = 0; i < nroots; ++i) {
        const u64 x1 = roots[i];
        const u64 x2 = (x1 + w.a) % p;
        const u64 y1 = mul_mod_raw(c, inv_mod(Residue{x1, m}).value(), p);
        Point s{x1, y1};
        Point t2{x2, (y1 + beta) % p};
        if (t2 < s) std::swap(s, t2);
        if (!bestPair || std::make_pair(s, t2) < *bestPair)
            bestPair = {s, t2};
    }
    return *bestPair;
}

template <class Chi>
MinBoxResult min_box_fast_impl(const HyperbolaInstance& inst, const Chi& chi) {
    const u64 p = inst.p().value();
    if (p < 5)
        throw std::invalid_argument("min_box_fast: need p >= 5");
    // Any point pair fits in a box of side floor(p/2) + 1, so the search
    // over growing shells always terminates.
    const auto w = offset_search(1, p / 2, inst.c(), p, chi);
    return {w->b_magnitude > w->a ? w->b_magnitude + 1 : w->a + 1,
            reconstruct_pair(inst, *w), *w};
}

} // namespace detail

/// Minimal-box search through the character criterion: grows the offset
/// shell from 1 until the discriminant condition fires, then solves the
/// quadratic to recover an actual point pair. Never enumerates pairs;
/// cost is O(h_star^2) character evaluations plus one square root.
/// h_star always equals min_box_oracle's (the witness pair may differ
/// when several pairs realize the minimum).
inline MinBoxResult min_box_fast(const HyperbolaInstance& inst) {
    return detail::min_box_fast_impl(
        inst, [m = inst.p()](u64 r) { return detail::chi_descent(r, m); });
}

inline MinBoxResult min_box_fast(const HyperbolaInstance& inst, const LegendreTable& table) {
    return detail::min_box_fast_impl(inst, [&table](u64 r) { return table.at(r); });
}

/// Worst case of h_star over all residue classes c, with the smallest
/// attaining c. This is the quantity the box-size dichotomy surveys.
struct MaxMinBox {
    u64 h_star;
    u64 c;
};

inline MaxMinBox max_min_box(Modulus p) {
    if (p.value() < 5)
        throw std::invalid_argument("max_min_box: need p >= 5");
    // One shared chi table amortizes across the c sweep.
    const LegendreTable table(p);
    MaxMinBox best{0, 0};
    for (u64 c = 1; c < p.value(); ++c) {
        const u64 h = min_box_fast(HyperbolaInstance{p, c}, table).h_star;
        if (h > best.h_star) best = {h, c};
    }
    return best;
}

} // namespace hyperbox
