#pragma once

// Short sums of the quadratic character: an O(1)-query prefix table for
// S(N;h) = sum of chi(n) over N < n <= N+h, the mean-value statistic over
// well-spaced families, the complete-sum moment along the hyperbola, and
// the inverse-family spacing used by the linking argument.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "hyperbola.hpp"
#include "modarith.hpp"

namespace hyperbox {

/// Prefix sums of the Legendre symbol: prefix(k) = chi(1) + ... + chi(k),
/// prefix(0) = 0. Queries never wrap; the sums this library studies live
/// inside one period, so prefix length p suffices and prefix(p-1) = 0.
class CharSumTable {
public:
    explicit CharSumTable(Modulus m) : m_(m) {
        const u64 p = m.value();
        const LegendreTable chi(m); // throws above table_limit
        prefix_.resize(static_cast<std::size_t>(p));
        prefix_[0] = 0;
        for (u64 k = 1; k < p; ++k)
            prefix_[static_cast<std::size_t>(k)] =
                prefix_[static_cast<std::size_t>(k - 1)] + chi.at(k);
    }

    Modulus modulus() const noexcept { return m_; }

    i64 prefix(u64 k) const {
        if (k >= m_.value())
            throw std::invalid_argument("CharSumTable::prefix: index past p-1");
        return prefix_[static_cast<std::size_t>(k)];
    }

private:
    Modulus m_;
    std::vector<std::int32_t> prefix_;
};

inline CharSumTable build_table(Modulus m) { return CharSumTable(m); }

/// S(N;h), the character sum over the open-closed window (N, N+h].
/// Requires N + h <= p-1: windows stay inside one period by contract.
inline i64 char_sum(const CharSumTable& table, u64 N, u64 h) {
    const u64 p = table.modulus().value();
    if (h < 1 || N + h > p - 1)
        throw std::invalid_argument("char_sum: need 1 <= h and N + h <= p-1");
    return table.prefix(N + h) - table.prefix(N);
}

/// max over 1 <= h <= H of |S(N;h)|.
inline u64 max_partial(const CharSumTable& table, u64 N, u64 H) {
    const u64 p = table.modulus().value();
    if (H < 1 || N + H > p - 1)
        throw std::invalid_argument("max_partial: need 1 <= H and N + H <= p-1");
    const i64 base = table.prefix(N);
    i64 lo = base, hi = base;
    for (u64 h = 1; h <= H; ++h) {
        const i64 v = table.prefix(N + h);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return static_cast<u64>(std::max(hi - base, base - lo));
}

/// Starting points N_1 < ... < N_J in [0, p-1]. The type only promises
/// sortedness and distinctness; gap conditions are checked by the
/// statistics that need them.
class SpacedFamily {
public:
    SpacedFamily(Modulus m, std::vector<u64> points) : m_(m), points_(std::move(points)) {
        if (points_.empty())
            throw std::invalid_argument("SpacedFamily: need at least one point");
        for (std::size_t i = 0; i < points_.size(); ++i) {
            if (points_[i] >= m_.value())
                throw std::invalid_argument("SpacedFamily: point past p-1");
            if (i > 0 && points_[i] <= points_[i - 1])
                throw std::invalid_argument("SpacedFamily: points must strictly increase");
        }
    }

    Modulus modulus() const noexcept { return m_; }
    const std::vector<u64>& points() const noexcept { return points_; }
    u64 size() const noexcept { return points_.size(); }

private:
    Modulus m_;
    std::vector<u64> points_;
};

/// One moment computation: the exact integer statistic next to its
/// reference bound (epsilon set to 0, constant set to 1; the bounds'
/// true constants are ineffective, so ratio is a survey number, not a
/// pass/fail quantity). window is H for the spaced-family statistic and
/// U for the hyperbola moment.
struct MomentReport {
    u64 r;
    u64 window;
    u64 value;
    double bound;
    double ratio;
};

namespace detail {

// |s|^e with overflow detection; the statistics promise exact values, so
// a silent wrap would be worse than an exception.
inline u128 ipow_checked(u64 s, u64 e, const char* who) {
    u128 acc = 1;
    for (u64 i = 0; i < e; ++i) {
        if (s != 0 && acc > ~u128{0} / s)
            throw std::overflow_error(std::string(who) + ": statistic exceeds 128 bits");
        acc *= s;
    }
    return acc;
}

inline u64 narrow_value(u128 v, const char* who) {
    if (v > ~u64{0})
        throw std::overflow_error(std::string(who) + ": statistic exceeds 64 bits");
    return static_cast<u64>(v);
}

} // namespace detail

/// Sum over the family of max_partial(N_j, H)^(2r), against the
/// mean-value reference H^(2r-2) * p^(1/2 + 1/(2r)). The family must be
/// H-spaced linearly (N_{j+1} - N_j >= H): that is the hypothesis of the
/// mean-value bound, so violating it is a usage error, not a data point.
inline MomentReport shao_statistic(const CharSumTable& table, const SpacedFamily& family,
                                   u64 H, u64 r) {
    if (table.modulus() != family.modulus())
        throw std::invalid_argument("shao_statistic: table and family moduli differ");
    if (r < 1)
        throw std::invalid_argument("shao_statistic: need r >= 1");
    const u64 p = table.modulus().value();
    const auto& pts = family.points();
    for (std::size_t j = 0; j < pts.size(); ++j) {
        if (H < 1 || pts[j] + H > p - 1)
            throw std::invalid_argument("shao_statistic: window leaves the period");
        if (j > 0 && pts[j] - pts[j - 1] < H)
            throw std::invalid_argument("shao_statistic: family is not H-spaced");
    }
    u128 acc = 0;
    for (u64 N : pts) {
        const u128 term = detail::ipow_checked(max_partial(table, N, H), 2 * r, "shao_statistic");
        if (acc > ~u128{0} - term)
            throw std::overflow_error("shao_statistic: statistic exceeds 128 bits");
        acc += term;
    }
    const u64 value = detail::narrow_value(acc, "shao_statistic");
    const double pd = static_cast<double>(p);
    const double bound = std::pow(static_cast<double>(H), 2.0 * static_cast<double>(r) - 2.0) *
                         std::pow(pd, 0.5 + 1.0 / (2.0 * static_cast<double>(r)));
    return {r, H, value, bound, static_cast<double>(value) / bound};
}

/// Complete moment along the hyperbola: sum over n in [1, p-1] of
/// |sum_{u <= U} chi(u) chi(un - 4c)|^(2r), against the square-root
/// cancellation reference U^r * p + U^(2r) * sqrt(p). Computed twice, by
/// the direct double loop over Legendre evaluations and by a chi-table
/// walk over arithmetic progressions; the paths must agree exactly, and
/// a disagreement is an internal failure.
inline MomentReport weil_moment(Modulus m, u64 c, u64 U, u64 r) {
    const u64 p = m.value();
    c %= p;
    if (c == 0)
        throw std::invalid_argument("weil_moment: c must be nonzero mod p");
    if (U < 1 || U >= p)
        throw std::invalid_argument("weil_moment: need 1 <= U < p");
    if (r < 1)
        throw std::invalid_argument("weil_moment: need r >= 1");
    const u64 c4 = detail::mul_mod_raw(4 % p, c, p);

    // Direct path: per-term reciprocity descents, no tables.
    std::vector<int> chi_u(static_cast<std::size_t>(U) + 1);
    for (u64 u = 1; u <= U; ++u)
        chi_u[static_cast<std::size_t>(u)] = legendre(static_cast<i64>(u), m);
    u128 naive = 0;
    for (u64 n = 1; n < p; ++n) {
        i64 inner = 0;
        for (u64 u = 1; u <= U; ++u) {
            const u64 t = detail::mul_mod_raw(u, n, p);
            const u64 arg = t >= c4 ? t - c4 : t + p - c4;
            inner += chi_u[static_cast<std::size_t>(u)] * legendre(static_cast<i64>(arg), m);
        }
        const u64 mag = static_cast<u64>(inner < 0 ? -inner : inner);
        const u128 term = detail::ipow_checked(mag, 2 * r, "weil_moment");
        if (naive > ~u128{0} - term)
            throw std::overflow_error("weil_moment: statistic exceeds 128 bits");
        naive += term;
    }

    // Accelerated path: for fixed u the argument un - 4c walks an
    // arithmetic progression mod p, so the whole moment is U strided
    // passes over one chi table.
    const LegendreTable chi(m);
    std::vector<std::int32_t> inner(static_cast<std::size_t>(p), 0);
    for (u64 u = 1; u <= U; ++u) {
        const int s = chi.at(u);
        u64 t = (u + p - c4) % p; // argument at n = 1
        for (u64 n = 1; n < p; ++n) {
            inner[static_cast<std::size_t>(n)] += s * chi.at(t);
            t += u;
            if (t >= p) t -= p;
        }
    }
    u128 tabled = 0;
    for (u64 n = 1; n < p; ++n) {
        const std::int32_t s = inner[static_cast<std::size_t>(n)];
        const u64 mag = static_cast<u64>(s < 0 ? -s : s);
        const u128 term = detail::ipow_checked(mag, 2 * r, "weil_moment");
        if (tabled > ~u128{0} - term)
            throw std::overflow_error("weil_moment: statistic exceeds 128 bits");
        tabled += term;
    }

    if (naive != tabled)
        throw std::logic_error("weil_moment: table path disagrees with direct summation");

    const u64 value = detail::narrow_value(naive, "weil_moment");
    const double pd = static_cast<double>(p);
    const double Ud = static_cast<double>(U);
    const double rd = static_cast<double>(r);
    const double bound = std::pow(Ud, rd) * pd + std::pow(Ud, 2.0 * rd) * std::sqrt(pd);
    return {r, U, value, bound, static_cast<double>(value) / bound};
}

/// The family {-c * inv(b') mod p : 1 <= b' <= floor(H/2)}, sorted.
/// These are the left endpoints the linking argument feeds into the
/// mean-value machinery; inversion makes them pairwise distinct.
inline SpacedFamily inverse_family(const HyperbolaInstance& inst, u64 H) {
    const u64 p = inst.p().value();
    if (H < 2 || H > p)
        throw std::invalid_argument("inverse_family: H must be in [2, p]");
    std::vector<u64> pts;
    pts.reserve(static_cast<std::size_t>(H / 2));
    for (u64 b = 1; b <= H / 2; ++b) {
        const u64 cb = detail::mul_mod_raw(inst.c(), inv_mod(Residue{b, inst.p()}).value(), p);
        pts.push_back(p - cb); // cb != 0, so this is already reduced
    }
    std::sort(pts.begin(), pts.end());
    return {inst.p(), std::move(pts)};
}

/// Smallest circular distance between two family members. With the
/// points sorted, only consecutive gaps and the wrap gap can attain it.
inline u64 min_circular_gap(const SpacedFamily& family) {
    const auto& pts = family.points();
    if (pts.size() < 2)
        throw std::invalid_argument("min_circular_gap: need at least two points");
    const u64 p = family.modulus().value();
    u64 best = p - (pts.back() - pts.front());
    for (std::size_t i = 1; i < pts.size(); ++i)
        best = std::min(best, pts[i] - pts[i - 1]);
    return best;
}

} // namespace hyperbox
