#pragma once

// Least quadratic nonresidue, smooth-number counts, the smooth-residue
// lower bound on character sums, and the two-branch threshold survey
// that ties n_p to the worst-case minimal box side.

#include <cmath>
#include <numbers>
#include <vector>

#include "hyperbola.hpp"
#include "modarith.hpp"

namespace hyperbox {

struct NqrResult {
    Modulus p;
    u64 n_p;
};

/// Smallest n >= 2 with chi(n) = -1, by linear scan. The scan is the
/// definition, so it doubles as its own oracle; n_p is tiny in practice
/// and is always prime (a composite nonresidue has a nonresidue factor).
inline NqrResult least_nonresidue(Modulus m) {
    for (u64 n = 2;; ++n)
        if (legendre(static_cast<i64>(n), m) == -1) return {m, n};
}

struct SmoothCount {
    u64 x;
    u64 y;
    u64 psi; // number of y-smooth integers in [1, x]; 1 counts as smooth
};

/// Psi(x, y) by sieve: mark every integer's largest prime factor, then
/// count entries at most y. Exact, O(x log log x).
inline SmoothCount smooth_count(u64 x, u64 y) {
    if (x < 1 || y < 1)
        throw std::invalid_argument("smooth_count: need x >= 1 and y >= 1");
    if (x > table_limit)
        throw std::invalid_argument("smooth_count: x too large to sieve");
    // lpf[n] ends as the largest prime factor of n because larger primes
    // overwrite smaller ones; lpf[1] stays 1, making 1 smooth for any y.
    std::vector<u64> lpf(static_cast<std::size_t>(x) + 1, 1);
    for (u64 q = 2; q <= x; ++q)
        if (lpf[static_cast<std::size_t>(q)] == 1)
            for (u64 j = q; j <= x; j += q) lpf[static_cast<std::size_t>(j)] = q;
    u64 psi = 0;
    for (u64 n = 1; n <= x; ++n)
        if (lpf[static_cast<std::size_t>(n)] <= y) ++psi;
    return {x, y, psi};
}

/// The quantity 2*Psi(x,y) - x. Whenever y < n_p every y-smooth integer
/// is a product of quadratic residues, so chi(n) = +1 on all Psi(x,y)
/// smooth n <= x and at worst -1 elsewhere, giving the exact inequality
/// S(0;x) >= 2*Psi(x,y) - x. Nothing here is asymptotic, so the test
/// suite asserts the inequality hard.
inline i64 vinogradov_lower_bound(Modulus m, u64 x, u64 y) {
    if (x < 1 || x > m.value() - 1)
        throw std::invalid_argument("vinogradov_lower_bound: need 1 <= x <= p-1");
    if (y < 1)
        throw std::invalid_argument("vinogradov_lower_bound: need y >= 1");
    const u64 psi = smooth_count(x, y).psi;
    return 2 * static_cast<i64>(psi) - static_cast<i64>(x);
}

/// Exponent in the n_p branch of the dichotomy: 1/(6*sqrt(e)), about
/// 0.101088. The smooth-number machinery shaves the plain 1/6 by the
/// Vinogradov factor 1/sqrt(e).
inline double nqr_branch_exponent() {
    return 1.0 / (6.0 * std::sqrt(std::numbers::e));
}

/// Exponent in the box branch: 1/6.
inline double box_branch_exponent() { return 1.0 / 6.0; }

/// One survey record: either n_p is small (branch A) or every residue
/// class admits a small two-point box (branch B). The dichotomy holds
/// only for some choice of ineffective constants, so epsilon and C are
/// caller-supplied and the record reports raw comparisons, not a verdict.
struct DichotomyRecord {
    u64 p;
    u64 n_p;
    double epsilon;
    double C;
    double threshold_A; // C * p^(1/(6*sqrt(e)) + epsilon)
    bool branch_A;      // n_p <= threshold_A
    u64 max_h_star;     // worst h_star over all c
    double threshold_B; // C * p^(1/6 + epsilon)
    bool branch_B;      // max_h_star <= threshold_B
};

inline DichotomyRecord dichotomy_check(Modulus m, double epsilon, double C) {
    if (m.value() < 5)
        throw std::invalid_argument("dichotomy_check: need p >= 5");
    if (!(epsilon > 0.0) || !(C > 0.0))
        throw std::invalid_argument("dichotomy_check: need epsilon > 0 and C > 0");
    const u64 p = m.value();
    const u64 n_p = least_nonresidue(m).n_p;
    const u64 max_h = max_min_box(m).h_star;
    const double pd = static_cast<double>(p);
    const double tA = C * std::pow(pd, nqr_branch_exponent() + epsilon);
    const double tB = C * std::pow(pd, box_branch_exponent() + epsilon);
    return {p,
            n_p,
            epsilon,
            C,
            tA,
            static_cast<double>(n_p) <= tA,
            max_h,
            tB,
            static_cast<double>(max_h) <= tB};
}

} // namespace hyperbox
