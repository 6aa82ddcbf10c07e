#pragma once

// Overflow-safe modular arithmetic over word-sized odd prime moduli:
// deterministic primality, residues, the Legendre symbol by
// quadratic-reciprocity descent, modular inverse and square root.
// Every other header in the library sits on top of this one.

#include <cassert>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hyperbox {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;

// Moduli are capped at one machine word minus headroom; 128-bit
// intermediates keep every product exact below this bound.
inline constexpr u64 modulus_limit = u64{1} << 62;

namespace detail {

inline u64 mul_mod_raw(u64 a, u64 b, u64 p) noexcept {
    return static_cast<u64>((static_cast<u128>(a) * b) % p);
}

inline u64 pow_mod_raw(u64 base, u64 exp, u64 p) noexcept {
    u64 acc = 1;
    base %= p;
    while (exp > 0) {
        if (exp & 1) acc = mul_mod_raw(acc, base, p);
        base = mul_mod_raw(base, base, p);
        exp >>= 1;
    }
    return acc;
}

// Miller-Rabin round; true means "composite for sure".
inline bool mr_composite(u64 n, u64 d, int s, u64 witness) noexcept {
    u64 x = pow_mod_raw(witness % n, d, n);
    if (x == 1 || x == n - 1) return false;
    for (int i = 1; i < s; ++i) {
        x = mul_mod_raw(x, x, n);
        if (x == n - 1) return false;
    }
    return true;
}

} // namespace detail

/// Deterministic primality for the word range. The fixed witness set is
/// exact for all n < 3.3e24, far beyond the 2^62 modulus cap.
inline bool is_prime(u64 n) {
    if (n >= modulus_limit)
        throw std::invalid_argument("is_prime: n must be below 2^62");
    if (n < 2) return false;
    for (u64 q : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (n == q) return true;
        if (n % q == 0) return false;
    }
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (u64 w : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL})
        if (detail::mr_composite(n, d, s, w)) return false;
    return true;
}

/// An odd prime p with 3 <= p < 2^62, verified at construction.
class Modulus {
public:
    explicit Modulus(u64 p) : p_(p) {
        if (p < 3 || p % 2 == 0 || !is_prime(p))
            throw std::invalid_argument("Modulus: need an odd prime in [3, 2^62)");
    }

    u64 value() const noexcept { return p_; }

    friend bool operator==(Modulus a, Modulus b) noexcept { return a.p_ == b.p_; }
    friend bool operator!=(Modulus a, Modulus b) noexcept { return a.p_ != b.p_; }

private:
    u64 p_;
};

/// A canonical representative in [0, p-1], tied to its modulus.
class Residue {
public:
    Residue(u64 value, Modulus m) : v_(value % m.value()), m_(m) {}

    u64 value() const noexcept { return v_; }
    Modulus modulus() const noexcept { return m_; }

    friend bool operator==(const Residue& a, const Residue& b) noexcept {
        return a.v_ == b.v_ && a.m_ == b.m_;
    }

private:
    u64 v_;
    Modulus m_;
};

namespace detail {

inline void require_same_modulus(const Residue& a, const Residue& b, const char* who) {
    if (a.modulus() != b.modulus())
        throw std::invalid_argument(std::string(who) + ": operands carry different moduli");
}

} // namespace detail

inline Residue mul_mod(const Residue& a, const Residue& b) {
    detail::require_same_modulus(a, b, "mul_mod");
    return {detail::mul_mod_raw(a.value(), b.value(), a.modulus().value()), a.modulus()};
}

// pow_mod(a, 0) == 1 for every a, including 0.
inline Residue pow_mod(const Residue& a, u64 exponent) {
    return {detail::pow_mod_raw(a.value(), exponent, a.modulus().value()), a.modulus()};
}

/// Multiplicative inverse by extended Euclid. Rejects 0.
inline Residue inv_mod(const Residue& a) {
    if (a.value() == 0)
        throw std::domain_error("inv_mod: 0 has no inverse");
    const i64 p = static_cast<i64>(a.modulus().value());
    i64 r0 = p, r1 = static_cast<i64>(a.value());
    i64 t0 = 0, t1 = 1;
    while (r1 != 0) {
        const i64 q = r0 / r1;
        i64 tmp = r0 - q * r1;
        r0 = r1;
        r1 = tmp;
        tmp = t0 - q * t1;
        t0 = t1;
        t1 = tmp;
    }
    assert(r0 == 1); // a and p coprime since p prime, a != 0
    if (t0 < 0) t0 += p;
    return {static_cast<u64>(t0), a.modulus()};
}

/// Legendre symbol (a/p) in {-1, 0, +1}. Accepts any integer; a is
/// reduced mod p first, so negative inputs such as ab - 4c are fine.
/// Quadratic-reciprocity descent (the Jacobi recurrence, which agrees
/// with Legendre for prime modulus); no exponentiation involved.
inline int legendre(i64 a, Modulus m) {
    const i64 p = static_cast<i64>(m.value());
    i64 r = a % p;
    if (r < 0) r += p;
    u64 x = static_cast<u64>(r);
    u64 n = m.value();
    int sign = 1;
    while (x != 0) {
        while ((x & 1) == 0) {
            x >>= 1;
            const u64 n8 = n & 7;
            if (n8 == 3 || n8 == 5) sign = -sign;
        }
        std::swap(x, n);
        if ((x & 3) == 3 && (n & 3) == 3) sign = -sign;
        x %= n;
    }
    return n == 1 ? sign : 0;
}

inline int legendre(const Residue& a) {
    return legendre(static_cast<i64>(a.value()), a.modulus());
}

/// Square root mod p by Tonelli-Shanks (shortcut for p = 3 mod 4).
/// Returns nullopt when a is a nonresidue; sqrt_mod(0) = 0.
inline std::optional<Residue> sqrt_mod(const Residue& a) {
    const u64 p = a.modulus().value();
    const u64 v = a.value();
    if (v == 0) return Residue{0, a.modulus()};
    const int chi = legendre(a);
    if (chi != 1) return std::nullopt;
    if (p % 4 == 3)
        return pow_mod(a, (p + 1) / 4);

    u64 q = p - 1;
    int s = 0;
    while ((q & 1) == 0) {
        q >>= 1;
        ++s;
    }
    u64 z = 2;
    while (legendre(static_cast<i64>(z), a.modulus()) != -1) ++z;

    u64 m = static_cast<u64>(s);
    u64 cc = detail::pow_mod_raw(z, q, p);
    u64 t = detail::pow_mod_raw(v, q, p);
    u64 r = detail::pow_mod_raw(v, (q + 1) / 2, p);
    while (t != 1) {
        u64 t2 = t;
        u64 i = 0;
        while (t2 != 1) {
            t2 = detail::mul_mod_raw(t2, t2, p);
            ++i;
        }
        u64 b = cc;
        for (u64 j = 0; j + i + 1 < m; ++j)
            b = detail::mul_mod_raw(b, b, p);
        m = i;
        cc = detail::mul_mod_raw(b, b, p);
        t = detail::mul_mod_raw(t, cc, p);
        r = detail::mul_mod_raw(r, b, p);
    }
    return Residue{r, a.modulus()};
}

// Tables above this size would be multi-GB; the library targets desk
// scale, so refuse instead of thrashing.
inline constexpr u64 table_limit = u64{1} << 28;

namespace detail {

// All inverses 1..p-1 in O(p) via the classic recurrence
// inv[i] = -(p/i) * inv[p mod i]. Entry 0 is unused.
inline std::vector<u64> inverse_table(Modulus m) {
    const u64 p = m.value();
    if (p > table_limit)
        throw std::invalid_argument("inverse_table: modulus too large to tabulate");
    std::vector<u64> inv(static_cast<std::size_t>(p));
    inv[0] = 0;
    if (p > 1) inv[1] = 1;
    for (u64 i = 2; i < p; ++i)
        inv[static_cast<std::size_t>(i)] =
            mul_mod_raw(p - p / i, inv[static_cast<std::size_t>(p % i)], p);
    return inv;
}

} // namespace detail

/// Precomputed chi(n) for all n in [0, p-1]; one byte per residue.
/// Built by sieving squares: exactly the (p-1)/2 values k^2 mod p are +1.
class LegendreTable {
public:
    explicit LegendreTable(Modulus m) : m_(m) {
        const u64 p = m.value();
        if (p > table_limit)
            throw std::invalid_argument("LegendreTable: modulus too large to tabulate");
        chi_.assign(static_cast<std::size_t>(p), -1);
        chi_[0] = 0;
        for (u64 k = 1; k <= (p - 1) / 2; ++k)
            chi_[static_cast<std::size_t>(detail::mul_mod_raw(k, k, p))] = 1;
    }

    Modulus modulus() const noexcept { return m_; }

    int operator()(i64 a) const noexcept {
        const i64 p = static_cast<i64>(m_.value());
        i64 r = a % p;
        if (r < 0) r += p;
        return chi_[static_cast<std::size_t>(r)];
    }

    // Unchecked lookup: r must already be reduced.
    int at(u64 r) const noexcept {
        assert(r < m_.value());
        return chi_[static_cast<std::size_t>(r)];
    }

private:
    Modulus m_;
    std::vector<std::int8_t> chi_;
};

} // namespace hyperbox
