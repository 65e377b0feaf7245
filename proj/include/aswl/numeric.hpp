#pragma once

// Exact integer / rational scalar types and small number-theoretic helpers
// shared by all modules. No floating point anywhere.

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <string>
#include <vector>

#include "aswl/errors.hpp"

namespace aswl {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Int rat_num(const Rat& r) { return boost::multiprecision::numerator(r); }
inline Int rat_den(const Rat& r) { return boost::multiprecision::denominator(r); }

inline Int int_pow(Int base, std::uint64_t e) {
    Int r = 1;
    while (e) {
        if (e & 1) r *= base;
        base *= base;
        e >>= 1;
    }
    return r;
}

inline std::int64_t ipow64(std::int64_t base, unsigned e) {
    std::int64_t r = 1;
    while (e--) r *= base;
    return r;
}

// p-adic valuation of a nonzero exact integer.
inline long vp_int(Int x, std::int64_t p) {
    if (x == 0) throw InternalError("vp_int: zero has infinite valuation");
    long v = 0;
    while (x % p == 0) {
        x /= p;
        ++v;
    }
    return v;
}

inline bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

// Prime factorization by trial division; fine for the word-sized inputs
// used by enumeration (q^d - 1) and invariants.
inline std::vector<std::uint64_t> prime_factors_u64(std::uint64_t n) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
            out.push_back(d);
            while (n % d == 0) n /= d;
        }
    }
    if (n > 1) out.push_back(n);
    return out;
}

inline int mobius(std::uint64_t n) {
    int mu = 1;
    for (std::uint64_t d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
            n /= d;
            if (n % d == 0) return 0;
            mu = -mu;
        }
    }
    if (n > 1) mu = -mu;
    return mu;
}

inline std::vector<std::uint64_t> divisors_u64(std::uint64_t n) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t d = 1; d * d <= n; ++d) {
        if (n % d == 0) {
            out.push_back(d);
            if (d != n / d) out.push_back(n / d);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Smallest e >= 0 with p^e >= x (exact rational comparison), i.e. ceil(log_p x)
// for x >= 1.
inline long ceil_log_p(const Rat& x, std::int64_t p) {
    if (x <= 1) return 0;
    long e = 0;
    Rat pe = 1;
    while (pe < x) {
        pe *= p;
        ++e;
    }
    return e;
}

// Inverse of a mod p^M for a coprime to p (Hensel lift of the mod-p inverse).
inline Int inv_mod_ppow(const Int& a, std::int64_t p, long M) {
    Int mod = int_pow(p, static_cast<std::uint64_t>(M));
    Int ar = ((a % mod) + mod) % mod;
    if (ar % p == 0) throw InternalError("inv_mod_ppow: argument divisible by p");
    // inverse mod p by Fermat
    Int inv = 1;
    {
        Int base = ar % p;
        std::uint64_t e = static_cast<std::uint64_t>(p - 2);
        Int acc = 1;
        while (e) {
            if (e & 1) acc = acc * base % p;
            base = base * base % p;
            e >>= 1;
        }
        inv = acc;
    }
    long prec = 1;
    while (prec < M) {
        inv = inv * (2 - ar * inv % mod + mod) % mod;
        prec *= 2;
    }
    inv = ((inv % mod) + mod) % mod;
    return inv;
}

inline std::string rat_to_string(const Rat& r) {
    std::string s = rat_num(r).str();
    if (rat_den(r) != 1) s += "/" + rat_den(r).str();
    return s;
}

}  // namespace aswl
