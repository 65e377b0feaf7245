#pragma once

// F_q and its extensions F_{q^k}, closed-point enumeration of the affine
// line, and truncated unramified lifts Z_{q^k}/p^M with Teichmuller map,
// Frobenius and trace.
//
// Elements of F_{p^n} are coefficient vectors over F_p relative to a monic
// modulus of degree n. Extension moduli are found deterministically by
// scanning monic polynomials in lexicographic coordinate order for the first
// irreducible, unless the tower spec overrides them. For p = 2 and n <= 63
// the enumeration kernels run on bit-packed operands.

#include <algorithm>
#include <cstdint>
#include <map>
#include <vector>

#include "aswl/errors.hpp"
#include "aswl/numeric.hpp"

namespace aswl {

struct FieldCtx {
    std::int64_t p = 0;
    long a = 0;                   // q = p^a
    std::vector<std::uint8_t> modulus;  // monic, degree a, coefficients in [0,p)
    std::map<long, std::vector<std::uint8_t>> ext_overrides;  // per-k modulus of degree a*k

    Int q() const { return int_pow(p, static_cast<std::uint64_t>(a)); }
};

struct FqkElem {
    long k = 1;                   // extension degree over F_q
    std::vector<std::uint8_t> c;  // length a*k over F_p

    bool is_zero() const {
        for (auto x : c)
            if (x) return false;
        return true;
    }
    bool operator==(const FqkElem& o) const { return k == o.k && c == o.c; }
    bool operator<(const FqkElem& o) const { return c < o.c; }  // lexicographic on (c_0, c_1, ...)
};

namespace gfp {

// ---- dense polynomial arithmetic over F_p (small p), coefficient vectors ----

using Poly = std::vector<std::uint8_t>;

inline long degree(const Poly& f) {
    for (std::size_t i = f.size(); i-- > 0;)
        if (f[i]) return static_cast<long>(i);
    return -1;
}

inline std::uint8_t inv_mod_p(std::uint8_t x, std::int64_t p) {
    std::int64_t r = 1, b = x, e = p - 2;
    while (e) {
        if (e & 1) r = r * b % p;
        b = b * b % p;
        e >>= 1;
    }
    return static_cast<std::uint8_t>(r);
}

// a*b mod (f, p) for monic f of degree n; operands have length n.
inline Poly mulmod(const Poly& a, const Poly& b, const Poly& f, std::int64_t p) {
    const long n = static_cast<long>(f.size()) - 1;
    std::vector<std::uint32_t> conv(static_cast<std::size_t>(2 * n - 1), 0);
    for (long i = 0; i < n; ++i) {
        if (!a[static_cast<std::size_t>(i)]) continue;
        for (long j = 0; j < n; ++j)
            conv[static_cast<std::size_t>(i + j)] += static_cast<std::uint32_t>(a[static_cast<std::size_t>(i)]) * b[static_cast<std::size_t>(j)];
    }
    for (long e = 2 * n - 2; e >= n; --e) {
        std::uint32_t lead = conv[static_cast<std::size_t>(e)] % static_cast<std::uint32_t>(p);
        conv[static_cast<std::size_t>(e)] = 0;
        if (!lead) continue;
        std::uint32_t neg = static_cast<std::uint32_t>(p) - lead;
        for (long j = 0; j < n; ++j)
            conv[static_cast<std::size_t>(e - n + j)] += neg * f[static_cast<std::size_t>(j)];
    }
    Poly r(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) r[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(conv[static_cast<std::size_t>(i)] % p);
    return r;
}

inline Poly powmod(Poly base, Int e, const Poly& f, std::int64_t p) {
    const long n = static_cast<long>(f.size()) - 1;
    Poly r(static_cast<std::size_t>(n), 0);
    r[0] = 1;
    while (e > 0) {
        if ((e & 1) != 0) r = mulmod(r, base, f, p);
        base = mulmod(base, base, f, p);
        e >>= 1;
    }
    return r;
}

inline Poly trim(Poly f) {
    while (!f.empty() && f.back() == 0) f.pop_back();
    return f;
}

inline Poly gcd(Poly a, Poly b, std::int64_t p) {
    a = trim(std::move(a));
    b = trim(std::move(b));
    while (!b.empty()) {
        // a mod b
        std::uint8_t binv = inv_mod_p(b.back(), p);
        while (a.size() >= b.size() && !a.empty()) {
            std::int64_t qc = static_cast<std::int64_t>(a.back()) * binv % p;
            std::size_t shift = a.size() - b.size();
            for (std::size_t j = 0; j < b.size(); ++j) {
                std::int64_t v = (a[shift + j] - qc * b[j]) % p;
                a[shift + j] = static_cast<std::uint8_t>((v + p) % p);
            }
            a = trim(std::move(a));
        }
        std::swap(a, b);
    }
    return a;
}

// Irreducibility over F_p: t^{p^n} = t mod f and gcd(t^{p^{n/l}} - t, f) = 1
// for every prime l | n.
inline bool irreducible(const Poly& f, std::int64_t p) {
    const long n = degree(f);
    if (n < 1 || f.back() != 1) return false;
    Poly t(static_cast<std::size_t>(n), 0);
    if (n == 1) return true;
    t[1] = 1;
    auto primes = prime_factors_u64(static_cast<std::uint64_t>(n));
    Poly z = t;
    for (long e = 1; e <= n; ++e) {
        z = powmod(z, p, f, p);
        bool milestone = (e == n);
        for (auto l : primes) milestone = milestone || (e == n / static_cast<long>(l));
        if (!milestone) continue;
        Poly diff = z;
        diff[1] = static_cast<std::uint8_t>((diff[1] + p - 1) % p);
        if (e == n) {
            if (degree(diff) >= 0) return false;
        } else {
            Poly g = gcd(diff, f, p);
            if (degree(g) != 0) return false;
        }
    }
    return true;
}

}  // namespace gfp

inline FieldCtx make_field(std::int64_t p, long a, const std::vector<std::int64_t>& modulus) {
    if (!is_prime_u64(static_cast<std::uint64_t>(p))) throw NotPrimeError("make_field: p is not prime");
    if (a < 1) throw InputError("make_field: a must be >= 1");
    if (static_cast<long>(modulus.size()) != a + 1)
        throw InputError("make_field: modulus must have degree a");
    FieldCtx ctx;
    ctx.p = p;
    ctx.a = a;
    ctx.modulus.resize(modulus.size());
    for (std::size_t i = 0; i < modulus.size(); ++i)
        ctx.modulus[i] = static_cast<std::uint8_t>(((modulus[i] % p) + p) % p);
    if (ctx.modulus.back() != 1) throw InputError("make_field: modulus must be monic");
    if (!gfp::irreducible(ctx.modulus, p))
        throw ReducibleModulusError("make_field: modulus is reducible over F_p");
    return ctx;
}

// ---- extension contexts ----

struct ExtCtx {
    const FieldCtx* field = nullptr;
    long k = 1;
    long n = 1;  // a*k, degree over F_p
    std::vector<std::uint8_t> modulus;  // monic of degree n over F_p

    bool packed = false;      // p == 2 and n <= 63: elements as bit masks
    std::uint64_t mod_mask = 0;  // packed modulus (bit n set)

    bool has_group = false;   // q^k - 1 fits in 62 bits
    std::uint64_t group_order = 0;  // p^n - 1
    std::vector<std::uint64_t> group_primes;
    std::vector<std::uint8_t> generator;  // first generator in lex order

    // Embedding F_q -> F_{p^n}: powers r^e, e < a, of the lex-least root of
    // the base modulus.
    std::vector<std::vector<std::uint8_t>> embed_pow;
};

namespace detail {

inline std::uint64_t pack_bits(const std::vector<std::uint8_t>& c) {
    std::uint64_t x = 0;
    for (std::size_t i = 0; i < c.size(); ++i)
        if (c[i]) x |= 1ULL << i;
    return x;
}

inline std::vector<std::uint8_t> unpack_bits(std::uint64_t x, long n) {
    std::vector<std::uint8_t> c(static_cast<std::size_t>(n), 0);
    for (long i = 0; i < n; ++i) c[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>((x >> i) & 1);
    return c;
}

inline std::uint64_t gf2_mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t mod, long n) {
    std::uint64_t acc = 0;
    while (b) {
        if (b & 1) acc ^= a;
        b >>= 1;
        a <<= 1;
        if ((a >> n) & 1) a ^= mod;
    }
    return acc;
}

inline std::uint64_t mulmod_u64(std::uint64_t x, std::uint64_t y, std::uint64_t m) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(x) * y) % m);
}

// Reversed-bit key: integer comparison of keys = lexicographic comparison of
// coordinate sequences (c_0 first).
inline std::uint64_t revkey(std::uint64_t x, long n) {
    std::uint64_t r = 0;
    for (long i = 0; i < n; ++i)
        if ((x >> i) & 1) r |= 1ULL << (n - 1 - i);
    return r;
}

}  // namespace detail

inline std::vector<std::uint8_t> fq_mul(const ExtCtx& e, const std::vector<std::uint8_t>& x,
                                        const std::vector<std::uint8_t>& y) {
    return gfp::mulmod(x, y, e.modulus, e.field->p);
}

inline std::vector<std::uint8_t> fq_pow(const ExtCtx& e, const std::vector<std::uint8_t>& x, Int ex) {
    return gfp::powmod(x, std::move(ex), e.modulus, e.field->p);
}

// x -> x^q, the Frobenius over F_q (a successive p-th powers).
inline std::vector<std::uint8_t> fq_frob_q(const ExtCtx& e, std::vector<std::uint8_t> x) {
    for (long i = 0; i < e.field->a; ++i) x = gfp::powmod(std::move(x), e.field->p, e.modulus, e.field->p);
    return x;
}

namespace detail {

// Kernel basis of the F_p-linear map x -> x^q - x on F_{p^n}; its span is the
// copy of F_q inside the extension.
inline std::vector<std::vector<std::uint8_t>> subfield_basis(const ExtCtx& e) {
    const long n = e.n;
    const std::int64_t p = e.field->p;
    // columns: image of basis vector t^j
    std::vector<std::vector<std::int64_t>> mat(static_cast<std::size_t>(n),
                                               std::vector<std::int64_t>(static_cast<std::size_t>(n), 0));
    for (long j = 0; j < n; ++j) {
        std::vector<std::uint8_t> bas(static_cast<std::size_t>(n), 0);
        bas[static_cast<std::size_t>(j)] = 1;
        auto img = fq_frob_q(e, bas);
        for (long i = 0; i < n; ++i) {
            std::int64_t v = img[static_cast<std::size_t>(i)] - (i == j ? 1 : 0);
            mat[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = ((v % p) + p) % p;
        }
    }
    // Gaussian elimination to kernel basis.
    std::vector<long> pivot_col(static_cast<std::size_t>(n), -1);
    long rank = 0;
    for (long col = 0; col < n && rank < n; ++col) {
        long piv = -1;
        for (long r = rank; r < n; ++r)
            if (mat[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)]) {
                piv = r;
                break;
            }
        if (piv < 0) continue;
        std::swap(mat[static_cast<std::size_t>(piv)], mat[static_cast<std::size_t>(rank)]);
        std::int64_t inv = gfp::inv_mod_p(static_cast<std::uint8_t>(mat[static_cast<std::size_t>(rank)][static_cast<std::size_t>(col)]), p);
        for (long c2 = 0; c2 < n; ++c2)
            mat[static_cast<std::size_t>(rank)][static_cast<std::size_t>(c2)] = mat[static_cast<std::size_t>(rank)][static_cast<std::size_t>(c2)] * inv % p;
        for (long r = 0; r < n; ++r) {
            if (r == rank) continue;
            std::int64_t f = mat[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)];
            if (!f) continue;
            for (long c2 = 0; c2 < n; ++c2) {
                std::int64_t v = (mat[static_cast<std::size_t>(r)][static_cast<std::size_t>(c2)] -
                                  f * mat[static_cast<std::size_t>(rank)][static_cast<std::size_t>(c2)]) % p;
                mat[static_cast<std::size_t>(r)][static_cast<std::size_t>(c2)] = (v + p) % p;
            }
        }
        pivot_col[static_cast<std::size_t>(rank)] = col;
        ++rank;
    }
    std::vector<bool> is_pivot(static_cast<std::size_t>(n), false);
    for (long r = 0; r < rank; ++r) is_pivot[static_cast<std::size_t>(pivot_col[static_cast<std::size_t>(r)])] = true;
    std::vector<std::vector<std::uint8_t>> basis;
    for (long freec = 0; freec < n; ++freec) {
        if (is_pivot[static_cast<std::size_t>(freec)]) continue;
        std::vector<std::uint8_t> v(static_cast<std::size_t>(n), 0);
        v[static_cast<std::size_t>(freec)] = 1;
        for (long r = 0; r < rank; ++r) {
            std::int64_t val = mat[static_cast<std::size_t>(r)][static_cast<std::size_t>(freec)];
            if (val)
                v[static_cast<std::size_t>(pivot_col[static_cast<std::size_t>(r)])] =
                    static_cast<std::uint8_t>((p - val) % p);
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

}  // namespace detail

inline ExtCtx make_ext(const FieldCtx& field, long k) {
    if (k < 1) throw InputError("make_ext: k must be >= 1");
    ExtCtx e;
    e.field = &field;
    e.k = k;
    e.n = field.a * k;
    if (e.n > 63 && field.p == 2) throw ResourceLimitError("make_ext: extension degree too large");

    if (k == 1) {
        e.modulus = field.modulus;
    } else if (auto it = field.ext_overrides.find(k); it != field.ext_overrides.end()) {
        if (static_cast<long>(it->second.size()) != e.n + 1 || it->second.back() != 1)
            throw InputError("make_ext: override modulus has wrong degree or is not monic");
        if (!gfp::irreducible(it->second, field.p))
            throw ReducibleModulusError("make_ext: override modulus is reducible");
        e.modulus = it->second;
    } else {
        // Lexicographic scan over (c_0, ..., c_{n-1}) for the first monic
        // irreducible of degree n. Candidates with c_0 = 0 are divisible by t,
        // so the scan starts at the c_0 = 1 block.
        const std::int64_t p = field.p;
        Int total = int_pow(p, static_cast<std::uint64_t>(e.n));
        if (total > Int(1) << 40) throw ResourceLimitError("make_ext: modulus scan space too large");
        const std::uint64_t tot = static_cast<std::uint64_t>(total);
        std::uint64_t start = tot / static_cast<std::uint64_t>(p);  // p^{n-1}: first counter with c_0 = 1
        bool found = false;
        for (std::uint64_t ctr = start; ctr < tot && !found; ++ctr) {
            std::vector<std::uint8_t> cand(static_cast<std::size_t>(e.n) + 1, 0);
            cand.back() = 1;
            std::uint64_t rest = ctr;
            for (long pos = e.n - 1; pos >= 0; --pos) {  // c_0 ends up as the most significant digit
                cand[static_cast<std::size_t>(pos)] = static_cast<std::uint8_t>(rest % static_cast<std::uint64_t>(p));
                rest /= static_cast<std::uint64_t>(p);
            }
            if (gfp::irreducible(cand, p)) {
                e.modulus = cand;
                found = true;
            }
        }
        if (!found) throw InternalError("make_ext: no irreducible polynomial found");
    }

    e.packed = (field.p == 2 && e.n <= 63);
    if (e.packed) e.mod_mask = detail::pack_bits(e.modulus) | (1ULL << e.n);

    // Multiplicative group data and lex-least generator.
    Int Q = int_pow(field.p, static_cast<std::uint64_t>(e.n)) - 1;
    if (Q < (Int(1) << 62)) {
        e.has_group = true;
        e.group_order = static_cast<std::uint64_t>(Q);
        e.group_primes = prime_factors_u64(e.group_order);
        for (std::uint64_t ctr = 1;; ++ctr) {
            std::vector<std::uint8_t> cand(static_cast<std::size_t>(e.n), 0);
            std::uint64_t rest = ctr;
            for (long pos = e.n - 1; pos >= 0; --pos) {
                cand[static_cast<std::size_t>(pos)] = static_cast<std::uint8_t>(rest % static_cast<std::uint64_t>(field.p));
                rest /= static_cast<std::uint64_t>(field.p);
            }
            bool ok = !std::all_of(cand.begin(), cand.end(), [](std::uint8_t x) { return x == 0; });
            for (auto l : e.group_primes)
                if (ok) {
                    auto w = fq_pow(e, cand, Int(e.group_order / l));
                    ok = !(gfp::degree(w) == 0 && w[0] == 1);
                }
            if (ok) {
                e.generator = cand;
                break;
            }
        }
    }

    // Embedding of F_q.
    if (k == 1) {
        std::vector<std::uint8_t> r(static_cast<std::size_t>(e.n), 0);
        if (e.n >= 2)
            r[1] = 1;
        else
            r[0] = static_cast<std::uint8_t>((field.p - field.modulus[0]) % field.p);  // root of the linear modulus
        e.embed_pow.resize(static_cast<std::size_t>(field.a));
        std::vector<std::uint8_t> acc(static_cast<std::size_t>(e.n), 0);
        acc[0] = 1;
        for (long ee = 0; ee < field.a; ++ee) {
            e.embed_pow[static_cast<std::size_t>(ee)] = acc;
            acc = fq_mul(e, acc, r);
        }
    } else {
        auto basis = detail::subfield_basis(e);
        if (static_cast<long>(basis.size()) != field.a)
            throw InternalError("make_ext: subfield has wrong dimension");
        Int combos = int_pow(field.p, static_cast<std::uint64_t>(field.a));
        if (combos > (1 << 20)) throw ResourceLimitError("make_ext: base field too large to embed");
        std::vector<std::uint8_t> best;
        for (Int ctr = 0; ctr < combos; ++ctr) {
            std::vector<std::uint8_t> z(static_cast<std::size_t>(e.n), 0);
            Int rest = ctr;
            for (std::size_t b = 0; b < basis.size(); ++b) {
                std::int64_t coef = static_cast<std::int64_t>(rest % field.p);
                rest /= field.p;
                if (!coef) continue;
                for (long i = 0; i < e.n; ++i)
                    z[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(
                        (z[static_cast<std::size_t>(i)] + coef * basis[b][static_cast<std::size_t>(i)]) % field.p);
            }
            // Horner evaluation of the base modulus (coefficients in F_p).
            std::vector<std::uint8_t> accv(static_cast<std::size_t>(e.n), 0);
            for (std::size_t j = field.modulus.size(); j-- > 0;) {
                accv = fq_mul(e, accv, z);
                accv[0] = static_cast<std::uint8_t>((accv[0] + field.modulus[j]) % field.p);
            }
            if (std::all_of(accv.begin(), accv.end(), [](std::uint8_t x) { return x == 0; })) {
                if (best.empty() || z < best) best = z;
            }
        }
        if (best.empty()) throw InternalError("make_ext: base modulus has no root in the extension");
        e.embed_pow.resize(static_cast<std::size_t>(field.a));
        std::vector<std::uint8_t> acc(static_cast<std::size_t>(e.n), 0);
        acc[0] = 1;
        for (long ee = 0; ee < field.a; ++ee) {
            e.embed_pow[static_cast<std::size_t>(ee)] = acc;
            acc = fq_mul(e, acc, best);
        }
    }
    return e;
}

// Image of an element of F_q (coords over F_p, length a) inside F_{p^{ak}}.
inline std::vector<std::uint8_t> fq_embed(const ExtCtx& e, const std::vector<std::uint8_t>& x) {
    const std::int64_t p = e.field->p;
    std::vector<std::uint8_t> r(static_cast<std::size_t>(e.n), 0);
    for (long ee = 0; ee < e.field->a; ++ee) {
        std::int64_t coef = x[static_cast<std::size_t>(ee)];
        if (!coef) continue;
        const auto& pw = e.embed_pow[static_cast<std::size_t>(ee)];
        for (long i = 0; i < e.n; ++i)
            r[static_cast<std::size_t>(i)] =
                static_cast<std::uint8_t>((r[static_cast<std::size_t>(i)] + coef * pw[static_cast<std::size_t>(i)]) % p);
    }
    return r;
}

// ---- closed points ----

inline std::uint64_t closed_point_count(const FieldCtx& field, long d) {
    // (1/d) sum_{e|d} mu(d/e) q^e
    Int total = 0;
    for (auto e : divisors_u64(static_cast<std::uint64_t>(d)))
        total += Int(mobius(static_cast<std::uint64_t>(d) / e)) * int_pow(field.q(), e);
    total /= d;
    return static_cast<std::uint64_t>(total);
}

// Visit one representative per Frobenius orbit of exact degree d, in no
// particular order. The representative is the lexicographically smallest
// orbit member.
template <typename Fn>
void for_each_closed_point(const ExtCtx& ext, long d, Fn&& fn) {
    const FieldCtx& field = *ext.field;
    if (ext.k != d) throw InternalError("for_each_closed_point: context degree mismatch");
    if (!ext.has_group) throw ResourceLimitError("for_each_closed_point: field too large to enumerate");
    if (d == 1) {
        // All of F_q, zero included, in lex order.
        Int total = field.q();
        for (Int ctr = 0; ctr < total; ++ctr) {
            FqkElem x;
            x.k = 1;
            x.c.assign(static_cast<std::size_t>(ext.n), 0);
            Int rest = ctr;
            for (long pos = ext.n - 1; pos >= 0; --pos) {
                x.c[static_cast<std::size_t>(pos)] = static_cast<std::uint8_t>(rest % field.p);
                rest /= field.p;
            }
            fn(x);
        }
        return;
    }
    const std::uint64_t Q = ext.group_order;
    const std::uint64_t q = static_cast<std::uint64_t>(field.q());
    if (ext.packed) {
        const std::uint64_t g = detail::pack_bits(ext.generator);
        std::uint64_t x = 1;
        for (std::uint64_t nexp = 0; nexp < Q; ++nexp) {
            // exponent-orbit filter: orbit size d and nexp minimal
            bool rep = true;
            long size = 0;
            std::uint64_t m = nexp;
            for (long l = 1; l <= d; ++l) {
                m = detail::mulmod_u64(m, q, Q);
                if (m == nexp) {
                    size = l;
                    break;
                }
                if (m < nexp) {
                    rep = false;
                    break;
                }
            }
            if (rep && size == d) {
                // lex-min conjugate
                std::uint64_t best = x, y = x;
                std::uint64_t bestkey = detail::revkey(x, ext.n);
                for (long l = 1; l < d; ++l) {
                    for (long s = 0; s < field.a; ++s) y = detail::gf2_mulmod(y, y, ext.mod_mask, ext.n);
                    std::uint64_t key = detail::revkey(y, ext.n);
                    if (key < bestkey) {
                        bestkey = key;
                        best = y;
                    }
                }
                FqkElem out;
                out.k = d;
                out.c = detail::unpack_bits(best, ext.n);
                fn(out);
            }
            x = detail::gf2_mulmod(x, g, ext.mod_mask, ext.n);
        }
    } else {
        std::vector<std::uint8_t> x(static_cast<std::size_t>(ext.n), 0);
        x[0] = 1;
        for (std::uint64_t nexp = 0; nexp < Q; ++nexp) {
            bool rep = true;
            long size = 0;
            std::uint64_t m = nexp;
            for (long l = 1; l <= d; ++l) {
                m = detail::mulmod_u64(m, q, Q);
                if (m == nexp) {
                    size = l;
                    break;
                }
                if (m < nexp) {
                    rep = false;
                    break;
                }
            }
            if (rep && size == d) {
                auto best = x, y = x;
                for (long l = 1; l < d; ++l) {
                    y = fq_frob_q(ext, y);
                    if (y < best) best = y;
                }
                FqkElem out;
                out.k = d;
                out.c = std::move(best);
                fn(out);
            }
            x = fq_mul(ext, x, ext.generator);
        }
    }
}

// Canonical representatives of all closed points of exact degree d, sorted
// lexicographically.
inline std::vector<FqkElem> closed_points(const FieldCtx& field, long d) {
    if (d < 1) throw InputError("closed_points: d must be >= 1");
    ExtCtx ext = make_ext(field, d);
    std::vector<FqkElem> out;
    for_each_closed_point(ext, d, [&](const FqkElem& x) { out.push_back(x); });
    std::sort(out.begin(), out.end());
    return out;
}

// ---- truncated unramified lifts Z_{q^k}/p^M ----

struct UnramElem {
    long k = 1;
    long M = 1;
    std::vector<std::uint64_t> c;  // length a*k, entries in [0, p^M)

    bool is_zero() const {
        for (auto x : c)
            if (x) return false;
        return true;
    }
    bool operator==(const UnramElem& o) const { return k == o.k && M == o.M && c == o.c; }
};

struct UnramCtx {
    ExtCtx ext;  // owns the extension data
    long M = 1;
    std::uint64_t pM = 0;
    std::vector<std::uint64_t> lift;  // monic lift of the modulus, length n+1
    std::vector<std::uint64_t> trace_basis;  // Tr(t^e) mod p^M

    bool has_sigma = false;
    std::vector<UnramElem> sigma_pow;  // sigma(t)^e for e < n

    std::int64_t p() const { return ext.field->p; }
    long n() const { return ext.n; }
};

inline UnramElem unram_zero(const UnramCtx& u) {
    return UnramElem{u.ext.k, u.M, std::vector<std::uint64_t>(static_cast<std::size_t>(u.n()), 0)};
}

inline UnramElem unram_from_int(const UnramCtx& u, Int v) {
    UnramElem r = unram_zero(u);
    v %= Int(u.pM);
    if (v < 0) v += Int(u.pM);
    r.c[0] = static_cast<std::uint64_t>(v);
    return r;
}

inline UnramElem unram_lift(const UnramCtx& u, const FqkElem& x) {
    if (static_cast<long>(x.c.size()) != u.n()) throw InternalError("unram_lift: coordinate length mismatch");
    UnramElem r = unram_zero(u);
    for (std::size_t i = 0; i < x.c.size(); ++i) r.c[i] = x.c[i];
    return r;
}

inline FqkElem unram_reduce_mod_p(const UnramCtx& u, const UnramElem& z) {
    FqkElem x;
    x.k = u.ext.k;
    x.c.resize(static_cast<std::size_t>(u.n()));
    for (std::size_t i = 0; i < x.c.size(); ++i)
        x.c[i] = static_cast<std::uint8_t>(z.c[i] % static_cast<std::uint64_t>(u.p()));
    return x;
}

inline UnramElem unram_add(const UnramCtx& u, const UnramElem& a, const UnramElem& b) {
    UnramElem r = a;
    for (std::size_t i = 0; i < r.c.size(); ++i) {
        r.c[i] += b.c[i];
        if (r.c[i] >= u.pM) r.c[i] -= u.pM;
    }
    return r;
}

inline UnramElem unram_scale(const UnramCtx& u, const UnramElem& a, std::uint64_t s) {
    UnramElem r = a;
    s %= u.pM;
    for (std::size_t i = 0; i < r.c.size(); ++i)
        r.c[i] = static_cast<std::uint64_t>((static_cast<unsigned __int128>(r.c[i]) * s) % u.pM);
    return r;
}

inline void unram_mul_into(const UnramCtx& u, const UnramElem& a, const UnramElem& b, UnramElem& out,
                           std::vector<unsigned __int128>& scratch) {
    const long n = u.n();
    scratch.assign(static_cast<std::size_t>(2 * n - 1), 0);
    for (long i = 0; i < n; ++i) {
        if (!a.c[static_cast<std::size_t>(i)]) continue;
        for (long j = 0; j < n; ++j)
            scratch[static_cast<std::size_t>(i + j)] +=
                static_cast<unsigned __int128>(a.c[static_cast<std::size_t>(i)]) * b.c[static_cast<std::size_t>(j)];
    }
    for (long e = 2 * n - 2; e >= n; --e) {
        std::uint64_t lead = static_cast<std::uint64_t>(scratch[static_cast<std::size_t>(e)] % u.pM);
        scratch[static_cast<std::size_t>(e)] = 0;
        if (!lead) continue;
        std::uint64_t neg = u.pM - lead;
        for (long j = 0; j <= n; ++j) {
            if (!u.lift[static_cast<std::size_t>(j)] || j == n) continue;
            scratch[static_cast<std::size_t>(e - n + j)] +=
                static_cast<unsigned __int128>(neg) * u.lift[static_cast<std::size_t>(j)];
        }
    }
    out.k = u.ext.k;
    out.M = u.M;
    out.c.resize(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i)
        out.c[static_cast<std::size_t>(i)] = static_cast<std::uint64_t>(scratch[static_cast<std::size_t>(i)] % u.pM);
}

inline UnramElem unram_mul(const UnramCtx& u, const UnramElem& a, const UnramElem& b) {
    UnramElem out;
    std::vector<unsigned __int128> scratch;
    unram_mul_into(u, a, b, out, scratch);
    return out;
}

inline UnramElem unram_pow(const UnramCtx& u, UnramElem base, Int e) {
    UnramElem r = unram_from_int(u, 1);
    std::vector<unsigned __int128> scratch;
    UnramElem tmp;
    while (e > 0) {
        if ((e & 1) != 0) {
            unram_mul_into(u, r, base, tmp, scratch);
            std::swap(r, tmp);
        }
        unram_mul_into(u, base, base, tmp, scratch);
        std::swap(base, tmp);
        e >>= 1;
    }
    return r;
}

namespace detail {

inline UnramElem unram_eval_poly(const UnramCtx& u, const std::vector<std::uint64_t>& coeffs, const UnramElem& x) {
    UnramElem acc = unram_zero(u);
    std::vector<unsigned __int128> scratch;
    UnramElem tmp;
    for (std::size_t j = coeffs.size(); j-- > 0;) {
        unram_mul_into(u, acc, x, tmp, scratch);
        std::swap(acc, tmp);
        acc.c[0] = (acc.c[0] + coeffs[j] % u.pM) % u.pM;
    }
    return acc;
}

// Inverse of a unit (nonzero mod p) via mod-p Fermat inverse plus Hensel lifting.
inline UnramElem unram_inv(const UnramCtx& u, const UnramElem& x) {
    Int e = int_pow(u.p(), static_cast<std::uint64_t>(u.n())) - 2;
    // inverse mod p
    UnramElem w = x;
    for (auto& cc : w.c) cc %= static_cast<std::uint64_t>(u.p());
    UnramElem inv1 = unram_pow(u, w, e);
    for (auto& cc : inv1.c) cc %= static_cast<std::uint64_t>(u.p());
    UnramElem winv = inv1;
    std::vector<unsigned __int128> scratch;
    UnramElem tmp, tmp2;
    long prec = 1;
    while (prec < u.M) {
        // winv <- winv (2 - x winv)
        unram_mul_into(u, x, winv, tmp, scratch);
        UnramElem two = unram_from_int(u, 2);
        for (std::size_t i = 0; i < tmp.c.size(); ++i) tmp.c[i] = (u.pM + two.c[i] - tmp.c[i] % u.pM) % u.pM;
        unram_mul_into(u, winv, tmp, tmp2, scratch);
        std::swap(winv, tmp2);
        prec *= 2;
    }
    return winv;
}

}  // namespace detail

inline UnramCtx make_unram(const FieldCtx& field, long k, long M, bool with_sigma = false) {
    if (M < 1) throw InputError("make_unram: M must be >= 1");
    UnramCtx u;
    u.ext = make_ext(field, k);
    u.M = M;
    Int pm = int_pow(field.p, static_cast<std::uint64_t>(M));
    if (pm >= (Int(1) << 31)) throw ResourceLimitError("make_unram: p^M exceeds the supported word size");
    u.pM = static_cast<std::uint64_t>(pm);
    u.lift.resize(u.ext.modulus.size());
    for (std::size_t i = 0; i < u.lift.size(); ++i) u.lift[i] = u.ext.modulus[i];

    // Trace of basis powers from Newton's identities on the lifted modulus:
    // p_e + sum_{i<e} g_{n-i} p_{e-i} + e g_{n-e} = 0.
    const long n = u.ext.n;
    u.trace_basis.assign(static_cast<std::size_t>(n), 0);
    u.trace_basis[0] = static_cast<std::uint64_t>(n % static_cast<long>(u.pM));
    for (long e = 1; e < n; ++e) {
        unsigned __int128 acc = static_cast<unsigned __int128>(e % static_cast<long>(u.pM)) *
                                u.lift[static_cast<std::size_t>(n - e)];
        for (long i = 1; i < e; ++i)
            acc += static_cast<unsigned __int128>(u.lift[static_cast<std::size_t>(n - i)]) *
                   u.trace_basis[static_cast<std::size_t>(e - i)];
        std::uint64_t s = static_cast<std::uint64_t>(acc % u.pM);
        u.trace_basis[static_cast<std::size_t>(e)] = (u.pM - s) % u.pM;
    }

    if (with_sigma && n > 1) {
        // sigma(t): the root of the lifted modulus congruent to t^p mod p,
        // found by Newton iteration.
        std::vector<std::uint64_t> deriv(static_cast<std::size_t>(n));
        for (long j = 1; j <= n; ++j)
            deriv[static_cast<std::size_t>(j - 1)] =
                static_cast<std::uint64_t>((static_cast<unsigned __int128>(j) * u.lift[static_cast<std::size_t>(j)]) % u.pM);
        UnramElem t = unram_zero(u);
        t.c[1] = 1;
        UnramElem s = unram_pow(u, t, field.p);
        for (auto& cc : s.c) cc %= static_cast<std::uint64_t>(field.p);
        long prec = 1;
        std::vector<unsigned __int128> scratch;
        UnramElem tmp;
        while (prec < M) {
            UnramElem gs = detail::unram_eval_poly(u, u.lift, s);
            UnramElem gps = detail::unram_eval_poly(u, deriv, s);
            UnramElem inv = detail::unram_inv(u, gps);
            unram_mul_into(u, gs, inv, tmp, scratch);
            for (std::size_t i = 0; i < s.c.size(); ++i) s.c[i] = (s.c[i] + u.pM - tmp.c[i]) % u.pM;
            prec *= 2;
        }
        if (!detail::unram_eval_poly(u, u.lift, s).is_zero())
            throw InternalError("make_unram: sigma(t) is not a root of the lifted modulus");
        u.sigma_pow.resize(static_cast<std::size_t>(n));
        UnramElem acc = unram_from_int(u, 1);
        for (long e2 = 0; e2 < n; ++e2) {
            u.sigma_pow[static_cast<std::size_t>(e2)] = acc;
            acc = unram_mul(u, acc, s);
        }
        u.has_sigma = true;
    } else if (with_sigma) {
        u.sigma_pow = {unram_from_int(u, 1)};
        u.has_sigma = true;
    }
    return u;
}

// Teichmuller lift: iterate z -> z^{q^k} exactly M times from the naive lift.
inline UnramElem teichmuller(const UnramCtx& u, const FqkElem& x) {
    UnramElem z = unram_lift(u, x);
    Int e = int_pow(u.p(), static_cast<std::uint64_t>(u.n()));
    for (long it = 0; it < u.M; ++it) z = unram_pow(u, z, e);
    return z;
}

inline UnramElem teichmuller(const FieldCtx& field, const FqkElem& x, long M) {
    UnramCtx u = make_unram(field, x.k, M);
    return teichmuller(u, x);
}

// sigma, the unique automorphism lifting x -> x^p; fixes Z_p.
inline UnramElem frobenius_apply(const UnramCtx& u, const UnramElem& z) {
    if (!u.has_sigma) throw InternalError("frobenius_apply: context built without sigma");
    UnramElem r = unram_zero(u);
    for (long e = 0; e < u.n(); ++e) {
        if (!z.c[static_cast<std::size_t>(e)]) continue;
        r = unram_add(u, r, unram_scale(u, u.sigma_pow[static_cast<std::size_t>(e)], z.c[static_cast<std::size_t>(e)]));
    }
    return r;
}

// Trace to Z_p as the sum of sigma-conjugates; the non-constant coordinates
// must vanish, anything else signals a modulus/sigma inconsistency.
inline Int trace_to_zp(const UnramCtx& u, const UnramElem& z) {
    UnramElem acc = z, y = z;
    for (long l = 1; l < u.n(); ++l) {
        y = frobenius_apply(u, y);
        acc = unram_add(u, acc, y);
    }
    for (long i = 1; i < u.n(); ++i)
        if (acc.c[static_cast<std::size_t>(i)])
            throw TraceNotRationalError("trace_to_zp: conjugate sum is not rational");
    return Int(acc.c[0]);
}

// Same trace as a precomputed linear form; used by the enumeration loops.
inline std::uint64_t trace_linear(const UnramCtx& u, const UnramElem& z) {
    unsigned __int128 acc = 0;
    for (long e = 0; e < u.n(); ++e)
        acc += static_cast<unsigned __int128>(z.c[static_cast<std::size_t>(e)]) * u.trace_basis[static_cast<std::size_t>(e)];
    return static_cast<std::uint64_t>(acc % u.pM);
}

// Teichmuller lift of an element of the base field F_q inside Z_{q^k}/p^M.
inline UnramElem teichmuller_base(const UnramCtx& u, const std::vector<std::uint8_t>& x_base) {
    FqkElem emb;
    emb.k = u.ext.k;
    emb.c = fq_embed(u.ext, x_base);
    return teichmuller(u, emb);
}

}  // namespace aswl
