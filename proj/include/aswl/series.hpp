#pragma once

// Dense truncated power series over an abstract coefficient ring. The ring is
// whatever the element type implements: exact rationals, Z/p^M, O_m mod p^M,
// or the unramified tensor ring used by the Fredholm path. Elements carry
// their own context, so the series only needs a zero prototype for padding.

#include <cassert>
#include <vector>

#include "aswl/errors.hpp"

namespace aswl {

template <typename T>
struct TruncSeries {
    std::vector<T> c;

    long prec() const { return static_cast<long>(c.size()); }
    const T& operator[](long i) const { return c[static_cast<std::size_t>(i)]; }
    T& operator[](long i) { return c[static_cast<std::size_t>(i)]; }
};

template <typename T>
TruncSeries<T> series_zero(long prec, const T& zero) {
    assert(prec >= 1);
    return TruncSeries<T>{std::vector<T>(static_cast<std::size_t>(prec), zero)};
}

template <typename T>
TruncSeries<T> series_one(long prec, const T& zero, const T& one) {
    auto s = series_zero(prec, zero);
    s[0] = one;
    return s;
}

template <typename T>
TruncSeries<T> operator+(const TruncSeries<T>& a, const TruncSeries<T>& b) {
    assert(a.prec() == b.prec());
    TruncSeries<T> r = a;
    for (long i = 0; i < r.prec(); ++i) r[i] = r[i] + b[i];
    return r;
}

template <typename T>
TruncSeries<T> operator-(const TruncSeries<T>& a, const TruncSeries<T>& b) {
    assert(a.prec() == b.prec());
    TruncSeries<T> r = a;
    for (long i = 0; i < r.prec(); ++i) r[i] = r[i] - b[i];
    return r;
}

template <typename T>
TruncSeries<T> series_mul(const TruncSeries<T>& a, const TruncSeries<T>& b, const T& zero) {
    assert(a.prec() == b.prec());
    TruncSeries<T> r = series_zero(a.prec(), zero);
    for (long i = 0; i < a.prec(); ++i) {
        if (a[i] == zero) continue;
        for (long j = 0; i + j < b.prec(); ++j) {
            if (b[j] == zero) continue;
            r[i + j] = r[i + j] + a[i] * b[j];
        }
    }
    return r;
}

// f(X) -> f(X^t), truncated at out_prec.
template <typename T>
TruncSeries<T> series_stretch(const TruncSeries<T>& a, long t, long out_prec, const T& zero) {
    TruncSeries<T> r = series_zero(out_prec, zero);
    for (long i = 0; i < a.prec() && i * t < out_prec; ++i) r[i * t] = a[i];
    return r;
}

// Composition (outer o inner) mod X^n; requires inner constant term zero.
template <typename T>
TruncSeries<T> series_compose_prefix(const TruncSeries<T>& outer, const TruncSeries<T>& inner, long n, const T& zero) {
    assert(inner[0] == zero);
    TruncSeries<T> in = series_zero(n, zero);
    for (long i = 1; i < std::min(n, inner.prec()); ++i) in[i] = inner[i];
    long terms = std::min(n, outer.prec());
    TruncSeries<T> r = series_zero(n, zero);
    for (long k = terms; k-- > 0;) {
        r = series_mul(r, in, zero);
        r[0] = r[0] + outer[k];
    }
    return r;
}

// Inverse of a series with constant term equal to `one` (geometric recursion,
// no ring division).
template <typename T>
TruncSeries<T> series_inverse_one(const TruncSeries<T>& f, const T& zero, const T& one) {
    if (!(f[0] == one)) throw InternalError("series_inverse_one: constant term is not 1");
    TruncSeries<T> r = series_zero(f.prec(), zero);
    r[0] = one;
    for (long n = 1; n < f.prec(); ++n) {
        T acc = zero;
        for (long t = 1; t <= n && t < f.prec(); ++t) acc = acc + f[t] * r[n - t];
        r[n] = zero - acc;
    }
    return r;
}

// Horner evaluation at a ring element.
template <typename T>
T series_eval(const TruncSeries<T>& f, const T& x, const T& zero) {
    T acc = zero;
    for (long k = f.prec(); k-- > 0;) acc = acc * x + f[k];
    return acc;
}

}  // namespace aswl
