/** @file linalg.hpp
 *  @brief Dense vector helpers shared by the exact and floating layers. */
#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include <gmpxx.h>

namespace dunklpot {

using Rational = mpq_class;
using RVec = std::vector<Rational>;
using Vec = std::vector<double>;

template <class T>
T dot(std::span<const T> a, std::span<const T> b) {
    T s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double dot(const Vec& a, const Vec& b) { return dot<double>(a, b); }
inline Rational dot(const RVec& a, const RVec& b) { return dot<Rational>(a, b); }

inline double norm2(const Vec& a) { return dot(a, a); }
inline double norm(const Vec& a) { return std::sqrt(norm2(a)); }
inline Rational norm2(const RVec& a) { return dot(a, a); }

inline double dist2(const Vec& a, const Vec& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double t = a[i] - b[i];
        s += t * t;
    }
    return s;
}
inline double dist(const Vec& a, const Vec& b) { return std::sqrt(dist2(a, b)); }

template <class V>
V sub(const V& a, const V& b) {
    V r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

template <class V, class S>
V axpy(const V& y, const S& a, const V& x) {
    V r(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) r[i] = y[i] + a * x[i];
    return r;
}

template <class V, class S>
V scale(const V& x, const S& a) {
    V r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = a * x[i];
    return r;
}

/// Exact conversion of a finite double.
inline Rational exact(double v) {
    Rational r(v);
    r.canonicalize();
    return r;
}
inline RVec exact(const Vec& v) {
    RVec r;
    r.reserve(v.size());
    for (double t : v) r.push_back(exact(t));
    return r;
}
inline Vec to_double(const RVec& v) {
    Vec r;
    r.reserve(v.size());
    for (const auto& t : v) r.push_back(t.get_d());
    return r;
}

}  // namespace dunklpot
