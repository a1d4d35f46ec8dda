#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace mimic::genbackend {

// Forward-mode dual number with a fixed-width tangent vector. The toy
// renderer instantiates it with one tangent per face parameter, so a single
// evaluation yields the full parameter Jacobian of every output pixel.
template <int N>
struct Dual {
    double v = 0.0;
    std::array<double, N> d{};

    Dual() = default;
    Dual(double value) : v(value) {} // constant, zero tangent
    static Dual seeded(double value, int slot) {
        Dual out(value);
        out.d[slot] = 1.0;
        return out;
    }

    Dual& operator+=(const Dual& o) {
        v += o.v;
        for (int i = 0; i < N; ++i) d[i] += o.d[i];
        return *this;
    }
    Dual& operator-=(const Dual& o) {
        v -= o.v;
        for (int i = 0; i < N; ++i) d[i] -= o.d[i];
        return *this;
    }
};

template <int N>
Dual<N> operator+(Dual<N> a, const Dual<N>& b) { return a += b; }
template <int N>
Dual<N> operator-(Dual<N> a, const Dual<N>& b) { return a -= b; }
template <int N>
Dual<N> operator-(const Dual<N>& a) {
    Dual<N> out(-a.v);
    for (int i = 0; i < N; ++i) out.d[i] = -a.d[i];
    return out;
}

template <int N>
Dual<N> operator*(const Dual<N>& a, const Dual<N>& b) {
    Dual<N> out(a.v * b.v);
    for (int i = 0; i < N; ++i) out.d[i] = a.d[i] * b.v + a.v * b.d[i];
    return out;
}

template <int N>
Dual<N> operator/(const Dual<N>& a, const Dual<N>& b) {
    const double inv = 1.0 / b.v;
    Dual<N> out(a.v * inv);
    for (int i = 0; i < N; ++i) out.d[i] = (a.d[i] - out.v * b.d[i]) * inv;
    return out;
}

template <int N>
Dual<N> exp(const Dual<N>& a) {
    const double e = std::exp(a.v);
    Dual<N> out(e);
    for (int i = 0; i < N; ++i) out.d[i] = e * a.d[i];
    return out;
}

template <int N>
Dual<N> tanh(const Dual<N>& a) {
    const double t = std::tanh(a.v);
    const double g = 1.0 - t * t;
    Dual<N> out(t);
    for (int i = 0; i < N; ++i) out.d[i] = g * a.d[i];
    return out;
}

template <int N>
Dual<N> sqrt(const Dual<N>& a) {
    const double r = std::sqrt(a.v);
    const double g = r > 0 ? 0.5 / r : 0.0;
    Dual<N> out(r);
    for (int i = 0; i < N; ++i) out.d[i] = g * a.d[i];
    return out;
}

// Overflow-safe logistic.
template <int N>
Dual<N> sigmoid(const Dual<N>& a) {
    const double s = a.v >= 0 ? 1.0 / (1.0 + std::exp(-a.v)) : std::exp(a.v) / (1.0 + std::exp(a.v));
    const double g = s * (1.0 - s);
    Dual<N> out(s);
    for (int i = 0; i < N; ++i) out.d[i] = g * a.d[i];
    return out;
}

// double specializations so the renderer templates work on plain scalars

inline double sigmoid(double a) {
    return a >= 0 ? 1.0 / (1.0 + std::exp(-a)) : std::exp(a) / (1.0 + std::exp(a));
}

template <typename S>
inline double value_of(const S& s) { return s; }
template <int N>
inline double value_of(const Dual<N>& s) { return s.v; }

} // namespace mimic::genbackend
