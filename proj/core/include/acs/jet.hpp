#pragma once
// Truncated Taylor arithmetic in one variable.
// c[k] = f^(k)(x0) / k!, k = 0..K.

#include <array>
#include <cmath>
#include <cstddef>

namespace acs {

template <std::size_t K>
struct Jet {
    std::array<double, K + 1> c{};

    Jet() = default;
    Jet(double v) { c[0] = v; }

    static Jet variable(double x0) {
        Jet j(x0);
        if constexpr (K >= 1) j.c[1] = 1.0;
        return j;
    }

    double value() const { return c[0]; }

    // k-th derivative
    double d(std::size_t k) const {
        double f = 1.0;
        for (std::size_t i = 2; i <= k; ++i) f *= double(i);
        return c[k] * f;
    }

    Jet& operator+=(const Jet& o) { for (std::size_t k = 0; k <= K; ++k) c[k] += o.c[k]; return *this; }
    Jet& operator-=(const Jet& o) { for (std::size_t k = 0; k <= K; ++k) c[k] -= o.c[k]; return *this; }
    Jet& operator*=(double s) { for (auto& v : c) v *= s; return *this; }
};

template <std::size_t K> Jet<K> operator+(Jet<K> a, const Jet<K>& b) { return a += b; }
template <std::size_t K> Jet<K> operator-(Jet<K> a, const Jet<K>& b) { return a -= b; }
template <std::size_t K> Jet<K> operator-(Jet<K> a) { a *= -1.0; return a; }
template <std::size_t K> Jet<K> operator*(Jet<K> a, double s) { return a *= s; }
template <std::size_t K> Jet<K> operator*(double s, Jet<K> a) { return a *= s; }
template <std::size_t K> Jet<K> operator+(Jet<K> a, double s) { a.c[0] += s; return a; }
template <std::size_t K> Jet<K> operator+(double s, Jet<K> a) { a.c[0] += s; return a; }
template <std::size_t K> Jet<K> operator-(Jet<K> a, double s) { a.c[0] -= s; return a; }
template <std::size_t K> Jet<K> operator-(double s, Jet<K> a) { a *= -1.0; a.c[0] += s; return a; }

template <std::size_t K>
Jet<K> operator*(const Jet<K>& a, const Jet<K>& b) {
    Jet<K> r;
    for (std::size_t k = 0; k <= K; ++k) {
        double s = 0;
        for (std::size_t i = 0; i <= k; ++i) s += a.c[i] * b.c[k - i];
        r.c[k] = s;
    }
    return r;
}

template <std::size_t K>
Jet<K> operator/(const Jet<K>& a, const Jet<K>& b) {
    Jet<K> r;
    for (std::size_t k = 0; k <= K; ++k) {
        double s = a.c[k];
        for (std::size_t i = 1; i <= k; ++i) s -= b.c[i] * r.c[k - i];
        r.c[k] = s / b.c[0];
    }
    return r;
}

template <std::size_t K> Jet<K> operator/(const Jet<K>& a, double s) { return a * (1.0 / s); }
template <std::size_t K> Jet<K> operator/(double s, const Jet<K>& b) { return Jet<K>(s) / b; }

template <std::size_t K>
Jet<K> exp(const Jet<K>& g) {
    Jet<K> e;
    e.c[0] = std::exp(g.c[0]);
    for (std::size_t k = 1; k <= K; ++k) {
        double s = 0;
        for (std::size_t j = 1; j <= k; ++j) s += double(j) * g.c[j] * e.c[k - j];
        e.c[k] = s / double(k);
    }
    return e;
}

template <std::size_t K>
Jet<K> log(const Jet<K>& g) {
    Jet<K> l;
    l.c[0] = std::log(g.c[0]);
    for (std::size_t k = 1; k <= K; ++k) {
        double s = double(k) * g.c[k];
        for (std::size_t j = 1; j < k; ++j) s -= double(j) * l.c[j] * g.c[k - j];
        l.c[k] = s / (double(k) * g.c[0]);
    }
    return l;
}

// polynomial sum p[i] t^i evaluated on a jet by Horner
template <std::size_t K, class Coeffs>
Jet<K> horner(const Coeffs& p, const Jet<K>& t) {
    Jet<K> r;
    for (std::size_t i = p.size(); i-- > 0;) {
        r = r * t;
        r.c[0] += p[i];
    }
    return r;
}

} // namespace acs
