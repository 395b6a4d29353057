#pragma once

// Coefficient vectors on the orthonormal sine basis e_k(x) = sqrt(2/pi) sin(kx)
// of L^2(0,pi). Index k runs 1..M; coeffs[i] stores the coefficient of e_{i+1}.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace swm {

struct SpectralField {
    std::vector<double> a;

    SpectralField() = default;
    explicit SpectralField(std::size_t modes) : a(modes, 0.0) {}
    explicit SpectralField(std::vector<double> coeffs) : a(std::move(coeffs)) {}

    std::size_t modes() const { return a.size(); }
    double operator[](std::size_t i) const { return a[i]; }
    double& operator[](std::size_t i) { return a[i]; }

    // ||u||_{L^2}; the basis is orthonormal so this is the plain l2 norm.
    double norm_l2() const {
        double s = 0.0;
        for (double x : a) s += x * x;
        return std::sqrt(s);
    }

    // H^1_0 seminorm, sqrt(sum k^2 a_k^2).
    double norm_h1() const {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            double k = static_cast<double>(i + 1);
            s += k * k * a[i] * a[i];
        }
        return std::sqrt(s);
    }

    bool finite() const {
        for (double x : a)
            if (!std::isfinite(x)) return false;
        return true;
    }

    SpectralField& operator+=(const SpectralField& o) {
        check_same(o);
        for (std::size_t i = 0; i < a.size(); ++i) a[i] += o.a[i];
        return *this;
    }
    SpectralField& operator-=(const SpectralField& o) {
        check_same(o);
        for (std::size_t i = 0; i < a.size(); ++i) a[i] -= o.a[i];
        return *this;
    }
    SpectralField& operator*=(double c) {
        for (double& x : a) x *= c;
        return *this;
    }

    friend SpectralField operator+(SpectralField l, const SpectralField& r) { return l += r; }
    friend SpectralField operator-(SpectralField l, const SpectralField& r) { return l -= r; }
    friend SpectralField operator*(double c, SpectralField f) { return f *= c; }

    // Unit basis vector e_k (1-based mode index).
    static SpectralField basis(std::size_t modes, std::size_t k, double amp = 1.0) {
        if (k < 1 || k > modes) throw std::invalid_argument("basis: mode index out of range");
        SpectralField f(modes);
        f.a[k - 1] = amp;
        return f;
    }

  private:
    void check_same(const SpectralField& o) const {
        if (a.size() != o.a.size())
            throw std::invalid_argument("SpectralField: truncation mismatch");
    }
};

inline double dot(const SpectralField& x, const SpectralField& y) {
    if (x.modes() != y.modes()) throw std::invalid_argument("dot: truncation mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < x.modes(); ++i) s += x.a[i] * y.a[i];
    return s;
}

} // namespace swm
