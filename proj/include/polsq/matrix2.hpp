#pragma once

#include <complex>

namespace polsq {

/// Dense 2x2 complex matrix, row-major.
struct Matrix2c {
    using value_type = std::complex<double>;

    value_type a11{}, a12{}, a21{}, a22{};

    static Matrix2c identity() { return {1.0, 0.0, 0.0, 1.0}; }

    value_type det() const { return a11 * a22 - a12 * a21; }
    value_type trace() const { return a11 + a22; }
    Matrix2c transpose() const { return {a11, a21, a12, a22}; }

    /// Caller checks det() first; no singularity test here.
    Matrix2c inverse() const {
        const value_type d = det();
        return {a22 / d, -a12 / d, -a21 / d, a11 / d};
    }

    friend Matrix2c operator+(const Matrix2c& l, const Matrix2c& r) {
        return {l.a11 + r.a11, l.a12 + r.a12, l.a21 + r.a21, l.a22 + r.a22};
    }
    friend Matrix2c operator-(const Matrix2c& l, const Matrix2c& r) {
        return {l.a11 - r.a11, l.a12 - r.a12, l.a21 - r.a21, l.a22 - r.a22};
    }
    friend Matrix2c operator*(value_type s, const Matrix2c& m) {
        return {s * m.a11, s * m.a12, s * m.a21, s * m.a22};
    }
    friend Matrix2c operator*(const Matrix2c& l, const Matrix2c& r) {
        return {l.a11 * r.a11 + l.a12 * r.a21, l.a11 * r.a12 + l.a12 * r.a22,
                l.a21 * r.a11 + l.a22 * r.a21, l.a21 * r.a12 + l.a22 * r.a22};
    }
};

}  // namespace polsq
