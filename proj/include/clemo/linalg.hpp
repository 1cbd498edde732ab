#pragma once

// Small dense linear algebra helpers: row-major matrices, Cholesky solves
// with an optional ridge retry for rank-deficient normal equations.

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>

#include "clemo/common.hpp"

namespace clemo {

struct Mat {
    int rows = 0;
    int cols = 0;
    Vec a;

    Mat() = default;
    Mat(int r, int c, double fill = 0.0) : rows(r), cols(c), a(static_cast<size_t>(r) * c, fill) {}

    double& at(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
    double at(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }
    std::span<double> row(int r) { return {a.data() + static_cast<size_t>(r) * cols, static_cast<size_t>(cols)}; }
    std::span<const double> row(int r) const {
        return {a.data() + static_cast<size_t>(r) * cols, static_cast<size_t>(cols)};
    }
};

inline double dot(std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

inline double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    for (size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

// In-place lower Cholesky of a symmetric matrix. Returns false on a
// non-positive pivot.
inline bool cholesky(Mat& m) {
    const int n = m.rows;
    for (int j = 0; j < n; ++j) {
        double d = m.at(j, j);
        for (int k = 0; k < j; ++k) d -= m.at(j, k) * m.at(j, k);
        if (!(d > 0.0) || !std::isfinite(d)) return false;
        const double ljj = std::sqrt(d);
        m.at(j, j) = ljj;
        for (int i = j + 1; i < n; ++i) {
            double s = m.at(i, j);
            for (int k = 0; k < j; ++k) s -= m.at(i, k) * m.at(j, k);
            m.at(i, j) = s / ljj;
        }
    }
    return true;
}

inline Vec cholesky_solve(const Mat& chol, std::span<const double> b) {
    const int n = chol.rows;
    Vec y(b.begin(), b.end());
    for (int i = 0; i < n; ++i) {
        double s = y[i];
        for (int k = 0; k < i; ++k) s -= chol.at(i, k) * y[k];
        y[i] = s / chol.at(i, i);
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = y[i];
        for (int k = i + 1; k < n; ++k) s -= chol.at(k, i) * y[k];
        y[i] = s / chol.at(i, i);
    }
    return y;
}

// Factor a symmetric positive (semi-)definite matrix, retrying with
// `ridge` added to the diagonal when the plain factorization fails.
// Returns the factor plus whether the ridge path was taken.
struct SpdFactor {
    Mat chol;
    bool ridged = false;
};

inline SpdFactor factor_spd(const Mat& m, double ridge) {
    SpdFactor f;
    f.chol = m;
    if (cholesky(f.chol)) return f;
    f.chol = m;
    for (int i = 0; i < m.rows; ++i) f.chol.at(i, i) += ridge;
    f.ridged = true;
    if (!cholesky(f.chol)) throw contract_error("normal equations not factorizable even with ridge");
    return f;
}

}  // namespace clemo
