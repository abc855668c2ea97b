#pragma once

// Independent reference implementations used only by tests. None of these call into
// the library code they are compared against.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

namespace oracle {

using Mat = std::vector<std::vector<double>>;

struct Eigen {
    std::vector<double> values; // descending
    Mat vectors;                // vectors[k] pairs with values[k]
};

/// Cyclic Jacobi rotations on a symmetric matrix.
inline Eigen jacobi_eigen(Mat a) {
    const std::size_t n = a.size();
    Mat v(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;
    double scale = 0.0;
    for (const auto& row : a)
        for (double x : row) scale += x * x;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
        if (off <= 1e-30 * scale || off == 0.0) break;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                if (a[p][q] == 0.0) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v[k][p], vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
    }
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return a[x][x] > a[y][y]; });
    Eigen e;
    for (std::size_t k : idx) {
        e.values.push_back(a[k][k]);
        std::vector<double> col(n);
        for (std::size_t i = 0; i < n; ++i) col[i] = v[i][k];
        e.vectors.push_back(col);
    }
    return e;
}

/// Second-moment matrix of the per-patch mean-removed vectors, computed row by row.
inline Mat ac_second_moment(const std::vector<std::vector<double>>& patches) {
    const std::size_t L = patches.front().size();
    Mat m(L, std::vector<double>(L, 0.0));
    for (const auto& p : patches) {
        double mean = 0.0;
        for (double x : p) mean += x;
        mean /= static_cast<double>(L);
        std::vector<double> ac(L);
        for (std::size_t i = 0; i < L; ++i) ac[i] = p[i] - mean;
        for (std::size_t i = 0; i < L; ++i)
            for (std::size_t j = 0; j < L; ++j) m[i][j] += ac[i] * ac[j];
    }
    for (auto& row : m)
        for (double& x : row) x /= static_cast<double>(patches.size());
    return m;
}

inline double dot(const std::vector<double>& a, const double* b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

/// Orthonormal DCT-II of a square grid, separable rows then columns.
inline Mat dct2(const Mat& x) {
    const std::size_t n = x.size();
    const double pi = std::acos(-1.0);
    auto dct1 = [&](const std::vector<double>& in) {
        std::vector<double> out(n);
        for (std::size_t k = 0; k < n; ++k) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += in[i] * std::cos(pi * (i + 0.5) * k / n);
            out[k] = s * std::sqrt((k == 0 ? 1.0 : 2.0) / n);
        }
        return out;
    };
    Mat rows(n);
    for (std::size_t r = 0; r < n; ++r) rows[r] = dct1(x[r]);
    Mat out(n, std::vector<double>(n));
    for (std::size_t c = 0; c < n; ++c) {
        std::vector<double> col(n);
        for (std::size_t r = 0; r < n; ++r) col[r] = rows[r][c];
        const auto t = dct1(col);
        for (std::size_t r = 0; r < n; ++r) out[r][c] = t[r];
    }
    return out;
}

} // namespace oracle
