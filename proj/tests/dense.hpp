#pragma once

// Dense direct-solve helpers used as independent oracles in the tests.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "chns/linalg.hpp"

namespace dense {

using Mat = std::vector<std::vector<double>>;
using chns::Vector;

inline Mat zeros(int r, int c) { return Mat(r, std::vector<double>(c, 0.0)); }

inline Mat to_dense(const chns::SparseMatrix& A) {
    Mat out = zeros(A.n_rows(), A.n_cols());
    for (int r = 0; r < A.n_rows(); ++r) {
        for (int k = A.row_offsets()[r]; k < A.row_offsets()[r + 1]; ++k) {
            out[r][A.col_indices()[k]] += A.values()[k];
        }
    }
    return out;
}

inline Vector multiply(const Mat& A, const Vector& x) {
    Vector y(A.size(), 0.0);
    for (size_t r = 0; r < A.size(); ++r) {
        for (size_t c = 0; c < x.size(); ++c) y[r] += A[r][c] * x[c];
    }
    return y;
}

/// Gaussian elimination with partial pivoting.
inline Vector solve(Mat A, Vector b) {
    const int n = static_cast<int>(b.size());
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int r = k + 1; r < n; ++r) {
            if (std::abs(A[r][k]) > std::abs(A[piv][k])) piv = r;
        }
        if (std::abs(A[piv][k]) < 1e-300) throw std::runtime_error("dense::solve: singular");
        std::swap(A[k], A[piv]);
        std::swap(b[k], b[piv]);
        for (int r = k + 1; r < n; ++r) {
            const double f = A[r][k] / A[k][k];
            if (f == 0.0) continue;
            for (int c = k; c < n; ++c) A[r][c] -= f * A[k][c];
            b[r] -= f * b[k];
        }
    }
    Vector x(n, 0.0);
    for (int k = n - 1; k >= 0; --k) {
        double s = b[k];
        for (int c = k + 1; c < n; ++c) s -= A[k][c] * x[c];
        x[k] = s / A[k][k];
    }
    return x;
}

/// Singular Neumann-type system Ax = b with the weighted-mean-zero
/// representative, via the bordered KKT system [A w; w^T 0].
inline Vector solve_mean_constrained(const Mat& A, const Vector& b, const Vector& w) {
    const int n = static_cast<int>(b.size());
    Mat K = zeros(n + 1, n + 1);
    Vector rhs(n + 1, 0.0);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) K[r][c] = A[r][c];
        K[r][n] = w[r];
        K[n][r] = w[r];
        rhs[r] = b[r];
    }
    Vector x = solve(std::move(K), std::move(rhs));
    x.resize(n);
    return x;
}

inline double max_abs_diff(const Vector& a, const Vector& b) {
    double m = 0.0;
    for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double max_abs_diff(const Mat& A, const Mat& B) {
    double m = 0.0;
    for (size_t r = 0; r < A.size(); ++r) {
        for (size_t c = 0; c < A[r].size(); ++c) {
            m = std::max(m, std::abs(A[r][c] - B[r][c]));
        }
    }
    return m;
}

} // namespace dense
