#include "chns/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace chns {

double dot(const Vector& a, const Vector& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(const Vector& a) { return std::sqrt(dot(a, a)); }

void axpy(double s, const Vector& x, Vector& y) {
    for (size_t i = 0; i < x.size(); ++i) y[i] += s * x[i];
}

SparseMatrix SparseMatrix::from_triplets(const TripletBuffer& buf, int n_rows, int n_cols) {
    for (size_t k = 0; k < buf.size(); ++k) {
        if (buf.rows[k] < 0 || buf.rows[k] >= n_rows || buf.cols[k] < 0 ||
            buf.cols[k] >= n_cols) {
            throw std::out_of_range("SparseMatrix::from_triplets: index out of range");
        }
    }
    SparseMatrix A;
    A.n_rows_ = n_rows;
    A.n_cols_ = n_cols;

    std::vector<int> count(n_rows, 0);
    for (int r : buf.rows) ++count[r];
    std::vector<int> start(n_rows + 1, 0);
    for (int r = 0; r < n_rows; ++r) start[r + 1] = start[r] + count[r];

    std::vector<int> cols(buf.size());
    std::vector<double> vals(buf.size());
    {
        std::vector<int> pos(start.begin(), start.end() - 1);
        for (size_t k = 0; k < buf.size(); ++k) {
            const int p = pos[buf.rows[k]]++;
            cols[p] = buf.cols[k];
            vals[p] = buf.vals[k];
        }
    }

    A.row_offsets_.assign(n_rows + 1, 0);
    for (int r = 0; r < n_rows; ++r) {
        const int lo = start[r], hi = start[r + 1];
        std::vector<int> order(hi - lo);
        std::iota(order.begin(), order.end(), lo);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return cols[a] < cols[b]; });
        int prev_col = -1;
        for (int idx : order) {
            if (cols[idx] == prev_col) {
                A.values_.back() += vals[idx];
            } else {
                A.col_indices_.push_back(cols[idx]);
                A.values_.push_back(vals[idx]);
                prev_col = cols[idx];
            }
        }
        A.row_offsets_[r + 1] = static_cast<int>(A.col_indices_.size());
    }
    return A;
}

Vector SparseMatrix::multiply(const Vector& x) const {
    if (static_cast<int>(x.size()) != n_cols_) {
        throw std::invalid_argument("SparseMatrix::multiply: dimension mismatch");
    }
    Vector y(n_rows_, 0.0);
    for (int r = 0; r < n_rows_; ++r) {
        double s = 0.0;
        for (int k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
            s += values_[k] * x[col_indices_[k]];
        }
        y[r] = s;
    }
    return y;
}

void SparseMatrix::add_transpose_multiply(const Vector& x, double s, Vector& y) const {
    if (static_cast<int>(x.size()) != n_rows_ || static_cast<int>(y.size()) != n_cols_) {
        throw std::invalid_argument("add_transpose_multiply: dimension mismatch");
    }
    for (int r = 0; r < n_rows_; ++r) {
        const double xr = s * x[r];
        if (xr == 0.0) continue;
        for (int k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
            y[col_indices_[k]] += values_[k] * xr;
        }
    }
}

Vector SparseMatrix::diagonal() const {
    Vector d(n_rows_, 0.0);
    for (int r = 0; r < n_rows_; ++r) {
        for (int k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
            if (col_indices_[k] == r) d[r] = values_[k];
        }
    }
    return d;
}

SparseMatrix SparseMatrix::scaled(const Vector& row_mult, const Vector& col_mult) const {
    if (static_cast<int>(row_mult.size()) != n_rows_ ||
        static_cast<int>(col_mult.size()) != n_cols_) {
        throw std::invalid_argument("SparseMatrix::scaled: dimension mismatch");
    }
    SparseMatrix out = *this;
    for (int r = 0; r < n_rows_; ++r) {
        for (int k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
            out.values_[k] *= row_mult[r] * col_mult[col_indices_[k]];
        }
    }
    return out;
}

Vector spmv(const SparseMatrix& A, const Vector& x) { return A.multiply(x); }

BandCholesky::BandCholesky(const SparseMatrix& A, double shift) {
    if (A.n_rows() != A.n_cols()) {
        throw std::invalid_argument("BandCholesky: matrix must be square");
    }
    n_ = A.n_rows();
    for (int r = 0; r < n_; ++r) {
        for (int k = A.row_offsets()[r]; k < A.row_offsets()[r + 1]; ++k) {
            bw_ = std::max(bw_, std::abs(r - A.col_indices()[k]));
        }
    }
    const int w = bw_ + 1;
    band_.assign(static_cast<size_t>(n_) * w, 0.0);
    for (int r = 0; r < n_; ++r) {
        for (int k = A.row_offsets()[r]; k < A.row_offsets()[r + 1]; ++k) {
            const int c = A.col_indices()[k];
            if (c <= r) band_[static_cast<size_t>(r) * w + (c - r + bw_)] = A.values()[k];
        }
        band_[static_cast<size_t>(r) * w + bw_] += shift;
    }
    for (int i = 0; i < n_; ++i) {
        const int lo = std::max(0, i - bw_);
        for (int j = lo; j <= i; ++j) {
            double s = band_[static_cast<size_t>(i) * w + (j - i + bw_)];
            const int klo = std::max(lo, j - bw_);
            for (int k = klo; k < j; ++k) {
                s -= band_[static_cast<size_t>(i) * w + (k - i + bw_)] *
                     band_[static_cast<size_t>(j) * w + (k - j + bw_)];
            }
            if (j < i) {
                band_[static_cast<size_t>(i) * w + (j - i + bw_)] =
                    s / band_[static_cast<size_t>(j) * w + bw_];
            } else {
                if (s <= 0.0) {
                    throw std::runtime_error("BandCholesky: matrix not positive definite");
                }
                band_[static_cast<size_t>(i) * w + bw_] = std::sqrt(s);
            }
        }
    }
}

Vector BandCholesky::solve(Vector b) const {
    const int w = bw_ + 1;
    for (int i = 0; i < n_; ++i) {
        double s = b[i];
        const int lo = std::max(0, i - bw_);
        for (int k = lo; k < i; ++k) {
            s -= band_[static_cast<size_t>(i) * w + (k - i + bw_)] * b[k];
        }
        b[i] = s / band_[static_cast<size_t>(i) * w + bw_];
    }
    for (int i = n_ - 1; i >= 0; --i) {
        const double xi = b[i] / band_[static_cast<size_t>(i) * w + bw_];
        b[i] = xi;
        const int lo = std::max(0, i - bw_);
        for (int k = lo; k < i; ++k) {
            b[k] -= band_[static_cast<size_t>(i) * w + (k - i + bw_)] * xi;
        }
    }
    return b;
}

namespace {

// Removes the component along constants (the singular direction of the
// pure-Neumann operator).
void project_out_constant(Vector& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    for (double& x : v) x -= mean;
}

void apply_weighted_mean_zero(Vector& x, const Vector& weights) {
    if (weights.empty()) {
        project_out_constant(x);
        return;
    }
    double wx = 0.0, wsum = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        wx += weights[i] * x[i];
        wsum += weights[i];
    }
    const double shift = wx / wsum;
    for (double& xi : x) xi -= shift;
}

Vector jacobi_inverse_diagonal(const SparseMatrix& A) {
    Vector d = A.diagonal();
    for (double& v : d) v = (std::abs(v) > 0.0) ? 1.0 / v : 1.0;
    return d;
}

} // namespace

SolveResult solve(const SparseMatrix& A, const Vector& b_in, const SolverConfig& cfg,
                  const std::optional<NullspaceMeanZero>& nullspace,
                  const Vector* initial_guess, const BandCholesky* preconditioner) {
    if (A.n_rows() != A.n_cols() || static_cast<int>(b_in.size()) != A.n_rows()) {
        throw std::invalid_argument("solve: dimension mismatch");
    }
    const int n = A.n_rows();
    const int max_iters = cfg.max_iters > 0 ? cfg.max_iters : 10 * n;
    const bool singular = nullspace.has_value();

    Vector b = b_in;
    if (singular) project_out_constant(b);

    const double bnorm = norm2(b);
    SolveResult out;
    out.x.assign(n, 0.0);
    if (bnorm == 0.0 && !initial_guess) {
        out.converged = true;
        return out;
    }
    if (initial_guess) {
        out.x = *initial_guess;
        if (singular) project_out_constant(out.x);
    }
    const double tol = cfg.rel_tol * (bnorm > 0.0 ? bnorm : 1.0);
    const Vector inv_diag = jacobi_inverse_diagonal(A);

    auto residual_of = [&](const Vector& x) {
        Vector r = b;
        axpy(-1.0, A.multiply(x), r);
        if (singular) project_out_constant(r);
        return r;
    };

    auto apply_precond = [&](const Vector& r) {
        Vector z;
        if (preconditioner) {
            z = preconditioner->solve(r);
        } else {
            z.resize(n);
            for (int i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
        }
        if (singular) project_out_constant(z);
        return z;
    };

    if (cfg.method == SolverMethod::cg) {
        Vector r = residual_of(out.x);
        Vector z = apply_precond(r);
        Vector p = z;
        double rz = dot(r, z);
        for (int it = 0; it < max_iters; ++it) {
            // Residual replacement: the recursive residual drifts from
            // the true one over long runs and can stall just above the
            // tolerance. Refreshing r (keeping the search direction)
            // restores the attainable accuracy.
            if (it > 0 && it % 100 == 0) {
                r = residual_of(out.x);
                z = apply_precond(r);
                rz = dot(r, z);
            }
            if (norm2(r) <= tol) break;
            Vector Ap = A.multiply(p);
            if (singular) project_out_constant(Ap);
            const double alpha = rz / dot(p, Ap);
            axpy(alpha, p, out.x);
            axpy(-alpha, Ap, r);
            if (singular) project_out_constant(r);
            z = apply_precond(r);
            const double rz_new = dot(r, z);
            const double beta = rz_new / rz;
            rz = rz_new;
            for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
            out.iterations = it + 1;
        }
    } else {
        // BiCGStab with Jacobi preconditioning. Breakdowns (orthogonal
        // shadow residual, zero curvature) restart from the true
        // residual instead of propagating inf/nan.
        Vector r = residual_of(out.x);
        Vector r0 = r;
        Vector p(n, 0.0), v(n, 0.0);
        double rho = 1.0, alpha = 1.0, omega = 1.0;
        auto restart = [&] {
            r = residual_of(out.x);
            r0 = r;
            rho = 1.0;
            alpha = 1.0;
            omega = 1.0;
            std::fill(p.begin(), p.end(), 0.0);
            std::fill(v.begin(), v.end(), 0.0);
        };
        for (int it = 0; it < max_iters; ++it) {
            if (norm2(r) <= tol) break;
            const double rho_new = dot(r0, r);
            if (std::abs(rho_new) < 1e-300 || !std::isfinite(rho_new)) {
                restart();
                continue;
            }
            const double beta = (rho_new / rho) * (alpha / omega);
            rho = rho_new;
            for (int i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
            Vector ph(n);
            for (int i = 0; i < n; ++i) ph[i] = inv_diag[i] * p[i];
            v = A.multiply(ph);
            const double r0v = dot(r0, v);
            if (std::abs(r0v) < 1e-300 || !std::isfinite(r0v)) {
                restart();
                continue;
            }
            alpha = rho / r0v;
            Vector s = r;
            axpy(-alpha, v, s);
            axpy(alpha, ph, out.x);
            out.iterations = it + 1;
            if (norm2(s) <= tol) {
                r = s;
                break;
            }
            Vector sh(n);
            for (int i = 0; i < n; ++i) sh[i] = inv_diag[i] * s[i];
            Vector t = A.multiply(sh);
            const double tt = dot(t, t);
            omega = tt > 0.0 ? dot(t, s) / tt : 0.0;
            axpy(omega, sh, out.x);
            r = s;
            axpy(-omega, t, r);
            if (omega == 0.0 || !std::isfinite(omega) || !std::isfinite(norm2(r))) {
                restart();
            }
        }
    }

    Vector r = residual_of(out.x);
    out.residual = norm2(r);
    out.converged = out.residual <= tol * (1.0 + 1e-12) || bnorm == 0.0;
    if (singular) apply_weighted_mean_zero(out.x, nullspace->weights);
    if (!out.converged) {
        out.message = "solve: no convergence in " + std::to_string(max_iters) +
                      " iterations, residual " + std::to_string(out.residual);
        throw std::runtime_error(out.message);
    }
    return out;
}

std::pair<SparseMatrix, Vector> apply_dirichlet(const SparseMatrix& A, const Vector& b,
                                                std::span<const int> dofs,
                                                std::span<const double> values) {
    const int n = A.n_rows();
    std::unordered_map<int, double> constrained;
    for (size_t k = 0; k < dofs.size(); ++k) {
        const int d = dofs[k];
        if (d < 0 || d >= n) {
            throw std::out_of_range("apply_dirichlet: dof out of range");
        }
        const double v = k < values.size() ? values[k] : 0.0;
        auto [it, inserted] = constrained.try_emplace(d, v);
        if (!inserted && it->second != v) {
            throw std::invalid_argument("apply_dirichlet: conflicting values for dof");
        }
    }

    Vector b_out = b;
    TripletBuffer buf;
    for (int r = 0; r < n; ++r) {
        const bool r_con = constrained.contains(r);
        if (r_con) {
            buf.add(r, r, 1.0);
            b_out[r] = constrained.at(r);
            continue;
        }
        for (int k = A.row_offsets()[r]; k < A.row_offsets()[r + 1]; ++k) {
            const int c = A.col_indices()[k];
            const double v = A.values()[k];
            auto it = constrained.find(c);
            if (it != constrained.end()) {
                b_out[r] -= v * it->second;
            } else {
                buf.add(r, c, v);
            }
        }
    }
    return {SparseMatrix::from_triplets(buf, n, n), std::move(b_out)};
}

} // namespace chns
