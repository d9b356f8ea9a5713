#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace chns {

using Vector = std::vector<double>;

struct TripletBuffer {
    std::vector<int> rows;
    std::vector<int> cols;
    std::vector<double> vals;

    void add(int r, int c, double v) {
        rows.push_back(r);
        cols.push_back(c);
        vals.push_back(v);
    }
    size_t size() const { return vals.size(); }
};

/// Compressed-row sparse matrix; duplicates in the source triplets are
/// summed, column indices strictly increasing within each row.
class SparseMatrix {
  public:
    SparseMatrix() = default;
    static SparseMatrix from_triplets(const TripletBuffer& buf, int n_rows, int n_cols);

    int n_rows() const { return n_rows_; }
    int n_cols() const { return n_cols_; }
    const std::vector<int>& row_offsets() const { return row_offsets_; }
    const std::vector<int>& col_indices() const { return col_indices_; }
    const std::vector<double>& values() const { return values_; }

    Vector multiply(const Vector& x) const;
    // y += s * A^T x
    void add_transpose_multiply(const Vector& x, double s, Vector& y) const;
    Vector diagonal() const;
    /// Copy with entry (r, c) multiplied by row_mult[r] * col_mult[c];
    /// keeps the sparsity pattern, no re-sorting.
    SparseMatrix scaled(const Vector& row_mult, const Vector& col_mult) const;

  private:
    int n_rows_ = 0;
    int n_cols_ = 0;
    std::vector<int> row_offsets_;
    std::vector<int> col_indices_;
    std::vector<double> values_;
};

Vector spmv(const SparseMatrix& A, const Vector& x);

/// Banded Cholesky factorization of an SPD matrix, used as a CG
/// preconditioner for operators whose bandwidth is small (structured
/// meshes). `shift` is added to the diagonal before factoring, which
/// permits (nearly) singular operators such as the pure-Neumann
/// stiffness matrix.
class BandCholesky {
  public:
    BandCholesky(const SparseMatrix& A, double shift = 0.0);
    Vector solve(Vector b) const;
    int bandwidth() const { return bw_; }

  private:
    int n_ = 0;
    int bw_ = 0;
    std::vector<double> band_; // lower triangle, band_[i*(bw_+1) + (j-i+bw_)]
};

enum class SolverMethod { cg, bicgstab };

struct SolverConfig {
    double rel_tol = 1e-10;
    int max_iters = 0; // 0 means 10 * n
    SolverMethod method = SolverMethod::cg;
};

struct NullspaceMeanZero {
    // Optional weights for the returned representative's zero mean (e.g.
    // a lumped mass vector); uniform when empty. RHS consistency is
    // enforced by projecting out the constant component.
    Vector weights;
};

struct SolveResult {
    Vector x;
    int iterations = 0;
    double residual = 0.0; // true residual norm, recomputed
    bool converged = false;
    std::string message;
};

/// Preconditioned CG / BiCGStab (Jacobi by default; CG accepts an
/// optional banded-Cholesky preconditioner). Throws std::runtime_error
/// on non-convergence, with the final residual in the message.
SolveResult solve(const SparseMatrix& A, const Vector& b, const SolverConfig& cfg,
                  const std::optional<NullspaceMeanZero>& nullspace = std::nullopt,
                  const Vector* initial_guess = nullptr,
                  const BandCholesky* preconditioner = nullptr);

/// Symmetric Dirichlet elimination: constrained rows/columns are replaced
/// by identity, the right-hand side absorbs the coupling, and b at the
/// constrained dofs is set to the prescribed value.
std::pair<SparseMatrix, Vector> apply_dirichlet(const SparseMatrix& A, const Vector& b,
                                                std::span<const int> dofs,
                                                std::span<const double> values);

double dot(const Vector& a, const Vector& b);
double norm2(const Vector& a);
void axpy(double s, const Vector& x, Vector& y); // y += s*x

} // namespace chns
