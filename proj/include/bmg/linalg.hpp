#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "bmg/scalar.hpp"

namespace bmg {

// Dense matrix over one coefficient ring. Row-major.
class ScalarMatrix {
public:
    ScalarMatrix() = default;
    ScalarMatrix(CoeffSpec spec, int rows, int cols)
        : spec_(spec), rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols, Scalar::zero(spec)) {}

    static ScalarMatrix identity(CoeffSpec spec, int n);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    const CoeffSpec& spec() const { return spec_; }
    Scalar& at(int i, int j) { return a_[static_cast<size_t>(i) * cols_ + j]; }
    const Scalar& at(int i, int j) const { return a_[static_cast<size_t>(i) * cols_ + j]; }

    ScalarMatrix operator*(const ScalarMatrix& o) const;
    std::vector<Scalar> apply(const std::vector<Scalar>& v) const;
    bool operator==(const ScalarMatrix& o) const;

    bool is_zero() const;

private:
    CoeffSpec spec_{};
    int rows_ = 0, cols_ = 0;
    std::vector<Scalar> a_;
};

struct SNFResult {
    ScalarMatrix U, D, V;           // U * A * V == D, U and V ring-invertible
    std::vector<Scalar> diagonal;   // nonzero invariant factors, valuations ascending
};

// Pivot choice: minimal p-valuation, ties broken by row-major position. Over a
// field the diagonal is normalized to 1; over Z_(p) to powers of p.
SNFResult smith_normal_form(const ScalarMatrix& A);

// Basis of {v : A v = 0} as column vectors. Over Z_(p) the result is a basis
// of the full kernel lattice (a saturated, hence free, direct summand).
std::vector<std::vector<Scalar>> kernel_basis(const ScalarMatrix& A);

// One solution of A x = b within the ring, or nullopt when none exists.
std::optional<std::vector<Scalar>> solve_linear(const ScalarMatrix& A, const std::vector<Scalar>& b);

// ----------------------------------------------------------------------------
// Sparse machinery used by the graded-module pipeline. Rows are sorted by
// column index. All routines are deterministic: pivot selection minimizes
// (p-valuation, row support size, row index) and takes the leftmost column.

struct SparseVec {
    std::vector<std::pair<int, Scalar>> e;

    const Scalar* find(int col) const;
    void axpy(const Scalar& c, const SparseVec& o, CoeffSpec spec); // *this += c*o
    void scale(const Scalar& c);
    int nnz() const { return static_cast<int>(e.size()); }
};

class SparseMat {
public:
    SparseMat() = default;
    SparseMat(CoeffSpec spec, int rows, int cols) : spec_(spec), rows_(rows), cols_(cols), r_(rows) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    const CoeffSpec& spec() const { return spec_; }
    SparseVec& row(int i) { return r_[i]; }
    const SparseVec& row(int i) const { return r_[i]; }
    void set(int i, int j, Scalar v);
    Scalar get(int i, int j) const;
    long nnz() const;

    static SparseMat from_dense(const ScalarMatrix& A);
    ScalarMatrix to_dense() const;
    SparseMat transpose() const;
    SparseMat operator*(const SparseMat& o) const;
    bool operator==(const SparseMat& o) const;

    std::vector<Scalar> apply(const std::vector<Scalar>& v) const;

    // Paste `block` with its (0,0) at (i0,j0).
    void paste(const SparseMat& block, int i0, int j0);

private:
    CoeffSpec spec_{};
    int rows_ = 0, cols_ = 0;
    std::vector<SparseVec> r_;
};

struct EchelonResult {
    SparseMat m;                      // echelon rows, pivots unnormalized
    std::vector<std::pair<int, int>> pivots; // (row, col), sorted by col
};

// Forward elimination only (processed rows are never modified again), which
// keeps every division exact over Z_(p).
EchelonResult sparse_echelon(SparseMat A);

// Kernel basis as columns, one per free column, in free-column order; carries
// the identity on free coordinates (so over Z_(p) it spans the full kernel
// lattice).
SparseMat sparse_kernel(const SparseMat& A);

// Basis of the column span as a module over the ring (not saturated over
// Z_(p)). Columns come out in echelon form, pivot rows increasing.
SparseMat sparse_column_basis(const SparseMat& A);

// Solve A X = B columnwise within the ring; nullopt if any column fails.
std::optional<SparseMat> sparse_solve(const SparseMat& A, const SparseMat& B);

int sparse_rank(const SparseMat& A);

} // namespace bmg
