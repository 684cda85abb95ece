#include "bmg/linalg.hpp"

#include <algorithm>
#include <cassert>
#include <limits>

namespace bmg {

// ---------------------------------------------------------------- dense part

ScalarMatrix ScalarMatrix::identity(CoeffSpec spec, int n) {
    ScalarMatrix m(spec, n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = Scalar::one(spec);
    return m;
}

ScalarMatrix ScalarMatrix::operator*(const ScalarMatrix& o) const {
    assert(cols_ == o.rows_);
    ScalarMatrix out(spec_, rows_, o.cols_);
    for (int i = 0; i < rows_; ++i)
        for (int k = 0; k < cols_; ++k) {
            const Scalar& aik = at(i, k);
            if (aik.is_zero()) continue;
            for (int j = 0; j < o.cols_; ++j) {
                const Scalar& bkj = o.at(k, j);
                if (!bkj.is_zero()) out.at(i, j) += aik * bkj;
            }
        }
    return out;
}

std::vector<Scalar> ScalarMatrix::apply(const std::vector<Scalar>& v) const {
    assert(static_cast<int>(v.size()) == cols_);
    std::vector<Scalar> out(rows_, Scalar::zero(spec_));
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j)
            if (!at(i, j).is_zero() && !v[j].is_zero()) out[i] += at(i, j) * v[j];
    return out;
}

bool ScalarMatrix::operator==(const ScalarMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) return false;
    for (size_t i = 0; i < a_.size(); ++i)
        if (a_[i] != o.a_[i]) return false;
    return true;
}

bool ScalarMatrix::is_zero() const {
    for (const auto& s : a_)
        if (!s.is_zero()) return false;
    return true;
}

namespace {

long val_of(const Scalar& s) { return s.spec().is_field() ? 0 : s.p_valuation(); }

} // namespace

SNFResult smith_normal_form(const ScalarMatrix& A) {
    const CoeffSpec spec = A.spec();
    int m = A.rows(), n = A.cols();
    ScalarMatrix D = A;
    ScalarMatrix U = ScalarMatrix::identity(spec, m);
    ScalarMatrix V = ScalarMatrix::identity(spec, n);

    int t = 0;
    while (t < m && t < n) {
        // Pivot: minimal p-valuation in D[t.., t..], ties broken row-major.
        int pi = -1, pj = -1;
        long best = std::numeric_limits<long>::max();
        for (int i = t; i < m; ++i) {
            for (int j = t; j < n; ++j) {
                if (D.at(i, j).is_zero()) continue;
                long v = val_of(D.at(i, j));
                if (v < best) { best = v; pi = i; pj = j; }
            }
            if (best == 0) break;
        }
        if (pi < 0) break;
        if (pi != t) { for (int j = 0; j < n; ++j) std::swap(D.at(t, j), D.at(pi, j));
                       for (int j = 0; j < m; ++j) std::swap(U.at(t, j), U.at(pi, j)); }
        if (pj != t) { for (int i = 0; i < m; ++i) std::swap(D.at(i, t), D.at(i, pj));
                       for (int i = 0; i < n; ++i) std::swap(V.at(i, t), V.at(i, pj)); }
        const Scalar piv = D.at(t, t);
        // Clear column t by row ops, then row t by column ops. The pivot has
        // minimal valuation in the submatrix, so every division is exact.
        for (int i = t + 1; i < m; ++i) {
            if (D.at(i, t).is_zero()) continue;
            Scalar f = D.at(i, t) / piv;
            for (int j = 0; j < n; ++j) if (!D.at(t, j).is_zero()) D.at(i, j) -= f * D.at(t, j);
            for (int j = 0; j < m; ++j) if (!U.at(t, j).is_zero()) U.at(i, j) -= f * U.at(t, j);
        }
        for (int j = t + 1; j < n; ++j) {
            if (D.at(t, j).is_zero()) continue;
            Scalar f = D.at(t, j) / piv;
            for (int i = 0; i < n; ++i) if (!V.at(i, t).is_zero()) V.at(i, j) -= f * V.at(i, t);
            D.at(t, j) = Scalar::zero(spec);
        }
        // Normalize: 1 over a field, p^v over Z_(p).
        Scalar unit = piv;
        if (!spec.is_field()) {
            long v = piv.p_valuation();
            Scalar pv = Scalar::one(spec);
            Scalar pp = Scalar::from_int(spec, static_cast<long>(spec.p));
            for (long k = 0; k < v; ++k) pv *= pp;
            unit = piv / pv;
        }
        Scalar ui = unit.inverse();
        for (int j = t; j < n; ++j) if (!D.at(t, j).is_zero()) D.at(t, j) *= ui;
        for (int j = 0; j < m; ++j) if (!U.at(t, j).is_zero()) U.at(t, j) *= ui;
        ++t;
    }
    SNFResult out{std::move(U), std::move(D), std::move(V), {}};
    for (int i = 0; i < t; ++i) out.diagonal.push_back(out.D.at(i, i));
    return out;
}

// ---------------------------------------------------------------- sparse part

const Scalar* SparseVec::find(int col) const {
    auto it = std::lower_bound(e.begin(), e.end(), col,
                               [](const std::pair<int, Scalar>& a, int c) { return a.first < c; });
    if (it != e.end() && it->first == col) return &it->second;
    return nullptr;
}

void SparseVec::axpy(const Scalar& c, const SparseVec& o, CoeffSpec spec) {
    if (c.is_zero() || o.e.empty()) return;
    std::vector<std::pair<int, Scalar>> merged;
    merged.reserve(e.size() + o.e.size());
    size_t i = 0, j = 0;
    while (i < e.size() || j < o.e.size()) {
        if (j == o.e.size() || (i < e.size() && e[i].first < o.e[j].first)) {
            merged.push_back(std::move(e[i++]));
        } else if (i == e.size() || o.e[j].first < e[i].first) {
            merged.emplace_back(o.e[j].first, c * o.e[j].second);
            ++j;
        } else {
            Scalar s = e[i].second + c * o.e[j].second;
            if (!s.is_zero()) merged.emplace_back(e[i].first, std::move(s));
            ++i; ++j;
        }
    }
    e = std::move(merged);
    (void)spec;
}

void SparseVec::scale(const Scalar& c) {
    if (c.is_zero()) { e.clear(); return; }
    for (auto& p : e) p.second *= c;
}

void SparseMat::set(int i, int j, Scalar v) {
    auto& row = r_[i].e;
    auto it = std::lower_bound(row.begin(), row.end(), j,
                               [](const std::pair<int, Scalar>& a, int c) { return a.first < c; });
    if (it != row.end() && it->first == j) {
        if (v.is_zero()) row.erase(it);
        else it->second = std::move(v);
    } else if (!v.is_zero()) {
        row.insert(it, {j, std::move(v)});
    }
}

Scalar SparseMat::get(int i, int j) const {
    const Scalar* s = r_[i].find(j);
    return s ? *s : Scalar::zero(spec_);
}

long SparseMat::nnz() const {
    long n = 0;
    for (const auto& row : r_) n += row.nnz();
    return n;
}

SparseMat SparseMat::from_dense(const ScalarMatrix& A) {
    SparseMat out(A.spec(), A.rows(), A.cols());
    for (int i = 0; i < A.rows(); ++i)
        for (int j = 0; j < A.cols(); ++j)
            if (!A.at(i, j).is_zero()) out.r_[i].e.emplace_back(j, A.at(i, j));
    return out;
}

ScalarMatrix SparseMat::to_dense() const {
    ScalarMatrix out(spec_, rows_, cols_);
    for (int i = 0; i < rows_; ++i)
        for (const auto& [j, v] : r_[i].e) out.at(i, j) = v;
    return out;
}

SparseMat SparseMat::transpose() const {
    SparseMat out(spec_, cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (const auto& [j, v] : r_[i].e) out.r_[j].e.emplace_back(i, v);
    return out;
}

SparseMat SparseMat::operator*(const SparseMat& o) const {
    assert(cols_ == o.rows_);
    SparseMat out(spec_, rows_, o.cols_);
    for (int i = 0; i < rows_; ++i) {
        SparseVec acc;
        for (const auto& [k, v] : r_[i].e) acc.axpy(v, o.r_[k], spec_);
        out.r_[i] = std::move(acc);
    }
    return out;
}

bool SparseMat::operator==(const SparseMat& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) return false;
    for (int i = 0; i < rows_; ++i) {
        if (r_[i].e.size() != o.r_[i].e.size()) return false;
        for (size_t k = 0; k < r_[i].e.size(); ++k)
            if (r_[i].e[k].first != o.r_[i].e[k].first || r_[i].e[k].second != o.r_[i].e[k].second)
                return false;
    }
    return true;
}

std::vector<Scalar> SparseMat::apply(const std::vector<Scalar>& v) const {
    assert(static_cast<int>(v.size()) == cols_);
    std::vector<Scalar> out(rows_, Scalar::zero(spec_));
    for (int i = 0; i < rows_; ++i)
        for (const auto& [j, c] : r_[i].e)
            if (!v[j].is_zero()) out[i] += c * v[j];
    return out;
}

void SparseMat::paste(const SparseMat& block, int i0, int j0) {
    assert(i0 + block.rows_ <= rows_ && j0 + block.cols_ <= cols_);
    for (int i = 0; i < block.rows_; ++i)
        for (const auto& [j, v] : block.r_[i].e) set(i0 + i, j0 + j, v);
}

namespace {

// Forward-only echelon. Pivot selection minimizes (p-valuation, row support,
// row index) globally and takes the leftmost minimal-valuation column in the
// chosen row; only unprocessed rows are reduced. Two consequences over Z_(p):
// every elimination step divides by a pivot of globally minimal valuation
// (exact in the ring), and back-substitution against the echelon stays in the
// ring because a processed row is never touched again.
struct Echelon {
    SparseMat m;
    std::vector<std::pair<int, int>> pivots; // (row, col) in processing order
};

Echelon forward_echelon(SparseMat A, int pivot_cols_limit) {
    const CoeffSpec spec = A.spec();
    const int m = A.rows();
    std::vector<bool> done(m, false);
    std::vector<long> minval(m, -1); // -1 = stale
    Echelon out;

    auto row_min_val = [&](const SparseVec& row) {
        long best = std::numeric_limits<long>::max();
        for (const auto& [c, v] : row.e) {
            if (c >= pivot_cols_limit) break;
            long w = spec.is_field() ? 0 : v.p_valuation();
            if (w < best) { best = w; if (!best) break; }
        }
        return best;
    };

    for (;;) {
        int best_row = -1;
        long best_val = std::numeric_limits<long>::max();
        int best_nnz = std::numeric_limits<int>::max();
        for (int i = 0; i < m; ++i) {
            if (done[i] || A.row(i).e.empty()) continue;
            if (minval[i] < 0) minval[i] = row_min_val(A.row(i));
            if (minval[i] == std::numeric_limits<long>::max()) continue;
            int z = A.row(i).nnz();
            if (minval[i] < best_val || (minval[i] == best_val && z < best_nnz)) {
                best_val = minval[i]; best_nnz = z; best_row = i;
            }
        }
        if (best_row < 0) break;
        int pc = -1;
        for (const auto& [c, v] : A.row(best_row).e) {
            if (c >= pivot_cols_limit) break;
            long w = spec.is_field() ? 0 : v.p_valuation();
            if (w == best_val) { pc = c; break; }
        }
        Scalar piv = *A.row(best_row).find(pc);
        done[best_row] = true;
        out.pivots.emplace_back(best_row, pc);
        for (int i = 0; i < m; ++i) {
            if (done[i] || A.row(i).e.empty()) continue;
            const Scalar* e = A.row(i).find(pc);
            if (!e) continue;
            Scalar f = -(*e / piv);
            A.row(i).axpy(f, A.row(best_row), spec);
            minval[i] = -1;
        }
    }
    out.m = std::move(A);
    return out;
}

} // namespace

EchelonResult sparse_echelon(SparseMat A) {
    Echelon e = forward_echelon(std::move(A), std::numeric_limits<int>::max());
    EchelonResult out{std::move(e.m), std::move(e.pivots)};
    std::sort(out.pivots.begin(), out.pivots.end(),
              [](const auto& a, const auto& b) { return a.second < b.second; });
    return out;
}

SparseMat sparse_kernel(const SparseMat& A) {
    const CoeffSpec spec = A.spec();
    const int n = A.cols();
    Echelon E = forward_echelon(A, n);

    std::vector<bool> is_pivot_col(n, false);
    for (const auto& [r, c] : E.pivots) is_pivot_col[c] = true;
    std::vector<int> free_cols;
    for (int c = 0; c < n; ++c)
        if (!is_pivot_col[c]) free_cols.push_back(c);

    // X holds kernel vectors as columns, stored by coordinate row. Free
    // coordinates carry the identity; pivot coordinates are filled by
    // back-substitution in reverse pivot order (a pivot row only references
    // free columns and pivots processed after it).
    SparseMat X(spec, n, static_cast<int>(free_cols.size()));
    for (size_t k = 0; k < free_cols.size(); ++k)
        X.set(free_cols[k], static_cast<int>(k), Scalar::one(spec));
    for (auto it = E.pivots.rbegin(); it != E.pivots.rend(); ++it) {
        const auto& [r, pc] = *it;
        const Scalar* piv = E.m.row(r).find(pc);
        SparseVec s;
        for (const auto& [c, a] : E.m.row(r).e) {
            if (c == pc) continue;
            s.axpy(a, X.row(c), spec);
        }
        // Divide entrywise: every numerator inherits the pivot row's
        // valuation bound, so the quotients stay in the ring.
        for (auto& [c, v] : s.e) v = -(v / *piv);
        X.row(pc) = std::move(s);
    }
    return X;
}

SparseMat sparse_column_basis(const SparseMat& A) {
    const CoeffSpec spec = A.spec();
    SparseMat T = A.transpose(); // rows index original columns
    Echelon E = forward_echelon(std::move(T), std::numeric_limits<int>::max());
    // Row ops are ring-invertible, so surviving rows generate the same module
    // as the original columns; distinct pivot positions make them a basis.
    std::vector<std::pair<int, int>> piv = E.pivots;
    std::sort(piv.begin(), piv.end(), [](const auto& a, const auto& b) { return a.second < b.second; });
    SparseMat out(spec, A.rows(), static_cast<int>(piv.size()));
    for (size_t k = 0; k < piv.size(); ++k)
        for (const auto& [c, v] : E.m.row(piv[k].first).e)
            out.set(c, static_cast<int>(k), v);
    return out;
}

std::optional<SparseMat> sparse_solve(const SparseMat& A, const SparseMat& B) {
    assert(A.rows() == B.rows());
    const CoeffSpec spec = A.spec();
    const int n = A.cols(), nb = B.cols();
    SparseMat M(spec, A.rows(), n + nb);
    M.paste(A, 0, 0);
    M.paste(B, 0, n);
    Echelon E = forward_echelon(std::move(M), n);

    // Any row that never produced a pivot must be zero on the A part; if it
    // still has B entries the system is inconsistent.
    std::vector<bool> pivotal(E.m.rows(), false);
    for (const auto& [r, c] : E.pivots) pivotal[r] = true;
    for (int i = 0; i < E.m.rows(); ++i) {
        if (pivotal[i]) continue;
        for (const auto& [c, v] : E.m.row(i).e)
            if (c < n) return std::nullopt; // echelon failed to clear: rank logic error
            else if (!v.is_zero()) return std::nullopt;
    }

    // Back-substitute all right-hand sides at once; free variables are 0.
    SparseMat X(spec, n, nb);
    for (auto it = E.pivots.rbegin(); it != E.pivots.rend(); ++it) {
        const auto& [r, pc] = *it;
        const Scalar* piv = E.m.row(r).find(pc);
        SparseVec rhs;
        for (const auto& [c, a] : E.m.row(r).e) {
            if (c < n) continue;
            rhs.e.emplace_back(c - n, a);
        }
        for (const auto& [c, a] : E.m.row(r).e) {
            if (c >= n || c == pc) continue;
            rhs.axpy(-a, X.row(c), spec);
        }
        if (!spec.is_field()) {
            long pval = piv->p_valuation();
            for (const auto& [c, v] : rhs.e)
                if (v.p_valuation() < pval) return std::nullopt;
        }
        for (auto& [c, v] : rhs.e) v = v / *piv;
        X.row(pc) = std::move(rhs);
    }
    return X;
}

int sparse_rank(const SparseMat& A) {
    return static_cast<int>(forward_echelon(A, A.cols()).pivots.size());
}

std::vector<std::vector<Scalar>> kernel_basis(const ScalarMatrix& A) {
    SparseMat K = sparse_kernel(SparseMat::from_dense(A));
    std::vector<std::vector<Scalar>> out(K.cols(), std::vector<Scalar>(A.cols(), Scalar::zero(A.spec())));
    for (int i = 0; i < K.rows(); ++i)
        for (const auto& [j, v] : K.row(i).e) out[j][i] = v;
    return out;
}

std::optional<std::vector<Scalar>> solve_linear(const ScalarMatrix& A, const std::vector<Scalar>& b) {
    SparseMat B(A.spec(), A.rows(), 1);
    for (int i = 0; i < A.rows(); ++i) B.set(i, 0, b[i]);
    auto X = sparse_solve(SparseMat::from_dense(A), B);
    if (!X) return std::nullopt;
    std::vector<Scalar> out(A.cols(), Scalar::zero(A.spec()));
    for (int i = 0; i < A.cols(); ++i) out[i] = X->get(i, 0);
    return out;
}

} // namespace bmg
