#include "bmg/graded.hpp"

#include <cassert>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace bmg {

QPolynomial FreeGradedModule::graded_rank() const {
    QPolynomial r;
    for (int d : gens) {
        if (d % 2 != 0) throw std::logic_error("graded rank is defined for even degrees only");
        r.set_coeff(d / 2, r.coeff(d / 2) + 1);
    }
    return r;
}

SparseVec DegreewiseModule::apply_mu(int i, int d, const SparseVec& v) const {
    assert(in_window(d) && in_window(d + 2));
    const SparseMat& m = mu_at(i, d);
    SparseVec out;
    SparseMat col(spec, m.cols(), 1);
    for (const auto& [c, s] : v.e) col.set(c, 0, s);
    SparseMat res = m * col;
    for (int r = 0; r < res.rows(); ++r) {
        const Scalar* s = res.row(r).find(0);
        if (s) out.e.emplace_back(r, *s);
    }
    return out;
}

SparseVec DegreewiseModule::apply_monomial(const Exponents& m, int d, SparseVec v) const {
    int cur = d;
    for (int i = 0; i < rank; ++i)
        for (int k = 0; k < m[i]; ++k) {
            v = apply_mu(i, cur, v);
            cur += 2;
        }
    return v;
}

std::vector<std::pair<int, int>> DegreewiseModule::dimension_table() const {
    std::vector<std::pair<int, int>> out;
    for (int d = lo; d <= hi; ++d)
        if (dim_at(d)) out.emplace_back(d, dim_at(d));
    return out;
}

int FreeExpansion::index_of(int d, int gen, const Exponents& e) const {
    if (!M.in_window(d)) return -1;
    const auto& m = idx_[d - M.lo];
    auto it = m.find({gen, e});
    return it == m.end() ? -1 : it->second;
}

FreeExpansion expand_free(const FreeGradedModule& f, int lo, int hi) {
    FreeExpansion out;
    out.shape = f;
    DegreewiseModule& M = out.M;
    M.spec = f.spec;
    M.rank = f.rank;
    M.lo = lo;
    M.hi = hi;
    const int n = hi - lo + 1;
    M.dims.assign(n, 0);
    out.basis.resize(n);
    out.idx_.resize(n);
    for (int d = lo; d <= hi; ++d) {
        auto& b = out.basis[d - lo];
        for (int j = 0; j < f.total_rank(); ++j) {
            for (const auto& e : monomial_basis(f.rank, d - f.gens[j])) {
                out.idx_[d - lo][{j, e}] = static_cast<int>(b.size());
                b.emplace_back(j, e);
            }
        }
        M.dims[d - lo] = static_cast<int>(b.size());
    }
    M.mu.assign(f.rank, {});
    for (int i = 0; i < f.rank; ++i) {
        M.mu[i].resize(n);
        for (int d = lo; d + 2 <= hi; ++d) {
            SparseMat m(f.spec, M.dims[d + 2 - lo], M.dims[d - lo]);
            const auto& b = out.basis[d - lo];
            for (size_t c = 0; c < b.size(); ++c) {
                Exponents e = b[c].second;
                e[i] += 1;
                int r = out.index_of(d + 2, b[c].first, e);
                assert(r >= 0);
                m.set(r, static_cast<int>(c), Scalar::one(f.spec));
            }
            M.mu[i][d - lo] = std::move(m);
        }
    }
    return out;
}

namespace {

// Rewriting of a monomial modulo a degree-2 relation with invertible
// coordinate u: t_u is replaced by -(1/c_u) * sum_{i != u} c_i t_i.
struct MonomialReducer {
    CoeffSpec spec;
    int rank;
    int u;
    std::vector<Scalar> coef; // -c_i / c_u
    std::map<Exponents, std::map<Exponents, Scalar, MonomialOrder>> memo;

    const std::map<Exponents, Scalar, MonomialOrder>& reduce(const Exponents& m) {
        auto it = memo.find(m);
        if (it != memo.end()) return it->second;
        std::map<Exponents, Scalar, MonomialOrder> r;
        if (m[u] == 0) {
            r.emplace(m, Scalar::one(spec));
        } else {
            Exponents base = m;
            base[u] -= 1;
            for (int i = 0; i < rank; ++i) {
                if (i == u || coef[i].is_zero()) continue;
                Exponents nxt = base;
                nxt[i] += 1;
                for (const auto& [e, c] : reduce(nxt)) {
                    Scalar v = c * coef[i];
                    auto jt = r.find(e);
                    if (jt == r.end()) r.emplace(e, v);
                    else {
                        jt->second += v;
                        if (jt->second.is_zero()) r.erase(jt);
                    }
                }
            }
        }
        return memo.emplace(m, std::move(r)).first->second;
    }
};

} // namespace

LinearQuotient quotient_by_linear_form(const FreeExpansion& F, const Weight& alpha) {
    const CoeffSpec spec = F.shape.spec;
    const int rank = F.shape.rank;
    int u = weight_unit_coordinate(spec, alpha);
    if (u < 0)
        throw refusal_error("A4b violation: label not primitive over k (label " +
                            weight_str(alpha) + " over " + spec.str() + ")");
    MonomialReducer red;
    red.spec = spec;
    red.rank = rank;
    red.u = u;
    Scalar cu = Scalar::from_int(spec, alpha[u]);
    for (long a : alpha) red.coef.push_back(-(Scalar::from_int(spec, a) / cu));

    LinearQuotient out;
    out.unit_idx = u;
    DegreewiseModule& M = out.M;
    M.spec = spec;
    M.rank = rank;
    M.lo = F.M.lo;
    M.hi = F.M.hi;
    const int n = M.hi - M.lo + 1;
    M.dims.assign(n, 0);
    out.basis.resize(n);
    std::vector<std::map<std::pair<int, Exponents>, int>> qidx(n);
    for (int d = M.lo; d <= M.hi; ++d) {
        auto& b = out.basis[d - M.lo];
        for (const auto& [j, e] : F.basis[d - M.lo]) {
            if (e[u] != 0) continue;
            qidx[d - M.lo][{j, e}] = static_cast<int>(b.size());
            b.push_back({j, e});
        }
        M.dims[d - M.lo] = static_cast<int>(b.size());
    }
    out.proj.resize(n);
    for (int d = M.lo; d <= M.hi; ++d) {
        const auto& src = F.basis[d - M.lo];
        SparseMat P(spec, M.dims[d - M.lo], static_cast<int>(src.size()));
        for (size_t c = 0; c < src.size(); ++c) {
            const auto& [j, e] = src[c];
            for (const auto& [f, s] : red.reduce(e)) {
                auto it = qidx[d - M.lo].find({j, f});
                assert(it != qidx[d - M.lo].end());
                P.set(it->second, static_cast<int>(c), s);
            }
        }
        out.proj[d - M.lo] = std::move(P);
    }
    M.mu.assign(rank, {});
    for (int i = 0; i < rank; ++i) {
        M.mu[i].resize(n);
        for (int d = M.lo; d + 2 <= M.hi; ++d) {
            SparseMat m(spec, M.dims[d + 2 - M.lo], M.dims[d - M.lo]);
            const auto& b = out.basis[d - M.lo];
            for (size_t c = 0; c < b.size(); ++c) {
                Exponents e = b[c].second;
                e[i] += 1;
                for (const auto& [f, s] : red.reduce(e)) {
                    auto it = qidx[d + 2 - M.lo].find({b[c].first, f});
                    assert(it != qidx[d + 2 - M.lo].end());
                    m.set(it->second, static_cast<int>(c), s);
                }
            }
            M.mu[i][d - M.lo] = std::move(m);
        }
    }
    return out;
}

std::vector<SparseMat> materialize_free_map(const FreeExpansion& src,
                                            const DegreewiseModule& tgt,
                                            const std::vector<SparseVec>& gen_images) {
    const CoeffSpec spec = src.shape.spec;
    assert(gen_images.size() == src.shape.gens.size());
    const int lo = src.M.lo, hi = src.M.hi;
    assert(tgt.lo == lo && tgt.hi == hi);
    std::vector<SparseMat> out(hi - lo + 1);
    std::vector<std::vector<SparseVec>> img(hi - lo + 1);
    for (int d = lo; d <= hi; ++d) {
        const auto& b = src.basis[d - lo];
        auto& cur = img[d - lo];
        cur.resize(b.size());
        for (size_t c = 0; c < b.size(); ++c) {
            const auto& [j, e] = b[c];
            if (exponents_total(e) == 0) {
                assert(src.shape.gens[j] == d);
                cur[c] = gen_images[j];
            } else {
                int i = 0;
                while (e[i] == 0) ++i;
                Exponents par = e;
                par[i] -= 1;
                int pidx = src.index_of(d - 2, j, par);
                assert(pidx >= 0);
                cur[c] = tgt.apply_mu(i, d - 2, img[d - 2 - lo][pidx]);
            }
        }
        SparseMat m(spec, tgt.dim_at(d), static_cast<int>(b.size()));
        for (size_t c = 0; c < b.size(); ++c)
            for (const auto& [r, s] : cur[c].e) m.set(r, static_cast<int>(c), s);
        out[d - lo] = std::move(m);
    }
    return out;
}

GradedSubmodule span_closure(const DegreewiseModule& A, const std::vector<SparseMat>& seeds) {
    assert(static_cast<int>(seeds.size()) == A.hi - A.lo + 1);
    GradedSubmodule W;
    W.lo = A.lo;
    W.hi = A.hi;
    W.basis.resize(seeds.size());
    for (int d = A.lo; d <= A.hi; ++d) {
        const int amb = A.dim_at(d);
        int extra = 0;
        if (d - 2 >= A.lo)
            for (int i = 0; i < A.rank; ++i) extra += W.basis[d - 2 - A.lo].cols();
        const SparseMat& s = seeds[d - A.lo];
        const int scols = s.rows() == 0 && s.cols() == 0 ? 0 : s.cols();
        if (scols) assert(s.rows() == amb);
        SparseMat cat(A.spec, amb, scols + extra);
        if (scols) cat.paste(s, 0, 0);
        int off = scols;
        if (d - 2 >= A.lo) {
            const SparseMat& prev = W.basis[d - 2 - A.lo];
            for (int i = 0; i < A.rank; ++i) {
                if (prev.cols()) cat.paste(A.mu_at(i, d - 2) * prev, 0, off);
                off += prev.cols();
            }
        }
        W.basis[d - A.lo] = sparse_column_basis(cat);
    }
    return W;
}

std::vector<int> greedy_pivot_columns(const SparseMat& A) {
    assert(A.spec().is_field());
    ScalarMatrix D = A.to_dense();
    const int m = D.rows(), n = D.cols();
    std::vector<bool> used(m, false);
    std::vector<int> pivots;
    for (int j = 0; j < n; ++j) {
        int pi = -1;
        for (int i = 0; i < m; ++i)
            if (!used[i] && !D.at(i, j).is_zero()) { pi = i; break; }
        if (pi < 0) continue;
        used[pi] = true;
        pivots.push_back(j);
        for (int i = 0; i < m; ++i) {
            if (used[i] || D.at(i, j).is_zero()) continue;
            Scalar f = D.at(i, j) / D.at(pi, j);
            for (int c = j; c < n; ++c)
                if (!D.at(pi, c).is_zero()) D.at(i, c) -= f * D.at(pi, c);
        }
    }
    return pivots;
}

namespace {

Scalar to_residue(const Scalar& s, const CoeffSpec& rspec) {
    if (s.spec().kind == CoeffKind::PLocalIntegers) return reduce_mod_p(s);
    (void)rspec;
    return s;
}

} // namespace

MinimalGenerators minimal_generators(const DegreewiseModule& A, const GradedSubmodule& W) {
    const CoeffSpec spec = A.spec;
    const CoeffSpec rspec = spec.kind == CoeffKind::PLocalIntegers
                                ? CoeffSpec::prime_field(spec.p)
                                : spec;
    MinimalGenerators out;
    out.shape.spec = spec;
    out.shape.rank = A.rank;
    for (int d = A.lo; d <= A.hi; ++d) {
        const SparseMat& Wd = W.basis[d - A.lo];
        const int rd = Wd.cols();
        if (!rd) continue;
        // Express mu_i(W_{d-2}) in the basis of W_d, reduce to the residue
        // field, and append an identity: pivot columns landing in the identity
        // block mark basis vectors that survive modulo the graded maximal
        // ideal (and p, over Z_(p)) — these are the minimal generators.
        int prev = d - 2 >= A.lo ? W.basis[d - 2 - A.lo].cols() : 0;
        SparseMat stacked(rspec, rd, A.rank * prev + rd);
        int off = 0;
        if (prev) {
            const SparseMat& Wp = W.basis[d - 2 - A.lo];
            for (int i = 0; i < A.rank; ++i) {
                auto C = sparse_solve(Wd, A.mu_at(i, d - 2) * Wp);
                assert(C && "span closure must be closed under multiplication");
                for (int r = 0; r < rd; ++r)
                    for (const auto& [c, v] : C->row(r).e) {
                        Scalar rv = to_residue(v, rspec);
                        if (!rv.is_zero()) stacked.set(r, off + c, rv);
                    }
                off += prev;
            }
        }
        for (int r = 0; r < rd; ++r) stacked.set(r, off + r, Scalar::one(rspec));
        for (int j : greedy_pivot_columns(stacked)) {
            if (j < off) continue;
            int col = j - off;
            out.shape.gens.push_back(d);
            SparseVec g;
            for (int r = 0; r < Wd.rows(); ++r) {
                const Scalar* s = Wd.row(r).find(col);
                if (s) g.e.emplace_back(r, *s);
            }
            out.gens.emplace_back(d, std::move(g));
        }
    }
    return out;
}

bool sparse_span_contains(const SparseMat& A, const SparseMat& B) {
    return sparse_solve(A, B).has_value();
}

TorsionReport quotient_torsion(const DegreewiseModule& A, const GradedSubmodule& W) {
    TorsionReport out;
    if (A.spec.is_field()) return out;
    for (int d = A.lo; d <= A.hi; ++d) {
        const SparseMat& Wd = W.basis[d - A.lo];
        if (!Wd.cols()) continue;
        auto snf = smith_normal_form(Wd.to_dense());
        std::vector<long> vals;
        for (const auto& s : snf.diagonal) {
            long v = s.p_valuation();
            if (v > 0) vals.push_back(v);
        }
        if (!vals.empty()) out.entries.emplace_back(d, std::move(vals));
    }
    return out;
}

} // namespace bmg
