#include "bmg/bm.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace bmg {

namespace {

FreeGradedModule zero_stalk(const CoeffSpec& spec, int rank) {
    return FreeGradedModule{spec, rank, {}};
}

// Lazily computed degreewise expansions of the stalks.
struct ExpCache {
    const BMSheaf* S;
    std::vector<std::optional<FreeExpansion>> slot;

    explicit ExpCache(const BMSheaf& sheaf) : S(&sheaf), slot(sheaf.graph.n()) {}
    const FreeExpansion& get(int v) {
        if (!slot[v]) slot[v] = expand_free(S->stalks[v], S->lo, S->hi);
        return *slot[v];
    }
};

SparseVec slice_rows(const SparseVec& v, int r0, int r1) {
    SparseVec out;
    for (const auto& [r, c] : v.e)
        if (r >= r0 && r < r1) out.e.emplace_back(r - r0, c);
    return out;
}

// Stack the per-degree kernel computation of the compatibility map over a
// vertex subset. Blocks are ordered by position in `verts`.
struct RawSections {
    std::vector<int> verts;
    std::vector<SparseMat> basis;               // per degree
    std::vector<std::vector<int>> offsets;      // per degree: |verts|+1 prefix sums
};

RawSections raw_sections(const BMSheaf& S, ExpCache& exps, std::vector<int> verts) {
    std::sort(verts.begin(), verts.end());
    verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
    const int nd = S.n_degrees();
    RawSections out;
    out.verts = verts;
    out.basis.resize(nd);
    out.offsets.assign(nd, std::vector<int>(verts.size() + 1, 0));
    std::map<int, int> pos;
    for (size_t i = 0; i < verts.size(); ++i) pos[verts[i]] = static_cast<int>(i);
    // Internal edges: both endpoints in the set.
    std::vector<int> inner;
    for (size_t ei = 0; ei < S.graph.edges.size(); ++ei) {
        const GraphEdge& e = S.graph.edges[ei];
        if (pos.count(e.tail) && pos.count(e.head)) inner.push_back(static_cast<int>(ei));
    }
    for (int d = S.lo; d <= S.hi; ++d) {
        const int di = d - S.lo;
        auto& off = out.offsets[di];
        for (size_t i = 0; i < verts.size(); ++i)
            off[i + 1] = off[i] + exps.get(verts[i]).M.dims[di];
        int amb = off[verts.size()];
        int rows = 0;
        for (int ei : inner) rows += S.edges[ei].dims[di];
        SparseMat C(S.coeff, rows, amb);
        int r0 = 0;
        for (int ei : inner) {
            const GraphEdge& e = S.graph.edges[ei];
            const EdgeData& ed = S.edges[ei];
            if (ed.dims[di] > 0) {
                C.paste(ed.rho_head[di], r0, off[pos[e.head]]);
                // Subtract the tail restriction.
                const SparseMat& T = ed.rho_tail[di];
                for (int i = 0; i < T.rows(); ++i)
                    for (const auto& [j, c] : T.row(i).e)
                        C.set(r0 + i, off[pos[e.tail]] + j, Scalar::zero(S.coeff) - c);
            }
            r0 += ed.dims[di];
        }
        out.basis[di] = sparse_kernel(C);
    }
    return out;
}

// Express mu-images of a degreewise basis family in that family's own
// coordinates (the family must be closed under the action).
std::vector<std::vector<SparseMat>> solve_mu(const BMSheaf& S, ExpCache& exps,
                                             const RawSections& rs) {
    const int nd = S.n_degrees();
    const int rank = S.graph.lattice_rank;
    std::vector<std::vector<SparseMat>> mu(rank, std::vector<SparseMat>(nd));
    for (int i = 0; i < rank; ++i) {
        for (int d = S.lo; d + 2 <= S.hi; ++d) {
            const int di = d - S.lo;
            int amb2 = rs.offsets[di + 2].back();
            // Blockwise image of the basis columns.
            SparseMat img(S.coeff, amb2, rs.basis[di].cols());
            for (size_t vpos = 0; vpos < rs.verts.size(); ++vpos) {
                const FreeExpansion& F = exps.get(rs.verts[vpos]);
                if (F.M.dims[di] == 0) continue;
                // Extract the vertex block, apply mu, paste at the new offset.
                SparseMat blk(S.coeff, F.M.dims[di], rs.basis[di].cols());
                int v0 = rs.offsets[di][vpos], v1 = rs.offsets[di][vpos + 1];
                for (int r = v0; r < v1; ++r) blk.row(r - v0) = rs.basis[di].row(r);
                SparseMat moved = F.M.mu_at(i, d) * blk;
                img.paste(moved, rs.offsets[di + 2][vpos], 0);
            }
            auto sol = sparse_solve(rs.basis[di + 2], img);
            if (!sol)
                throw refusal_error("internal error: section module is not closed under the ring action");
            mu[i][di] = std::move(*sol);
        }
    }
    return mu;
}

std::vector<int> strict_up_set(const MomentGraph& g, int x) {
    std::vector<int> out;
    for (int y = 0; y < g.n(); ++y)
        if (y != x && g.leq(x, y)) out.push_back(y);
    return out;
}

DegreewiseModule truncated(const DegreewiseModule& A, int new_hi) {
    DegreewiseModule out;
    out.spec = A.spec;
    out.rank = A.rank;
    out.lo = A.lo;
    out.hi = new_hi;
    const int n = new_hi - A.lo + 1;
    out.dims.assign(A.dims.begin(), A.dims.begin() + n);
    out.mu.assign(A.mu.size(), {});
    for (size_t i = 0; i < A.mu.size(); ++i) {
        out.mu[i].assign(A.mu[i].begin(), A.mu[i].begin() + n);
        for (int d = A.lo; d <= new_hi; ++d)
            if (d + 2 > new_hi) out.mu[i][d - A.lo] = SparseMat();
    }
    return out;
}

GradedSubmodule truncated(const GradedSubmodule& W, int new_hi) {
    GradedSubmodule out;
    out.lo = W.lo;
    out.hi = new_hi;
    out.basis.assign(W.basis.begin(), W.basis.begin() + (new_hi - W.lo + 1));
    return out;
}

std::multiset<int> gen_degrees(const MinimalGenerators& mg, int cap) {
    std::multiset<int> s;
    for (const auto& [d, v] : mg.gens)
        if (d <= cap) s.insert(d);
    return s;
}

std::string edge_key(const MomentGraph& g, const GraphEdge& e) {
    return g.ids[e.tail] + "->" + g.ids[e.head];
}

json matrix_to_json(const SparseMat& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        std::vector<std::string> vals(m.cols(), "0");
        for (const auto& [j, c] : m.row(i).e) vals[j] = c.str();
        for (auto& v : vals) row.push_back(v);
        rows.push_back(std::move(row));
    }
    return rows;
}

SparseMat matrix_from_json(const CoeffSpec& spec, const json& j, int rows, int cols,
                           const std::string& where) {
    if (!j.is_array() || static_cast<int>(j.size()) != rows)
        throw refusal_error("malformed sheaf file: matrix row count mismatch at " + where);
    SparseMat m(spec, rows, cols);
    for (int i = 0; i < rows; ++i) {
        const json& row = j[i];
        if (!row.is_array() || static_cast<int>(row.size()) != cols)
            throw refusal_error("malformed sheaf file: matrix column count mismatch at " + where);
        for (int c = 0; c < cols; ++c) {
            Scalar v = Scalar::parse(spec, row[c].get<std::string>());
            if (!v.is_zero()) m.set(i, c, v);
        }
    }
    return m;
}

} // namespace

BMSheaf braden_macpherson(const MomentGraph& g, const CoeffSpec& coeff, int top,
                          int lo, int hi, const BMOptions& opt) {
    if (top < 0 || top >= g.n()) throw refusal_error("top vertex index out of range");
    if (hi < lo) throw refusal_error("degree window is empty");
    BMSheaf S;
    S.graph = g;
    S.coeff = coeff;
    S.top = top;
    S.lo = std::min(lo, 0);
    S.hi = hi;
    const int nd = S.n_degrees();
    const int rank = g.lattice_rank;
    S.stalks.assign(g.n(), zero_stalk(coeff, rank));
    S.edges.assign(g.edges.size(), EdgeData{});
    for (auto& e : S.edges) {
        e.dims.assign(nd, 0);
        e.rho_head.assign(nd, SparseMat(coeff, 0, 0));
        e.rho_tail.assign(nd, SparseMat(coeff, 0, 0));
    }
    ExpCache exps(S);
    std::vector<std::optional<LinearQuotient>> quot(g.edges.size()); // per-edge head quotient

    // Fix the stalk at x (already stored) and derive the edge modules headed
    // there, establishing the canonical projections.
    auto fix_vertex = [&](int x, bool in_support) {
        exps.slot[x].reset();
        (void)exps.get(x);
        if (!in_support) return;
        for (int ei : S.graph.edges_at(x)) {
            const GraphEdge& e = S.graph.edges[ei];
            if (e.head != x) continue;
            LinearQuotient lq = quotient_by_linear_form(exps.get(x), e.label);
            EdgeData& ed = S.edges[ei];
            for (int d = S.lo; d <= S.hi; ++d) ed.dims[d - S.lo] = lq.M.dims[d - S.lo];
            ed.rho_head = lq.proj;
            for (int d = S.lo; d <= S.hi; ++d)
                ed.rho_tail[d - S.lo] = SparseMat(coeff, lq.M.dims[d - S.lo], 0);
            quot[ei] = std::move(lq);
        }
    };

    auto process_vertex = [&](int x) {
        const bool in_support = g.leq(x, top);
        if (!in_support) {
            fix_vertex(x, false);
            return;
        }
        if (x == top) {
            S.stalks[x] = FreeGradedModule{coeff, rank, {0}};
            fix_vertex(x, true);
            return;
        }
        // Section module of the strict up-set (restricted to the support:
        // outside it all stalks and edge modules vanish).
        std::vector<int> U;
        for (int y : strict_up_set(g, x))
            if (g.leq(y, top)) U.push_back(y);
        RawSections gamma = raw_sections(S, exps, U);
        std::map<int, int> upos;
        for (size_t i = 0; i < gamma.verts.size(); ++i) upos[gamma.verts[i]] = static_cast<int>(i);
        // Up-edges at x with their target modules.
        std::vector<int> delta;
        for (int ei : g.edges_at(x))
            if (g.edges[ei].tail == x && g.leq(g.edges[ei].head, top))
                delta.push_back(ei);
        std::sort(delta.begin(), delta.end());
        // Ambient module: direct sum of the edge modules over delta.
        DegreewiseModule amb;
        amb.spec = coeff;
        amb.rank = rank;
        amb.lo = S.lo;
        amb.hi = S.hi;
        amb.dims.assign(nd, 0);
        std::vector<std::vector<int>> aoff(nd, std::vector<int>(delta.size() + 1, 0));
        for (int di = 0; di < nd; ++di) {
            for (size_t k = 0; k < delta.size(); ++k)
                aoff[di][k + 1] = aoff[di][k] + S.edges[delta[k]].dims[di];
            amb.dims[di] = aoff[di][delta.size()];
        }
        amb.mu.assign(rank, std::vector<SparseMat>(nd));
        for (int i = 0; i < rank; ++i)
            for (int d = S.lo; d + 2 <= S.hi; ++d) {
                int di = d - S.lo;
                SparseMat m(coeff, amb.dims[di + 2], amb.dims[di]);
                for (size_t k = 0; k < delta.size(); ++k) {
                    const DegreewiseModule& EM = quot[delta[k]]->M;
                    m.paste(EM.mu_at(i, d), aoff[di + 2][k], aoff[di][k]);
                }
                amb.mu[i][di] = std::move(m);
            }
        // Seeds: the image of the section basis under the projection to delta.
        std::vector<SparseMat> seeds(nd);
        for (int d = S.lo; d <= S.hi; ++d) {
            int di = d - S.lo;
            SparseMat P(coeff, amb.dims[di], gamma.basis[di].cols());
            for (size_t k = 0; k < delta.size(); ++k) {
                const GraphEdge& e = g.edges[delta[k]];
                const EdgeData& ed = S.edges[delta[k]];
                if (ed.dims[di] == 0) continue;
                int vp = upos.at(e.head);
                SparseMat blk(coeff, exps.get(e.head).M.dims[di], gamma.basis[di].cols());
                int v0 = gamma.offsets[di][vp], v1 = gamma.offsets[di][vp + 1];
                for (int r = v0; r < v1; ++r) blk.row(r - v0) = gamma.basis[di].row(r);
                P.paste(ed.rho_head[di] * blk, aoff[di][k], 0);
            }
            seeds[di] = std::move(P);
        }
        GradedSubmodule W = span_closure(amb, seeds);
        MinimalGenerators mg = minimal_generators(amb, W);
        // Window-stability audit: the generator multiset must be unchanged
        // when the window is shrunk by one degree step at the top.
        if (S.hi - 2 >= S.lo) {
            MinimalGenerators mg2 = minimal_generators(truncated(amb, S.hi - 2), truncated(W, S.hi - 2));
            if (gen_degrees(mg, S.hi - 2) != gen_degrees(mg2, S.hi - 2))
                throw refusal_error("degree bound too small (window-stability audit failed at vertex '" +
                                    g.ids[x] + "')");
        }
        for (const auto& [dg, v] : mg.gens)
            if (dg + 2 > S.hi)
                throw refusal_error("degree bound too small (generator at degree " +
                                    std::to_string(dg) + " within one step of the window top " +
                                    std::to_string(S.hi) + " at vertex '" + g.ids[x] +
                                    "'; enlarge the window)");
        std::vector<int> gens;
        for (const auto& [dg, v] : mg.gens) gens.push_back(dg);
        std::sort(gens.begin(), gens.end());
        S.stalks[x] = FreeGradedModule{coeff, rank, gens};
        fix_vertex(x, true);
        // The cover map: generator images, split over the delta edges.
        for (size_t k = 0; k < delta.size(); ++k) {
            const EdgeData& ed = S.edges[delta[k]];
            std::vector<SparseVec> imgs;
            // minimal_generators sorts gens by degree ascending (stable), same
            // order as the stalk generator list.
            for (const auto& [dg, v] : mg.gens) {
                int di = dg - S.lo;
                imgs.push_back(slice_rows(v, aoff[di][k], aoff[di][k + 1]));
            }
            S.edges[delta[k]].rho_tail = materialize_free_map(exps.get(x), quot[delta[k]]->M, imgs);
            (void)ed;
        }
    };

    if (opt.order) {
        // Custom processing order: must list every vertex once, heads first.
        const std::vector<int>& ord = *opt.order;
        std::vector<char> seen(g.n(), 0);
        if (static_cast<int>(ord.size()) != g.n())
            throw refusal_error("processing order is not a linear extension: wrong length");
        std::vector<int> pos(g.n(), -1);
        for (size_t i = 0; i < ord.size(); ++i) {
            int v = ord[i];
            if (v < 0 || v >= g.n() || seen[v])
                throw refusal_error("processing order is not a linear extension: bad entry");
            seen[v] = 1;
            pos[v] = static_cast<int>(i);
        }
        for (const auto& e : g.edges)
            if (pos[e.head] > pos[e.tail])
                throw refusal_error("processing order is not a linear extension: tail before head");
        for (int x : ord) process_vertex(x);
        return S;
    }

    // Canonical antichain schedule: level(x) = longest directed path upward.
    // Vertices sharing a level are pairwise incomparable, and everything a
    // vertex reads lives at strictly smaller levels.
    std::vector<int> level(g.n(), 0);
    {
        std::vector<int> byl = g.linear_extension(); // maximal elements first
        for (int x : byl)
            for (int ei : g.edges_at(x))
                if (g.edges[ei].tail == x)
                    level[x] = std::max(level[x], level[g.edges[ei].head] + 1);
        // linear_extension emits heads before tails, so one pass suffices.
    }
    int max_level = 0;
    for (int v = 0; v < g.n(); ++v) max_level = std::max(max_level, level[v]);
    std::vector<std::vector<int>> batch(max_level + 1);
    for (int v = 0; v < g.n(); ++v) batch[level[v]].push_back(v);
    for (auto& b : batch) {
        std::exception_ptr err;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1) if (opt.jobs > 1) num_threads(std::max(1, opt.jobs))
#endif
        for (size_t i = 0; i < b.size(); ++i) {
            try {
                process_vertex(b[i]);
            } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
                if (!err) err = std::current_exception();
            }
        }
        if (err) std::rethrow_exception(err);
    }
    return S;
}

SectionSpace sections(const BMSheaf& S, const std::vector<int>& open_set, bool with_mu) {
    std::vector<int> U = open_set;
    std::sort(U.begin(), U.end());
    U.erase(std::unique(U.begin(), U.end()), U.end());
    for (int v : U)
        if (v < 0 || v >= S.graph.n()) throw refusal_error("vertex index out of range");
    std::vector<char> mask(S.graph.n(), 0);
    for (int v : U) mask[v] = 1;
    if (!S.graph.is_up_closed(mask))
        throw refusal_error("section domain is not open: the vertex set is not up-closed");
    ExpCache exps(S);
    RawSections rs = raw_sections(S, exps, U);
    SectionSpace out;
    out.verts = rs.verts;
    out.basis = rs.basis;
    out.block_offset = rs.offsets;
    out.mod.spec = S.coeff;
    out.mod.rank = S.graph.lattice_rank;
    out.mod.lo = S.lo;
    out.mod.hi = S.hi;
    out.mod.dims.resize(S.n_degrees());
    for (int di = 0; di < S.n_degrees(); ++di) out.mod.dims[di] = rs.basis[di].cols();
    if (with_mu)
        out.mod.mu = solve_mu(S, exps, rs);
    else
        out.mod.mu.assign(S.graph.lattice_rank, std::vector<SparseMat>(S.n_degrees()));
    return out;
}

std::vector<int> section_generator_degrees(const BMSheaf& S, const std::vector<int>& open_set) {
    SectionSpace sec = sections(S, open_set, false);
    ExpCache exps(S);
    const int nd = S.n_degrees();
    DegreewiseModule amb;
    amb.spec = S.coeff;
    amb.rank = S.graph.lattice_rank;
    amb.lo = S.lo;
    amb.hi = S.hi;
    amb.dims.resize(nd);
    for (int di = 0; di < nd; ++di) amb.dims[di] = sec.block_offset[di].back();
    amb.mu.assign(amb.rank, std::vector<SparseMat>(nd));
    for (int i = 0; i < amb.rank; ++i)
        for (int d = S.lo; d + 2 <= S.hi; ++d) {
            int di = d - S.lo;
            SparseMat m(S.coeff, amb.dims[di + 2], amb.dims[di]);
            for (size_t vp = 0; vp < sec.verts.size(); ++vp)
                m.paste(exps.get(sec.verts[vp]).M.mu_at(i, d), sec.block_offset[di + 2][vp],
                        sec.block_offset[di][vp]);
            amb.mu[i][di] = std::move(m);
        }
    GradedSubmodule W;
    W.lo = S.lo;
    W.hi = S.hi;
    W.basis = sec.basis;
    MinimalGenerators mg = minimal_generators(amb, W);
    std::vector<int> out;
    for (const auto& [d, v] : mg.gens) out.push_back(d);
    std::sort(out.begin(), out.end());
    return out;
}

CostalkResult costalk(const BMSheaf& S, int x) {
    if (x < 0 || x >= S.graph.n()) throw refusal_error("vertex index out of range");
    ExpCache exps(S);
    const FreeExpansion& F = exps.get(x);
    const int nd = S.n_degrees();
    CostalkResult out;
    out.sub.lo = S.lo;
    out.sub.hi = S.hi;
    out.sub.basis.resize(nd);
    for (int d = S.lo; d <= S.hi; ++d) {
        int di = d - S.lo;
        int rows = 0;
        for (int ei : S.graph.edges_at(x)) rows += S.edges[ei].dims[di];
        SparseMat C(S.coeff, rows, F.M.dims[di]);
        int r0 = 0;
        for (int ei : S.graph.edges_at(x)) {
            const EdgeData& ed = S.edges[ei];
            if (ed.dims[di] > 0) {
                const SparseMat& R = S.graph.edges[ei].tail == x ? ed.rho_tail[di] : ed.rho_head[di];
                C.paste(R, r0, 0);
            }
            r0 += ed.dims[di];
        }
        out.sub.basis[di] = sparse_kernel(C);
    }
    out.mod.spec = S.coeff;
    out.mod.rank = S.graph.lattice_rank;
    out.mod.lo = S.lo;
    out.mod.hi = S.hi;
    out.mod.dims.resize(nd);
    for (int di = 0; di < nd; ++di) out.mod.dims[di] = out.sub.basis[di].cols();
    out.mod.mu.assign(S.graph.lattice_rank, std::vector<SparseMat>(nd));
    for (int i = 0; i < S.graph.lattice_rank; ++i)
        for (int d = S.lo; d + 2 <= S.hi; ++d) {
            int di = d - S.lo;
            auto sol = sparse_solve(out.sub.basis[di + 2], F.M.mu_at(i, d) * out.sub.basis[di]);
            if (!sol)
                throw refusal_error("internal error: costalk is not closed under the ring action");
            out.mod.mu[i][di] = std::move(*sol);
        }
    return out;
}

std::string AxiomReport::str() const {
    if (ok) return "all axioms verified";
    std::ostringstream os;
    os << "axiom (" << axiom << ") fails at " << location << ": " << detail;
    return os.str();
}

AxiomReport verify_bm_axioms(const BMSheaf& S) {
    AxiomReport rep;
    ExpCache exps(S);
    const int nd = S.n_degrees();
    auto fail = [&](int ax, const std::string& loc, const std::string& detail) {
        rep.ok = false;
        rep.axiom = ax;
        rep.location = loc;
        rep.detail = detail;
        return rep;
    };
    // Axiom 1: stalks are free graded modules given by sorted finite
    // generator lists (structural), with coherent coefficient data.
    for (int v = 0; v < S.graph.n(); ++v) {
        const FreeGradedModule& f = S.stalks[v];
        if (!(f.spec == S.coeff) || f.rank != S.graph.lattice_rank)
            return fail(1, "vertex '" + S.graph.ids[v] + "'", "stalk coefficient data mismatch");
        if (!std::is_sorted(f.gens.begin(), f.gens.end()))
            return fail(1, "vertex '" + S.graph.ids[v] + "'", "generator degrees not sorted");
    }
    // Axiom 2: every edge module equals the canonical quotient of its head
    // stalk by the label, with the canonical projection; the tail map must be
    // a degreewise module map into it.
    for (size_t ei = 0; ei < S.graph.edges.size(); ++ei) {
        const GraphEdge& e = S.graph.edges[ei];
        const EdgeData& ed = S.edges[ei];
        const std::string loc = "edge '" + edge_key(S.graph, e) + "'";
        if (static_cast<int>(ed.dims.size()) != nd)
            return fail(2, loc, "edge module window mismatch");
        const bool head_zero = S.stalks[e.head].gens.empty();
        if (head_zero) {
            for (int di = 0; di < nd; ++di)
                if (ed.dims[di] != 0) return fail(2, loc, "nonzero edge module over a zero stalk");
            continue;
        }
        LinearQuotient lq = quotient_by_linear_form(exps.get(e.head), e.label);
        for (int d = S.lo; d <= S.hi; ++d) {
            int di = d - S.lo;
            if (ed.dims[di] != lq.M.dims[di])
                return fail(2, loc, "edge module rank differs from the canonical quotient at degree " +
                                        std::to_string(d));
            if (!(ed.rho_head[di] == lq.proj[di]))
                return fail(2, loc, "head restriction differs from the canonical projection at degree " +
                                        std::to_string(d));
        }
        // Tail map: shape and compatibility with the ring action.
        const FreeExpansion& TF = exps.get(e.tail);
        for (int d = S.lo; d <= S.hi; ++d) {
            int di = d - S.lo;
            if (ed.rho_tail[di].rows() != ed.dims[di] || ed.rho_tail[di].cols() != TF.M.dims[di])
                return fail(2, loc, "tail restriction has wrong shape at degree " + std::to_string(d));
        }
        for (int i = 0; i < S.graph.lattice_rank; ++i)
            for (int d = S.lo; d + 2 <= S.hi; ++d) {
                int di = d - S.lo;
                if (!(lq.M.mu_at(i, d) * ed.rho_tail[di] == ed.rho_tail[di + 2] * TF.M.mu_at(i, d)))
                    return fail(2, loc, "tail restriction is not a module map at degree " +
                                            std::to_string(d));
            }
    }
    // Axioms 3 and 4: compare the degreewise image of the cover map with the
    // projection of the up-set sections to the up-edge modules.
    for (int x = 0; x < S.graph.n(); ++x) {
        if (S.stalks[x].gens.empty() && [&] {
                for (int ei : S.graph.edges_at(x))
                    if (S.graph.edges[ei].tail == x && S.edges[ei].dims != std::vector<int>(nd, 0))
                        return false;
                return true;
            }())
            continue; // zero stalk, zero up-edge modules: nothing to check
        std::vector<int> delta;
        for (int ei : S.graph.edges_at(x))
            if (S.graph.edges[ei].tail == x) delta.push_back(ei);
        std::sort(delta.begin(), delta.end());
        bool any = false;
        for (int ei : delta)
            for (int di = 0; di < nd; ++di)
                if (S.edges[ei].dims[di] > 0) any = true;
        if (!any) continue; // no up-edge modules: both sides vanish
        RawSections gamma = raw_sections(S, exps, strict_up_set(S.graph, x));
        std::map<int, int> upos;
        for (size_t i = 0; i < gamma.verts.size(); ++i) upos[gamma.verts[i]] = static_cast<int>(i);
        const FreeExpansion& XF = exps.get(x);
        for (int d = S.lo; d <= S.hi; ++d) {
            int di = d - S.lo;
            int rows = 0;
            for (int ei : delta) rows += S.edges[ei].dims[di];
            if (rows == 0) continue;
            SparseMat P(S.coeff, rows, gamma.basis[di].cols()); // image of sections
            SparseMat V(S.coeff, rows, XF.M.dims[di]);          // image of the cover map
            int r0 = 0;
            for (int ei : delta) {
                const GraphEdge& e = S.graph.edges[ei];
                const EdgeData& ed = S.edges[ei];
                if (ed.dims[di] > 0) {
                    int vp = upos.at(e.head);
                    SparseMat blk(S.coeff, exps.get(e.head).M.dims[di], gamma.basis[di].cols());
                    int v0 = gamma.offsets[di][vp], v1 = gamma.offsets[di][vp + 1];
                    for (int r = v0; r < v1; ++r) blk.row(r - v0) = gamma.basis[di].row(r);
                    P.paste(ed.rho_head[di] * blk, r0, 0);
                    V.paste(ed.rho_tail[di], r0, 0);
                }
                r0 += ed.dims[di];
            }
            if (!sparse_span_contains(V, P))
                return fail(3, "vertex '" + S.graph.ids[x] + "'",
                            "cover image does not contain the section image at degree " +
                                std::to_string(d));
            if (!sparse_span_contains(P, V))
                return fail(4, "vertex '" + S.graph.ids[x] + "'",
                            "cover image is not contained in the section image at degree " +
                                std::to_string(d));
        }
    }
    return rep;
}

StructureAlgebra structure_algebra(const MomentGraph& g, const CoeffSpec& coeff, int lo, int hi) {
    if (hi < lo) throw refusal_error("degree window is empty");
    lo = std::min(lo, 0);
    StructureAlgebra out;
    out.lo = lo;
    out.hi = hi;
    const int nd = hi - lo + 1;
    const int rank = g.lattice_rank;
    FreeGradedModule unit{coeff, rank, {0}};
    FreeExpansion F = expand_free(unit, lo, hi);
    std::vector<LinearQuotient> lqs;
    for (const auto& e : g.edges) lqs.push_back(quotient_by_linear_form(F, e.label));
    out.dims.resize(nd);
    out.basis.resize(nd);
    for (int d = lo; d <= hi; ++d) {
        int di = d - lo;
        int blockdim = F.M.dims[di];
        int amb = blockdim * g.n();
        int rows = 0;
        for (const auto& lq : lqs) rows += lq.M.dims[di];
        SparseMat C(coeff, rows, amb);
        int r0 = 0;
        for (size_t ei = 0; ei < g.edges.size(); ++ei) {
            const LinearQuotient& lq = lqs[ei];
            if (lq.M.dims[di] > 0) {
                C.paste(lq.proj[di], r0, g.edges[ei].head * blockdim);
                const SparseMat& T = lq.proj[di];
                for (int i = 0; i < T.rows(); ++i)
                    for (const auto& [j, c] : T.row(i).e)
                        C.set(r0 + i, g.edges[ei].tail * blockdim + j, Scalar::zero(coeff) - c);
            }
            r0 += lq.M.dims[di];
        }
        out.basis[di] = sparse_kernel(C);
        out.dims[di] = out.basis[di].cols();
    }
    // Multiplication tables: componentwise products expressed in the basis.
    for (int d1 = lo; d1 <= hi; ++d1)
        for (int d2 = d1; d2 <= hi; ++d2) {
            if (d1 + d2 > hi || d1 + d2 < lo) continue;
            int i1 = d1 - lo, i2 = d2 - lo, i3 = d1 + d2 - lo;
            int b1 = F.M.dims[i1] /*block*/, b2 = F.M.dims[i2], b3 = F.M.dims[i3];
            std::vector<std::vector<SparseVec>> table(
                out.dims[i1], std::vector<SparseVec>(out.dims[i2]));
            SparseMat prods(coeff, b3 * g.n(), out.dims[i1] * out.dims[i2]);
            for (int a = 0; a < out.dims[i1]; ++a)
                for (int b = 0; b < out.dims[i2]; ++b) {
                    // Componentwise product of basis columns a (deg d1) and b (deg d2).
                    for (int v = 0; v < g.n(); ++v) {
                        std::map<int, Scalar> acc;
                        // Gather the vertex blocks of the two columns.
                        std::vector<std::pair<int, Scalar>> col1, col2;
                        for (int r = v * b1; r < (v + 1) * b1; ++r) {
                            Scalar c = out.basis[i1].get(r, a);
                            if (!c.is_zero()) col1.emplace_back(r - v * b1, c);
                        }
                        for (int r = v * b2; r < (v + 1) * b2; ++r) {
                            Scalar c = out.basis[i2].get(r, b);
                            if (!c.is_zero()) col2.emplace_back(r - v * b2, c);
                        }
                        for (const auto& [m1, c1] : col1)
                            for (const auto& [m2, c2] : col2) {
                                Exponents e = F.basis[i1][m1].second;
                                const Exponents& f = F.basis[i2][m2].second;
                                for (size_t t = 0; t < e.size(); ++t) e[t] += f[t];
                                int idx = F.index_of(d1 + d2, 0, e);
                                auto it = acc.emplace(idx, Scalar::zero(coeff)).first;
                                it->second = it->second + c1 * c2;
                            }
                        for (const auto& [idx, c] : acc)
                            if (!c.is_zero()) prods.set(v * b3 + idx, a * out.dims[i2] + b, c);
                    }
                }
            auto sol = sparse_solve(out.basis[i3], prods);
            if (!sol)
                throw refusal_error("internal error: structure algebra is not closed under products");
            for (int a = 0; a < out.dims[i1]; ++a)
                for (int b = 0; b < out.dims[i2]; ++b) {
                    SparseVec col;
                    for (int r = 0; r < sol->rows(); ++r) {
                        Scalar c = sol->get(r, a * out.dims[i2] + b);
                        if (!c.is_zero()) col.e.emplace_back(r, c);
                    }
                    table[a][b] = std::move(col);
                }
            out.tables[{d1, d2}] = std::move(table);
        }
    return out;
}

std::vector<Summand> decompose(const BMSheaf& S) {
    const MomentGraph& g = S.graph;
    std::vector<std::map<int, int>> residual(g.n());
    for (int v = 0; v < g.n(); ++v)
        for (int d : S.stalks[v].gens) residual[v][d] += 1;
    const int hi_cand = S.hi + std::max(0, -S.lo) + 4;
    std::map<int, BMSheaf> cache;
    std::map<std::pair<int, int>, int> found; // (vertex, shift) -> multiplicity
    for (int x : g.linear_extension()) {
        auto& res = residual[x];
        for (auto it = res.begin(); it != res.end();) {
            if (it->second == 0) { it = res.erase(it); continue; }
            if (it->second < 0)
                throw refusal_error("decompose attribution mismatch at vertex '" + g.ids[x] + "'");
            int deg = it->first, mult = it->second;
            int shift = -deg;
            auto cit = cache.find(x);
            if (cit == cache.end())
                cit = cache.emplace(x, braden_macpherson(g, S.coeff, x, 0, hi_cand)).first;
            const BMSheaf& B = cit->second;
            for (int y = 0; y < g.n(); ++y)
                for (int gd : B.stalks[y].gens) residual[y][gd - shift] -= mult;
            found[{x, shift}] += mult;
            it = res.begin(); // restart: the subtraction touched this map
        }
    }
    for (int v = 0; v < g.n(); ++v)
        for (const auto& [d, c] : residual[v])
            if (c != 0)
                throw refusal_error("decompose attribution mismatch at vertex '" + g.ids[v] + "'");
    std::vector<Summand> out;
    for (const auto& [key, mult] : found) out.push_back({key.first, key.second, mult});
    std::sort(out.begin(), out.end(), [&](const Summand& a, const Summand& b) {
        if (g.ids[a.vertex] != g.ids[b.vertex]) return g.ids[a.vertex] < g.ids[b.vertex];
        return a.shift < b.shift;
    });
    return out;
}

BMSheaf sheaf_shifted(const BMSheaf& a, int l) {
    BMSheaf out = a;
    out.lo = a.lo - l;
    out.hi = a.hi - l;
    for (auto& st : out.stalks)
        for (auto& d : st.gens) d -= l;
    // Per-degree data shifts index-neutrally: degree d of the output is degree
    // d + l of the input, and both windows have the same length.
    return out;
}

BMSheaf window_restricted(const BMSheaf& S, int lo2, int hi2) {
    if (lo2 < S.lo || hi2 > S.hi || hi2 < lo2)
        throw refusal_error("window restriction outside the stored window");
    BMSheaf out = S;
    out.lo = lo2;
    out.hi = hi2;
    const int shift = lo2 - S.lo;
    const int nd = out.n_degrees();
    for (auto& ed : out.edges) {
        ed.dims = std::vector<int>(ed.dims.begin() + shift, ed.dims.begin() + shift + nd);
        ed.rho_head = std::vector<SparseMat>(ed.rho_head.begin() + shift, ed.rho_head.begin() + shift + nd);
        ed.rho_tail = std::vector<SparseMat>(ed.rho_tail.begin() + shift, ed.rho_tail.begin() + shift + nd);
    }
    return out;
}

BMSheaf sheaf_direct_sum(const BMSheaf& a0, const BMSheaf& b0) {
    if (!(canonical_dump(graph_to_json(a0.graph)) == canonical_dump(graph_to_json(b0.graph))))
        throw refusal_error("direct sum requires identical graphs");
    if (!(a0.coeff == b0.coeff)) throw refusal_error("direct sum requires identical coefficients");
    const int lo = std::max(a0.lo, b0.lo), hi = std::min(a0.hi, b0.hi);
    if (hi < lo) throw refusal_error("direct sum requires overlapping windows");
    const BMSheaf a = window_restricted(a0, lo, hi);
    const BMSheaf b = window_restricted(b0, lo, hi);
    BMSheaf out;
    out.graph = a.graph;
    out.coeff = a.coeff;
    out.lo = a.lo;
    out.hi = a.hi;
    out.top = a.graph.leq(b.top, a.top) ? a.top : b.top;
    const int nd = out.n_degrees();
    const int n = a.graph.n();
    out.stalks.resize(n);
    // Provenance of each merged generator: (part, index within part).
    std::vector<std::vector<std::pair<int, int>>> prov(n);
    for (int v = 0; v < n; ++v) {
        std::vector<std::pair<int, std::pair<int, int>>> tagged; // (degree, (part, idx))
        for (size_t i = 0; i < a.stalks[v].gens.size(); ++i)
            tagged.push_back({a.stalks[v].gens[i], {0, static_cast<int>(i)}});
        for (size_t i = 0; i < b.stalks[v].gens.size(); ++i)
            tagged.push_back({b.stalks[v].gens[i], {1, static_cast<int>(i)}});
        std::stable_sort(tagged.begin(), tagged.end(),
                         [](const auto& x, const auto& y) { return x.first < y.first; });
        FreeGradedModule f{out.coeff, a.graph.lattice_rank, {}};
        for (const auto& [d, pi] : tagged) {
            f.gens.push_back(d);
            prov[v].push_back(pi);
        }
        out.stalks[v] = std::move(f);
    }
    ExpCache mex(out);
    ExpCache aex(a), bex(b);
    out.edges.resize(a.edges.size());
    for (size_t ei = 0; ei < a.edges.size(); ++ei) {
        const GraphEdge& e = out.graph.edges[ei];
        EdgeData& ed = out.edges[ei];
        ed.dims.assign(nd, 0);
        ed.rho_head.assign(nd, SparseMat(out.coeff, 0, 0));
        ed.rho_tail.assign(nd, SparseMat(out.coeff, 0, 0));
        const bool head_zero = out.stalks[e.head].gens.empty();
        if (head_zero) {
            for (int di = 0; di < nd; ++di) {
                ed.rho_head[di] = SparseMat(out.coeff, 0, mex.get(e.head).M.dims[di]);
                ed.rho_tail[di] = SparseMat(out.coeff, 0, mex.get(e.tail).M.dims[di]);
            }
            continue;
        }
        LinearQuotient mq = quotient_by_linear_form(mex.get(e.head), e.label);
        for (int di = 0; di < nd; ++di) ed.dims[di] = mq.M.dims[di];
        ed.rho_head = mq.proj;
        // Quotient-basis lookup for the merged module.
        std::vector<std::map<std::pair<int, Exponents>, int>> qidx(nd);
        for (int di = 0; di < nd; ++di)
            for (size_t r = 0; r < mq.basis[di].size(); ++r)
                qidx[di][mq.basis[di][r]] = static_cast<int>(r);
        // Generator index maps part -> merged, per vertex.
        auto part_gen = [&](int v, int part, int idx) {
            for (size_t k = 0; k < prov[v].size(); ++k)
                if (prov[v][k] == std::make_pair(part, idx)) return static_cast<int>(k);
            throw refusal_error("internal error: merged generator not found");
        };
        auto add_part = [&](const BMSheaf& part, ExpCache& pex, int pid) {
            if (part.stalks[e.head].gens.empty()) return;
            LinearQuotient pq = quotient_by_linear_form(pex.get(e.head), e.label);
            const FreeExpansion& ptf = pex.get(e.tail);
            for (int di = 0; di < nd; ++di) {
                const SparseMat& T = part.edges[ei].rho_tail[di];
                for (int r = 0; r < T.rows(); ++r) {
                    const auto& [pg, pe] = pq.basis[di][r];
                    int mr = qidx[di].at({part_gen(e.head, pid, pg), pe});
                    for (const auto& [c, val] : T.row(r).e) {
                        const auto& [tg, te] = ptf.basis[di][c];
                        int mc = mex.get(e.tail).index_of(out.lo + di, part_gen(e.tail, pid, tg), te);
                        out.edges[ei].rho_tail[di].set(mr, mc, val);
                    }
                }
            }
        };
        for (int di = 0; di < nd; ++di)
            ed.rho_tail[di] = SparseMat(out.coeff, ed.dims[di], mex.get(e.tail).M.dims[di]);
        add_part(a, aex, 0);
        add_part(b, bex, 1);
    }
    return out;
}

json sheaf_to_json(const BMSheaf& S) {
    json j;
    j["graph"] = graph_to_json(S.graph);
    j["coeff"] = S.coeff.str();
    j["top"] = S.graph.ids[S.top];
    j["window"] = json::array({S.lo, S.hi});
    json stalks = json::object();
    for (int v = 0; v < S.graph.n(); ++v) stalks[S.graph.ids[v]] = S.stalks[v].gens;
    j["stalks"] = std::move(stalks);
    json edges = json::object(), rho = json::object();
    std::set<std::string> keys;
    for (size_t ei = 0; ei < S.graph.edges.size(); ++ei) {
        std::string key = edge_key(S.graph, S.graph.edges[ei]);
        if (!keys.insert(key).second)
            throw refusal_error("ambiguous edge keys in serialization: '" + key + "'");
        json dimj = json::object(), headj = json::object(), tailj = json::object();
        for (int d = S.lo; d <= S.hi; ++d) {
            int di = d - S.lo;
            const EdgeData& ed = S.edges[ei];
            if (ed.dims[di] == 0 && ed.rho_head[di].cols() == 0 && ed.rho_tail[di].cols() == 0)
                continue;
            dimj[std::to_string(d)] = ed.dims[di];
            headj[std::to_string(d)] = matrix_to_json(ed.rho_head[di]);
            tailj[std::to_string(d)] = matrix_to_json(ed.rho_tail[di]);
        }
        edges[key] = std::move(dimj);
        rho[key] = json{{"head", std::move(headj)}, {"tail", std::move(tailj)}};
    }
    j["edges"] = std::move(edges);
    j["rho"] = std::move(rho);
    return j;
}

BMSheaf sheaf_from_json(const json& j) {
    for (const char* key : {"graph", "coeff", "top", "window", "stalks", "edges", "rho"})
        if (!j.contains(key))
            throw refusal_error(std::string("malformed sheaf file: missing key '") + key + "'");
    BMSheaf S;
    S.graph = graph_from_json(j.at("graph"));
    S.coeff = CoeffSpec::parse(j.at("coeff").get<std::string>());
    std::string top_id = j.at("top").get<std::string>();
    int tv = S.graph.vertex_index(top_id);
    if (tv < 0) throw refusal_error("malformed sheaf file: unknown top vertex '" + top_id + "'");
    S.top = tv;
    if (!j.at("window").is_array() || j.at("window").size() != 2)
        throw refusal_error("malformed sheaf file: window must be [lo, hi]");
    S.lo = j.at("window")[0].get<int>();
    S.hi = j.at("window")[1].get<int>();
    if (S.hi < S.lo) throw refusal_error("malformed sheaf file: empty window");
    const int nd = S.n_degrees();
    S.stalks.assign(S.graph.n(), zero_stalk(S.coeff, S.graph.lattice_rank));
    for (const auto& [id, gens] : j.at("stalks").items()) {
        int v = S.graph.vertex_index(id);
        if (v < 0) throw refusal_error("malformed sheaf file: unknown stalk vertex '" + id + "'");
        std::vector<int> g = gens.get<std::vector<int>>();
        std::sort(g.begin(), g.end());
        S.stalks[v].gens = std::move(g);
    }
    ExpCache exps(S);
    S.edges.assign(S.graph.edges.size(), EdgeData{});
    for (size_t ei = 0; ei < S.graph.edges.size(); ++ei) {
        const GraphEdge& e = S.graph.edges[ei];
        EdgeData& ed = S.edges[ei];
        ed.dims.assign(nd, 0);
        ed.rho_head.assign(nd, SparseMat(S.coeff, 0, 0));
        ed.rho_tail.assign(nd, SparseMat(S.coeff, 0, 0));
        std::string key = edge_key(S.graph, e);
        const json& dimj = j.at("edges").contains(key) ? j.at("edges").at(key) : json::object();
        const json& rhoj = j.at("rho").contains(key) ? j.at("rho").at(key) : json::object();
        for (const auto& [ds, dim] : dimj.items()) {
            int d = std::stoi(ds);
            if (d < S.lo || d > S.hi)
                throw refusal_error("malformed sheaf file: degree " + ds + " outside the window");
            ed.dims[d - S.lo] = dim.get<int>();
        }
        for (int d = S.lo; d <= S.hi; ++d) {
            int di = d - S.lo;
            int hc = exps.get(e.head).M.dims[di];
            int tc = exps.get(e.tail).M.dims[di];
            std::string ds = std::to_string(d);
            const json* hj = nullptr;
            const json* tj = nullptr;
            if (rhoj.contains("head") && rhoj.at("head").contains(ds)) hj = &rhoj.at("head").at(ds);
            if (rhoj.contains("tail") && rhoj.at("tail").contains(ds)) tj = &rhoj.at("tail").at(ds);
            ed.rho_head[di] = hj ? matrix_from_json(S.coeff, *hj, ed.dims[di], hc, key)
                                 : SparseMat(S.coeff, ed.dims[di], hc);
            ed.rho_tail[di] = tj ? matrix_from_json(S.coeff, *tj, ed.dims[di], tc, key)
                                 : SparseMat(S.coeff, ed.dims[di], tc);
        }
    }
    return S;
}

std::string sheaf_content_hash(const BMSheaf& S) {
    return sha256_hex(canonical_dump(sheaf_to_json(S)));
}

} // namespace bmg
