#include "bmg/analysis.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace bmg {

std::string qpoly_str(const QIntPoly& p) {
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : p) {
        if (c == 0) continue;
        if (!first) os << (c > 0 ? "+" : "-");
        else if (c < 0) os << "-";
        long long a = c > 0 ? c : -c;
        if (a != 1 || e == 0) os << a;
        if (e > 0) {
            if (a != 1) os << "*";
            os << "q";
            if (e > 1) os << "^" << e;
        }
        first = false;
    }
    if (first) os << "0";
    return os.str();
}

namespace {

QIntPoly shifted(const QIntPoly& p, int k) {
    QIntPoly out;
    for (const auto& [e, c] : p) out[e + k] = c;
    return out;
}

void add_to(QIntPoly& a, const QIntPoly& b, long long scale) {
    for (const auto& [e, c] : b) {
        a[e] += scale * c;
        if (a[e] == 0) a.erase(e);
    }
}

// Memoized classical recursion on a fixed group.
class KLComputer {
public:
    explicit KLComputer(const WeylGroup& W) : W_(W) {}

    const QIntPoly& P(int x, int w) {
        auto key = std::make_pair(x, w);
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
        QIntPoly out;
        if (!W_.bruhat_leq(x, w)) {
            // zero polynomial
        } else if (x == w) {
            out[0] = 1;
        } else {
            // A left descent of w always exists for w != e.
            int s = -1, v = -1;
            for (int i = 0; i < W_.A.l; ++i) {
                int cand = W_.mult(W_.simple(i), w);
                if (W_.len[cand] < W_.len[w]) {
                    s = i;
                    v = cand;
                    break;
                }
            }
            int sx = W_.mult(W_.simple(s), x);
            const bool x_desc = W_.len[sx] < W_.len[x];
            // q^{1-c} P(sx, v) + q^c P(x, v), c = [sx < x].
            add_to(out, shifted(P(sx, v), x_desc ? 0 : 1), 1);
            add_to(out, shifted(P(x, v), x_desc ? 1 : 0), 1);
            for (int z = 0; z < W_.size(); ++z) {
                if (!W_.bruhat_leq(x, z) || !W_.bruhat_leq(z, v) || z == v) continue;
                if (W_.len[W_.mult(W_.simple(s), z)] >= W_.len[z]) continue;
                long long m = mu(z, v);
                if (m == 0) continue;
                int gap = W_.len[w] - W_.len[z];
                add_to(out, shifted(P(x, z), gap / 2), -m);
            }
            // Degree bound of the recursion output.
            for (const auto& [e, c] : out)
                if (c != 0 && 2 * e > W_.len[w] - W_.len[x] - 1)
                    throw refusal_error("internal error: polynomial degree bound violated");
        }
        return memo_.emplace(key, std::move(out)).first->second;
    }

    long long mu(int z, int v) {
        int gap = W_.len[v] - W_.len[z];
        if (gap <= 0 || gap % 2 == 0) return 0;
        const QIntPoly& pol = P(z, v);
        auto it = pol.find((gap - 1) / 2);
        return it == pol.end() ? 0 : it->second;
    }

private:
    const WeylGroup& W_;
    std::map<std::pair<int, int>, QIntPoly> memo_;
};

} // namespace

std::map<int, QIntPoly> kl_polynomials(const WeylGroup& W, int top) {
    KLComputer comp(W);
    std::map<int, QIntPoly> out;
    for (int x = 0; x < W.size(); ++x)
        if (W.bruhat_leq(x, top)) out[x] = comp.P(x, top);
    return out;
}

KLTable kl_table(const CartanMatrix& A, const std::vector<int>& top_word) {
    WeylGroup W = WeylGroup::build(A);
    int top = W.from_word(top_word);
    std::map<int, QIntPoly> polys = kl_polynomials(W, top);
    std::vector<int> elems;
    for (const auto& [x, p] : polys) elems.push_back(x);
    std::sort(elems.begin(), elems.end(), [&](int a, int b) {
        if (W.len[a] != W.len[b]) return W.len[a] < W.len[b];
        return W.id_of(a) < W.id_of(b);
    });
    KLTable out;
    out.top_id = W.id_of(top);
    for (int x : elems) out.rows.push_back({W.id_of(x), polys[x]});
    return out;
}

QIntPoly graded_rank_poly(const FreeGradedModule& f) {
    QIntPoly out;
    for (int d : f.gens) {
        if (d % 2 != 0)
            throw refusal_error("graded rank polynomial needs even degrees (got " +
                                std::to_string(d) + ")");
        out[d / 2] += 1;
    }
    return out;
}

int default_duality_degree(const MomentGraph& g, int top) {
    std::vector<int> order = g.linear_extension();
    std::vector<int> up(g.n(), 0);
    // Process minimal elements first: reverse of the stored order.
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        int x = *it;
        for (int ei : g.edges_at(x))
            if (g.edges[ei].head == x)
                up[x] = std::max(up[x], up[g.edges[ei].tail] + 1);
    }
    return up[top];
}

SmoothLocusReport smooth_locus(const MomentGraph& g, const CoeffSpec& k, int top,
                               SmoothMethod method, std::optional<int> l) {
    if (top < 0 || top >= g.n()) throw refusal_error("top vertex index out of range");
    SmoothLocusReport out;
    out.method = method;
    const int L = default_duality_degree(g, top);
    out.l = l.value_or(L);
    if (method == SmoothMethod::Compare) {
        GkmReport gr = g.gkm_check(k);
        if (!gr.pass()) {
            if (!gr.zero_label_edges.empty()) {
                const GraphEdge& e = g.edges[gr.zero_label_edges.front()];
                throw refusal_error("smooth-locus comparison requires the GKM condition over " +
                                    k.str() + ": label " + weight_str(e.label) + " on edge '" +
                                    g.ids[e.tail] + "'->'" + g.ids[e.head] + "' vanishes");
            }
            const auto& [v, e1, e2] = gr.dependent_pairs.front();
            throw refusal_error("smooth-locus comparison requires the GKM condition over " +
                                k.str() + ": labels " + weight_str(g.edges[e1].label) + " and " +
                                weight_str(g.edges[e2].label) + " at vertex '" + g.ids[v] +
                                "' are dependent");
        }
    }
    std::vector<int> support;
    for (int v = 0; v < g.n(); ++v)
        if (g.leq(v, top)) support.push_back(v);
    if (method == SmoothMethod::Stalks || method == SmoothMethod::Compare) {
        BMSheaf S = braden_macpherson(g, k, top, 0, 2 * L + 4);
        for (int v : support)
            if (S.stalks[v].gens.size() == 1) out.stalk_set.push_back(v);
    }
    if (method == SmoothMethod::Edges || method == SmoothMethod::Compare) {
        std::vector<int> count(g.n(), 0);
        for (const auto& e : g.edges)
            if (g.leq(e.tail, top) && g.leq(e.head, top)) {
                count[e.tail] += 1;
                count[e.head] += 1;
            }
        for (int v : support) {
            bool ok = true;
            for (int y : support)
                if (g.leq(v, y) && count[y] != out.l) { ok = false; break; }
            if (ok) out.edge_set.push_back(v);
        }
    }
    if (method == SmoothMethod::Compare) {
        std::set<int> a(out.stalk_set.begin(), out.stalk_set.end());
        std::set<int> b(out.edge_set.begin(), out.edge_set.end());
        for (int v : support)
            if (a.count(v) != b.count(v)) out.symmetric_difference.push_back(v);
    }
    return out;
}

SelfDualityReport self_duality_check(const BMSheaf& S, int l) {
    SelfDualityReport out;
    out.l = l;
    std::vector<int> all(S.graph.n());
    for (int v = 0; v < S.graph.n(); ++v) all[v] = v;
    out.degrees = section_generator_degrees(S, all);
    std::multiset<int> fwd(out.degrees.begin(), out.degrees.end()), rev;
    for (int d : out.degrees) rev.insert(2 * l - d);
    out.pass = fwd == rev;
    return out;
}

TorsionAudit torsion_audit(const BMSheaf& S) {
    if (S.coeff.kind != CoeffKind::PLocalIntegers)
        throw refusal_error("torsion audit requires p-local coefficients, got " + S.coeff.str());
    TorsionAudit out;
    for (int v = 0; v < S.graph.n(); ++v) {
        if (S.stalks[v].gens.empty()) continue;
        CostalkResult cs = costalk(S, v);
        FreeExpansion F = expand_free(S.stalks[v], S.lo, S.hi);
        TorsionReport rep = quotient_torsion(F.M, cs.sub);
        if (!rep.torsion_free()) out.all_free = false;
        out.entries.push_back({v, std::move(rep)});
    }
    return out;
}

int CharacterTable::multiplicity_of(const std::vector<long>& weight) const {
    for (const auto& [w, m] : rows)
        if (w == weight) return m;
    return 0;
}

CharacterTable tilting_character(const CartanMatrix& A, const std::vector<long>& lambda,
                                 uint64_t p, bool force) {
    const int h = A.coxeter_number();
    if (!(p > static_cast<uint64_t>(h) + 1) && !force)
        throw refusal_error("tilting characters require p > h+1 (here h = " + std::to_string(h) +
                            ", p = " + std::to_string(p) + "); pass --force to override");
    AffinePoints ap(A);
    std::vector<std::vector<long>> pts = ap.points_below(lambda);
    MomentGraph g = ap.graph_on_points(pts);
    // Top: the longest point of the orbit of lambda (its antidominant
    // representative), which is the unique longest vertex overall.
    long best = -1;
    std::vector<long> top_pt;
    for (const auto& m : ap.weyl_orbit(lambda)) {
        long len = ap.iwahori_length(m);
        if (len > best) {
            best = len;
            top_pt = m;
        }
    }
    for (const auto& m : pts)
        if (ap.iwahori_length(m) > best)
            throw refusal_error("internal error: truncated graph exceeds the top length");
    int top = g.vertex_index(AffinePoints::id_of(top_pt));
    if (top < 0) throw refusal_error("internal error: top vertex missing from the graph");
    BMSheaf S = braden_macpherson(g, CoeffSpec::p_local(p), top, 0,
                                  static_cast<int>(2 * best) + 4);
    CharacterTable out;
    out.lambda = lambda;
    out.p = p;
    std::map<std::string, std::vector<long>> by_id;
    for (const auto& m : pts) by_id[AffinePoints::id_of(m)] = m;
    for (int v = 0; v < g.n(); ++v)
        out.rows.push_back({by_id.at(g.ids[v]), static_cast<int>(S.stalks[v].gens.size())});
    return out;
}

} // namespace bmg
