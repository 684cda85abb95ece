#include "bmg/builders.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>

#include "bmg/coeff.hpp"
#include "bmg/weights.hpp"

namespace bmg {

namespace {

std::string word_str(const std::vector<int>& w) {
    if (w.empty()) return "e";
    std::ostringstream os;
    for (size_t i = 0; i < w.size(); ++i) {
        if (i) os << ' ';
        os << w[i];
    }
    return os.str();
}

// Determinant of an integer matrix by fraction-free (Bareiss) elimination.
// Sizes here are at most 9x9 with small entries, well within long long range.
long long int_det(std::vector<std::vector<long long>> m) {
    int n = static_cast<int>(m.size());
    if (n == 0) return 1;
    long long prev = 1;
    int sign = 1;
    for (int k = 0; k < n - 1; ++k) {
        if (m[k][k] == 0) {
            int sw = -1;
            for (int i = k + 1; i < n; ++i)
                if (m[i][k] != 0) { sw = i; break; }
            if (sw < 0) return 0;
            std::swap(m[k], m[sw]);
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i) {
            for (int j = k + 1; j < n; ++j)
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            m[i][k] = 0;
        }
        prev = m[k][k];
    }
    return sign * m[n - 1][n - 1];
}

} // namespace

CartanMatrix CartanMatrix::from_entries(int l, const std::vector<std::vector<int>>& entries) {
    CartanMatrix A;
    A.l = l;
    A.a = entries;
    A.check_shape();
    return A;
}

CartanMatrix CartanMatrix::from_type(const std::string& type) {
    if (type.size() < 2) throw refusal_error("unknown Cartan type '" + type + "'");
    char letter = static_cast<char>(std::toupper(static_cast<unsigned char>(type[0])));
    int n = 0;
    for (size_t i = 1; i < type.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(type[i])))
            throw refusal_error("unknown Cartan type '" + type + "'");
        n = n * 10 + (type[i] - '0');
    }
    auto chain = [&](int len) {
        std::vector<std::vector<int>> a(len, std::vector<int>(len, 0));
        for (int i = 0; i < len; ++i) a[i][i] = 2;
        for (int i = 0; i + 1 < len; ++i) a[i][i + 1] = a[i + 1][i] = -1;
        return a;
    };
    bool ok = true;
    std::vector<std::vector<int>> a;
    switch (letter) {
        case 'A':
            ok = n >= 1 && n <= 9;
            if (ok) a = chain(n);
            break;
        case 'B': // alpha_n short: <alpha_{n-1}, alpha_n^vee> = -2
            ok = n >= 2 && n <= 9;
            if (ok) { a = chain(n); a[n - 1][n - 2] = -2; }
            break;
        case 'C': // alpha_n long
            ok = n >= 2 && n <= 9;
            if (ok) { a = chain(n); a[n - 2][n - 1] = -2; }
            break;
        case 'D':
            ok = n >= 4 && n <= 9;
            if (ok) {
                a = chain(n - 1);
                for (auto& row : a) row.push_back(0);
                a.push_back(std::vector<int>(n, 0));
                a[n - 1][n - 1] = 2;
                a[n - 1][n - 3] = a[n - 3][n - 1] = -1;
            }
            break;
        case 'E':
            ok = n >= 6 && n <= 8;
            if (ok) {
                // Nodes 1,3,4,5,...,n form a chain; node 2 hangs off node 4.
                a.assign(n, std::vector<int>(n, 0));
                for (int i = 0; i < n; ++i) a[i][i] = 2;
                auto bond = [&](int i, int j) { a[i - 1][j - 1] = a[j - 1][i - 1] = -1; };
                bond(1, 3); bond(3, 4); bond(4, 5); bond(2, 4);
                for (int i = 5; i < n; ++i) bond(i, i + 1);
            }
            break;
        case 'F':
            ok = n == 4;
            if (ok) { a = chain(4); a[2][1] = -2; a[1][2] = -1; }
            break;
        case 'G':
            ok = n == 2;
            if (ok) a = {{2, -3}, {-1, 2}};
            break;
        default:
            ok = false;
    }
    if (!ok) throw refusal_error("unknown Cartan type '" + type + "'");
    return from_entries(static_cast<int>(a.size()), a);
}

void CartanMatrix::check_shape() const {
    if (l <= 0 || static_cast<int>(a.size()) != l)
        throw refusal_error("Cartan matrix has invalid size");
    for (int i = 0; i < l; ++i) {
        if (static_cast<int>(a[i].size()) != l)
            throw refusal_error("Cartan matrix is not square");
        if (a[i][i] != 2) throw refusal_error("Cartan matrix diagonal entry is not 2");
        for (int j = 0; j < l; ++j) {
            if (i == j) continue;
            if (a[i][j] > 0) throw refusal_error("Cartan matrix off-diagonal entry is positive");
            if ((a[i][j] == 0) != (a[j][i] == 0))
                throw refusal_error("Cartan matrix zero pattern is not symmetric");
        }
    }
}

bool CartanMatrix::is_finite_type() const {
    // Find a rational symmetrizer d_i > 0 with d_i a_ij = d_j a_ji by walking
    // the Coxeter graph, then verify it globally.
    std::vector<long long> num(l, 0), den(l, 0);
    for (int start = 0; start < l; ++start) {
        if (num[start] != 0) continue;
        num[start] = den[start] = 1;
        std::queue<int> q;
        q.push(start);
        while (!q.empty()) {
            int i = q.front();
            q.pop();
            for (int j = 0; j < l; ++j) {
                if (a[i][j] == 0 || num[j] != 0) continue;
                // d_j = d_i * a_ij / a_ji
                num[j] = num[i] * a[i][j];
                den[j] = den[i] * a[j][i];
                if (num[j] * den[j] < 0) return false;
                num[j] = std::abs(num[j]);
                den[j] = std::abs(den[j]);
                long long g = std::gcd(num[j], den[j]);
                num[j] /= g; den[j] /= g;
                q.push(j);
            }
        }
    }
    for (int i = 0; i < l; ++i)
        for (int j = 0; j < l; ++j)
            if (num[i] * den[j] * a[i][j] != num[j] * den[i] * a[j][i]) return false;
    // Positive definiteness of the symmetrized matrix is equivalent to all
    // leading principal minors of the Cartan matrix itself being positive.
    for (int k = 1; k <= l; ++k) {
        std::vector<std::vector<long long>> m(k, std::vector<long long>(k));
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) m[i][j] = a[i][j];
        if (int_det(std::move(m)) <= 0) return false;
    }
    return true;
}

void CartanMatrix::require_finite_type() const {
    check_shape();
    if (!is_finite_type())
        throw refusal_error("Cartan matrix is not of finite type");
}

int CartanMatrix::coxeter_number() const {
    RootSystem rs = RootSystem::build(*this);
    return 2 * static_cast<int>(rs.positive.size()) / l;
}

RootSystem RootSystem::build(const CartanMatrix& A) {
    A.require_finite_type();
    int l = A.l;
    RootSystem rs;
    rs.A = A;
    std::set<std::pair<Weight, Weight>> seen;
    std::vector<Root> queue_roots;
    for (int i = 0; i < l; ++i) {
        Weight e(l, 0);
        e[i] = 1;
        queue_roots.push_back({e, e});
        seen.insert({e, e});
    }
    for (size_t qi = 0; qi < queue_roots.size(); ++qi) {
        Root r = queue_roots[qi];
        for (int i = 0; i < l; ++i) {
            // s_i on root coordinates: subtract (sum_j a[i][j] c_j) alpha_i.
            long cr = 0, cc = 0;
            for (int j = 0; j < l; ++j) {
                cr += A.a[i][j] * r.root[j];
                cc += A.a[j][i] * r.coroot[j];
            }
            Root s = r;
            s.root[i] -= cr;
            s.coroot[i] -= cc;
            bool positive = true;
            for (long v : s.root)
                if (v < 0) { positive = false; break; }
            if (!positive) continue;
            if (seen.insert({s.root, s.coroot}).second) queue_roots.push_back(s);
            if (queue_roots.size() > 10000)
                throw refusal_error("root system enumeration exceeded bounds");
        }
    }
    rs.positive = std::move(queue_roots);
    std::sort(rs.positive.begin(), rs.positive.end(), [](const Root& x, const Root& y) {
        long hx = std::accumulate(x.root.begin(), x.root.end(), 0L);
        long hy = std::accumulate(y.root.begin(), y.root.end(), 0L);
        if (hx != hy) return hx < hy;
        return x.root < y.root;
    });
    return rs;
}

long RootSystem::pair_root_fcw(const Weight& root_coords, const std::vector<long>& mu) {
    long s = 0;
    for (size_t j = 0; j < root_coords.size(); ++j) s += root_coords[j] * mu[j];
    return s;
}

std::vector<long> RootSystem::coroot_to_fcw(const Weight& coroot_coords) const {
    int l = A.l;
    std::vector<long> m(l, 0);
    for (int i = 0; i < l; ++i)
        for (int k = 0; k < l; ++k) m[i] += coroot_coords[k] * A.a[k][i];
    return m;
}

WeylGroup WeylGroup::build(const CartanMatrix& A) {
    WeylGroup W;
    W.A = A;
    W.rs = RootSystem::build(A);
    int l = A.l;
    auto matmul = [l](const std::vector<long>& x, const std::vector<long>& y) {
        std::vector<long> z(l * l, 0);
        for (int i = 0; i < l; ++i)
            for (int k = 0; k < l; ++k) {
                long v = x[i * l + k];
                if (v == 0) continue;
                for (int j = 0; j < l; ++j) z[i * l + j] += v * y[k * l + j];
            }
        return z;
    };
    std::vector<long> id(l * l, 0);
    for (int i = 0; i < l; ++i) id[i * l + i] = 1;
    std::map<std::vector<long>, int> index;
    W.mats.push_back(id);
    W.len.push_back(0);
    index[id] = 0;
    W.identity = 0;
    W.simple_.resize(l);
    std::vector<std::vector<long>> smat(l);
    for (int i = 0; i < l; ++i) {
        std::vector<long> m = id;
        for (int j = 0; j < l; ++j) m[i * l + j] -= A.a[i][j];
        smat[i] = std::move(m);
    }
    for (size_t qi = 0; qi < W.mats.size(); ++qi) {
        for (int i = 0; i < l; ++i) {
            std::vector<long> m = matmul(smat[i], W.mats[qi]);
            auto it = index.find(m);
            if (it == index.end()) {
                index[m] = static_cast<int>(W.mats.size());
                W.mats.push_back(std::move(m));
                W.len.push_back(W.len[qi] + 1);
                if (W.mats.size() > 1000000)
                    throw refusal_error("Weyl group is too large to enumerate");
            }
        }
    }
    W.index_map_ = std::move(index);
    for (int i = 0; i < l; ++i) W.simple_[i] = W.lookup(smat[i]);
    int best = 0;
    for (int x = 0; x < W.size(); ++x)
        if (W.len[x] > W.len[best]) best = x;
    W.w0 = best;
    // Reflection elements, one per positive root.
    W.refl_elem.resize(W.rs.positive.size());
    for (size_t r = 0; r < W.rs.positive.size(); ++r) {
        const Root& beta = W.rs.positive[r];
        std::vector<long> m = id;
        for (int j = 0; j < l; ++j) {
            long pairing = 0; // <alpha_j, beta^vee>
            for (int k = 0; k < l; ++k) pairing += beta.coroot[k] * A.a[k][j];
            for (int i = 0; i < l; ++i) m[i * l + j] -= pairing * beta.root[i];
        }
        int idx = W.lookup(m);
        if (idx < 0) throw refusal_error("internal error: reflection not found in Weyl group");
        W.refl_elem[r] = idx;
    }
    // Bruhat order: transitive closure of length-increasing reflection moves,
    // computed wordwise on bitsets in decreasing-length order.
    int n = W.size();
    int words = (n + 63) / 64;
    std::vector<std::vector<uint64_t>> reach(n, std::vector<uint64_t>(words, 0));
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int x, int y) { return W.len[x] > W.len[y]; });
    for (int x : order) {
        reach[x][x / 64] |= 1ull << (x % 64);
        for (size_t r = 0; r < W.refl_elem.size(); ++r) {
            int y = W.mult(W.refl_elem[r], x);
            if (W.len[y] <= W.len[x]) continue;
            for (int wdi = 0; wdi < words; ++wdi) reach[x][wdi] |= reach[y][wdi];
        }
    }
    W.bruhat_.assign(n, std::vector<char>(n, 0));
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            W.bruhat_[x][y] = (reach[x][y / 64] >> (y % 64)) & 1 ? 1 : 0;
    return W;
}

int WeylGroup::lookup(const std::vector<long>& m) const {
    auto it = index_map_.find(m);
    return it == index_map_.end() ? -1 : it->second;
}

int WeylGroup::mult(int x, int y) const {
    int l = A.l;
    const std::vector<long>& mx = mats[x];
    const std::vector<long>& my = mats[y];
    std::vector<long> z(l * l, 0);
    for (int i = 0; i < l; ++i)
        for (int k = 0; k < l; ++k) {
            long v = mx[i * l + k];
            if (v == 0) continue;
            for (int j = 0; j < l; ++j) z[i * l + j] += v * my[k * l + j];
        }
    int idx = lookup(z);
    if (idx < 0) throw refusal_error("internal error: product left the Weyl group");
    return idx;
}

int WeylGroup::from_word(const std::vector<int>& word_1based) const {
    int x = identity;
    for (int letter : word_1based) {
        if (letter < 1 || letter > A.l)
            throw refusal_error("word letter " + std::to_string(letter) +
                                " is out of range 1.." + std::to_string(A.l));
        x = mult(x, simple_[letter - 1]);
    }
    return x;
}

std::vector<int> WeylGroup::reduced_word(int x) const {
    std::vector<int> w;
    while (x != identity) {
        int pick = -1;
        for (int i = 0; i < A.l; ++i) {
            int y = mult(simple_[i], x);
            if (len[y] < len[x]) { pick = i; break; }
        }
        if (pick < 0) throw refusal_error("internal error: no descent found");
        w.push_back(pick + 1);
        x = mult(simple_[pick], x);
    }
    return w;
}

std::string WeylGroup::id_of(int x) const { return word_str(reduced_word(x)); }

Weight WeylGroup::act(int x, const Weight& v) const {
    int l = A.l;
    Weight out(l, 0);
    for (int i = 0; i < l; ++i)
        for (int j = 0; j < l; ++j) out[i] += mats[x][i * l + j] * v[j];
    return out;
}

MomentGraph finite_bruhat_graph(const CartanMatrix& A, const std::vector<int>& top_word,
                                const std::vector<int>& parabolic_1based) {
    WeylGroup W = WeylGroup::build(A);
    std::vector<int> I;
    {
        std::set<int> is;
        for (int i : parabolic_1based) {
            if (i < 1 || i > A.l)
                throw refusal_error("parabolic index " + std::to_string(i) +
                                    " is out of range 1.." + std::to_string(A.l));
            is.insert(i - 1);
        }
        I.assign(is.begin(), is.end());
    }
    int top = W.from_word(top_word);
    auto min_rep = [&](int x) {
        bool moved = true;
        while (moved) {
            moved = false;
            for (int i : I) {
                int y = W.mult(x, W.simple(i));
                if (W.len[y] < W.len[x]) { x = y; moved = true; break; }
            }
        }
        return x;
    };
    if (min_rep(top) != top)
        throw refusal_error("top element is not a minimal-length coset representative");

    std::vector<int> verts;
    for (int x = 0; x < W.size(); ++x)
        if (min_rep(x) == x && W.bruhat_leq(x, top)) verts.push_back(x);
    std::vector<std::vector<int>> words(verts.size());
    for (size_t i = 0; i < verts.size(); ++i) words[i] = W.reduced_word(verts[i]);
    std::vector<size_t> vorder(verts.size());
    std::iota(vorder.begin(), vorder.end(), 0);
    std::sort(vorder.begin(), vorder.end(), [&](size_t x, size_t y) {
        if (W.len[verts[x]] != W.len[verts[y]]) return W.len[verts[x]] < W.len[verts[y]];
        return words[x] < words[y];
    });
    std::map<int, int> vindex; // element -> vertex number
    MomentGraph g;
    g.lattice_rank = A.l;
    for (size_t oi = 0; oi < vorder.size(); ++oi) {
        vindex[verts[vorder[oi]]] = static_cast<int>(oi);
        g.ids.push_back(word_str(words[vorder[oi]]));
    }
    std::map<std::pair<int, int>, size_t> pair_root; // vertex pair -> positive root
    for (size_t oi = 0; oi < vorder.size(); ++oi) {
        int x = verts[vorder[oi]];
        for (size_t r = 0; r < W.refl_elem.size(); ++r) {
            int y = min_rep(W.mult(W.refl_elem[r], x));
            if (y == x) continue;
            auto it = vindex.find(y);
            if (it == vindex.end()) continue; // leaves the closure of the top cell
            int vx = vindex.at(x), vy = it->second;
            std::pair<int, int> key(std::min(vx, vy), std::max(vx, vy));
            auto ins = pair_root.emplace(key, r);
            if (!ins.second && ins.first->second != r)
                throw refusal_error("two distinct reflections connect vertices '" +
                                    g.ids[key.first] + "' and '" + g.ids[key.second] + "'");
        }
    }
    for (const auto& [key, r] : pair_root) {
        int a = key.first, b = key.second;
        int la = W.len[verts[vorder[a]]], lb = W.len[verts[vorder[b]]];
        if (la == lb)
            throw refusal_error("cannot orient edge between '" + g.ids[a] + "' and '" +
                                g.ids[b] + "': equal lengths");
        GraphEdge e;
        e.tail = la < lb ? a : b;
        e.head = la < lb ? b : a;
        e.label = weight_sign_normalized(W.rs.positive[r].root);
        g.edges.push_back(e);
    }
    g.finalize();
    return g;
}

AffinePoints::AffinePoints(const CartanMatrix& A) : A_(A), rs_(RootSystem::build(A)) {}

long AffinePoints::iwahori_length(const std::vector<long>& mu) const {
    long total = 0;
    for (const Root& r : rs_.positive) {
        long v = RootSystem::pair_root_fcw(r.root, mu);
        total += v > 0 ? v - 1 : -v;
    }
    return total;
}

std::vector<long> AffinePoints::dominant_rep(std::vector<long> mu) const {
    int l = A_.l;
    bool moved = true;
    while (moved) {
        moved = false;
        for (int i = 0; i < l; ++i) {
            if (mu[i] >= 0) continue;
            long mi = mu[i];
            for (int j = 0; j < l; ++j) mu[j] -= mi * A_.a[i][j];
            moved = true;
            break;
        }
    }
    return mu;
}

bool AffinePoints::dominance_leq(const std::vector<long>& mu_dom,
                                 const std::vector<long>& lambda_dom) const {
    int l = A_.l;
    // Solve sum_k n_k a[k][i] = lambda_i - mu_i for integers n_k >= 0.
    std::vector<std::vector<long long>> G(l, std::vector<long long>(l));
    for (int i = 0; i < l; ++i)
        for (int k = 0; k < l; ++k) G[i][k] = A_.a[k][i];
    long long d = int_det(G);
    if (d == 0) throw refusal_error("internal error: singular Cartan matrix");
    for (int k = 0; k < l; ++k) {
        std::vector<std::vector<long long>> Gk = G;
        for (int i = 0; i < l; ++i) Gk[i][k] = lambda_dom[i] - mu_dom[i];
        long long dk = int_det(Gk);
        if (dk % d != 0) return false;
        if (dk / d < 0) return false;
    }
    return true;
}

bool AffinePoints::in_coroot_lattice(const std::vector<long>& mu) const {
    int l = A_.l;
    std::vector<std::vector<long long>> G(l, std::vector<long long>(l));
    for (int i = 0; i < l; ++i)
        for (int k = 0; k < l; ++k) G[i][k] = A_.a[k][i];
    long long d = int_det(G);
    for (int k = 0; k < l; ++k) {
        std::vector<std::vector<long long>> Gk = G;
        for (int i = 0; i < l; ++i) Gk[i][k] = mu[i];
        if (int_det(Gk) % d != 0) return false;
    }
    return true;
}

std::vector<std::vector<long>> AffinePoints::weyl_orbit(const std::vector<long>& mu) const {
    int l = A_.l;
    std::set<std::vector<long>> seen{mu};
    std::vector<std::vector<long>> queue{mu};
    for (size_t qi = 0; qi < queue.size(); ++qi) {
        std::vector<long> cur = queue[qi];
        for (int i = 0; i < l; ++i) {
            std::vector<long> nxt = cur;
            long mi = cur[i];
            for (int j = 0; j < l; ++j) nxt[j] -= mi * A_.a[i][j];
            if (seen.insert(nxt).second) queue.push_back(nxt);
        }
    }
    std::vector<std::vector<long>> out(seen.begin(), seen.end());
    return out;
}

std::string AffinePoints::id_of(const std::vector<long>& mu) {
    return weight_str(Weight(mu.begin(), mu.end()));
}

MomentGraph AffinePoints::graph_on_points(std::vector<std::vector<long>> pts) const {
    int l = A_.l;
    std::set<std::vector<long>> uniq(pts.begin(), pts.end());
    pts.assign(uniq.begin(), uniq.end());
    std::sort(pts.begin(), pts.end(), [&](const std::vector<long>& x, const std::vector<long>& y) {
        long lx = iwahori_length(x), ly = iwahori_length(y);
        if (lx != ly) return lx < ly;
        return x < y;
    });

    MomentGraph g;
    g.lattice_rank = l + 1;
    for (const auto& p : pts) g.ids.push_back(id_of(p));
    std::vector<std::vector<long>> coroot_fcw;
    for (const Root& r : rs_.positive) coroot_fcw.push_back(rs_.coroot_to_fcw(r.coroot));
    for (size_t i = 0; i < pts.size(); ++i) {
        for (size_t j = i + 1; j < pts.size(); ++j) {
            std::vector<long> d(l);
            for (int t = 0; t < l; ++t) d[t] = pts[j][t] - pts[i][t];
            int found = -1;
            long kmul = 0;
            for (size_t r = 0; r < coroot_fcw.size(); ++r) {
                const std::vector<long>& c = coroot_fcw[r];
                int f = -1;
                for (int t = 0; t < l; ++t)
                    if (c[t] != 0) { f = t; break; }
                if (f < 0 || d[f] % c[f] != 0) continue;
                long k = d[f] / c[f];
                if (k == 0) continue;
                bool match = true;
                for (int t = 0; t < l; ++t)
                    if (d[t] != k * c[t]) { match = false; break; }
                if (match) { found = static_cast<int>(r); kmul = k; break; }
            }
            if (found < 0) continue;
            // pts[j] = pts[i] - k' alpha^vee with k' = -kmul; wall level
            // n = <alpha, pts[i]> - k'.
            long k = -kmul;
            long n = RootSystem::pair_root_fcw(rs_.positive[found].root, pts[i]) - k;
            long li = iwahori_length(pts[i]), lj = iwahori_length(pts[j]);
            if (li == lj)
                throw refusal_error("cannot orient edge between '" + g.ids[i] + "' and '" +
                                    g.ids[j] + "': equal lengths");
            GraphEdge e;
            e.tail = static_cast<int>(li < lj ? i : j);
            e.head = static_cast<int>(li < lj ? j : i);
            Weight label(rs_.positive[found].root);
            label.push_back(-n);
            e.label = weight_sign_normalized(label);
            g.edges.push_back(e);
        }
    }
    g.finalize();
    return g;
}

std::vector<std::vector<long>> AffinePoints::points_by_cutoff(int cutoff) const {
    if (cutoff < 0) throw refusal_error("length cutoff must be nonnegative");
    int l = A_.l;
    std::vector<std::vector<long>> dominants;
    std::vector<long> cur(l, 0);
    // Every coordinate of a dominant point of length <= cutoff is <= cutoff+1.
    std::function<void(int)> rec = [&](int pos) {
        if (pos == l) {
            dominants.push_back(cur);
            return;
        }
        for (long v = 0; v <= cutoff + 1; ++v) {
            cur[pos] = v;
            rec(pos + 1);
        }
        cur[pos] = 0;
    };
    rec(0);
    std::set<std::vector<long>> keep;
    for (const auto& dom : dominants) {
        if (!in_coroot_lattice(dom)) continue;
        if (iwahori_length(dom) > cutoff) continue;
        for (const auto& m : weyl_orbit(dom))
            if (iwahori_length(m) <= cutoff) keep.insert(m);
    }
    return std::vector<std::vector<long>>(keep.begin(), keep.end());
}

std::vector<std::vector<long>> AffinePoints::points_below(const std::vector<long>& lambda_dom) const {
    int l = A_.l;
    for (long v : lambda_dom)
        if (v < 0) throw refusal_error("weight is not dominant");
    long bound = 0;
    for (const Root& r : rs_.positive)
        bound = std::max(bound, RootSystem::pair_root_fcw(r.root, lambda_dom));
    std::vector<std::vector<long>> dominants;
    std::vector<long> cur(l, 0);
    std::function<void(int)> rec = [&](int pos) {
        if (pos == l) {
            dominants.push_back(cur);
            return;
        }
        for (long v = 0; v <= bound; ++v) {
            cur[pos] = v;
            rec(pos + 1);
        }
        cur[pos] = 0;
    };
    rec(0);
    std::set<std::vector<long>> keep;
    for (const auto& dom : dominants) {
        if (!dominance_leq(dom, lambda_dom)) continue;
        for (const auto& m : weyl_orbit(dom)) keep.insert(m);
    }
    return std::vector<std::vector<long>>(keep.begin(), keep.end());
}

MomentGraph affine_grassmannian_graph(const CartanMatrix& A, int cutoff) {
    AffinePoints ap(A);
    return ap.graph_on_points(ap.points_by_cutoff(cutoff));
}

} // namespace bmg
