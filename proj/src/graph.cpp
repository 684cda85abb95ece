#include "bmg/graph.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <map>
#include <set>
#include <sstream>

namespace bmg {

int MomentGraph::vertex_index(const std::string& id) const {
    for (int i = 0; i < n(); ++i)
        if (ids[i] == id) return i;
    return -1;
}

ValidationReport MomentGraph::validate() const {
    ValidationReport r;
    std::set<std::string> seen;
    for (const auto& id : ids)
        if (!seen.insert(id).second) r.problems.push_back("duplicate vertex id: " + id);
    std::set<std::pair<int, int>> pairs;
    for (size_t k = 0; k < edges.size(); ++k) {
        const auto& e = edges[k];
        std::string tag = "edge #" + std::to_string(k);
        if (e.tail < 0 || e.tail >= n() || e.head < 0 || e.head >= n()) {
            r.problems.push_back(tag + ": vertex index out of range");
            continue;
        }
        tag += " (" + ids[e.tail] + " -> " + ids[e.head] + ")";
        if (e.tail == e.head) r.problems.push_back(tag + ": loop edge");
        if (static_cast<int>(e.label.size()) != lattice_rank)
            r.problems.push_back(tag + ": label rank " + std::to_string(e.label.size()) +
                                 " does not match lattice rank " + std::to_string(lattice_rank));
        else if (weight_is_zero(e.label))
            r.problems.push_back(tag + ": zero label");
        auto p = std::minmax(e.tail, e.head);
        if (!pairs.insert({p.first, p.second}).second)
            r.problems.push_back(tag + ": multiple edges between one vertex pair");
    }
    // Directed-cycle detection by depth-limited closure (Kahn).
    std::vector<int> indeg(n(), 0);
    for (const auto& e : edges)
        if (e.tail >= 0 && e.tail < n() && e.head >= 0 && e.head < n() && e.tail != e.head)
            ++indeg[e.head];
    std::vector<int> stack;
    for (int v = 0; v < n(); ++v)
        if (!indeg[v]) stack.push_back(v);
    int visited = 0;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        ++visited;
        for (const auto& e : edges)
            if (e.tail == v && e.head != e.tail && e.head >= 0 && e.head < n())
                if (--indeg[e.head] == 0) stack.push_back(e.head);
    }
    if (visited != n()) r.problems.push_back("directed cycle detected");
    return r;
}

void MomentGraph::finalize() {
    auto rep = validate();
    if (!rep.ok()) {
        std::string msg = "invalid moment graph:";
        for (const auto& p : rep.problems) msg += "\n  - " + p;
        throw refusal_error(msg);
    }
    reach_.assign(n(), std::vector<char>(n(), 0));
    incident_.assign(n(), {});
    std::vector<std::vector<int>> out(n());
    for (size_t k = 0; k < edges.size(); ++k) {
        out[edges[k].tail].push_back(edges[k].head);
        incident_[edges[k].tail].push_back(static_cast<int>(k));
        incident_[edges[k].head].push_back(static_cast<int>(k));
    }
    for (int x = 0; x < n(); ++x) {
        // DFS from x along edge directions.
        std::vector<int> stack{x};
        reach_[x][x] = 1;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int w : out[v])
                if (!reach_[x][w]) {
                    reach_[x][w] = 1;
                    stack.push_back(w);
                }
        }
    }
    finalized_ = true;
}

std::vector<int> MomentGraph::up_set(int x) const {
    std::vector<int> s;
    for (int y = 0; y < n(); ++y)
        if (reach_[x][y]) s.push_back(y);
    return s;
}

std::vector<int> MomentGraph::down_set(int x) const {
    std::vector<int> s;
    for (int y = 0; y < n(); ++y)
        if (reach_[y][x]) s.push_back(y);
    return s;
}

std::vector<int> MomentGraph::covers(int x) const {
    std::vector<int> c;
    for (int y = 0; y < n(); ++y) {
        if (y == x || !reach_[x][y]) continue;
        bool direct = true;
        for (int z = 0; z < n(); ++z)
            if (z != x && z != y && reach_[x][z] && reach_[z][y]) { direct = false; break; }
        if (direct) c.push_back(y);
    }
    return c;
}

bool MomentGraph::is_up_closed(const std::vector<char>& mask) const {
    for (int x = 0; x < n(); ++x) {
        if (!mask[x]) continue;
        for (int y = 0; y < n(); ++y)
            if (reach_[x][y] && !mask[y]) return false;
    }
    return true;
}

std::vector<int> MomentGraph::linear_extension() const {
    // Emit a vertex once all vertices above it are emitted; pick the smallest
    // id among the available ones.
    std::vector<char> done(n(), 0);
    std::vector<int> order;
    for (int step = 0; step < n(); ++step) {
        int best = -1;
        for (int v = 0; v < n(); ++v) {
            if (done[v]) continue;
            bool ready = true;
            for (int y = 0; y < n(); ++y)
                if (y != v && reach_[v][y] && !done[y]) { ready = false; break; }
            if (!ready) continue;
            if (best < 0 || ids[v] < ids[best]) best = v;
        }
        assert(best >= 0);
        done[best] = 1;
        order.push_back(best);
    }
    return order;
}

GkmReport MomentGraph::gkm_check(const CoeffSpec& spec) const {
    GkmReport r;
    for (size_t k = 0; k < edges.size(); ++k)
        if (weight_zero_in_k(spec, edges[k].label)) r.zero_label_edges.push_back(static_cast<int>(k));
    for (int v = 0; v < n(); ++v) {
        const auto& inc = incident_[v];
        for (size_t a = 0; a < inc.size(); ++a)
            for (size_t b = a + 1; b < inc.size(); ++b)
                if (weights_dependent_in_k(spec, edges[inc[a]].label, edges[inc[b]].label))
                    r.dependent_pairs.push_back({v, inc[a], inc[b]});
    }
    return r;
}

PrimitivityReport MomentGraph::primitivity_check(uint64_t p) const {
    PrimitivityReport r;
    for (size_t k = 0; k < edges.size(); ++k)
        if (!weight_primitive_mod_p(p, edges[k].label)) r.imprimitive_edges.push_back(static_cast<int>(k));
    return r;
}

MomentGraph graph_from_json(const json& j) {
    MomentGraph g;
    if (!j.is_object() || !j.contains("lattice_rank") || !j.contains("vertices") || !j.contains("edges"))
        throw refusal_error("graph JSON must contain lattice_rank, vertices, edges");
    g.lattice_rank = j.at("lattice_rank").get<int>();
    if (g.lattice_rank < 1) throw refusal_error("lattice_rank must be at least 1");
    for (const auto& v : j.at("vertices")) g.ids.push_back(v.get<std::string>());
    for (const auto& e : j.at("edges")) {
        GraphEdge ge;
        ge.tail = g.vertex_index(e.at("tail").get<std::string>());
        ge.head = g.vertex_index(e.at("head").get<std::string>());
        if (ge.tail < 0 || ge.head < 0)
            throw refusal_error("edge references unknown vertex: " + e.dump());
        for (const auto& c : e.at("label")) ge.label.push_back(c.get<long>());
        ge.label = weight_sign_normalized(ge.label);
        g.edges.push_back(std::move(ge));
    }
    g.finalize();
    return g;
}

json graph_to_json(const MomentGraph& g) {
    json j;
    j["lattice_rank"] = g.lattice_rank;
    j["vertices"] = g.ids;
    json es = json::array();
    for (const auto& e : g.edges) {
        json je;
        je["tail"] = g.ids[e.tail];
        je["head"] = g.ids[e.head];
        je["label"] = e.label;
        es.push_back(std::move(je));
    }
    j["edges"] = std::move(es);
    return j;
}

MomentGraph load_graph(const std::string& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::exception& ex) {
        throw refusal_error(std::string("graph file is not valid JSON: ") + ex.what());
    }
    return graph_from_json(j);
}

void save_graph(const MomentGraph& g, const std::string& path) {
    write_file(path, canonical_dump(graph_to_json(g)) + "\n");
}

} // namespace bmg
