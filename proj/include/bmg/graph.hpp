#pragma once

#include <string>
#include <vector>

#include "bmg/jsonio.hpp"
#include "bmg/weights.hpp"

namespace bmg {

struct GraphEdge {
    int tail = -1, head = -1; // direction tail -> head means tail < head
    Weight label;
};

struct ValidationReport {
    std::vector<std::string> problems;
    bool ok() const { return problems.empty(); }
};

struct GkmReport {
    // Edges whose label vanishes over the coefficients, and pairs of distinct
    // edges at a common vertex with dependent labels: (vertex, edge, edge).
    std::vector<int> zero_label_edges;
    std::vector<std::array<int, 3>> dependent_pairs;
    bool pass() const { return zero_label_edges.empty() && dependent_pairs.empty(); }
};

struct PrimitivityReport {
    std::vector<int> imprimitive_edges;
    bool pass() const { return imprimitive_edges.empty(); }
};

// Finite directed graph with lattice edge labels; the partial order is the
// reflexive-transitive closure of the edge directions.
class MomentGraph {
public:
    int lattice_rank = 0;
    std::vector<std::string> ids;  // vertex identifiers, index = vertex number
    std::vector<GraphEdge> edges;

    int n() const { return static_cast<int>(ids.size()); }
    int vertex_index(const std::string& id) const; // -1 when absent

    // Invariant checks: labels nonzero and of lattice rank, at most one edge
    // per vertex pair, no directed cycles, indices in range.
    ValidationReport validate() const;

    // Precompute order closure and adjacency; throws refusal_error when
    // validate() fails. Must be called before any query below.
    void finalize();

    bool leq(int x, int y) const { return reach_[x][y]; }
    std::vector<int> up_set(int x) const;
    std::vector<int> down_set(int x) const;
    std::vector<int> covers(int x) const; // y covering x (x < y, nothing between)
    const std::vector<int>& edges_at(int x) const { return incident_[x]; }
    bool is_up_closed(const std::vector<char>& mask) const;

    // All vertices, maximal elements first; among simultaneously available
    // vertices the smallest id is emitted first. This is the processing order
    // of the sheaf construction.
    std::vector<int> linear_extension() const;

    GkmReport gkm_check(const CoeffSpec& spec) const;
    PrimitivityReport primitivity_check(uint64_t p) const;

private:
    bool finalized_ = false;
    std::vector<std::vector<char>> reach_;   // reach_[x][y]: x <= y
    std::vector<std::vector<int>> incident_; // edge indices per vertex
};

// JSON format: {"lattice_rank": r, "vertices": ["id", ...],
//               "edges": [{"tail": "id", "head": "id", "label": [ints]}]}.
// Labels are sign-normalized on load; the graph is validated and finalized.
MomentGraph graph_from_json(const json& j);
json graph_to_json(const MomentGraph& g);
MomentGraph load_graph(const std::string& path);
void save_graph(const MomentGraph& g, const std::string& path);

} // namespace bmg
