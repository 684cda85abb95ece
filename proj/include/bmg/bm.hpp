#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bmg/coeff.hpp"
#include "bmg/graded.hpp"
#include "bmg/graph.hpp"
#include "bmg/jsonio.hpp"
#include "bmg/linalg.hpp"

namespace bmg {

// Edge module together with the two restriction maps into it. All per-degree
// vectors are indexed by (degree - lo) over the sheaf window; matrices map
// the canonical degreewise basis of the incident stalk to the canonical
// (monomial) basis of the edge module at the same degree.
struct EdgeData {
    std::vector<int> dims;            // per-degree rank of the edge module
    std::vector<SparseMat> rho_head;  // component of the canonical quotient map
    std::vector<SparseMat> rho_tail;  // component of the cover map at the tail
};

struct BMSheaf {
    MomentGraph graph;
    CoeffSpec coeff = CoeffSpec::rationals();
    int top = 0;
    int lo = 0, hi = 0; // inclusive degree window
    std::vector<FreeGradedModule> stalks; // per vertex
    std::vector<EdgeData> edges;          // per graph edge

    int deg_index(int d) const { return d - lo; }
    int n_degrees() const { return hi - lo + 1; }
};

struct BMOptions {
    int jobs = 1; // > 1 enables antichain-parallel processing (OpenMP)
    // Custom processing order (a linear extension, maximal elements first).
    // Null selects the canonical antichain schedule. The output is identical
    // either way; the knob exists so tests can assert that.
    const std::vector<int>* order = nullptr;
};

// Core construction: descending over a linear extension, stalks extended by
// projective covers of the image of the section module of the strict up-set.
BMSheaf braden_macpherson(const MomentGraph& g, const CoeffSpec& coeff, int top,
                          int lo, int hi, const BMOptions& opt = {});

// Degreewise module of compatible tuples over an up-closed vertex set,
// together with its embedding into the direct sum of the stalk expansions.
struct SectionSpace {
    std::vector<int> verts;          // participating vertices, ascending index
    DegreewiseModule mod;            // dims and mu in the section basis
    std::vector<SparseMat> basis;    // per degree: ambient x dim, ambient = stacked stalk components
    std::vector<std::vector<int>> block_offset; // per degree, per vert position: ambient row offset
};

SectionSpace sections(const BMSheaf& S, const std::vector<int>& open_set, bool with_mu = true);

// Degrees of a minimal generating set of the section module over the base
// ring, ascending. Over a field or local base this is the graded rank.
std::vector<int> section_generator_degrees(const BMSheaf& S, const std::vector<int>& open_set);

// Elements of the stalk at x killed by every incident restriction map.
struct CostalkResult {
    DegreewiseModule mod;
    GradedSubmodule sub; // inside the stalk expansion at x
};
CostalkResult costalk(const BMSheaf& S, int x);

struct AxiomReport {
    bool ok = true;
    int axiom = 0;          // 1..4, first failure
    std::string location;   // vertex or edge description
    std::string detail;
    std::string str() const;
};
AxiomReport verify_bm_axioms(const BMSheaf& S);

// Compatible tuples of polynomials over the whole graph, with per-degree-pair
// multiplication tables in the canonical section basis.
struct StructureAlgebra {
    int lo = 0, hi = 0;
    std::vector<int> dims;                       // per degree
    std::vector<SparseMat> basis;                // per degree, ambient = stacked polynomial spaces
    // tables[key(d1,d2)][i][j] = coordinates of basis_i(d1) * basis_j(d2) in basis(d1+d2)
    std::map<std::pair<int, int>, std::vector<std::vector<SparseVec>>> tables;
};
StructureAlgebra structure_algebra(const MomentGraph& g, const CoeffSpec& coeff, int lo, int hi);

struct Summand {
    int vertex = 0;
    int shift = 0;
    int multiplicity = 0;
};
// Top-down peeling into shifted indecomposables; throws refusal_error when the
// vertexwise rank bookkeeping does not close.
std::vector<Summand> decompose(const BMSheaf& S);

// Helpers used to assemble test inputs: direct sum, degree shift M[l], and
// restriction of the stored data to a subwindow.
BMSheaf sheaf_direct_sum(const BMSheaf& a, const BMSheaf& b);
BMSheaf sheaf_shifted(const BMSheaf& a, int l);
BMSheaf window_restricted(const BMSheaf& S, int lo2, int hi2);

json sheaf_to_json(const BMSheaf& S);
BMSheaf sheaf_from_json(const json& j);
std::string sheaf_content_hash(const BMSheaf& S);

} // namespace bmg
