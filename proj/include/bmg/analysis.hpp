#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bmg/bm.hpp"
#include "bmg/builders.hpp"

namespace bmg {

// Polynomial in q with integer coefficients: exponent -> coefficient.
using QIntPoly = std::map<int, long long>;
std::string qpoly_str(const QIntPoly& p);

// Classical recursion over the Hecke algebra. Independent of the sheaf
// engine: only the Weyl-group combinatorics is shared.
struct KLTable {
    std::string top_id;
    // One row per x <= top, sorted by (length, word): (vertex id, P_x).
    std::vector<std::pair<std::string, QIntPoly>> rows;
};
KLTable kl_table(const CartanMatrix& A, const std::vector<int>& top_word);

// All polynomials with upper element `top`, keyed by the lower element's
// index in W. Entries exist exactly for x <= top.
std::map<int, QIntPoly> kl_polynomials(const WeylGroup& W, int top);

// Graded rank of a free module as a polynomial in q (internal degree 2 = q).
QIntPoly graded_rank_poly(const FreeGradedModule& f);

enum class SmoothMethod { Stalks, Edges, Compare };

struct SmoothLocusReport {
    SmoothMethod method = SmoothMethod::Stalks;
    int l = 0;                       // degree parameter used by the edge test
    std::vector<int> stalk_set;      // vertices, ascending (Stalks/Compare)
    std::vector<int> edge_set;       // vertices, ascending (Edges/Compare)
    std::vector<int> symmetric_difference; // Compare only
    const std::vector<int>& primary() const {
        return method == SmoothMethod::Edges ? edge_set : stalk_set;
    }
};

// Longest directed path ending at `top`; the canonical degree parameter.
int default_duality_degree(const MomentGraph& g, int top);

SmoothLocusReport smooth_locus(const MomentGraph& g, const CoeffSpec& k, int top,
                               SmoothMethod method, std::optional<int> l = {});

struct SelfDualityReport {
    bool pass = false;
    int l = 0;
    std::vector<int> degrees; // generator degrees of the global sections
};
// Palindrome test on the graded rank of the global sections: the degree
// multiset must be symmetric about l (in q-units), i.e. {d} == {2l - d}.
SelfDualityReport self_duality_check(const BMSheaf& S, int l);

struct TorsionAudit {
    std::vector<std::pair<int, TorsionReport>> entries; // (vertex, report)
    bool all_free = true;
};
// Per-vertex torsion of stalk/costalk; requires p-local coefficients.
TorsionAudit torsion_audit(const BMSheaf& S);

struct CharacterTable {
    std::vector<long> lambda;
    uint64_t p = 0;
    // (weight in fundamental-coweight coordinates, multiplicity), in the
    // vertex order of the underlying graph.
    std::vector<std::pair<std::vector<long>, int>> rows;
    int multiplicity_of(const std::vector<long>& weight) const;
};
CharacterTable tilting_character(const CartanMatrix& A, const std::vector<long>& lambda,
                                 uint64_t p, bool force = false);

} // namespace bmg
