#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "bmg/linalg.hpp"
#include "bmg/poly.hpp"
#include "bmg/weights.hpp"

namespace bmg {

// Finitely generated free graded module over the base polynomial ring,
// recorded by the internal degrees of a homogeneous basis (ascending).
struct FreeGradedModule {
    CoeffSpec spec{};
    int rank = 0;                // number of polynomial variables
    std::vector<int> gens;       // internal degrees, ascending

    int total_rank() const { return static_cast<int>(gens.size()); }
    // Sum of q^(d/2) over generators; requires all degrees even.
    QPolynomial graded_rank() const;
};

// A graded module presented degree by degree on a window [lo, hi] of internal
// degrees: free components of finite rank plus the multiplication maps by the
// degree-2 ring generators. Degrees outside the window are unknown, not zero.
struct DegreewiseModule {
    CoeffSpec spec{};
    int rank = 0;
    int lo = 0, hi = -1;
    std::vector<int> dims;                    // size hi-lo+1
    std::vector<std::vector<SparseMat>> mu;   // mu[i][d-lo]: comp_d -> comp_{d+2}

    bool in_window(int d) const { return d >= lo && d <= hi; }
    int dim_at(int d) const { return in_window(d) ? dims[d - lo] : 0; }
    const SparseMat& mu_at(int i, int d) const { return mu[i][d - lo]; }

    SparseVec apply_mu(int i, int d, const SparseVec& v) const;
    // Multiply by the monomial m: comp_d -> comp_{d + 2|m|}. The whole path
    // must stay inside the window.
    SparseVec apply_monomial(const Exponents& m, int d, SparseVec v) const;

    // Per-degree total over the window; for sanity checks and hilbert tables.
    std::vector<std::pair<int, int>> dimension_table() const;
};

// Expansion of a free module over the monomial basis: component basis at
// degree d is (generator j, monomial of degree d - deg_j), generators in index
// order and monomials in the library monomial order.
struct FreeExpansion {
    FreeGradedModule shape;
    DegreewiseModule M;
    std::vector<std::vector<std::pair<int, Exponents>>> basis; // per degree d-lo

    int index_of(int d, int gen, const Exponents& e) const;

private:
    friend FreeExpansion expand_free(const FreeGradedModule& f, int lo, int hi);
    std::vector<std::map<std::pair<int, Exponents>, int>> idx_;
};

FreeExpansion expand_free(const FreeGradedModule& f, int lo, int hi);

// Quotient of a free module by (alpha) where alpha is a degree-2 element with
// at least one coordinate invertible in the ring; basis monomials omit that
// coordinate's variable. proj[d-lo] is the projection matrix on components.
struct LinearQuotient {
    DegreewiseModule M;
    std::vector<SparseMat> proj;
    std::vector<std::vector<std::pair<int, Exponents>>> basis;
    int unit_idx = -1;
};

// Throws refusal_error when no coordinate of alpha is invertible over the
// coefficient ring.
LinearQuotient quotient_by_linear_form(const FreeExpansion& F, const Weight& alpha);

// Extend a degree-preserving module map from a free source: gen_images[j] is
// the image of generator j, as coordinates in the target component at the
// generator's degree.
std::vector<SparseMat> materialize_free_map(const FreeExpansion& src,
                                            const DegreewiseModule& tgt,
                                            const std::vector<SparseVec>& gen_images);

// Graded submodule of an ambient degreewise module, held as a per-degree
// column basis (free over the ring, echelon, deterministic).
struct GradedSubmodule {
    int lo = 0, hi = -1;
    std::vector<SparseMat> basis; // per degree: ambient_dim x r_d

    int rank_at(int d) const { return (d < lo || d > hi) ? 0 : basis[d - lo].cols(); }
};

// Smallest submodule containing the given per-degree column spans (seeds may
// be empty matrices; seeds.size() must equal the ambient window length).
GradedSubmodule span_closure(const DegreewiseModule& A, const std::vector<SparseMat>& seeds);

// Minimal homogeneous generating set of W (graded Nakayama: a basis of W
// modulo the maximal graded ideal, over Z_(p) also modulo p). Generators are
// columns of the per-degree bases, so they are elements of W given in ambient
// coordinates.
struct MinimalGenerators {
    FreeGradedModule shape;                      // generator degrees, ascending
    std::vector<std::pair<int, SparseVec>> gens; // (degree, ambient coordinates)
};

MinimalGenerators minimal_generators(const DegreewiseModule& A, const GradedSubmodule& W);

// Pivot columns (ascending) of a matrix over a field, chosen greedily from the
// left; used to pick generator lifts deterministically.
std::vector<int> greedy_pivot_columns(const SparseMat& A);

// True iff every column of B lies in the module generated by the columns of A.
bool sparse_span_contains(const SparseMat& A, const SparseMat& B);

// Torsion of coker(W -> ambient) per degree, from Smith normal forms of the
// inclusion: one entry per degree with nontrivial invariant factors, listing
// the positive p-valuations (multiset, ascending). Always empty over a field.
struct TorsionReport {
    std::vector<std::pair<int, std::vector<long>>> entries;
    bool torsion_free() const { return entries.empty(); }
};

TorsionReport quotient_torsion(const DegreewiseModule& A, const GradedSubmodule& W);

} // namespace bmg
