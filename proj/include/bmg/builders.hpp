#pragma once

#include <map>
#include <string>
#include <vector>

#include "bmg/graph.hpp"

namespace bmg {

// Generalized Cartan matrix with entries a[i][j] = <alpha_j, alpha_i^vee>,
// so the simple reflection acts by s_i(alpha_j) = alpha_j - a[i][j] alpha_i.
struct CartanMatrix {
    int l = 0;
    std::vector<std::vector<int>> a;

    // Accepts "A1".."A9", "B2".."B9", "C2"..., "D4"..., "E6","E7","E8",
    // "F4", "G2" (crystallographic finite types).
    static CartanMatrix from_type(const std::string& type);
    static CartanMatrix from_entries(int l, const std::vector<std::vector<int>>& entries);

    // Structural GCM checks; throws refusal_error on violation.
    void check_shape() const;
    bool is_finite_type() const; // symmetrizable with positive-definite symmetrization
    void require_finite_type() const;
    int coxeter_number() const;  // 2 * (number of positive roots) / l
};

struct Root {
    Weight root;   // coordinates in the simple-root basis
    Weight coroot; // coordinates in the simple-coroot basis
};

struct RootSystem {
    CartanMatrix A;
    std::vector<Root> positive;

    static RootSystem build(const CartanMatrix& A); // requires finite type
    // <alpha, mu> for alpha given by root coordinates and mu by fundamental
    // coweight coordinates (mu_i = <alpha_i, mu>).
    static long pair_root_fcw(const Weight& root_coords, const std::vector<long>& mu);
    // Fundamental-coweight coordinates of a coroot given in simple-coroot coordinates.
    std::vector<long> coroot_to_fcw(const Weight& coroot_coords) const;
};

// Finite Weyl group, elements stored as integer matrices acting on the root
// lattice (column convention: columns are images of the simple roots).
class WeylGroup {
public:
    CartanMatrix A;
    RootSystem rs;
    std::vector<std::vector<long>> mats; // l*l row-major
    std::vector<int> len;
    std::vector<int> refl_elem;          // element index of each positive root's reflection
    int identity = 0;
    int w0 = -1;

    static WeylGroup build(const CartanMatrix& A);

    int size() const { return static_cast<int>(mats.size()); }
    int lookup(const std::vector<long>& m) const; // -1 when absent
    int mult(int x, int y) const;
    int simple(int i) const { return simple_[i]; } // element index of s_i (0-based i)
    int from_word(const std::vector<int>& word_1based) const;

    // Lexicographically smallest reduced word (1-based letters); empty for e.
    std::vector<int> reduced_word(int x) const;
    std::string id_of(int x) const; // space-separated word, "e" for identity

    bool bruhat_leq(int x, int y) const { return bruhat_[x][y]; }
    // Image of a root-lattice vector under element x.
    Weight act(int x, const Weight& v) const;

private:
    std::vector<int> simple_;
    std::vector<std::vector<char>> bruhat_;
    std::map<std::vector<long>, int> index_map_;
};

// Moment graph of a (possibly parabolic) Schubert variety: vertices are the
// minimal-length coset representatives below `top`, edges come from left
// multiplication by reflections, labelled by the positive root.
MomentGraph finite_bruhat_graph(const CartanMatrix& A, const std::vector<int>& top_word,
                                const std::vector<int>& parabolic_1based);

// Lattice points of the (co)weight side of the loop Grassmannian, in
// fundamental-coweight coordinates m_i = <alpha_i, mu>.
class AffinePoints {
public:
    explicit AffinePoints(const CartanMatrix& A);

    const RootSystem& roots() const { return rs_; }
    long iwahori_length(const std::vector<long>& mu) const;
    std::vector<long> dominant_rep(std::vector<long> mu) const;
    // lambda - mu as nonnegative integer coroot coordinates (both dominant)?
    bool dominance_leq(const std::vector<long>& mu_dom, const std::vector<long>& lambda_dom) const;
    // Is mu in the coroot lattice (identity component)?
    bool in_coroot_lattice(const std::vector<long>& mu) const;
    std::vector<std::vector<long>> weyl_orbit(const std::vector<long>& mu) const;
    static std::string id_of(const std::vector<long>& mu);

    // Moment graph on a finite set of points: edges mu -- nu whenever
    // nu - mu is a nonzero multiple of a coroot; label alpha - n delta with n
    // the level of the reflecting wall; direction by increasing length.
    MomentGraph graph_on_points(std::vector<std::vector<long>> pts) const;

    // Identity-component points of length <= cutoff.
    std::vector<std::vector<long>> points_by_cutoff(int cutoff) const;
    // All points whose dominant representative precedes lambda in dominance.
    std::vector<std::vector<long>> points_below(const std::vector<long>& lambda_dom) const;

private:
    CartanMatrix A_;
    RootSystem rs_;
};

MomentGraph affine_grassmannian_graph(const CartanMatrix& A, int cutoff);

} // namespace bmg
