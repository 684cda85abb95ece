#pragma once

// Independent cross-check implementations used by the unit and acceptance
// suites. Everything here is deliberately written from first principles with
// dense GMP arithmetic and closed-form combinatorics, sharing no code with
// the library's sparse/graded machinery, so agreement is meaningful.

#include <gmpxx.h>

#include <map>
#include <string>
#include <vector>

namespace oracle {

// Rank of a dense rational matrix by plain Gaussian elimination.
int rank_mpq(std::vector<std::vector<mpq_class>> rows);

// Number of monomials of the given internal degree (variables have internal
// degree 2) in `rank` variables: C(deg/2 + rank - 1, rank - 1).
long long monomial_count(int rank, int internal_degree);

// Full character of the indecomposable sl2 tilting module T(lambda) in
// characteristic p, for 0 <= lambda <= 2p-2: weight -> multiplicity.
//   0 <= lambda <= p-1   : chi(lambda)
//   p <= lambda <= 2p-2  : chi(lambda) + chi(2p-2-lambda)
std::map<long, long> sl2_tilting_character(long lambda, long p);

// Pinned Kazhdan-Lusztig values (as canonical strings) for hand-checkable
// intervals, keyed by (bottom id, top id). Words use 1-based letters.
//   - dihedral groups: every polynomial is 1
//   - type A3, top 2132: all 1 except P(e)=P(2)=1+q
std::map<std::pair<std::string, std::string>, std::string> pinned_kl_a3_2132();

} // namespace oracle
