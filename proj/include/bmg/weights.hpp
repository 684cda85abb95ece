#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bmg/scalar.hpp"

namespace bmg {

// An element of the character lattice Y ~ Z^rank, used as an edge label. The
// degree-2 generators of the base polynomial ring are the images of the
// coordinate basis of Y.
using Weight = std::vector<long>;

bool weight_is_zero(const Weight& w);
Weight weight_neg(const Weight& w);
Weight weight_add(const Weight& a, const Weight& b);
Weight weight_sub(const Weight& a, const Weight& b);
Weight weight_scale(long c, const Weight& w);
bool weight_eq(const Weight& a, const Weight& b);
std::string weight_str(const Weight& w); // "[a,b,...]"

// Coordinates of w inside k^rank for the given coefficient ring.
std::vector<Scalar> weight_scalars(const CoeffSpec& spec, const Weight& w);

// True iff the image of w in Y (x) k is zero (over F_p: all coordinates
// divisible by p; over Q or Z_(p): the zero vector).
bool weight_zero_in_k(const CoeffSpec& spec, const Weight& w);

// True iff the images of a and b in Y (x) k are linearly dependent over the
// fraction field (for Z_(p) that field is Q). A zero image counts as
// dependent.
bool weights_dependent_in_k(const CoeffSpec& spec, const Weight& a, const Weight& b);

// True iff some coordinate of w is a unit mod p (equivalently, p does not
// divide gcd of the coordinates).
bool weight_primitive_mod_p(uint64_t p, const Weight& w);

// Index of a coordinate of w that is invertible in the coefficient ring
// (nonzero over Q, not divisible by p otherwise), or -1 when none exists.
int weight_unit_coordinate(const CoeffSpec& spec, const Weight& w);

// Edge labels are stored up to sign: the first nonzero coordinate is made
// positive.
bool weight_is_sign_normalized(const Weight& w);
Weight weight_sign_normalized(const Weight& w);

} // namespace bmg
