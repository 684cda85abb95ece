#pragma once

#include <cstdint>
#include <gmpxx.h>
#include <string>

#include "bmg/coeff.hpp"

namespace bmg {

// One element of a coefficient ring, tagged by its CoeffSpec. Rationals and
// PLocalIntegers store an exact mpq (for Z_(p) the denominator is kept coprime
// to p by construction); PrimeField stores a residue in [0, p).
class Scalar {
public:
    Scalar() = default;
    explicit Scalar(CoeffSpec spec) : spec_(spec) {}

    static Scalar zero(CoeffSpec spec) { return Scalar(spec); }
    static Scalar one(CoeffSpec spec) { return from_int(spec, 1); }
    static Scalar from_int(CoeffSpec spec, long v);
    // Checked: refuses a denominator divisible by p (Z_(p)) or not invertible (F_p).
    static Scalar from_mpq(CoeffSpec spec, const mpq_class& v);
    static Scalar parse(CoeffSpec spec, const std::string& text);

    const CoeffSpec& spec() const { return spec_; }
    bool is_zero() const;
    bool is_one() const;
    bool is_unit() const;
    // p-valuation; 0 for all nonzero field elements, throws on zero input.
    long p_valuation() const;

    Scalar operator-() const;
    Scalar& operator+=(const Scalar& o);
    Scalar& operator-=(const Scalar& o);
    Scalar& operator*=(const Scalar& o);
    friend Scalar operator+(Scalar a, const Scalar& b) { a += b; return a; }
    friend Scalar operator-(Scalar a, const Scalar& b) { a -= b; return a; }
    friend Scalar operator*(Scalar a, const Scalar& b) { a *= b; return a; }
    // Exact division; throws refusal_error when the quotient leaves the ring.
    Scalar operator/(const Scalar& o) const;
    Scalar inverse() const;
    bool operator==(const Scalar& o) const;
    bool operator!=(const Scalar& o) const { return !(*this == o); }

    // Serialization: "num/den" (den omitted when 1) or "r mod p".
    std::string str() const;

    const mpq_class& rat() const { return q_; }
    std::uint64_t residue() const { return r_; }

    friend Scalar reduce_mod_p(const Scalar& s);

private:
    CoeffSpec spec_{};
    mpq_class q_{0};
    std::uint64_t r_ = 0;
};

// Z_(p) -> F_p along the residue map.
Scalar reduce_mod_p(const Scalar& s);

} // namespace bmg
