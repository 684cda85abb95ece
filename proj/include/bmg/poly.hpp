#pragma once

#include <map>
#include <string>
#include <vector>

#include "bmg/scalar.hpp"

namespace bmg {

// Laurent polynomial in q with integer coefficients. q^j corresponds to
// internal degree 2j throughout the library.
class QPolynomial {
public:
    QPolynomial() = default;
    static QPolynomial q_power(int j, long long c = 1);

    long long coeff(int j) const;
    void set_coeff(int j, long long c);
    bool is_zero() const { return c_.empty(); }
    int min_exp() const; // throws on zero
    int max_exp() const; // throws on zero
    long long eval_at_one() const;

    QPolynomial operator+(const QPolynomial& o) const;
    QPolynomial operator-(const QPolynomial& o) const;
    QPolynomial operator*(const QPolynomial& o) const;
    QPolynomial& operator+=(const QPolynomial& o);
    QPolynomial& operator-=(const QPolynomial& o);
    QPolynomial shifted(int j) const; // * q^j
    bool operator==(const QPolynomial& o) const { return c_ == o.c_; }
    bool operator!=(const QPolynomial& o) const { return c_ != o.c_; }

    // True iff coeff(j) == coeff(s - j) for all j.
    bool palindromic_with_sum(int s) const;

    const std::map<int, long long>& terms() const { return c_; }
    std::string str() const; // e.g. "1 + 2*q + q^3", "0"

private:
    std::map<int, long long> c_;
};

// Exponent vector of a monomial in the degree-2 polynomial generators.
using Exponents = std::vector<int>;

int exponents_total(const Exponents& e);

// Order used everywhere monomials are enumerated or serialized: by total
// degree ascending, then lexicographically descending on the exponent vector.
bool monomial_less(const Exponents& a, const Exponents& b);

struct MonomialOrder {
    bool operator()(const Exponents& a, const Exponents& b) const { return monomial_less(a, b); }
};

// All monomials in `rank` variables of the given internal degree (each
// variable has internal degree 2), listed in the order above. Odd or negative
// degrees give an empty list.
std::vector<Exponents> monomial_basis(int rank, int internal_degree);

// Element of the base polynomial ring over one coefficient ring.
class GradedPolynomial {
public:
    GradedPolynomial() = default;
    explicit GradedPolynomial(CoeffSpec spec, int rank) : spec_(spec), rank_(rank) {}

    static GradedPolynomial constant(CoeffSpec spec, int rank, const Scalar& c);
    static GradedPolynomial variable(CoeffSpec spec, int rank, int i);
    // Degree-2 element with the given coordinates.
    static GradedPolynomial linear(CoeffSpec spec, const std::vector<Scalar>& coords);

    const CoeffSpec& spec() const { return spec_; }
    int rank() const { return rank_; }
    bool is_zero() const { return t_.empty(); }
    Scalar coeff(const Exponents& e) const;
    void add_term(const Exponents& e, const Scalar& c);

    GradedPolynomial operator+(const GradedPolynomial& o) const;
    GradedPolynomial operator-(const GradedPolynomial& o) const;
    GradedPolynomial operator*(const GradedPolynomial& o) const;
    GradedPolynomial& operator+=(const GradedPolynomial& o);
    GradedPolynomial scaled(const Scalar& c) const;
    bool operator==(const GradedPolynomial& o) const;

    // Internal degree if homogeneous (constants: 0), -1 otherwise. Zero: 0.
    int homogeneous_degree() const;

    const std::map<Exponents, Scalar, MonomialOrder>& terms() const { return t_; }
    std::string str() const; // e.g. "t0^2 - 2*t0*t1", "0"

private:
    CoeffSpec spec_{};
    int rank_ = 0;
    std::map<Exponents, Scalar, MonomialOrder> t_;
};

// True iff f lies in the ideal generated by the degree-2 element with the
// given coordinates; unit_idx must point at an invertible coordinate, which
// makes the reduction exact over every supported ring.
bool divisible_by_linear(const GradedPolynomial& f, const std::vector<Scalar>& alpha, int unit_idx);

} // namespace bmg
