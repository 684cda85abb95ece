#include "doctest.h"

#include <random>

#include "bmg/coeff.hpp"
#include "bmg/linalg.hpp"
#include "bmg/scalar.hpp"
#include "oracles.hpp"

using namespace bmg;

TEST_CASE("coefficient spec grammar") {
    CHECK(CoeffSpec::parse("Q").kind == CoeffKind::Rationals);
    CHECK(CoeffSpec::parse("Fp:7").p == 7);
    CHECK(CoeffSpec::parse("Fp:7").kind == CoeffKind::PrimeField);
    CHECK(CoeffSpec::parse("Zp:5").kind == CoeffKind::PLocalIntegers);
    CHECK(CoeffSpec::parse("Zp:5").p == 5);
    CHECK(CoeffSpec::parse("Q").str() == "Q");
    CHECK(CoeffSpec::parse("Fp:11").str() == "Fp:11");
    CHECK(CoeffSpec::parse("Zp:3").str() == "Zp:3");

    CHECK(CoeffSpec::parse("Q").is_field());
    CHECK(CoeffSpec::parse("Fp:2").is_field());
    CHECK_FALSE(CoeffSpec::parse("Zp:2").is_field());

    CHECK_THROWS_AS(CoeffSpec::parse("R"), refusal_error);
    CHECK_THROWS_AS(CoeffSpec::parse("Fp:4"), refusal_error);   // not prime
    CHECK_THROWS_AS(CoeffSpec::parse("Fp:1"), refusal_error);
    CHECK_THROWS_AS(CoeffSpec::parse("Zp:abc"), refusal_error);
    CHECK_THROWS_AS(CoeffSpec::parse("Fp:"), refusal_error);
    CHECK_THROWS_AS(CoeffSpec::parse(""), refusal_error);
}

TEST_CASE("rational scalar arithmetic is exact") {
    auto Q = CoeffSpec::rationals();
    Scalar a = Scalar::parse(Q, "2/3");
    Scalar b = Scalar::parse(Q, "-1/6");
    CHECK((a + b).str() == "1/2");
    CHECK((a * b).str() == "-1/9");
    CHECK((a - b).str() == "5/6");
    CHECK((a / b).str() == "-4");
    CHECK(Scalar::parse(Q, a.str()) == a);
    CHECK(Scalar::from_int(Q, 0).is_zero());
    CHECK(Scalar::one(Q).is_unit());
    CHECK_THROWS_AS(a / Scalar::zero(Q), refusal_error);
}

TEST_CASE("prime field scalars") {
    auto F7 = CoeffSpec::prime_field(7);
    Scalar a = Scalar::from_int(F7, 3);
    Scalar b = Scalar::from_int(F7, 5);
    CHECK((a + b).residue() == 1);
    CHECK((a * b).residue() == 1);
    CHECK((-a).residue() == 4);
    CHECK(a.inverse().residue() == 5);
    CHECK((a / b) == a * b.inverse());
    CHECK(Scalar::from_int(F7, 14).is_zero());
    CHECK(Scalar::parse(F7, a.str()) == a);
    // 1/7 does not exist in F_7.
    CHECK_THROWS_AS(Scalar::from_mpq(F7, mpq_class(1, 7)), refusal_error);
}

TEST_CASE("p-local integers: units, valuations, exact division") {
    auto Z2 = CoeffSpec::p_local(2);
    Scalar half = Scalar::parse(Z2, "1/3");   // 3 is a unit in Z_(2)
    CHECK(half.is_unit());
    CHECK_THROWS_AS(Scalar::parse(Z2, "1/2"), refusal_error); // not in the ring
    Scalar four = Scalar::from_int(Z2, 4);
    Scalar six = Scalar::from_int(Z2, 6);
    CHECK(four.p_valuation() == 2);
    CHECK(six.p_valuation() == 1);
    CHECK_FALSE(six.is_unit());
    CHECK((six / Scalar::from_int(Z2, 3)).str() == "2");
    CHECK((four / Scalar::from_int(Z2, 2)).str() == "2");
    // 3/4 leaves Z_(2).
    CHECK_THROWS_AS(Scalar::from_int(Z2, 3) / four, refusal_error);
    // Residue map Z_(2) -> F_2.
    CHECK(reduce_mod_p(half).spec().kind == CoeffKind::PrimeField);
    CHECK(reduce_mod_p(six).is_zero());
    CHECK_FALSE(reduce_mod_p(half).is_zero());
}

namespace {

ScalarMatrix from_ints(const CoeffSpec& spec, const std::vector<std::vector<long>>& rows) {
    int m = static_cast<int>(rows.size());
    int n = m ? static_cast<int>(rows[0].size()) : 0;
    ScalarMatrix A(spec, m, n);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) A.at(i, j) = Scalar::from_int(spec, rows[i][j]);
    return A;
}

} // namespace

TEST_CASE("smith normal form over Z_(2) tracks 2-valuations only") {
    auto Z2 = CoeffSpec::p_local(2);
    auto A = from_ints(Z2, {{2, 4}, {6, 8}});
    auto snf = smith_normal_form(A);
    REQUIRE(snf.diagonal.size() == 2);
    CHECK(snf.diagonal[0].p_valuation() == 1);
    CHECK(snf.diagonal[1].p_valuation() == 2); // det = -8, so valuations 1,2
    CHECK(snf.U * A * snf.V == snf.D);
    // Valuations ascend (divisibility chain).
    CHECK(snf.diagonal[0].p_valuation() <= snf.diagonal[1].p_valuation());
}

TEST_CASE("kernel and solve over different rings") {
    auto Q = CoeffSpec::rationals();
    auto A = from_ints(Q, {{1, 2, 3}, {2, 4, 6}});
    auto K = kernel_basis(A);
    CHECK(K.size() == 2);
    for (const auto& v : K) {
        auto img = A.apply(v);
        for (const auto& s : img) CHECK(s.is_zero());
    }
    auto b = std::vector<Scalar>{Scalar::from_int(Q, 1), Scalar::from_int(Q, 2)};
    auto x = solve_linear(A, b);
    REQUIRE(x.has_value());
    auto img = A.apply(*x);
    CHECK(img[0] == Scalar::from_int(Q, 1));
    CHECK(img[1] == Scalar::from_int(Q, 2));
    auto bad = std::vector<Scalar>{Scalar::from_int(Q, 1), Scalar::from_int(Q, 3)};
    CHECK_FALSE(solve_linear(A, bad).has_value());

    // Over Z_(2): x + 2y = 1 is solvable, 2x = 1 is not.
    auto Z2 = CoeffSpec::p_local(2);
    auto B = from_ints(Z2, {{2}});
    CHECK_FALSE(solve_linear(B, {Scalar::one(Z2)}).has_value());
    CHECK(solve_linear(B, {Scalar::from_int(Z2, 6)}).has_value());
}

TEST_CASE("sparse kernel is saturated over Z_(p)") {
    auto Z3 = CoeffSpec::p_local(3);
    // x = 3y has primitive kernel generator (3,1), not (1,1/3).
    SparseMat A(Z3, 1, 2);
    A.set(0, 0, Scalar::one(Z3));
    A.set(0, 1, Scalar::from_int(Z3, -3));
    auto K = sparse_kernel(A);
    REQUIRE(K.cols() == 1);
    Scalar k0 = K.get(0, 0), k1 = K.get(1, 0);
    CHECK(k0 == Scalar::from_int(Z3, 3));
    CHECK(k1 == Scalar::one(Z3));
    // The saturation matters: (3,1) generates the full kernel lattice.
    CHECK(k1.is_unit());
}

TEST_CASE("sparse column basis is not saturated over Z_(p)") {
    auto Z2 = CoeffSpec::p_local(2);
    SparseMat A(Z2, 2, 2);
    A.set(0, 0, Scalar::from_int(Z2, 2));
    A.set(1, 1, Scalar::from_int(Z2, 2));
    auto B = sparse_column_basis(A);
    REQUIRE(B.cols() == 2);
    // The span of the columns is 2*Z_(2)^2; the basis must stay inside it.
    for (int j = 0; j < 2; ++j) {
        for (int i = 0; i < 2; ++i) {
            Scalar v = B.get(i, j);
            if (!v.is_zero()) CHECK(v.p_valuation() >= 1);
        }
    }
}

TEST_CASE("sparse echelon rank agrees with a dense rational oracle") {
    auto Q = CoeffSpec::rationals();
    std::mt19937 rng(20240817);
    std::uniform_int_distribution<int> entry(-4, 4);
    for (int trial = 0; trial < 25; ++trial) {
        int m = 1 + static_cast<int>(rng() % 6), n = 1 + static_cast<int>(rng() % 6);
        SparseMat A(Q, m, n);
        std::vector<std::vector<mpq_class>> dense(m, std::vector<mpq_class>(n, 0));
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) {
                int v = entry(rng);
                if (v == 0) continue;
                A.set(i, j, Scalar::from_int(Q, v));
                dense[i][j] = v;
            }
        CHECK(sparse_rank(A) == oracle::rank_mpq(dense));
        auto K = sparse_kernel(A);
        CHECK(K.cols() == n - oracle::rank_mpq(dense));
        // Every kernel column annihilates A.
        for (int j = 0; j < K.cols(); ++j) {
            std::vector<Scalar> v(n, Scalar::zero(Q));
            for (int i = 0; i < n; ++i) v[i] = K.get(i, j);
            for (auto& s : A.apply(v)) CHECK(s.is_zero());
        }
    }
}

TEST_CASE("sparse solve finds ring solutions exactly") {
    auto Z5 = CoeffSpec::p_local(5);
    SparseMat A(Z5, 2, 2);
    A.set(0, 0, Scalar::from_int(Z5, 5));
    A.set(1, 1, Scalar::from_int(Z5, 2)); // unit
    SparseMat B(Z5, 2, 1);
    B.set(0, 0, Scalar::from_int(Z5, 10));
    B.set(1, 0, Scalar::from_int(Z5, 3));
    auto X = sparse_solve(A, B);
    REQUIRE(X.has_value());
    CHECK(X->get(0, 0) == Scalar::from_int(Z5, 2));
    CHECK(X->get(1, 0) == Scalar::parse(Z5, "3/2"));
    SparseMat Bad(Z5, 2, 1);
    Bad.set(0, 0, Scalar::one(Z5)); // 5x = 1 has no solution in Z_(5)
    CHECK_FALSE(sparse_solve(A, Bad).has_value());
}
