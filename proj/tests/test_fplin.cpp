#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "coh/fplin.hpp"

#include <random>

using namespace coh::fplin;

namespace {

SparseMatrix dense(int r, int c, std::vector<std::vector<std::int64_t>> a,
                   const PrimeField& F) {
    return SparseMatrix::from_dense(r, c, a, F);
}

// Brute-force kernel by enumerating all vectors (oracle for small cases).
std::vector<std::vector<Scalar>> enumerate_kernel(const SparseMatrix& m,
                                                  const PrimeField& F) {
    std::vector<std::vector<Scalar>> out;
    int n = m.cols();
    std::vector<Scalar> v(n, 0);
    long long total = 1;
    for (int i = 0; i < n; ++i) total *= F.p();
    for (long long code = 0; code < total; ++code) {
        long long c = code;
        SparseVec sv;
        for (int i = 0; i < n; ++i) {
            v[i] = static_cast<Scalar>(c % F.p());
            c /= F.p();
            if (v[i]) sv.terms.push_back({i, v[i]});
        }
        if (m.apply(sv, F).empty() && !sv.empty()) out.push_back(v);
    }
    return out;
}

}  // namespace

TEST_CASE("prime field validation") {
    CHECK_NOTHROW(PrimeField(2));
    CHECK_NOTHROW(PrimeField(3));
    CHECK_NOTHROW(PrimeField(2147483647));  // 2^31 - 1 is prime
    CHECK_THROWS_AS(PrimeField(1), MathError);
    CHECK_THROWS_AS(PrimeField(4), MathError);
    CHECK_THROWS_AS(PrimeField(91), MathError);
    PrimeField F(7);
    CHECK(F.inv(3) == 5);
    CHECK(F.reduce(-1) == 6);
}

TEST_CASE("rref basic examples") {
    PrimeField F5(5), F3(3);
    SUBCASE("row 2 = 2 * row 1 over F_5") {
        auto r = rref(dense(2, 2, {{1, 2}, {2, 4}}, F5), F5);
        CHECK(r.pivots == std::vector<int>{0});
        CHECK(r.mat.rows() == 1);
        CHECK(r.mat.at(0, 0) == 1);
        CHECK(r.mat.at(0, 1) == 2);
    }
    SUBCASE("identity is fixed") {
        auto id = SparseMatrix::identity(3);
        auto r = rref(id, F3);
        CHECK(r.mat == id);
        CHECK(r.pivots == std::vector<int>{0, 1, 2});
    }
    SUBCASE("zero matrix") {
        auto r = rref(SparseMatrix(2, 2), F3);
        CHECK(r.mat.rows() == 0);
        CHECK(r.pivots.empty());
    }
    SUBCASE("idempotent") {
        auto m = dense(3, 4, {{2, 1, 0, 4}, {1, 1, 1, 1}, {0, 3, 2, 1}}, F5);
        auto r1 = rref(m, F5);
        auto r2 = rref(r1.mat, F5);
        CHECK(r1.mat == r2.mat);
        CHECK(r1.pivots == r2.pivots);
    }
}

TEST_CASE("kernel examples") {
    PrimeField F5(5), F3(3);
    SUBCASE("[[1,2],[2,4]] over F_5: oracle by enumeration") {
        auto m = dense(2, 2, {{1, 2}, {2, 4}}, F5);
        auto ker = kernel(m, F5);
        auto brute = enumerate_kernel(m, F5);
        CHECK(brute.size() == 4);  // 1-dimensional: 4 nonzero vectors
        CHECK(ker.dim() == 1);
        // canonical rref row: (1, 2), the normalization of (3, 1)
        CHECK(ker.basis.at(0, 0) == 1);
        CHECK(ker.basis.at(0, 1) == 2);
        for (auto& v : brute) {
            SparseVec sv;
            for (int i = 0; i < 2; ++i)
                if (v[i]) sv.terms.push_back({i, v[i]});
            CHECK(contains(ker, sv, F5));
        }
    }
    SUBCASE("identity has zero kernel") {
        CHECK(kernel(SparseMatrix::identity(4), F3).dim() == 0);
    }
    SUBCASE("zero map on F_3^2 has full kernel") {
        auto ker = kernel(SparseMatrix(2, 2), F3);
        CHECK(ker.dim() == 2);
        CHECK(ker.basis == SparseMatrix::identity(2));
    }
}

TEST_CASE("image examples") {
    PrimeField F5(5), F3(3);
    CHECK(image(dense(2, 2, {{1, 2}, {2, 4}}, F5), F5).dim() == 1);
    CHECK(image(SparseMatrix::identity(3), F3).dim() == 3);
    CHECK(image(SparseMatrix(2, 2), F3).dim() == 0);
}

TEST_CASE("rank-nullity holds on random matrices, canonical under permutation") {
    std::mt19937 rng(12345);
    for (std::uint32_t p : {2u, 3u, 5u, 7u}) {
        PrimeField F(p);
        for (int trial = 0; trial < 25; ++trial) {
            int rows = 1 + static_cast<int>(rng() % 7);
            int cols = 1 + static_cast<int>(rng() % 7);
            SparseMatrix m(rows, cols);
            for (int r = 0; r < rows; ++r)
                for (int c = 0; c < cols; ++c)
                    if (rng() % 3 == 0) m.add_to(r, c, rng() % p, F);
            CHECK(rank(m, F) + kernel(m, F).dim() == cols);

            // shuffling rows preserves the row space's canonical basis
            std::vector<SparseVec> rowsv;
            for (int r = 0; r < rows; ++r) rowsv.push_back(m.row(r));
            std::shuffle(rowsv.begin(), rowsv.end(), rng);
            auto shuffled = SparseMatrix::from_rows(cols, rowsv);
            CHECK(rref(m, F).mat == rref(shuffled, F).mat);
        }
    }
}

TEST_CASE("quotient examples") {
    PrimeField F3(3);
    SUBCASE("F_3^2 by span{(1,0)}") {
        auto amb = Subspace::full(2);
        auto sub = Subspace::span(dense(1, 2, {{1, 0}}, F3), F3);
        auto q = quotient(amb, sub, F3);
        CHECK(q.reps.rows() == 1);
        CHECK(q.reps.at(0, 1) == 1);  // representative (0,1)
        CHECK(q.reps.at(0, 0) == 0);
        // projection kills the subspace
        CHECK(q.projection.apply(unit_vec(0), F3).empty());
    }
    SUBCASE("sub == ambient") {
        auto amb = Subspace::full(3);
        auto q = quotient(amb, amb, F3);
        CHECK(q.reps.rows() == 0);
    }
    SUBCASE("sub == 0 gives identity projection") {
        auto amb = Subspace::full(3);
        auto q = quotient(amb, Subspace::zero(3), F3);
        CHECK(q.projection == SparseMatrix::identity(3));
    }
    SUBCASE("not a subspace") {
        auto amb = Subspace::span(dense(1, 2, {{1, 0}}, F3), F3);
        auto sub = Subspace::span(dense(1, 2, {{0, 1}}, F3), F3);
        CHECK_THROWS_AS(quotient(amb, sub, F3), MathError);
    }
}

TEST_CASE("subquotient homology examples") {
    PrimeField F3(3), F5(5);
    SUBCASE("zero differentials on F_3^2") {
        auto H = subquotient_homology(SparseMatrix(2, 1), SparseMatrix(1, 2), F3);
        CHECK(H.dim == 2);
    }
    SUBCASE("d_in identity kills homology") {
        auto H = subquotient_homology(SparseMatrix::identity(2), SparseMatrix(1, 2), F3);
        CHECK(H.dim == 0);
    }
    SUBCASE("d_out = [[1,2],[2,4]] over F_5") {
        auto H = subquotient_homology(SparseMatrix(2, 1),
                                      dense(2, 2, {{1, 2}, {2, 4}}, F5), F5);
        CHECK(H.dim == 1);
    }
    SUBCASE("not a complex") {
        CHECK_THROWS_AS(subquotient_homology(SparseMatrix::identity(2),
                                             SparseMatrix::identity(2), F3),
                        MathError);
    }
}

TEST_CASE("solve and coordinates") {
    PrimeField F7(7);
    auto m = dense(3, 3, {{1, 2, 3}, {0, 1, 4}, {0, 0, 0}}, F7);
    SparseVec b;
    b.terms = {{0, 5}, {1, 2}};
    auto x = solve(m, b, F7);
    REQUIRE(x.has_value());
    CHECK(m.apply(*x, F7) == b);

    SparseVec bad = unit_vec(2);
    CHECK(!solve(m, bad, F7).has_value());

    auto S = Subspace::span(dense(2, 3, {{1, 0, 3}, {0, 1, 5}}, F7), F7);
    SparseVec v = vec_add_scaled(S.basis.row(0), S.basis.row(1), 4, F7);
    auto c = coordinates(S, v, F7);
    REQUIRE(c.has_value());
    CHECK(c->at(0) == 1);
    CHECK(c->at(1) == 4);
    CHECK(!coordinates(S, unit_vec(2), F7).has_value());
}

TEST_CASE("sum, intersect, preimage") {
    PrimeField F5(5);
    auto a = Subspace::span(dense(1, 3, {{1, 1, 0}}, F5), F5);
    auto b = Subspace::span(dense(1, 3, {{0, 1, 1}}, F5), F5);
    auto s = subspace_sum(a, b, F5);
    CHECK(s.dim() == 2);
    auto i = subspace_intersect(s, Subspace::full(3), F5);
    CHECK(i == s);
    CHECK(subspace_intersect(a, b, F5).dim() == 0);

    auto M = dense(2, 3, {{1, 0, 0}, {0, 1, 0}}, F5);
    auto pre = preimage(M, Subspace::zero(2), Subspace::full(3), F5);
    CHECK(pre.dim() == 1);  // the e_3 line
    CHECK(pre.basis.at(0, 2) == 1);
}
