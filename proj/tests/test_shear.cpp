#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "coh/examples.hpp"
#include "coh/shear.hpp"

using namespace coh::shear;
namespace graded = coh::graded;
namespace hopf = coh::hopf;
namespace cobar = coh::cobar;
namespace examples = coh::examples;
namespace fplin = coh::fplin;
using coh::graded::Label;
using coh::graded::Monomial;
using coh::hopf::Comodule;

namespace {

bool is_identity(const graded::GradedMap& f, const fplin::PrimeField& F) {
    return graded::map_equal(f, graded::identity_map(f.source));
}

}  // namespace

TEST_CASE("single shear on the unit slot is the coaction") {
    auto H = examples::exterior_family(3, 1, 10);
    auto M = hopf::regular_comodule(H, true);
    auto S = shear(M);
    // S(1 (x) m) = psi(m): column of (1, m) equals psi's column reindexed
    for (int u = 0; u <= 10; ++u) {
        for (int im = 0; im < M.space->dim(u); ++im) {
            Label src;
            src.factors.push_back(Monomial{});
            for (auto& f : M.space->label(u, im).factors) src.factors.push_back(f);
            int col = S.space->index_of(u, src);
            REQUIRE(col >= 0);
            auto terms = hopf::coaction_terms(M, u, im);
            auto b = S.map.block_or_zero(u);
            long long nnz = 0;
            for (int r = 0; r < b.rows(); ++r)
                if (b.at(r, col)) ++nnz;
            CHECK(nnz == static_cast<long long>(terms.size()));
            for (auto& t : terms) {
                Label out;
                out.factors.push_back(t.g);
                for (auto& f : M.space->label(t.u2, t.i2).factors)
                    out.factors.push_back(f);
                CHECK(b.at(S.space->index_of(u, out), col) == t.coef);
            }
        }
    }
}

TEST_CASE("S(tau0 (x) tau0) = tau0 (x) tau0 in E[tau0]") {
    auto H = examples::exterior_one(3, "tau0", 1, 6);
    auto M = hopf::regular_comodule(H, true);
    auto S = shear(M);
    Monomial t{{{0, 1}}};
    int col = S.space->index_of(2, Label{{t, t}});
    REQUIRE(col >= 0);
    auto b = S.map.block_or_zero(2);
    // tau0 tau0 (x) 1 dies (tau0^2 = 0), leaving tau0 (x) tau0
    CHECK(b.at(col, col) == 1);
    long long nnz = 0;
    for (int r = 0; r < b.rows(); ++r)
        if (b.at(r, col)) ++nnz;
    CHECK(nnz == 1);
}

TEST_CASE("inverse pairs S S^{-1} = id on all slices") {
    auto H = examples::exterior_family(3, 1, 8);
    for (bool left : {true, false}) {
        auto M = hopf::regular_comodule(H, left);
        if (left) {
            auto S = shear(M), Si = shear_inv(M);
            CHECK(is_identity(graded::compose(S.map, Si.map, H->F), H->F));
            CHECK(is_identity(graded::compose(Si.map, S.map, H->F), H->F));
        } else {
            auto S = shear_c(M), Si = shear_c_inv(M);
            CHECK(is_identity(graded::compose(S.map, Si.map, H->F), H->F));
            CHECK(is_identity(graded::compose(Si.map, S.map, H->F), H->F));
        }
    }
}

TEST_CASE("closed forms equal composed single shears (the appendix formulas)") {
    // exterior-split flavored, with a nontrivial antipode exercise at p = 3
    auto H = examples::exterior_family(3, 1, 7);
    auto ML = hopf::regular_comodule(H, true);
    auto MR = hopf::regular_comodule(H, false);
    for (int n = 1; n <= 3; ++n) {
        CAPTURE(n);
        CHECK(graded::map_equal(iterated_shear(ML, n).map, composed_shear(ML, n)));
        CHECK(graded::map_equal(iterated_shear_inv(ML, n).map,
                                composed_shear_inv(ML, n)));
        CHECK(graded::map_equal(iterated_shear_c(MR, n).map,
                                composed_shear_c(MR, n)));
        CHECK(graded::map_equal(iterated_shear_c_inv(MR, n).map,
                                composed_shear_c_inv(MR, n)));
    }
}

TEST_CASE("closed forms vs composites on the truncated dual Steenrod algebra") {
    auto A = examples::dual_steenrod(3, 1, 9);
    auto ML = hopf::regular_comodule(A, true);
    auto MR = hopf::regular_comodule(A, false);
    for (int n = 1; n <= 3; ++n) {
        CAPTURE(n);
        CHECK(graded::map_equal(iterated_shear(ML, n).map, composed_shear(ML, n)));
        CHECK(graded::map_equal(iterated_shear_inv(ML, n).map,
                                composed_shear_inv(ML, n)));
        CHECK(graded::map_equal(iterated_shear_c(MR, n).map,
                                composed_shear_c(MR, n)));
        CHECK(graded::map_equal(iterated_shear_c_inv(MR, n).map,
                                composed_shear_c_inv(MR, n)));
    }
}

TEST_CASE("iterated inverse pairs S^n S^{-n} = id (nontrivial antipode identity)") {
    auto A = examples::dual_steenrod(3, 1, 8);
    auto ML = hopf::regular_comodule(A, true);
    auto MR = hopf::regular_comodule(A, false);
    for (int n = 2; n <= 3; ++n) {
        CAPTURE(n);
        auto S = iterated_shear(ML, n), Si = iterated_shear_inv(ML, n);
        CHECK(is_identity(graded::compose(S.map, Si.map, A->F), A->F));
        CHECK(is_identity(graded::compose(Si.map, S.map, A->F), A->F));
        auto Sc = iterated_shear_c(MR, n), Sci = iterated_shear_c_inv(MR, n);
        CHECK(is_identity(graded::compose(Sc.map, Sci.map, A->F), A->F));
        CHECK(is_identity(graded::compose(Sci.map, Sc.map, A->F), A->F));
    }
}

TEST_CASE("naturality: S^n commutes with maps induced by comodule morphisms") {
    // N -> N' the inclusion k -> Gamma (unit), a comodule map
    auto H = examples::exterior_family(3, 1, 8);
    auto k = hopf::trivial_comodule(H, true);
    auto reg = hopf::regular_comodule(H, true);
    for (int n = 1; n <= 2; ++n) {
        auto Sk = iterated_shear(k, n);
        auto Sr = iterated_shear(reg, n);
        auto idG = graded::identity_map(H->space);
        std::vector<const graded::GradedMap*> maps;
        for (int i = 0; i < n; ++i) maps.push_back(&idG);
        maps.push_back(&H->unit_map());
        auto incl = graded::tensor_map(maps, H->F);
        hopf::reanchor(incl, Sk.space, Sr.space);
        CHECK(graded::map_equal(graded::compose(Sr.map, incl, H->F),
                                graded::compose(incl, Sk.map, H->F)));
    }
}

TEST_CASE("cosimplicial shear isomorphism D_Delta -> D_L") {
    auto H = examples::exterior_family(3, 1, 8);
    auto k = hopf::trivial_comodule(H, true);
    auto GA = hopf::gamma_as_comodule_algebra(H);
    auto DD = cobar::build_DDelta(GA, k, 3);
    auto DL = cobar::build_DL(H, k, 3);
    auto iso = cosimplicial_shear_iso(DD, DL, k);
    CHECK(iso.report.all_passed());

    SUBCASE("induced Cotor dimensions agree between the two models") {
        auto altD = cobar::alternating_sum_complex(DD, H->F);
        auto altL = cobar::alternating_sum_complex(DL, H->F);
        for (int n = 0; n + 1 < 3; ++n)
            for (int u = 0; u <= 8; ++u) {
                int d1 = altD.terms[n]->dim(u);
                if (!d1) continue;
                fplin::SparseMatrix inD =
                    n == 0 ? fplin::SparseMatrix(d1, 0)
                           : altD.d[n - 1].block_or_zero(u);
                fplin::SparseMatrix inL =
                    n == 0 ? fplin::SparseMatrix(d1, 0)
                           : altL.d[n - 1].block_or_zero(u);
                auto HD = fplin::subquotient_homology(
                    inD, altD.d[n].block_or_zero(u), H->F);
                auto HL = fplin::subquotient_homology(
                    inL, altL.d[n].block_or_zero(u), H->F);
                CHECK(HD.dim == HL.dim);
            }
    }
}

TEST_CASE("with the dual Steenrod algebra the cosimplicial iso still commutes") {
    auto A = examples::dual_steenrod(3, 1, 9);
    auto k = hopf::trivial_comodule(A, true);
    auto GA = hopf::gamma_as_comodule_algebra(A);
    auto DD = cobar::build_DDelta(GA, k, 2);
    auto DL = cobar::build_DL(A, k, 2);
    CHECK(cosimplicial_shear_iso(DD, DL, k).report.all_passed());
}

TEST_CASE("shear restricts to Phi (x) M -> Gamma box_Sigma M") {
    SUBCASE("M = k: the identity of Phi") {
        auto G = examples::exterior_family(3, 1, 10);
        auto [S, q] = hopf::quotient_hopf(G, {{"tau1", 1}});
        auto phi = hopf::comodule_algebra_from_cotensor(G, S, q);
        auto k = hopf::trivial_comodule(G, true);
        auto rs = shear_to_cotensor(G, S, q, phi.Phi, k);
        CHECK(rs.report.all_passed());
        for (int u = 0; u <= 10; ++u)
            CHECK(rs.source.space->dim(u) == phi.Phi.com.space->dim(u));
    }
    SUBCASE("exterior-split with M = Gamma, window 10") {
        auto G = examples::exterior_family(3, 1, 10);
        auto [S, q] = hopf::quotient_hopf(G, {{"tau1", 1}});
        auto phi = hopf::comodule_algebra_from_cotensor(G, S, q);
        auto M = hopf::regular_comodule(G, true);
        CHECK(shear_to_cotensor(G, S, q, phi.Phi, M).report.all_passed());
    }
    SUBCASE("truncated A at p=3, M = Phi-as-comodule, through 14") {
        auto A = examples::dual_steenrod(3, 1, 14);
        auto [S, q] = hopf::quotient_hopf(A, {{"xi1", 1}, {"tau1", 1}});
        auto phi = hopf::comodule_algebra_from_cotensor(A, S, q);
        CHECK(shear_to_cotensor(A, S, q, phi.Phi, phi.Phi.com).report.all_passed());
    }
    SUBCASE("negative control: a non-invariant target reports a witness") {
        auto G = examples::exterior_family(3, 1, 10);
        auto [S, q] = hopf::quotient_hopf(G, {{"tau1", 1}});
        auto phi = hopf::comodule_algebra_from_cotensor(G, S, q);
        auto M = hopf::regular_comodule(G, true);
        auto src = hopf::kron_sub(M.space, phi.Phi.sub, false, G->F);
        // wrong target: a random coordinate subspace of Gamma (x) M
        std::map<int, fplin::Subspace> wrong;
        wrong[0] = fplin::Subspace::full(src.ambient->dim(0));
        auto tgt = graded::make_sub(src.ambient, wrong);
        auto Sm = shear(M);
        CHECK_THROWS_AS(
            graded::restrict_corestrict(Sm.map, src, tgt, G->F),
            graded::DoesNotRestrict);
    }
}

TEST_CASE("S^{s+1} restricts to N*D_Phi^s(N) -> Gamma box G(s) box N") {
    auto G = examples::exterior_family(3, 1, 8);
    auto [S, q] = hopf::quotient_hopf(G, {{"tau1", 1}});
    auto phi = hopf::comodule_algebra_from_cotensor(G, S, q);
    auto kb = hopf::kernel_bicomodule(G, S, q);
    auto k = hopf::trivial_comodule(G, true);
    SUBCASE("s = 0 reduces to the cotensor restriction") {
        auto ns = shear_normalized_to_G(G, S, q, phi.Phi, kb, k, 0);
        CHECK(ns.report.all_passed());
    }
    SUBCASE("s = 1: dims agree and mu_i kill the inverse image") {
        auto ns = shear_normalized_to_G(G, S, q, phi.Phi, kb, k, 1);
        CHECK(ns.report.all_passed());
    }
    SUBCASE("s = 2 on the dual Steenrod datum") {
        auto A = examples::dual_steenrod(3, 1, 12);
        auto [S2, q2] = hopf::quotient_hopf(A, {{"xi1", 1}, {"tau1", 1}});
        auto phi2 = hopf::comodule_algebra_from_cotensor(A, S2, q2);
        auto kb2 = hopf::kernel_bicomodule(A, S2, q2);
        auto k2 = hopf::trivial_comodule(A, true);
        auto ns = shear_normalized_to_G(A, S2, q2, phi2.Phi, kb2, k2, 2);
        CHECK(ns.report.all_passed());
    }
}
