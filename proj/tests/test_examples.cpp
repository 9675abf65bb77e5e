#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "coh/examples.hpp"
#include "coh/specseq.hpp"

namespace examples = coh::examples;
namespace hopf = coh::hopf;
namespace fplin = coh::fplin;

TEST_CASE("every catalog datum passes the full validator") {
    struct Probe {
        std::string name;
        examples::CatalogParams params;
    };
    std::vector<Probe> probes = {
        {"exterior-split", {3, 1, 10}},
        {"dualA-odd", {3, 1, 14}},
        {"P-b10", {3, 2, 16}},
        {"trunc-poly", {3, 1, 16}},
    };
    for (auto& pr : probes) {
        CAPTURE(pr.name);
        auto datum = examples::example(pr.name, pr.params);
        CHECK(datum.validation.all_passed());
    }
}

TEST_CASE("exterior-split p=3 m=1 D=10: Gamma dim 4 total, Phi = E[tau1], G = (tau1)") {
    auto datum = examples::example("exterior-split", {3, 1, 10});
    CHECK(datum.Gamma->space->total_dim() == 4);
    CHECK(datum.Phi.com.space->total_dim() == 2);
    CHECK(datum.Phi.com.space->dim(5) == 1);
    CHECK(datum.G.sub.space->dim(5) == 1);
    CHECK(datum.G.sub.space->dim(6) == 1);
    CHECK(datum.G.sub.space->total_dim() == 2);
    // conormal control case: Phi is a sub-coalgebra
    CHECK(hopf::sub_coalgebra_witness(datum.Gamma, datum.Phi).empty());
}

TEST_CASE("dualA-odd p=3 m=1 D=14: the documented Phi slice dims; not conormal") {
    auto datum = examples::example("dualA-odd", {3, 1, 14});
    std::map<int, int> expect{{0, 1}, {4, 1}, {5, 1}, {8, 1},
                              {9, 1}, {12, 1}, {13, 1}};
    for (int u = 0; u <= 14; ++u)
        CHECK(datum.Phi.com.space->dim(u) == (expect.count(u) ? expect[u] : 0));
    CHECK(!hopf::sub_coalgebra_witness(datum.Gamma, datum.Phi).empty());
}

TEST_CASE("P-b10 p=3 D=16: Phi = B is not a sub-coalgebra (Milnor witness)") {
    auto datum = examples::example("P-b10", {3, 2, 16});
    CHECK(datum.Phi.com.space->dim(12) == 1);  // xi1^3
    CHECK(datum.Phi.com.space->dim(16) == 1);  // the xi2 line
    CHECK(datum.Phi.com.space->dim(4) == 0);
    auto witness = hopf::sub_coalgebra_witness(datum.Gamma, datum.Phi);
    CHECK(!witness.empty());
}

TEST_CASE("window rule") {
    CHECK(examples::certified_window("exterior-split", {3, 2, 12}) == 12);
    // dualA-odd m=1: first omitted generator xi2 in degree 2(9-1) = 16
    CHECK(examples::certified_window("dualA-odd", {3, 1, 14}) == 14);
    CHECK(examples::certified_window("dualA-odd", {3, 1, 20}) == 15);
    // P-b10 m=2: first omitted is xi3 in degree 2(27-1) = 52
    CHECK(examples::certified_window("P-b10", {3, 2, 16}) == 16);
}

TEST_CASE("window too small is rejected") {
    CHECK_THROWS_AS(examples::example("trunc-poly", {3, 1, 2}),
                    fplin::MathError);
    CHECK_THROWS_AS(examples::example("P-b10", {3, 2, 3}), fplin::MathError);
}

TEST_CASE("exterior-split at m=2, D=12 is valid (tau2 above the window)") {
    auto datum = examples::example("exterior-split", {3, 2, 12});
    CHECK(datum.validation.all_passed());
    // tau2 has degree 17: no monomials involving it below D
    CHECK(datum.Gamma->space->total_dim() == 4);
}

TEST_CASE("Lemma on C-bar: the Phi coefficient is free over Sigma in the window") {
    auto datum = examples::example("dualA-odd", {3, 1, 14});
    // C-bar with its induced E[tau0]-comodule structure
    auto phibar = hopf::reduced_comodule(datum.Phi.com);
    auto cbar_sigma =
        hopf::induced_along_quotient(phibar, datum.Sigma, datum.q);
    auto rep = coh::cobar::freeness_window_check(cbar_sigma, 12);
    CHECK(rep.all_passed());
}
