#ifndef COH_EXAMPLES_HPP
#define COH_EXAMPLES_HPP

#include "coh/hopf.hpp"

#include <string>
#include <vector>

// Built-in algebras and extension data at desk scale: exterior families,
// truncated polynomial algebras, and truncations of the odd-primary dual
// Steenrod algebra with the Milnor coproducts.

namespace coh::specseq {
struct ExtensionDatum;  // defined in specseq.hpp
}

namespace coh::examples {

// E[x] on one primitive generator.
hopf::HopfRef exterior_one(std::uint32_t p, const std::string& name, int degree,
                           int D);
// E[tau_0, ..., tau_m], all primitive, |tau_i| = 2 p^i - 1.
hopf::HopfRef exterior_family(std::uint32_t p, int m, int D);
// F_p[xi]/xi^height with xi primitive.
hopf::HopfRef trunc_poly(std::uint32_t p, const std::string& name, int degree,
                         int height, int D);
// Truncated odd-p dual Steenrod algebra on xi_1..xi_m, tau_0..tau_m with the
// Milnor coproducts. |xi_n| = 2(p^n - 1), |tau_n| = 2 p^n - 1.
hopf::HopfRef dual_steenrod(std::uint32_t p, int m, int D);
// Truncated dual algebra of reduced powers P = F_p[xi_1, ..., xi_m].
hopf::HopfRef reduced_powers(std::uint32_t p, int m, int D);

struct CatalogParams {
    std::uint32_t p = 3;
    int m = 1;
    int D = 14;
};

// Certified window: internal degrees <= min(first omitted generator degree - 1, D).
int certified_window(const std::string& name, const CatalogParams& params);

specseq::ExtensionDatum example(const std::string& name, const CatalogParams& params);
std::vector<std::string> catalog_names();

}  // namespace coh::examples

#endif
