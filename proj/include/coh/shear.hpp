#ifndef COH_SHEAR_HPP
#define COH_SHEAR_HPP

#include "coh/cobar.hpp"
#include "coh/hopf.hpp"

// The shear isomorphisms S, S_c, their inverses and iterated closed forms,
// the induced isomorphism of cosimplicial objects D_Delta -> D_L, and the
// restrictions to cotensor subspaces.

namespace coh::shear {

using graded::GradedMap;
using graded::GradedSub;
using graded::SpaceRef;
using hopf::Comodule;
using hopf::HopfRef;

enum class Dir { S, Sinv, Sc, ScInv };

struct ShearMap {
    Dir dir = Dir::S;
    int n = 1;            // number of algebra slots
    SpaceRef space;       // Gamma^(x n) (x) M  or  M (x) Gamma^(x n)
    GradedMap map;        // source = target = space (structures differ)
};

// Single shears on Gamma (x) M (left comodule M) resp. M (x) Gamma (right):
//   S      : a (x) m -> sum a m' (x) m''
//   S^{-1} : a (x) m -> sum a c(m') (x) m''
//   S_c    : m (x) a -> sum m' (x) m'' a
//   S_c^{-1}: m (x) a -> sum m' (x) c(m'') a
ShearMap shear(const Comodule& M_left);
ShearMap shear_inv(const Comodule& M_left);
ShearMap shear_c(const Comodule& M_right);
ShearMap shear_c_inv(const Comodule& M_right);

// Iterated shears on Gamma^{(x)n} (x) M (resp. mirrored), built directly from
// the closed Sweedler formulas; n >= 1.
ShearMap iterated_shear(const Comodule& M_left, int n);
ShearMap iterated_shear_inv(const Comodule& M_left, int n);
ShearMap iterated_shear_c(const Comodule& M_right, int n);
ShearMap iterated_shear_c_inv(const Comodule& M_right, int n);

// Independent oracles: the n-fold composites of single shears following the
// inductive proofs.
GradedMap composed_shear(const Comodule& M_left, int n);
GradedMap composed_shear_inv(const Comodule& M_left, int n);
GradedMap composed_shear_c(const Comodule& M_right, int n);
GradedMap composed_shear_c_inv(const Comodule& M_right, int n);

// Levelwise S^{n+1}: D_Delta^*(N) -> D_L^*(N), checked to commute with every
// coface and codegeneracy.
struct CosimplicialShearIso {
    std::vector<ShearMap> levels;
    Report report;
};
CosimplicialShearIso cosimplicial_shear_iso(const cobar::CosimplicialObject& DDelta,
                                            const cobar::CosimplicialObject& DL,
                                            const Comodule& N_left);

// S restricted to an isomorphism Phi (x) M -> Gamma box_Sigma M (Lemma on the
// shear and the cotensor).
struct RestrictedShear {
    GradedMap map;        // between the two abstract sub-bases
    GradedSub source, target;
    Report report;
};
RestrictedShear shear_to_cotensor(HopfRef Gamma, HopfRef Sigma, const GradedMap& q,
                                  const hopf::ComoduleAlgebra& Phi,
                                  const Comodule& M_left);

// S^{s+1} restricted to N*D_Phi^s(N) -> Gamma box_Sigma G(s) box_Sigma N, with
// both appendix inclusions checked (mu_i kill the S^{-1} image; S lands in the
// cotensor) and degreewise bijectivity.
struct NormalizedShear {
    GradedMap map;              // N*D_Phi^s(N) basis -> cotensor-chain basis
    GradedMap flat_source_incl; // N* -> Gamma-word ambient
    GradedMap flat_target_incl; // cotensor chain -> Gamma-word ambient
    Report report;
};
NormalizedShear shear_normalized_to_G(HopfRef Gamma, HopfRef Sigma,
                                      const GradedMap& q,
                                      const hopf::ComoduleAlgebra& Phi,
                                      const hopf::KernelBicomodule& G,
                                      const Comodule& N_left, int s);

}  // namespace coh::shear

#endif
