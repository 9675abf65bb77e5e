#ifndef COH_COBAR_HPP
#define COH_COBAR_HPP

#include "coh/hopf.hpp"
#include "coh/report.hpp"

#include <memory>

// Cobar resolutions D_L / D_R, the insertion resolutions D_Delta, their
// normalized (kernel) and quotient chain models, cobar complexes with the
// signed differential, Cotor, and the change-of-rings chain equivalence.

namespace coh::cobar {

using graded::GradedMap;
using graded::GradedSub;
using graded::SpaceRef;
using hopf::Comodule;
using hopf::HopfRef;

struct CochainComplex {
    std::string provenance;
    int n_max = 0;
    std::vector<SpaceRef> terms;  // 0..n_max
    std::vector<GradedMap> d;     // d[n]: terms[n] -> terms[n+1], n < n_max

    Report verify_d2(const fplin::PrimeField& F) const;
};

struct CosimplicialObject {
    std::string name;
    int n_max = 0;
    std::vector<SpaceRef> levels;
    // coface[n][i]: levels[n-1] -> levels[n], i = 0..n
    std::vector<std::vector<GradedMap>> coface;
    // codeg[n][j]: levels[n] -> levels[n-1], j = 0..n-1
    std::vector<std::vector<GradedMap>> codeg;
    // the levels as Gamma-comodules (diagonal for the D_Delta models)
    std::vector<Comodule> level_comodules;

    Report verify_identities(const fplin::PrimeField& F) const;
};

// Cobar resolution of a left comodule: levels Gamma^{(x) n+1} (x) N, cofaces
// Delta at slot i+1 (i < n) and psi_N last, codegeneracies eps at slot j+2.
CosimplicialObject build_DL(HopfRef H, const Comodule& N_left, int n_max);
// Mirror for a right comodule: levels M (x) Gamma^{(x) n+1}.
CosimplicialObject build_DR(HopfRef H, const Comodule& M_right, int n_max);
// Insertion resolution over a comodule algebra Phi: levels Phi^{(x) n+1} (x) N
// with the diagonal coaction; cofaces insert 1, codegeneracies multiply.
CosimplicialObject build_DDelta(const hopf::ComoduleAlgebra& Phi,
                                const Comodule& N_left, int n_max);
// Right-sided insertion resolution over Gamma itself: M (x) Gamma^{(x) n+1}.
CosimplicialObject build_DDelta_right(HopfRef Gamma, const Comodule& M_right,
                                      int n_max);

CochainComplex alternating_sum_complex(const CosimplicialObject& X,
                                       const fplin::PrimeField& F);

// The augmented resolution is exact through n_max - 1 (levels resolve the
// coefficient); aug: N -> level 0.
Report verify_resolution_exactness(const CosimplicialObject& X, const GradedMap& aug,
                                   const fplin::PrimeField& F);

struct Normalization {
    CochainComplex kernel_model;    // N*: intersection of codegeneracy kernels
    std::vector<GradedSub> n_sub;   // realization inside the levels
    CochainComplex quotient_model;  // Q*: levels / sum of coface images (i >= 1)
    std::vector<GradedMap> proj;    // level n ->> Q^n
    std::vector<GradedMap> section; // Q^n -> level n (representatives)
    std::vector<GradedMap> n_to_q;  // the canonical iso N* -> Q*
    std::vector<Comodule> n_comodules;  // kernel-model terms as comodules
    Report report;
};
Normalization normalize(const CosimplicialObject& X, const fplin::PrimeField& F);

// The workhorse: C^n = M (x) slots^n (x) W where slots run over the monomial
// basis of Gamma (positive degrees only when normalized), with the cobar
// differential d = sum_i (-1)^i (psi_M at 0, Delta at slots, psi_W last).
class WordComplex {
public:
    HopfRef H;
    Comodule M;  // right Gamma-comodule
    Comodule W;  // left Gamma-comodule, the coefficients
    bool normalized = true;
    int n_max = 0;
    std::string provenance;

    const SpaceRef& term(int n) const { return terms_[n]; }
    const GradedMap& diff(int n) const { return d_[n]; }
    int dim(int n, int u) const { return terms_[n]->dim(u); }

    std::string basis_string(int n, int u, int i) const;
    Report verify_d2() const;

    std::vector<SpaceRef> terms_;
    std::vector<GradedMap> d_;
};

using WordComplexRef = std::shared_ptr<const WordComplex>;

WordComplexRef cobar_complex(HopfRef H, const Comodule& M_right,
                             const Comodule& W_left, int n_max, bool normalized,
                             int threads = 1);

// Cotor_Gamma(M, W) as homology of the normalized word complex.
struct CotorTable {
    WordComplexRef complex;
    int s_max = 0;
    std::map<std::pair<int, int>, fplin::Homology> cells;  // (s, u) -> H

    int dim(int s, int u) const;
    // class of a cycle (coordinates in term s at degree u)
    fplin::SparseVec cls(int s, int u, const fplin::SparseVec& v) const;
    std::string rep_string(int s, int u, int k) const;
};

CotorTable cotor(HopfRef H, const Comodule& M_right, const Comodule& W_left,
                 int s_max, int threads = 1);
CotorTable cotor_of(WordComplexRef C, int s_max);

// Termwise M box_Gamma C for a complex of left comodules; differentials must
// be comodule maps (witnessed error otherwise).
struct CotensorComplex {
    CochainComplex complex;
    std::vector<GradedSub> subs;  // inside M (x) C^n
    Report report;
};
CotensorComplex cotensor_complex(const Comodule& M_right,
                                 const std::vector<Comodule>& terms,
                                 const std::vector<GradedMap>& d);

// The change-of-rings chain map (M (x) Gamma^{(x)t}) (x) (Gamma box_Sigma N)
// -> Sigma-cobar of (M, N), slots projected by q and the glue slot contracted.
struct ChangeOfRings {
    WordComplexRef source;  // over Gamma, coefficients Gamma box_Sigma N
    WordComplexRef target;  // over Sigma, coefficients N
    std::vector<GradedMap> chain_map;  // per n
    hopf::Cotensor gamma_box_N;
    Report report;  // chain map + homology isomorphism in the window
};
ChangeOfRings change_of_rings(HopfRef Gamma, HopfRef Sigma, const GradedMap& q,
                              const Comodule& M_right, const Comodule& N_left,
                              int n_max);

// Window freeness: M (over Sigma) is free iff Cotor_Sigma(k, M) vanishes in
// positive homological degree through the window.
Report freeness_window_check(const Comodule& M_over_Sigma, int window, int s_max = 4);

// Push a cochain along a map of coefficient comodules: (slots, w) -> (slots, f(w)).
fplin::SparseVec apply_coefficient_map(const WordComplex& from, int n, int u,
                                       const fplin::SparseVec& v, const GradedMap& f,
                                       const WordComplex& to);

// External product of cochains (M = k both sides):
// C^{s1}(k, W) (x) C^{s2}(k, W') -> C^{s1+s2}(k, W (x)Delta W'), the a-block
// passing through and W coacting over the b-block, with Koszul signs.
fplin::SparseVec cup(const WordComplex& CX, int s1, int u1, const fplin::SparseVec& x,
                     const WordComplex& CY, int s2, int u2, const fplin::SparseVec& y,
                     const WordComplex& CT);

// Product of Cotor classes via cup, optionally postcomposed with a coefficient
// comodule map target_coeff_map : W (x) W' -> W''.
fplin::SparseVec cotor_product(const CotorTable& A, int s1, int u1, int i1,
                               const CotorTable& B, int s2, int u2, int i2,
                               const CotorTable& T, const GradedMap* coeff_map,
                               const WordComplex* cup_target);

}  // namespace coh::cobar

#endif
