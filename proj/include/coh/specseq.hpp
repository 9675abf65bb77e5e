#ifndef COH_SPECSEQ_HPP
#define COH_SPECSEQ_HPP

#include "coh/cobar.hpp"
#include "coh/hopf.hpp"
#include "coh/shear.hpp"

#include <tuple>

// The filtered-complex spectral sequence engine and the three constructions:
// the generalized Cartan-Eilenberg spectral sequence, the Phi-based Adams
// spectral sequence at chain level, and the G-adic filtration spectral
// sequence on the cobar complex, with the comparison maps theta, delta, beta
// and localization at non-nilpotent classes.

namespace coh::specseq {

using cobar::CotorTable;
using cobar::WordComplexRef;
using graded::GradedMap;
using graded::SpaceRef;
using hopf::Comodule;
using hopf::HopfRef;

// ---------------------------------------------------------------- engine --

// A cochain complex with a basis-aligned decreasing filtration: each basis
// element carries a grade; F^s = span of elements with grade >= s.
struct FilteredComplex {
    std::string provenance;
    int n_max = 0;
    fplin::PrimeField F{2};
    std::vector<std::map<int, int>> dims;                  // dims[n][u]
    std::vector<std::map<int, fplin::SparseMatrix>> d;     // d[n][u]
    std::vector<std::map<int, std::vector<int>>> grade;    // grade[n][u][i]

    int dim(int n, int u) const;
    fplin::SparseMatrix diff(int n, int u) const;
    int grade_of(int n, int u, int i) const;
    fplin::Subspace filtration(int s, int n, int u) const;
    int grade_of_vector(int n, int u, const fplin::SparseVec& v) const;

    // d preserves the filtration, F^0 = total, grades within [0, n]
    Report verify() const;
};

using Cell = std::tuple<int, int, int>;  // (s, t, u)

struct Page {
    int r = 0;
    std::map<Cell, fplin::Homology> cells;        // Z_r/(...) per (s,t,u)
    std::map<Cell, fplin::SparseMatrix> d;        // d_r in class coordinates
    int dim(int s, int t, int u) const;
    // class of a chain-level element of F^s T^{s+t} at degree u
    fplin::SparseVec cls(int s, int t, int u, const fplin::SparseVec& v,
                         const fplin::PrimeField& F) const;
};

struct PagesResult {
    std::vector<Page> pages;  // index r = 0..r_max
    Report report;            // d_r^2 = 0; E_inf accounting against H(total)
    std::map<std::pair<int, int>, int> h_total;  // dim H^n(total)_u
};

PagesResult pages_from_filtration(const FilteredComplex& fc, int r_max);

// ----------------------------------------------------------------- datum --

struct ExtensionDatum {
    std::string name;
    HopfRef Gamma, Sigma;
    GradedMap q;
    hopf::ComoduleAlgebra Phi;
    hopf::KernelBicomodule G;
    Comodule M_right, N_left;  // over Gamma
    int certified_u = 0;
    Report validation;
};

ExtensionDatum make_datum(HopfRef Gamma, HopfRef Sigma, const GradedMap& q,
                          const Comodule& M_right, const Comodule& N_left,
                          const std::string& name, int certified_u);

// ------------------------------------------------------------------ CESS --

struct CessResult {
    // N*D_Phi^s(N) as diagonal Gamma-comodules, with the insertion
    // differential restricted to the kernel model
    std::vector<Comodule> W;
    std::vector<GradedMap> dW;          // W[s] -> W[s+1]
    std::vector<WordComplexRef> columns;  // rows: cobar with coefficients W[s]
    FilteredComplex total;              // column filtration on the total complex
    std::vector<std::vector<std::map<int, int>>> offset;  // offset[n][s][u]
    PagesResult pages;
    Report report;
    int s_max = 0, n_max = 0;

    int e1_dim(int s, int t, int u) const;
};

// The paper's theta-ready variant: full insertion rows over Gamma cotensored
// against the normalized Phi-resolution, assembled in the cofree coordinates
// term(s,t) = M (x) Gamma^{(x)t} (x) W_s.
CessResult build_cess(const ExtensionDatum& datum, int s_max, int n_max, int r_max,
                      int threads = 1);

// E1 in the change-of-rings form Cotor_Sigma^t(k, Phibar^{(x)s} (x) N):
// dimension table computed over Sigma directly.
std::map<Cell, int> cess_e1_via_sigma(const ExtensionDatum& datum, int s_max,
                                      int t_max);

// ---------------------------------------------------------------- filtss --

struct FiltssResult {
    WordComplexRef complex;  // non-normalized cobar of (M, N) over Gamma
    FilteredComplex total;   // G-adic slot-count filtration
    PagesResult pages;
    Report report;
    int n_max = 0;
};

FiltssResult build_filtss(const ExtensionDatum& datum, int n_max, int r_max,
                          int threads = 1);

// ----------------------------------------------------------------- MPASS --

struct MpassE1 {
    std::vector<Comodule> B;             // B_s = Phi (x) Phibar^{(x)s} (x) N
    std::vector<CotorTable> cols;        // Cotor_Gamma(k, B_s)
    std::map<Cell, fplin::SparseMatrix> d1;  // class coordinates
    Report report;
    int s_max = 0, t_max = 0;

    int dim(int s, int t, int u) const;
};

MpassE1 build_mpass_e1(const ExtensionDatum& datum, int s_max, int t_max,
                       int threads = 1);

// ----------------------------------------------------------------- theta --

struct ThetaResult {
    // theta_{s,t} per degree u: term(s,t) of the CESS variant -> C^{s+t}
    std::vector<std::vector<GradedMap>> blocks;  // blocks[s][t]
    Report report;  // chain map, filtration-preserving, E1 bijection
};

ThetaResult theta(const ExtensionDatum& datum, const CessResult& cess,
                  const FiltssResult& filtss);

// ----------------------------------------------------------- delta, beta --

// The E0 column of the G-adic filtration with an arbitrary Sigma-coaction
// coefficient: chain groups are words with exactly s slots in G, coefficients
// in `space`; psi_sigma : space -> Sigma (x) space.
struct E0Column {
    int s = 0;
    SpaceRef coeff;
    std::vector<SpaceRef> terms;   // word length n = s..n_max
    std::vector<GradedMap> d;
    int n_min = 0;
};

E0Column build_e0_column(const ExtensionDatum& datum, SpaceRef coeff_space,
                         const GradedMap& psi_sigma, int s, int n_max);

struct DeltaBetaResult {
    Report report;
};

// delta: E0^{s-1,*}(M,G) -> E0^{s,*}(M,Sigma) by m[a|...]g -> m[a|...|g']g'',
// beta the s-fold iterate; checks chain-map property, homology isomorphisms
// column by column, and the commuting square with theta.
DeltaBetaResult delta_beta(const ExtensionDatum& datum, int s, int n_max);

// E0 only depends on the Sigma-coaction of the coefficient: builds the honest
// E0 column from a full Gamma-coaction and from Sigma-data only, and asserts
// identical matrices.
Report e0_sigma_dependence(const ExtensionDatum& datum, const Comodule& N,
                           const GradedMap& raw_gamma_coaction, int s, int n_max);

// ------------------------------------------------------------ localization --

struct LocClass {
    int s = 0, u = 0;          // bidegree in Cotor_Gamma(k,k)
    fplin::SparseVec rep;      // cocycle in the (s,u) chain group
};

struct LocCell {
    int dim = 0;
    bool certified = false;
};

struct LocalizedChart {
    // stable dimensions indexed by (s, u); flags where no stabilization
    // certificate exists inside the window
    std::map<std::pair<int, int>, LocCell> cells;
    Report report;
};

// Chart of x^{-1} Cotor_Gamma(k, W): cellwise colimit of multiplication by x
// with two-consecutive-bijections certificates. Throws when x is nilpotent in
// the window.
LocalizedChart localize_cotor(const ExtensionDatum& datum, const CotorTable& T,
                              const CotorTable& unit_table, const LocClass& x,
                              int window);

// Localizing an already-localized chart: certified cells carry stabilized
// isomorphisms, so the certified part is a fixed point.
LocalizedChart localize_chart(const LocalizedChart& chart, const LocClass& x,
                              int window);

// Localized MPASS E1: localizes each column s along t.
struct LocalizedE1 {
    std::map<Cell, LocCell> cells;
    Report report;
};
LocalizedE1 localize_mpass_e1(const ExtensionDatum& datum, const MpassE1& e1,
                              const CotorTable& unit_table, const LocClass& x,
                              int window);

// ---------------------------------------------------------- flatness / E2 --

struct FlatnessResult {
    bool flat = false;
    std::string obstruction;   // witness relation when not flat
    // minimal module generators of W over R per (t, u)
    std::map<std::pair<int, int>, int> generators;
    Report report;
};

// Window-freeness of Ext_Gamma(k, Phi (x) Phi) over Ext_Gamma(k, Phi).
FlatnessResult flatness_check_and_e2(const ExtensionDatum& datum, int t_max,
                                     int window, int threads = 1);

// Localized flatness: in certified cells the localized module is free on the
// unit class.
Report localized_flatness(const ExtensionDatum& datum, const LocClass& x,
                          int t_max, int window);

// For collapsing conormal examples: E2 of the CESS equals the product
// Cotor_Phi(k,k) (x) Cotor_Sigma(k,k) dimensionwise.
Report e2_product_check(const CessResult& cess, const cobar::CotorTable& phi_cotor,
                        const cobar::CotorTable& sigma_cotor, int s_max, int t_max,
                        int window);

}  // namespace coh::specseq

#endif
