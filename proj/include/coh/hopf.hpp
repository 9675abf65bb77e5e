#ifndef COH_HOPF_HPP
#define COH_HOPF_HPP

#include "coh/graded.hpp"
#include "coh/report.hpp"

#include <memory>
#include <optional>
#include <tuple>

// Connected, degreewise-finite monomial Hopf algebras over F_p, their
// comodules and comodule algebras, cotensor products, quotient Hopf algebras,
// and the subobjects Phi = Gamma &#x25a1;_Sigma k and G = ker(Gamma -> Sigma).

namespace coh::hopf {

using graded::GradedMap;
using graded::GradedSub;
using graded::Label;
using graded::Monomial;
using graded::SpaceRef;

// A linear combination of monomials.
using Lin = std::vector<std::pair<fplin::Scalar, Monomial>>;

struct DeltaTerm {
    fplin::Scalar coef;
    Monomial left, right;
};

struct HopfBuild {
    std::uint32_t p = 2;
    int D = 0;
    std::vector<graded::Generator> gens;
    // middle terms of Delta(g): everything besides g(x)1 + 1(x)g
    std::vector<std::vector<std::tuple<std::int64_t, Monomial, Monomial>>> middle;
    // raw override: generators whose FULL coproduct is given (test hook for
    // deliberately broken inputs); index -> full term list
    std::vector<std::pair<int, std::vector<std::tuple<std::int64_t, Monomial, Monomial>>>>
        raw_full;
};

class HopfAlgebra {
public:
    fplin::PrimeField F;
    int D;
    graded::TableRef table;
    SpaceRef space;  // monomial basis, one tensor factor
    std::string name;

    const std::vector<DeltaTerm>& delta(const Monomial& m) const;
    std::vector<DeltaTerm> delta_reduced(const Monomial& m) const;
    const Lin& antipode(const Monomial& m) const;
    // Product with truncation at D; nullopt when it vanishes.
    std::optional<std::pair<fplin::Scalar, Monomial>> mul(const Monomial& a,
                                                          const Monomial& b) const;
    int mon_degree(const Monomial& m) const { return m.degree(*table); }

    SpaceRef square() const;                 // Gamma (x) Gamma
    const GradedMap& Delta_map() const;      // Gamma -> Gamma(x)Gamma
    const GradedMap& mu_map() const;         // Gamma(x)Gamma -> Gamma
    const GradedMap& counit_map() const;     // Gamma -> k
    const GradedMap& unit_map() const;       // k -> Gamma
    const GradedMap& antipode_map() const;   // Gamma -> Gamma
    SpaceRef unit_space_ref() const;

    explicit HopfAlgebra(fplin::PrimeField f) : F(f), D(0) {}

    // internals used by the builder
    struct Impl;
    std::shared_ptr<Impl> impl;
};

using HopfRef = std::shared_ptr<const HopfAlgebra>;

// Builds the monomial Hopf algebra and runs the axiom validator; throws
// MathError("axiom failure: ...") naming the first violated identity.
HopfRef build_monomial_hopf(const HopfBuild& build, const std::string& name = "Gamma",
                            bool validate = true);

Report validate_hopf(const HopfAlgebra& H);

struct Comodule {
    HopfRef over;
    bool left = true;
    SpaceRef space;
    GradedMap psi;  // left: space -> Gamma(x)space ; right: space -> space(x)Gamma
    std::string name;
};

struct CoTerm {
    fplin::Scalar coef;
    Monomial g;   // the Gamma part
    int u2, i2;   // the comodule part
};

Comodule trivial_comodule(HopfRef H, bool left, const std::string& name = "k");
Comodule regular_comodule(HopfRef H, bool left);  // Gamma over itself via Delta
// coaction of basis vector (u, i), decoded to (coef, gamma monomial, index)
std::vector<CoTerm> coaction_terms(const Comodule& M, int u, int i);

Report validate_comodule(const Comodule& M);

// Diagonal coaction on a tensor product of two comodules on the same side.
Comodule tensor_diag(const Comodule& A, const Comodule& B);
// Flip the Hopf algebra along a quotient map q: the (q x id) psi coaction.
Comodule induced_along_quotient(const Comodule& M, HopfRef Sigma, const GradedMap& q);
// Positive-degree part with the coaction projected along the unit splitting.
Comodule reduced_comodule(const Comodule& M);

struct ComoduleAlgebra {
    Comodule com;          // left Gamma-comodule on the abstract basis
    GradedMap product;     // space(x)space -> space
    GradedSub sub;         // realization inside Gamma
    std::string name;
};

Report validate_comodule_algebra(const ComoduleAlgebra& A);

// Gamma as a comodule algebra over itself.
ComoduleAlgebra gamma_as_comodule_algebra(HopfRef H);

struct QuotientResult {
    HopfRef Sigma;
    GradedMap q;  // Gamma.space -> Sigma.space
};

// Quotient by the ideal generated by generator powers; killed = (name, power),
// power 1 kills the generator, power k kills g^k.
QuotientResult quotient_hopf(HopfRef Gamma,
                             const std::vector<std::pair<std::string, int>>& killed);

// A space with coactions on both sides (either may be absent).
struct BiComodule {
    SpaceRef space;
    HopfRef left_over, right_over;
    std::optional<GradedMap> left_psi;   // space -> left_over (x) space
    std::optional<GradedMap> right_psi;  // space -> space (x) right_over
    std::string name;
};

BiComodule as_bicomodule(const Comodule& M);
Comodule left_part(const BiComodule& B);
Comodule right_part(const BiComodule& B);

struct Cotensor {
    GradedSub sub;     // inside tensor(X.space, Y.space)
    BiComodule self;   // outer coactions restricted (when present on inputs)
};

// X &#x25a1;_H Y: kernel of psi_X (x) id - id (x) psi_Y, canonical basis.
Cotensor cotensor(const BiComodule& X, const BiComodule& Y, HopfRef H);
Cotensor cotensor(const Comodule& X_right, const Comodule& Y_left);

// Gamma as a (Gamma, Sigma)-bicomodule via Delta and (id x q)Delta.
BiComodule gamma_sigma_bicomodule(HopfRef Gamma, HopfRef Sigma, const GradedMap& q);

struct PhiResult {
    ComoduleAlgebra Phi;
    Report report;
};
// Phi = Gamma &#x25a1;_Sigma k as a comodule algebra; throws on
// "not multiplicatively closed" with a witness.
PhiResult comodule_algebra_from_cotensor(HopfRef Gamma, HopfRef Sigma,
                                         const GradedMap& q);

// Delta(Phi) inside Phi(x)Phi? (conormal test); returns failing witness or "".
std::string sub_coalgebra_witness(HopfRef Gamma, const ComoduleAlgebra& Phi);

struct KernelBicomodule {
    BiComodule G;    // left and right Sigma-coactions
    GradedSub sub;   // inside Gamma
    Report report;
};
KernelBicomodule kernel_bicomodule(HopfRef Gamma, HopfRef Sigma, const GradedMap& q);

// G(s) = G &#x25a1;_Sigma ... &#x25a1;_Sigma G with its flattened inclusion into
// Gamma^{(x)s}; s >= 1.
struct IteratedCotensor {
    BiComodule self;
    GradedMap flat_incl;  // self.space -> tensor(Gamma^{(x)s}) ... ambient
    SpaceRef ambient;
};
IteratedCotensor iterated_cotensor_G(const KernelBicomodule& G, HopfRef Sigma, int s);
// X &#x25a1; (G(s) &#x25a1; N)-style: general right-nested helper
IteratedCotensor cotensor_chain(const std::vector<BiComodule>& factors, HopfRef H);

// Delta^n : Gamma -> Gamma^{(x) n+1} (or psi^n : M -> Gamma^{(x)n} (x) M).
GradedMap iterated_coproduct(HopfRef H, int n);
GradedMap iterated_coaction(const Comodule& M, int n);

// Subspace H (x) S (or S (x) H) of the ambient tensor, already in rref.
GradedSub kron_sub(SpaceRef hspace, const GradedSub& S, bool h_on_left,
                   const fplin::PrimeField& F);
// The comodule induced on a subspace of a comodule's space (throws
// DoesNotRestrict when the coaction does not preserve it).
Comodule sub_comodule(const Comodule& ambient, const GradedSub& sub);
// Unit k -> Phi of a comodule algebra.
GradedMap algebra_unit_map(const ComoduleAlgebra& A);
// Reassign source/target spaces of a map to dimensionally identical models.
void reanchor(GradedMap& f, SpaceRef src, SpaceRef tgt);

}  // namespace coh::hopf

#endif
