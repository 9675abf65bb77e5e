#ifndef COH_GRADED_HPP
#define COH_GRADED_HPP

#include "coh/fplin.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

// Internally graded F_p-vector spaces with labeled monomial bases, and
// graded linear maps stored as per-degree sparse blocks. Only the internal
// degree lives here; homological/filtration degrees belong to the complexes.

namespace coh::graded {

constexpr int kInfiniteHeight = 0;

struct Generator {
    std::string name;
    int degree = 0;
    int height = kInfiniteHeight;  // 2 = exterior, p^k = truncated, 0 = polynomial
};

struct GenTable {
    std::vector<Generator> gens;
    int find(const std::string& name) const;  // -1 if absent
};
using TableRef = std::shared_ptr<const GenTable>;

// A monomial in one tensor factor: sorted (generator index, exponent) atoms.
struct Monomial {
    std::vector<std::pair<int, int>> atoms;

    bool is_unit() const { return atoms.empty(); }
    int degree(const GenTable& t) const;
    auto operator<=>(const Monomial&) const = default;
};

// Product with the Koszul sign from sorting atoms into canonical order.
// Returns {sign in {+1,-1}, monomial}; nullopt when a height bound kills it.
std::optional<std::pair<int, Monomial>> mul_monomials(const GenTable& t,
                                                      const Monomial& a,
                                                      const Monomial& b);

std::string monomial_string(const GenTable& t, const Monomial& m);
Monomial parse_monomial(const GenTable& t, const std::string& s);

// A basis label of a tensor word: one monomial per factor.
struct Label {
    std::vector<Monomial> factors;
    auto operator<=>(const Label&) const = default;
};

class GradedSpace {
public:
    GradedSpace(int trunc, std::vector<TableRef> factor_tables)
        : trunc_(trunc), tables_(std::move(factor_tables)) {}

    int trunc() const { return trunc_; }
    const std::vector<TableRef>& factor_tables() const { return tables_; }
    int factor_count() const { return static_cast<int>(tables_.size()); }

    int dim(int u) const;
    const std::vector<Label>& slice(int u) const;
    int index_of(int u, const Label& l) const;  // -1 if absent
    const Label& label(int u, int i) const { return slice(u)[i]; }
    int max_degree() const;
    long long total_dim() const;

    int label_degree(const Label& l) const;
    std::string label_string(int u, int i) const;
    std::string label_string(const Label& l) const;

    void add_label(int u, Label l);  // build-time; rejects duplicates
    void finish();                   // freeze and build lookup maps

    bool same_dims(const GradedSpace& o) const;

private:
    int trunc_;
    std::vector<TableRef> tables_;
    std::map<int, std::vector<Label>> slices_;
    std::map<int, std::map<Label, int>> lookup_;
};

using SpaceRef = std::shared_ptr<const GradedSpace>;

SpaceRef unit_space(int trunc);  // k: no tensor factors, dim 1 in degree 0
SpaceRef tensor(const std::vector<SpaceRef>& factors);

// Decompose a tensor label into the parts belonging to consecutive factor
// groups whose factor counts are given by sizes.
std::vector<Label> split_label(const Label& l, const std::vector<int>& sizes);

struct GradedMap {
    SpaceRef source, target;
    int shift = 0;  // blocks[u]: source_u -> target_{u+shift}
    std::map<int, fplin::SparseMatrix> blocks;

    const fplin::SparseMatrix* block(int u) const;
    fplin::SparseMatrix block_or_zero(int u) const;
    void set_block(int u, fplin::SparseMatrix m);
    bool is_zero() const;
};

GradedMap zero_map(SpaceRef source, SpaceRef target, int shift = 0);
GradedMap identity_map(SpaceRef space);
GradedMap compose(const GradedMap& f, const GradedMap& g, const fplin::PrimeField& F);
GradedMap map_add(const GradedMap& f, const GradedMap& g, const fplin::PrimeField& F);
GradedMap map_scale(const GradedMap& f, fplin::Scalar c, const fplin::PrimeField& F);
bool map_equal(const GradedMap& f, const GradedMap& g);

// Tensor product of graded maps. No per-element Koszul signs: all maps here
// preserve internal degree; the only sign ever applied is the caller's global
// one (the double-complex column sign).
GradedMap tensor_map(const std::vector<const GradedMap*>& maps,
                     const fplin::PrimeField& F, int global_sign = 1);

// A graded subspace: canonical per-degree fplin subspaces of an ambient
// space, packaged with an abstract GradedSpace whose labels are the ambient
// pivot labels.
struct GradedSub {
    SpaceRef ambient;
    SpaceRef space;
    std::map<int, fplin::Subspace> sub;

    GradedMap inclusion(const fplin::PrimeField& F) const;  // space -> ambient
};

GradedSub make_sub(SpaceRef ambient, std::map<int, fplin::Subspace> sub);
GradedSub full_sub(SpaceRef ambient);

class DoesNotRestrict : public fplin::MathError {
public:
    DoesNotRestrict(const std::string& what, int degree, int index)
        : fplin::MathError(what), degree(degree), index(index) {}
    int degree, index;
};

// The map induced by f on the given sub-bases; throws DoesNotRestrict with a
// witness (first basis vector whose image leaves the target subspace).
GradedMap restrict_corestrict(const GradedMap& f, const GradedSub& src,
                              const GradedSub& tgt, const fplin::PrimeField& F);

}  // namespace coh::graded

#endif
