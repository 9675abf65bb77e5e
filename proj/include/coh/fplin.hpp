#ifndef COH_FPLIN_HPP
#define COH_FPLIN_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

// Exact sparse linear algebra over a prime field F_p.
//
// Everything here is canonical: rref output is the unique reduced
// row-echelon form, and every Subspace is stored in rref, so subspace
// equality is structural equality of the basis matrices.

namespace coh::fplin {

using Scalar = std::uint32_t;

class MathError : public std::runtime_error {
public:
    explicit MathError(const std::string& what) : std::runtime_error(what) {}
};

class PrimeField {
public:
    explicit PrimeField(std::uint32_t p);

    std::uint32_t p() const { return p_; }

    Scalar reduce(std::int64_t x) const {
        std::int64_t r = x % static_cast<std::int64_t>(p_);
        if (r < 0) r += p_;
        return static_cast<Scalar>(r);
    }
    Scalar add(Scalar a, Scalar b) const { return (a + b) % p_; }
    Scalar sub(Scalar a, Scalar b) const { return (a + p_ - b) % p_; }
    Scalar mul(Scalar a, Scalar b) const {
        return static_cast<Scalar>((static_cast<std::uint64_t>(a) * b) % p_);
    }
    Scalar neg(Scalar a) const { return a == 0 ? 0 : p_ - a; }
    Scalar inv(Scalar a) const;
    Scalar pow(Scalar a, std::uint64_t e) const;

    bool operator==(const PrimeField& o) const { return p_ == o.p_; }

private:
    std::uint32_t p_;
};

// Sparse vector: sorted (index, nonzero value) pairs.
struct SparseVec {
    std::vector<std::pair<int, Scalar>> terms;

    bool empty() const { return terms.empty(); }
    void clear() { terms.clear(); }
    Scalar at(int i) const;
    int leading_index() const { return terms.empty() ? -1 : terms.front().first; }
    bool operator==(const SparseVec& o) const { return terms == o.terms; }
};

SparseVec vec_add_scaled(const SparseVec& a, const SparseVec& b, Scalar c,
                         const PrimeField& F);  // a + c*b
SparseVec vec_scale(const SparseVec& a, Scalar c, const PrimeField& F);
SparseVec unit_vec(int i);

// Row-major sparse matrix. Rows are SparseVecs; acts on column vectors.
class SparseMatrix {
public:
    SparseMatrix() = default;
    SparseMatrix(int rows, int cols) : rows_(rows), cols_(cols), row_(rows) {}

    static SparseMatrix identity(int n);
    static SparseMatrix from_rows(int cols, std::vector<SparseVec> rows);
    static SparseMatrix from_dense(int rows, int cols,
                                   const std::vector<std::vector<std::int64_t>>& a,
                                   const PrimeField& F);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    long long nnz() const;
    bool is_zero() const { return nnz() == 0; }

    const SparseVec& row(int r) const { return row_[r]; }
    SparseVec& row_mut(int r) { return row_[r]; }
    Scalar at(int r, int c) const { return row_[r].at(c); }

    // Accumulates v into entry (r, c), reducing mod p.
    void add_to(int r, int c, std::int64_t v, const PrimeField& F);
    void set_row(int r, SparseVec v) { row_[r] = std::move(v); }

    SparseMatrix transpose() const;
    SparseMatrix mul(const SparseMatrix& rhs, const PrimeField& F) const;
    SparseMatrix add(const SparseMatrix& rhs, const PrimeField& F) const;
    SparseMatrix scale(Scalar c, const PrimeField& F) const;
    SparseVec apply(const SparseVec& v, const PrimeField& F) const;  // this * v
    SparseMatrix vstack(const SparseMatrix& below) const;

    bool operator==(const SparseMatrix& o) const;

private:
    int rows_ = 0, cols_ = 0;
    std::vector<SparseVec> row_;
};

struct RrefResult {
    SparseMatrix mat;         // rref, zero rows dropped
    std::vector<int> pivots;  // strictly increasing pivot columns
};

RrefResult rref(const SparseMatrix& m, const PrimeField& F);

// A subspace of F_p^ambient in canonical (rref) form.
struct Subspace {
    int ambient = 0;
    SparseMatrix basis;       // dim x ambient, rref
    std::vector<int> pivots;

    int dim() const { return basis.rows(); }
    static Subspace zero(int ambient);
    static Subspace full(int ambient);
    static Subspace span(const SparseMatrix& rows, const PrimeField& F);
    bool operator==(const Subspace& o) const {
        return ambient == o.ambient && basis == o.basis;
    }
};

Subspace kernel(const SparseMatrix& m, const PrimeField& F);   // {v : m v = 0}
Subspace image(const SparseMatrix& m, const PrimeField& F);    // column space
int rank(const SparseMatrix& m, const PrimeField& F);

// v mod S (reduce by the rref basis rows of S).
SparseVec reduce_by(const SparseVec& v, const Subspace& S, const PrimeField& F);
bool contains(const Subspace& S, const SparseVec& v, const PrimeField& F);
bool contains(const Subspace& S, const Subspace& T, const PrimeField& F);  // T ⊆ S

// Coordinates of v in S's basis; nullopt if v is not in S.
std::optional<SparseVec> coordinates(const Subspace& S, const SparseVec& v,
                                     const PrimeField& F);

Subspace subspace_sum(const Subspace& a, const Subspace& b, const PrimeField& F);
Subspace subspace_intersect(const Subspace& a, const Subspace& b, const PrimeField& F);

// {x in source : M x in target}; source defaults to the full space.
Subspace preimage(const SparseMatrix& M, const Subspace& target,
                  const Subspace& source, const PrimeField& F);
Subspace image_of_subspace(const SparseMatrix& M, const Subspace& S, const PrimeField& F);

// One solution of M x = b (free variables set to 0); nullopt if inconsistent.
std::optional<SparseVec> solve(const SparseMatrix& M, const SparseVec& b,
                               const PrimeField& F);

// Quotient ambient/sub with canonical complement representatives.
struct Quotient {
    SparseMatrix reps;        // q x ambient_dim rows, classes form a basis
    SparseMatrix projection;  // q x dim(ambient): ambient coords -> quotient coords
};
Quotient quotient(const Subspace& ambient, const Subspace& sub, const PrimeField& F);

// H = ker(d_out) / im(d_in), with cycle representatives.
struct Homology {
    int dim = 0;
    Subspace cycles;
    Subspace boundaries;
    SparseMatrix reps;        // dim x ambient
    SparseMatrix projection;  // dim x cycles.dim()
};
Homology subquotient_homology(const SparseMatrix& d_in, const SparseMatrix& d_out,
                              const PrimeField& F);

// Class of a cycle v in H (length-dim coordinate vector); throws if v is not a cycle.
SparseVec homology_class(const Homology& H, const SparseVec& v, const PrimeField& F);

}  // namespace coh::fplin

#endif
