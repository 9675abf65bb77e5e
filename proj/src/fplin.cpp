#include "coh/fplin.hpp"

#include <algorithm>
#include <map>

namespace coh::fplin {

PrimeField::PrimeField(std::uint32_t p) : p_(p) {
    if (p < 2) throw MathError("field characteristic must be >= 2");
    if (p > (1u << 31)) throw MathError("p too large: products must fit in 64 bits");
    for (std::uint64_t d = 2; d * d <= p; ++d)
        if (p % d == 0) throw MathError("p = " + std::to_string(p) + " is not prime");
}

Scalar PrimeField::pow(Scalar a, std::uint64_t e) const {
    Scalar r = 1 % p_;
    Scalar base = a % p_;
    while (e) {
        if (e & 1) r = mul(r, base);
        base = mul(base, base);
        e >>= 1;
    }
    return r;
}

Scalar PrimeField::inv(Scalar a) const {
    a %= p_;
    if (a == 0) throw MathError("division by zero in F_p");
    return pow(a, p_ - 2);
}

Scalar SparseVec::at(int i) const {
    auto it = std::lower_bound(terms.begin(), terms.end(), i,
                               [](const auto& t, int j) { return t.first < j; });
    if (it != terms.end() && it->first == i) return it->second;
    return 0;
}

SparseVec vec_add_scaled(const SparseVec& a, const SparseVec& b, Scalar c,
                         const PrimeField& F) {
    SparseVec out;
    out.terms.reserve(a.terms.size() + b.terms.size());
    std::size_t i = 0, j = 0;
    while (i < a.terms.size() || j < b.terms.size()) {
        if (j == b.terms.size() ||
            (i < a.terms.size() && a.terms[i].first < b.terms[j].first)) {
            out.terms.push_back(a.terms[i++]);
        } else if (i == a.terms.size() || b.terms[j].first < a.terms[i].first) {
            Scalar v = F.mul(c, b.terms[j].second);
            if (v) out.terms.push_back({b.terms[j].first, v});
            ++j;
        } else {
            Scalar v = F.add(a.terms[i].second, F.mul(c, b.terms[j].second));
            if (v) out.terms.push_back({a.terms[i].first, v});
            ++i;
            ++j;
        }
    }
    return out;
}

SparseVec vec_scale(const SparseVec& a, Scalar c, const PrimeField& F) {
    SparseVec out;
    if (c == 0) return out;
    out.terms.reserve(a.terms.size());
    for (auto& [i, v] : a.terms) {
        Scalar w = F.mul(v, c);
        if (w) out.terms.push_back({i, w});
    }
    return out;
}

SparseVec unit_vec(int i) {
    SparseVec v;
    v.terms.push_back({i, 1});
    return v;
}

SparseMatrix SparseMatrix::identity(int n) {
    SparseMatrix m(n, n);
    for (int i = 0; i < n; ++i) m.row_[i].terms.push_back({i, 1});
    return m;
}

SparseMatrix SparseMatrix::from_rows(int cols, std::vector<SparseVec> rows) {
    SparseMatrix m(static_cast<int>(rows.size()), cols);
    m.row_ = std::move(rows);
    return m;
}

SparseMatrix SparseMatrix::from_dense(int rows, int cols,
                                      const std::vector<std::vector<std::int64_t>>& a,
                                      const PrimeField& F) {
    SparseMatrix m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            Scalar v = F.reduce(a[r][c]);
            if (v) m.row_[r].terms.push_back({c, v});
        }
    return m;
}

long long SparseMatrix::nnz() const {
    long long n = 0;
    for (auto& r : row_) n += static_cast<long long>(r.terms.size());
    return n;
}

void SparseMatrix::add_to(int r, int c, std::int64_t v, const PrimeField& F) {
    Scalar w = F.reduce(v);
    if (w == 0) return;
    auto& terms = row_[r].terms;
    auto it = std::lower_bound(terms.begin(), terms.end(), c,
                               [](const auto& t, int j) { return t.first < j; });
    if (it != terms.end() && it->first == c) {
        Scalar s = F.add(it->second, w);
        if (s)
            it->second = s;
        else
            terms.erase(it);
    } else {
        terms.insert(it, {c, w});
    }
}

SparseMatrix SparseMatrix::transpose() const {
    SparseMatrix t(cols_, rows_);
    for (int r = 0; r < rows_; ++r)
        for (auto& [c, v] : row_[r].terms) t.row_[c].terms.push_back({r, v});
    return t;  // column order within rows is already ascending
}

SparseMatrix SparseMatrix::mul(const SparseMatrix& rhs, const PrimeField& F) const {
    if (cols_ != rhs.rows_) throw MathError("matrix product dimension mismatch");
    SparseMatrix out(rows_, rhs.cols_);
    std::map<int, std::uint64_t> acc;
    for (int r = 0; r < rows_; ++r) {
        acc.clear();
        for (auto& [k, v] : row_[r].terms)
            for (auto& [c, w] : rhs.row_[k].terms) {
                acc[c] += static_cast<std::uint64_t>(v) * w % F.p();
            }
        for (auto& [c, s] : acc) {
            Scalar v = static_cast<Scalar>(s % F.p());
            if (v) out.row_[r].terms.push_back({c, v});
        }
    }
    return out;
}

SparseMatrix SparseMatrix::add(const SparseMatrix& rhs, const PrimeField& F) const {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
        throw MathError("matrix sum dimension mismatch");
    SparseMatrix out(rows_, cols_);
    for (int r = 0; r < rows_; ++r)
        out.row_[r] = vec_add_scaled(row_[r], rhs.row_[r], 1, F);
    return out;
}

SparseMatrix SparseMatrix::scale(Scalar c, const PrimeField& F) const {
    SparseMatrix out(rows_, cols_);
    for (int r = 0; r < rows_; ++r) out.row_[r] = vec_scale(row_[r], c, F);
    return out;
}

SparseVec SparseMatrix::apply(const SparseVec& v, const PrimeField& F) const {
    SparseVec out;
    for (int r = 0; r < rows_; ++r) {
        std::uint64_t acc = 0;
        auto it = row_[r].terms.begin();
        auto jt = v.terms.begin();
        while (it != row_[r].terms.end() && jt != v.terms.end()) {
            if (it->first < jt->first)
                ++it;
            else if (jt->first < it->first)
                ++jt;
            else {
                acc += static_cast<std::uint64_t>(it->second) * jt->second % F.p();
                ++it;
                ++jt;
            }
        }
        Scalar s = static_cast<Scalar>(acc % F.p());
        if (s) out.terms.push_back({r, s});
    }
    return out;
}

SparseMatrix SparseMatrix::vstack(const SparseMatrix& below) const {
    if (cols_ != below.cols_) throw MathError("vstack dimension mismatch");
    SparseMatrix out(rows_ + below.rows_, cols_);
    for (int r = 0; r < rows_; ++r) out.row_[r] = row_[r];
    for (int r = 0; r < below.rows_; ++r) out.row_[rows_ + r] = below.row_[r];
    return out;
}

bool SparseMatrix::operator==(const SparseMatrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && row_ == o.row_;
}

RrefResult rref(const SparseMatrix& m, const PrimeField& F) {
    // Forward elimination with sparsest-pivot selection, then back substitution.
    // The result is the unique rref, so pivot choices only affect speed.
    std::vector<SparseVec> work;
    work.reserve(m.rows());
    for (int r = 0; r < m.rows(); ++r)
        if (!m.row(r).empty()) work.push_back(m.row(r));

    std::vector<SparseVec> done;
    std::vector<int> pivots;
    while (!work.empty()) {
        int best = -1;
        for (int i = 0; i < static_cast<int>(work.size()); ++i) {
            if (best < 0) {
                best = i;
                continue;
            }
            int li = work[i].leading_index(), lb = work[best].leading_index();
            if (li < lb || (li == lb && work[i].terms.size() < work[best].terms.size()))
                best = i;
        }
        SparseVec piv = std::move(work[best]);
        work.erase(work.begin() + best);
        int pc = piv.leading_index();
        piv = vec_scale(piv, F.inv(piv.terms.front().second), F);
        std::vector<SparseVec> next;
        next.reserve(work.size());
        for (auto& w : work) {
            Scalar c = w.at(pc);
            SparseVec red = c ? vec_add_scaled(w, piv, F.neg(c), F) : std::move(w);
            if (!red.empty()) next.push_back(std::move(red));
        }
        work = std::move(next);
        done.push_back(std::move(piv));
        pivots.push_back(pc);
    }
    // Sort by pivot column and clear entries above pivots.
    std::vector<int> order(done.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return pivots[a] < pivots[b]; });
    std::vector<SparseVec> rows;
    std::vector<int> pcols;
    for (int i : order) {
        rows.push_back(done[i]);
        pcols.push_back(pivots[i]);
    }
    for (int i = static_cast<int>(rows.size()) - 1; i >= 0; --i)
        for (int j = 0; j < i; ++j) {
            Scalar c = rows[j].at(pcols[i]);
            if (c) rows[j] = vec_add_scaled(rows[j], rows[i], F.neg(c), F);
        }
    RrefResult out;
    out.mat = SparseMatrix::from_rows(m.cols(), std::move(rows));
    out.pivots = std::move(pcols);
    return out;
}

Subspace Subspace::zero(int ambient) {
    Subspace s;
    s.ambient = ambient;
    s.basis = SparseMatrix(0, ambient);
    return s;
}

Subspace Subspace::full(int ambient) {
    Subspace s;
    s.ambient = ambient;
    s.basis = SparseMatrix::identity(ambient);
    s.pivots.resize(ambient);
    for (int i = 0; i < ambient; ++i) s.pivots[i] = i;
    return s;
}

Subspace Subspace::span(const SparseMatrix& rows, const PrimeField& F) {
    auto r = rref(rows, F);
    Subspace s;
    s.ambient = rows.cols();
    s.basis = std::move(r.mat);
    s.pivots = std::move(r.pivots);
    return s;
}

Subspace kernel(const SparseMatrix& m, const PrimeField& F) {
    auto r = rref(m, F);
    std::vector<bool> is_pivot(m.cols(), false);
    for (int p : r.pivots) is_pivot[p] = true;
    std::vector<SparseVec> rows;
    for (int f = 0; f < m.cols(); ++f) {
        if (is_pivot[f]) continue;
        SparseVec v;
        // v_f = 1, v_{pivot_i} = -R[i][f]
        for (int i = 0; i < static_cast<int>(r.pivots.size()); ++i) {
            Scalar c = r.mat.row(i).at(f);
            if (c) v.terms.push_back({r.pivots[i], F.neg(c)});
        }
        v.terms.push_back({f, 1});
        std::sort(v.terms.begin(), v.terms.end());
        rows.push_back(std::move(v));
    }
    return Subspace::span(SparseMatrix::from_rows(m.cols(), std::move(rows)), F);
}

Subspace image(const SparseMatrix& m, const PrimeField& F) {
    return Subspace::span(m.transpose(), F);
}

int rank(const SparseMatrix& m, const PrimeField& F) {
    return static_cast<int>(rref(m, F).pivots.size());
}

SparseVec reduce_by(const SparseVec& v, const Subspace& S, const PrimeField& F) {
    SparseVec out = v;
    for (int i = 0; i < S.dim(); ++i) {
        Scalar c = out.at(S.pivots[i]);
        if (c) out = vec_add_scaled(out, S.basis.row(i), F.neg(c), F);
    }
    return out;
}

bool contains(const Subspace& S, const SparseVec& v, const PrimeField& F) {
    return reduce_by(v, S, F).empty();
}

bool contains(const Subspace& S, const Subspace& T, const PrimeField& F) {
    for (int i = 0; i < T.dim(); ++i)
        if (!contains(S, T.basis.row(i), F)) return false;
    return true;
}

std::optional<SparseVec> coordinates(const Subspace& S, const SparseVec& v,
                                     const PrimeField& F) {
    SparseVec rest = v, coords;
    for (int i = 0; i < S.dim(); ++i) {
        Scalar c = rest.at(S.pivots[i]);
        if (c) {
            coords.terms.push_back({i, c});
            rest = vec_add_scaled(rest, S.basis.row(i), F.neg(c), F);
        }
    }
    if (!rest.empty()) return std::nullopt;
    return coords;
}

Subspace subspace_sum(const Subspace& a, const Subspace& b, const PrimeField& F) {
    if (a.ambient != b.ambient) throw MathError("subspace sum: ambient mismatch");
    return Subspace::span(a.basis.vstack(b.basis), F);
}

Subspace subspace_intersect(const Subspace& a, const Subspace& b, const PrimeField& F) {
    if (a.ambient != b.ambient) throw MathError("subspace intersect: ambient mismatch");
    // Solve c_a * A = c_b * B: kernel of [A^T | -B^T].
    SparseMatrix sys(a.ambient, a.dim() + b.dim());
    for (int i = 0; i < a.dim(); ++i)
        for (auto& [c, v] : a.basis.row(i).terms) sys.add_to(c, i, v, F);
    for (int i = 0; i < b.dim(); ++i)
        for (auto& [c, v] : b.basis.row(i).terms)
            sys.add_to(c, a.dim() + i, F.p() - v, F);
    Subspace ker = kernel(sys, F);
    std::vector<SparseVec> rows;
    for (int i = 0; i < ker.dim(); ++i) {
        SparseVec x;
        for (auto& [j, v] : ker.basis.row(i).terms)
            if (j < a.dim()) x = vec_add_scaled(x, a.basis.row(j), v, F);
        if (!x.empty()) rows.push_back(std::move(x));
    }
    return Subspace::span(SparseMatrix::from_rows(a.ambient, std::move(rows)), F);
}

Subspace preimage(const SparseMatrix& M, const Subspace& target,
                  const Subspace& source, const PrimeField& F) {
    if (M.cols() != source.ambient || M.rows() != target.ambient)
        throw MathError("preimage: dimension mismatch");
    // x = source^T c; require M x reduced by target to vanish.
    SparseMatrix sys(target.ambient, source.dim());
    for (int i = 0; i < source.dim(); ++i) {
        SparseVec img = M.apply(source.basis.row(i), F);
        img = reduce_by(img, target, F);
        for (auto& [r, v] : img.terms) sys.add_to(r, i, v, F);
    }
    Subspace ker = kernel(sys, F);
    std::vector<SparseVec> rows;
    for (int i = 0; i < ker.dim(); ++i) {
        SparseVec x;
        for (auto& [j, v] : ker.basis.row(i).terms)
            x = vec_add_scaled(x, source.basis.row(j), v, F);
        if (!x.empty()) rows.push_back(std::move(x));
    }
    return Subspace::span(SparseMatrix::from_rows(source.ambient, std::move(rows)), F);
}

Subspace image_of_subspace(const SparseMatrix& M, const Subspace& S,
                           const PrimeField& F) {
    std::vector<SparseVec> rows;
    for (int i = 0; i < S.dim(); ++i) rows.push_back(M.apply(S.basis.row(i), F));
    return Subspace::span(SparseMatrix::from_rows(M.rows(), std::move(rows)), F);
}

std::optional<SparseVec> solve(const SparseMatrix& M, const SparseVec& b,
                               const PrimeField& F) {
    // Row-reduce [M | b] and back-substitute with free variables at 0.
    SparseMatrix aug(M.rows(), M.cols() + 1);
    for (int r = 0; r < M.rows(); ++r) aug.set_row(r, M.row(r));
    for (auto& [r, v] : b.terms) aug.add_to(r, M.cols(), v, F);
    auto r = rref(aug, F);
    SparseVec x;
    for (int i = 0; i < static_cast<int>(r.pivots.size()); ++i) {
        if (r.pivots[i] == M.cols()) return std::nullopt;  // inconsistent
        Scalar v = r.mat.row(i).at(M.cols());
        if (v) x.terms.push_back({r.pivots[i], v});
    }
    return x;
}

Quotient quotient(const Subspace& ambient, const Subspace& sub, const PrimeField& F) {
    if (ambient.ambient != sub.ambient)
        throw MathError("quotient: ambient dimension mismatch");
    for (int i = 0; i < sub.dim(); ++i)
        if (!contains(ambient, sub.basis.row(i), F))
            throw MathError("not a subspace: row " + std::to_string(i) +
                            " of sub is outside ambient");
    // Express sub in ambient coordinates (read off at ambient's pivot columns).
    SparseMatrix sub_in_amb(sub.dim(), ambient.dim());
    for (int i = 0; i < sub.dim(); ++i)
        for (int j = 0; j < ambient.dim(); ++j) {
            Scalar c = sub.basis.row(i).at(ambient.pivots[j]);
            if (c) sub_in_amb.add_to(i, j, c, F);
        }
    auto r = rref(sub_in_amb, F);
    std::vector<bool> is_pivot(ambient.dim(), false);
    for (int p : r.pivots) is_pivot[p] = true;

    std::vector<int> free_cols;
    for (int j = 0; j < ambient.dim(); ++j)
        if (!is_pivot[j]) free_cols.push_back(j);

    Quotient out;
    out.reps = SparseMatrix(static_cast<int>(free_cols.size()), ambient.ambient);
    out.projection =
        SparseMatrix(static_cast<int>(free_cols.size()), ambient.dim());
    for (int qi = 0; qi < static_cast<int>(free_cols.size()); ++qi) {
        out.reps.set_row(qi, ambient.basis.row(free_cols[qi]));
        // projection row: e_{free} minus contributions of pivot coordinates
        out.projection.add_to(qi, free_cols[qi], 1, F);
        for (int i = 0; i < static_cast<int>(r.pivots.size()); ++i) {
            Scalar c = r.mat.row(i).at(free_cols[qi]);
            if (c) out.projection.add_to(qi, r.pivots[i], F.p() - c, F);
        }
    }
    return out;
}

Homology subquotient_homology(const SparseMatrix& d_in, const SparseMatrix& d_out,
                              const PrimeField& F) {
    if (d_in.rows() != d_out.cols())
        throw MathError("subquotient_homology: dimension mismatch");
    if (!d_out.mul(d_in, F).is_zero())
        throw MathError("not a complex: d_out . d_in != 0");
    Homology H;
    H.cycles = kernel(d_out, F);
    H.boundaries = image(d_in, F);
    Quotient q = quotient(H.cycles, H.boundaries, F);
    H.reps = q.reps;
    H.projection = q.projection;
    H.dim = H.reps.rows();
    return H;
}

SparseVec homology_class(const Homology& H, const SparseVec& v, const PrimeField& F) {
    auto c = coordinates(H.cycles, v, F);
    if (!c) throw MathError("homology_class: vector is not a cycle");
    return H.projection.apply(*c, F);
}

}  // namespace coh::fplin
