#include "coh/graded.hpp"

#include <algorithm>
#include <sstream>

namespace coh::graded {

int GenTable::find(const std::string& name) const {
    for (int i = 0; i < static_cast<int>(gens.size()); ++i)
        if (gens[i].name == name) return i;
    return -1;
}

int Monomial::degree(const GenTable& t) const {
    int d = 0;
    for (auto& [g, e] : atoms) d += t.gens[g].degree * e;
    return d;
}

std::optional<std::pair<int, Monomial>> mul_monomials(const GenTable& t,
                                                      const Monomial& a,
                                                      const Monomial& b) {
    Monomial out;
    out.atoms.reserve(a.atoms.size() + b.atoms.size());
    long long parity = 0;
    // suffix[k] = total degree of a's atoms from position k on
    std::vector<int> suffix(a.atoms.size() + 1, 0);
    for (int k = static_cast<int>(a.atoms.size()) - 1; k >= 0; --k)
        suffix[k] = suffix[k + 1] + t.gens[a.atoms[k].first].degree * a.atoms[k].second;
    std::size_t i = 0, j = 0;
    while (i < a.atoms.size() || j < b.atoms.size()) {
        if (j == b.atoms.size() ||
            (i < a.atoms.size() && a.atoms[i].first < b.atoms[j].first)) {
            out.atoms.push_back(a.atoms[i]);
            ++i;
        } else {
            int g = b.atoms[j].first;
            int bdeg = t.gens[g].degree * b.atoms[j].second;
            if (i < a.atoms.size() && a.atoms[i].first == g) {
                // b's atom crosses the part of a strictly after atom i
                parity += static_cast<long long>(bdeg) * suffix[i + 1];
                int e = a.atoms[i].second + b.atoms[j].second;
                int h = t.gens[g].height;
                if (h != kInfiniteHeight && e >= h) return std::nullopt;
                out.atoms.push_back({g, e});
                ++i;
                ++j;
            } else {
                parity += static_cast<long long>(bdeg) * suffix[i];
                out.atoms.push_back(b.atoms[j]);
                ++j;
            }
        }
    }
    int sign = (parity % 2 == 0) ? 1 : -1;
    return std::make_pair(sign, std::move(out));
}

std::string monomial_string(const GenTable& t, const Monomial& m) {
    if (m.atoms.empty()) return "1";
    std::ostringstream os;
    bool first = true;
    for (auto& [g, e] : m.atoms) {
        if (!first) os << "*";
        first = false;
        os << t.gens[g].name;
        if (e != 1) os << "^" << e;
    }
    return os.str();
}

Monomial parse_monomial(const GenTable& t, const std::string& s) {
    Monomial m;
    if (s == "1") return m;
    std::size_t pos = 0;
    while (pos < s.size()) {
        std::size_t star = s.find('*', pos);
        std::string atom =
            s.substr(pos, star == std::string::npos ? star : star - pos);
        pos = star == std::string::npos ? s.size() : star + 1;
        int e = 1;
        std::size_t caret = atom.find('^');
        std::string name = atom;
        if (caret != std::string::npos) {
            name = atom.substr(0, caret);
            e = std::stoi(atom.substr(caret + 1));
        }
        int g = t.find(name);
        if (g < 0) throw fplin::MathError("unknown generator: " + name);
        if (e < 1) throw fplin::MathError("exponent must be >= 1 in " + atom);
        m.atoms.push_back({g, e});
    }
    std::sort(m.atoms.begin(), m.atoms.end());
    for (std::size_t i = 1; i < m.atoms.size(); ++i)
        if (m.atoms[i - 1].first == m.atoms[i].first)
            throw fplin::MathError("repeated generator in monomial: " + s);
    return m;
}

int GradedSpace::dim(int u) const {
    auto it = slices_.find(u);
    return it == slices_.end() ? 0 : static_cast<int>(it->second.size());
}

const std::vector<Label>& GradedSpace::slice(int u) const {
    static const std::vector<Label> empty;
    auto it = slices_.find(u);
    return it == slices_.end() ? empty : it->second;
}

int GradedSpace::index_of(int u, const Label& l) const {
    auto it = lookup_.find(u);
    if (it == lookup_.end()) return -1;
    auto jt = it->second.find(l);
    return jt == it->second.end() ? -1 : jt->second;
}

int GradedSpace::max_degree() const {
    return slices_.empty() ? -1 : slices_.rbegin()->first;
}

long long GradedSpace::total_dim() const {
    long long n = 0;
    for (auto& [u, v] : slices_) n += static_cast<long long>(v.size());
    return n;
}

int GradedSpace::label_degree(const Label& l) const {
    int d = 0;
    for (std::size_t i = 0; i < l.factors.size(); ++i)
        d += l.factors[i].degree(*tables_[i]);
    return d;
}

std::string GradedSpace::label_string(const Label& l) const {
    if (l.factors.empty()) return "1";
    std::ostringstream os;
    for (std::size_t i = 0; i < l.factors.size(); ++i) {
        if (i) os << "|";
        os << monomial_string(*tables_[i], l.factors[i]);
    }
    return os.str();
}

std::string GradedSpace::label_string(int u, int i) const {
    return label_string(slice(u)[i]);
}

void GradedSpace::add_label(int u, Label l) {
    if (u > trunc_) return;  // truncation is contagious: silently dropped
    auto& lk = lookup_[u];
    if (lk.count(l))
        throw fplin::MathError("duplicate label in slice " + std::to_string(u));
    lk[l] = static_cast<int>(slices_[u].size());
    slices_[u].push_back(std::move(l));
}

void GradedSpace::finish() {}

bool GradedSpace::same_dims(const GradedSpace& o) const {
    int m = std::max(max_degree(), o.max_degree());
    for (int u = 0; u <= m; ++u)
        if (dim(u) != o.dim(u)) return false;
    return true;
}

SpaceRef unit_space(int trunc) {
    auto s = std::make_shared<GradedSpace>(trunc, std::vector<TableRef>{});
    s->add_label(0, Label{});
    return s;
}

namespace {

struct TensorEntry {
    Label label;
    std::vector<int> atom_degs;  // one per atomic tensor factor
    std::vector<int> idxs;       // one per input factor
};

void enumerate_tensor(const std::vector<SpaceRef>& factors, std::size_t k, int u_left,
                      TensorEntry& acc, std::vector<TensorEntry>& out) {
    if (k == factors.size()) {
        if (u_left == 0) out.push_back(acc);
        return;
    }
    bool last = (k + 1 == factors.size());
    for (int u = 0; u <= u_left; ++u) {
        if (last && u != u_left) continue;
        const auto& sl = factors[k]->slice(u);
        if (sl.empty()) continue;
        for (int i = 0; i < static_cast<int>(sl.size()); ++i) {
            const Label& l = sl[i];
            std::size_t lb = acc.label.factors.size();
            std::size_t db = acc.atom_degs.size();
            for (std::size_t a = 0; a < l.factors.size(); ++a) {
                acc.label.factors.push_back(l.factors[a]);
                acc.atom_degs.push_back(
                    l.factors[a].degree(*factors[k]->factor_tables()[a]));
            }
            acc.idxs.push_back(i);
            enumerate_tensor(factors, k + 1, u_left - u, acc, out);
            acc.label.factors.resize(lb);
            acc.atom_degs.resize(db);
            acc.idxs.pop_back();
        }
    }
}

}  // namespace

// Slice ordering: lexicographic by the per-atomic-factor degree composition,
// then by factor indices. This makes tensor(tensor(A,B),C) and
// tensor(A,tensor(B,C)) literally identical slice orderings.
SpaceRef tensor(const std::vector<SpaceRef>& factors) {
    if (factors.empty()) throw fplin::MathError("tensor of zero spaces: use unit_space");
    int trunc = factors[0]->trunc();
    for (auto& f : factors)
        if (f->trunc() != trunc) throw fplin::MathError("tensor: truncation mismatch");
    std::vector<TableRef> tables;
    for (auto& f : factors)
        for (auto& t : f->factor_tables()) tables.push_back(t);
    auto out = std::make_shared<GradedSpace>(trunc, std::move(tables));
    for (int u = 0; u <= trunc; ++u) {
        std::vector<TensorEntry> entries;
        TensorEntry acc;
        enumerate_tensor(factors, 0, u, acc, entries);
        std::sort(entries.begin(), entries.end(),
                  [](const TensorEntry& a, const TensorEntry& b) {
                      if (a.atom_degs != b.atom_degs) return a.atom_degs < b.atom_degs;
                      return a.idxs < b.idxs;
                  });
        for (auto& e : entries) out->add_label(u, std::move(e.label));
    }
    return out;
}

std::vector<Label> split_label(const Label& l, const std::vector<int>& sizes) {
    std::vector<Label> parts;
    std::size_t pos = 0;
    for (int s : sizes) {
        Label p;
        for (int i = 0; i < s; ++i) p.factors.push_back(l.factors[pos++]);
        parts.push_back(std::move(p));
    }
    if (pos != l.factors.size()) throw fplin::MathError("split_label: size mismatch");
    return parts;
}

const fplin::SparseMatrix* GradedMap::block(int u) const {
    auto it = blocks.find(u);
    return it == blocks.end() ? nullptr : &it->second;
}

fplin::SparseMatrix GradedMap::block_or_zero(int u) const {
    auto it = blocks.find(u);
    if (it != blocks.end()) return it->second;
    return fplin::SparseMatrix(target->dim(u + shift), source->dim(u));
}

void GradedMap::set_block(int u, fplin::SparseMatrix m) {
    if (m.rows() != target->dim(u + shift) || m.cols() != source->dim(u))
        throw fplin::MathError("set_block: block shape mismatch at degree " +
                               std::to_string(u));
    if (m.is_zero())
        blocks.erase(u);
    else
        blocks[u] = std::move(m);
}

bool GradedMap::is_zero() const {
    for (auto& [u, b] : blocks)
        if (!b.is_zero()) return false;
    return true;
}

GradedMap zero_map(SpaceRef source, SpaceRef target, int shift) {
    GradedMap f;
    f.source = std::move(source);
    f.target = std::move(target);
    f.shift = shift;
    return f;
}

GradedMap identity_map(SpaceRef space) {
    GradedMap f = zero_map(space, space);
    for (int u = 0; u <= space->max_degree(); ++u)
        if (space->dim(u)) f.blocks[u] = fplin::SparseMatrix::identity(space->dim(u));
    return f;
}

GradedMap compose(const GradedMap& f, const GradedMap& g, const fplin::PrimeField& F) {
    if (f.source.get() != g.target.get() && !f.source->same_dims(*g.target))
        throw fplin::MathError("compose: dimension mismatch");
    GradedMap h = zero_map(g.source, f.target, f.shift + g.shift);
    for (auto& [u, gb] : g.blocks) {
        const fplin::SparseMatrix* fb = f.block(u + g.shift);
        if (!fb) continue;
        auto prod = fb->mul(gb, F);
        if (!prod.is_zero()) h.blocks[u] = std::move(prod);
    }
    return h;
}

GradedMap map_add(const GradedMap& f, const GradedMap& g, const fplin::PrimeField& F) {
    if (f.shift != g.shift) throw fplin::MathError("map_add: shift mismatch");
    GradedMap h = zero_map(f.source, f.target, f.shift);
    for (auto& [u, b] : f.blocks) h.blocks[u] = b;
    for (auto& [u, b] : g.blocks) {
        auto it = h.blocks.find(u);
        if (it == h.blocks.end())
            h.blocks[u] = b;
        else {
            it->second = it->second.add(b, F);
            if (it->second.is_zero()) h.blocks.erase(it);
        }
    }
    return h;
}

GradedMap map_scale(const GradedMap& f, fplin::Scalar c, const fplin::PrimeField& F) {
    GradedMap h = zero_map(f.source, f.target, f.shift);
    if (c == 0) return h;
    for (auto& [u, b] : f.blocks) h.blocks[u] = b.scale(c, F);
    return h;
}

bool map_equal(const GradedMap& f, const GradedMap& g) {
    if (f.shift != g.shift) return false;
    int m = std::max(f.source->max_degree(), g.source->max_degree());
    for (int u = 0; u <= m; ++u)
        if (!(f.block_or_zero(u) == g.block_or_zero(u))) return false;
    return true;
}

GradedMap tensor_map(const std::vector<const GradedMap*>& maps,
                     const fplin::PrimeField& F, int global_sign) {
    std::vector<SpaceRef> srcs, tgts;
    std::vector<int> src_sizes;
    int shift = 0;
    for (auto* m : maps) {
        srcs.push_back(m->source);
        tgts.push_back(m->target);
        src_sizes.push_back(m->source->factor_count());
        shift += m->shift;
    }
    SpaceRef source = srcs.size() == 1 ? srcs[0] : tensor(srcs);
    SpaceRef target = tgts.size() == 1 ? tgts[0] : tensor(tgts);
    GradedMap out = zero_map(source, target, shift);
    fplin::Scalar gs = F.reduce(global_sign);

    for (int u = 0; u <= source->max_degree(); ++u) {
        int sd = source->dim(u);
        if (!sd || !target->dim(u + shift)) continue;
        fplin::SparseMatrix block(target->dim(u + shift), sd);
        for (int col = 0; col < sd; ++col) {
            const Label& l = source->label(u, col);
            auto parts = split_label(l, src_sizes);
            std::vector<std::pair<fplin::Scalar, Label>> images{{gs, Label{}}};
            for (std::size_t k = 0; k < maps.size() && !images.empty(); ++k) {
                int pu = maps[k]->source->label_degree(parts[k]);
                int pi = maps[k]->source->index_of(pu, parts[k]);
                if (pi < 0) throw fplin::MathError("tensor_map: label not found");
                const fplin::SparseMatrix* b = maps[k]->block(pu);
                std::vector<std::pair<fplin::Scalar, Label>> next;
                if (b) {
                    for (int r = 0; r < b->rows(); ++r) {
                        fplin::Scalar v = b->at(r, pi);
                        if (!v) continue;
                        const Label& til = maps[k]->target->label(pu + maps[k]->shift, r);
                        for (auto& [c0, acc] : images) {
                            Label nl = acc;
                            for (auto& fmon : til.factors) nl.factors.push_back(fmon);
                            next.push_back({F.mul(c0, v), std::move(nl)});
                        }
                    }
                }
                images = std::move(next);
            }
            for (auto& [c, lab] : images) {
                int row = target->index_of(u + shift, lab);
                if (row < 0) continue;  // truncated away
                block.add_to(row, col, c, F);
            }
        }
        if (!block.is_zero()) out.blocks[u] = std::move(block);
    }
    return out;
}

GradedMap GradedSub::inclusion(const fplin::PrimeField& F) const {
    (void)F;
    GradedMap f = zero_map(space, ambient);
    for (auto& [u, s] : sub) {
        if (!s.dim()) continue;
        f.blocks[u] = s.basis.transpose();
    }
    return f;
}

GradedSub make_sub(SpaceRef ambient, std::map<int, fplin::Subspace> sub) {
    GradedSub out;
    out.ambient = ambient;
    auto sp = std::make_shared<GradedSpace>(ambient->trunc(), ambient->factor_tables());
    for (auto& [u, s] : sub) {
        if (s.ambient != ambient->dim(u))
            throw fplin::MathError("make_sub: ambient dimension mismatch at degree " +
                                   std::to_string(u));
        for (int i = 0; i < s.dim(); ++i)
            sp->add_label(u, ambient->label(u, s.pivots[i]));
    }
    out.space = sp;
    out.sub = std::move(sub);
    return out;
}

GradedSub full_sub(SpaceRef ambient) {
    std::map<int, fplin::Subspace> sub;
    for (int u = 0; u <= ambient->max_degree(); ++u)
        if (ambient->dim(u)) sub[u] = fplin::Subspace::full(ambient->dim(u));
    return make_sub(ambient, std::move(sub));
}

GradedMap restrict_corestrict(const GradedMap& f, const GradedSub& src,
                              const GradedSub& tgt, const fplin::PrimeField& F) {
    GradedMap out = zero_map(src.space, tgt.space, f.shift);
    for (auto& [u, s] : src.sub) {
        if (!s.dim()) continue;
        const fplin::SparseMatrix* b = f.block(u);
        if (!b) continue;
        int tu = u + f.shift;
        auto ti = tgt.sub.find(tu);
        int tdim = ti == tgt.sub.end() ? 0 : ti->second.dim();
        fplin::SparseMatrix block(tdim, s.dim());
        for (int i = 0; i < s.dim(); ++i) {
            fplin::SparseVec img = b->apply(s.basis.row(i), F);
            if (img.empty()) continue;
            if (ti == tgt.sub.end())
                throw DoesNotRestrict(
                    "does not restrict: image of basis vector " + std::to_string(i) +
                        " in degree " + std::to_string(u) + " lands in empty target",
                    u, i);
            auto coords = fplin::coordinates(ti->second, img, F);
            if (!coords)
                throw DoesNotRestrict(
                    "does not restrict: basis vector " + std::to_string(i) +
                        " in degree " + std::to_string(u) +
                        " maps outside the target subspace",
                    u, i);
            for (auto& [r, v] : coords->terms) block.add_to(r, i, v, F);
        }
        if (!block.is_zero()) out.blocks[u] = std::move(block);
    }
    return out;
}

}  // namespace coh::graded
