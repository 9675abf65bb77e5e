#include "coh/hopf.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace coh::hopf {

using fplin::PrimeField;
using fplin::Scalar;
using fplin::SparseMatrix;
using graded::GenTable;
using graded::kInfiniteHeight;

namespace {

std::string mon_str(const GenTable& t, const Monomial& m) {
    return graded::monomial_string(t, m);
}

void lin_add(std::map<Monomial, Scalar>& acc, const Monomial& m, Scalar c,
             const PrimeField& F) {
    auto it = acc.find(m);
    if (it == acc.end()) {
        if (c) acc[m] = c;
    } else {
        it->second = F.add(it->second, c);
        if (!it->second) acc.erase(it);
    }
}

}  // namespace

struct HopfAlgebra::Impl {
    std::map<Monomial, std::vector<DeltaTerm>> delta;
    std::map<Monomial, Lin> antipode;
    SpaceRef square;
    GradedMap Delta_map, mu_map, counit, unit, antipode_map;
    SpaceRef unit_space;
};

const std::vector<DeltaTerm>& HopfAlgebra::delta(const Monomial& m) const {
    auto it = impl->delta.find(m);
    if (it == impl->delta.end())
        throw fplin::MathError("delta: unknown monomial " + mon_str(*table, m));
    return it->second;
}

std::vector<DeltaTerm> HopfAlgebra::delta_reduced(const Monomial& m) const {
    std::vector<DeltaTerm> out;
    for (auto& t : delta(m))
        if (!t.left.is_unit() && !t.right.is_unit()) out.push_back(t);
    return out;
}

const Lin& HopfAlgebra::antipode(const Monomial& m) const {
    auto it = impl->antipode.find(m);
    if (it == impl->antipode.end())
        throw fplin::MathError("antipode: unknown monomial " + mon_str(*table, m));
    return it->second;
}

std::optional<std::pair<Scalar, Monomial>> HopfAlgebra::mul(const Monomial& a,
                                                            const Monomial& b) const {
    auto r = graded::mul_monomials(*table, a, b);
    if (!r) return std::nullopt;
    if (r->second.degree(*table) > D) return std::nullopt;  // window truncation
    return std::make_pair(F.reduce(r->first), std::move(r->second));
}

SpaceRef HopfAlgebra::square() const { return impl->square; }
const GradedMap& HopfAlgebra::Delta_map() const { return impl->Delta_map; }
const GradedMap& HopfAlgebra::mu_map() const { return impl->mu_map; }
const GradedMap& HopfAlgebra::counit_map() const { return impl->counit; }
const GradedMap& HopfAlgebra::unit_map() const { return impl->unit; }
const GradedMap& HopfAlgebra::antipode_map() const { return impl->antipode_map; }
SpaceRef HopfAlgebra::unit_space_ref() const { return impl->unit_space; }

namespace {

// Multiply two term lists in Gamma(x)Gamma with the Koszul sign
// (a(x)b)(c(x)d) = (-1)^{|b||c|} ac (x) bd.
std::vector<DeltaTerm> square_product(const HopfAlgebra& H,
                                      const std::vector<DeltaTerm>& A,
                                      const std::vector<DeltaTerm>& B) {
    const PrimeField& F = H.F;
    std::map<std::pair<Monomial, Monomial>, Scalar> acc;
    for (auto& a : A)
        for (auto& b : B) {
            auto lm = H.mul(a.left, b.left);
            if (!lm) continue;
            auto rm = H.mul(a.right, b.right);
            if (!rm) continue;
            long long par = static_cast<long long>(H.mon_degree(a.right)) *
                            H.mon_degree(b.left);
            Scalar c = F.mul(F.mul(a.coef, b.coef), F.mul(lm->first, rm->first));
            if (par % 2) c = F.neg(c);
            if (!c) continue;
            auto key = std::make_pair(lm->second, rm->second);
            auto it = acc.find(key);
            if (it == acc.end())
                acc[key] = c;
            else {
                it->second = F.add(it->second, c);
                if (!it->second) acc.erase(it);
            }
        }
    std::vector<DeltaTerm> out;
    for (auto& [k, v] : acc) out.push_back({v, k.first, k.second});
    return out;
}

void enumerate_monomials(const GenTable& t, int D, std::size_t g, Monomial& acc,
                         int deg, std::vector<Monomial>& out) {
    if (g == t.gens.size()) {
        out.push_back(acc);
        return;
    }
    // exponent 0 first, then increasing
    enumerate_monomials(t, D, g + 1, acc, deg, out);
    const auto& gen = t.gens[g];
    int e = 1;
    while (true) {
        if (gen.height != kInfiniteHeight && e >= gen.height) break;
        int nd = deg + gen.degree * e;
        if (nd > D) break;
        acc.atoms.push_back({static_cast<int>(g), e});
        std::sort(acc.atoms.begin(), acc.atoms.end());
        Monomial saved = acc;
        enumerate_monomials(t, D, g + 1, acc, nd, out);
        acc = saved;
        acc.atoms.erase(std::find(acc.atoms.begin(), acc.atoms.end(),
                                  std::make_pair(static_cast<int>(g), e)));
        ++e;
    }
}

}  // namespace

HopfRef build_monomial_hopf(const HopfBuild& build, const std::string& name,
                            bool validate) {
    PrimeField F(build.p);
    auto H = std::make_shared<HopfAlgebra>(F);
    H->D = build.D;
    H->name = name;
    H->impl = std::make_shared<HopfAlgebra::Impl>();

    auto table = std::make_shared<GenTable>();
    table->gens = build.gens;
    for (auto& g : table->gens) {
        if (g.degree < 1) throw fplin::MathError("generator degree must be >= 1");
        if (g.height != kInfiniteHeight) {
            bool ok = g.height == 2;
            for (long long h = build.p; h <= g.height && !ok; h *= build.p)
                if (h == g.height) ok = true;
            if (!ok)
                throw fplin::MathError("height of " + g.name +
                                       " must be 2, a power of p, or infinite");
        }
        if (build.p != 2 && g.degree % 2 == 1 && g.height != 2)
            throw fplin::MathError("odd-degree generator " + g.name +
                                   " must be exterior (height 2) for odd p");
    }
    H->table = table;

    // monomial basis, per degree, atoms-lexicographic within a degree
    std::vector<Monomial> mons;
    {
        Monomial acc;
        enumerate_monomials(*table, build.D, 0, acc, 0, mons);
    }
    std::stable_sort(mons.begin(), mons.end(),
                     [&](const Monomial& a, const Monomial& b) {
                         int da = a.degree(*table), db = b.degree(*table);
                         if (da != db) return da < db;
                         return a < b;
                     });
    auto space = std::make_shared<graded::GradedSpace>(
        build.D, std::vector<graded::TableRef>{table});
    for (auto& m : mons) space->add_label(m.degree(*table), Label{{m}});
    H->space = space;
    H->impl->unit_space = graded::unit_space(build.D);

    // generator coproducts
    std::vector<std::vector<DeltaTerm>> gen_delta(table->gens.size());
    for (std::size_t g = 0; g < table->gens.size(); ++g) {
        std::vector<DeltaTerm> terms;
        Monomial gm{{{static_cast<int>(g), 1}}};
        terms.push_back({1, gm, Monomial{}});
        terms.push_back({1, Monomial{}, gm});
        if (g < build.middle.size())
            for (auto& [c, l, r] : build.middle[g]) {
                if (l.is_unit() || r.is_unit())
                    throw fplin::MathError("coproduct middle terms must be "
                                           "grouplike-free (both factors positive)");
                if (l.degree(*table) + r.degree(*table) != table->gens[g].degree)
                    throw fplin::MathError("coproduct term degree mismatch for " +
                                           table->gens[g].name);
                Scalar cv = F.reduce(c);
                if (cv) terms.push_back({cv, l, r});
            }
        gen_delta[g] = std::move(terms);
    }
    for (auto& [g, full] : build.raw_full) {
        std::vector<DeltaTerm> terms;
        for (auto& [c, l, r] : full) {
            Scalar cv = F.reduce(c);
            if (cv) terms.push_back({cv, l, r});
        }
        gen_delta[g] = std::move(terms);
    }

    // Delta extended multiplicatively, smallest generator split off first
    auto& delta = H->impl->delta;
    delta[Monomial{}] = {{1, Monomial{}, Monomial{}}};
    for (auto& m : mons) {
        if (m.is_unit()) continue;
        auto [g, e] = m.atoms.front();
        Monomial rest = m;
        if (e == 1)
            rest.atoms.erase(rest.atoms.begin());
        else
            rest.atoms.front().second = e - 1;
        delta[m] = square_product(*H, gen_delta[g], delta.at(rest));
    }

    // antipode by degree recursion from mu(c (x) id) Delta = eta eps
    auto& anti = H->impl->antipode;
    anti[Monomial{}] = {{1, Monomial{}}};
    for (auto& m : mons) {
        if (m.is_unit()) continue;
        int dm = m.degree(*table);
        std::map<Monomial, Scalar> acc;
        for (auto& t : delta.at(m)) {
            if (t.left.degree(*table) == dm) continue;  // the m (x) 1 term
            for (auto& [cl, lmon] : anti.at(t.left)) {
                auto pr = H->mul(lmon, t.right);
                if (!pr) continue;
                Scalar c = F.mul(F.mul(t.coef, cl), pr->first);
                lin_add(acc, pr->second, F.neg(c), F);
            }
        }
        Lin out;
        for (auto& [mon, c] : acc) out.push_back({c, mon});
        anti[m] = std::move(out);
    }

    // structure maps as graded blocks
    auto& I = *H->impl;
    I.square = graded::tensor({H->space, H->space});
    I.Delta_map = graded::zero_map(H->space, I.square);
    I.mu_map = graded::zero_map(I.square, H->space);
    I.counit = graded::zero_map(H->space, I.unit_space);
    I.unit = graded::zero_map(I.unit_space, H->space);
    I.antipode_map = graded::zero_map(H->space, H->space);
    for (int u = 0; u <= build.D; ++u) {
        int d = H->space->dim(u);
        if (!d) continue;
        SparseMatrix dm(I.square->dim(u), d), am(d, d);
        for (int i = 0; i < d; ++i) {
            const Monomial& m = H->space->label(u, i).factors[0];
            for (auto& t : delta.at(m)) {
                int row = I.square->index_of(u, Label{{t.left, t.right}});
                if (row >= 0) dm.add_to(row, i, t.coef, F);
            }
            for (auto& [c, mon] : anti.at(m)) {
                int row = H->space->index_of(u, Label{{mon}});
                if (row >= 0) am.add_to(row, i, c, F);
            }
        }
        I.Delta_map.set_block(u, std::move(dm));
        I.antipode_map.set_block(u, std::move(am));

        int sq = I.square->dim(u);
        if (sq) {
            SparseMatrix mm(d, sq);
            for (int j = 0; j < sq; ++j) {
                const Label& l = I.square->label(u, j);
                auto pr = H->mul(l.factors[0], l.factors[1]);
                if (!pr) continue;
                int row = H->space->index_of(u, Label{{pr->second}});
                if (row >= 0) mm.add_to(row, j, pr->first, F);
            }
            I.mu_map.set_block(u, std::move(mm));
        }
    }
    {
        SparseMatrix eps(1, H->space->dim(0)), eta(H->space->dim(0), 1);
        eps.add_to(0, 0, 1, F);
        eta.add_to(0, 0, 1, F);
        I.counit.set_block(0, std::move(eps));
        I.unit.set_block(0, std::move(eta));
    }

    if (validate) {
        Report r = validate_hopf(*H);
        if (!r.all_passed())
            throw fplin::MathError("axiom failure: " + r.first_failure());
    }
    return H;
}

Report validate_hopf(const HopfAlgebra& H) {
    const PrimeField& F = H.F;
    Report rep;
    rep.subject = H.name;
    auto sq = H.square();
    auto id = graded::identity_map(H.space);

    rep.check("connected: slice 0 = k{1}",
              H.space->dim(0) == 1 && H.space->label(0, 0).factors[0].is_unit());

    auto first_diff = [&](const GradedMap& a, const GradedMap& b) -> std::string {
        for (int u = 0; u <= H.D; ++u)
            if (!(a.block_or_zero(u) == b.block_or_zero(u)))
                return "first failure at degree " + std::to_string(u);
        return "";
    };
    auto check_eq = [&](const std::string& name, const GradedMap& a,
                        const GradedMap& b) {
        std::string w = first_diff(a, b);
        rep.check(name, w.empty(), w);
    };

    // counit axioms
    auto eps_id = graded::tensor_map({&H.counit_map(), &id}, F);
    auto id_eps = graded::tensor_map({&id, &H.counit_map()}, F);
    check_eq("counit: (eps x id)Delta = id",
             graded::compose(eps_id, H.Delta_map(), F), id);
    check_eq("counit: (id x eps)Delta = id",
             graded::compose(id_eps, H.Delta_map(), F), id);

    // coassociativity
    auto d_id = graded::tensor_map({&H.Delta_map(), &id}, F);
    auto id_d = graded::tensor_map({&id, &H.Delta_map()}, F);
    check_eq("coassociativity", graded::compose(d_id, H.Delta_map(), F),
             graded::compose(id_d, H.Delta_map(), F));

    // associativity and unit for mu
    auto m_id = graded::tensor_map({&H.mu_map(), &id}, F);
    auto id_m = graded::tensor_map({&id, &H.mu_map()}, F);
    check_eq("associativity", graded::compose(H.mu_map(), m_id, F),
             graded::compose(H.mu_map(), id_m, F));
    auto eta_id = graded::tensor_map({&H.unit_map(), &id}, F);
    check_eq("left unit", graded::compose(H.mu_map(), eta_id, F), id);
    auto id_eta = graded::tensor_map({&id, &H.unit_map()}, F);
    check_eq("right unit", graded::compose(H.mu_map(), id_eta, F), id);

    // Delta is an algebra map: Delta mu = mu_{GxG} (Delta x Delta),
    // where mu_{GxG}((a|b)|(c|d)) = (-1)^{|b||c|} (ac | bd).
    {
        auto dd = graded::tensor_map({&H.Delta_map(), &H.Delta_map()}, F);
        auto four = dd.target;
        GradedMap mu_sq = graded::zero_map(four, sq);
        for (int u = 0; u <= H.D; ++u) {
            int sd = four->dim(u);
            if (!sd || !sq->dim(u)) continue;
            SparseMatrix block(sq->dim(u), sd);
            for (int j = 0; j < sd; ++j) {
                const Label& l = four->label(u, j);
                const Monomial &a = l.factors[0], &b = l.factors[1], &c = l.factors[2],
                               &d = l.factors[3];
                auto ac = H.mul(a, c);
                if (!ac) continue;
                auto bd = H.mul(b, d);
                if (!bd) continue;
                Scalar v = F.mul(ac->first, bd->first);
                if ((static_cast<long long>(H.mon_degree(b)) * H.mon_degree(c)) % 2)
                    v = F.neg(v);
                int row = sq->index_of(u, Label{{ac->second, bd->second}});
                if (row >= 0) block.add_to(row, j, v, F);
            }
            if (!block.is_zero()) mu_sq.set_block(u, std::move(block));
        }
        check_eq("Delta is an algebra map",
                 graded::compose(H.Delta_map(), H.mu_map(), F),
                 graded::compose(mu_sq, dd, F));
    }

    // eps is an algebra map: eps mu = eps x eps (on the unit slice this is scalar mult)
    {
        auto ee = graded::tensor_map({&H.counit_map(), &H.counit_map()}, F);
        // target is k(x)k; identify with k by dims
        GradedMap lhs = graded::compose(H.counit_map(), H.mu_map(), F);
        bool ok = true;
        std::string w;
        for (int u = 0; u <= H.D; ++u) {
            auto a = lhs.block_or_zero(u);
            auto b = ee.block_or_zero(u);
            if (!(a == b)) {
                ok = false;
                w = "degree " + std::to_string(u);
                break;
            }
        }
        rep.check("counit is an algebra map", ok, w);
    }

    // antipode identities
    auto eta_eps = graded::compose(H.unit_map(), H.counit_map(), F);
    auto c_id = graded::tensor_map({&H.antipode_map(), &id}, F);
    auto id_c = graded::tensor_map({&id, &H.antipode_map()}, F);
    check_eq("antipode: mu(c x id)Delta = eta eps",
             graded::compose(H.mu_map(), graded::compose(c_id, H.Delta_map(), F), F),
             eta_eps);
    check_eq("antipode: mu(id x c)Delta = eta eps",
             graded::compose(H.mu_map(), graded::compose(id_c, H.Delta_map(), F), F),
             eta_eps);
    return rep;
}

Comodule trivial_comodule(HopfRef H, bool left, const std::string& name) {
    Comodule M;
    M.over = H;
    M.left = left;
    M.space = H->unit_space_ref();
    M.name = name;
    SpaceRef tgt = left ? graded::tensor({H->space, M.space})
                        : graded::tensor({M.space, H->space});
    M.psi = graded::zero_map(M.space, tgt);
    SparseMatrix b(tgt->dim(0), 1);
    b.add_to(0, 0, 1, H->F);
    M.psi.set_block(0, std::move(b));
    return M;
}

Comodule regular_comodule(HopfRef H, bool left) {
    Comodule M;
    M.over = H;
    M.left = left;
    M.space = H->space;
    M.name = H->name;
    M.psi = H->Delta_map();  // Gamma(x)Gamma serves both sides
    return M;
}

std::vector<CoTerm> coaction_terms(const Comodule& M, int u, int i) {
    std::vector<CoTerm> out;
    const auto* block = M.psi.block(u);
    if (!block) return out;
    SpaceRef tgt = M.psi.target;
    int mf = M.space->factor_count();
    for (int r = 0; r < block->rows(); ++r) {
        Scalar v = block->at(r, i);
        if (!v) continue;
        const Label& l = tgt->label(u, r);
        CoTerm t;
        t.coef = v;
        Label ml;
        if (M.left) {
            t.g = l.factors[0];
            ml.factors.assign(l.factors.begin() + 1, l.factors.end());
        } else {
            t.g = l.factors[mf];
            ml.factors.assign(l.factors.begin(), l.factors.begin() + mf);
        }
        t.u2 = u - t.g.degree(*M.over->table);
        t.i2 = M.space->index_of(t.u2, ml);
        if (t.i2 < 0) throw fplin::MathError("coaction_terms: bad label decode");
        out.push_back(std::move(t));
    }
    return out;
}

Report validate_comodule(const Comodule& M) {
    const PrimeField& F = M.over->F;
    Report rep;
    rep.subject = M.name;
    auto id = graded::identity_map(M.space);
    auto idG = graded::identity_map(M.over->space);
    if (M.left) {
        auto eps_id = graded::tensor_map({&M.over->counit_map(), &id}, F);
        rep.check("counitality",
                  graded::map_equal(graded::compose(eps_id, M.psi, F), id));
        auto d_id = graded::tensor_map({&M.over->Delta_map(), &id}, F);
        auto id_psi = graded::tensor_map({&idG, &M.psi}, F);
        rep.check("coassociativity",
                  graded::map_equal(graded::compose(d_id, M.psi, F),
                                    graded::compose(id_psi, M.psi, F)));
    } else {
        auto id_eps = graded::tensor_map({&id, &M.over->counit_map()}, F);
        rep.check("counitality",
                  graded::map_equal(graded::compose(id_eps, M.psi, F), id));
        auto id_d = graded::tensor_map({&id, &M.over->Delta_map()}, F);
        auto psi_id = graded::tensor_map({&M.psi, &idG}, F);
        rep.check("coassociativity",
                  graded::map_equal(graded::compose(id_d, M.psi, F),
                                    graded::compose(psi_id, M.psi, F)));
    }
    return rep;
}

Comodule tensor_diag(const Comodule& A, const Comodule& B) {
    if (A.over != B.over || A.left != B.left)
        throw fplin::MathError("tensor_diag: mismatched comodules");
    const PrimeField& F = A.over->F;
    const HopfAlgebra& H = *A.over;
    Comodule M;
    M.over = A.over;
    M.left = A.left;
    M.space = graded::tensor({A.space, B.space});
    M.name = A.name + "(x)" + B.name;
    SpaceRef tgt = M.left ? graded::tensor({H.space, M.space})
                          : graded::tensor({M.space, H.space});
    M.psi = graded::zero_map(M.space, tgt);
    int af = A.space->factor_count();
    for (int u = 0; u <= M.space->trunc(); ++u) {
        int d = M.space->dim(u);
        if (!d) continue;
        SparseMatrix block(tgt->dim(u), d);
        for (int col = 0; col < d; ++col) {
            const Label& l = M.space->label(u, col);
            Label la{std::vector<Monomial>(l.factors.begin(), l.factors.begin() + af)};
            Label lb{std::vector<Monomial>(l.factors.begin() + af, l.factors.end())};
            int ua = A.space->label_degree(la), ub = B.space->label_degree(lb);
            int ia = A.space->index_of(ua, la), ib = B.space->index_of(ub, lb);
            for (auto& ta : coaction_terms(A, ua, ia))
                for (auto& tb : coaction_terms(B, ub, ib)) {
                    auto gg = M.left ? H.mul(ta.g, tb.g) : H.mul(ta.g, tb.g);
                    if (!gg) continue;
                    long long par;
                    if (M.left)  // move tb.g past the A-residue
                        par = static_cast<long long>(ta.u2) * tb.g.degree(*H.table);
                    else  // move ta.g past the B-residue
                        par = static_cast<long long>(ta.g.degree(*H.table)) * tb.u2;
                    Scalar c = F.mul(F.mul(ta.coef, tb.coef), gg->first);
                    if (par % 2) c = F.neg(c);
                    if (!c) continue;
                    Label out;
                    if (M.left) {
                        out.factors.push_back(gg->second);
                        for (auto& f : A.space->label(ta.u2, ta.i2).factors)
                            out.factors.push_back(f);
                        for (auto& f : B.space->label(tb.u2, tb.i2).factors)
                            out.factors.push_back(f);
                    } else {
                        for (auto& f : A.space->label(ta.u2, ta.i2).factors)
                            out.factors.push_back(f);
                        for (auto& f : B.space->label(tb.u2, tb.i2).factors)
                            out.factors.push_back(f);
                        out.factors.push_back(gg->second);
                    }
                    int row = tgt->index_of(u, out);
                    if (row >= 0) block.add_to(row, col, c, F);
                }
        }
        if (!block.is_zero()) M.psi.set_block(u, std::move(block));
    }
    return M;
}

Comodule induced_along_quotient(const Comodule& M, HopfRef Sigma, const GradedMap& q) {
    const PrimeField& F = M.over->F;
    Comodule out;
    out.over = Sigma;
    out.left = M.left;
    out.space = M.space;
    out.name = M.name;
    auto id = graded::identity_map(M.space);
    GradedMap qid = M.left ? graded::tensor_map({&q, &id}, F)
                           : graded::tensor_map({&id, &q}, F);
    out.psi = graded::compose(qid, M.psi, F);
    // reanchor target on Sigma's own tensor space
    SpaceRef tgt = M.left ? graded::tensor({Sigma->space, M.space})
                          : graded::tensor({M.space, Sigma->space});
    if (!tgt->same_dims(*out.psi.target))
        throw fplin::MathError("induced_along_quotient: target mismatch");
    out.psi.target = tgt;
    return out;
}

Comodule reduced_comodule(const Comodule& M) {
    const PrimeField& F = M.over->F;
    if (M.space->dim(0) > 1)
        throw fplin::MathError("reduced_comodule: degree-0 slice must be at most a line");
    Comodule out;
    out.over = M.over;
    out.left = M.left;
    out.name = M.name + "bar";
    auto sp = std::make_shared<graded::GradedSpace>(M.space->trunc(),
                                                    M.space->factor_tables());
    for (int u = 1; u <= M.space->max_degree(); ++u)
        for (auto& l : M.space->slice(u)) sp->add_label(u, l);
    out.space = sp;
    SpaceRef tgt = M.left ? graded::tensor({M.over->space, out.space})
                          : graded::tensor({out.space, M.over->space});
    out.psi = graded::zero_map(out.space, tgt);
    for (int u = 1; u <= sp->max_degree(); ++u) {
        int d = sp->dim(u);
        if (!d) continue;
        SparseMatrix block(tgt->dim(u), d);
        for (int i = 0; i < d; ++i) {
            int iamb = M.space->index_of(u, sp->label(u, i));
            for (auto& t : coaction_terms(M, u, iamb)) {
                if (t.u2 == 0) continue;  // projected along the unit splitting
                Label l;
                if (M.left) {
                    l.factors.push_back(t.g);
                    for (auto& f : M.space->label(t.u2, t.i2).factors)
                        l.factors.push_back(f);
                } else {
                    for (auto& f : M.space->label(t.u2, t.i2).factors)
                        l.factors.push_back(f);
                    l.factors.push_back(t.g);
                }
                int row = tgt->index_of(u, l);
                if (row >= 0) block.add_to(row, i, t.coef, F);
            }
        }
        if (!block.is_zero()) out.psi.set_block(u, std::move(block));
    }
    return out;
}

Report validate_comodule_algebra(const ComoduleAlgebra& A) {
    const PrimeField& F = A.com.over->F;
    Report rep = validate_comodule(A.com);
    rep.subject = A.name;
    auto id = graded::identity_map(A.com.space);
    auto m_id = graded::tensor_map({&A.product, &id}, F);
    auto id_m = graded::tensor_map({&id, &A.product}, F);
    rep.check("product associative",
              graded::map_equal(graded::compose(A.product, m_id, F),
                                graded::compose(A.product, id_m, F)));
    rep.check("unital in degree 0",
              A.com.space->dim(0) == 1);
    // psi is an algebra map: psi mu = (mu_Gamma x mu_Phi)(id x tw x id)(psi x psi)
    {
        const HopfAlgebra& H = *A.com.over;
        auto pp = graded::tensor_map({&A.com.psi, &A.com.psi}, F);
        SpaceRef four = pp.target;  // Gamma, Phi, Gamma, Phi
        SpaceRef tgt = A.com.psi.target;
        GradedMap mix = graded::zero_map(four, tgt);
        int pf = A.com.space->factor_count();
        for (int u = 0; u <= four->trunc(); ++u) {
            int d = four->dim(u);
            if (!d || !tgt->dim(u)) continue;
            SparseMatrix block(tgt->dim(u), d);
            for (int j = 0; j < d; ++j) {
                const Label& l = four->label(u, j);
                const Monomial& g1 = l.factors[0];
                Label p1{std::vector<Monomial>(l.factors.begin() + 1,
                                               l.factors.begin() + 1 + pf)};
                const Monomial& g2 = l.factors[1 + pf];
                Label p2{std::vector<Monomial>(l.factors.begin() + 2 + pf,
                                               l.factors.end())};
                auto gg = H.mul(g1, g2);
                if (!gg) continue;
                int u1 = A.com.space->label_degree(p1);
                long long par =
                    static_cast<long long>(u1) * g2.degree(*H.table);
                // product of the Phi parts via A.product
                int i1 = A.com.space->index_of(u1, p1);
                int u2 = A.com.space->label_degree(p2);
                int i2 = A.com.space->index_of(u2, p2);
                SpaceRef sqp = A.product.source;
                Label pair;
                for (auto& f : p1.factors) pair.factors.push_back(f);
                for (auto& f : p2.factors) pair.factors.push_back(f);
                int pj = sqp->index_of(u1 + u2, pair);
                (void)i1;
                (void)i2;
                if (pj < 0) continue;
                const auto* pb = A.product.block(u1 + u2);
                if (!pb) continue;
                for (int r = 0; r < pb->rows(); ++r) {
                    Scalar v = pb->at(r, pj);
                    if (!v) continue;
                    Scalar c = F.mul(gg->first, v);
                    if (par % 2) c = F.neg(c);
                    Label out;
                    out.factors.push_back(gg->second);
                    for (auto& f :
                         A.com.space->label(u1 + u2, r).factors)
                        out.factors.push_back(f);
                    int row = tgt->index_of(u, out);
                    if (row >= 0) block.add_to(row, j, c, F);
                }
            }
            if (!block.is_zero()) mix.set_block(u, std::move(block));
        }
        rep.check("coaction is an algebra map",
                  graded::map_equal(graded::compose(A.com.psi, A.product, F),
                                    graded::compose(mix, pp, F)));
    }
    return rep;
}

ComoduleAlgebra gamma_as_comodule_algebra(HopfRef H) {
    ComoduleAlgebra A;
    A.com = regular_comodule(H, true);
    A.product = H->mu_map();
    A.sub = graded::full_sub(H->space);
    A.name = H->name;
    return A;
}

QuotientResult quotient_hopf(HopfRef Gamma,
                             const std::vector<std::pair<std::string, int>>& killed) {
    const PrimeField& F = Gamma->F;
    const GenTable& t = *Gamma->table;
    std::vector<int> cap(t.gens.size(), -1);  // -1: not killed
    for (auto& [name, power] : killed) {
        int g = t.find(name);
        if (g < 0) throw fplin::MathError("quotient_hopf: unknown generator " + name);
        if (power < 1) throw fplin::MathError("quotient_hopf: power must be >= 1");
        cap[g] = power;
    }
    auto killed_mon = [&](const Monomial& m) {
        for (auto& [g, e] : m.atoms)
            if (cap[g] >= 0 && e >= cap[g]) return true;
        return false;
    };

    // Sigma presentation: survivors with capped heights
    HopfBuild sb;
    sb.p = F.p();
    sb.D = Gamma->D;
    std::vector<int> gmap(t.gens.size(), -1);  // Gamma gen -> Sigma gen
    for (std::size_t g = 0; g < t.gens.size(); ++g) {
        if (cap[g] == 1) continue;
        graded::Generator gen = t.gens[g];
        if (cap[g] > 1)
            gen.height = (gen.height == kInfiniteHeight)
                             ? cap[g]
                             : std::min(gen.height, cap[g]);
        gmap[g] = static_cast<int>(sb.gens.size());
        sb.gens.push_back(gen);
    }
    auto project = [&](const Monomial& m) -> std::optional<Monomial> {
        if (killed_mon(m)) return std::nullopt;
        Monomial out;
        for (auto& [g, e] : m.atoms) {
            if (gmap[g] < 0) return std::nullopt;
            out.atoms.push_back({gmap[g], e});
        }
        std::sort(out.atoms.begin(), out.atoms.end());
        return out;
    };
    sb.middle.resize(sb.gens.size());
    for (std::size_t g = 0; g < t.gens.size(); ++g) {
        if (gmap[g] < 0) continue;
        Monomial gm{{{static_cast<int>(g), 1}}};
        for (auto& term : Gamma->delta(gm)) {
            if (term.left.is_unit() || term.right.is_unit()) continue;
            auto l = project(term.left);
            if (!l) continue;
            auto r = project(term.right);
            if (!r) continue;
            sb.middle[gmap[g]].push_back({static_cast<std::int64_t>(term.coef), *l, *r});
        }
    }
    HopfRef Sigma = build_monomial_hopf(sb, Gamma->name + "/I", true);

    GradedMap q = graded::zero_map(Gamma->space, Sigma->space);
    for (int u = 0; u <= Gamma->D; ++u) {
        int d = Gamma->space->dim(u);
        if (!d || !Sigma->space->dim(u)) continue;
        SparseMatrix block(Sigma->space->dim(u), d);
        for (int i = 0; i < d; ++i) {
            auto pm = project(Gamma->space->label(u, i).factors[0]);
            if (!pm) continue;
            int row = Sigma->space->index_of(u, Label{{*pm}});
            if (row < 0) throw fplin::MathError("quotient_hopf: projection mismatch");
            block.add_to(row, i, 1, F);
        }
        if (!block.is_zero()) q.set_block(u, std::move(block));
    }

    // Hopf quotient checks: q is a coalgebra map, an algebra map, and c-stable.
    auto qq = graded::tensor_map({&q, &q}, F);
    auto lhs = graded::compose(qq, Gamma->Delta_map(), F);
    auto rhs = graded::compose(Sigma->Delta_map(), q, F);
    for (int u = 0; u <= Gamma->D; ++u)
        if (!(lhs.block_or_zero(u) == rhs.block_or_zero(u))) {
            // find witness monomial
            std::string w = "degree " + std::to_string(u);
            auto a = lhs.block_or_zero(u);
            auto b = rhs.block_or_zero(u);
            for (int i = 0; i < Gamma->space->dim(u); ++i) {
                bool diff = false;
                for (int r = 0; r < a.rows() && !diff; ++r)
                    if (a.at(r, i) != b.at(r, i)) diff = true;
                if (diff) {
                    w += ", element " + Gamma->space->label_string(u, i);
                    break;
                }
            }
            throw fplin::MathError("not a Hopf quotient: coideal check fails at " + w);
        }
    auto mu_lhs = graded::compose(q, Gamma->mu_map(), F);
    auto mu_rhs = graded::compose(Sigma->mu_map(), qq, F);
    if (!graded::map_equal(mu_lhs, mu_rhs))
        throw fplin::MathError("not a Hopf quotient: q is not an algebra map");
    if (!graded::map_equal(graded::compose(q, Gamma->antipode_map(), F),
                           graded::compose(Sigma->antipode_map(), q, F)))
        throw fplin::MathError("not a Hopf quotient: ideal is not antipode-stable");
    return {Sigma, q};
}

BiComodule as_bicomodule(const Comodule& M) {
    BiComodule b;
    b.space = M.space;
    b.name = M.name;
    if (M.left) {
        b.left_over = M.over;
        b.left_psi = M.psi;
    } else {
        b.right_over = M.over;
        b.right_psi = M.psi;
    }
    return b;
}

Comodule left_part(const BiComodule& B) {
    if (!B.left_psi) throw fplin::MathError("bicomodule has no left coaction");
    Comodule m;
    m.over = B.left_over;
    m.left = true;
    m.space = B.space;
    m.psi = *B.left_psi;
    m.name = B.name;
    return m;
}

Comodule right_part(const BiComodule& B) {
    if (!B.right_psi) throw fplin::MathError("bicomodule has no right coaction");
    Comodule m;
    m.over = B.right_over;
    m.left = false;
    m.space = B.space;
    m.psi = *B.right_psi;
    m.name = B.name;
    return m;
}

// Subspace of tensor(H, A) (side=left) or tensor(A, H) (side=right) spanned by
// h_i (x) s_j for the rows s_j of S; the result is already in rref.
GradedSub kron_sub(SpaceRef hspace, const GradedSub& S, bool h_on_left,
                   const PrimeField& F) {
    SpaceRef amb = h_on_left ? graded::tensor({hspace, S.ambient})
                             : graded::tensor({S.ambient, hspace});
    std::map<int, fplin::Subspace> sub;
    int hf = hspace->factor_count();
    for (int w = 0; w <= amb->max_degree(); ++w) {
        if (!amb->dim(w)) continue;
        std::vector<fplin::SparseVec> rows;
        for (int uh = 0; uh <= w; ++uh) {
            int hd = hspace->dim(uh);
            if (!hd) continue;
            auto it = S.sub.find(w - uh);
            if (it == S.sub.end() || !it->second.dim()) continue;
            for (int ih = 0; ih < hd; ++ih) {
                const Label& hl = hspace->slice(uh)[ih];
                for (int k = 0; k < it->second.dim(); ++k) {
                    fplin::SparseVec v;
                    for (auto& [c, val] : it->second.basis.row(k).terms) {
                        Label l;
                        const Label& al = S.ambient->label(w - uh, c);
                        if (h_on_left) {
                            l.factors = hl.factors;
                            for (auto& f : al.factors) l.factors.push_back(f);
                        } else {
                            l.factors = al.factors;
                            for (auto& f : hl.factors) l.factors.push_back(f);
                        }
                        int idx = amb->index_of(w, l);
                        if (idx < 0)
                            throw fplin::MathError("kron_full_sub: index decode failed");
                        v.terms.push_back({idx, val});
                    }
                    std::sort(v.terms.begin(), v.terms.end());
                    rows.push_back(std::move(v));
                }
            }
        }
        if (rows.empty()) continue;
        sub[w] = fplin::Subspace::span(
            fplin::SparseMatrix::from_rows(amb->dim(w), std::move(rows)), F);
    }
    (void)hf;
    return graded::make_sub(amb, std::move(sub));
}

Comodule sub_comodule(const Comodule& ambient, const GradedSub& sub) {
    const PrimeField& F = ambient.over->F;
    if (sub.ambient.get() != ambient.space.get() &&
        !sub.ambient->same_dims(*ambient.space))
        throw fplin::MathError("sub_comodule: ambient mismatch");
    Comodule out;
    out.over = ambient.over;
    out.left = ambient.left;
    out.space = sub.space;
    out.name = ambient.name + "|sub";
    GradedSub tgt = kron_sub(ambient.over->space, sub, ambient.left, F);
    GradedMap res = graded::restrict_corestrict(ambient.psi, sub, tgt, F);
    SpaceRef canonical = ambient.left
                             ? graded::tensor({ambient.over->space, sub.space})
                             : graded::tensor({sub.space, ambient.over->space});
    if (!canonical->same_dims(*tgt.space))
        throw fplin::MathError("sub_comodule: coaction target mismatch");
    res.source = sub.space;
    res.target = canonical;
    out.psi = std::move(res);
    return out;
}

GradedMap algebra_unit_map(const ComoduleAlgebra& A) {
    const PrimeField& F = A.com.over->F;
    GradedMap f = graded::zero_map(A.com.over->unit_space_ref(), A.com.space);
    SparseMatrix b(A.com.space->dim(0), 1);
    b.add_to(0, 0, 1, F);
    f.set_block(0, std::move(b));
    return f;
}

void reanchor(GradedMap& f, SpaceRef src, SpaceRef tgt) {
    if (src) {
        if (!f.source->same_dims(*src))
            throw fplin::MathError("reanchor: source dims differ");
        f.source = src;
    }
    if (tgt) {
        if (!f.target->same_dims(*tgt))
            throw fplin::MathError("reanchor: target dims differ");
        f.target = tgt;
    }
}

Cotensor cotensor(const BiComodule& X, const BiComodule& Y, HopfRef H) {
    if (!X.right_psi || X.right_over != H)
        throw fplin::MathError("cotensor: X needs a right coaction over H");
    if (!Y.left_psi || Y.left_over != H)
        throw fplin::MathError("cotensor: Y needs a left coaction over H");
    const PrimeField& F = H->F;
    auto idX = graded::identity_map(X.space);
    auto idY = graded::identity_map(Y.space);
    auto lhs = graded::tensor_map({&*X.right_psi, &idY}, F);   // X(x)H(x)Y
    auto rhs = graded::tensor_map({&idX, &*Y.left_psi}, F);    // X(x)H(x)Y
    if (!lhs.target->same_dims(*rhs.target))
        throw fplin::MathError("cotensor: middle target mismatch");
    SpaceRef amb = lhs.source;

    std::map<int, fplin::Subspace> sub;
    for (int u = 0; u <= amb->max_degree(); ++u) {
        int d = amb->dim(u);
        if (!d) continue;
        auto a = lhs.block_or_zero(u);
        auto b = rhs.block_or_zero(u);
        auto diff = a.add(b.scale(F.p() - 1, F), F);
        auto ker = fplin::kernel(diff, F);
        if (ker.dim()) sub[u] = std::move(ker);
    }
    Cotensor out;
    out.sub = graded::make_sub(amb, std::move(sub));
    out.self.space = out.sub.space;
    out.self.name = X.name + " cotensor " + Y.name;

    // induced outer coactions
    if (X.left_psi) {
        auto psi = graded::tensor_map({&*X.left_psi, &idY}, F);
        GradedSub tgt = kron_sub(X.left_over->space, out.sub, true, F);
        GradedMap res = graded::restrict_corestrict(psi, out.sub, tgt, F);
        SpaceRef canonical = graded::tensor({X.left_over->space, out.sub.space});
        if (!canonical->same_dims(*tgt.space))
            throw fplin::MathError("cotensor: left coaction target mismatch");
        res.source = out.sub.space;
        res.target = canonical;
        out.self.left_over = X.left_over;
        out.self.left_psi = std::move(res);
    }
    if (Y.right_psi) {
        auto psi = graded::tensor_map({&idX, &*Y.right_psi}, F);
        GradedSub tgt = kron_sub(Y.right_over->space, out.sub, false, F);
        GradedMap res = graded::restrict_corestrict(psi, out.sub, tgt, F);
        SpaceRef canonical = graded::tensor({out.sub.space, Y.right_over->space});
        if (!canonical->same_dims(*tgt.space))
            throw fplin::MathError("cotensor: right coaction target mismatch");
        res.source = out.sub.space;
        res.target = canonical;
        out.self.right_over = Y.right_over;
        out.self.right_psi = std::move(res);
    }
    return out;
}

Cotensor cotensor(const Comodule& X_right, const Comodule& Y_left) {
    if (X_right.left || !Y_left.left)
        throw fplin::MathError("cotensor: expected (right, left) comodules");
    if (X_right.over != Y_left.over)
        throw fplin::MathError("cotensor: comodules over different Hopf algebras");
    return cotensor(as_bicomodule(X_right), as_bicomodule(Y_left), X_right.over);
}

BiComodule gamma_sigma_bicomodule(HopfRef Gamma, HopfRef Sigma, const GradedMap& q) {
    const PrimeField& F = Gamma->F;
    BiComodule b;
    b.space = Gamma->space;
    b.name = Gamma->name;
    b.left_over = Gamma;
    b.left_psi = Gamma->Delta_map();
    b.right_over = Sigma;
    auto idG = graded::identity_map(Gamma->space);
    auto id_q = graded::tensor_map({&idG, &q}, F);
    GradedMap rp = graded::compose(id_q, Gamma->Delta_map(), F);
    SpaceRef tgt = graded::tensor({Gamma->space, Sigma->space});
    if (!tgt->same_dims(*rp.target))
        throw fplin::MathError("gamma_sigma_bicomodule: target mismatch");
    rp.target = tgt;
    b.right_psi = std::move(rp);
    return b;
}

PhiResult comodule_algebra_from_cotensor(HopfRef Gamma, HopfRef Sigma,
                                         const GradedMap& q) {
    const PrimeField& F = Gamma->F;
    BiComodule Gb = gamma_sigma_bicomodule(Gamma, Sigma, q);
    Comodule k = trivial_comodule(Sigma, true);
    Cotensor cot = cotensor(Gb, as_bicomodule(k), Sigma);
    // ambient is Gamma(x)k; identify with Gamma (same labels)
    if (!cot.sub.ambient->same_dims(*Gamma->space))
        throw fplin::MathError("Phi: ambient is not Gamma");

    ComoduleAlgebra Phi;
    Phi.name = "Phi";
    Phi.sub = cot.sub;
    Phi.sub.ambient = Gamma->space;
    Phi.com.over = Gamma;
    Phi.com.left = true;
    Phi.com.space = cot.sub.space;
    Phi.com.name = "Phi";
    if (!cot.self.left_psi)
        throw fplin::MathError("Phi: missing induced coaction");
    Phi.com.psi = *cot.self.left_psi;

    if (Phi.com.space->dim(0) != 1)
        throw fplin::MathError("Phi: not unital (degree 0 is not a line)");

    // product: multiply basis vectors inside Gamma, express in Phi coordinates
    SpaceRef sq = graded::tensor({Phi.com.space, Phi.com.space});
    Phi.product = graded::zero_map(sq, Phi.com.space);
    for (int u = 0; u <= sq->trunc(); ++u) {
        int d = sq->dim(u);
        if (!d) continue;
        SparseMatrix block(Phi.com.space->dim(u), d);
        for (int j = 0; j < d; ++j) {
            const Label& l = sq->label(u, j);
            int half = Phi.com.space->factor_count();
            Label l1{std::vector<Monomial>(l.factors.begin(), l.factors.begin() + half)};
            Label l2{std::vector<Monomial>(l.factors.begin() + half, l.factors.end())};
            int u1 = Phi.com.space->label_degree(l1);
            int u2 = Phi.com.space->label_degree(l2);
            int i1 = Phi.com.space->index_of(u1, l1);
            int i2 = Phi.com.space->index_of(u2, l2);
            const auto& s1 = Phi.sub.sub.at(u1).basis.row(i1);
            const auto& s2 = Phi.sub.sub.at(u2).basis.row(i2);
            // product of two Gamma-vectors
            fplin::SparseVec prod;
            for (auto& [c1, v1] : s1.terms)
                for (auto& [c2, v2] : s2.terms) {
                    auto pm = Gamma->mul(Gamma->space->label(u1, c1).factors[0],
                                         Gamma->space->label(u2, c2).factors[0]);
                    if (!pm) continue;
                    int idx = Gamma->space->index_of(u, Label{{pm->second}});
                    if (idx < 0) continue;
                    fplin::SparseVec term;
                    term.terms.push_back({idx, F.mul(F.mul(v1, v2), pm->first)});
                    prod = fplin::vec_add_scaled(prod, term, 1, F);
                }
            auto it = Phi.sub.sub.find(u);
            std::optional<fplin::SparseVec> coords;
            if (it != Phi.sub.sub.end())
                coords = fplin::coordinates(it->second, prod, F);
            else if (prod.empty())
                coords = fplin::SparseVec{};
            if (!coords)
                throw fplin::MathError(
                    "not multiplicatively closed: product of " +
                    Phi.com.space->label_string(u1, i1) + " and " +
                    Phi.com.space->label_string(u2, i2) + " leaves Phi in degree " +
                    std::to_string(u));
            for (auto& [r, v] : coords->terms) block.add_to(r, j, v, F);
        }
        if (!block.is_zero()) Phi.product.set_block(u, std::move(block));
    }

    Report rep = validate_comodule_algebra(Phi);
    return {std::move(Phi), std::move(rep)};
}

std::string sub_coalgebra_witness(HopfRef Gamma, const ComoduleAlgebra& Phi) {
    const PrimeField& F = Gamma->F;
    // span of phi_i (x) phi_j inside Gamma(x)Gamma, then test Delta(phi) membership
    SpaceRef sq = Gamma->square();
    std::map<int, std::vector<fplin::SparseVec>> rows;
    for (auto& [u1, s1] : Phi.sub.sub)
        for (auto& [u2, s2] : Phi.sub.sub) {
            int w = u1 + u2;
            if (w > Gamma->D) continue;
            for (int i = 0; i < s1.dim(); ++i)
                for (int j = 0; j < s2.dim(); ++j) {
                    fplin::SparseVec v;
                    for (auto& [c1, v1] : s1.basis.row(i).terms)
                        for (auto& [c2, v2] : s2.basis.row(j).terms) {
                            Label l;
                            l.factors.push_back(
                                Gamma->space->label(u1, c1).factors[0]);
                            l.factors.push_back(
                                Gamma->space->label(u2, c2).factors[0]);
                            int idx = sq->index_of(w, l);
                            if (idx >= 0) v.terms.push_back({idx, F.mul(v1, v2)});
                        }
                    std::sort(v.terms.begin(), v.terms.end());
                    if (!v.empty()) rows[w].push_back(std::move(v));
                }
        }
    std::map<int, fplin::Subspace> span;
    for (auto& [w, rw] : rows)
        span[w] = fplin::Subspace::span(
            fplin::SparseMatrix::from_rows(sq->dim(w), std::move(rw)), F);

    for (auto& [u, s] : Phi.sub.sub) {
        const auto* db = Gamma->Delta_map().block(u);
        if (!db) continue;
        for (int i = 0; i < s.dim(); ++i) {
            fplin::SparseVec img = db->apply(s.basis.row(i), F);
            if (img.empty()) continue;
            auto it = span.find(u);
            bool ok = it != span.end() && fplin::contains(it->second, img, F);
            if (!ok)
                return "Delta(" + Phi.com.space->label_string(u, i) +
                       ") is not in Phi(x)Phi (degree " + std::to_string(u) + ")";
        }
    }
    return "";
}

KernelBicomodule kernel_bicomodule(HopfRef Gamma, HopfRef Sigma, const GradedMap& q) {
    const PrimeField& F = Gamma->F;
    KernelBicomodule out;
    out.report.subject = "G = ker(q)";
    std::map<int, fplin::Subspace> sub;
    for (int u = 0; u <= Gamma->D; ++u) {
        if (!Gamma->space->dim(u)) continue;
        auto ker = fplin::kernel(q.block_or_zero(u), F);
        if (ker.dim()) sub[u] = std::move(ker);
    }
    out.sub = graded::make_sub(Gamma->space, std::move(sub));
    out.G.space = out.sub.space;
    out.G.name = "G";
    out.G.left_over = Sigma;
    out.G.right_over = Sigma;

    auto idG = graded::identity_map(Gamma->space);
    auto q_id = graded::tensor_map({&q, &idG}, F);
    auto id_q = graded::tensor_map({&idG, &q}, F);
    GradedMap left_amb = graded::compose(q_id, Gamma->Delta_map(), F);
    GradedMap right_amb = graded::compose(id_q, Gamma->Delta_map(), F);

    bool left_ok = true, right_ok = true;
    std::string wl, wr;
    try {
        GradedSub tgt = kron_sub(Sigma->space, out.sub, true, F);
        GradedMap res = graded::restrict_corestrict(left_amb, out.sub, tgt, F);
        SpaceRef canonical = graded::tensor({Sigma->space, out.sub.space});
        res.source = out.sub.space;
        res.target = canonical;
        out.G.left_psi = std::move(res);
    } catch (const graded::DoesNotRestrict& e) {
        left_ok = false;
        wl = e.what();
    }
    try {
        GradedSub tgt = kron_sub(Sigma->space, out.sub, false, F);
        GradedMap res = graded::restrict_corestrict(right_amb, out.sub, tgt, F);
        SpaceRef canonical = graded::tensor({out.sub.space, Sigma->space});
        res.source = out.sub.space;
        res.target = canonical;
        out.G.right_psi = std::move(res);
    } catch (const graded::DoesNotRestrict& e) {
        right_ok = false;
        wr = e.what();
    }
    out.report.check("closed under left Sigma-coaction (q x id)Delta", left_ok, wl);
    out.report.check("closed under right Sigma-coaction (id x q)Delta", right_ok, wr);

    // ideal property: Gamma . G ⊆ G
    bool ideal = true;
    std::string wi;
    for (auto& [u, s] : out.sub.sub) {
        for (int i = 0; i < s.dim() && ideal; ++i)
            for (int ug = 0; ug <= Gamma->D - u && ideal; ++ug)
                for (int ig = 0; ig < Gamma->space->dim(ug) && ideal; ++ig) {
                    fplin::SparseVec prod;
                    const Monomial& gm = Gamma->space->label(ug, ig).factors[0];
                    for (auto& [c, v] : s.basis.row(i).terms) {
                        auto pm =
                            Gamma->mul(gm, Gamma->space->label(u, c).factors[0]);
                        if (!pm) continue;
                        int idx =
                            Gamma->space->index_of(u + ug, Label{{pm->second}});
                        if (idx < 0) continue;
                        fplin::SparseVec term;
                        term.terms.push_back({idx, F.mul(v, pm->first)});
                        prod = fplin::vec_add_scaled(prod, term, 1, F);
                    }
                    if (prod.empty()) continue;
                    auto it = out.sub.sub.find(u + ug);
                    if (it == out.sub.sub.end() ||
                        !fplin::contains(it->second, prod, F)) {
                        ideal = false;
                        wi = "product " + Gamma->space->label_string(ug, ig) +
                             " * (G basis " + std::to_string(i) + " deg " +
                             std::to_string(u) + ")";
                    }
                }
    }
    out.report.check("G is an ideal", ideal, wi);
    return out;
}

IteratedCotensor cotensor_chain(const std::vector<BiComodule>& factors, HopfRef H) {
    if (factors.empty()) throw fplin::MathError("cotensor_chain: empty");
    const PrimeField& F = H->F;
    IteratedCotensor out;
    // right-nested: X1 box (X2 box (... box Xs))
    BiComodule acc = factors.back();
    GradedMap flat = graded::identity_map(acc.space);
    std::vector<SpaceRef> amb_factors{acc.space};
    for (int k = static_cast<int>(factors.size()) - 2; k >= 0; --k) {
        Cotensor c = cotensor(factors[k], acc, H);
        // flatten: include into factors[k].space (x) acc.space, then expand acc
        GradedMap incl = c.sub.inclusion(F);
        auto idk = graded::identity_map(factors[k].space);
        GradedMap expand = graded::tensor_map({&idk, &flat}, F);
        flat = graded::compose(expand, incl, F);
        acc = c.self;
        amb_factors.insert(amb_factors.begin(), factors[k].space);
    }
    out.self = acc;
    out.flat_incl = flat;
    out.ambient = flat.target;
    return out;
}

IteratedCotensor iterated_cotensor_G(const KernelBicomodule& G, HopfRef Sigma, int s) {
    std::vector<BiComodule> fs(s, G.G);
    return cotensor_chain(fs, Sigma);
}

GradedMap iterated_coproduct(HopfRef H, int n) {
    const PrimeField& F = H->F;
    GradedMap out = graded::identity_map(H->space);
    if (n == 0) return out;
    out = H->Delta_map();
    for (int k = 2; k <= n; ++k) {
        // apply Delta to the first factor: (Delta x id^{k-1})
        std::vector<const GradedMap*> maps;
        auto id_rest = graded::identity_map(out.target);
        // out.target = Gamma^(x k); build Delta x id on first factor via splitting:
        // use tensor_map with [Delta, id_{Gamma^(k-1)}] -- reconstruct the space.
        std::vector<SpaceRef> rest;
        for (int j = 1; j < k; ++j) rest.push_back(H->space);
        SpaceRef rest_sp = rest.size() == 1 ? rest[0] : graded::tensor(rest);
        auto id_r = graded::identity_map(rest_sp);
        GradedMap step = graded::tensor_map({&H->Delta_map(), &id_r}, F);
        if (!step.source->same_dims(*out.target))
            throw fplin::MathError("iterated_coproduct: shape mismatch");
        step.source = out.target;
        out = graded::compose(step, out, F);
        (void)id_rest;
    }
    return out;
}

GradedMap iterated_coaction(const Comodule& M, int n) {
    const PrimeField& F = M.over->F;
    if (n == 0) return graded::identity_map(M.space);
    GradedMap out = M.psi;
    for (int k = 2; k <= n; ++k) {
        if (M.left) {
            // apply Delta to the first Gamma factor of Gamma^(k-1) (x) M
            std::vector<SpaceRef> rest;
            for (int j = 1; j < k - 1; ++j) rest.push_back(M.over->space);
            rest.push_back(M.space);
            SpaceRef rest_sp = rest.size() == 1 ? rest[0] : graded::tensor(rest);
            auto id_r = graded::identity_map(rest_sp);
            GradedMap step = graded::tensor_map({&M.over->Delta_map(), &id_r}, F);
            if (!step.source->same_dims(*out.target))
                throw fplin::MathError("iterated_coaction: shape mismatch");
            step.source = out.target;
            out = graded::compose(step, out, F);
        } else {
            // M (x) Gamma^(k-1): apply Delta to the last factor
            std::vector<SpaceRef> rest;
            rest.push_back(M.space);
            for (int j = 1; j < k - 1; ++j) rest.push_back(M.over->space);
            SpaceRef rest_sp = rest.size() == 1 ? rest[0] : graded::tensor(rest);
            auto id_r = graded::identity_map(rest_sp);
            GradedMap step = graded::tensor_map({&id_r, &M.over->Delta_map()}, F);
            if (!step.source->same_dims(*out.target))
                throw fplin::MathError("iterated_coaction: shape mismatch");
            step.source = out.target;
            out = graded::compose(step, out, F);
        }
    }
    return out;
}

}  // namespace coh::hopf
