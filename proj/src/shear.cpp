#include "coh/shear.hpp"

#include <algorithm>

namespace coh::shear {

using fplin::PrimeField;
using fplin::Scalar;
using fplin::SparseMatrix;
using graded::Label;
using graded::Monomial;

namespace {

// expansion of Delta^{parts-1}(m) into `parts` components
struct DeltaExp {
    Scalar coef;
    std::vector<Monomial> comps;
};

std::vector<DeltaExp> expand_delta(const hopf::HopfAlgebra& H, const Monomial& m,
                                   int parts) {
    if (parts == 1) return {{1, {m}}};
    std::vector<DeltaExp> out;
    for (auto& t : H.delta(m)) {
        auto inner = expand_delta(H, t.left, parts - 1);
        for (auto& e : inner) {
            DeltaExp n;
            n.coef = H.F.mul(t.coef, e.coef);
            n.comps = e.comps;
            n.comps.push_back(t.right);
            out.push_back(std::move(n));
        }
    }
    return out;
}

// psi^n of a left comodule element: components gamma_1..gamma_n then M-part
struct CoactExp {
    Scalar coef;
    std::vector<Monomial> gammas;
    int u2, i2;
};

std::vector<CoactExp> expand_coaction_left(const Comodule& M, int u, int i, int n) {
    if (n == 0) return {{1, {}, u, i}};
    std::vector<CoactExp> out;
    for (auto& t : hopf::coaction_terms(M, u, i)) {
        auto inner = expand_coaction_left(M, t.u2, t.i2, n - 1);
        for (auto& e : inner) {
            CoactExp x;
            x.coef = M.over->F.mul(t.coef, e.coef);
            x.gammas.reserve(n);
            x.gammas.push_back(t.g);
            for (auto& g : e.gammas) x.gammas.push_back(g);
            x.u2 = e.u2;
            x.i2 = e.i2;
            out.push_back(std::move(x));
        }
    }
    return out;
}

// psi^n of a right comodule element: M-part then gamma_1..gamma_n, where the
// LAST gamma comes from the outermost application of psi.
std::vector<CoactExp> expand_coaction_right(const Comodule& M, int u, int i, int n) {
    if (n == 0) return {{1, {}, u, i}};
    std::vector<CoactExp> out;
    for (auto& t : hopf::coaction_terms(M, u, i)) {
        auto inner = expand_coaction_right(M, t.u2, t.i2, n - 1);
        for (auto& e : inner) {
            CoactExp x;
            x.coef = M.over->F.mul(t.coef, e.coef);
            x.gammas = e.gammas;
            x.gammas.push_back(t.g);
            x.u2 = e.u2;
            x.i2 = e.i2;
            out.push_back(std::move(x));
        }
    }
    return out;
}

// Koszul sign of the permutation taking the source component sequence into
// destination order: components are given in destination order with their
// source positions; parity counts degree-weighted inversions.
int shuffle_parity(const std::vector<std::pair<int, int>>& dest_srcpos_deg) {
    long long parity = 0;
    int n = static_cast<int>(dest_srcpos_deg.size());
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (dest_srcpos_deg[i].first > dest_srcpos_deg[j].first)
                parity += static_cast<long long>(dest_srcpos_deg[i].second) *
                          dest_srcpos_deg[j].second;
    return static_cast<int>(parity % 2);
}

// multiply a list of monomials left-to-right; nullopt when it dies
std::optional<std::pair<Scalar, Monomial>> mul_chain(const hopf::HopfAlgebra& H,
                                                     const std::vector<Monomial>& ms) {
    Scalar c = 1;
    Monomial acc;  // unit
    for (auto& m : ms) {
        auto r = H.mul(acc, m);
        if (!r) return std::nullopt;
        c = H.F.mul(c, r->first);
        acc = std::move(r->second);
    }
    return std::make_pair(c, std::move(acc));
}

SpaceRef shear_space(const Comodule& M, int n) {
    std::vector<SpaceRef> fs;
    if (M.left) {
        for (int i = 0; i < n; ++i) fs.push_back(M.over->space);
        fs.push_back(M.space);
    } else {
        fs.push_back(M.space);
        for (int i = 0; i < n; ++i) fs.push_back(M.over->space);
    }
    return graded::tensor(fs);
}

struct WordParts {
    std::vector<Monomial> slots;
    Label mlab;
    int um, im;
};

WordParts split_word(const Comodule& M, SpaceRef space, int n, int u, int col) {
    const Label& l = space->label(u, col);
    int mf = M.space->factor_count();
    WordParts w;
    if (M.left) {
        w.slots.assign(l.factors.begin(), l.factors.begin() + n);
        w.mlab.factors.assign(l.factors.begin() + n, l.factors.end());
    } else {
        w.mlab.factors.assign(l.factors.begin(), l.factors.begin() + mf);
        w.slots.assign(l.factors.begin() + mf, l.factors.end());
    }
    w.um = M.space->label_degree(w.mlab);
    w.im = M.space->index_of(w.um, w.mlab);
    return w;
}

}  // namespace

ShearMap iterated_shear(const Comodule& M, int n) {
    if (!M.left) throw fplin::MathError("iterated_shear: M must be a left comodule");
    if (n < 1) throw fplin::MathError("iterated_shear: n >= 1");
    const hopf::HopfAlgebra& H = *M.over;
    const PrimeField& F = H.F;
    const graded::GenTable& T = *H.table;
    ShearMap S;
    S.dir = Dir::S;
    S.n = n;
    S.space = shear_space(M, n);
    S.map = graded::zero_map(S.space, S.space);

    for (int u = 0; u <= S.space->max_degree(); ++u) {
        int d = S.space->dim(u);
        if (!d) continue;
        SparseMatrix block(d, d);
        for (int col = 0; col < d; ++col) {
            auto w = split_word(M, S.space, n, u, col);
            // x_j expanded into j components (j = 1..n); m into n+1 (n gammas + M)
            std::vector<std::vector<DeltaExp>> xexp(n);
            for (int j = 1; j <= n; ++j) xexp[j - 1] = expand_delta(H, w.slots[j - 1], j);
            auto mexp = expand_coaction_left(M, w.um, w.im, n);

            // iterate over all combinations
            std::vector<int> pick(n, 0);
            for (std::size_t mi = 0; mi < mexp.size(); ++mi) {
                std::fill(pick.begin(), pick.end(), 0);
                while (true) {
                    Scalar c = mexp[mi].coef;
                    for (int j = 0; j < n; ++j) c = F.mul(c, xexp[j][pick[j]].coef);
                    if (c) {
                        // destination sequence: slot k holds x_k(k), .., x_n(k), m(k)
                        // source positions enumerate x_1 comps, x_2 comps, ..., m comps
                        std::vector<std::pair<int, int>> perm;
                        std::vector<Monomial> slot_prod;
                        std::vector<Monomial> outslots;
                        bool dead = false;
                        auto src_pos_x = [&](int j, int comp) {  // 1-based comp
                            int base = 0;
                            for (int t = 1; t < j; ++t) base += t;
                            return base + comp - 1;
                        };
                        int m_base = n * (n + 1) / 2;
                        for (int k = 1; k <= n && !dead; ++k) {
                            slot_prod.clear();
                            for (int j = k; j <= n; ++j) {
                                const Monomial& comp = xexp[j - 1][pick[j - 1]].comps[k - 1];
                                perm.push_back({src_pos_x(j, k), comp.degree(T)});
                                slot_prod.push_back(comp);
                            }
                            const Monomial& gk = mexp[mi].gammas[k - 1];
                            perm.push_back({m_base + k - 1, gk.degree(T)});
                            slot_prod.push_back(gk);
                            auto pr = mul_chain(H, slot_prod);
                            if (!pr) {
                                dead = true;
                                break;
                            }
                            c = F.mul(c, pr->first);
                            outslots.push_back(std::move(pr->second));
                        }
                        if (!dead) {
                            perm.push_back({m_base + n, u});  // M part, degree parity
                            // M-part degree: u2; but it never moves past anything
                            // after it, so its entry is harmless.
                            if (shuffle_parity(perm)) c = F.neg(c);
                            Label out;
                            for (auto& s : outslots) out.factors.push_back(s);
                            for (auto& f :
                                 M.space->label(mexp[mi].u2, mexp[mi].i2).factors)
                                out.factors.push_back(f);
                            int row = S.space->index_of(u, out);
                            if (row >= 0) block.add_to(row, col, c, F);
                        }
                    }
                    int j = n - 1;
                    while (j >= 0 && pick[j] + 1 == static_cast<int>(xexp[j].size())) {
                        pick[j] = 0;
                        --j;
                    }
                    if (j < 0) break;
                    ++pick[j];
                }
            }
        }
        if (!block.is_zero()) S.map.set_block(u, std::move(block));
    }
    return S;
}

ShearMap iterated_shear_inv(const Comodule& M, int n) {
    if (!M.left)
        throw fplin::MathError("iterated_shear_inv: M must be a left comodule");
    if (n < 1) throw fplin::MathError("iterated_shear_inv: n >= 1");
    const hopf::HopfAlgebra& H = *M.over;
    const PrimeField& F = H.F;
    ShearMap S;
    S.dir = Dir::Sinv;
    S.n = n;
    S.space = shear_space(M, n);
    S.map = graded::zero_map(S.space, S.space);

    for (int u = 0; u <= S.space->max_degree(); ++u) {
        int d = S.space->dim(u);
        if (!d) continue;
        SparseMatrix block(d, d);
        for (int col = 0; col < d; ++col) {
            auto w = split_word(M, S.space, n, u, col);
            // x_1 c(x_2') | x_2'' c(x_3') | ... | x_n'' c(m') | m''
            // expand each x_j (j >= 2) once, m once; no shuffle signs.
            std::vector<const std::vector<hopf::DeltaTerm>*> xd(n);
            for (int j = 2; j <= n; ++j) xd[j - 1] = &H.delta(w.slots[j - 1]);
            auto mterms = hopf::coaction_terms(M, w.um, w.im);

            std::vector<int> pick(n + 1, 0);  // pick[j-1] for x_j (j>=2), pick[n] for m
            while (true) {
                Scalar c = 1;
                bool dead = false;
                std::vector<Monomial> outslots;
                // slot j gets x_j'' (or x_1) times c(next')
                for (int j = 1; j <= n && !dead; ++j) {
                    Monomial base;
                    if (j == 1)
                        base = w.slots[0];
                    else {
                        auto& t = (*xd[j - 1])[pick[j - 1]];
                        base = t.right;
                    }
                    // antipode of the next first-component
                    Monomial next_first;
                    if (j < n) {
                        auto& t = (*xd[j])[pick[j]];
                        next_first = t.left;
                    } else {
                        next_first = mterms[pick[n]].g;
                    }
                    // accumulate: base * c(next_first), summing over antipode terms
                    // handled by expanding the antipode linear combination
                    // (done below via a nested loop)
                    outslots.push_back(base);
                    outslots.push_back(next_first);  // placeholder, replaced below
                    (void)next_first;
                }
                if (!dead) {
                    // gather coefficients of the picked expansion terms
                    for (int j = 2; j <= n; ++j) c = F.mul(c, (*xd[j - 1])[pick[j - 1]].coef);
                    c = F.mul(c, mterms[pick[n]].coef);
                    // expand antipodes: slots stored as pairs (base, to-antipode)
                    std::vector<std::pair<Scalar, std::vector<Monomial>>> combos{
                        {c, {}}};
                    for (int j = 0; j < n; ++j) {
                        const Monomial& base = outslots[2 * j];
                        const Monomial& anti_arg = outslots[2 * j + 1];
                        std::vector<std::pair<Scalar, std::vector<Monomial>>> next;
                        for (auto& [c0, acc] : combos) {
                            for (auto& [ca, amon] : H.antipode(anti_arg)) {
                                auto pr = H.mul(base, amon);
                                if (!pr) continue;
                                auto nacc = acc;
                                nacc.push_back(pr->second);
                                next.push_back(
                                    {F.mul(F.mul(c0, ca), pr->first), std::move(nacc)});
                            }
                        }
                        combos = std::move(next);
                        if (combos.empty()) break;
                    }
                    for (auto& [cc, slots2] : combos) {
                        Label out;
                        for (auto& s : slots2) out.factors.push_back(s);
                        auto& mt = mterms[pick[n]];
                        for (auto& f : M.space->label(mt.u2, mt.i2).factors)
                            out.factors.push_back(f);
                        int row = S.space->index_of(u, out);
                        if (row >= 0) block.add_to(row, col, cc, F);
                    }
                }
                // advance picks: x_2..x_n then m
                int j = 1;
                bool done = false;
                while (true) {
                    if (j <= n - 1) {
                        if (pick[j] + 1 <
                            static_cast<int>(xd[j] ? xd[j]->size() : 1)) {
                            ++pick[j];
                            break;
                        }
                        pick[j] = 0;
                        ++j;
                    } else if (j == n) {
                        if (pick[n] + 1 < static_cast<int>(mterms.size())) {
                            ++pick[n];
                            break;
                        }
                        done = true;
                        break;
                    }
                }
                if (done) break;
            }
        }
        if (!block.is_zero()) S.map.set_block(u, std::move(block));
    }
    return S;
}

ShearMap iterated_shear_c(const Comodule& M, int n) {
    if (M.left) throw fplin::MathError("iterated_shear_c: M must be a right comodule");
    if (n < 1) throw fplin::MathError("iterated_shear_c: n >= 1");
    const hopf::HopfAlgebra& H = *M.over;
    const PrimeField& F = H.F;
    const graded::GenTable& T = *H.table;
    ShearMap S;
    S.dir = Dir::Sc;
    S.n = n;
    S.space = shear_space(M, n);
    S.map = graded::zero_map(S.space, S.space);

    // ambient positions: (m, y_1, ..., y_n) with y_i = x_{n+1-i} in the paper's
    // descending labels; slot k of the output is m_(k) x_n(k-1) ... x_{n-k+2}(1).
    for (int u = 0; u <= S.space->max_degree(); ++u) {
        int d = S.space->dim(u);
        if (!d) continue;
        SparseMatrix block(d, d);
        for (int col = 0; col < d; ++col) {
            auto w = split_word(M, S.space, n, u, col);
            // y_i = slots[i-1] = x_{n+1-i}; x_j uses j components
            std::vector<std::vector<DeltaExp>> xexp(n + 1);  // indexed by j
            for (int j = 1; j <= n; ++j)
                xexp[j] = expand_delta(H, w.slots[n - j], j);
            auto mexp = expand_coaction_right(M, w.um, w.im, n);

            std::vector<int> pick(n + 1, 0);  // pick[j] for x_j
            for (std::size_t mi = 0; mi < mexp.size(); ++mi) {
                std::fill(pick.begin(), pick.end(), 0);
                while (true) {
                    Scalar c = mexp[mi].coef;
                    for (int j = 1; j <= n; ++j) c = F.mul(c, xexp[j][pick[j]].coef);
                    if (c) {
                        // source order: m comps (M-part then gammas 1..n),
                        // then y_1 = x_n comps, y_2 = x_{n-1} comps, ...
                        std::vector<std::pair<int, int>> perm;
                        std::vector<Monomial> outslots;
                        bool dead = false;
                        auto src_pos_x = [&](int j, int comp) {
                            // y_i = x_{n+1-i} occupies a block after m's n+1 comps
                            int i = n + 1 - j;
                            int base = n + 1;
                            for (int t = 1; t < i; ++t) base += (n + 1 - t);
                            return base + comp - 1;
                        };
                        // output slot 1: m_(1) (the M part; position 0)
                        perm.push_back({0, 0});
                        for (int k = 2; k <= n + 1 && !dead; ++k) {
                            std::vector<Monomial> prod;
                            const Monomial& gk = mexp[mi].gammas[k - 2];
                            perm.push_back({k - 1, gk.degree(T)});
                            prod.push_back(gk);
                            for (int j = n; j >= n - k + 2; --j) {
                                const Monomial& comp =
                                    xexp[j][pick[j]].comps[k - 1 - (n - j) - 1];
                                perm.push_back({src_pos_x(j, k - 1 - (n - j)),
                                                comp.degree(T)});
                                prod.push_back(comp);
                            }
                            auto pr = mul_chain(H, prod);
                            if (!pr) {
                                dead = true;
                                break;
                            }
                            c = F.mul(c, pr->first);
                            outslots.push_back(std::move(pr->second));
                        }
                        if (!dead) {
                            if (shuffle_parity(perm)) c = F.neg(c);
                            Label out;
                            for (auto& f :
                                 M.space->label(mexp[mi].u2, mexp[mi].i2).factors)
                                out.factors.push_back(f);
                            for (auto& s : outslots) out.factors.push_back(s);
                            int row = S.space->index_of(u, out);
                            if (row >= 0) block.add_to(row, col, c, F);
                        }
                    }
                    int j = n;
                    while (j >= 1 && pick[j] + 1 == static_cast<int>(xexp[j].size())) {
                        pick[j] = 0;
                        --j;
                    }
                    if (j < 1) break;
                    ++pick[j];
                }
            }
        }
        if (!block.is_zero()) S.map.set_block(u, std::move(block));
    }
    return S;
}

ShearMap iterated_shear_c_inv(const Comodule& M, int n) {
    if (M.left)
        throw fplin::MathError("iterated_shear_c_inv: M must be a right comodule");
    if (n < 1) throw fplin::MathError("iterated_shear_c_inv: n >= 1");
    const hopf::HopfAlgebra& H = *M.over;
    const PrimeField& F = H.F;
    ShearMap S;
    S.dir = Dir::ScInv;
    S.n = n;
    S.space = shear_space(M, n);
    S.map = graded::zero_map(S.space, S.space);

    // m' | c(m'') x_n' | c(x_n'') x_{n-1}' | ... | c(x_2'') x_1
    // positions: slots[i-1] = x_{n+1-i}; no shuffle signs (identity permutation).
    for (int u = 0; u <= S.space->max_degree(); ++u) {
        int d = S.space->dim(u);
        if (!d) continue;
        SparseMatrix block(d, d);
        for (int col = 0; col < d; ++col) {
            auto w = split_word(M, S.space, n, u, col);
            auto mterms = hopf::coaction_terms(M, w.um, w.im);
            std::vector<const std::vector<hopf::DeltaTerm>*> xd(n + 1, nullptr);
            for (int j = 2; j <= n; ++j) xd[j] = &H.delta(w.slots[n - j]);

            std::vector<int> pick(n + 1, 0);  // pick[1] = m, pick[j] = x_j (j >= 2)
            while (true) {
                const auto& mt = mterms[pick[1]];
                Scalar c = mt.coef;
                for (int j = 2; j <= n; ++j) c = F.mul(c, (*xd[j])[pick[j]].coef);
                if (c) {
                    // slot i (Gamma slot, 1-based) = c(prev'') * cur', where
                    // prev'' runs m'', x_n'', ..., and cur' runs x_n', ..., x_1
                    std::vector<std::pair<Scalar, std::vector<Monomial>>> combos{
                        {c, {}}};
                    for (int i = 1; i <= n && !combos.empty(); ++i) {
                        int jprev = n + 2 - i;  // x_{jprev} supplies the antipode part
                        Monomial anti_arg =
                            (i == 1) ? mt.g : (*xd[jprev])[pick[jprev]].right;
                        Monomial cur = (i == n)
                                           ? w.slots[n - 1]
                                           : (*xd[n + 1 - i])[pick[n + 1 - i]].left;
                        std::vector<std::pair<Scalar, std::vector<Monomial>>> next;
                        for (auto& [c0, acc] : combos)
                            for (auto& [ca, amon] : H.antipode(anti_arg)) {
                                auto pr = H.mul(amon, cur);
                                if (!pr) continue;
                                auto nacc = acc;
                                nacc.push_back(pr->second);
                                next.push_back(
                                    {F.mul(F.mul(c0, ca), pr->first), std::move(nacc)});
                            }
                        combos = std::move(next);
                    }
                    for (auto& [cc, slots2] : combos) {
                        Label out;
                        for (auto& f : M.space->label(mt.u2, mt.i2).factors)
                            out.factors.push_back(f);
                        for (auto& s : slots2) out.factors.push_back(s);
                        int row = S.space->index_of(u, out);
                        if (row >= 0) block.add_to(row, col, cc, F);
                    }
                }
                // advance: m then x_2..x_n
                int j = 1;
                bool done = false;
                while (true) {
                    int limit = (j == 1) ? static_cast<int>(mterms.size())
                                         : static_cast<int>((*xd[j]).size());
                    if (pick[j] + 1 < limit) {
                        ++pick[j];
                        break;
                    }
                    pick[j] = 0;
                    ++j;
                    if (j > n) {
                        done = true;
                        break;
                    }
                    if (j >= 2 && !xd[j]) {  // n = 1: no x_j loops
                        done = true;
                        break;
                    }
                }
                if (done) break;
            }
        }
        if (!block.is_zero()) S.map.set_block(u, std::move(block));
    }
    return S;
}

ShearMap shear(const Comodule& M) { return iterated_shear(M, 1); }
ShearMap shear_inv(const Comodule& M) { return iterated_shear_inv(M, 1); }
ShearMap shear_c(const Comodule& M) { return iterated_shear_c(M, 1); }
ShearMap shear_c_inv(const Comodule& M) { return iterated_shear_c_inv(M, 1); }

namespace {

// Gamma^{(x)j} (x) M with the left coaction on the first factor only
Comodule left_cofree_bundle(const Comodule& M, int j) {
    const PrimeField& F = M.over->F;
    Comodule c;
    c.over = M.over;
    c.left = true;
    std::vector<SpaceRef> fs;
    for (int i = 0; i < j; ++i) fs.push_back(M.over->space);
    fs.push_back(M.space);
    c.space = graded::tensor(fs);
    c.name = "bundle";
    std::vector<const GradedMap*> maps;
    auto idG = graded::identity_map(M.over->space);
    auto idM = graded::identity_map(M.space);
    maps.push_back(&M.over->Delta_map());
    for (int i = 1; i < j; ++i) maps.push_back(&idG);
    maps.push_back(&idM);
    GradedMap psi = graded::tensor_map(maps, F);
    hopf::reanchor(psi, c.space, graded::tensor({M.over->space, c.space}));
    c.psi = std::move(psi);
    return c;
}

// M (x) Gamma^{(x)j} with the right coaction on the last factor only
Comodule right_cofree_bundle(const Comodule& M, int j) {
    const PrimeField& F = M.over->F;
    Comodule c;
    c.over = M.over;
    c.left = false;
    std::vector<SpaceRef> fs;
    fs.push_back(M.space);
    for (int i = 0; i < j; ++i) fs.push_back(M.over->space);
    c.space = graded::tensor(fs);
    c.name = "bundle";
    std::vector<const GradedMap*> maps;
    auto idG = graded::identity_map(M.over->space);
    auto idM = graded::identity_map(M.space);
    maps.push_back(&idM);
    for (int i = 1; i < j; ++i) maps.push_back(&idG);
    maps.push_back(&M.over->Delta_map());
    GradedMap psi = graded::tensor_map(maps, F);
    hopf::reanchor(psi, c.space, graded::tensor({c.space, M.over->space}));
    c.psi = std::move(psi);
    return c;
}

// Gamma^{(x)Delta j} (x)Delta M, all diagonal
Comodule diag_bundle_left(const Comodule& M, int j) {
    Comodule acc = M;
    auto reg = hopf::regular_comodule(M.over, true);
    for (int i = 0; i < j; ++i) acc = hopf::tensor_diag(reg, acc);
    return acc;
}

Comodule diag_bundle_right(const Comodule& M, int j) {
    Comodule acc = M;
    auto reg = hopf::regular_comodule(M.over, false);
    for (int i = 0; i < j; ++i) acc = hopf::tensor_diag(acc, reg);
    return acc;
}

}  // namespace

GradedMap composed_shear(const Comodule& M, int n) {
    const PrimeField& F = M.over->F;
    if (n == 1) return shear(M).map;
    GradedMap inner = composed_shear(M, n - 1);  // on Gamma^{n-1} (x) M
    auto idG = graded::identity_map(M.over->space);
    GradedMap step = graded::tensor_map({&idG, &inner}, F);
    Comodule bundle = left_cofree_bundle(M, n - 1);
    GradedMap outer = shear(bundle).map;
    SpaceRef flat = shear_space(M, n);
    hopf::reanchor(step, flat, flat);
    hopf::reanchor(outer, flat, flat);
    return graded::compose(outer, step, F);
}

GradedMap composed_shear_inv(const Comodule& M, int n) {
    const PrimeField& F = M.over->F;
    if (n == 1) return shear_inv(M).map;
    GradedMap inner = composed_shear_inv(M, n - 1);
    auto idG = graded::identity_map(M.over->space);
    GradedMap step = graded::tensor_map({&idG, &inner}, F);
    Comodule bundle = diag_bundle_left(M, n - 1);
    GradedMap outer = shear_inv(bundle).map;
    SpaceRef flat = shear_space(M, n);
    hopf::reanchor(step, flat, flat);
    hopf::reanchor(outer, flat, flat);
    return graded::compose(outer, step, F);
}

GradedMap composed_shear_c(const Comodule& M, int n) {
    const PrimeField& F = M.over->F;
    if (n == 1) return shear_c(M).map;
    GradedMap inner = composed_shear_c(M, n - 1);
    auto idG = graded::identity_map(M.over->space);
    GradedMap step = graded::tensor_map({&inner, &idG}, F);
    Comodule bundle = right_cofree_bundle(M, n - 1);
    GradedMap outer = shear_c(bundle).map;
    SpaceRef flat = shear_space(M, n);
    hopf::reanchor(step, flat, flat);
    hopf::reanchor(outer, flat, flat);
    return graded::compose(outer, step, F);
}

GradedMap composed_shear_c_inv(const Comodule& M, int n) {
    const PrimeField& F = M.over->F;
    if (n == 1) return shear_c_inv(M).map;
    GradedMap inner = composed_shear_c_inv(M, n - 1);
    auto idG = graded::identity_map(M.over->space);
    GradedMap step = graded::tensor_map({&inner, &idG}, F);
    Comodule bundle = diag_bundle_right(M, n - 1);
    GradedMap outer = shear_c_inv(bundle).map;
    SpaceRef flat = shear_space(M, n);
    hopf::reanchor(step, flat, flat);
    hopf::reanchor(outer, flat, flat);
    return graded::compose(outer, step, F);
}

CosimplicialShearIso cosimplicial_shear_iso(const cobar::CosimplicialObject& DD,
                                            const cobar::CosimplicialObject& DL,
                                            const Comodule& N_left) {
    const PrimeField& F = N_left.over->F;
    CosimplicialShearIso out;
    out.report.subject = "shear isomorphism of cosimplicial objects " + DD.name +
                         " -> " + DL.name;
    int n_max = std::min(DD.n_max, DL.n_max);
    for (int n = 0; n <= n_max; ++n) {
        ShearMap S = iterated_shear(N_left, n + 1);
        hopf::reanchor(S.map, DD.levels[n], DL.levels[n]);
        // bijectivity levelwise
        bool bij = true;
        for (int u = 0; u <= DD.levels[n]->max_degree() && bij; ++u)
            if (fplin::rank(S.map.block_or_zero(u), F) != DD.levels[n]->dim(u))
                bij = false;
        out.report.check("S^" + std::to_string(n + 1) + " bijective at level " +
                             std::to_string(n),
                         bij);
        out.levels.push_back(std::move(S));
    }
    for (int n = 1; n <= n_max; ++n) {
        for (int i = 0; i <= n; ++i) {
            auto lhs = graded::compose(out.levels[n].map, DD.coface[n][i], F);
            auto rhs = graded::compose(DL.coface[n][i], out.levels[n - 1].map, F);
            bool ok = graded::map_equal(lhs, rhs);
            out.report.check("commutes with coface d^" + std::to_string(i) +
                                 " into level " + std::to_string(n),
                             ok,
                             ok ? "" : "level " + std::to_string(n) + " coface " +
                                           std::to_string(i));
        }
        for (int j = 0; j + 1 <= n; ++j) {
            auto lhs = graded::compose(out.levels[n - 1].map, DD.codeg[n][j], F);
            auto rhs = graded::compose(DL.codeg[n][j], out.levels[n].map, F);
            bool ok = graded::map_equal(lhs, rhs);
            out.report.check("commutes with codegeneracy s^" + std::to_string(j) +
                                 " out of level " + std::to_string(n),
                             ok,
                             ok ? "" : "level " + std::to_string(n) +
                                           " codegeneracy " + std::to_string(j));
        }
    }
    return out;
}

RestrictedShear shear_to_cotensor(HopfRef Gamma, HopfRef Sigma, const GradedMap& q,
                                  const hopf::ComoduleAlgebra& Phi,
                                  const Comodule& M_left) {
    const PrimeField& F = Gamma->F;
    RestrictedShear out;
    out.report.subject = "S restricts to Phi (x) M -> Gamma box_Sigma M";

    // source: Phi (x) M inside Gamma (x) M
    out.source = hopf::kron_sub(M_left.space, Phi.sub, false, F);
    // target: Gamma box_Sigma M
    Comodule M_sigma = hopf::induced_along_quotient(M_left, Sigma, q);
    auto cot = hopf::cotensor(hopf::gamma_sigma_bicomodule(Gamma, Sigma, q),
                              hopf::as_bicomodule(M_sigma), Sigma);
    out.target = cot.sub;

    ShearMap S = shear(M_left);
    hopf::reanchor(S.map, out.source.ambient, out.target.ambient);
    try {
        out.map = graded::restrict_corestrict(S.map, out.source, out.target, F);
        out.report.check("image lands in the cotensor", true);
    } catch (const graded::DoesNotRestrict& e) {
        out.report.check("image lands in the cotensor", false,
                         std::string("image escapes cotensor: ") + e.what());
        return out;
    }
    bool bij = true;
    std::string w;
    for (int u = 0; u <= out.source.ambient->max_degree(); ++u) {
        int sd = out.source.space->dim(u);
        int td = out.target.space->dim(u);
        int rk = fplin::rank(out.map.block_or_zero(u), F);
        if (sd != td || rk != sd) {
            bij = false;
            w = "degree " + std::to_string(u);
            break;
        }
    }
    out.report.check("bijective degreewise", bij, w);
    return out;
}

NormalizedShear shear_normalized_to_G(HopfRef Gamma, HopfRef Sigma,
                                      const GradedMap& q,
                                      const hopf::ComoduleAlgebra& Phi,
                                      const hopf::KernelBicomodule& G,
                                      const Comodule& N_left, int s) {
    const PrimeField& F = Gamma->F;
    NormalizedShear out;
    out.report.subject = "S^{s+1}: N*D_Phi^" + std::to_string(s) +
                         "(N) -> Gamma box G(" + std::to_string(s) + ") box N";

    // normalized level s of D_Delta over Phi
    auto DD = cobar::build_DDelta(Phi, N_left, s + 1);
    auto Nm = cobar::normalize(DD, F);
    if (!Nm.report.all_passed()) {
        out.report.check("normalization", false, Nm.report.first_failure());
        return out;
    }

    // flatten N* into the Gamma-word ambient Gamma^{(x) s+1} (x) N
    std::vector<SpaceRef> ambf;
    for (int i = 0; i <= s; ++i) ambf.push_back(Gamma->space);
    ambf.push_back(N_left.space);
    SpaceRef amb = graded::tensor(ambf);
    GradedMap level_incl;  // DD level s -> amb, via Phi -> Gamma inclusions
    {
        std::vector<const GradedMap*> maps;
        GradedMap phi_incl = Phi.sub.inclusion(F);
        auto idN = graded::identity_map(N_left.space);
        std::vector<GradedMap> keep;
        for (int i = 0; i <= s; ++i) maps.push_back(&phi_incl);
        maps.push_back(&idN);
        level_incl = graded::tensor_map(maps, F);
        hopf::reanchor(level_incl, DD.levels[s], amb);
    }
    out.flat_source_incl =
        graded::compose(level_incl, Nm.n_sub[s].inclusion(F), F);

    // target: Gamma box G(s) box N with its flat inclusion into amb
    Comodule N_sigma = hopf::induced_along_quotient(N_left, Sigma, q);
    std::vector<hopf::BiComodule> chain;
    chain.push_back(hopf::gamma_sigma_bicomodule(Gamma, Sigma, q));
    for (int i = 0; i < s; ++i) chain.push_back(G.G);
    chain.push_back(hopf::as_bicomodule(N_sigma));
    auto cot = hopf::cotensor_chain(chain, Sigma);
    // expand the middle G factors into Gamma
    {
        std::vector<const GradedMap*> maps;
        auto idG = graded::identity_map(Gamma->space);
        GradedMap g_incl = G.sub.inclusion(F);
        auto idN = graded::identity_map(N_left.space);
        maps.push_back(&idG);
        for (int i = 0; i < s; ++i) maps.push_back(&g_incl);
        maps.push_back(&idN);
        GradedMap expand = graded::tensor_map(maps, F);
        hopf::reanchor(expand, cot.flat_incl.target, amb);
        out.flat_target_incl = graded::compose(expand, cot.flat_incl, F);
    }

    // the iterated shear on the ambient
    ShearMap S = iterated_shear(N_left, s + 1);
    hopf::reanchor(S.map, amb, amb);

    // map on bases: solve flat_target_incl * x = S(flat_source_incl * e)
    out.map = graded::zero_map(Nm.kernel_model.terms[s], cot.self.space);
    bool lands = true;
    std::string w;
    for (int u = 0; u <= amb->max_degree(); ++u) {
        int sd = Nm.kernel_model.terms[s]->dim(u);
        if (!sd) continue;
        SparseMatrix block(cot.self.space->dim(u), sd);
        auto srcb = out.flat_source_incl.block_or_zero(u);
        auto tgtb = out.flat_target_incl.block_or_zero(u);
        auto Sb = S.map.block_or_zero(u);
        for (int i = 0; i < sd && lands; ++i) {
            auto img = Sb.apply(srcb.apply(fplin::unit_vec(i), F), F);
            auto sol = fplin::solve(tgtb, img, F);
            if (!sol) {
                lands = false;
                w = "image escapes cotensor at degree " + std::to_string(u) +
                    ", basis " + std::to_string(i);
                break;
            }
            for (auto& [r, v] : sol->terms) block.add_to(r, i, v, F);
        }
        if (!lands) break;
        if (!block.is_zero()) out.map.set_block(u, std::move(block));
    }
    out.report.check("S^{s+1}(N*) lands in Gamma box G(s) box N", lands, w);
    if (!lands) return out;

    // bijectivity
    bool bij = true;
    for (int u = 0; u <= amb->max_degree() && bij; ++u) {
        int sd = Nm.kernel_model.terms[s]->dim(u);
        int td = cot.self.space->dim(u);
        if (sd != td || fplin::rank(out.map.block_or_zero(u), F) != sd) {
            bij = false;
            w = "degree " + std::to_string(u);
        }
    }
    out.report.check("bijective degreewise", bij, bij ? "" : w);

    // reverse inclusion: S^{-(s+1)} of the cotensor is annihilated by all mu_i
    ShearMap Sinv = iterated_shear_inv(N_left, s + 1);
    hopf::reanchor(Sinv.map, amb, amb);
    bool killed = true;
    std::string wk;
    // mu_i on the ambient: multiply Gamma slots i, i+1 (i = 1..s)
    for (int i = 1; i <= s && killed; ++i) {
        std::vector<const GradedMap*> maps;
        auto idG = graded::identity_map(Gamma->space);
        auto idN = graded::identity_map(N_left.space);
        for (int k = 1; k < i; ++k) maps.push_back(&idG);
        maps.push_back(&Gamma->mu_map());
        for (int k = i + 2; k <= s + 1; ++k) maps.push_back(&idG);
        maps.push_back(&idN);
        GradedMap mu_i = graded::tensor_map(maps, F);
        hopf::reanchor(mu_i, amb, nullptr);
        GradedMap comp = graded::compose(
            mu_i, graded::compose(Sinv.map, out.flat_target_incl, F), F);
        if (!comp.is_zero()) {
            killed = false;
            wk = "mu_" + std::to_string(i) + " does not vanish";
        }
    }
    out.report.check("mu_i . S^{-1} vanishes on Gamma box G(s) box N (i = 1..s)",
                     killed, wk);
    // and S^{-(s+1)} lands back in the normalized subspace
    bool back = true;
    std::string wb;
    for (int u = 0; u <= amb->max_degree() && back; ++u) {
        auto tb = out.flat_target_incl.block_or_zero(u);
        auto Sb = Sinv.map.block_or_zero(u);
        auto sb = out.flat_source_incl.block_or_zero(u);
        for (int i = 0; i < tb.cols() && back; ++i) {
            auto img = Sb.apply(tb.apply(fplin::unit_vec(i), F), F);
            if (!fplin::solve(sb, img, F)) {
                back = false;
                wb = "degree " + std::to_string(u) + ", basis " + std::to_string(i);
            }
        }
    }
    out.report.check("S^{-(s+1)} lands in N*D_Phi^s(N)", back, wb);
    return out;
}

}  // namespace coh::shear
