#include "coh/cobar.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <sstream>
#include <thread>

namespace coh::cobar {

using fplin::PrimeField;
using fplin::Scalar;
using fplin::SparseMatrix;
using graded::Label;
using graded::Monomial;
using hopf::ComoduleAlgebra;

namespace {

void parallel_for(int n, int threads, const std::function<void(int)>& body) {
    if (threads <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    int workers = std::min(threads, n);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            while (true) {
                int i = next.fetch_add(1);
                if (i >= n) break;
                body(i);
            }
        });
    for (auto& t : pool) t.join();
}

SpaceRef positive_part(SpaceRef space) {
    auto s = std::make_shared<graded::GradedSpace>(space->trunc(),
                                                   space->factor_tables());
    for (int u = 1; u <= space->max_degree(); ++u)
        for (auto& l : space->slice(u)) s->add_label(u, l);
    return s;
}

}  // namespace

Report CochainComplex::verify_d2(const PrimeField& F) const {
    Report rep;
    rep.subject = provenance + ": d^2 = 0";
    for (int n = 0; n + 1 < static_cast<int>(d.size()); ++n) {
        auto dd = graded::compose(d[n + 1], d[n], F);
        std::string w;
        if (!dd.is_zero()) {
            for (auto& [u, b] : dd.blocks)
                if (!b.is_zero()) {
                    w = "n=" + std::to_string(n) + ", degree " + std::to_string(u);
                    break;
                }
        }
        rep.check("d o d = 0 out of level " + std::to_string(n), w.empty(), w);
    }
    return rep;
}

Report CosimplicialObject::verify_identities(const PrimeField& F) const {
    Report rep;
    rep.subject = name + ": cosimplicial identities";
    // cofaces into level n: coface[n][i], i=0..n
    // codegeneracies out of level n: codeg[n][j], j=0..n-1
    for (int n = 1; n < n_max; ++n) {
        // d^j d^i = d^i d^{j-1} for i < j (maps level n-1 -> level n+1)
        for (int i = 0; i <= n; ++i)
            for (int j = i + 1; j <= n + 1; ++j) {
                auto lhs = graded::compose(coface[n + 1][j], coface[n][i], F);
                auto rhs = graded::compose(coface[n + 1][i], coface[n][j - 1], F);
                rep.check("d^" + std::to_string(j) + " d^" + std::to_string(i) +
                              " at level " + std::to_string(n - 1),
                          graded::map_equal(lhs, rhs));
            }
    }
    for (int n = 1; n <= n_max; ++n) {
        // s^j d^i identities (maps level n-1 -> level n-1)
        for (int j = 0; j + 1 <= n; ++j)
            for (int i = 0; i <= n; ++i) {
                auto comp = graded::compose(codeg[n][j], coface[n][i], F);
                if (i == j || i == j + 1) {
                    rep.check("s^" + std::to_string(j) + " d^" + std::to_string(i) +
                                  " = id at level " + std::to_string(n - 1),
                              graded::map_equal(
                                  comp, graded::identity_map(levels[n - 1])));
                } else if (i < j) {
                    auto rhs = graded::compose(coface[n - 1][i], codeg[n - 1][j - 1], F);
                    rep.check("s^j d^i (i<j) at level " + std::to_string(n - 1),
                              graded::map_equal(comp, rhs));
                } else {
                    auto rhs = graded::compose(coface[n - 1][i - 1], codeg[n - 1][j], F);
                    rep.check("s^j d^i (i>j+1) at level " + std::to_string(n - 1),
                              graded::map_equal(comp, rhs));
                }
            }
        // s^j s^i = s^i s^{j+1} for i <= j (level n+1 -> level n-1)
        if (n + 1 <= n_max)
            for (int i = 0; i + 1 <= n; ++i)
                for (int j = i; j + 1 <= n; ++j) {
                    auto lhs = graded::compose(codeg[n][i], codeg[n + 1][j + 1], F);
                    auto rhs = graded::compose(codeg[n][j], codeg[n + 1][i], F);
                    rep.check("s^i s^{j+1} at level " + std::to_string(n + 1),
                              graded::map_equal(lhs, rhs));
                }
    }
    return rep;
}

namespace {

// shared assembly for the four resolutions
struct ResBuilder {
    HopfRef H;
    const PrimeField& F;
    int n_max;

    // per-level slot spaces: level n owns n+1 copies of "alg" plus the coefficient
    SpaceRef alg_space;
    SpaceRef coeff_space;
    bool coeff_on_right;  // D_L / D_Delta: coefficient last; D_R: first

    SpaceRef level_space(int n) const {
        std::vector<SpaceRef> fs;
        if (!coeff_on_right) fs.push_back(coeff_space);
        for (int i = 0; i <= n; ++i) fs.push_back(alg_space);
        if (coeff_on_right) fs.push_back(coeff_space);
        return graded::tensor(fs);
    }

    // f placed at algebra-slot position `pos` (1-based among the n+1 slots of
    // level n), identities elsewhere; source/target reanchored by caller.
    GradedMap at_slot(const GradedMap& f, int slots_before, int slots_after,
                      const GradedMap& id_coeff) const {
        std::vector<const GradedMap*> maps;
        GradedMap id_alg = graded::identity_map(alg_space);
        std::vector<GradedMap> keep;  // storage for repeated identities
        keep.reserve(slots_before + slots_after);
        auto push_ids = [&](int k) {
            for (int i = 0; i < k; ++i) maps.push_back(&id_alg);
        };
        if (!coeff_on_right) maps.push_back(&id_coeff);
        push_ids(slots_before);
        maps.push_back(&f);
        push_ids(slots_after);
        if (coeff_on_right) maps.push_back(&id_coeff);
        return graded::tensor_map(maps, F);
    }
};

}  // namespace

CosimplicialObject build_DL(HopfRef H, const Comodule& N_left, int n_max) {
    const PrimeField& F = H->F;
    if (!N_left.left) throw fplin::MathError("build_DL: N must be a left comodule");
    CosimplicialObject X;
    X.name = "DL(" + N_left.name + ")";
    X.n_max = n_max;
    ResBuilder rb{H, F, n_max, H->space, N_left.space, true};
    for (int n = 0; n <= n_max; ++n) X.levels.push_back(rb.level_space(n));
    GradedMap id_coeff = graded::identity_map(N_left.space);
    GradedMap id_alg = graded::identity_map(H->space);

    X.coface.resize(n_max + 1);
    X.codeg.resize(n_max + 1);
    for (int n = 1; n <= n_max; ++n) {
        for (int i = 0; i <= n; ++i) {
            GradedMap f;
            if (i < n) {
                f = rb.at_slot(H->Delta_map(), i, n - 1 - i, id_coeff);
            } else {
                // last coface: psi_N into the final slot
                std::vector<const GradedMap*> maps;
                for (int k = 0; k < n; ++k) maps.push_back(&id_alg);
                maps.push_back(&N_left.psi);
                f = graded::tensor_map(maps, F);
            }
            hopf::reanchor(f, X.levels[n - 1], X.levels[n]);
            X.coface[n].push_back(std::move(f));
        }
        for (int j = 0; j + 1 <= n; ++j) {
            GradedMap f = rb.at_slot(H->counit_map(), j + 1, n - j - 1, id_coeff);
            hopf::reanchor(f, X.levels[n], X.levels[n - 1]);
            X.codeg[n].push_back(std::move(f));
        }
    }
    // levels as left comodules: coaction on the first factor
    for (int n = 0; n <= n_max; ++n) {
        Comodule c;
        c.over = H;
        c.left = true;
        c.space = X.levels[n];
        c.name = X.name + "^" + std::to_string(n);
        std::vector<const GradedMap*> maps;
        maps.push_back(&H->Delta_map());
        std::vector<GradedMap> ids;
        for (int k = 1; k <= n; ++k) maps.push_back(&id_alg);
        maps.push_back(&id_coeff);
        GradedMap psi = graded::tensor_map(maps, F);
        hopf::reanchor(psi, X.levels[n],
                       graded::tensor({H->space, X.levels[n]}));
        c.psi = std::move(psi);
        X.level_comodules.push_back(std::move(c));
        (void)ids;
    }
    return X;
}

CosimplicialObject build_DR(HopfRef H, const Comodule& M_right, int n_max) {
    const PrimeField& F = H->F;
    if (M_right.left) throw fplin::MathError("build_DR: M must be a right comodule");
    CosimplicialObject X;
    X.name = "DR(" + M_right.name + ")";
    X.n_max = n_max;
    ResBuilder rb{H, F, n_max, H->space, M_right.space, false};
    for (int n = 0; n <= n_max; ++n) X.levels.push_back(rb.level_space(n));
    GradedMap id_coeff = graded::identity_map(M_right.space);
    GradedMap id_alg = graded::identity_map(H->space);

    X.coface.resize(n_max + 1);
    X.codeg.resize(n_max + 1);
    for (int n = 1; n <= n_max; ++n) {
        for (int i = 0; i <= n; ++i) {
            GradedMap f;
            if (i == 0) {
                std::vector<const GradedMap*> maps;
                maps.push_back(&M_right.psi);
                for (int k = 0; k < n; ++k) maps.push_back(&id_alg);
                f = graded::tensor_map(maps, F);
            } else {
                f = rb.at_slot(H->Delta_map(), i - 1, n - i, id_coeff);
            }
            hopf::reanchor(f, X.levels[n - 1], X.levels[n]);
            X.coface[n].push_back(std::move(f));
        }
        for (int j = 0; j + 1 <= n; ++j) {
            GradedMap f = rb.at_slot(H->counit_map(), j, n - j, id_coeff);
            hopf::reanchor(f, X.levels[n], X.levels[n - 1]);
            X.codeg[n].push_back(std::move(f));
        }
    }
    for (int n = 0; n <= n_max; ++n) {
        Comodule c;
        c.over = H;
        c.left = false;
        c.space = X.levels[n];
        c.name = X.name + "^" + std::to_string(n);
        std::vector<const GradedMap*> maps;
        maps.push_back(&id_coeff);
        for (int k = 0; k < n; ++k) maps.push_back(&id_alg);
        maps.push_back(&H->Delta_map());
        GradedMap psi = graded::tensor_map(maps, F);
        hopf::reanchor(psi, X.levels[n],
                       graded::tensor({X.levels[n], H->space}));
        c.psi = std::move(psi);
        X.level_comodules.push_back(std::move(c));
    }
    return X;
}

namespace {

CosimplicialObject build_insertion(const std::string& name, HopfRef Gamma,
                                   SpaceRef alg_space, const GradedMap& product,
                                   const GradedMap& unit, const Comodule& alg_com,
                                   const Comodule& coeff, bool coeff_on_right,
                                   int n_max) {
    const PrimeField& F = Gamma->F;
    CosimplicialObject X;
    X.name = name;
    X.n_max = n_max;
    ResBuilder rb{Gamma, F, n_max, alg_space, coeff.space, coeff_on_right};
    for (int n = 0; n <= n_max; ++n) X.levels.push_back(rb.level_space(n));
    GradedMap id_coeff = graded::identity_map(coeff.space);

    X.coface.resize(n_max + 1);
    X.codeg.resize(n_max + 1);
    for (int n = 1; n <= n_max; ++n) {
        for (int i = 0; i <= n; ++i) {
            // insertion of 1 at slot i+1: unit placed between slots
            GradedMap f = rb.at_slot(unit, i, n - i, id_coeff);
            hopf::reanchor(f, X.levels[n - 1], X.levels[n]);
            X.coface[n].push_back(std::move(f));
        }
        for (int j = 0; j + 1 <= n; ++j) {
            // multiply slots j+1, j+2
            GradedMap f = rb.at_slot(product, j, n - 1 - j, id_coeff);
            hopf::reanchor(f, X.levels[n], X.levels[n - 1]);
            X.codeg[n].push_back(std::move(f));
        }
    }
    // levels as diagonal comodules
    for (int n = 0; n <= n_max; ++n) {
        Comodule acc = alg_com;
        for (int k = 1; k <= n; ++k) acc = hopf::tensor_diag(acc, alg_com);
        Comodule lev = coeff_on_right ? hopf::tensor_diag(acc, coeff)
                                      : hopf::tensor_diag(coeff, acc);
        SpaceRef canonical = coeff_on_right
                                 ? graded::tensor({Gamma->space, X.levels[n]})
                                 : graded::tensor({X.levels[n], Gamma->space});
        if (coeff.left)
            hopf::reanchor(lev.psi, X.levels[n], canonical);
        else
            hopf::reanchor(lev.psi, X.levels[n], canonical);
        lev.space = X.levels[n];
        lev.name = name + "^" + std::to_string(n);
        X.level_comodules.push_back(std::move(lev));
    }
    return X;
}

}  // namespace

CosimplicialObject build_DDelta(const ComoduleAlgebra& Phi, const Comodule& N_left,
                                int n_max) {
    if (!N_left.left)
        throw fplin::MathError("build_DDelta: N must be a left comodule");
    HopfRef Gamma = Phi.com.over;
    return build_insertion("DDelta_Phi(" + N_left.name + ")", Gamma, Phi.com.space,
                           Phi.product, hopf::algebra_unit_map(Phi), Phi.com, N_left,
                           true, n_max);
}

CosimplicialObject build_DDelta_right(HopfRef Gamma, const Comodule& M_right,
                                      int n_max) {
    if (M_right.left)
        throw fplin::MathError("build_DDelta_right: M must be a right comodule");
    return build_insertion("DDelta_Gamma(" + M_right.name + ")", Gamma, Gamma->space,
                           Gamma->mu_map(), Gamma->unit_map(),
                           hopf::regular_comodule(Gamma, false), M_right, false,
                           n_max);
}

CochainComplex alternating_sum_complex(const CosimplicialObject& X,
                                       const PrimeField& F) {
    CochainComplex C;
    C.provenance = X.name + " alternating sum";
    C.n_max = X.n_max;
    C.terms = X.levels;
    for (int n = 0; n < X.n_max; ++n) {
        GradedMap d = graded::zero_map(X.levels[n], X.levels[n + 1]);
        for (int i = 0; i <= n + 1; ++i) {
            Scalar c = (i % 2 == 0) ? 1 : F.reduce(-1);
            d = graded::map_add(d, graded::map_scale(X.coface[n + 1][i], c, F), F);
        }
        C.d.push_back(std::move(d));
    }
    return C;
}

Report verify_resolution_exactness(const CosimplicialObject& X, const GradedMap& aug,
                                   const PrimeField& F) {
    Report rep;
    rep.subject = X.name + ": augmented exactness";
    CochainComplex C = alternating_sum_complex(X, F);
    // exactness of 0 -> N -> L0 -> L1 -> ... through n_max - 1
    rep.check("augmentation is injective into the kernel of d0", [&] {
        for (int u = 0; u <= aug.source->max_degree(); ++u) {
            auto b = aug.block_or_zero(u);
            if (fplin::rank(b, F) != aug.source->dim(u)) return false;
        }
        return true;
    }());
    rep.check("d0 . aug = 0",
              graded::compose(C.d[0], aug, F).is_zero());
    for (int n = 0; n + 1 < X.n_max; ++n) {
        bool ok = true;
        std::string w;
        for (int u = 0; u <= X.levels[n]->max_degree() && ok; ++u) {
            SparseMatrix din = n == 0 ? aug.block_or_zero(u)
                                      : C.d[n - 1].block_or_zero(u);
            SparseMatrix dout = C.d[n].block_or_zero(u);
            auto H = fplin::subquotient_homology(din, dout, F);
            if (H.dim != 0) {
                ok = false;
                w = "H^" + std::to_string(n) + " nonzero in degree " +
                    std::to_string(u);
            }
        }
        rep.check("exact at level " + std::to_string(n), ok, w);
    }
    return rep;
}

Normalization normalize(const CosimplicialObject& X, const PrimeField& F) {
    Normalization N;
    N.report.subject = X.name + ": normalization";
    CochainComplex alt = alternating_sum_complex(X, F);

    // kernel model: intersection of codegeneracy kernels
    for (int n = 0; n <= X.n_max; ++n) {
        std::map<int, fplin::Subspace> sub;
        for (int u = 0; u <= X.levels[n]->max_degree(); ++u) {
            int d = X.levels[n]->dim(u);
            if (!d) continue;
            fplin::Subspace s = fplin::Subspace::full(d);
            for (int j = 0; j + 1 <= n; ++j) {
                auto ker = fplin::kernel(X.codeg[n][j].block_or_zero(u), F);
                s = fplin::subspace_intersect(s, ker, F);
            }
            if (s.dim()) sub[u] = std::move(s);
        }
        N.n_sub.push_back(graded::make_sub(X.levels[n], std::move(sub)));
    }
    N.kernel_model.provenance = X.name + " kernel model";
    N.kernel_model.n_max = X.n_max;
    for (int n = 0; n <= X.n_max; ++n)
        N.kernel_model.terms.push_back(N.n_sub[n].space);
    for (int n = 0; n < X.n_max; ++n) {
        try {
            N.kernel_model.d.push_back(
                graded::restrict_corestrict(alt.d[n], N.n_sub[n], N.n_sub[n + 1], F));
        } catch (const graded::DoesNotRestrict& e) {
            N.report.check("differential preserves the normalized subcomplex", false,
                           e.what());
            return N;
        }
    }
    N.report.check("differential preserves the normalized subcomplex", true);

    // quotient model: level / sum of images of d^i, i >= 1
    N.quotient_model.provenance = X.name + " quotient model";
    N.quotient_model.n_max = X.n_max;
    for (int n = 0; n <= X.n_max; ++n) {
        std::map<int, fplin::Subspace> degenerate;
        for (int u = 0; u <= X.levels[n]->max_degree(); ++u) {
            int d = X.levels[n]->dim(u);
            if (!d) continue;
            fplin::Subspace img = fplin::Subspace::zero(d);
            if (n >= 1)
                for (int i = 1; i <= n; ++i)
                    img = fplin::subspace_sum(
                        img, fplin::image(X.coface[n][i].block_or_zero(u), F), F);
            degenerate[u] = std::move(img);
        }
        // representatives of the quotient
        auto qspace = std::make_shared<graded::GradedSpace>(
            X.levels[n]->trunc(), X.levels[n]->factor_tables());
        GradedMap proj = graded::zero_map(X.levels[n], nullptr);
        GradedMap section = graded::zero_map(nullptr, X.levels[n]);
        std::map<int, SparseMatrix> projs, sects;
        for (auto& [u, img] : degenerate) {
            auto q = fplin::quotient(fplin::Subspace::full(img.ambient), img, F);
            for (int r = 0; r < q.reps.rows(); ++r) {
                int pivot = q.reps.row(r).leading_index();
                qspace->add_label(u, X.levels[n]->label(u, pivot));
            }
            if (q.reps.rows()) {
                projs[u] = q.projection;
                sects[u] = q.reps.transpose();
            }
        }
        N.quotient_model.terms.push_back(qspace);
        proj.target = qspace;
        section.source = qspace;
        for (auto& [u, m] : projs) proj.blocks[u] = std::move(m);
        for (auto& [u, m] : sects) section.blocks[u] = std::move(m);
        N.proj.push_back(std::move(proj));
        N.section.push_back(std::move(section));
    }
    for (int n = 0; n < X.n_max; ++n) {
        // induced differential: proj d section; well-defined iff proj d = dQ proj
        GradedMap dq = graded::compose(
            N.proj[n + 1], graded::compose(alt.d[n], N.section[n], F), F);
        N.quotient_model.d.push_back(dq);
        bool ok = graded::map_equal(
            graded::compose(N.quotient_model.d[n], N.proj[n], F),
            graded::compose(N.proj[n + 1], alt.d[n], F));
        N.report.check("quotient differential well-defined at level " +
                           std::to_string(n),
                       ok);
    }

    // canonical iso kernel model -> quotient model
    for (int n = 0; n <= X.n_max; ++n) {
        GradedMap iso =
            graded::compose(N.proj[n], N.n_sub[n].inclusion(F), F);
        bool bij = true;
        std::string w;
        for (int u = 0; u <= X.levels[n]->max_degree(); ++u) {
            int dn = N.kernel_model.terms[n]->dim(u);
            int dq = N.quotient_model.terms[n]->dim(u);
            int rk = fplin::rank(iso.block_or_zero(u), F);
            if (dn != dq || rk != dn) {
                bij = false;
                w = "level " + std::to_string(n) + " degree " + std::to_string(u);
                break;
            }
        }
        N.report.check("N -> Q is an isomorphism at level " + std::to_string(n), bij,
                       w);
        N.n_to_q.push_back(std::move(iso));
    }

    // kernel-model terms as comodules, when the levels carry coactions
    if (!X.level_comodules.empty()) {
        for (int n = 0; n <= X.n_max; ++n)
            N.n_comodules.push_back(
                hopf::sub_comodule(X.level_comodules[n], N.n_sub[n]));
    }
    return N;
}

WordComplexRef cobar_complex(HopfRef H, const Comodule& M_right,
                             const Comodule& W_left, int n_max, bool normalized,
                             int threads) {
    const PrimeField& F = H->F;
    if (M_right.left) throw fplin::MathError("cobar_complex: M must be right-sided");
    if (!W_left.left) throw fplin::MathError("cobar_complex: W must be left-sided");
    auto C = std::make_shared<WordComplex>();
    C->H = H;
    C->M = M_right;
    C->W = W_left;
    C->normalized = normalized;
    C->n_max = n_max;
    C->provenance = (normalized ? "normalized cobar C(" : "cobar C(") + M_right.name +
                    "," + W_left.name + ") over " + H->name;

    SpaceRef slot = normalized ? positive_part(H->space) : H->space;
    for (int n = 0; n <= n_max; ++n) {
        std::vector<SpaceRef> fs;
        fs.push_back(M_right.space);
        for (int i = 0; i < n; ++i) fs.push_back(slot);
        fs.push_back(W_left.space);
        C->terms_.push_back(graded::tensor(fs));
    }

    int mf = M_right.space->factor_count();
    int wf = W_left.space->factor_count();
    const graded::GenTable& T = *H->table;

    // coaction term caches
    auto mterms = [&](int u, int i) { return hopf::coaction_terms(M_right, u, i); };
    auto wterms = [&](int u, int i) { return hopf::coaction_terms(W_left, u, i); };

    for (int n = 0; n < n_max; ++n) {
        GradedMap d = graded::zero_map(C->terms_[n], C->terms_[n + 1]);
        SpaceRef src = C->terms_[n], tgt = C->terms_[n + 1];
        int maxu = src->max_degree();
        std::vector<std::pair<int, SparseMatrix>> blocks(maxu + 1);
        parallel_for(maxu + 1, threads, [&](int u) {
            int sd = src->dim(u);
            blocks[u].first = u;
            if (!sd || !tgt->dim(u)) return;
            SparseMatrix block(tgt->dim(u), sd);
            for (int col = 0; col < sd; ++col) {
                const Label& l = src->label(u, col);
                Label mpart{std::vector<Monomial>(l.factors.begin(),
                                                  l.factors.begin() + mf)};
                Label wpart{std::vector<Monomial>(l.factors.end() - wf,
                                                  l.factors.end())};
                std::vector<Monomial> slots(l.factors.begin() + mf,
                                            l.factors.end() - wf);
                int um = M_right.space->label_degree(mpart);
                int uw = W_left.space->label_degree(wpart);
                int im = M_right.space->index_of(um, mpart);
                int iw = W_left.space->index_of(uw, wpart);

                auto emit = [&](Scalar c, const Label& mlab,
                                const std::vector<Monomial>& ns, const Label& wlab) {
                    Label out;
                    out.factors.reserve(mlab.factors.size() + ns.size() +
                                        wlab.factors.size());
                    for (auto& f : mlab.factors) out.factors.push_back(f);
                    for (auto& s : ns) out.factors.push_back(s);
                    for (auto& f : wlab.factors) out.factors.push_back(f);
                    int row = tgt->index_of(u, out);
                    if (row >= 0) block.add_to(row, col, c, F);
                };

                // i = 0: psi_M splits into the front slot, sign +1
                for (auto& t : mterms(um, im)) {
                    if (normalized && t.g.is_unit()) continue;
                    std::vector<Monomial> ns;
                    ns.reserve(slots.size() + 1);
                    ns.push_back(t.g);
                    for (auto& s : slots) ns.push_back(s);
                    emit(t.coef, M_right.space->label(t.u2, t.i2), ns, wpart);
                }
                // i = 1..n: Delta at slot i, sign (-1)^i
                for (int i = 1; i <= n; ++i) {
                    for (auto& t : H->delta(slots[i - 1])) {
                        if (normalized && (t.left.is_unit() || t.right.is_unit()))
                            continue;
                        if (!normalized &&
                            (t.left.degree(T) + t.right.degree(T) !=
                             slots[i - 1].degree(T)))
                            continue;
                        std::vector<Monomial> ns;
                        ns.reserve(slots.size() + 1);
                        for (int k = 0; k < i - 1; ++k) ns.push_back(slots[k]);
                        ns.push_back(t.left);
                        ns.push_back(t.right);
                        for (int k = i; k < static_cast<int>(slots.size()); ++k)
                            ns.push_back(slots[k]);
                        Scalar c = (i % 2) ? F.neg(t.coef) : t.coef;
                        emit(c, mpart, ns, wpart);
                    }
                }
                // i = n+1: psi_W into the last slot, sign (-1)^{n+1}
                for (auto& t : wterms(uw, iw)) {
                    if (normalized && t.g.is_unit()) continue;
                    std::vector<Monomial> ns;
                    ns.reserve(slots.size() + 1);
                    for (auto& s : slots) ns.push_back(s);
                    ns.push_back(t.g);
                    Scalar c = ((n + 1) % 2) ? F.neg(t.coef) : t.coef;
                    emit(c, mpart, ns, W_left.space->label(t.u2, t.i2));
                }
            }
            blocks[u].second = std::move(block);
        });
        for (auto& [u, b] : blocks)
            if (b.rows() && !b.is_zero()) d.blocks[u] = std::move(b);
        C->d_.push_back(std::move(d));
    }
    return C;
}

std::string WordComplex::basis_string(int n, int u, int i) const {
    const Label& l = terms_[n]->label(u, i);
    int mf = M.space->factor_count();
    int wf = W.space->factor_count();
    std::ostringstream os;
    Label mpart{std::vector<Monomial>(l.factors.begin(), l.factors.begin() + mf)};
    Label wpart{std::vector<Monomial>(l.factors.end() - wf, l.factors.end())};
    os << M.space->label_string(mpart) << "[";
    for (int k = 0; k < n; ++k) {
        if (k) os << "|";
        os << graded::monomial_string(*H->table, l.factors[mf + k]);
    }
    os << "]" << W.space->label_string(wpart);
    return os.str();
}

Report WordComplex::verify_d2() const {
    CochainComplex C;
    C.provenance = provenance;
    C.n_max = n_max;
    C.terms = terms_;
    C.d = d_;
    return C.verify_d2(H->F);
}

int CotorTable::dim(int s, int u) const {
    auto it = cells.find({s, u});
    return it == cells.end() ? 0 : it->second.dim;
}

fplin::SparseVec CotorTable::cls(int s, int u, const fplin::SparseVec& v) const {
    auto it = cells.find({s, u});
    if (it == cells.end()) {
        if (v.empty()) return {};
        throw fplin::MathError("CotorTable::cls: empty cell");
    }
    return fplin::homology_class(it->second, v, complex->H->F);
}

std::string CotorTable::rep_string(int s, int u, int k) const {
    auto it = cells.find({s, u});
    if (it == cells.end()) return "0";
    const auto& row = it->second.reps.row(k);
    std::ostringstream os;
    bool first = true;
    for (auto& [c, v] : row.terms) {
        if (!first) os << " + ";
        first = false;
        if (v != 1) os << v << "*";
        os << complex->basis_string(s, u, c);
    }
    return os.str();
}

CotorTable cotor_of(WordComplexRef C, int s_max) {
    const PrimeField& F = C->H->F;
    CotorTable T;
    T.complex = C;
    T.s_max = std::min(s_max, C->n_max - 1);
    for (int s = 0; s <= T.s_max; ++s) {
        for (int u = 0; u <= C->term(s)->max_degree(); ++u) {
            int d = C->dim(s, u);
            if (!d) continue;
            SparseMatrix din = s == 0 ? SparseMatrix(d, 0)
                                      : C->diff(s - 1).block_or_zero(u);
            SparseMatrix dout = C->diff(s).block_or_zero(u);
            auto H = fplin::subquotient_homology(din, dout, F);
            T.cells[{s, u}] = std::move(H);
        }
    }
    return T;
}

CotorTable cotor(HopfRef H, const Comodule& M_right, const Comodule& W_left,
                 int s_max, int threads) {
    auto C = cobar_complex(H, M_right, W_left, s_max + 1, true, threads);
    return cotor_of(C, s_max);
}

CotensorComplex cotensor_complex(const Comodule& M_right,
                                 const std::vector<Comodule>& terms,
                                 const std::vector<GradedMap>& d) {
    if (terms.empty()) throw fplin::MathError("cotensor_complex: no terms");
    const PrimeField& F = terms[0].over->F;
    HopfRef H = terms[0].over;
    CotensorComplex out;
    out.report.subject = "cotensor complex";
    out.complex.provenance = "M box " + terms[0].name + "...";
    out.complex.n_max = static_cast<int>(terms.size()) - 1;

    // differentials must be comodule maps
    for (std::size_t n = 0; n + 1 < terms.size(); ++n) {
        auto idG = graded::identity_map(H->space);
        auto id_d = graded::tensor_map({&idG, &d[n]}, F);
        GradedMap lhs = graded::compose(terms[n + 1].psi, d[n], F);
        GradedMap rhs = graded::compose(id_d, terms[n].psi, F);
        hopf::reanchor(rhs, terms[n].space, lhs.target);
        bool ok = graded::map_equal(lhs, rhs);
        std::string w;
        if (!ok) {
            for (int u = 0; u <= terms[n].space->max_degree(); ++u)
                if (!(lhs.block_or_zero(u) == rhs.block_or_zero(u))) {
                    w = "differential " + std::to_string(n) +
                        " is not a comodule map at degree " + std::to_string(u);
                    break;
                }
            out.report.check("differential is a comodule map", false, w);
            throw fplin::MathError(w);
        }
        out.report.check("differential " + std::to_string(n) + " is a comodule map",
                         true);
    }

    std::vector<hopf::Cotensor> cots;
    for (auto& t : terms) {
        cots.push_back(hopf::cotensor(M_right, t));
        out.subs.push_back(cots.back().sub);
        out.complex.terms.push_back(cots.back().sub.space);
    }
    auto idM = graded::identity_map(M_right.space);
    for (std::size_t n = 0; n + 1 < terms.size(); ++n) {
        GradedMap big = graded::tensor_map({&idM, &d[n]}, F);
        hopf::reanchor(big, out.subs[n].ambient, out.subs[n + 1].ambient);
        out.complex.d.push_back(
            graded::restrict_corestrict(big, out.subs[n], out.subs[n + 1], F));
    }
    out.report.merge(out.complex.verify_d2(F));
    return out;
}

ChangeOfRings change_of_rings(HopfRef Gamma, HopfRef Sigma, const GradedMap& q,
                              const Comodule& M_right, const Comodule& N_left,
                              int n_max) {
    const PrimeField& F = Gamma->F;
    ChangeOfRings out;
    out.report.subject = "change of rings over q: " + Gamma->name + " -> " +
                         Sigma->name;

    Comodule N_sigma = hopf::induced_along_quotient(N_left, Sigma, q);
    Comodule M_sigma = hopf::induced_along_quotient(M_right, Sigma, q);
    out.gamma_box_N = hopf::cotensor(hopf::gamma_sigma_bicomodule(Gamma, Sigma, q),
                                     hopf::as_bicomodule(N_sigma), Sigma);
    Comodule W = hopf::left_part(out.gamma_box_N.self);
    W.name = "Gamma box_Sigma " + N_left.name;

    out.source = cobar_complex(Gamma, M_right, W, n_max, true);
    out.target = cobar_complex(Sigma, M_sigma, N_sigma, n_max, true);

    int mf = M_right.space->factor_count();
    int nf = N_left.space->factor_count();
    // chain map: project slots by q, contract the cotensor glue slot by eps
    for (int n = 0; n <= n_max; ++n) {
        SpaceRef src = out.source->term(n);
        SpaceRef tgt = out.target->term(n);
        GradedMap chi = graded::zero_map(src, tgt);
        for (int u = 0; u <= src->max_degree(); ++u) {
            int sd = src->dim(u);
            if (!sd || !tgt->dim(u)) continue;
            SparseMatrix block(tgt->dim(u), sd);
            for (int col = 0; col < sd; ++col) {
                const Label& l = src->label(u, col);
                Label mpart{std::vector<Monomial>(l.factors.begin(),
                                                  l.factors.begin() + mf)};
                // W part: last factor-count of W.space
                int wf = W.space->factor_count();
                Label wpart{std::vector<Monomial>(l.factors.end() - wf,
                                                  l.factors.end())};
                std::vector<Monomial> slots(l.factors.begin() + mf,
                                            l.factors.end() - wf);
                // project slots
                std::vector<Monomial> pslots;
                bool dead = false;
                Scalar coef = 1;
                for (auto& s : slots) {
                    int us = s.degree(*Gamma->table);
                    int is = Gamma->space->index_of(us, graded::Label{{s}});
                    const auto* qb = q.block(us);
                    bool hit = false;
                    if (qb)
                        for (int r = 0; r < qb->rows() && !hit; ++r) {
                            Scalar v = qb->at(r, is);
                            if (v) {
                                hit = true;
                                coef = F.mul(coef, v);
                                pslots.push_back(
                                    Sigma->space->label(us, r).factors[0]);
                            }
                        }
                    if (!hit) {
                        dead = true;
                        break;
                    }
                }
                if (dead) continue;
                // expand the W element in the ambient Gamma (x) N and contract
                int uw = W.space->label_degree(wpart);
                int iw = W.space->index_of(uw, wpart);
                const auto& sub = out.gamma_box_N.sub.sub.at(uw);
                const auto& row = sub.basis.row(iw);
                SpaceRef amb = out.gamma_box_N.sub.ambient;
                for (auto& [c, v] : row.terms) {
                    const Label& al = amb->label(uw, c);
                    // first factor is the Gamma glue slot
                    if (!al.factors[0].is_unit()) continue;  // eps kills it
                    Label nlab{std::vector<Monomial>(al.factors.begin() + 1,
                                                     al.factors.end())};
                    Label outl;
                    for (auto& f : mpart.factors) outl.factors.push_back(f);
                    for (auto& s : pslots) outl.factors.push_back(s);
                    for (auto& f : nlab.factors) outl.factors.push_back(f);
                    int rowi = tgt->index_of(u, outl);
                    if (rowi >= 0) block.add_to(rowi, col, F.mul(coef, v), F);
                }
            }
            if (!block.is_zero()) chi.blocks[u] = std::move(block);
        }
        out.chain_map.push_back(std::move(chi));
    }
    (void)nf;

    // chain-map identity
    for (int n = 0; n + 1 <= n_max; ++n) {
        auto lhs = graded::compose(out.chain_map[n + 1], out.source->diff(n), F);
        auto rhs = graded::compose(out.target->diff(n), out.chain_map[n], F);
        bool ok = graded::map_equal(lhs, rhs);
        out.report.check("chain map at level " + std::to_string(n), ok,
                         ok ? "" : "matrices differ");
    }
    // homology isomorphism in the window
    for (int s = 0; s + 1 < n_max; ++s) {
        bool ok = true;
        std::string w;
        for (int u = 0; u <= out.source->term(s)->max_degree() && ok; ++u) {
            int sd = out.source->dim(s, u);
            SparseMatrix din_s =
                s == 0 ? SparseMatrix(sd, 0) : out.source->diff(s - 1).block_or_zero(u);
            auto Hs = fplin::subquotient_homology(din_s,
                                                  out.source->diff(s).block_or_zero(u),
                                                  F);
            int td = out.target->dim(s, u);
            SparseMatrix din_t =
                s == 0 ? SparseMatrix(td, 0) : out.target->diff(s - 1).block_or_zero(u);
            auto Ht = fplin::subquotient_homology(din_t,
                                                  out.target->diff(s).block_or_zero(u),
                                                  F);
            if (Hs.dim != Ht.dim) {
                ok = false;
                w = "dims differ at (s,u)=(" + std::to_string(s) + "," +
                    std::to_string(u) + ")";
                break;
            }
            // induced map bijective
            SparseMatrix ind(Ht.dim, Hs.dim);
            auto chi = out.chain_map[s].block_or_zero(u);
            for (int k = 0; k < Hs.dim; ++k) {
                auto img = chi.apply(Hs.reps.row(k), F);
                auto cl = fplin::homology_class(Ht, img, F);
                for (auto& [r, v] : cl.terms) ind.add_to(r, k, v, F);
            }
            if (fplin::rank(ind, F) != Hs.dim) {
                ok = false;
                w = "induced map not bijective at (s,u)=(" + std::to_string(s) + "," +
                    std::to_string(u) + ")";
            }
        }
        out.report.check("homology isomorphism in homological degree " +
                             std::to_string(s),
                         ok, w);
    }
    return out;
}

fplin::SparseVec apply_coefficient_map(const WordComplex& from, int n, int u,
                                       const fplin::SparseVec& v, const GradedMap& f,
                                       const WordComplex& to) {
    const PrimeField& F = from.H->F;
    fplin::SparseVec out;
    int mf = from.M.space->factor_count();
    int wf = from.W.space->factor_count();
    for (auto& [i, c] : v.terms) {
        const Label& l = from.term(n)->label(u, i);
        Label wpart{std::vector<Monomial>(l.factors.end() - wf, l.factors.end())};
        int uw = from.W.space->label_degree(wpart);
        int iw = from.W.space->index_of(uw, wpart);
        const auto* fb = f.block(uw);
        if (!fb) continue;
        for (int r = 0; r < fb->rows(); ++r) {
            Scalar fv = fb->at(r, iw);
            if (!fv) continue;
            Label outl{std::vector<Monomial>(l.factors.begin(),
                                             l.factors.end() - wf)};
            for (auto& g : to.W.space->label(uw, r).factors)
                outl.factors.push_back(g);
            int row = to.term(n)->index_of(u, outl);
            if (row >= 0) {
                fplin::SparseVec t;
                t.terms.push_back({row, F.mul(c, fv)});
                out = fplin::vec_add_scaled(out, t, 1, F);
            }
        }
    }
    (void)mf;
    return out;
}

fplin::SparseVec cup(const WordComplex& CX, int s1, int u1, const fplin::SparseVec& x,
                     const WordComplex& CY, int s2, int u2, const fplin::SparseVec& y,
                     const WordComplex& CT) {
    const hopf::HopfAlgebra& H = *CX.H;
    const PrimeField& F = H.F;
    const graded::GenTable& T = *H.table;
    if (CX.M.space->total_dim() != 1 || CY.M.space->total_dim() != 1)
        throw fplin::MathError("cup: requires M = k on both factors");
    fplin::SparseVec out;
    int wf1 = CX.W.space->factor_count();
    int wf2 = CY.W.space->factor_count();
    int n = s1 + s2, u = u1 + u2;
    for (auto& [ix, cx] : x.terms) {
        const Label& lx = CX.term(s1)->label(u1, ix);
        std::vector<Monomial> aslots(lx.factors.begin(),
                                     lx.factors.end() - wf1);
        Label w1{std::vector<Monomial>(lx.factors.end() - wf1, lx.factors.end())};
        int uw1 = CX.W.space->label_degree(w1);
        int iw1 = CX.W.space->index_of(uw1, w1);
        // iterated coaction of w1 to s2 slots
        struct Exp {
            Scalar c;
            std::vector<Monomial> gs;
            int u2i, i2i;
        };
        std::vector<Exp> exps;
        {
            std::function<void(int, int, Scalar, std::vector<Monomial>&)> rec =
                [&](int uu, int ii, Scalar c, std::vector<Monomial>& acc) {
                    if (static_cast<int>(acc.size()) == s2) {
                        exps.push_back({c, acc, uu, ii});
                        return;
                    }
                    for (auto& t : hopf::coaction_terms(CX.W, uu, ii)) {
                        acc.push_back(t.g);
                        rec(t.u2, t.i2, F.mul(c, t.coef), acc);
                        acc.pop_back();
                    }
                };
            std::vector<Monomial> acc;
            rec(uw1, iw1, 1, acc);
        }
        for (auto& [iy, cy] : y.terms) {
            const Label& ly = CY.term(s2)->label(u2, iy);
            std::vector<Monomial> bslots(ly.factors.begin(),
                                         ly.factors.end() - wf2);
            Label w2{std::vector<Monomial>(ly.factors.end() - wf2, ly.factors.end())};
            for (auto& e : exps) {
                // sign: gamma_i crosses b_1..b_{i-1}; w-residual crosses all b's
                long long par = 0;
                int bpref = 0;
                for (int i = 0; i < s2; ++i) {
                    par += static_cast<long long>(e.gs[i].degree(T)) * bpref;
                    bpref += bslots[i].degree(T);
                }
                par += static_cast<long long>(e.u2i) * bpref;
                Scalar c = F.mul(F.mul(cx, cy), e.c);
                if (par % 2) c = F.neg(c);
                if (!c) continue;
                Label outl;
                bool dead = false;
                for (auto& a : aslots) outl.factors.push_back(a);
                for (int i = 0; i < s2 && !dead; ++i) {
                    auto pr = H.mul(e.gs[i], bslots[i]);
                    if (!pr) {
                        dead = true;
                        break;
                    }
                    c = F.mul(c, pr->first);
                    outl.factors.push_back(pr->second);
                }
                if (dead || !c) continue;
                for (auto& g : CX.W.space->label(e.u2i, e.i2i).factors)
                    outl.factors.push_back(g);
                for (auto& g : w2.factors) outl.factors.push_back(g);
                int row = CT.term(n)->index_of(u, outl);
                if (row >= 0) {
                    fplin::SparseVec t;
                    t.terms.push_back({row, c});
                    out = fplin::vec_add_scaled(out, t, 1, F);
                }
            }
        }
    }
    return out;
}

fplin::SparseVec cotor_product(const CotorTable& A, int s1, int u1, int i1,
                               const CotorTable& B, int s2, int u2, int i2,
                               const CotorTable& T, const GradedMap* coeff_map,
                               const WordComplex* cup_target) {
    auto ha = A.cells.find({s1, u1});
    auto hb = B.cells.find({s2, u2});
    if (ha == A.cells.end() || hb == B.cells.end()) return {};
    fplin::SparseVec xa, xb;
    if (i1 >= ha->second.dim || i2 >= hb->second.dim) return {};
    xa = ha->second.reps.row(i1);
    xb = hb->second.reps.row(i2);
    const WordComplex& CT = cup_target ? *cup_target : *T.complex;
    fplin::SparseVec prod =
        cup(*A.complex, s1, u1, xa, *B.complex, s2, u2, xb, CT);
    if (coeff_map)
        prod = apply_coefficient_map(CT, s1 + s2, u1 + u2, prod, *coeff_map,
                                     *T.complex);
    return T.cls(s1 + s2, u1 + u2, prod);
}

Report freeness_window_check(const Comodule& M_over_Sigma, int window, int s_max) {
    HopfRef Sigma = M_over_Sigma.over;
    Report rep;
    rep.subject = "freeness of " + M_over_Sigma.name + " over " + Sigma->name +
                  " through degree " + std::to_string(window);
    auto k = hopf::trivial_comodule(Sigma, false);
    auto T = cotor(Sigma, k, M_over_Sigma, s_max);
    bool free = true;
    std::string w;
    for (int s = 1; s <= T.s_max; ++s)
        for (int u = 0; u <= window; ++u)
            if (T.dim(s, u) != 0 && free) {
                free = false;
                w = "Cotor^" + std::to_string(s) + " nonzero in degree " +
                    std::to_string(u) + ": " + T.rep_string(s, u, 0);
            }
    rep.check("Cotor vanishes in positive homological degree", free, w);
    std::ostringstream gens;
    for (int u = 0; u <= window; ++u)
        if (T.dim(0, u)) gens << " " << u << ":" << T.dim(0, u);
    rep.check("generator degrees (s=0 dims):" + gens.str(), true);
    return rep;
}

}  // namespace coh::cobar
