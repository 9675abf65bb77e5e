#include "coh/specseq.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace coh::specseq {

using fplin::PrimeField;
using fplin::Scalar;
using fplin::SparseMatrix;
using fplin::SparseVec;
using fplin::Subspace;
using graded::Label;
using graded::Monomial;

// ---------------------------------------------------------------- engine --

int FilteredComplex::dim(int n, int u) const {
    if (n < 0 || n > n_max) return 0;
    auto it = dims[n].find(u);
    return it == dims[n].end() ? 0 : it->second;
}

SparseMatrix FilteredComplex::diff(int n, int u) const {
    if (n < 0 || n >= n_max) return SparseMatrix(dim(n + 1, u), dim(n, u));
    auto it = d[n].find(u);
    if (it == d[n].end()) return SparseMatrix(dim(n + 1, u), dim(n, u));
    return it->second;
}

int FilteredComplex::grade_of(int n, int u, int i) const {
    return grade[n].at(u)[i];
}

Subspace FilteredComplex::filtration(int s, int n, int u) const {
    int dn = dim(n, u);
    if (s <= 0) return Subspace::full(dn);
    std::vector<SparseVec> rows;
    auto it = grade[n].find(u);
    if (it != grade[n].end())
        for (int i = 0; i < dn; ++i)
            if (it->second[i] >= s) rows.push_back(fplin::unit_vec(i));
    return Subspace::span(SparseMatrix::from_rows(dn, std::move(rows)), F);
}

int FilteredComplex::grade_of_vector(int n, int u, const SparseVec& v) const {
    auto it = grade[n].find(u);
    if (it == grade[n].end() || v.empty()) return n + 1;  // vacuously top grade
    int g = n + 1;
    for (auto& [i, c] : v.terms) g = std::min(g, it->second[i]);
    return g;
}

Report FilteredComplex::verify() const {
    Report rep;
    rep.subject = provenance + ": filtered complex";
    bool pres = true;
    std::string w;
    for (int n = 0; n < n_max && pres; ++n)
        for (auto& [u, b] : d[n]) {
            int dn = dim(n, u);
            for (int i = 0; i < dn && pres; ++i) {
                SparseVec img = b.apply(fplin::unit_vec(i), F);
                if (img.empty()) continue;
                if (grade_of_vector(n + 1, u, img) < grade_of(n, u, i)) {
                    pres = false;
                    w = "d drops filtration at n=" + std::to_string(n) +
                        ", u=" + std::to_string(u) + ", basis " + std::to_string(i);
                }
            }
        }
    rep.check("d preserves the filtration", pres, w);
    bool bounds = true;
    for (int n = 0; n <= n_max && bounds; ++n)
        for (auto& [u, g] : grade[n])
            for (int v : g)
                if (v < 0 || v > n) bounds = false;
    rep.check("first-quadrant grades: 0 <= s <= n", bounds);
    // d^2 = 0
    bool dd = true;
    std::string wd;
    for (int n = 0; n + 1 < n_max && dd; ++n)
        for (auto& [u, b] : d[n]) {
            auto prod = diff(n + 1, u).mul(b, F);
            if (!prod.is_zero()) {
                dd = false;
                wd = "n=" + std::to_string(n) + ", u=" + std::to_string(u);
            }
        }
    rep.check("d . d = 0", dd, wd);
    return rep;
}

int Page::dim(int s, int t, int u) const {
    auto it = cells.find({s, t, u});
    return it == cells.end() ? 0 : it->second.dim;
}

SparseVec Page::cls(int s, int t, int u, const SparseVec& v,
                    const PrimeField& F) const {
    auto it = cells.find({s, t, u});
    if (it == cells.end()) {
        if (v.empty()) return {};
        throw fplin::MathError("Page::cls: cell is empty");
    }
    return fplin::homology_class(it->second, v, F);
}

PagesResult pages_from_filtration(const FilteredComplex& fc, int r_max) {
    const PrimeField& F = fc.F;
    PagesResult out;
    out.report.subject = fc.provenance + ": pages";
    out.report.merge(fc.verify());

    // collect internal degrees present
    std::vector<int> degrees;
    {
        std::map<int, bool> seen;
        for (int n = 0; n <= fc.n_max; ++n)
            for (auto& [u, dd] : fc.dims[n])
                if (dd) seen[u] = true;
        for (auto& [u, b] : seen) degrees.push_back(u);
    }

    out.pages.resize(r_max + 1);
    for (int r = 0; r <= r_max; ++r) out.pages[r].r = r;

    for (int u : degrees) {
        // Z[r][n][s], r = -1 stored at index 0 (Z_{-1}^s = F^s)
        std::vector<std::vector<std::vector<Subspace>>> Z(
            r_max + 2,
            std::vector<std::vector<Subspace>>(fc.n_max + 1));
        for (int n = 0; n <= fc.n_max; ++n) {
            Z[0][n].resize(n + 2);
            for (int s = 0; s <= n + 1; ++s) Z[0][n][s] = fc.filtration(s, n, u);
        }
        for (int r = 0; r <= r_max; ++r) {
            for (int n = 0; n <= fc.n_max; ++n) {
                Z[r + 1][n].resize(n + 2);
                for (int s = 0; s <= n + 1; ++s) {
                    Subspace Fs = fc.filtration(s, n, u);
                    Subspace target = (n < fc.n_max)
                                          ? fc.filtration(s + r, n + 1, u)
                                          : Subspace::full(0);
                    if (n < fc.n_max)
                        Z[r + 1][n][s] = fplin::preimage(fc.diff(n, u), target, Fs, F);
                    else
                        Z[r + 1][n][s] = Fs;  // top differentials leave the window
                }
            }
            // cells and differentials on page r
            Page& page = out.pages[r];
            for (int n = 0; n <= fc.n_max; ++n) {
                for (int s = 0; s <= n; ++s) {
                    const Subspace& Zr = Z[r + 1][n][s];
                    if (!Zr.dim() && !fc.dim(n, u)) continue;
                    Subspace den = (s + 1 <= n + 1) ? Z[r][n][s + 1]
                                                    : Subspace::zero(fc.dim(n, u));
                    if (n >= 1 && r >= 1) {
                        // d(Z_{r-1}^{s-r+1}) with Z_{r-1}^{v} = {x in F^v :
                        // dx in F^{v+r-1} = F^s}; F^v is everything for v <= 0.
                        int slo = std::max(s - r + 1, 0);
                        if (slo <= n) {
                            Subspace pre = fplin::preimage(
                                fc.diff(n - 1, u), fc.filtration(s, n, u),
                                fc.filtration(slo, n - 1, u), F);
                            den = fplin::subspace_sum(
                                den,
                                fplin::image_of_subspace(fc.diff(n - 1, u), pre, F),
                                F);
                        }
                    }
                    fplin::Homology cell;
                    cell.cycles = Zr;
                    cell.boundaries = den;
                    auto q = fplin::quotient(Zr, fplin::subspace_intersect(den, Zr, F),
                                             F);
                    cell.reps = q.reps;
                    cell.projection = q.projection;
                    cell.dim = cell.reps.rows();
                    if (cell.dim || fc.dim(n, u))
                        page.cells[{s, n - s, u}] = std::move(cell);
                }
            }
        }
    }

    // differentials d_r and their checks
    for (int r = 0; r <= r_max; ++r) {
        Page& page = out.pages[r];
        for (auto& [key, cell] : page.cells) {
            auto [s, t, u] = key;
            int n = s + t;
            if (n >= fc.n_max) continue;
            auto tgt = page.cells.find({s + r, t - r + 1, u});
            int tdim = tgt == page.cells.end() ? 0 : tgt->second.dim;
            SparseMatrix dr(tdim, cell.dim);
            auto db = fc.diff(n, u);
            for (int k = 0; k < cell.dim; ++k) {
                SparseVec img = db.apply(cell.reps.row(k), F);
                if (img.empty()) continue;
                if (tgt == page.cells.end())
                    throw fplin::MathError("pages: d_r image misses its cell");
                SparseVec c = fplin::homology_class(tgt->second, img, F);
                for (auto& [row, v] : c.terms) dr.add_to(row, k, v, F);
            }
            if (!dr.is_zero() || tdim) page.d[key] = std::move(dr);
        }
        bool ddzero = true;
        std::string w;
        for (auto& [key, m] : page.d) {
            auto [s, t, u] = key;
            auto next = page.d.find({s + r, t - r + 1, u});
            if (next == page.d.end()) continue;
            if (!next->second.mul(m, F).is_zero()) {
                ddzero = false;
                w = "(s,t,u)=(" + std::to_string(s) + "," + std::to_string(t) + "," +
                    std::to_string(u) + ")";
                break;
            }
        }
        out.report.check("d_" + std::to_string(r) + " . d_" + std::to_string(r) +
                             " = 0",
                         ddzero, w);
    }

    // total homology accounting at the final page
    for (int n = 0; n <= fc.n_max; ++n)
        for (auto& [u, dd] : fc.dims[n]) {
            if (!dd) continue;
            SparseMatrix din = n == 0 ? SparseMatrix(dd, 0) : fc.diff(n - 1, u);
            auto H = fplin::subquotient_homology(din, fc.diff(n, u), F);
            out.h_total[{n, u}] = H.dim;
        }
    if (r_max >= fc.n_max + 1) {
        bool ok = true;
        std::string w;
        const Page& last = out.pages[r_max];
        std::map<std::pair<int, int>, int> sums;
        for (auto& [key, cell] : last.cells) {
            auto [s, t, u] = key;
            if (s + t < fc.n_max) sums[{s + t, u}] += cell.dim;
        }
        for (int n = 0; n < fc.n_max && ok; ++n)
            for (auto& [u, dd] : fc.dims[n]) {
                int want = out.h_total.count({n, u}) ? out.h_total[{n, u}] : 0;
                int got = sums.count({n, u}) ? sums[{n, u}] : 0;
                if (want != got) {
                    ok = false;
                    w = "n=" + std::to_string(n) + ", u=" + std::to_string(u) +
                        ": assoc graded " + std::to_string(got) + " vs H " +
                        std::to_string(want);
                }
            }
        out.report.check("E_inf associated graded sums to H(total)", ok, w);
    }
    return out;
}

// ----------------------------------------------------------------- datum --

ExtensionDatum make_datum(HopfRef Gamma, HopfRef Sigma, const GradedMap& q,
                          const Comodule& M_right, const Comodule& N_left,
                          const std::string& name, int certified_u) {
    const PrimeField& F = Gamma->F;
    ExtensionDatum d;
    d.name = name;
    d.Gamma = Gamma;
    d.Sigma = Sigma;
    d.q = q;
    d.M_right = M_right;
    d.N_left = N_left;
    d.certified_u = certified_u;
    d.validation.subject = "extension datum " + name;
    d.validation.merge(hopf::validate_hopf(*Gamma));
    d.validation.merge(hopf::validate_hopf(*Sigma));
    d.validation.merge(hopf::validate_comodule(M_right));
    d.validation.merge(hopf::validate_comodule(N_left));

    auto phi = hopf::comodule_algebra_from_cotensor(Gamma, Sigma, q);
    d.Phi = std::move(phi.Phi);
    d.validation.merge(phi.report);
    d.validation.check("Phi recomputed as Gamma box_Sigma k", true);

    // q . (Phi -> Gamma) hits only k in positive degrees
    {
        GradedMap qi = graded::compose(q, d.Phi.sub.inclusion(F), F);
        bool ok = true;
        for (int u = 1; u <= Gamma->D && ok; ++u)
            if (!qi.block_or_zero(u).is_zero()) ok = false;
        d.validation.check("q restricted to Phi vanishes in positive degrees", ok);
    }

    auto kb = hopf::kernel_bicomodule(Gamma, Sigma, q);
    d.validation.merge(kb.report);
    d.G = std::move(kb);
    return d;
}

// ------------------------------------------------------------------ CESS --

namespace {

bool monomial_in_G(const ExtensionDatum& datum, const Monomial& m) {
    if (m.is_unit()) return false;
    int u = m.degree(*datum.Gamma->table);
    int i = datum.Gamma->space->index_of(u, Label{{m}});
    const auto* qb = datum.q.block(u);
    if (!qb) return true;
    for (int r = 0; r < qb->rows(); ++r)
        if (qb->at(r, i)) return false;
    return true;
}

// horizontal differential block: term (s,t) -> term (s+1,t), the coefficient
// map dW tensored with the identity on M (x) Gamma^{(x)t}, sign (-1)^t.
SparseMatrix horizontal_block(const ExtensionDatum& datum,
                              const cobar::WordComplex& cs,
                              const cobar::WordComplex& cs1, const GradedMap& dW,
                              int t, int u) {
    const PrimeField& F = datum.Gamma->F;
    SpaceRef src = cs.term(t), tgt = cs1.term(t);
    int sd = src->dim(u);
    SparseMatrix block(tgt->dim(u), sd);
    if (!sd || !tgt->dim(u)) return block;
    int wf = cs.W.space->factor_count();
    Scalar sgn = (t % 2) ? F.reduce(-1) : 1;
    for (int col = 0; col < sd; ++col) {
        const Label& l = src->label(u, col);
        Label wpart{std::vector<Monomial>(l.factors.end() - wf, l.factors.end())};
        int uw = cs.W.space->label_degree(wpart);
        int iw = cs.W.space->index_of(uw, wpart);
        const auto* b = dW.block(uw);
        if (!b) continue;
        for (int r = 0; r < b->rows(); ++r) {
            Scalar v = b->at(r, iw);
            if (!v) continue;
            Label outl{std::vector<Monomial>(l.factors.begin(),
                                             l.factors.end() - wf)};
            for (auto& g : cs1.W.space->label(uw, r).factors)
                outl.factors.push_back(g);
            int row = tgt->index_of(u, outl);
            if (row >= 0) block.add_to(row, col, F.mul(sgn, v), F);
        }
    }
    return block;
}

}  // namespace

CessResult build_cess(const ExtensionDatum& datum, int s_max, int n_max, int r_max,
                      int threads) {
    const PrimeField& F = datum.Gamma->F;
    CessResult out;
    out.s_max = s_max;
    out.n_max = n_max;
    out.report.subject = "CESS for " + datum.name;

    // normalized Phi-resolution N*D_Phi^s(N) with its comodule structure
    auto DD = cobar::build_DDelta(datum.Phi, datum.N_left, n_max + 1);
    auto Nm = cobar::normalize(DD, F);
    out.report.check("normalization of D_Phi", Nm.report.all_passed(),
                     Nm.report.first_failure());
    for (int s = 0; s <= n_max + 1; ++s) {
        out.W.push_back(Nm.n_comodules[s]);
        if (s <= n_max) out.dW.push_back(Nm.kernel_model.d[s]);
    }
    // the coefficient differential is a comodule map (needed for the cofree
    // coordinates to be legitimate)
    {
        bool ok = true;
        for (int s = 0; s < n_max && ok; ++s) {
            auto idG = graded::identity_map(datum.Gamma->space);
            auto id_d = graded::tensor_map({&idG, &out.dW[s]}, F);
            auto lhs = graded::compose(out.W[s + 1].psi, out.dW[s], F);
            auto rhs = graded::compose(id_d, out.W[s].psi, F);
            hopf::reanchor(rhs, out.W[s].space, lhs.target);
            if (!graded::map_equal(lhs, rhs)) ok = false;
        }
        out.report.check("d_Phi restricted to N* is a comodule map", ok);
    }

    for (int s = 0; s <= n_max; ++s)
        out.columns.push_back(cobar::cobar_complex(
            datum.Gamma, datum.M_right, out.W[s], n_max - s + 1, false, threads));

    // assemble the filtered total complex
    FilteredComplex& T = out.total;
    T.provenance = "CESS total (" + datum.name + ")";
    T.F = F;
    T.n_max = n_max;
    T.dims.resize(n_max + 1);
    T.d.resize(n_max + 1);
    T.grade.resize(n_max + 1);
    out.offset.resize(n_max + 2);
    for (int n = 0; n <= n_max; ++n) {
        out.offset[n].resize(n + 1);
        for (int u = 0; u <= datum.Gamma->D; ++u) {
            int total = 0;
            for (int s = 0; s <= n; ++s) {
                out.offset[n][s][u] = total;
                total += out.columns[s]->dim(n - s, u);
            }
            if (total) {
                T.dims[n][u] = total;
                auto& g = T.grade[n][u];
                g.resize(total);
                for (int s = 0; s <= n; ++s) {
                    int base = out.offset[n][s][u];
                    int dd = out.columns[s]->dim(n - s, u);
                    for (int i = 0; i < dd; ++i) g[base + i] = s;
                }
            }
        }
    }
    for (int n = 0; n < n_max; ++n) {
        for (int u = 0; u <= datum.Gamma->D; ++u) {
            int sd = T.dim(n, u), td = T.dim(n + 1, u);
            if (!sd || !td) continue;
            SparseMatrix block(td, sd);
            for (int s = 0; s <= n; ++s) {
                int t = n - s;
                int base = out.offset[n][s][u];
                int dd = out.columns[s]->dim(t, u);
                if (!dd) continue;
                // vertical: d within column s
                auto vb = out.columns[s]->diff(t).block_or_zero(u);
                int vbase = out.offset[n + 1][s][u];
                for (int i = 0; i < dd; ++i)
                    for (auto& [r, v] : vb.apply(fplin::unit_vec(i), F).terms)
                        block.add_to(vbase + r, base + i, v, F);
                // horizontal into column s+1
                if (s + 1 <= n + 1) {
                    auto hb = horizontal_block(datum, *out.columns[s],
                                               *out.columns[s + 1], out.dW[s], t, u);
                    int hbase = out.offset[n + 1][s + 1][u];
                    for (int i = 0; i < dd; ++i)
                        for (auto& [r, v] : hb.apply(fplin::unit_vec(i), F).terms)
                            block.add_to(hbase + r, base + i, v, F);
                }
            }
            if (!block.is_zero()) T.d[n][u] = std::move(block);
        }
    }
    out.pages = pages_from_filtration(T, r_max);
    out.report.merge(out.pages.report);

    // E1 equals the column homology Cotor_Gamma(M, W_s)
    {
        bool ok = true;
        std::string w;
        for (int s = 0; s <= std::min(s_max, n_max) && ok; ++s)
            for (int t = 0; s + t < n_max && ok; ++t)
                for (int u = 0; u <= datum.Gamma->D && ok; ++u) {
                    int dcol = out.columns[s]->dim(t, u);
                    SparseMatrix din = t == 0
                                           ? SparseMatrix(dcol, 0)
                                           : out.columns[s]->diff(t - 1).block_or_zero(u);
                    auto H = fplin::subquotient_homology(
                        din, out.columns[s]->diff(t).block_or_zero(u), F);
                    if (H.dim != out.pages.pages[1].dim(s, t, u)) {
                        ok = false;
                        w = "(s,t,u)=(" + std::to_string(s) + "," + std::to_string(t) +
                            "," + std::to_string(u) + ")";
                    }
                }
        out.report.check("E1 = Cotor_Gamma(M, N*D_Phi^s(N)) per cell", ok, w);
    }
    return out;
}

std::map<Cell, int> cess_e1_via_sigma(const ExtensionDatum& datum, int s_max,
                                      int t_max) {
    std::map<Cell, int> out;
    Comodule phibar = hopf::reduced_comodule(datum.Phi.com);
    Comodule k_right = hopf::trivial_comodule(datum.Sigma, false);
    for (int s = 0; s <= s_max; ++s) {
        Comodule Y = datum.N_left;
        for (int i = 0; i < s; ++i) Y = hopf::tensor_diag(phibar, Y);
        Comodule Ysig = hopf::induced_along_quotient(Y, datum.Sigma, datum.q);
        auto T = cobar::cotor(datum.Sigma, k_right, Ysig, t_max);
        for (int t = 0; t <= T.s_max; ++t)
            for (int u = 0; u <= datum.Gamma->D; ++u)
                if (T.dim(t, u)) out[{s, t, u}] = T.dim(t, u);
    }
    return out;
}

int CessResult::e1_dim(int s, int t, int u) const {
    return pages.pages.size() > 1 ? pages.pages[1].dim(s, t, u) : 0;
}

// ---------------------------------------------------------------- filtss --

FiltssResult build_filtss(const ExtensionDatum& datum, int n_max, int r_max,
                          int threads) {
    const PrimeField& F = datum.Gamma->F;
    FiltssResult out;
    out.n_max = n_max;
    out.report.subject = "G-adic filtration SS for " + datum.name;
    out.complex = cobar::cobar_complex(datum.Gamma, datum.M_right, datum.N_left,
                                       n_max + 1, false, threads);

    FilteredComplex& T = out.total;
    T.provenance = "filtered cobar (" + datum.name + ")";
    T.F = F;
    T.n_max = n_max;
    T.dims.resize(n_max + 1);
    T.d.resize(n_max + 1);
    T.grade.resize(n_max + 1);
    int mf = datum.M_right.space->factor_count();
    for (int n = 0; n <= n_max; ++n) {
        SpaceRef sp = out.complex->term(n);
        for (int u = 0; u <= datum.Gamma->D; ++u) {
            int dd = sp->dim(u);
            if (!dd) continue;
            T.dims[n][u] = dd;
            auto& g = T.grade[n][u];
            g.resize(dd);
            for (int i = 0; i < dd; ++i) {
                const Label& l = sp->label(u, i);
                int cnt = 0;
                for (int k = 0; k < n; ++k)
                    if (monomial_in_G(datum, l.factors[mf + k])) ++cnt;
                g[i] = cnt;
            }
            if (n < n_max) {
                auto b = out.complex->diff(n).block_or_zero(u);
                if (!b.is_zero()) T.d[n][u] = std::move(b);
            }
        }
    }
    out.pages = pages_from_filtration(T, r_max);
    out.report.merge(out.pages.report);
    return out;
}

// ----------------------------------------------------------------- MPASS --

MpassE1 build_mpass_e1(const ExtensionDatum& datum, int s_max, int t_max,
                       int threads) {
    const PrimeField& F = datum.Gamma->F;
    MpassE1 out;
    out.s_max = s_max;
    out.t_max = t_max;
    out.report.subject = "MPASS E1 for " + datum.name;
    Comodule phibar = hopf::reduced_comodule(datum.Phi.com);
    Comodule k_right = hopf::trivial_comodule(datum.Gamma, false);

    std::vector<Comodule> X;  // X_s = Phibar^{(x)s} (x) N
    for (int s = 0; s <= s_max + 1; ++s) {
        Comodule xs = datum.N_left;
        for (int i = 0; i < s; ++i) xs = hopf::tensor_diag(phibar, xs);
        X.push_back(xs);
    }
    for (int s = 0; s <= s_max + 1; ++s)
        out.B.push_back(hopf::tensor_diag(datum.Phi.com, X[s]));

    // SES guards: 0 -> X_s -> B_s -> X_{s+1} -> 0 (unit and projection are
    // comodule maps; the splitting Phi = k1 (+) Phibar gives exactness)
    auto unit_map = [&](int s) {
        GradedMap f = graded::zero_map(X[s].space, out.B[s].space);
        for (int u = 0; u <= datum.Gamma->D; ++u) {
            int dd = X[s].space->dim(u);
            if (!dd || !out.B[s].space->dim(u)) continue;
            SparseMatrix b(out.B[s].space->dim(u), dd);
            for (int i = 0; i < dd; ++i) {
                Label l;
                for (auto& g : datum.Phi.com.space->label(0, 0).factors)
                    l.factors.push_back(g);
                for (auto& g : X[s].space->label(u, i).factors)
                    l.factors.push_back(g);
                int row = out.B[s].space->index_of(u, l);
                if (row >= 0) b.add_to(row, i, 1, F);
            }
            if (!b.is_zero()) f.set_block(u, std::move(b));
        }
        return f;
    };
    auto proj_map = [&](int s) {
        // project the first Phi factor along the unit; Phibar labels = positive
        // Phi labels
        GradedMap f = graded::zero_map(out.B[s].space, X[s + 1].space);
        int pf = datum.Phi.com.space->factor_count();
        for (int u = 0; u <= datum.Gamma->D; ++u) {
            int dd = out.B[s].space->dim(u);
            if (!dd || !X[s + 1].space->dim(u)) continue;
            SparseMatrix b(X[s + 1].space->dim(u), dd);
            for (int i = 0; i < dd; ++i) {
                const Label& l = out.B[s].space->label(u, i);
                Label phipart{std::vector<Monomial>(l.factors.begin(),
                                                    l.factors.begin() + pf)};
                if (datum.Phi.com.space->label_degree(phipart) == 0) continue;
                int row = X[s + 1].space->index_of(u, l);
                if (row >= 0) b.add_to(row, i, 1, F);
            }
            if (!b.is_zero()) f.set_block(u, std::move(b));
        }
        return f;
    };

    std::vector<GradedMap> units, projs;
    for (int s = 0; s <= s_max; ++s) {
        units.push_back(unit_map(s));
        projs.push_back(proj_map(s));
    }
    {
        bool exact = true, comod = true;
        std::string w;
        for (int s = 0; s <= s_max && exact; ++s) {
            // p . u = 0; dims add; u injective; p surjective
            if (!graded::compose(projs[s], units[s], F).is_zero()) exact = false;
            for (int u = 0; u <= datum.Gamma->D && exact; ++u) {
                int a = X[s].space->dim(u), b = out.B[s].space->dim(u),
                    c = X[s + 1].space->dim(u);
                if (a + c != b) exact = false;
                if (fplin::rank(units[s].block_or_zero(u), F) != a) exact = false;
                if (fplin::rank(projs[s].block_or_zero(u), F) != c) exact = false;
                if (!exact) w = "degree " + std::to_string(u);
            }
            // comodule maps
            auto idG = graded::identity_map(datum.Gamma->space);
            auto iu = graded::tensor_map({&idG, &units[s]}, F);
            auto lhs = graded::compose(out.B[s].psi, units[s], F);
            auto rhs = graded::compose(iu, X[s].psi, F);
            hopf::reanchor(rhs, X[s].space, lhs.target);
            if (!graded::map_equal(lhs, rhs)) comod = false;
            auto ip = graded::tensor_map({&idG, &projs[s]}, F);
            auto lhs2 = graded::compose(X[s + 1].psi, projs[s], F);
            auto rhs2 = graded::compose(ip, out.B[s].psi, F);
            hopf::reanchor(rhs2, out.B[s].space, lhs2.target);
            if (!graded::map_equal(lhs2, rhs2)) comod = false;
        }
        out.report.check("SES 0 -> Phibar^s N -> B_s -> Phibar^{s+1} N -> 0 exact",
                         exact, w);
        out.report.check("SES maps are comodule maps", comod);
        if (!exact) throw fplin::MathError("SES fails exactness: " + w);
    }

    std::vector<cobar::WordComplexRef> complexes;
    for (int s = 0; s <= s_max + 1; ++s)
        complexes.push_back(cobar::cobar_complex(datum.Gamma, k_right, out.B[s],
                                                 t_max + 1, true, threads));
    for (int s = 0; s <= s_max + 1; ++s)
        out.cols.push_back(cobar::cotor_of(complexes[s], t_max));

    // d1 = (unit into B_{s+1}) . (projection B_s -> Phibar^{s+1} N), applied to
    // cobar representatives coefficientwise
    for (int s = 0; s < s_max; ++s) {
        GradedMap coeff = graded::compose(units[s + 1], projs[s], F);
        for (auto& [cellkey, H] : out.cols[s].cells) {
            auto [t, u] = cellkey;
            if (!H.dim) continue;
            auto tcell = out.cols[s + 1].cells.find({t, u});
            int tdim =
                tcell == out.cols[s + 1].cells.end() ? 0 : tcell->second.dim;
            SparseMatrix d1(tdim, H.dim);
            for (int k = 0; k < H.dim; ++k) {
                SparseVec img = cobar::apply_coefficient_map(
                    *complexes[s], t, u, H.reps.row(k), coeff, *complexes[s + 1]);
                if (img.empty()) continue;
                SparseVec c = out.cols[s + 1].cls(t, u, img);
                for (auto& [r, v] : c.terms) d1.add_to(r, k, v, F);
            }
            if (!d1.is_zero() || tdim) out.d1[{s, t, u}] = std::move(d1);
        }
    }
    {
        bool ok = true;
        std::string w;
        for (auto& [key, m] : out.d1) {
            auto [s, t, u] = key;
            auto next = out.d1.find({s + 1, t, u});
            if (next == out.d1.end()) continue;
            if (!next->second.mul(m, F).is_zero()) {
                ok = false;
                w = "(s,t,u)=(" + std::to_string(s) + "," + std::to_string(t) + "," +
                    std::to_string(u) + ")";
                break;
            }
        }
        out.report.check("d1 . d1 = 0", ok, w);
    }
    return out;
}

int MpassE1::dim(int s, int t, int u) const {
    if (s < 0 || s >= static_cast<int>(cols.size())) return 0;
    return cols[s].dim(t, u);
}

// ----------------------------------------------------------------- theta --

namespace {

struct ThetaCoefTerm {
    Scalar c;
    std::vector<Monomial> slots;  // s Gamma-slots (in G when the theory holds)
    int un, in;                   // N-part
};

}  // namespace

ThetaResult theta(const ExtensionDatum& datum, const CessResult& cess,
                  const FiltssResult& filtss) {
    const PrimeField& F = datum.Gamma->F;
    ThetaResult out;
    out.report.subject = "theta for " + datum.name;
    int n_max = std::min(cess.n_max, filtss.n_max);

    // flat inclusions W_s -> Gamma^{(x)s+1} (x) N and the iterated shears
    std::vector<GradedMap> flatW, Sfull;
    std::vector<SpaceRef> ambients;
    {
        auto DD = cobar::build_DDelta(datum.Phi, datum.N_left, n_max + 1);
        auto Nm = cobar::normalize(DD, F);
        for (int s = 0; s <= n_max; ++s) {
            std::vector<SpaceRef> ambf;
            for (int i = 0; i <= s; ++i) ambf.push_back(datum.Gamma->space);
            ambf.push_back(datum.N_left.space);
            SpaceRef amb = graded::tensor(ambf);
            ambients.push_back(amb);
            std::vector<const GradedMap*> maps;
            GradedMap phi_incl = datum.Phi.sub.inclusion(F);
            auto idN = graded::identity_map(datum.N_left.space);
            for (int i = 0; i <= s; ++i) maps.push_back(&phi_incl);
            maps.push_back(&idN);
            GradedMap level_incl = graded::tensor_map(maps, F);
            hopf::reanchor(level_incl, DD.levels[s], amb);
            flatW.push_back(graded::compose(level_incl, Nm.n_sub[s].inclusion(F), F));
            auto S = shear::iterated_shear(datum.N_left, s + 1);
            hopf::reanchor(S.map, amb, amb);
            Sfull.push_back(S.map);
        }
    }

    // coefficient-side expansion cache: per (s, uw, iw) the unit-first-slot
    // terms of S^{s+1}(incl(w))
    int nf = datum.N_left.space->factor_count();
    std::vector<std::map<std::pair<int, int>, std::vector<ThetaCoefTerm>>> cache(
        n_max + 1);
    auto coef_terms = [&](int s, int uw, int iw)
        -> const std::vector<ThetaCoefTerm>& {
        auto& slot = cache[s];
        auto it = slot.find({uw, iw});
        if (it != slot.end()) return it->second;
        std::vector<ThetaCoefTerm> terms;
        SparseVec img = Sfull[s].block_or_zero(uw).apply(
            flatW[s].block_or_zero(uw).apply(fplin::unit_vec(iw), F), F);
        for (auto& [idx, v] : img.terms) {
            const Label& l = ambients[s]->label(uw, idx);
            if (!l.factors[0].is_unit()) continue;  // eps kills it
            ThetaCoefTerm t;
            t.c = v;
            for (int k = 1; k <= s; ++k) t.slots.push_back(l.factors[k]);
            Label nl{std::vector<Monomial>(l.factors.end() - nf, l.factors.end())};
            t.un = datum.N_left.space->label_degree(nl);
            t.in = datum.N_left.space->index_of(t.un, nl);
            terms.push_back(std::move(t));
        }
        return slot.emplace(std::make_pair(uw, iw), std::move(terms))
            .first->second;
    };

    out.blocks.resize(n_max + 1);
    int mf = datum.M_right.space->factor_count();
    for (int s = 0; s <= n_max; ++s) {
        out.blocks[s].resize(n_max - s + 1);
        for (int t = 0; s + t <= n_max; ++t) {
            SpaceRef src = cess.columns[s]->term(t);
            SpaceRef tgt = filtss.complex->term(s + t);
            GradedMap th = graded::zero_map(src, tgt);
            int wf = cess.W[s].space->factor_count();
            for (int u = 0; u <= datum.Gamma->D; ++u) {
                int sd = src->dim(u);
                if (!sd || !tgt->dim(u)) continue;
                SparseMatrix block(tgt->dim(u), sd);
                for (int col = 0; col < sd; ++col) {
                    const Label& l = src->label(u, col);
                    Label wpart{std::vector<Monomial>(l.factors.end() - wf,
                                                      l.factors.end())};
                    int uw = cess.W[s].space->label_degree(wpart);
                    int iw = cess.W[s].space->index_of(uw, wpart);
                    for (auto& term : coef_terms(s, uw, iw)) {
                        Label outl{std::vector<Monomial>(
                            l.factors.begin(), l.factors.begin() + mf + t)};
                        for (auto& g : term.slots) outl.factors.push_back(g);
                        for (auto& g :
                             datum.N_left.space->label(term.un, term.in).factors)
                            outl.factors.push_back(g);
                        int row = tgt->index_of(u, outl);
                        if (row >= 0) block.add_to(row, col, term.c, F);
                    }
                }
                if (!block.is_zero()) th.set_block(u, std::move(block));
            }
            out.blocks[s][t] = std::move(th);
        }
    }

    // (i) chain map: assemble theta_n on the total complex and compare
    {
        bool ok = true;
        std::string w;
        for (int n = 0; n < n_max && ok; ++n)
            for (int u = 0; u <= datum.Gamma->D && ok; ++u) {
                int sd = cess.total.dim(n, u);
                if (!sd) continue;
                SparseMatrix th_n(filtss.complex->term(n)->dim(u), sd);
                SparseMatrix th_n1(filtss.complex->term(n + 1)->dim(u),
                                   cess.total.dim(n + 1, u));
                for (int s = 0; s <= n; ++s) {
                    auto b = out.blocks[s][n - s].block_or_zero(u);
                    int base = cess.offset[n].at(s).at(u);
                    for (int i = 0; i < b.cols(); ++i)
                        for (auto& [r, v] : b.apply(fplin::unit_vec(i), F).terms)
                            th_n.add_to(r, base + i, v, F);
                }
                for (int s = 0; s <= n + 1; ++s) {
                    auto b = out.blocks[s][n + 1 - s].block_or_zero(u);
                    int base = cess.offset[n + 1].at(s).at(u);
                    for (int i = 0; i < b.cols(); ++i)
                        for (auto& [r, v] : b.apply(fplin::unit_vec(i), F).terms)
                            th_n1.add_to(r, base + i, v, F);
                }
                auto lhs = th_n1.mul(cess.total.diff(n, u), F);
                auto rhs = filtss.complex->diff(n).block_or_zero(u).mul(th_n, F);
                if (!(lhs == rhs)) {
                    ok = false;
                    w = "n=" + std::to_string(n) + ", u=" + std::to_string(u);
                }
            }
        out.report.check("theta is a chain map", ok, w);
    }

    // (ii) filtration-preserving
    {
        bool ok = true;
        std::string w;
        for (int s = 0; s <= n_max && ok; ++s)
            for (int t = 0; s + t <= n_max && ok; ++t)
                for (auto& [u, b] : out.blocks[s][t].blocks) {
                    for (int i = 0; i < b.cols() && ok; ++i) {
                        SparseVec img = b.apply(fplin::unit_vec(i), F);
                        if (img.empty()) continue;
                        if (filtss.total.grade_of_vector(s + t, u, img) < s) {
                            ok = false;
                            w = "(s,t,u)=(" + std::to_string(s) + "," +
                                std::to_string(t) + "," + std::to_string(u) +
                                "), basis " + std::to_string(i);
                        }
                    }
                }
        out.report.check("theta preserves the filtration", ok, w);
    }

    // (iii) E1 bijection per (s,t,u)
    {
        bool ok = true;
        std::string w;
        const Page& E1 = filtss.pages.pages[1];
        for (int s = 0; s <= n_max && ok; ++s)
            for (int t = 0; s + t < n_max && ok; ++t)
                for (int u = 0; u <= datum.Gamma->D && ok; ++u) {
                    int dcol = cess.columns[s]->dim(t, u);
                    SparseMatrix din =
                        t == 0 ? SparseMatrix(dcol, 0)
                               : cess.columns[s]->diff(t - 1).block_or_zero(u);
                    auto Hv = fplin::subquotient_homology(
                        din, cess.columns[s]->diff(t).block_or_zero(u), F);
                    int te = E1.dim(s, t, u);
                    if (Hv.dim != te) {
                        ok = false;
                        w = "dims differ at (s,t,u)=(" + std::to_string(s) + "," +
                            std::to_string(t) + "," + std::to_string(u) + ")";
                        break;
                    }
                    if (!Hv.dim) continue;
                    auto cell = E1.cells.find({s, t, u});
                    SparseMatrix ind(te, Hv.dim);
                    auto thb = out.blocks[s][t].block_or_zero(u);
                    for (int k = 0; k < Hv.dim; ++k) {
                        SparseVec img = thb.apply(Hv.reps.row(k), F);
                        SparseVec c =
                            fplin::homology_class(cell->second, img, F);
                        for (auto& [r, v] : c.terms) ind.add_to(r, k, v, F);
                    }
                    if (fplin::rank(ind, F) != Hv.dim) {
                        ok = false;
                        w = "not bijective at (s,t,u)=(" + std::to_string(s) + "," +
                            std::to_string(t) + "," + std::to_string(u) + ")";
                    }
                }
        out.report.check("theta induces a bijection on E1", ok, w);
    }
    return out;
}

// ----------------------------------------------------------- delta, beta --

namespace {

// the monomial lift of a Sigma basis monomial into Gamma (the presentation's
// canonical splitting)
Monomial sigma_lift(const ExtensionDatum& datum, int u, int i) {
    const auto* qb = datum.q.block(u);
    if (qb)
        for (int col = 0; col < datum.Gamma->space->dim(u); ++col)
            if (qb->at(i, col))
                return datum.Gamma->space->label(u, col).factors[0];
    throw fplin::MathError("sigma_lift: no preimage monomial");
}

int word_grade(const ExtensionDatum& datum, const Label& l, int mf, int n) {
    int cnt = 0;
    for (int k = 0; k < n; ++k)
        if (monomial_in_G(datum, l.factors[mf + k])) ++cnt;
    return cnt;
}

}  // namespace

E0Column build_e0_column(const ExtensionDatum& datum, SpaceRef coeff_space,
                         const GradedMap& psi_sigma, int s, int n_max) {
    const PrimeField& F = datum.Gamma->F;
    E0Column out;
    out.s = s;
    out.coeff = coeff_space;
    out.n_min = s;
    int mf = datum.M_right.space->factor_count();
    int cf = coeff_space->factor_count();

    // full word spaces filtered to words with exactly s slots in G
    std::vector<SpaceRef> full;
    std::vector<graded::GradedSub> subs;
    for (int n = s; n <= n_max; ++n) {
        std::vector<SpaceRef> fs;
        fs.push_back(datum.M_right.space);
        for (int i = 0; i < n; ++i) fs.push_back(datum.Gamma->space);
        fs.push_back(coeff_space);
        SpaceRef f = graded::tensor(fs);
        std::map<int, Subspace> sel;
        for (int u = 0; u <= datum.Gamma->D; ++u) {
            int dd = f->dim(u);
            if (!dd) continue;
            std::vector<SparseVec> rows;
            for (int i = 0; i < dd; ++i)
                if (word_grade(datum, f->label(u, i), mf, n) == s)
                    rows.push_back(fplin::unit_vec(i));
            if (!rows.empty())
                sel[u] = Subspace::span(
                    SparseMatrix::from_rows(dd, std::move(rows)), F);
        }
        full.push_back(f);
        subs.push_back(graded::make_sub(f, std::move(sel)));
        out.terms.push_back(subs.back().space);
    }

    // differential: psi_M, Delta at slots, Sigma-coaction of the coefficient
    // with the monomial lift into the last slot, projected to grade s
    for (int n = s; n < n_max; ++n) {
        SpaceRef src = out.terms[n - s];
        SpaceRef tgt = out.terms[n - s + 1];
        GradedMap d = graded::zero_map(src, tgt);
        for (int u = 0; u <= datum.Gamma->D; ++u) {
            int sd = src->dim(u);
            if (!sd || !tgt->dim(u)) continue;
            SparseMatrix block(tgt->dim(u), sd);
            for (int col = 0; col < sd; ++col) {
                const Label& l = src->label(u, col);
                Label mpart{std::vector<Monomial>(l.factors.begin(),
                                                  l.factors.begin() + mf)};
                Label cpart{std::vector<Monomial>(l.factors.end() - cf,
                                                  l.factors.end())};
                std::vector<Monomial> slots(l.factors.begin() + mf,
                                            l.factors.end() - cf);
                int um = datum.M_right.space->label_degree(mpart);
                int im = datum.M_right.space->index_of(um, mpart);
                int uc = coeff_space->label_degree(cpart);
                int ic = coeff_space->index_of(uc, cpart);

                auto emit = [&](Scalar c, const Label& ml,
                                const std::vector<Monomial>& ns, const Label& cl) {
                    Label outl;
                    for (auto& g : ml.factors) outl.factors.push_back(g);
                    for (auto& g : ns) outl.factors.push_back(g);
                    for (auto& g : cl.factors) outl.factors.push_back(g);
                    int row = tgt->index_of(u, outl);
                    if (row >= 0) block.add_to(row, col, c, F);
                };
                for (auto& t : hopf::coaction_terms(datum.M_right, um, im)) {
                    std::vector<Monomial> ns{t.g};
                    for (auto& g : slots) ns.push_back(g);
                    emit(t.coef, datum.M_right.space->label(t.u2, t.i2), ns, cpart);
                }
                for (int i = 1; i <= n; ++i)
                    for (auto& t : datum.Gamma->delta(slots[i - 1])) {
                        std::vector<Monomial> ns;
                        for (int k = 0; k < i - 1; ++k) ns.push_back(slots[k]);
                        ns.push_back(t.left);
                        ns.push_back(t.right);
                        for (int k = i; k < n; ++k) ns.push_back(slots[k]);
                        Scalar c = (i % 2) ? F.neg(t.coef) : t.coef;
                        emit(c, mpart, ns, cpart);
                    }
                // coefficient Sigma-coaction, lifted monomially
                const auto* pb = psi_sigma.block(uc);
                if (pb) {
                    SpaceRef ptgt = psi_sigma.target;  // Sigma (x) coeff
                    for (int r = 0; r < pb->rows(); ++r) {
                        Scalar v = pb->at(r, ic);
                        if (!v) continue;
                        const Label& pl = ptgt->label(uc, r);
                        const Monomial& sig = pl.factors[0];
                        Label crest{std::vector<Monomial>(pl.factors.begin() + 1,
                                                          pl.factors.end())};
                        int us = sig.degree(*datum.Sigma->table);
                        int is = datum.Sigma->space->index_of(us, Label{{sig}});
                        Monomial lift = sigma_lift(datum, us, is);
                        std::vector<Monomial> ns = slots;
                        ns.push_back(lift);
                        Scalar c = ((n + 1) % 2) ? F.neg(v) : v;
                        emit(c, mpart, ns, crest);
                    }
                }
            }
            if (!block.is_zero()) d.set_block(u, std::move(block));
        }
        out.d.push_back(std::move(d));
    }
    return out;
}

namespace {

// chain map up to a per-length sign: find eps_n in {+1,-1} with
// f d = eps_n d f out of length n; empty result means failure.
bool chain_map_up_to_sign(const std::vector<GradedMap>& f_per_n,
                          const E0Column& src, const E0Column& tgt, int shift,
                          const PrimeField& F, std::string& witness) {
    for (int k = 0; k + 1 < static_cast<int>(src.terms.size()); ++k) {
        if (k + shift + 1 >= static_cast<int>(tgt.d.size()) + 1) break;
        auto lhs = graded::compose(f_per_n[k + 1], src.d[k], F);
        auto rhs = graded::compose(tgt.d[k + shift], f_per_n[k], F);
        if (!graded::map_equal(lhs, rhs) &&
            !graded::map_equal(lhs, graded::map_scale(rhs, F.reduce(-1), F))) {
            witness = "length index " + std::to_string(k);
            return false;
        }
    }
    return true;
}

fplin::Homology column_homology(const E0Column& col, int k, int u,
                                const PrimeField& F) {
    int dd = col.terms[k]->dim(u);
    SparseMatrix din = k == 0 ? SparseMatrix(dd, 0)
                              : col.d[k - 1].block_or_zero(u);
    SparseMatrix dout = k < static_cast<int>(col.d.size())
                            ? col.d[k].block_or_zero(u)
                            : SparseMatrix(0, dd);
    return fplin::subquotient_homology(din, dout, F);
}

}  // namespace

DeltaBetaResult delta_beta(const ExtensionDatum& datum, int s, int n_max) {
    const PrimeField& F = datum.Gamma->F;
    DeltaBetaResult out;
    out.report.subject = "delta/beta comparison at s = " + std::to_string(s) +
                         " for " + datum.name;
    if (s < 1) throw fplin::MathError("delta_beta: s >= 1");

    // source column: coefficient G with its left Sigma-coaction
    Comodule Gleft = hopf::left_part(datum.G.G);
    E0Column colG =
        build_e0_column(datum, Gleft.space, Gleft.psi, s - 1, n_max);
    // target column: coefficient Sigma itself
    Comodule sreg = hopf::regular_comodule(datum.Sigma, true);
    E0Column colS = build_e0_column(datum, sreg.space, sreg.psi, s, n_max);

    // delta: m[a|...]g -> sum m[a|...|g']g'' via the right Sigma-coaction of G
    int mf = datum.M_right.space->factor_count();
    std::vector<GradedMap> delta_maps;
    Comodule Gright = hopf::right_part(datum.G.G);
    for (int k = 0; k + s - 1 <= n_max; ++k) {
        int n = k + s - 1;  // word length in the source
        if (n - (s - 1) >= static_cast<int>(colG.terms.size())) break;
        SpaceRef src = colG.terms[n - (s - 1)];
        if (n + 1 - s >= static_cast<int>(colS.terms.size())) break;
        SpaceRef tgt = colS.terms[n + 1 - s];
        GradedMap dl = graded::zero_map(src, tgt);
        for (int u = 0; u <= datum.Gamma->D; ++u) {
            int sd = src->dim(u);
            if (!sd || !tgt->dim(u)) continue;
            SparseMatrix block(tgt->dim(u), sd);
            for (int col = 0; col < sd; ++col) {
                const Label& l = src->label(u, col);
                Label gpart{std::vector<Monomial>(l.factors.end() - 1,
                                                  l.factors.end())};
                int ug = Gleft.space->label_degree(gpart);
                int ig = Gleft.space->index_of(ug, gpart);
                // right coaction G -> G (x) Sigma
                for (auto& t : hopf::coaction_terms(Gright, ug, ig)) {
                    // t: (coef, sigma part g'', G part g')
                    const Label& gl = Gright.space->label(t.u2, t.i2);
                    Label outl{std::vector<Monomial>(l.factors.begin(),
                                                     l.factors.end() - 1)};
                    outl.factors.push_back(gl.factors[0]);  // g' as Gamma slot
                    outl.factors.push_back(t.g);            // g'' as Sigma coeff
                    int row = tgt->index_of(u, outl);
                    if (row >= 0) block.add_to(row, col, t.coef, F);
                }
            }
            if (!block.is_zero()) dl.set_block(u, std::move(block));
        }
        delta_maps.push_back(std::move(dl));
    }

    {
        std::string w;
        bool ok = chain_map_up_to_sign(delta_maps, colG, colS, 0, F, w);
        out.report.check("delta is a chain map (up to the boundary sign)", ok, w);
    }
    // homology isomorphism column by column (word lengths where both columns
    // still carry their honest outgoing differential)
    {
        bool ok = true;
        std::string w;
        for (int k = 0; k + 1 < static_cast<int>(colS.terms.size()) && ok; ++k)
            for (int u = 0; u <= datum.Gamma->D && ok; ++u) {
                auto Hs = column_homology(colG, k, u, F);
                auto Ht = column_homology(colS, k, u, F);
                if (Hs.dim != Ht.dim) {
                    ok = false;
                    w = "dims differ at word length " +
                        std::to_string(k + s - 1) + ", degree " + std::to_string(u);
                    break;
                }
                if (!Hs.dim) continue;
                SparseMatrix ind(Ht.dim, Hs.dim);
                auto db = delta_maps[k].block_or_zero(u);
                for (int j = 0; j < Hs.dim; ++j) {
                    SparseVec img = db.apply(Hs.reps.row(j), F);
                    SparseVec c = fplin::homology_class(Ht, img, F);
                    for (auto& [r, v] : c.terms) ind.add_to(r, j, v, F);
                }
                if (fplin::rank(ind, F) != Hs.dim) {
                    ok = false;
                    w = "induced map not bijective at length " +
                        std::to_string(k + s - 1) + ", degree " + std::to_string(u);
                }
            }
        out.report.check("delta induces homology isomorphisms", ok, w);
    }

    // ---- diagram (5.2) ----
    // Y' = G(s) box_Sigma N with its flat inclusion into G^{(x)s} (x) N
    Comodule N_sigma = hopf::induced_along_quotient(datum.N_left, datum.Sigma,
                                                    datum.q);
    std::vector<hopf::BiComodule> chain;
    for (int i = 0; i < s; ++i) chain.push_back(datum.G.G);
    chain.push_back(hopf::as_bicomodule(N_sigma));
    auto Y = hopf::cotensor_chain(chain, datum.Sigma);
    Comodule Yleft = hopf::left_part(Y.self);

    // Z = Gamma box G(s) box N and the restricted iterated shear
    auto ns = shear::shear_normalized_to_G(datum.Gamma, datum.Sigma, datum.q,
                                           datum.Phi, datum.G, datum.N_left, s);
    out.report.check("iterated shear restricts (appendix lemma)",
                     ns.report.all_passed(), ns.report.first_failure());
    if (!ns.report.all_passed()) return out;

    // lambda: Z -> W_s, inverse of ns.map degreewise
    // and the cotensor chain Z with its own flat inclusion
    std::vector<hopf::BiComodule> zchain;
    zchain.push_back(
        hopf::gamma_sigma_bicomodule(datum.Gamma, datum.Sigma, datum.q));
    for (int i = 0; i < s; ++i) zchain.push_back(datum.G.G);
    zchain.push_back(hopf::as_bicomodule(N_sigma));
    auto Z = hopf::cotensor_chain(zchain, datum.Sigma);
    Comodule Zleft = hopf::left_part(Z.self);

    GradedMap lambda = graded::zero_map(Zleft.space, nullptr);
    {
        for (int u = 0; u <= datum.Gamma->D; ++u) {
            int zd = Zleft.space->dim(u);
            if (!zd) continue;
            auto b = ns.map.block_or_zero(u);  // W_s -> Z: square, invertible
            if (b.rows() != zd || b.cols() != zd)
                throw fplin::MathError("delta_beta: shear block not square");
            SparseMatrix inv(zd, zd);
            for (int i = 0; i < zd; ++i) {
                auto sol = fplin::solve(b, fplin::unit_vec(i), F);
                if (!sol) throw fplin::MathError("delta_beta: shear not invertible");
                for (auto& [r, v] : sol->terms) inv.add_to(r, i, v, F);
            }
            lambda.blocks[u] = std::move(inv);
        }
    }

    // CESS column complexes with coefficients Z (top) and W_s (bottom)
    auto DD = cobar::build_DDelta(datum.Phi, datum.N_left, s + 1);
    auto Nm = cobar::normalize(DD, F);
    Comodule Ws = Nm.n_comodules[s];
    lambda.target = Ws.space;
    int t_max = n_max - s;
    auto colZ = cobar::cobar_complex(datum.Gamma, datum.M_right, Zleft,
                                     t_max + 1, false);
    auto colW = cobar::cobar_complex(datum.Gamma, datum.M_right, Ws, t_max + 1,
                                     false);

    // theta_top: X_t (x) Z -> E0^{0,*}(M, Y'): slots must avoid G; coefficient
    // contracted by T = eps (x) id through the flat inclusion of Z
    E0Column colY = build_e0_column(datum, Yleft.space, Yleft.psi, 0, t_max);
    // T: Z -> Y' in basis coordinates: solve Y-flat against unit-first terms
    GradedMap Tmap = graded::zero_map(Zleft.space, Yleft.space);
    {
        // flat inclusion of Z into Gamma (x) G^(s) (x) N ambient:
        GradedMap zflat = Z.flat_incl;
        GradedMap yflat = Y.flat_incl;
        for (int u = 0; u <= datum.Gamma->D; ++u) {
            int zd = Zleft.space->dim(u);
            if (!zd || !Yleft.space->dim(u)) continue;
            SparseMatrix block(Yleft.space->dim(u), zd);
            auto zb = zflat.block_or_zero(u);
            auto yb = yflat.block_or_zero(u);
            SpaceRef zamb = zflat.target;
            for (int i = 0; i < zd; ++i) {
                SparseVec img = zb.apply(fplin::unit_vec(i), F);
                // keep terms with unit first factor, drop that factor
                SparseVec contracted;
                for (auto& [idx, v] : img.terms) {
                    const Label& l = zamb->label(u, idx);
                    if (!l.factors[0].is_unit()) continue;
                    Label rest{std::vector<Monomial>(l.factors.begin() + 1,
                                                     l.factors.end())};
                    int ridx = yflat.target->index_of(u, rest);
                    if (ridx < 0)
                        throw fplin::MathError("delta_beta: T decode failed");
                    SparseVec t;
                    t.terms.push_back({ridx, v});
                    contracted = fplin::vec_add_scaled(contracted, t, 1, F);
                }
                auto sol = fplin::solve(yb, contracted, F);
                if (!sol)
                    throw fplin::MathError("delta_beta: T image not in Y'");
                for (auto& [r, v] : sol->terms) block.add_to(r, i, v, F);
            }
            if (!block.is_zero()) Tmap.set_block(u, std::move(block));
        }
    }

    auto theta_top = [&](int t, int u) {
        SpaceRef src = colZ->term(t);
        SpaceRef tgt = colY.terms[t];
        SparseMatrix block(tgt->dim(u), src->dim(u));
        int cfz = Zleft.space->factor_count();
        for (int col = 0; col < src->dim(u); ++col) {
            const Label& l = src->label(u, col);
            std::vector<Monomial> slots(l.factors.begin() + mf,
                                        l.factors.end() - cfz);
            bool graded0 = true;
            for (auto& g : slots)
                if (monomial_in_G(datum, g)) graded0 = false;
            if (!graded0) continue;
            Label zpart{std::vector<Monomial>(l.factors.end() - cfz,
                                              l.factors.end())};
            int uz = Zleft.space->label_degree(zpart);
            int iz = Zleft.space->index_of(uz, zpart);
            const auto* tb = Tmap.block(uz);
            if (!tb) continue;
            for (int r = 0; r < tb->rows(); ++r) {
                Scalar v = tb->at(r, iz);
                if (!v) continue;
                Label outl{std::vector<Monomial>(l.factors.begin(),
                                                 l.factors.end() - cfz)};
                for (auto& g : Yleft.space->label(uz, r).factors)
                    outl.factors.push_back(g);
                int row = tgt->index_of(u, outl);
                if (row >= 0) block.add_to(row, col, v, F);
            }
        }
        return block;
    };

    // theta_s: X_t (x) W_s -> E0^{s,*}(M, N), via the unit-first terms of the
    // shear through ns (exact-grade-s projection)
    auto idN_for_col = graded::identity_map(datum.N_left.space);
    GradedMap n_psi_sigma = graded::compose(
        graded::tensor_map({&datum.q, &idN_for_col}, F), datum.N_left.psi, F);
    E0Column colN =
        build_e0_column(datum, datum.N_left.space, n_psi_sigma, s, n_max);

    // beta: E0^{0,t}(M, Y') -> E0^{s,t+s}(M, N) by expanding the coefficient
    std::vector<GradedMap> beta_maps;
    for (int t = 0; t < static_cast<int>(colY.terms.size()); ++t) {
        if (t + s - s >= static_cast<int>(colN.terms.size())) break;
        SpaceRef src = colY.terms[t];
        SpaceRef tgt = colN.terms[t];  // word length t + s
        GradedMap b = graded::zero_map(src, tgt);
        int cfy = Yleft.space->factor_count();
        for (int u = 0; u <= datum.Gamma->D; ++u) {
            int sd = src->dim(u);
            if (!sd || !tgt->dim(u)) continue;
            SparseMatrix block(tgt->dim(u), sd);
            auto yb = Y.flat_incl.block_or_zero(u);
            (void)yb;
            for (int col = 0; col < sd; ++col) {
                const Label& l = src->label(u, col);
                Label ypart{std::vector<Monomial>(l.factors.end() - cfy,
                                                  l.factors.end())};
                int uy = Yleft.space->label_degree(ypart);
                int iy = Yleft.space->index_of(uy, ypart);
                SparseVec img =
                    Y.flat_incl.block_or_zero(uy).apply(fplin::unit_vec(iy), F);
                SpaceRef yamb = Y.flat_incl.target;  // G^(s) (x) N
                for (auto& [idx, v] : img.terms) {
                    const Label& al = yamb->label(uy, idx);
                    Label outl{std::vector<Monomial>(l.factors.begin(),
                                                     l.factors.end() - cfy)};
                    for (auto& g : al.factors) outl.factors.push_back(g);
                    int row = tgt->index_of(u, outl);
                    if (row >= 0) block.add_to(row, col, v, F);
                }
            }
            if (!block.is_zero()) b.set_block(u, std::move(block));
        }
        beta_maps.push_back(std::move(b));
    }

    // (5.2): beta . theta_top = theta_s . (id (x) lambda) exactly
    {
        bool ok = true;
        std::string w;
        // theta_s in the cofree coordinates of colW
        // reuse the production theta machinery: build a one-column CESS-like
        // theta by the same unit-first shear expansion
        // flat W inclusion and shear for this s:
        std::vector<SpaceRef> ambf;
        for (int i = 0; i <= s; ++i) ambf.push_back(datum.Gamma->space);
        ambf.push_back(datum.N_left.space);
        SpaceRef amb = graded::tensor(ambf);
        GradedMap flatW;
        {
            std::vector<const GradedMap*> maps;
            GradedMap phi_incl = datum.Phi.sub.inclusion(F);
            auto idN = graded::identity_map(datum.N_left.space);
            for (int i = 0; i <= s; ++i) maps.push_back(&phi_incl);
            maps.push_back(&idN);
            GradedMap level_incl = graded::tensor_map(maps, F);
            hopf::reanchor(level_incl, DD.levels[s], amb);
            flatW = graded::compose(level_incl, Nm.n_sub[s].inclusion(F), F);
        }
        auto Sfull = shear::iterated_shear(datum.N_left, s + 1);
        hopf::reanchor(Sfull.map, amb, amb);
        int nf = datum.N_left.space->factor_count();

        for (int t = 0; t < static_cast<int>(beta_maps.size()) && ok; ++t) {
            for (int u = 0; u <= datum.Gamma->D && ok; ++u) {
                int sd = colZ->term(t)->dim(u);
                if (!sd) continue;
                // lhs: beta . theta_top
                auto lhs = beta_maps[t].block_or_zero(u).mul(theta_top(t, u), F);
                // rhs: theta_s . (id (x) lambda)
                // id (x) lambda: colZ.term(t) -> colW.term(t)
                SparseMatrix idl(colW->term(t)->dim(u), sd);
                int cfz = Zleft.space->factor_count();
                int cfw = Ws.space->factor_count();
                for (int col = 0; col < sd; ++col) {
                    const Label& l = colZ->term(t)->label(u, col);
                    Label zpart{std::vector<Monomial>(l.factors.end() - cfz,
                                                      l.factors.end())};
                    int uz = Zleft.space->label_degree(zpart);
                    int iz = Zleft.space->index_of(uz, zpart);
                    const auto* lb = lambda.block(uz);
                    if (!lb) continue;
                    for (int r = 0; r < lb->rows(); ++r) {
                        Scalar v = lb->at(r, iz);
                        if (!v) continue;
                        Label outl{std::vector<Monomial>(
                            l.factors.begin(), l.factors.end() - cfz)};
                        for (auto& g : Ws.space->label(uz, r).factors)
                            outl.factors.push_back(g);
                        int row = colW->term(t)->index_of(u, outl);
                        if (row >= 0) idl.add_to(row, col, v, F);
                    }
                }
                // theta_s block: colW.term(t) -> grade-s words of length t+s
                SparseMatrix th(colN.terms[t]->dim(u), colW->term(t)->dim(u));
                for (int col = 0; col < colW->term(t)->dim(u); ++col) {
                    const Label& l = colW->term(t)->label(u, col);
                    Label wpart{std::vector<Monomial>(l.factors.end() - cfw,
                                                      l.factors.end())};
                    int uw = Ws.space->label_degree(wpart);
                    int iw = Ws.space->index_of(uw, wpart);
                    SparseVec img = Sfull.map.block_or_zero(uw).apply(
                        flatW.block_or_zero(uw).apply(fplin::unit_vec(iw), F), F);
                    for (auto& [idx, v] : img.terms) {
                        const Label& al = amb->label(uw, idx);
                        if (!al.factors[0].is_unit()) continue;
                        Label outl{std::vector<Monomial>(
                            l.factors.begin(), l.factors.end() - cfw)};
                        for (int k = 1; k <= s; ++k)
                            outl.factors.push_back(al.factors[k]);
                        for (auto& g :
                             std::vector<Monomial>(al.factors.end() - nf,
                                                   al.factors.end()))
                            outl.factors.push_back(g);
                        int row = colN.terms[t]->index_of(u, outl);
                        if (row >= 0) th.add_to(row, col, v, F);
                    }
                }
                auto rhs = th.mul(idl, F);
                if (!(lhs == rhs)) {
                    ok = false;
                    w = "t=" + std::to_string(t) + ", u=" + std::to_string(u);
                }
            }
        }
        out.report.check("diagram (5.2) commutes", ok, w);
    }
    return out;
}

Report e0_sigma_dependence(const ExtensionDatum& datum, const Comodule& N,
                           const GradedMap& raw_gamma_coaction, int s, int n_max) {
    const PrimeField& F = datum.Gamma->F;
    Report rep;
    rep.subject = "E0 depends only on the Sigma-coaction (s = " +
                  std::to_string(s) + ")";
    // honest: grade-s part of the cobar differential built from the raw
    // Gamma-coaction; Sigma-only: build_e0_column from (q x id) raw
    auto idN = graded::identity_map(N.space);
    GradedMap qpsi = graded::compose(
        graded::tensor_map({&datum.q, &idN}, F), raw_gamma_coaction, F);
    E0Column sigma_col = build_e0_column(datum, N.space, qpsi, s, n_max);

    // honest column: same builder but with the full Gamma coaction, keeping
    // grade-s outputs (terms that raise the G-count are dropped by grading)
    E0Column honest = sigma_col;  // same chain groups
    {
        int mf = datum.M_right.space->factor_count();
        int cf = N.space->factor_count();
        for (int k = 0; k + 1 < static_cast<int>(sigma_col.terms.size()); ++k) {
            int n = s + k;
            SpaceRef src = sigma_col.terms[k];
            SpaceRef tgt = sigma_col.terms[k + 1];
            GradedMap d = graded::zero_map(src, tgt);
            for (int u = 0; u <= datum.Gamma->D; ++u) {
                int sd = src->dim(u);
                if (!sd || !tgt->dim(u)) continue;
                SparseMatrix block(tgt->dim(u), sd);
                for (int col = 0; col < sd; ++col) {
                    const Label& l = src->label(u, col);
                    Label mpart{std::vector<Monomial>(l.factors.begin(),
                                                      l.factors.begin() + mf)};
                    Label cpart{std::vector<Monomial>(l.factors.end() - cf,
                                                      l.factors.end())};
                    std::vector<Monomial> slots(l.factors.begin() + mf,
                                                l.factors.end() - cf);
                    int um = datum.M_right.space->label_degree(mpart);
                    int im = datum.M_right.space->index_of(um, mpart);
                    int uc = N.space->label_degree(cpart);
                    int ic = N.space->index_of(uc, cpart);
                    auto emit = [&](Scalar c, const Label& ml,
                                    const std::vector<Monomial>& nsl,
                                    const Label& cl) {
                        Label outl;
                        for (auto& g : ml.factors) outl.factors.push_back(g);
                        for (auto& g : nsl) outl.factors.push_back(g);
                        for (auto& g : cl.factors) outl.factors.push_back(g);
                        int row = tgt->index_of(u, outl);
                        if (row >= 0) block.add_to(row, col, c, F);
                    };
                    for (auto& t : hopf::coaction_terms(datum.M_right, um, im)) {
                        std::vector<Monomial> nsl{t.g};
                        for (auto& g : slots) nsl.push_back(g);
                        emit(t.coef, datum.M_right.space->label(t.u2, t.i2), nsl,
                             cpart);
                    }
                    for (int i = 1; i <= n; ++i)
                        for (auto& t : datum.Gamma->delta(slots[i - 1])) {
                            std::vector<Monomial> nsl;
                            for (int kk = 0; kk < i - 1; ++kk)
                                nsl.push_back(slots[kk]);
                            nsl.push_back(t.left);
                            nsl.push_back(t.right);
                            for (int kk = i; kk < n; ++kk)
                                nsl.push_back(slots[kk]);
                            Scalar c = (i % 2) ? F.neg(t.coef) : t.coef;
                            emit(c, mpart, nsl, cpart);
                        }
                    // raw Gamma coaction on the coefficient
                    const auto* pb = raw_gamma_coaction.block(uc);
                    if (pb) {
                        SpaceRef ptgt = raw_gamma_coaction.target;
                        for (int r = 0; r < pb->rows(); ++r) {
                            Scalar v = pb->at(r, ic);
                            if (!v) continue;
                            const Label& pl = ptgt->label(uc, r);
                            const Monomial& gam = pl.factors[0];
                            Label crest{std::vector<Monomial>(
                                pl.factors.begin() + 1, pl.factors.end())};
                            std::vector<Monomial> nsl = slots;
                            nsl.push_back(gam);
                            Scalar c = ((n + 1) % 2) ? F.neg(v) : v;
                            emit(c, mpart, nsl, crest);
                        }
                    }
                }
                if (!block.is_zero()) d.set_block(u, std::move(block));
            }
            honest.d[k] = std::move(d);
        }
    }
    bool same = true;
    std::string w;
    for (std::size_t k = 0; k + 1 < sigma_col.terms.size() && same; ++k)
        if (!graded::map_equal(honest.d[k], sigma_col.d[k])) {
            same = false;
            w = "length index " + std::to_string(k);
        }
    rep.check("E0 differentials identical", same, w);
    return rep;
}

// ------------------------------------------------------------ localization --

namespace {

// multiplication by a class x in Cotor(k,k) on a Cotor table with coefficients
SparseMatrix mult_by_class(const ExtensionDatum& datum, const CotorTable& T,
                           const CotorTable& unit_table, const LocClass& x,
                           int s, int u) {
    const PrimeField& F = datum.Gamma->F;
    auto src = T.cells.find({s, u});
    auto tgt = T.cells.find({s + x.s, u + x.u});
    int sdim = src == T.cells.end() ? 0 : src->second.dim;
    int tdim = tgt == T.cells.end() ? 0 : tgt->second.dim;
    SparseMatrix m(tdim, sdim);
    if (!sdim || !tdim) return m;
    for (int k = 0; k < sdim; ++k) {
        SparseVec prod = cobar::cup(*unit_table.complex, x.s, x.u, x.rep,
                                    *T.complex, s, u, src->second.reps.row(k),
                                    *T.complex);
        if (prod.empty()) continue;
        SparseVec c = T.cls(s + x.s, u + x.u, prod);
        for (auto& [r, v] : c.terms) m.add_to(r, k, v, F);
    }
    return m;
}

}  // namespace

LocalizedChart localize_cotor(const ExtensionDatum& datum, const CotorTable& T,
                              const CotorTable& unit_table, const LocClass& x,
                              int window) {
    const PrimeField& F = datum.Gamma->F;
    LocalizedChart out;
    out.report.subject = "localization at the class in (s,u)=(" +
                         std::to_string(x.s) + "," + std::to_string(x.u) + ")";
    if (x.s <= 0 && x.u <= 0)
        throw fplin::MathError("localize: class must have positive bidegree");

    // nilpotence check within the window
    {
        SparseVec cur = x.rep;
        int cs = x.s, cu = x.u;
        while (cu + x.u <= window && cs + x.s <= unit_table.s_max) {
            SparseVec next = cobar::cup(*unit_table.complex, x.s, x.u, x.rep,
                                        *unit_table.complex, cs, cu, cur,
                                        *unit_table.complex);
            cs += x.s;
            cu += x.u;
            SparseVec c = unit_table.cls(cs, cu, next);
            if (c.empty())
                throw fplin::MathError("x nilpotent in window: power at (s,u)=(" +
                                       std::to_string(cs) + "," +
                                       std::to_string(cu) + ") vanishes");
            cur = std::move(next);
        }
    }

    // Stabilization certificate: multiplication by x out of the cell must be
    // bijective for two consecutive steps wholly inside the window; the
    // certified cell reports its stable dimension.
    std::map<std::pair<int, int>, bool> bij_cache;
    auto step_bijective = [&](int s, int u) {
        auto it = bij_cache.find({s, u});
        if (it != bij_cache.end()) return it->second;
        auto m = mult_by_class(datum, T, unit_table, x, s, u);
        bool b = (T.dim(s, u) == T.dim(s + x.s, u + x.u)) &&
                 fplin::rank(m, F) == T.dim(s, u);
        bij_cache[{s, u}] = b;
        return b;
    };
    for (int s = 0; s <= T.s_max; ++s)
        for (int u = 0; u <= window; ++u) {
            LocCell cell;
            cell.dim = T.dim(s, u);
            bool inside = (u + 2 * x.u <= window) && (s + 2 * x.s <= T.s_max);
            cell.certified = inside && step_bijective(s, u) &&
                             step_bijective(s + x.s, u + x.u);
            out.cells[{s, u}] = cell;
        }
    out.report.check("chart computed with stabilization certificates", true);
    return out;
}

LocalizedChart localize_chart(const LocalizedChart& chart, const LocClass& x,
                              int window) {
    LocalizedChart out;
    out.report.subject = "relocalization";
    for (auto& [key, cell] : chart.cells) {
        auto [s, u] = key;
        if (u > window) continue;
        LocCell c = cell;
        if (cell.certified) {
            // the stabilized multiplication is bijective from here on, so the
            // cell survives with the same stable dimension
            c.dim = cell.dim;
            c.certified = true;
        }
        out.cells[{s, u}] = c;
    }
    out.report.check("relocalized chart computed", true);
    return out;
}

LocalizedE1 localize_mpass_e1(const ExtensionDatum& datum, const MpassE1& e1,
                              const CotorTable& unit_table, const LocClass& x,
                              int window) {
    const PrimeField& F = datum.Gamma->F;
    LocalizedE1 out;
    out.report.subject = "localized MPASS E1";
    for (int s = 0; s <= e1.s_max; ++s) {
        const CotorTable& T = e1.cols[s];
        std::map<std::pair<int, int>, bool> bij_cache;
        auto step_bijective = [&](int t, int u) {
            auto it = bij_cache.find({t, u});
            if (it != bij_cache.end()) return it->second;
            auto m = mult_by_class(datum, T, unit_table, x, t, u);
            bool b = (T.dim(t, u) == T.dim(t + x.s, u + x.u)) &&
                     fplin::rank(m, F) == T.dim(t, u);
            bij_cache[{t, u}] = b;
            return b;
        };
        for (int t = 0; t <= e1.t_max; ++t)
            for (int u = 0; u <= window; ++u) {
                LocCell cell;
                cell.dim = T.dim(t, u);
                bool inside =
                    (u + 2 * x.u <= window) && (t + 2 * x.s <= e1.t_max);
                cell.certified = inside && step_bijective(t, u) &&
                                 step_bijective(t + x.s, u + x.u);
                if (cell.dim || cell.certified) out.cells[{s, t, u}] = cell;
            }
    }
    out.report.check("localized E1 computed", true);
    return out;
}

// ---------------------------------------------------------- flatness / E2 --

FlatnessResult flatness_check_and_e2(const ExtensionDatum& datum, int t_max,
                                     int window, int threads) {
    const PrimeField& F = datum.Gamma->F;
    FlatnessResult out;
    out.report.subject = "flatness of Ext(k, Phi x Phi) over Ext(k, Phi) for " +
                         datum.name;
    Comodule k_right = hopf::trivial_comodule(datum.Gamma, false);
    Comodule PhiPhi = hopf::tensor_diag(datum.Phi.com, datum.Phi.com);
    Comodule PhiPhiPhi = hopf::tensor_diag(datum.Phi.com, PhiPhi);

    auto CR = cobar::cobar_complex(datum.Gamma, k_right, datum.Phi.com, t_max + 1,
                                   true, threads);
    auto CW = cobar::cobar_complex(datum.Gamma, k_right, PhiPhi, t_max + 1, true,
                                   threads);
    auto C3 = cobar::cobar_complex(datum.Gamma, k_right, PhiPhiPhi, t_max + 1,
                                   true, threads);
    auto R = cobar::cotor_of(CR, t_max);
    auto W = cobar::cotor_of(CW, t_max);

    // mu_12: Phi (x) (Phi (x) Phi) -> Phi (x) Phi
    GradedMap mu12;
    {
        auto idPP = graded::identity_map(PhiPhi.space);
        auto idP = graded::identity_map(datum.Phi.com.space);
        GradedMap m = graded::tensor_map({&datum.Phi.product, &idP}, F);
        hopf::reanchor(m, PhiPhiPhi.space, PhiPhi.space);
        mu12 = std::move(m);
        (void)idPP;
    }

    // module action of an R class on a W class
    auto act = [&](int tr, int ur, const SparseVec& r_rep, int tw, int uw,
                   const SparseVec& w_rep) -> SparseVec {
        SparseVec prod = cobar::cup(*CR, tr, ur, r_rep, *CW, tw, uw, w_rep, *C3);
        prod = cobar::apply_coefficient_map(*C3, tr + tw, ur + uw, prod, mu12, *CW);
        return W.cls(tr + tw, ur + uw, prod);
    };

    // minimal module generators cellwise: coker of the positive R action
    std::map<std::pair<int, int>, SparseMatrix> genreps;  // class-coord rows
    for (int t = 0; t <= t_max; ++t)
        for (int u = 0; u <= window; ++u) {
            int dw = W.dim(t, u);
            if (!dw) continue;
            std::vector<SparseVec> img;
            for (int tr = 0; tr <= t; ++tr)
                for (int ur = 0; ur <= u; ++ur) {
                    if (tr == 0 && ur == 0) continue;
                    int dr = R.dim(tr, ur);
                    int dw2 = W.dim(t - tr, u - ur);
                    if (!dr || !dw2) continue;
                    auto rc = R.cells.at({tr, ur});
                    auto wc = W.cells.at({t - tr, u - ur});
                    for (int i = 0; i < dr; ++i)
                        for (int j = 0; j < dw2; ++j) {
                            SparseVec v = act(tr, ur, rc.reps.row(i), t - tr,
                                              u - ur, wc.reps.row(j));
                            if (!v.empty()) img.push_back(v);
                        }
                }
            Subspace span = Subspace::span(
                SparseMatrix::from_rows(dw, std::move(img)), F);
            auto q = fplin::quotient(Subspace::full(dw), span, F);
            if (q.reps.rows()) {
                genreps[{t, u}] = q.reps;
                out.generators[{t, u}] = q.reps.rows();
            }
        }

    // freeness: per cell, the map (+)_g R(t - tg, u - ug) -> W(t,u) is bijective
    out.flat = true;
    for (int t = 0; t <= t_max && out.flat; ++t)
        for (int u = 0; u <= window && out.flat; ++u) {
            int dw = W.dim(t, u);
            int dom = 0;
            std::vector<std::tuple<int, int, int>> cols;  // (tg, ug, gen idx)
            for (auto& [gu, reps] : genreps) {
                auto [tg, ug] = gu;
                if (tg > t || ug > u) continue;
                int dr = R.dim(t - tg, u - ug);
                dom += dr * reps.rows();
            }
            if (!dw && !dom) continue;
            SparseMatrix cmp(dw, dom);
            int colidx = 0;
            for (auto& [gu, reps] : genreps) {
                auto [tg, ug] = gu;
                if (tg > t || ug > u) continue;
                int dr = R.dim(t - tg, u - ug);
                if (!dr) continue;
                auto rc = R.cells.at({t - tg, u - ug});
                auto wcell = W.cells.at({tg, ug});
                for (int gi = 0; gi < reps.rows(); ++gi) {
                    // chain rep of the generator from its class coordinates
                    SparseVec gchain;
                    for (auto& [ci, cv] : reps.row(gi).terms)
                        gchain = fplin::vec_add_scaled(
                            gchain, wcell.reps.row(ci), cv, F);
                    for (int ri = 0; ri < dr; ++ri) {
                        SparseVec v = act(t - tg, u - ug, rc.reps.row(ri), tg, ug,
                                          gchain);
                        for (auto& [row, vv] : v.terms)
                            cmp.add_to(row, colidx, vv, F);
                        ++colidx;
                        cols.push_back({tg, ug, gi});
                    }
                }
            }
            if (dom != dw) {
                out.flat = false;
                out.obstruction = "cell (t,u)=(" + std::to_string(t) + "," +
                                  std::to_string(u) + "): free model has dim " +
                                  std::to_string(dom) + " but module has dim " +
                                  std::to_string(dw);
            } else if (fplin::rank(cmp, F) != dom) {
                out.flat = false;
                auto ker = fplin::kernel(cmp, F);
                std::ostringstream os;
                os << "relation at (t,u)=(" << t << "," << u << "):";
                if (ker.dim())
                    for (auto& [ci, cv] : ker.basis.row(0).terms) {
                        auto [tg, ug, gi] = cols[ci];
                        os << " " << static_cast<int>(cv) << "*r(" << (t - tg)
                           << "," << (u - ug) << ")*gen(" << tg << "," << ug
                           << ")#" << gi;
                    }
                out.obstruction = os.str();
            }
        }
    out.report.check("window-freeness of Ext(k,Phi x Phi) over Ext(k,Phi)",
                     out.flat, out.obstruction);
    return out;
}

Report localized_flatness(const ExtensionDatum& datum, const LocClass& x,
                          int t_max, int window) {
    const PrimeField& F = datum.Gamma->F;
    Report rep;
    rep.subject = "localized flatness for " + datum.name;
    Comodule k_right = hopf::trivial_comodule(datum.Gamma, false);
    Comodule k_left = hopf::trivial_comodule(datum.Gamma, true);
    Comodule PhiPhi = hopf::tensor_diag(datum.Phi.com, datum.Phi.com);

    auto unit_table = cobar::cotor(datum.Gamma, k_right, k_left, t_max);
    auto R = cobar::cotor(datum.Gamma, k_right, datum.Phi.com, t_max);
    auto W = cobar::cotor(datum.Gamma, k_right, PhiPhi, t_max);

    auto locR = localize_cotor(datum, R, unit_table, x, window);
    auto locW = localize_cotor(datum, W, unit_table, x, window);

    // unit action R -> W: cup with the unit class of W (coefficient map
    // Phi -> Phi (x) Phi inserting 1 on the right: phi -> phi (x) 1)
    GradedMap ins;
    {
        ins = graded::zero_map(datum.Phi.com.space, PhiPhi.space);
        for (int u = 0; u <= datum.Gamma->D; ++u) {
            int dd = datum.Phi.com.space->dim(u);
            if (!dd || !PhiPhi.space->dim(u)) continue;
            SparseMatrix b(PhiPhi.space->dim(u), dd);
            for (int i = 0; i < dd; ++i) {
                Label l = datum.Phi.com.space->label(u, i);
                for (auto& g : datum.Phi.com.space->label(0, 0).factors)
                    l.factors.push_back(g);
                int row = PhiPhi.space->index_of(u, l);
                if (row >= 0) b.add_to(row, i, 1, F);
            }
            if (!b.is_zero()) ins.set_block(u, std::move(b));
        }
    }

    bool ok = true;
    std::string w;
    for (auto& [cellkey, rc] : locR.cells) {
        auto [t, u] = cellkey;
        auto wi = locW.cells.find(cellkey);
        bool wcert = wi != locW.cells.end() && wi->second.certified;
        if (!rc.certified || !wcert) continue;
        if (rc.dim != wi->second.dim) {
            ok = false;
            w = "localized dims differ at (t,u)=(" + std::to_string(t) + "," +
                std::to_string(u) + ")";
            break;
        }
        // unit action bijective on the certified cell
        int dr = R.dim(t, u);
        if (!dr) continue;
        SparseMatrix m(W.dim(t, u), dr);
        auto rcell = R.cells.at({t, u});
        for (int i = 0; i < dr; ++i) {
            SparseVec img = cobar::apply_coefficient_map(
                *R.complex, t, u, rcell.reps.row(i), ins, *W.complex);
            SparseVec c = W.cls(t, u, img);
            for (auto& [r, v] : c.terms) m.add_to(r, i, v, F);
        }
        if (fplin::rank(m, F) != dr) {
            ok = false;
            w = "unit action not bijective at (t,u)=(" + std::to_string(t) + "," +
                std::to_string(u) + ")";
            break;
        }
    }
    rep.check("localized module is free on the unit in certified cells", ok, w);
    return rep;
}

// E2 of a collapsing conormal example equals the product pattern
Report e2_product_check(const CessResult& cess, const cobar::CotorTable& phi_cotor,
                        const cobar::CotorTable& sigma_cotor, int s_max, int t_max,
                        int window) {
    Report rep;
    rep.subject = "E2 product form";
    bool ok = true;
    std::string w;
    const Page& E2 = cess.pages.pages.size() > 2 ? cess.pages.pages[2]
                                                 : cess.pages.pages.back();
    for (int s = 0; s <= s_max && ok; ++s)
        for (int t = 0; t <= t_max && ok; ++t) {
            if (s + t >= cess.n_max) continue;
            for (int u = 0; u <= window && ok; ++u) {
                int want = 0;
                for (int u1 = 0; u1 <= u; ++u1)
                    want += phi_cotor.dim(s, u1) * sigma_cotor.dim(t, u - u1);
                int got = E2.dim(s, t, u);
                if (want != got) {
                    ok = false;
                    w = "(s,t,u)=(" + std::to_string(s) + "," + std::to_string(t) +
                        "," + std::to_string(u) + "): product " +
                        std::to_string(want) + " vs E2 " + std::to_string(got);
                }
            }
        }
    rep.check("E2 = Cotor_Phi (x) Cotor_Sigma dims", ok, w);
    return rep;
}

}  // namespace coh::specseq
