#include "coh/cli.hpp"

#include "coh/examples.hpp"
#include "coh/presentation.hpp"
#include "coh/specseq.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"

namespace coh::cli {

using json = nlohmann::ordered_json;
namespace sp = coh::specseq;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitMath = 2;
constexpr int kExitInput = 3;

json report_json(const Report& rep) {
    json items = json::array();
    for (auto& a : rep.items) {
        json it;
        it["name"] = a.name;
        it["status"] = a.passed ? "pass" : "fail";
        if (!a.passed && !a.witness.empty()) it["witness"] = a.witness;
        items.push_back(it);
    }
    return items;
}

json table_json(const Table& t) {
    json rows = json::array();
    for (auto& r : t.rows) {
        json row;
        row["s"] = r.s;
        row["t"] = r.t;
        row["u"] = r.u;
        row["dim"] = r.dim;
        if (r.flags != "-") row["flags"] = r.flags;
        rows.push_back(row);
    }
    return rows;
}

struct Loaded {
    sp::ExtensionDatum datum;
    int certified = 0;
};

Loaded load_datum(const RunConfig& cfg) {
    if (!cfg.example_name.empty()) {
        examples::CatalogParams params{cfg.p, cfg.gens, cfg.max_degree};
        Loaded l{examples::example(cfg.example_name, params),
                 examples::certified_window(cfg.example_name, params)};
        return l;
    }
    if (cfg.input.empty())
        throw fplin::MathError("no input: provide --example or --input");
    auto pf = presentation::load_file(cfg.input);
    auto Gamma = hopf::build_monomial_hopf(pf.build, pf.name);
    if (pf.quotients.empty())
        throw fplin::MathError("presentation declares no quotient map");
    auto [Sigma, q] = hopf::quotient_hopf(Gamma, pf.quotients[0].killed);
    auto M = hopf::trivial_comodule(Gamma, false);
    auto N = hopf::trivial_comodule(Gamma, true);
    return {sp::make_datum(Gamma, Sigma, q, M, N, pf.name, pf.build.D),
            pf.build.D};
}

void emit(const RunConfig& cfg, std::ostream& fallback, const std::string& bytes) {
    if (cfg.out.empty()) {
        fallback << bytes;
        return;
    }
    std::ofstream f(cfg.out, std::ios::binary);
    if (!f) throw fplin::MathError("cannot open output path " + cfg.out);
    f << bytes;
}

Table cotor_table(const cobar::CotorTable& T, const std::string& name, int D,
                  int certified, int window_u) {
    Table t;
    t.name = name;
    t.D = D;
    t.certified_u = certified;
    for (auto& [key, cell] : T.cells) {
        auto [s, u] = key;
        if (u > window_u || !cell.dim) continue;
        t.rows.push_back({s, 0, u, cell.dim, "-"});
    }
    t.sort_rows();
    return t;
}

Table page_table(const sp::Page& page, const std::string& name, int D,
                 int certified) {
    Table t;
    t.name = name;
    t.D = D;
    t.certified_u = certified;
    for (auto& [key, cell] : page.cells) {
        auto [s, tt, u] = key;
        if (!cell.dim) continue;
        t.rows.push_back({s, tt, u, cell.dim, "-"});
    }
    t.sort_rows();
    return t;
}

std::string render(const RunConfig& cfg, const Table& t, const json& envelope) {
    if (cfg.format == "svg") return to_svg(t);
    if (cfg.format == "json") return envelope.dump(2) + "\n";
    return to_tsv(t);
}

json window_json(const RunConfig& cfg, int certified) {
    json w;
    w["D"] = cfg.max_degree;
    w["s_max"] = cfg.s_max;
    w["r_max"] = cfg.r_max;
    w["certified_u"] = certified;
    return w;
}

int finish(const RunConfig& cfg, std::ostream& out, std::ostream& diag,
           const Report& rep, const Table& table, json envelope) {
    envelope["assertions"] = report_json(rep);
    if (!envelope.contains("flags")) envelope["flags"] = json::array();
    emit(cfg, out, render(cfg, table, envelope));
    if (!rep.all_passed()) {
        diag << "FAILED: " << rep.first_failure() << "\n";
        return kExitMath;
    }
    return kExitOk;
}

}  // namespace coh::cli::(anonymous)

int run(const RunConfig& cfg_in, std::ostream& out, std::ostream& diag) {
    RunConfig cfg = cfg_in;
    try {
        if (cfg.command == "chart") {
            std::ifstream in(cfg.input, std::ios::binary);
            if (!in) throw fplin::MathError("cannot open table " + cfg.input);
            std::ostringstream os;
            os << in.rdbuf();
            Table t = table_from_tsv(os.str());
            json envelope;
            envelope["command"] = "chart";
            envelope["window"] = {{"D", t.D}, {"certified_u", t.certified_u}};
            envelope["tables"] = {{t.name, table_json(t)}};
            envelope["assertions"] = json::array();
            emit(cfg, out, render(cfg, t, envelope));
            return kExitOk;
        }

        Loaded loaded = load_datum(cfg);
        sp::ExtensionDatum& datum = loaded.datum;
        int D = datum.Gamma->D;
        cfg.max_degree = D;
        if (cfg.s_max < 0)
            cfg.s_max = (cfg.command == "cotor" || cfg.command == "localize")
                            ? D
                            : std::min(D, 6);
        if (cfg.r_max < 0) cfg.r_max = cfg.s_max + 1;
        json envelope;
        envelope["command"] = cfg.command;
        envelope["window"] = window_json(cfg, loaded.certified);

        if (cfg.command == "validate") {
            Report rep = datum.validation;
            Table empty;
            empty.name = "validate";
            empty.D = D;
            empty.certified_u = loaded.certified;
            if (cfg.format == "json") {
                envelope["tables"] = json::object();
                return finish(cfg, out, diag, rep, empty, envelope);
            }
            emit(cfg, out, rep.to_string());
            return rep.all_passed() ? kExitOk : kExitMath;
        }

        if (cfg.command == "cotor") {
            auto kr = hopf::trivial_comodule(datum.Gamma, false);
            auto kl = hopf::trivial_comodule(datum.Gamma, true);
            auto T = cobar::cotor(datum.Gamma, kr, kl, cfg.s_max, cfg.threads);
            Table t = cotor_table(T, "cotor", D, loaded.certified, D);
            envelope["tables"] = {{"cotor", table_json(t)}};
            Report rep;
            rep.subject = "cotor";
            return finish(cfg, out, diag, rep, t, envelope);
        }

        if (cfg.command == "cess" || cfg.command == "filtss" ||
            cfg.command == "mpass") {
            Report rep = datum.validation;
            Table main_table;
            json tables = json::object();
            if (cfg.command == "cess") {
                auto cess = sp::build_cess(datum, cfg.s_max, cfg.s_max, cfg.r_max,
                                           cfg.threads);
                rep.merge(cess.report);
                for (int r = 1; r <= cfg.r_max; ++r) {
                    Table t = page_table(cess.pages.pages[r],
                                         "E" + std::to_string(r), D,
                                         loaded.certified);
                    tables["E" + std::to_string(r)] = table_json(t);
                    main_table = t;
                }
            } else if (cfg.command == "filtss") {
                auto fss = sp::build_filtss(datum, cfg.s_max, cfg.r_max,
                                            cfg.threads);
                rep.merge(fss.report);
                for (int r = 0; r <= cfg.r_max; ++r) {
                    Table t = page_table(fss.pages.pages[r],
                                         "E" + std::to_string(r), D,
                                         loaded.certified);
                    tables["E" + std::to_string(r)] = table_json(t);
                    main_table = t;
                }
            } else {
                auto mp = sp::build_mpass_e1(datum, cfg.s_max, cfg.s_max,
                                             cfg.threads);
                rep.merge(mp.report);
                Table t;
                t.name = "E1";
                t.D = D;
                t.certified_u = loaded.certified;
                for (int s = 0; s <= mp.s_max; ++s)
                    for (int tt = 0; tt <= mp.t_max; ++tt)
                        for (int u = 0; u <= D; ++u)
                            if (mp.dim(s, tt, u))
                                t.rows.push_back({s, tt, u, mp.dim(s, tt, u), "-"});
                t.sort_rows();
                tables["E1"] = table_json(t);
                main_table = t;
            }
            envelope["tables"] = tables;
            return finish(cfg, out, diag, rep, main_table, envelope);
        }

        if (cfg.command == "compare-e1") {
            int n_max = cfg.s_max;
            Report rep = datum.validation;
            auto cess = sp::build_cess(datum, n_max, n_max, 1, cfg.threads);
            auto fss = sp::build_filtss(datum, n_max, 1, cfg.threads);
            auto mp = sp::build_mpass_e1(datum, n_max - 1, n_max - 1, cfg.threads);
            rep.merge(cess.report);
            rep.merge(fss.report);
            rep.merge(mp.report);
            bool dims_ok = true;
            std::string w;
            for (int s = 0; s < n_max && dims_ok; ++s)
                for (int t = 0; s + t < n_max && dims_ok; ++t)
                    for (int u = 0; u <= D && dims_ok; ++u) {
                        int a = cess.e1_dim(s, t, u);
                        int b = fss.pages.pages[1].dim(s, t, u);
                        int c = (t < n_max - 1 && s < n_max - 1)
                                    ? mp.dim(s, t, u)
                                    : a;
                        if (a != b || a != c) {
                            dims_ok = false;
                            w = "(s,t,u)=(" + std::to_string(s) + "," +
                                std::to_string(t) + "," + std::to_string(u) +
                                "): CESS " + std::to_string(a) + ", filtration " +
                                std::to_string(b) + ", MPASS " + std::to_string(c);
                        }
                    }
            rep.check("CESS, MPASS and filtration E1 tables are equal", dims_ok, w);
            auto th = sp::theta(datum, cess, fss);
            rep.merge(th.report);
            // d1 rank agreement
            {
                bool ok = true;
                std::string wd;
                for (auto& [key, m] : mp.d1) {
                    auto [s, t, u] = key;
                    auto it = cess.pages.pages[1].d.find(key);
                    int cr = it == cess.pages.pages[1].d.end()
                                 ? 0
                                 : fplin::rank(it->second, datum.Gamma->F);
                    if (fplin::rank(m, datum.Gamma->F) != cr) {
                        ok = false;
                        wd = "(s,t,u)=(" + std::to_string(s) + "," +
                             std::to_string(t) + "," + std::to_string(u) + ")";
                        break;
                    }
                }
                rep.check("MPASS d1 and CESS d1 ranks agree per bidegree", ok, wd);
            }
            Table t = page_table(fss.pages.pages[1], "E1", D, loaded.certified);
            envelope["tables"] = {{"E1", table_json(t)}};
            if (rep.all_passed())
                diag << "all E1 tables equal; theta bijective\n";
            if (cfg.format == "json")
                return finish(cfg, out, diag, rep, t, envelope);
            std::string body = rep.to_string() + to_tsv(t);
            emit(cfg, out, body);
            return rep.all_passed() ? kExitOk : kExitMath;
        }

        if (cfg.command == "localize") {
            if (!cfg.localize)
                throw fplin::MathError("localize requires --localize s,u");
            auto [ls, lu] = *cfg.localize;
            auto kr = hopf::trivial_comodule(datum.Gamma, false);
            auto kl = hopf::trivial_comodule(datum.Gamma, true);
            auto T = cobar::cotor(datum.Gamma, kr, kl, cfg.s_max, cfg.threads);
            auto cell = T.cells.find({ls, lu});
            if (cell == T.cells.end() || !cell->second.dim)
                throw fplin::MathError(
                    "localization class must exist in the computed table");
            sp::LocClass x{ls, lu, cell->second.reps.row(0)};
            auto chart = sp::localize_cotor(datum, T, T, x, loaded.certified);
            Table t;
            t.name = "localized";
            t.D = D;
            t.certified_u = loaded.certified;
            for (auto& [key, c] : chart.cells) {
                auto [s, u] = key;
                // report nonzero certified values; flag unverifiable cells;
                // certified zeros are the chart's background
                if (c.certified && !c.dim) continue;
                t.rows.push_back(
                    {s, 0, u, c.dim, c.certified ? "certified" : "unverified"});
            }
            t.sort_rows();
            envelope["tables"] = {{"localized", table_json(t)}};
            envelope["flags"] = json::array(
                {"localize=" + std::to_string(ls) + "," + std::to_string(lu)});
            return finish(cfg, out, diag, chart.report, t, envelope);
        }

        throw fplin::MathError("unknown command: " + cfg.command);
    } catch (const fplin::MathError& e) {
        json err;
        err["command"] = cfg.command;
        err["error"] = e.what();
        std::string msg = std::string(e.what());
        bool input_error = msg.find("nilpotent") == std::string::npos;
        diag << "error: " << e.what() << "\n";
        if (cfg.format == "json") out << err.dump(2) << "\n";
        return input_error ? kExitInput : kExitMath;
    }
}

}  // namespace coh::cli
