#include "coh/presentation.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace coh::presentation {

using graded::GenTable;
using graded::kInfiniteHeight;
using graded::Monomial;

namespace {

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream is(s);
    std::vector<std::string> out;
    std::string w;
    while (is >> w) out.push_back(w);
    return out;
}

std::string trim(const std::string& s) {
    auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

}  // namespace

PresentationFile parse(const std::string& text) {
    PresentationFile pf;
    std::istringstream is(text);
    std::string line;
    bool header = false;
    GenTable table;
    struct PendingDelta {
        std::string gen;
        std::string rhs;
    };
    std::vector<PendingDelta> deltas;

    while (std::getline(is, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        auto words = split_ws(line);
        if (!header) {
            if (words.size() != 2 || words[0] != "cohopf" || words[1] != "1")
                throw fplin::MathError("presentation: expected header 'cohopf 1'");
            header = true;
            continue;
        }
        if (words[0] == "name" && words.size() == 2) {
            pf.name = words[1];
        } else if (words[0] == "p" && words.size() == 2) {
            pf.build.p = static_cast<std::uint32_t>(std::stoul(words[1]));
        } else if (words[0] == "D" && words.size() == 2) {
            pf.build.D = std::stoi(words[1]);
        } else if (words[0] == "gen" && words.size() == 4) {
            graded::Generator g;
            g.name = words[1];
            g.degree = std::stoi(words[2]);
            g.height = words[3] == "inf" ? kInfiniteHeight : std::stoi(words[3]);
            if (table.find(g.name) >= 0)
                throw fplin::MathError("presentation: duplicate generator " + g.name);
            table.gens.push_back(g);
        } else if (words[0] == "delta") {
            auto eq = line.find('=');
            if (eq == std::string::npos)
                throw fplin::MathError("presentation: delta line needs '='");
            auto head = split_ws(line.substr(0, eq));
            if (head.size() != 2)
                throw fplin::MathError("presentation: delta line needs a generator");
            deltas.push_back({head[1], trim(line.substr(eq + 1))});
        } else if (words[0] == "quotient") {
            auto eq = line.find('=');
            if (eq == std::string::npos)
                throw fplin::MathError("presentation: quotient line needs '='");
            auto head = split_ws(line.substr(0, eq));
            if (head.size() != 2)
                throw fplin::MathError("presentation: quotient line needs a name");
            QuotientSpec qs;
            qs.name = head[1];
            std::string rhs = trim(line.substr(eq + 1));
            auto kw = split_ws(rhs);
            if (kw.empty() || kw[0] != "kill")
                throw fplin::MathError("presentation: quotient expects 'kill ...'");
            for (std::size_t i = 1; i < kw.size(); ++i) {
                std::string item = kw[i];
                if (!item.empty() && item.back() == ',') item.pop_back();
                if (item.empty()) continue;
                int power = 1;
                auto caret = item.find('^');
                std::string gname = item;
                if (caret != std::string::npos) {
                    gname = item.substr(0, caret);
                    power = std::stoi(item.substr(caret + 1));
                }
                if (table.find(gname) < 0)
                    throw fplin::MathError("presentation: unknown generator " + gname);
                qs.killed.push_back({gname, power});
            }
            pf.quotients.push_back(std::move(qs));
        } else {
            throw fplin::MathError("presentation: cannot parse line: " + line);
        }
    }
    if (!header) throw fplin::MathError("presentation: missing header");
    pf.build.gens = table.gens;
    pf.build.middle.resize(table.gens.size());

    for (auto& pd : deltas) {
        int g = table.find(pd.gen);
        if (g < 0)
            throw fplin::MathError("presentation: delta for unknown generator " +
                                   pd.gen);
        if (pd.rhs.empty()) continue;  // primitive
        // terms separated by '+': "<coef> <mon> (x) <mon>" with coef optional
        std::vector<std::string> terms;
        std::string cur;
        std::istringstream ts(pd.rhs);
        std::string tok;
        while (ts >> tok) {
            if (tok == "+") {
                terms.push_back(cur);
                cur.clear();
            } else {
                cur += (cur.empty() ? "" : " ") + tok;
            }
        }
        if (!cur.empty()) terms.push_back(cur);
        for (auto& t : terms) {
            auto tw = split_ws(t);
            std::int64_t coef = 1;
            std::size_t pos = 0;
            if (!tw.empty() && (std::isdigit(tw[0][0]) || tw[0][0] == '-')) {
                coef = std::stoll(tw[0]);
                pos = 1;
            }
            if (pos + 3 != tw.size() || tw[pos + 1] != "(x)")
                throw fplin::MathError("presentation: malformed coproduct term '" +
                                       t + "'");
            Monomial l = graded::parse_monomial(table, tw[pos]);
            Monomial r = graded::parse_monomial(table, tw[pos + 2]);
            pf.build.middle[g].push_back({coef, l, r});
        }
    }
    return pf;
}

PresentationFile load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw fplin::MathError("cannot open presentation file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return parse(os.str());
}

std::string serialize(const PresentationFile& pf) {
    GenTable table;
    table.gens = pf.build.gens;
    std::ostringstream os;
    os << "cohopf 1\n";
    os << "name " << pf.name << "\n";
    os << "p " << pf.build.p << "\n";
    os << "D " << pf.build.D << "\n";
    for (auto& g : pf.build.gens) {
        os << "gen " << g.name << " " << g.degree << " ";
        if (g.height == kInfiniteHeight)
            os << "inf";
        else
            os << g.height;
        os << "\n";
    }
    for (std::size_t g = 0; g < pf.build.gens.size(); ++g) {
        os << "delta " << pf.build.gens[g].name << " =";
        // canonical order: by (left, right) labels
        auto terms = g < pf.build.middle.size() ? pf.build.middle[g]
                                                : decltype(pf.build.middle)::value_type{};
        std::sort(terms.begin(), terms.end(), [&](const auto& a, const auto& b) {
            return std::tie(std::get<1>(a), std::get<2>(a)) <
                   std::tie(std::get<1>(b), std::get<2>(b));
        });
        bool first = true;
        for (auto& [c, l, r] : terms) {
            std::int64_t cc = c % static_cast<std::int64_t>(pf.build.p);
            if (cc < 0) cc += pf.build.p;
            if (!cc) continue;
            os << (first ? " " : " + ") << cc << " "
               << graded::monomial_string(table, l) << " (x) "
               << graded::monomial_string(table, r);
            first = false;
        }
        os << "\n";
    }
    for (auto& qs : pf.quotients) {
        os << "quotient " << qs.name << " = kill";
        for (std::size_t i = 0; i < qs.killed.size(); ++i) {
            os << " " << qs.killed[i].first;
            if (qs.killed[i].second != 1) os << "^" << qs.killed[i].second;
            if (i + 1 < qs.killed.size()) os << ",";
        }
        os << "\n";
    }
    return os.str();
}

}  // namespace coh::presentation
