#include "coh/report.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace coh {

void Report::merge(const Report& other) {
    for (auto& a : other.items) items.push_back(a);
}

bool Report::all_passed() const {
    for (auto& a : items)
        if (!a.passed) return false;
    return true;
}

std::string Report::first_failure() const {
    for (auto& a : items)
        if (!a.passed) return a.name + (a.witness.empty() ? "" : " (" + a.witness + ")");
    return "";
}

std::string Report::to_string() const {
    std::ostringstream os;
    os << subject << "\n";
    for (auto& a : items) {
        os << "  [" << (a.passed ? "pass" : "FAIL") << "] " << a.name;
        if (!a.passed && !a.witness.empty()) os << " -- " << a.witness;
        os << "\n";
    }
    return os.str();
}

void Table::sort_rows() {
    std::sort(rows.begin(), rows.end(), [](const TableRow& a, const TableRow& b) {
        return std::tie(a.s, a.t, a.u, a.dim, a.flags) <
               std::tie(b.s, b.t, b.u, b.dim, b.flags);
    });
}

std::string to_tsv(const Table& t) {
    std::ostringstream os;
    os << "# table " << t.name << " D=" << t.D << " certified=" << t.certified_u
       << "\n";
    os << "s\tt\tu\tdim\tflags\n";
    for (auto& r : t.rows)
        os << r.s << "\t" << r.t << "\t" << r.u << "\t" << r.dim << "\t"
           << (r.flags.empty() ? "-" : r.flags) << "\n";
    return os.str();
}

Table table_from_tsv(const std::string& text) {
    Table t;
    std::istringstream is(text);
    std::string line;
    bool saw_header = false;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            // "# table <name> D=<d> certified=<c>"
            std::istringstream ls(line);
            std::string hash, kw;
            ls >> hash >> kw >> t.name;
            std::string item;
            while (ls >> item) {
                if (item.rfind("D=", 0) == 0) t.D = std::stoi(item.substr(2));
                if (item.rfind("certified=", 0) == 0)
                    t.certified_u = std::stoi(item.substr(10));
            }
            continue;
        }
        if (!saw_header) {
            if (line != "s\tt\tu\tdim\tflags")
                throw std::runtime_error("table: bad header row");
            saw_header = true;
            continue;
        }
        TableRow r;
        std::istringstream ls(line);
        if (!(ls >> r.s >> r.t >> r.u >> r.dim >> r.flags))
            throw std::runtime_error("table: bad row: " + line);
        t.rows.push_back(r);
    }
    if (!saw_header) throw std::runtime_error("table: missing header");
    return t;
}

std::string to_svg(const Table& t) {
    int max_stem = 0, max_s = 0;
    for (auto& r : t.rows) {
        max_stem = std::max(max_stem, r.u - r.s);
        max_s = std::max(max_s, r.s);
    }
    const int cellpx = 24, margin = 40;
    int wpx = margin * 2 + (max_stem + 1) * cellpx;
    int hpx = margin * 2 + (max_s + 1) * cellpx;
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << wpx
       << "\" height=\"" << hpx << "\" viewBox=\"0 0 " << wpx << " " << hpx
       << "\">\n";
    os << "<!-- " << t.name << " D=" << t.D << " certified=" << t.certified_u
       << " ; x: stem u-s, y: s -->\n";
    os << "<rect width=\"" << wpx << "\" height=\"" << hpx
       << "\" fill=\"white\"/>\n";
    // axes
    os << "<line x1=\"" << margin << "\" y1=\"" << hpx - margin << "\" x2=\""
       << wpx - margin / 2 << "\" y2=\"" << hpx - margin
       << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << margin << "\" y1=\"" << hpx - margin << "\" x2=\""
       << margin << "\" y2=\"" << margin / 2 << "\" stroke=\"black\"/>\n";
    for (int x = 0; x <= max_stem; ++x)
        os << "<text x=\"" << margin + x * cellpx << "\" y=\"" << hpx - margin / 2
           << "\" font-size=\"10\" text-anchor=\"middle\">" << x << "</text>\n";
    for (int y = 0; y <= max_s; ++y)
        os << "<text x=\"" << margin / 2 << "\" y=\""
           << hpx - margin - y * cellpx + 3 << "\" font-size=\"10\" "
           << "text-anchor=\"middle\">" << y << "</text>\n";
    for (auto& r : t.rows) {
        if (r.dim <= 0) continue;
        int cx = margin + (r.u - r.s) * cellpx;
        int cy = hpx - margin - r.s * cellpx;
        bool unverified = r.flags.find("unverified") != std::string::npos;
        os << "<circle cx=\"" << cx << "\" cy=\"" << cy << "\" r=\"4\" fill=\""
           << (unverified ? "lightgray" : "black") << "\"/>\n";
        if (r.dim > 1)
            os << "<text x=\"" << cx + 6 << "\" y=\"" << cy - 4
               << "\" font-size=\"9\">" << r.dim << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace coh
