#ifndef COH_REPORT_HPP
#define COH_REPORT_HPP

#include <string>
#include <vector>

namespace coh {

// One checked identity: name, outcome, and a witness (first failing degree /
// basis element) when it fails.
struct Assertion {
    std::string name;
    bool passed = true;
    std::string witness;
};

struct Report {
    std::string subject;
    std::vector<Assertion> items;

    void check(const std::string& name, bool ok, const std::string& witness = "") {
        items.push_back({name, ok, ok ? "" : witness});
    }
    void merge(const Report& other);
    bool all_passed() const;
    std::string first_failure() const;
    std::string to_string() const;
};

// A chart table: rows (s, t, u, dim, flags) with window metadata. Bigraded
// tables (Cotor charts, localized charts) use t = 0 throughout.
struct TableRow {
    int s = 0, t = 0, u = 0, dim = 0;
    std::string flags = "-";
};

struct Table {
    std::string name;
    int D = 0;
    int certified_u = 0;
    std::vector<TableRow> rows;

    void sort_rows();
};

std::string to_tsv(const Table& t);
Table table_from_tsv(const std::string& text);
// Adams-style chart: stem u - s on the x-axis, s on the y-axis.
std::string to_svg(const Table& t);

}  // namespace coh

#endif
