#ifndef COH_CLI_HPP
#define COH_CLI_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

// Command-line driver: load presentations or catalog examples, run
// validations and computations, emit charts and machine-readable reports.
// Exit codes: 0 = all assertions passed; 2 = a mathematical assertion failed
// (with witness); 3 = input/validation error.

namespace coh::cli {

struct RunConfig {
    std::string command;
    std::string input;         // presentation file, or a saved table for `chart`
    std::string example_name;  // catalog entry
    std::uint32_t p = 3;
    int gens = 1;       // generator cutoff m
    int max_degree = 14;
    int s_max = -1;     // default: command-dependent
    int r_max = -1;
    std::optional<std::pair<int, int>> localize;  // class coordinates (s, u)
    std::string out;            // output path; empty = the provided stream
    std::string format = "tsv";  // tsv | svg | json
    int threads = 1;
};

int run(const RunConfig& cfg, std::ostream& out_stream, std::ostream& diag);

}  // namespace coh::cli

#endif
