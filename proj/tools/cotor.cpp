#include "coh/cli.hpp"

#include <iostream>
#include <string>

#include "CLI11.hpp"

int main(int argc, char** argv) {
    CLI::App app{
        "cotor: exact Hopf algebra cohomology, spectral sequences, and "
        "localizations over F_p"};
    app.require_subcommand(0);

    coh::cli::RunConfig cfg;
    std::string localize_spec;

    app.add_option("command", cfg.command,
                   "validate | cotor | cess | filtss | mpass | compare-e1 | "
                   "localize | chart")
        ->required();
    app.add_option("--input", cfg.input, "presentation file (or table for chart)");
    app.add_option("--example", cfg.example_name,
                   "catalog example: exterior-split | dualA-odd | P-b10 | "
                   "trunc-poly");
    app.add_option("--p", cfg.p, "prime characteristic");
    app.add_option("--gens", cfg.gens, "generator cutoff m");
    app.add_option("--max-degree", cfg.max_degree, "internal degree window D");
    app.add_option("--s-max", cfg.s_max, "homological window");
    app.add_option("--r-max", cfg.r_max, "last page to compute");
    app.add_option("--localize", localize_spec,
                   "class coordinates s,u in Cotor_Gamma(k,k)");
    app.add_option("--out", cfg.out, "output path (default: stdout)");
    app.add_option("--format", cfg.format, "tsv | svg | json")
        ->check(CLI::IsMember({"tsv", "svg", "json"}));
    app.add_option("--threads", cfg.threads, "worker threads (output-invariant)");

    CLI11_PARSE(app, argc, argv);

    if (!localize_spec.empty()) {
        auto comma = localize_spec.find(',');
        if (comma == std::string::npos) {
            std::cerr << "error: --localize expects s,u\n";
            return 3;
        }
        cfg.localize = {{std::stoi(localize_spec.substr(0, comma)),
                         std::stoi(localize_spec.substr(comma + 1))}};
    }
    return coh::cli::run(cfg, std::cout, std::cerr);
}
