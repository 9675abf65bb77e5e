#ifndef COH_PRESENTATION_HPP
#define COH_PRESENTATION_HPP

#include "coh/hopf.hpp"

#include <string>
#include <vector>

// Presentation files: a structured text document listing p, the degree
// window, generators (name, degree, height), coproduct formulas as formal
// sums of tensor monomials, and named quotient maps. Loading then serializing
// then loading again yields identical objects.

namespace coh::presentation {

struct QuotientSpec {
    std::string name;
    std::vector<std::pair<std::string, int>> killed;  // (generator, power)
};

struct PresentationFile {
    std::string name = "Gamma";
    hopf::HopfBuild build;
    std::vector<QuotientSpec> quotients;
};

PresentationFile parse(const std::string& text);
PresentationFile load_file(const std::string& path);
std::string serialize(const PresentationFile& pf);

}  // namespace coh::presentation

#endif
