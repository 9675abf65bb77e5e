#include "coh/examples.hpp"

#include "coh/specseq.hpp"

namespace coh::examples {

using graded::Monomial;
using hopf::HopfBuild;
using hopf::HopfRef;

namespace {

long long ipow(long long b, int e) {
    long long r = 1;
    while (e--) r *= b;
    return r;
}

}  // namespace

HopfRef exterior_one(std::uint32_t p, const std::string& name, int degree, int D) {
    HopfBuild b;
    b.p = p;
    b.D = D;
    b.gens.push_back({name, degree, 2});
    b.middle.resize(1);
    return hopf::build_monomial_hopf(b, "E[" + name + "]");
}

HopfRef exterior_family(std::uint32_t p, int m, int D) {
    HopfBuild b;
    b.p = p;
    b.D = D;
    for (int i = 0; i <= m; ++i) {
        int deg = static_cast<int>(2 * ipow(p, i) - 1);
        b.gens.push_back({"tau" + std::to_string(i), deg, 2});
    }
    b.middle.resize(b.gens.size());
    return hopf::build_monomial_hopf(b, "E[tau0..tau" + std::to_string(m) + "]");
}

HopfRef trunc_poly(std::uint32_t p, const std::string& name, int degree, int height,
                   int D) {
    HopfBuild b;
    b.p = p;
    b.D = D;
    b.gens.push_back({name, degree, height});
    b.middle.resize(1);
    std::string hname = height == graded::kInfiniteHeight
                            ? "F" + std::to_string(p) + "[" + name + "]"
                            : "F" + std::to_string(p) + "[" + name + "]/" + name + "^" +
                                  std::to_string(height);
    return hopf::build_monomial_hopf(b, hname);
}

// Milnor coproducts:
//   Delta xi_n  = sum_{i=0..n} xi_{n-i}^{p^i} (x) xi_i
//   Delta tau_n = tau_n (x) 1 + sum_{i=0..n} xi_{n-i}^{p^i} (x) tau_i
// with xi_0 = 1. Generator indices below: xi_1..xi_m first, then tau_0..tau_m.
HopfRef dual_steenrod(std::uint32_t p, int m, int D) {
    HopfBuild b;
    b.p = p;
    b.D = D;
    for (int n = 1; n <= m; ++n)
        b.gens.push_back({"xi" + std::to_string(n),
                          static_cast<int>(2 * (ipow(p, n) - 1)),
                          graded::kInfiniteHeight});
    for (int n = 0; n <= m; ++n)
        b.gens.push_back({"tau" + std::to_string(n),
                          static_cast<int>(2 * ipow(p, n) - 1), 2});
    b.middle.resize(b.gens.size());
    auto xi = [&](int n, int e) {  // xi_n^e as a monomial; n >= 1
        return Monomial{{{n - 1, e}}};
    };
    auto tau = [&](int n) { return Monomial{{{m + n, 1}}}; };
    for (int n = 1; n <= m; ++n) {
        auto& mid = b.middle[n - 1];
        for (int i = 1; i < n; ++i)
            mid.push_back({1, xi(n - i, static_cast<int>(ipow(p, i))), xi(i, 1)});
    }
    for (int n = 0; n <= m; ++n) {
        auto& mid = b.middle[m + n];
        // middle terms: xi_{n-i}^{p^i} (x) tau_i for 0 <= i < n
        for (int i = 0; i < n; ++i)
            mid.push_back({1, xi(n - i, static_cast<int>(ipow(p, i))), tau(i)});
    }
    return hopf::build_monomial_hopf(
        b, "A(" + std::to_string(p) + ";m=" + std::to_string(m) + ")");
}

HopfRef reduced_powers(std::uint32_t p, int m, int D) {
    HopfBuild b;
    b.p = p;
    b.D = D;
    for (int n = 1; n <= m; ++n)
        b.gens.push_back({"xi" + std::to_string(n),
                          static_cast<int>(2 * (ipow(p, n) - 1)),
                          graded::kInfiniteHeight});
    b.middle.resize(b.gens.size());
    auto xi = [&](int n, int e) { return Monomial{{{n - 1, e}}}; };
    for (int n = 1; n <= m; ++n) {
        auto& mid = b.middle[n - 1];
        for (int i = 1; i < n; ++i)
            mid.push_back({1, xi(n - i, static_cast<int>(ipow(p, i))), xi(i, 1)});
    }
    return hopf::build_monomial_hopf(b, "P(" + std::to_string(p) + ")");
}

std::vector<std::string> catalog_names() {
    return {"exterior-split", "dualA-odd", "P-b10", "trunc-poly"};
}

int certified_window(const std::string& name, const CatalogParams& params) {
    long long first_omitted = -1;  // degree of the first omitted generator
    if (name == "dualA-odd")
        first_omitted = 2 * (ipow(params.p, params.m + 1) - 1);
    else if (name == "P-b10")
        first_omitted = 2 * (ipow(params.p, params.m + 1) - 1);
    // exterior-split and trunc-poly omit nothing: the algebra is complete
    if (first_omitted < 0) return params.D;
    return std::min<long long>(params.D, first_omitted - 1);
}

specseq::ExtensionDatum example(const std::string& name,
                                const CatalogParams& params) {
    int cert = certified_window(name, params);
    auto finish = [&](hopf::HopfRef Gamma,
                      const std::vector<std::pair<std::string, int>>& killed,
                      const std::string& dname) {
        auto [Sigma, q] = hopf::quotient_hopf(Gamma, killed);
        auto M = hopf::trivial_comodule(Gamma, false);
        auto N = hopf::trivial_comodule(Gamma, true);
        return specseq::make_datum(Gamma, Sigma, q, M, N, dname, cert);
    };
    if (name == "exterior-split") {
        if (params.D < 1) throw fplin::MathError("window too small");
        auto Gamma = exterior_family(params.p, params.m, params.D);
        std::vector<std::pair<std::string, int>> killed;
        for (int i = 1; i <= params.m; ++i)
            killed.push_back({"tau" + std::to_string(i), 1});
        return finish(Gamma, killed, name);
    }
    if (name == "dualA-odd") {
        if (params.p == 2) throw fplin::MathError("dualA-odd needs an odd prime");
        if (params.D < 1) throw fplin::MathError("window too small");
        auto Gamma = dual_steenrod(params.p, params.m, params.D);
        std::vector<std::pair<std::string, int>> killed;
        for (int i = 1; i <= params.m; ++i)
            killed.push_back({"xi" + std::to_string(i), 1});
        for (int i = 1; i <= params.m; ++i)
            killed.push_back({"tau" + std::to_string(i), 1});
        return finish(Gamma, killed, name);
    }
    if (name == "P-b10") {
        if (params.D < 2 * static_cast<int>(params.p - 1))
            throw fplin::MathError("window too small");
        auto Gamma = reduced_powers(params.p, params.m, params.D);
        std::vector<std::pair<std::string, int>> killed;
        killed.push_back({"xi1", 3});
        for (int i = 2; i <= params.m; ++i)
            killed.push_back({"xi" + std::to_string(i), 1});
        return finish(Gamma, killed, name);
    }
    if (name == "trunc-poly") {
        int deg = 2 * static_cast<int>(params.p - 1);
        if (params.D < deg) throw fplin::MathError("window too small");
        auto Gamma = trunc_poly(params.p, "xi", deg,
                                static_cast<int>(params.p), params.D);
        return finish(Gamma, {{"xi", 1}}, name);
    }
    throw fplin::MathError("unknown catalog example: " + name);
}

}  // namespace coh::examples
