// Built-in catalog of scalar Hamiltonian lambda brackets: the compatible
// pairs of the order (-5,5) classification specialized to g = 1 (so that
// F(u) = u), the Volterra coordinates (g = u), and the stretched normal
// forms.  Negative powers always follow from the positive ones by the skew
// completion a^(-s) = -S^(-s) a^(s).

#pragma once

#include <diffham/dsl.hpp>
#include <diffham/oper.hpp>

#include <string>
#include <vector>

namespace diffham {

struct CatalogEntry {
    std::string name;
    LambdaBracket bracket;
    std::string coordinates;  // free-text note on the coordinate system
    std::string provenance;

    CatalogEntry() : bracket(CycloScalar::kDefaultOrder) {}
};

namespace catalog_detail {

// Complete a bracket given in positive lambda powers only.
inline LambdaBracket skew_complete(const std::string& positive_part,
                                   unsigned order = CycloScalar::kDefaultOrder) {
    LambdaBracket b = parse_bracket(positive_part, order);
    LambdaBracket full(order);
    for (const auto& [s, a] : b.coeffs()) {
        if (s <= 0) throw MathError("skew_complete expects positive powers only");
        full.add_coeff(s, a);
        full.add_coeff(-s, -a.shifted(-s));
    }
    return full;
}

}  // namespace catalog_detail

inline std::vector<CatalogEntry> catalog_list(unsigned order = CycloScalar::kDefaultOrder) {
    using catalog_detail::skew_complete;
    std::vector<CatalogEntry> entries;
    auto put = [&](const std::string& name, const LambdaBracket& b, const std::string& coords,
                   const std::string& prov) {
        CatalogEntry e;
        e.name = name;
        e.bracket = b;
        e.coordinates = coords;
        e.provenance = prov;
        entries.push_back(e);
    };

    put("K0", skew_complete("L^1", order), "normal-form coordinates", "order (-1,1) normal form");
    for (int k = 2; k <= 5; ++k)
        put("K" + std::to_string(k) + "_1",
            skew_complete("L^" + std::to_string(k), order), "normal-form coordinates",
            "constant pair family at g = 1");

    put("K2t_1",
        skew_complete("exp(u[1])*L^2 + (exp(u[0]) + exp(u[1]))*L^1", order),
        "g = 1 coordinates", "order (-2,2) exponential bracket at g = 1");

    put("K3t_1",
        skew_complete("exp(u[1] + I*u[2])*L^3"
                      " + I*(exp(u[0] + I*u[1]) - exp(u[1] + I*u[2]))*L^2"
                      " + exp(u[0] + I*u[1])*L^1",
                      order),
        "g = 1 coordinates", "order (-3,3) exponential bracket at g = 1");

    put("Q1",
        skew_complete("exp(u[1] - u[2] + u[3])*L^4"
                      " + (exp(u[0] - u[1] + u[2]) + exp(u[1] - u[2] + u[3]))*L^3"
                      " + exp(u[0] - u[1] + u[2])*L^2",
                      order),
        "g = 1 coordinates", "order (-4,4) bracket at g = 1");

    put("Q1t",
        skew_complete("exp(EPS*u[2] + u[3])*L^5"
                      " - (EPS*exp(EPS*u[1] + u[2]) + EPS^-1*exp(EPS*u[2] + u[3]))*L^4"
                      " + (EPS^-1*exp(EPS*u[0] + u[1]) + exp(EPS*u[1] + u[2])"
                      "    + EPS*exp(EPS*u[2] + u[3]))*L^3"
                      " - (EPS*exp(EPS*u[0] + u[1]) + EPS^-1*exp(EPS*u[1] + u[2]))*L^2"
                      " + exp(EPS*u[0] + u[1])*L^1",
                      order),
        "g = 1 coordinates", "order (-5,5) bracket at g = 1, with eps a cube root of 1");

    put("volterra_K1", skew_complete("u[0]*u[1]*L^1", order), "Volterra coordinates (g = u)",
        "first Volterra structure");

    put("volterra_K2",
        skew_complete("u[0]*u[1]*u[2]*L^2 + u[0]*u[1]*(u[0] + u[1])*L^1", order),
        "Volterra coordinates (g = u)", "second Volterra structure");

    put("K0_stretch_2", skew_complete("L^2", order), "normal-form coordinates",
        "2-stretched normal form");
    put("K0_stretch_3", skew_complete("L^3", order), "normal-form coordinates",
        "3-stretched normal form");

    return entries;
}

inline CatalogEntry catalog_get(const std::string& name,
                                unsigned order = CycloScalar::kDefaultOrder) {
    for (const auto& e : catalog_list(order))
        if (e.name == name) return e;
    throw MathError("unknown catalog entry '" + name + "'");
}

}  // namespace diffham
