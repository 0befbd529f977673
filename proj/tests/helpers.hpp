// Shared random generators for the test suites.  Everything is driven by an
// explicitly seeded mt19937 so failures are reproducible.

#pragma once

#include <diffham/diffham.hpp>

#include <random>
#include <vector>

namespace testgen {

using namespace diffham;

inline CycloScalar random_rational(std::mt19937& rng, unsigned order = 12) {
    std::uniform_int_distribution<int> num(-4, 4);
    std::uniform_int_distribution<int> den(1, 3);
    int n = num(rng);
    if (n == 0) n = 1;
    return CycloScalar(Rational(n, den(rng)), order);
}

// nonzero scalar, occasionally with an I or EPS component
inline CycloScalar random_scalar(std::mt19937& rng, unsigned order = 12) {
    CycloScalar c = random_rational(rng, order);
    std::uniform_int_distribution<int> kind(0, 3);
    switch (kind(rng)) {
        case 1: c = c * CycloScalar::i(order); break;
        case 2: c = c * CycloScalar::eps(order); break;
        default: break;
    }
    return c;
}

// polynomial term in u_{-range}..u_{range} of degree <= max_deg
inline DiffExpr random_u_monomial(std::mt19937& rng, int range, int max_deg,
                                  unsigned order = 12) {
    std::uniform_int_distribution<int> idx(-range, range);
    std::uniform_int_distribution<int> deg(0, max_deg);
    DiffExpr m = DiffExpr::one(order);
    int d = deg(rng);
    for (int j = 0; j < d; ++j) m = m * DiffExpr::u(idx(rng), 1, order);
    return m;
}

// sum of up to max_terms scaled monomials, theta degree exactly theta_deg
inline DiffExpr random_expr(std::mt19937& rng, int theta_deg, int max_terms = 2,
                            int range = 2, unsigned order = 12) {
    std::uniform_int_distribution<int> nterms(1, max_terms);
    std::uniform_int_distribution<int> idx(-range, range);
    DiffExpr e(order);
    int t = nterms(rng);
    for (int i = 0; i < t; ++i) {
        DiffExpr term = DiffExpr::scalar(random_scalar(rng, order));
        term = term * random_u_monomial(rng, range, 2, order);
        std::vector<int> th;
        while ((int)th.size() < theta_deg) {
            int k = idx(rng);
            bool dup = false;
            for (int x : th) dup = dup || (x == k);
            if (!dup) th.push_back(k);
        }
        for (int k : th) term = term * DiffExpr::theta(k, order);
        e += term;
    }
    return e;
}

// skew operator sum_{s=1}^{S} a_s S^s - S^{-s} a_s with polynomial a_s
inline DiffOperator random_skew_operator(std::mt19937& rng, int max_power = 3,
                                         unsigned order = 12) {
    std::uniform_int_distribution<int> np(1, max_power);
    DiffOperator k(order);
    int top = np(rng);
    for (int s = 1; s <= top; ++s) {
        DiffExpr a = random_expr(rng, 0, 2, 2, order);
        if (a.is_zero()) continue;
        k.add_coeff(s, a);
        k.add_coeff(-s, -a.shifted(-s));
    }
    return k;
}

}  // namespace testgen
