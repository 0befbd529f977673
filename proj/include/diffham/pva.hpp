// Multiplicative Poisson vertex algebra layer: the master-formula extension
// of a lambda bracket from generators to arbitrary densities, the skew axiom,
// and the Jacobi obstruction with its lambda/mu collection.

#pragma once

#include <diffham/expr.hpp>
#include <diffham/oper.hpp>

#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace diffham {

// Polynomial in two variables lambda, mu with DiffExpr coefficients.
class LambdaPoly2 {
public:
    using CoeffMap = std::map<std::pair<int, int>, DiffExpr>;

    explicit LambdaPoly2(unsigned order = CycloScalar::kDefaultOrder) : order_(order) {}

    unsigned field_order() const { return order_; }
    const CoeffMap& coeffs() const { return coeffs_; }
    bool is_zero() const { return coeffs_.empty(); }

    void add(int a, int b, const DiffExpr& e) {
        if (e.is_zero()) return;
        auto it = coeffs_.find({a, b});
        if (it == coeffs_.end()) {
            coeffs_.emplace(std::make_pair(a, b), e);
        } else {
            it->second += e;
            if (it->second.is_zero()) coeffs_.erase(it);
        }
    }

    LambdaPoly2 operator+(const LambdaPoly2& o) const {
        LambdaPoly2 r = *this;
        for (const auto& [k, e] : o.coeffs_) r.add(k.first, k.second, e);
        return r;
    }

    LambdaPoly2 operator-() const {
        LambdaPoly2 r(order_);
        for (const auto& [k, e] : coeffs_) r.coeffs_[k] = -e;
        return r;
    }

    std::optional<std::pair<std::pair<int, int>, DiffExpr>> first_nonzero() const {
        if (coeffs_.empty()) return std::nullopt;
        return *coeffs_.begin();
    }

    // Collect into the antisymmetric basis lm(a,b) = l^a m^b - l^b m^a,
    // keeping keys with a < b.  Throws if the raw coefficients are not
    // antisymmetric under (a,b) swap.
    CoeffMap antisymmetric_collect() const {
        CoeffMap out;
        for (const auto& [k, e] : coeffs_) {
            auto [a, b] = k;
            if (a == b) throw MathError("lambda-mu polynomial has a symmetric diagonal term");
            if (a < b) {
                out[{a, b}] = e;
            } else {
                auto it = coeffs_.find({b, a});
                if (it == coeffs_.end() || it->second != -e)
                    throw MathError("lambda-mu polynomial is not antisymmetric");
            }
        }
        // verify the a < b partners exist with the right sign
        for (const auto& [k, e] : out) {
            auto it = coeffs_.find({k.second, k.first});
            if (it == coeffs_.end() || it->second != -e)
                throw MathError("lambda-mu polynomial is not antisymmetric");
        }
        return out;
    }

private:
    unsigned order_;
    CoeffMap coeffs_;
};

// Master formula, scalar case:
//   {f_lambda g} = sum_{m,n} (dg/du_m) (lambda S)^m B(lambda S) (lambda S)^{-n} (df/du_n).
// The result is a Laurent polynomial in lambda with DiffExpr coefficients.
inline LambdaBracket master_bracket(const LambdaBracket& b, const FunctionalDensity& f,
                                    const FunctionalDensity& g) {
    unsigned order = b.field_order();
    LambdaBracket r(order);
    for (int m : g.u_support()) {
        DiffExpr gm = g.partial_u(m);
        if (gm.is_zero()) continue;
        for (const auto& [s, coef] : b.coeffs()) {
            for (int n : f.u_support()) {
                DiffExpr fn = f.partial_u(n);
                if (fn.is_zero()) continue;
                // (lambda S)^m acts on coef (lambda S)^{-n} fn
                DiffExpr val = gm * (coef * fn.shifted(s - n)).shifted(m);
                r.add_coeff(m + s - n, val);
            }
        }
    }
    return r;
}

// Skew axiom in determinate form: a^(-s) = -S^(-s) a^(s); forces a^(0) = 0.
inline bool check_skew_axiom(const LambdaBracket& b) { return b.is_skew(); }

namespace detail {

// Raw bilinear Jacobi expression of the scalar PVA-Jacobi identity:
//   J(A,B) = {u_lambda {u_mu u}_B}_A - {u_mu {u_lambda u}_B}_A - {{u_lambda u}_A (lambda mu S) u}_B
// expanded by the master formula and collected as a polynomial in lambda, mu.
inline LambdaPoly2 pva_jacobiator_bilinear(const LambdaBracket& a, const LambdaBracket& b) {
    unsigned order = a.field_order();
    LambdaPoly2 r(order);
    // term 1: sum_{m,n,q} (dB_m/du_n) S^n(A_q) lambda^{n+q} mu^m
    // term 2: the same with lambda and mu exchanged
    for (const auto& [m, bm] : b.coeffs()) {
        for (int n : bm.u_support()) {
            DiffExpr d = bm.partial_u(n);
            if (d.is_zero()) continue;
            for (const auto& [q, aq] : a.coeffs()) {
                DiffExpr val = d * aq.shifted(n);
                r.add(n + q, m, val);
                r.add(m, n + q, -val);
            }
        }
    }
    // term 3: sum_{m,n,q} A_m S^{m-n}(dB_q/du_n) lambda^{m+q-n} mu^{m-n}
    for (const auto& [m, am] : a.coeffs()) {
        for (const auto& [q, bq] : b.coeffs()) {
            for (int n : bq.u_support()) {
                DiffExpr d = bq.partial_u(n);
                if (d.is_zero()) continue;
                r.add(m + q - n, m - n, -(am * d.shifted(m - n)));
            }
        }
    }
    return r;
}

}  // namespace detail

// Jacobi obstruction of a pair of skew brackets.  With b1 == b2 (in value)
// this is twice the single-bracket obstruction; the vanishing locus is the
// same either way.  The symmetrized form J(B1,B2) + J(B2,B1) is exactly the
// derivative in alpha of the obstruction of the pencil B1 + alpha B2.
inline LambdaPoly2 pva_jacobiator(const LambdaBracket& b1, const LambdaBracket& b2) {
    if (!b1.is_skew() || !b2.is_skew()) throw MathError("pva_jacobiator: bracket is not skewsymmetric");
    return detail::pva_jacobiator_bilinear(b1, b2) + detail::pva_jacobiator_bilinear(b2, b1);
}

// Obstruction of a single bracket: J(B,B).
inline LambdaPoly2 pva_jacobi_obstruction(const LambdaBracket& b) {
    if (!b.is_skew()) throw MathError("pva_jacobi_obstruction: bracket is not skewsymmetric");
    return detail::pva_jacobiator_bilinear(b, b);
}

inline bool is_hamiltonian(const LambdaBracket& b) {
    return b.is_skew() && pva_jacobi_obstruction(b).is_zero();
}

// Both Hamiltonian and the mixed obstruction vanishes; equivalent to
// B1 + alpha B2 being Hamiltonian for every alpha.
inline bool check_compatible(const LambdaBracket& b1, const LambdaBracket& b2) {
    if (!is_hamiltonian(b1) || !is_hamiltonian(b2)) return false;
    return pva_jacobiator(b1, b2).is_zero();
}

}  // namespace diffham
