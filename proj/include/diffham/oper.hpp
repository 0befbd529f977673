// Difference operators: Laurent polynomials in the shift S with DiffExpr
// coefficients.  The same container doubles as a lambda bracket (Laurent
// polynomial in lambda), since {u_lambda u} = sum a^(s) lambda^s carries
// exactly the data of K = sum a^(s) S^s.

#pragma once

#include <diffham/expr.hpp>
#include <diffham/linalg.hpp>

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace diffham {

class DiffOperator {
public:
    using CoeffMap = std::map<int, DiffExpr>;

    explicit DiffOperator(unsigned order = CycloScalar::kDefaultOrder) : order_(order) {}

    static DiffOperator zero(unsigned order = CycloScalar::kDefaultOrder) { return DiffOperator(order); }

    static DiffOperator identity(unsigned order = CycloScalar::kDefaultOrder) {
        DiffOperator k(order);
        k.set_coeff(0, DiffExpr::one(order));
        return k;
    }

    // a * S^s
    static DiffOperator monomial(const DiffExpr& a, int s) {
        DiffOperator k(a.order());
        k.set_coeff(s, a);
        return k;
    }

    // S^k - S^{-k}
    static DiffOperator stretched_normal_form(int k, unsigned order = CycloScalar::kDefaultOrder) {
        DiffOperator r(order);
        r.set_coeff(k, DiffExpr::one(order));
        r.set_coeff(-k, -DiffExpr::one(order));
        return r;
    }

    unsigned field_order() const { return order_; }
    const CoeffMap& coeffs() const { return coeffs_; }
    bool is_zero() const { return coeffs_.empty(); }

    DiffExpr coeff(int s) const {
        auto it = coeffs_.find(s);
        return it == coeffs_.end() ? DiffExpr::zero(order_) : it->second;
    }

    void set_coeff(int s, const DiffExpr& a) {
        if (a.is_zero())
            coeffs_.erase(s);
        else
            coeffs_[s] = a;
    }

    void add_coeff(int s, const DiffExpr& a) { set_coeff(s, coeff(s) + a); }

    // (min power, max power); nullopt for the zero operator
    std::optional<std::pair<int, int>> order_pair() const {
        if (coeffs_.empty()) return std::nullopt;
        return std::make_pair(coeffs_.begin()->first, coeffs_.rbegin()->first);
    }

    bool operator==(const DiffOperator& o) const {
        if (order_ != o.order_ || coeffs_.size() != o.coeffs_.size()) return false;
        auto ia = coeffs_.begin();
        auto ib = o.coeffs_.begin();
        for (; ia != coeffs_.end(); ++ia, ++ib)
            if (ia->first != ib->first || ia->second != ib->second) return false;
        return true;
    }
    bool operator!=(const DiffOperator& o) const { return !(*this == o); }

    DiffOperator operator-() const {
        DiffOperator r(order_);
        for (const auto& [s, a] : coeffs_) r.coeffs_[s] = -a;
        return r;
    }
    DiffOperator operator+(const DiffOperator& o) const {
        DiffOperator r = *this;
        for (const auto& [s, a] : o.coeffs_) r.add_coeff(s, a);
        return r;
    }
    DiffOperator operator-(const DiffOperator& o) const { return *this + (-o); }
    DiffOperator scaled(const CycloScalar& c) const {
        DiffOperator r(order_);
        if (c.is_zero()) return r;
        for (const auto& [s, a] : coeffs_) r.coeffs_[s] = a.scaled(c);
        return r;
    }

    DiffExpr apply(const DiffExpr& e) const {
        DiffExpr r(order_);
        for (const auto& [s, a] : coeffs_) r += a * e.shifted(s);
        return r;
    }

    // Composition uses S^s o a = shift(a, s) o S^s.
    DiffOperator compose(const DiffOperator& o) const {
        DiffOperator r(order_);
        for (const auto& [s, a] : coeffs_)
            for (const auto& [t, b] : o.coeffs_) r.add_coeff(s + t, a * b.shifted(s));
        return r;
    }

    // Formal adjoint: (a S^s)^dagger = S^{-s} o a = shift(a, -s) S^{-s}.
    DiffOperator adjoint() const {
        DiffOperator r(order_);
        for (const auto& [s, a] : coeffs_) r.add_coeff(-s, a.shifted(-s));
        return r;
    }

    bool is_skew() const { return adjoint() == -*this; }

    // First coefficient violating skewness, for error reporting.
    std::optional<int> skew_defect() const {
        DiffOperator d = adjoint() + *this;
        if (d.coeffs_.empty()) return std::nullopt;
        return d.coeffs_.begin()->first;
    }

    // Stretch by k: indices and shift powers all multiplied by k.
    DiffOperator stretched(int k) const {
        DiffOperator r(order_);
        for (const auto& [s, a] : coeffs_) {
            DiffExpr sa(order_);
            for (const auto& [key, c] : a.terms()) {
                TermKey nk;
                for (int t : key.thetas) nk.thetas.push_back(t * k);
                if (k < 0) std::reverse(nk.thetas.begin(), nk.thetas.end());
                for (const auto& [n, p] : key.upow) nk.upow[n * k] = p;
                for (const auto& [n, b] : key.expf) nk.expf[n * k] = b;
                sa.add_term(nk, c);
            }
            r.add_coeff(s * k, sa);
        }
        return r;
    }

    DiffOperator substituted(const DiffExpr& image) const {
        DiffOperator r(order_);
        for (const auto& [s, a] : coeffs_) r.add_coeff(s, a.substituted(image));
        return r;
    }

private:
    unsigned order_;
    CoeffMap coeffs_;
};

// A lambda bracket {u_lambda u} = sum a^(s) lambda^s shares the storage shape.
using LambdaBracket = DiffOperator;

inline LambdaBracket operator_to_bracket(const DiffOperator& k) { return k; }
inline DiffOperator bracket_to_operator(const LambdaBracket& b) { return b; }

// Frechet derivative F_* = sum_n (dF/du_n) S^n.
inline DiffOperator frechet(const DiffExpr& f) {
    if (!f.is_theta_free()) throw MathError("frechet: argument must be theta-free");
    DiffOperator r(f.order());
    for (int n : f.u_support()) r.add_coeff(n, f.partial_u(n));
    return r;
}

inline DiffOperator frechet(const FunctionalDensity& f) {
    DiffOperator r(f.order());
    for (int n : f.u_support()) r.add_coeff(n, f.partial_u(n));
    return r;
}

inline DiffOperator frechet_adjoint(const DiffExpr& f) { return frechet(f).adjoint(); }

// Transformation law for operators under a change of coordinates:
// K' = F_* K F_*^dagger, still written in the source coordinates.
inline DiffOperator conjugate(const DiffOperator& k, const DiffOperator& fstar) {
    return fstar.compose(k).compose(fstar.adjoint());
}

// A theta-degree-2 local functional standing for a skew operator.
struct Bivector {
    LocalFunctional value;

    explicit Bivector(unsigned order = CycloScalar::kDefaultOrder) : value(order) {}
    Bivector(const LocalFunctional& f) : value(f) {
        if (!f.density.has_logs() && !f.density.main.is_zero() && f.density.main.theta_degree() != 2)
            throw MathError("bivector density must have theta degree 2");
    }
    Bivector(const DiffExpr& e) : Bivector(LocalFunctional(e)) {}

    unsigned order() const { return value.order(); }
};

// P = 1/2 int th_0 (K th_0); a skew K of order (-N, N) lands on
// the class of sum_{s>0} int a^(s) th_0 th_s.
inline Bivector operator_to_bivector(const DiffOperator& k) {
    if (auto bad = k.skew_defect())
        throw MathError("operator is not skewsymmetric: defect at S^" + std::to_string(*bad));
    unsigned order = k.field_order();
    DiffExpr density(order);
    CycloScalar half(Rational(1, 2), order);
    DiffExpr th0 = DiffExpr::theta(0, order);
    for (const auto& [s, a] : k.coeffs()) density += (th0 * a * DiffExpr::theta(s, order)).scaled(half);
    return Bivector(LocalFunctional(density));
}

// K^(n) = coefficient of th_n in delta P / delta theta.
inline DiffOperator bivector_to_operator(const Bivector& p) {
    unsigned order = p.order();
    DiffExpr vd = var_der_theta(p.value.density.main);
    DiffOperator k(order);
    for (int n : vd.theta_support()) {
        DiffExpr slice(order);
        for (const auto& [key, c] : vd.terms()) {
            if (key.thetas.size() != 1) throw MathError("bivector variational derivative is not linear in theta");
            if (key.thetas[0] != n) continue;
            TermKey nk = key;
            nk.thetas.clear();
            slice.add_term(nk, c);
        }
        k.add_coeff(n, slice);
    }
    return k;
}

// Evolutionary vector field with characteristic X: u_t = X, prolonged by the
// shift.  As a local 1-vector it is -int X th_0.
struct EvolutionaryField {
    DiffExpr characteristic;

    explicit EvolutionaryField(unsigned order = CycloScalar::kDefaultOrder) : characteristic(order) {}
    EvolutionaryField(const DiffExpr& x) : characteristic(x) {
        if (!x.is_theta_free()) throw MathError("field characteristic must be theta-free");
    }

    unsigned order() const { return characteristic.order(); }

    LocalFunctional to_one_vector() const {
        return LocalFunctional(-(characteristic * DiffExpr::theta(0, order())));
    }

    static EvolutionaryField from_one_vector(const LocalFunctional& f) {
        return EvolutionaryField(-var_der_theta(f.density.main));
    }

    // Prolonged action sum_n S^n(X) d/du_n.
    DiffExpr apply_to(const DiffExpr& e) const {
        DiffExpr r(order());
        for (int n : e.u_support()) r += characteristic.shifted(n) * e.partial_u(n);
        return r;
    }
};

struct PreimageResult {
    bool found = false;
    DiffOperator solution;
    std::map<std::size_t, CycloScalar> certificate;  // row multipliers when inconsistent
    std::vector<DiffOperator> kernel;                // homogeneous solutions of the matching system

    PreimageResult() : solution(CycloScalar::kDefaultOrder) {}
};

// Find a skew Q' of order (-n, n), with S^s-coefficients (s > 0) drawn from
// the span of the ansatz monomials, such that Fstar Q' Fstar^dagger = target.
// Negative-power coefficients are filled in by the skew completion
// a^(-s) = -S^(-s) a^(s).
inline PreimageResult solve_preimage(const DiffOperator& target, const DiffOperator& fstar, int n,
                                     const std::vector<DiffExpr>& ansatz) {
    if (!target.is_skew()) throw MathError("solve_preimage: target must be skewsymmetric");
    if (ansatz.empty()) throw MathError("solve_preimage: empty ansatz basis");
    if (n < 1) throw MathError("solve_preimage: order bound must be positive");
    unsigned order = target.field_order();

    // unknowns: one scalar per (positive power s, ansatz slot j)
    std::size_t nb = ansatz.size();
    std::size_t ncols = static_cast<std::size_t>(n) * nb;
    auto col = [nb](int s, std::size_t j) { return static_cast<std::size_t>(s - 1) * nb + j; };

    // residual(c) = conjugate(Q'(c), fstar) - target is linear in c; collect
    // per-power, per-term equations.
    std::map<std::pair<int, TermKey>, SparseRow, decltype([](const auto& a, const auto& b) {
                 if (a.first != b.first) return a.first < b.first;
                 return a.second.cmp(b.second) < 0;
             })>
        eqs;
    std::vector<SparseRow> rows;
    std::vector<CycloScalar> rhs;

    auto add_entry = [](SparseRow& row, std::size_t c, const CycloScalar& v) {
        auto it = row.find(c);
        if (it == row.end()) {
            if (!v.is_zero()) row.emplace(c, v);
        } else {
            it->second += v;
            if (it->second.is_zero()) row.erase(it);
        }
    };
    // the right-hand side rides along in the marker column just past the unknowns
    auto accumulate = [&](const DiffOperator& contrib, std::optional<std::size_t> column) {
        for (const auto& [s, a] : contrib.coeffs())
            for (const auto& [key, c] : a.terms()) add_entry(eqs[{s, key}], column ? *column : ncols, c);
    };

    for (int s = 1; s <= n; ++s) {
        for (std::size_t j = 0; j < nb; ++j) {
            DiffOperator basis_op(order);
            basis_op.set_coeff(s, ansatz[j]);
            basis_op.add_coeff(-s, -ansatz[j].shifted(-s));
            accumulate(conjugate(basis_op, fstar), col(s, j));
        }
    }
    accumulate(target, std::nullopt);

    for (auto& [k, row] : eqs) {
        CycloScalar b = CycloScalar::zero(order);
        auto it = row.find(ncols);
        if (it != row.end()) {
            b = it->second;
            row.erase(it);
        }
        rows.push_back(row);
        rhs.push_back(b);
    }

    LinearSolution sol = solve_linear_sparse(rows, rhs, ncols, order);
    PreimageResult res;
    if (!sol.consistent) {
        res.certificate = sol.certificate;
        return res;
    }
    auto build = [&](const std::vector<CycloScalar>& c) {
        DiffOperator q(order);
        for (int s = 1; s <= n; ++s) {
            DiffExpr a(order);
            for (std::size_t j = 0; j < nb; ++j) a += ansatz[j].scaled(c[col(s, j)]);
            q.add_coeff(s, a);
            q.add_coeff(-s, -a.shifted(-s));
        }
        return q;
    };
    res.found = true;
    res.solution = build(sol.particular);
    for (const auto& kv : sol.kernel) {
        DiffOperator q = build(kv);
        if (!q.is_zero()) res.kernel.push_back(q);
    }
    // soundness: re-verify the returned solution
    if (conjugate(res.solution, fstar) != target)
        throw MathError("solve_preimage: verification of returned solution failed");
    return res;
}

inline DiffExpr hamiltonian_flow(const DiffOperator& k, const DiffExpr& delta_h) {
    if (!delta_h.is_theta_free()) throw MathError("hamiltonian_flow: deltaH must be theta-free");
    return k.apply(delta_h);
}

}  // namespace diffham
