// Schouten bracket, the differential D_P, Barakat normalization, homotopy
// reduction to the finite theta window, Poisson-cohomology dimensions for the
// stretched operators S^k - S^{-k}, and the trivializing-field solver.

#pragma once

#include <diffham/expr.hpp>
#include <diffham/linalg.hpp>
#include <diffham/oper.hpp>
#include <diffham/pva.hpp>

#include <cstdint>
#include <cstdlib>
#include <map>
#include <set>
#include <vector>

namespace diffham {

// [P,Q] = int (dP/dth * dQ/du + (-1)^p dP/du * dQ/dth), degree p+q-1.
inline LocalFunctional schouten(const LocalFunctional& p, const LocalFunctional& q) {
    int dp = p.density.main.theta_degree();  // -1 for a log-only or zero density
    if (dp > 0 && p.density.has_logs()) throw MathError("schouten: log density with positive theta degree");
    if (!q.density.main.is_zero()) q.density.main.theta_degree();  // homogeneity check
    DiffExpr r = var_der_theta(p.density) * var_der_u(q.density);
    DiffExpr t2 = var_der_u(p.density) * var_der_theta(q.density);
    if (dp <= 0 || dp % 2 == 0)
        r += t2;
    else
        r -= t2;
    return LocalFunctional(r);
}

// D_P e = sum_n (S^n dP/dth) de/du_n + sum_n (S^n dP/du) de/dth_n.
inline DiffExpr apply_DP(const Bivector& p, const DiffExpr& e) {
    DiffExpr dth = var_der_theta(p.value.density);
    DiffExpr du = var_der_u(p.value.density);
    DiffExpr r(e.order());
    for (int n : e.u_support()) r += dth.shifted(n) * e.partial_u(n);
    for (int n : e.theta_support()) r += du.shifted(n) * e.partial_theta(n);
    return r;
}

// The normal-form bivector P_0^k = int th_0 th_k of S^k - S^{-k}.
inline Bivector normal_form_bivector(int k, unsigned order = CycloScalar::kDefaultOrder) {
    return Bivector(DiffExpr::theta(0, order) * DiffExpr::theta(k, order));
}

// F = (1/p) th_0 * dF/dth, a canonical class representative.
inline LocalFunctional normalize_barakat(const LocalFunctional& f) {
    int p = f.density.main.theta_degree();
    if (p < 1) throw MathError("normalize_barakat: theta degree must be at least 1");
    if (f.density.has_logs()) throw MathError("normalize_barakat: log densities unsupported");
    CycloScalar inv_p(Rational(1, p), f.order());
    return LocalFunctional((DiffExpr::theta(0, f.order()) * var_der_theta(f.density.main)).scaled(inv_p));
}

// Element of the exterior algebra on th_0 .. th_{2k-1} with scalar
// coefficients; the finite model of H(D_P, A-hat) for the k-stretched
// normal form.
struct ThetaRep {
    int stretch = 1;
    unsigned forder = CycloScalar::kDefaultOrder;
    std::map<std::uint32_t, CycloScalar> comps;  // bitmask over 2k generators

    bool is_zero() const { return comps.empty(); }

    void add(std::uint32_t mask, const CycloScalar& c) {
        if (c.is_zero()) return;
        auto it = comps.find(mask);
        if (it == comps.end()) {
            comps.emplace(mask, c);
        } else {
            it->second += c;
            if (it->second.is_zero()) comps.erase(it);
        }
    }

    DiffExpr to_expr() const {
        DiffExpr e(forder);
        for (const auto& [mask, c] : comps) {
            TermKey key;
            for (int j = 0; j < 2 * stretch; ++j)
                if (mask & (1u << j)) key.thetas.push_back(j);
            e.add_term(key, c);
        }
        return e;
    }

    static ThetaRep from_window_expr(const DiffExpr& e, int k) {
        ThetaRep r;
        r.stretch = k;
        r.forder = e.order();
        for (const auto& [key, c] : e.terms()) {
            if (!key.upow.empty() || !key.expf.empty())
                throw MathError("theta representative must be free of u variables");
            std::uint32_t mask = 0;
            for (int j : key.thetas) {
                if (j < 0 || j >= 2 * k) throw MathError("theta index outside the window");
                mask |= 1u << j;
            }
            r.add(mask, c);
        }
        return r;
    }

    bool operator==(const ThetaRep& o) const {
        if (stretch != o.stretch || comps.size() != o.comps.size()) return false;
        auto ia = comps.begin();
        auto ib = o.comps.begin();
        for (; ia != comps.end(); ++ia, ++ib)
            if (ia->first != ib->first || ia->second != ib->second) return false;
        return true;
    }
};

namespace detail {

// Homotopy reduction works in a change of Grassmann basis: for the stretch-k
// normal form, du_m := th_{m+k} - th_{m-k} is D_P(u_m), and the window
// eta_j = th_j (0 <= j < 2k) completes an independent generating set.  The
// differential becomes the plain de Rham d = sum du_m d/du_m, and the
// standard one-variable-at-a-time Poincare homotopy strips every u_m and
// du_m from a closed element, leaving a window representative.
//
// Encoding: du_m is stored as a theta generator with index m + kDuOffset.
constexpr int kDuOffset = 1 << 20;

inline DiffExpr ext_du(int m, unsigned order) { return DiffExpr::theta(kDuOffset + m, order); }

inline DiffExpr ext_theta(int j, int k, unsigned order) {
    DiffExpr r(order);
    int jj = j;
    while (jj >= 2 * k) {
        r += ext_du(jj - k, order);
        jj -= 2 * k;
    }
    while (jj < 0) {
        r -= ext_du(jj + k, order);
        jj += 2 * k;
    }
    return r + DiffExpr::theta(jj, order);
}

inline DiffExpr to_ext_basis(const DiffExpr& e, int k) {
    unsigned order = e.order();
    DiffExpr r(order);
    for (const auto& [key, c] : e.terms()) {
        TermKey base;
        base.upow = key.upow;
        base.expf = key.expf;
        DiffExpr term(order);
        term.add_term(base, c);
        for (int j : key.thetas) term = term * ext_theta(j, k, order);
        r += term;
    }
    return r;
}

inline DiffExpr from_ext_basis(const DiffExpr& e, int k) {
    unsigned order = e.order();
    DiffExpr r(order);
    for (const auto& [key, c] : e.terms()) {
        TermKey base;
        base.upow = key.upow;
        base.expf = key.expf;
        DiffExpr term(order);
        term.add_term(base, c);
        for (int j : key.thetas) {
            if (j >= kDuOffset / 2) {
                int m = j - kDuOffset;
                term = term * (DiffExpr::theta(m + k, order) - DiffExpr::theta(m - k, order));
            } else {
                term = term * DiffExpr::theta(j, order);
            }
        }
        r += term;
    }
    return r;
}

// d = sum_m du_m d/du_m in the extended basis.
inline DiffExpr ext_differential(const DiffExpr& e) {
    DiffExpr r(e.order());
    for (int m : e.u_support()) r += ext_du(m, e.order()) * e.partial_u(m);
    return r;
}

// Antiderivative in u_n of a single u_n-profile u_n^a exp(b u_n); errors when
// the result leaves the ring (u_n^{-1} alone, or negative powers against an
// exponential).
inline DiffExpr antiderivative_u(const DiffExpr& e, int n) {
    unsigned order = e.order();
    DiffExpr r(order);
    for (const auto& [key, c] : e.terms()) {
        auto uit = key.upow.find(n);
        auto eit = key.expf.find(n);
        int a = uit == key.upow.end() ? 0 : uit->second;
        if (eit == key.expf.end()) {
            if (a == -1) throw MathError("antiderivative not closed in ring: u^-1 needs a log");
            TermKey nk = key;
            nk.upow[n] = a + 1;
            r.add_term(nk, c * CycloScalar(Rational(1, a + 1), order));
        } else {
            if (a < 0)
                throw MathError("antiderivative not closed in ring: negative power times exponential");
            const CycloScalar b = eit->second;
            // int u^a e^{bu} = u^a e^{bu}/b - (a/b) int u^{a-1} e^{bu}
            CycloScalar binv = b.inverse();
            CycloScalar factor = c;
            int power = a;
            while (true) {
                TermKey nk = key;
                if (power == 0)
                    nk.upow.erase(n);
                else
                    nk.upow[n] = power;
                factor = factor * binv;
                r.add_term(nk, factor);
                if (power == 0) break;
                factor = -(factor * CycloScalar(Rational(power), order));
                --power;
            }
        }
    }
    return r;
}

}  // namespace detail

struct HomotopyResult {
    ThetaRep representative;
    DiffExpr primitive;  // e = representative + D_P(primitive), exactly

    HomotopyResult() : primitive(CycloScalar::kDefaultOrder) {}
};

// Reduce a D_P-cocycle (P = int th_0 th_k) to its window representative,
// returning a certified primitive for the exact part.
inline HomotopyResult homotopy_reduce(const DiffExpr& e, int k) {
    if (k < 1) throw MathError("homotopy_reduce: stretch must be positive");
    unsigned order = e.order();
    Bivector p0k = normal_form_bivector(k, order);
    if (!apply_DP(p0k, e).is_zero()) throw MathError("not a cocycle");

    DiffExpr ext = detail::to_ext_basis(e, k);
    DiffExpr primitive_ext(order);

    while (true) {
        // variables still to be stripped: u_n or du_n present
        std::set<int> vars = ext.u_support();
        for (int j : ext.theta_support())
            if (j >= detail::kDuOffset / 2) vars.insert(j - detail::kDuOffset);
        if (vars.empty()) break;
        int n = *vars.begin();
        for (int v : vars)
            if (std::abs(v) > std::abs(n) || (std::abs(v) == std::abs(n) && v > n)) n = v;

        DiffExpr beta = ext.partial_theta(detail::kDuOffset + n);
        DiffExpr g = detail::antiderivative_u(beta, n);
        ext -= detail::ext_differential(g);
        primitive_ext += g;

        if (ext.u_support().count(n) || ext.theta_support().count(detail::kDuOffset + n))
            throw MathError("homotopy_reduce: internal stripping failure");
    }

    HomotopyResult res;
    res.representative = ThetaRep::from_window_expr(ext, k);
    res.primitive = detail::from_ext_basis(primitive_ext, k);
    if (e - res.representative.to_expr() != apply_DP(p0k, res.primitive))
        throw MathError("homotopy_reduce: certificate verification failed");
    return res;
}

namespace detail {

inline std::vector<std::uint32_t> window_basis(int k, int p) {
    std::vector<std::uint32_t> basis;
    std::uint32_t total = 1u << (2 * k);
    for (std::uint32_t m = 0; m < total; ++m)
        if (__builtin_popcount(m) == p) basis.push_back(m);
    return basis;
}

}  // namespace detail

inline long binomial(int n, int p) {
    if (p < 0 || p > n) return 0;
    long r = 1;
    for (int j = 0; j < p; ++j) r = r * (n - j) / (j + 1);
    return r;
}

// dim H^p(D_P, A-hat) = C(2k, p).
inline std::vector<long> cohomology_dims_A(int k) {
    if (k < 1) throw MathError("stretch must be positive");
    std::vector<long> dims;
    for (int p = 0; p <= 2 * k; ++p) dims.push_back(binomial(2 * k, p));
    return dims;
}

// Matrix of the shift S on the degree-p window slice: th_i -> th_{i+1},
// th_{2k-1} -> th_0, with exterior reordering signs.  Basis: degree-p masks
// in increasing numeric order; column j holds the image of basis monomial j.
inline std::vector<std::vector<CycloScalar>> induced_shift(int k, int p,
                                                           unsigned order = CycloScalar::kDefaultOrder) {
    if (k < 1) throw MathError("stretch must be positive");
    if (p < 0 || p > 2 * k) throw MathError("theta degree out of range");
    std::vector<std::uint32_t> basis = detail::window_basis(k, p);
    std::map<std::uint32_t, std::size_t> pos;
    for (std::size_t j = 0; j < basis.size(); ++j) pos[basis[j]] = j;

    std::size_t dim = basis.size();
    std::vector<std::vector<CycloScalar>> m(dim, std::vector<CycloScalar>(dim, CycloScalar::zero(order)));
    for (std::size_t j = 0; j < dim; ++j) {
        // image indices in the order of the original factors
        std::vector<int> img;
        for (int i = 0; i < 2 * k; ++i)
            if (basis[j] & (1u << i)) img.push_back((i + 1) % (2 * k));
        // insertion-sort sign
        int sign = 1;
        for (std::size_t a = 1; a < img.size(); ++a)
            for (std::size_t b = a; b > 0 && img[b] < img[b - 1]; --b) {
                std::swap(img[b], img[b - 1]);
                sign = -sign;
            }
        std::uint32_t mask = 0;
        for (int i : img) mask |= 1u << i;
        m[pos[mask]][j] = CycloScalar(Rational(sign), order);
    }
    return m;
}

namespace detail {

inline std::size_t matrix_rank(const std::vector<std::vector<CycloScalar>>& m, unsigned order) {
    if (m.empty()) return 0;
    std::vector<CycloScalar> zero_rhs(m.size(), CycloScalar::zero(order));
    LinearSolution sol = solve_linear(m, zero_rhs, order);
    return m[0].size() - sol.kernel.size();
}

// (S - 1) on the degree-p window slice.
inline std::vector<std::vector<CycloScalar>> shift_minus_one(int k, int p, unsigned order) {
    auto m = induced_shift(k, p, order);
    for (std::size_t j = 0; j < m.size(); ++j) m[j][j] -= CycloScalar::one(order);
    return m;
}

}  // namespace detail

// Kernel of (S - 1) on the degree-p slice, as window representatives.
inline std::vector<ThetaRep> induced_shift_kernel(int k, int p,
                                                  unsigned order = CycloScalar::kDefaultOrder) {
    auto m = detail::shift_minus_one(k, p, order);
    std::vector<std::uint32_t> basis = detail::window_basis(k, p);
    std::vector<ThetaRep> out;
    if (m.empty()) return out;
    std::vector<CycloScalar> zero_rhs(m.size(), CycloScalar::zero(order));
    LinearSolution sol = solve_linear(m, zero_rhs, order);
    for (const auto& v : sol.kernel) {
        ThetaRep r;
        r.stretch = k;
        r.forder = order;
        for (std::size_t j = 0; j < basis.size(); ++j) r.add(basis[j], v[j]);
        out.push_back(r);
    }
    return out;
}

// dim H^p(D_P, F-hat) from the kernel/cokernel of (S - 1) on H(D_P, A-hat):
//   dim H^0(F) = dim H^0(A) + dim ker (S-1)|_{H^1(A)}
//   dim H^p(F) = dim coker (S-1)|_{H^p(A)} + dim ker (S-1)|_{H^{p+1}(A)}, p >= 1.
inline std::vector<long> cohomology_dims_F(int k, unsigned order = CycloScalar::kDefaultOrder) {
    if (k < 1) throw MathError("stretch must be positive");
    std::vector<long> ker(2 * k + 2, 0), coker(2 * k + 1, 0);
    for (int p = 1; p <= 2 * k; ++p) {
        auto m = detail::shift_minus_one(k, p, order);
        long dim = static_cast<long>(m.size());
        long rank = static_cast<long>(detail::matrix_rank(m, order));
        ker[p] = dim - rank;
        coker[p] = dim - rank;
    }
    std::vector<long> dims(2 * k + 1, 0);
    dims[0] = 1 + ker[1];
    for (int p = 1; p <= 2 * k; ++p) dims[p] = coker[p] + ker[p + 1];
    return dims;
}

struct TrivializingResult {
    bool found = false;
    DiffExpr characteristic;            // f with [P_0^k, -int f th_0] = target
    std::vector<DiffExpr> kernel;       // characteristics solving the homogeneous problem
    std::map<std::size_t, CycloScalar> certificate;

    TrivializingResult() : characteristic(CycloScalar::kDefaultOrder) {}
};

// Solve [P_0^k, -int f th_0] = target for f in the span of the ansatz.
// The class equation is imposed through the theta variational derivative,
// which by the Barakat normalization characterizes the zero class in
// positive theta degree.
inline TrivializingResult solve_trivializing_field(int k, const Bivector& target,
                                                   const std::vector<DiffExpr>& basis) {
    if (basis.empty()) throw MathError("solve_trivializing_field: empty ansatz basis");
    unsigned order = target.order();
    Bivector p0k = normal_form_bivector(k, order);
    LocalFunctional p0f(p0k.value);
    if (!functional_is_zero(schouten(p0f, target.value))) throw MathError("not a cocycle");

    DiffExpr th0 = DiffExpr::theta(0, order);
    std::vector<DiffExpr> columns;
    for (const DiffExpr& b : basis) {
        if (!b.is_theta_free()) throw MathError("ansatz monomials must be theta-free");
        LocalFunctional x(-(b * th0));
        columns.push_back(var_der_theta(schouten(p0f, x).density));
    }
    DiffExpr rhs_expr = var_der_theta(target.value.density);

    // rows indexed by term keys appearing in any column or the target
    std::map<TermKey, std::size_t, TermKeyLess> row_of;
    auto row_index = [&](const TermKey& key) {
        auto it = row_of.find(key);
        if (it != row_of.end()) return it->second;
        std::size_t idx = row_of.size();
        row_of.emplace(key, idx);
        return idx;
    };
    std::vector<SparseRow> rows;
    std::vector<CycloScalar> rhs;
    auto ensure_rows = [&](std::size_t n) {
        while (rows.size() < n) {
            rows.emplace_back();
            rhs.push_back(CycloScalar::zero(order));
        }
    };
    for (std::size_t j = 0; j < columns.size(); ++j) {
        for (const auto& [key, c] : columns[j].terms()) {
            std::size_t r = row_index(key);
            ensure_rows(r + 1);
            rows[r][j] = c;
        }
    }
    for (const auto& [key, c] : rhs_expr.terms()) {
        std::size_t r = row_index(key);
        ensure_rows(r + 1);
        rhs[r] = c;
    }

    LinearSolution sol = solve_linear_sparse(rows, rhs, basis.size(), order);
    TrivializingResult res;
    res.characteristic = DiffExpr::zero(order);
    if (!sol.consistent) {
        res.certificate = sol.certificate;
        return res;
    }
    DiffExpr f(order);
    for (std::size_t j = 0; j < basis.size(); ++j) f += basis[j].scaled(sol.particular[j]);
    LocalFunctional x(-(f * th0));
    if (!functional_equal(schouten(p0f, x), target.value))
        throw MathError("solve_trivializing_field: verification of returned solution failed");
    res.found = true;
    res.characteristic = f;
    for (const auto& v : sol.kernel) {
        DiffExpr g(order);
        for (std::size_t j = 0; j < basis.size(); ++j) g += basis[j].scaled(v[j]);
        if (!g.is_zero()) res.kernel.push_back(g);
    }
    return res;
}

// Cross-oracle between the PVA-Jacobi obstruction and the Schouten square:
// with J(B,B) = sum c_{a,b} lambda^a mu^b and P the bivector of K,
//   [P,P] = (1/3) int th_0 sum c_{a,b} th_b th_a
// as functional classes (the lambda-mu / theta identification; the constant
// absorbs the engine's bivector normalization and the threefold symmetry of
// the trivector collection).
inline bool schouten_pva_crosscheck(const DiffOperator& k) {
    if (!k.is_skew()) throw MathError("crosscheck: operator must be skewsymmetric");
    unsigned order = k.field_order();
    LambdaPoly2 j = pva_jacobi_obstruction(k);
    Bivector p = operator_to_bivector(k);
    LocalFunctional pp = schouten(p.value, p.value);

    DiffExpr g(order);
    DiffExpr th0 = DiffExpr::theta(0, order);
    for (const auto& [key, c] : j.coeffs()) {
        auto [a, b] = key;
        g += th0 * DiffExpr::theta(b, order) * DiffExpr::theta(a, order) * c;
    }
    CycloScalar scale(Rational(1, 3), order);
    return functional_equal(pp, LocalFunctional(g.scaled(scale)));
}

}  // namespace diffham
