// The difference superalgebra of densities.
//
// A DiffExpr is a finite sum of terms
//     c * u_{n1}^{a1} ... u_{nr}^{ar} * exp(b1 u_{m1} + ...) * th_{j1} th_{j2} ...
// with c in Q(zeta_N), integer (possibly negative) powers of the shifted
// field variables u_n, exponentials of linear forms in the u_n, and Grassmann
// generators th_j.  FunctionalDensity extends this by an additive pile of
// log(u_n) terms, which is all the extra room the catalog Hamiltonians need.
//
// The shift S acts by incrementing every index.  Local functionals are
// densities modulo the image of (S - 1); equality of classes is decided by
// variational derivatives.

#pragma once

#include <diffham/cyclotomic.hpp>

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace diffham {

struct TermKey {
    std::vector<int> thetas;             // strictly increasing indices
    std::map<int, int> upow;             // index -> nonzero exponent
    std::map<int, CycloScalar> expf;     // index -> nonzero coefficient in the exponential

    bool operator==(const TermKey& o) const {
        return thetas == o.thetas && upow == o.upow && key_eq(expf, o.expf);
    }

    static bool key_eq(const std::map<int, CycloScalar>& a, const std::map<int, CycloScalar>& b) {
        if (a.size() != b.size()) return false;
        auto ia = a.begin();
        auto ib = b.begin();
        for (; ia != a.end(); ++ia, ++ib)
            if (ia->first != ib->first || ia->second != ib->second) return false;
        return true;
    }

    int cmp(const TermKey& o) const {
        if (thetas != o.thetas) return thetas < o.thetas ? -1 : 1;
        if (upow != o.upow) return upow < o.upow ? -1 : 1;
        auto ia = expf.begin();
        auto ib = o.expf.begin();
        for (; ia != expf.end() && ib != o.expf.end(); ++ia, ++ib) {
            if (ia->first != ib->first) return ia->first < ib->first ? -1 : 1;
            int c = ia->second.cmp(ib->second);
            if (c != 0) return c;
        }
        if (ia != expf.end()) return 1;
        if (ib != o.expf.end()) return -1;
        return 0;
    }
};

struct TermKeyLess {
    bool operator()(const TermKey& a, const TermKey& b) const { return a.cmp(b) < 0; }
};

class DiffExpr {
public:
    using TermMap = std::map<TermKey, CycloScalar, TermKeyLess>;

    explicit DiffExpr(unsigned order = CycloScalar::kDefaultOrder) : order_(order) {}

    static DiffExpr zero(unsigned order = CycloScalar::kDefaultOrder) { return DiffExpr(order); }

    static DiffExpr scalar(const CycloScalar& c) {
        DiffExpr e(c.order());
        if (!c.is_zero()) e.terms_[TermKey{}] = c;
        return e;
    }
    static DiffExpr one(unsigned order = CycloScalar::kDefaultOrder) {
        return scalar(CycloScalar::one(order));
    }

    static DiffExpr u(int n, int power = 1, unsigned order = CycloScalar::kDefaultOrder) {
        DiffExpr e(order);
        if (power == 0) return one(order);
        TermKey k;
        k.upow[n] = power;
        e.terms_[k] = CycloScalar::one(order);
        return e;
    }

    static DiffExpr theta(int n, unsigned order = CycloScalar::kDefaultOrder) {
        DiffExpr e(order);
        TermKey k;
        k.thetas = {n};
        e.terms_[k] = CycloScalar::one(order);
        return e;
    }

    // exp(sum of coef_n * u_n)
    static DiffExpr expu(const std::map<int, CycloScalar>& form,
                         unsigned order = CycloScalar::kDefaultOrder) {
        DiffExpr e(order);
        TermKey k;
        for (const auto& [n, c] : form)
            if (!c.is_zero()) k.expf[n] = c;
        e.terms_[k] = CycloScalar::one(order);
        return e;
    }

    unsigned order() const { return order_; }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    bool operator==(const DiffExpr& o) const {
        if (order_ != o.order_ || terms_.size() != o.terms_.size()) return false;
        auto ia = terms_.begin();
        auto ib = o.terms_.begin();
        for (; ia != terms_.end(); ++ia, ++ib)
            if (ia->first.cmp(ib->first) != 0 || ia->second != ib->second) return false;
        return true;
    }
    bool operator!=(const DiffExpr& o) const { return !(*this == o); }

    void add_term(const TermKey& k, const CycloScalar& c) {
        if (c.is_zero()) return;
        auto it = terms_.find(k);
        if (it == terms_.end()) {
            terms_.emplace(k, c);
        } else {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    DiffExpr operator-() const {
        DiffExpr r(order_);
        for (const auto& [k, c] : terms_) r.terms_[k] = -c;
        return r;
    }

    DiffExpr operator+(const DiffExpr& o) const {
        check_order(o);
        DiffExpr r = *this;
        for (const auto& [k, c] : o.terms_) r.add_term(k, c);
        return r;
    }
    DiffExpr operator-(const DiffExpr& o) const { return *this + (-o); }
    DiffExpr& operator+=(const DiffExpr& o) { return *this = *this + o; }
    DiffExpr& operator-=(const DiffExpr& o) { return *this = *this - o; }

    DiffExpr scaled(const CycloScalar& c) const {
        DiffExpr r(order_);
        if (c.is_zero()) return r;
        for (const auto& [k, v] : terms_) r.terms_[k] = c * v;
        return r;
    }

    DiffExpr operator*(const DiffExpr& o) const {
        check_order(o);
        DiffExpr r(order_);
        for (const auto& [ka, ca] : terms_) {
            for (const auto& [kb, cb] : o.terms_) {
                int sign = 0;
                TermKey k = merge_keys(ka, kb, sign);
                if (sign == 0) continue;
                r.add_term(k, sign > 0 ? ca * cb : -(ca * cb));
            }
        }
        return r;
    }
    DiffExpr& operator*=(const DiffExpr& o) { return *this = *this * o; }

    DiffExpr shifted(int s) const {
        if (s == 0) return *this;
        DiffExpr r(order_);
        for (const auto& [k, c] : terms_) {
            TermKey nk;
            nk.thetas.reserve(k.thetas.size());
            for (int t : k.thetas) nk.thetas.push_back(t + s);
            for (const auto& [n, a] : k.upow) nk.upow[n + s] = a;
            for (const auto& [n, b] : k.expf) nk.expf[n + s] = b;
            r.terms_[nk] = c;
        }
        return r;
    }

    // d/du_n, taking the exponential factors along
    DiffExpr partial_u(int n) const {
        DiffExpr r(order_);
        for (const auto& [k, c] : terms_) {
            auto uit = k.upow.find(n);
            auto eit = k.expf.find(n);
            if (uit != k.upow.end()) {
                TermKey nk = k;
                int a = uit->second;
                if (a == 1)
                    nk.upow.erase(n);
                else
                    nk.upow[n] = a - 1;
                r.add_term(nk, c * CycloScalar(Rational(a), order_));
            }
            if (eit != k.expf.end()) r.add_term(k, c * eit->second);
        }
        return r;
    }

    // Left Grassmann derivative d/dth_n.
    DiffExpr partial_theta(int n) const {
        DiffExpr r(order_);
        for (const auto& [k, c] : terms_) {
            auto pos = std::find(k.thetas.begin(), k.thetas.end(), n);
            if (pos == k.thetas.end()) continue;
            TermKey nk = k;
            nk.thetas.erase(nk.thetas.begin() + (pos - k.thetas.begin()));
            bool odd = ((pos - k.thetas.begin()) % 2) != 0;
            r.add_term(nk, odd ? -c : c);
        }
        return r;
    }

    std::set<int> u_support() const {
        std::set<int> s;
        for (const auto& [k, c] : terms_) {
            for (const auto& [n, a] : k.upow) s.insert(n);
            for (const auto& [n, b] : k.expf) s.insert(n);
        }
        return s;
    }

    std::set<int> theta_support() const {
        std::set<int> s;
        for (const auto& [k, c] : terms_)
            for (int t : k.thetas) s.insert(t);
        return s;
    }

    bool is_theta_free() const {
        for (const auto& [k, c] : terms_)
            if (!k.thetas.empty()) return false;
        return true;
    }

    bool is_u_free() const {
        for (const auto& [k, c] : terms_)
            if (!k.upow.empty() || !k.expf.empty()) return false;
        return true;
    }

    // Theta degree if homogeneous; throws otherwise.  Zero reports degree -1.
    int theta_degree() const {
        int deg = -1;
        for (const auto& [k, c] : terms_) {
            int d = static_cast<int>(k.thetas.size());
            if (deg == -1)
                deg = d;
            else if (deg != d)
                throw MathError("expression is not theta-homogeneous");
        }
        return deg;
    }

    // Keep only the terms of the given theta degree.
    DiffExpr theta_component(int deg) const {
        DiffExpr r(order_);
        for (const auto& [k, c] : terms_)
            if (static_cast<int>(k.thetas.size()) == deg) r.terms_[k] = c;
        return r;
    }

    CycloScalar constant_term() const {
        auto it = terms_.find(TermKey{});
        return it == terms_.end() ? CycloScalar::zero(order_) : it->second;
    }

    CycloScalar coeff(const TermKey& k) const {
        auto it = terms_.find(k);
        return it == terms_.end() ? CycloScalar::zero(order_) : it->second;
    }

    // Substitute u_n -> S^n(image) for every n.  The image must be theta-free.
    // Negative powers require a single-term image; exponentials require the
    // image to be a linear form in the u_m with no constant part.
    DiffExpr substituted(const DiffExpr& image) const;

    void check_order(const DiffExpr& o) const {
        if (order_ != o.order_) throw MathError("mixed cyclotomic field orders");
    }

private:
    static TermKey merge_keys(const TermKey& a, const TermKey& b, int& sign) {
        TermKey k;
        // Grassmann merge with inversion count.
        std::size_t i = 0, j = 0;
        long inversions = 0;
        while (i < a.thetas.size() && j < b.thetas.size()) {
            if (a.thetas[i] == b.thetas[j]) {
                sign = 0;
                return k;
            }
            if (a.thetas[i] < b.thetas[j]) {
                k.thetas.push_back(a.thetas[i++]);
            } else {
                inversions += static_cast<long>(a.thetas.size() - i);
                k.thetas.push_back(b.thetas[j++]);
            }
        }
        while (i < a.thetas.size()) k.thetas.push_back(a.thetas[i++]);
        while (j < b.thetas.size()) k.thetas.push_back(b.thetas[j++]);
        sign = (inversions % 2 == 0) ? 1 : -1;

        k.upow = a.upow;
        for (const auto& [n, p] : b.upow) {
            k.upow[n] += p;
            if (k.upow[n] == 0) k.upow.erase(n);
        }
        k.expf = a.expf;
        for (const auto& [n, c] : b.expf) {
            auto it = k.expf.find(n);
            if (it == k.expf.end()) {
                k.expf.emplace(n, c);
            } else {
                it->second += c;
                if (it->second.is_zero()) k.expf.erase(it);
            }
        }
        return k;
    }

    unsigned order_;
    TermMap terms_;
};

inline DiffExpr operator*(const CycloScalar& c, const DiffExpr& e) { return e.scaled(c); }

namespace detail {

// image^power for a theta-free image; negative powers need a monomial image.
inline DiffExpr expr_int_pow(const DiffExpr& image, int power) {
    unsigned order = image.order();
    if (power == 0) return DiffExpr::one(order);
    DiffExpr base = image;
    if (power < 0) {
        if (image.terms().size() != 1)
            throw MathError("substitution: negative power of a non-monomial image");
        const auto& [k, c] = *image.terms().begin();
        TermKey inv;
        for (const auto& [n, a] : k.upow) inv.upow[n] = -a;
        for (const auto& [n, b] : k.expf) inv.expf[n] = -b;
        base = DiffExpr::zero(order);
        base.add_term(inv, c.inverse());
        power = -power;
    }
    DiffExpr r = DiffExpr::one(order);
    for (int t = 0; t < power; ++t) r = r * base;
    return r;
}

// exp(coef * image) for a pure linear-form image.
inline DiffExpr expr_exp_of(const DiffExpr& image, const CycloScalar& coef) {
    unsigned order = image.order();
    std::map<int, CycloScalar> form;
    for (const auto& [k, c] : image.terms()) {
        if (!k.expf.empty() || k.upow.size() != 1 || k.upow.begin()->second != 1)
            throw MathError("substitution: exponential of a non-linear image");
        form[k.upow.begin()->first] = coef * c;
    }
    return DiffExpr::expu(form, order);
}

}  // namespace detail

inline DiffExpr DiffExpr::substituted(const DiffExpr& image) const {
    check_order(image);
    if (!image.is_theta_free()) throw MathError("substitution image must be theta-free");
    DiffExpr r(order_);
    for (const auto& [k, c] : terms_) {
        DiffExpr term = DiffExpr::scalar(c);
        if (!k.thetas.empty()) {
            TermKey tk;
            tk.thetas = k.thetas;
            DiffExpr th(order_);
            th.add_term(tk, CycloScalar::one(order_));
            term = term * th;
        }
        for (const auto& [n, a] : k.upow) term = term * detail::expr_int_pow(image.shifted(n), a);
        for (const auto& [n, b] : k.expf) term = term * detail::expr_exp_of(image.shifted(n), b);
        r += term;
    }
    return r;
}

// A density with an optional additive pile of log(u_n) terms.
struct FunctionalDensity {
    DiffExpr main;
    std::map<int, CycloScalar> logs;  // index -> coefficient of log(u_n)

    explicit FunctionalDensity(unsigned order = CycloScalar::kDefaultOrder) : main(order) {}
    FunctionalDensity(const DiffExpr& e) : main(e) {}

    unsigned order() const { return main.order(); }

    static FunctionalDensity log_u(int n, const CycloScalar& c) {
        FunctionalDensity d(c.order());
        if (!c.is_zero()) d.logs[n] = c;
        return d;
    }

    bool is_zero() const { return main.is_zero() && logs.empty(); }
    bool has_logs() const { return !logs.empty(); }

    void add_log(int n, const CycloScalar& c) {
        auto it = logs.find(n);
        if (it == logs.end()) {
            if (!c.is_zero()) logs.emplace(n, c);
        } else {
            it->second += c;
            if (it->second.is_zero()) logs.erase(it);
        }
    }

    FunctionalDensity operator-() const {
        FunctionalDensity r(-main);
        for (const auto& [n, c] : logs) r.logs[n] = -c;
        return r;
    }
    FunctionalDensity operator+(const FunctionalDensity& o) const {
        FunctionalDensity r(main + o.main);
        r.logs = logs;
        for (const auto& [n, c] : o.logs) r.add_log(n, c);
        return r;
    }
    FunctionalDensity operator-(const FunctionalDensity& o) const { return *this + (-o); }

    FunctionalDensity scaled(const CycloScalar& c) const {
        FunctionalDensity r(main.scaled(c));
        if (!c.is_zero())
            for (const auto& [n, v] : logs) r.logs[n] = c * v;
        return r;
    }

    FunctionalDensity shifted(int s) const {
        FunctionalDensity r(main.shifted(s));
        for (const auto& [n, c] : logs) r.logs[n + s] = c;
        return r;
    }

    // d/du_n including the log terms
    DiffExpr partial_u(int n) const {
        DiffExpr r = main.partial_u(n);
        auto it = logs.find(n);
        if (it != logs.end()) r += DiffExpr::u(n, -1, order()).scaled(it->second);
        return r;
    }

    std::set<int> u_support() const {
        std::set<int> s = main.u_support();
        for (const auto& [n, c] : logs) s.insert(n);
        return s;
    }

    bool operator==(const FunctionalDensity& o) const {
        return main == o.main && TermKey::key_eq(logs, o.logs);
    }

    // Substitute u_n -> S^n(image).  log(u_n) needs a unit-coefficient
    // monomial image: log(u^a e^{cu}) = a log(u) + c u.
    FunctionalDensity substituted(const DiffExpr& image) const {
        FunctionalDensity r(main.substituted(image));
        for (const auto& [n, coef] : logs) {
            DiffExpr img = image.shifted(n);
            if (img.terms().size() != 1) throw MathError("substitution: log of a non-monomial image");
            const auto& [k, c] = *img.terms().begin();
            if (c != CycloScalar::one(order()))
                throw MathError("substitution: log of an image with non-unit coefficient");
            for (const auto& [m, a] : k.upow) r.add_log(m, coef * CycloScalar(Rational(a), order()));
            for (const auto& [m, b] : k.expf) r.main += DiffExpr::u(m, 1, order()).scaled(coef * b);
        }
        return r;
    }
};

// Variational derivative delta/delta u = sum_n S^{-n} d/du_n.
inline DiffExpr var_der_u(const FunctionalDensity& f) {
    DiffExpr r(f.order());
    for (int n : f.u_support()) r += f.partial_u(n).shifted(-n);
    return r;
}

inline DiffExpr var_der_u(const DiffExpr& e) { return var_der_u(FunctionalDensity(e)); }

// delta/delta theta = sum_n S^{-n} d/dth_n.
inline DiffExpr var_der_theta(const DiffExpr& e) {
    DiffExpr r(e.order());
    for (int n : e.theta_support()) r += e.partial_theta(n).shifted(-n);
    return r;
}

inline DiffExpr var_der_theta(const FunctionalDensity& f) { return var_der_theta(f.main); }

// A density considered modulo (S - 1); the class of its "integral".
struct LocalFunctional {
    FunctionalDensity density;

    explicit LocalFunctional(unsigned order = CycloScalar::kDefaultOrder) : density(order) {}
    LocalFunctional(const FunctionalDensity& d) : density(d) {}
    LocalFunctional(const DiffExpr& e) : density(e) {}

    unsigned order() const { return density.order(); }
};

// Decide equality of local functionals: the difference must have vanishing
// variational derivatives and no surviving constant.  Constants do survive
// integration, so int 1 != 0.
inline bool functional_equal(const LocalFunctional& f, const LocalFunctional& g) {
    FunctionalDensity d = f.density - g.density;
    if (!var_der_u(d).is_zero()) return false;
    if (!var_der_theta(d).is_zero()) return false;
    if (!d.main.constant_term().is_zero()) return false;
    // Total log content is shift-invariant; a residual log coefficient sum
    // cannot be cancelled by the polynomial part.
    CycloScalar logsum = CycloScalar::zero(d.order());
    for (const auto& [n, c] : d.logs) logsum += c;
    if (!logsum.is_zero()) return false;
    return true;
}

inline bool functional_is_zero(const LocalFunctional& f) {
    return functional_equal(f, LocalFunctional(f.order()));
}

}  // namespace diffham
