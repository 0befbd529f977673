// Exact arithmetic in the cyclotomic field Q(zeta_N).
//
// Every scalar in the engine lives here: a CycloScalar is a residue modulo
// the N-th cyclotomic polynomial with rational coefficients.  The default
// order is 12, which contains both i (= zeta^3) and a primitive third root
// of unity (= zeta^4).  No floating point anywhere.

#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace diffham {

using Rational = mpq_class;
using BigInt = mpz_class;

class MathError : public std::runtime_error {
public:
    explicit MathError(const std::string& what) : std::runtime_error(what) {}
};

class DivisionByZero : public MathError {
public:
    DivisionByZero() : MathError("division by zero") {}
};

namespace detail {

// Cyclotomic polynomial Phi_N as a monic integer polynomial (index = degree).
inline std::vector<BigInt> cyclotomic_poly(unsigned n) {
    static std::map<unsigned, std::vector<BigInt>> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    // x^n - 1 divided by the product of Phi_d over proper divisors d of n.
    std::vector<BigInt> num(n + 1, 0);
    num[0] = -1;
    num[n] = 1;
    for (unsigned d = 1; d < n; ++d) {
        if (n % d != 0) continue;
        std::vector<BigInt> phi_d = cyclotomic_poly(d);
        // Exact division num /= phi_d (both monic up to the constant case d=1).
        std::vector<BigInt> quot(num.size() - phi_d.size() + 1, 0);
        std::vector<BigInt> rem = num;
        for (int k = static_cast<int>(quot.size()) - 1; k >= 0; --k) {
            BigInt c = rem[k + phi_d.size() - 1];  // phi_d is monic
            quot[k] = c;
            if (c != 0) {
                for (size_t j = 0; j < phi_d.size(); ++j)
                    rem[k + j] -= c * phi_d[j];
            }
        }
        num = quot;
    }
    cache[n] = num;
    return num;
}

inline unsigned euler_phi(unsigned n) {
    return static_cast<unsigned>(cyclotomic_poly(n).size()) - 1;
}

}  // namespace detail

// An element of Q(zeta_N), stored as a reduced residue mod Phi_N.
// Representation is canonical: equality is coefficient-wise.
class CycloScalar {
public:
    CycloScalar() : order_(kDefaultOrder), coeffs_(detail::euler_phi(kDefaultOrder)) {}

    explicit CycloScalar(const Rational& r, unsigned order = kDefaultOrder)
        : order_(order), coeffs_(detail::euler_phi(order)) {
        coeffs_[0] = r;
        coeffs_[0].canonicalize();
    }

    CycloScalar(long num, long den = 1, unsigned order = kDefaultOrder)
        : CycloScalar(Rational(num, den), order) {
        if (den == 0) throw DivisionByZero();
    }

    static CycloScalar zero(unsigned order = kDefaultOrder) { return CycloScalar(Rational(0), order); }
    static CycloScalar one(unsigned order = kDefaultOrder) { return CycloScalar(Rational(1), order); }

    // zeta_N^k
    static CycloScalar zeta_pow(long k, unsigned order = kDefaultOrder) {
        CycloScalar z = zero(order);
        long deg = static_cast<long>(z.coeffs_.size());
        long kk = ((k % static_cast<long>(order)) + order) % order;
        if (kk < deg) {
            z.coeffs_[kk] = 1;
        } else {
            std::vector<Rational> poly(kk + 1);
            poly[kk] = 1;
            z.coeffs_ = reduce(poly, order);
        }
        return z;
    }

    // i = zeta_12^3 in the default field; requires 4 | N.
    static CycloScalar i(unsigned order = kDefaultOrder) {
        if (order % 4 != 0) throw MathError("field Q(zeta_" + std::to_string(order) + ") does not contain i");
        return zeta_pow(order / 4, order);
    }

    // primitive third root of unity = zeta_12^4; requires 3 | N.
    static CycloScalar eps(unsigned order = kDefaultOrder) {
        if (order % 3 != 0) throw MathError("field Q(zeta_" + std::to_string(order) + ") does not contain eps");
        return zeta_pow(order / 3, order);
    }

    unsigned order() const { return order_; }
    const std::vector<Rational>& coeffs() const { return coeffs_; }

    bool is_zero() const {
        for (const auto& c : coeffs_)
            if (c != 0) return false;
        return true;
    }
    bool is_rational() const {
        for (size_t k = 1; k < coeffs_.size(); ++k)
            if (coeffs_[k] != 0) return false;
        return true;
    }
    Rational rational_part() const { return coeffs_[0]; }

    CycloScalar operator-() const {
        CycloScalar r = *this;
        for (auto& c : r.coeffs_) c = -c;
        return r;
    }

    CycloScalar operator+(const CycloScalar& o) const {
        const CycloScalar& a = *this;
        check_order(a, o);
        CycloScalar r = a;
        for (size_t k = 0; k < r.coeffs_.size(); ++k) r.coeffs_[k] += o.coeffs_[k];
        return r;
    }
    CycloScalar operator-(const CycloScalar& o) const { return *this + (-o); }

    CycloScalar operator*(const CycloScalar& o) const {
        check_order(*this, o);
        size_t deg = coeffs_.size();
        std::vector<Rational> prod(2 * deg - 1);
        for (size_t a = 0; a < deg; ++a) {
            if (coeffs_[a] == 0) continue;
            for (size_t b = 0; b < deg; ++b) {
                if (o.coeffs_[b] == 0) continue;
                prod[a + b] += coeffs_[a] * o.coeffs_[b];
            }
        }
        CycloScalar r = zero(order_);
        r.coeffs_ = reduce(prod, order_);
        return r;
    }

    CycloScalar inverse() const {
        if (is_zero()) throw DivisionByZero();
        if (is_rational()) {
            CycloScalar r = zero(order_);
            r.coeffs_[0] = 1 / coeffs_[0];
            return r;
        }
        // Extended Euclid in Q[x] against Phi_N.
        const auto& phiz = detail::cyclotomic_poly(order_);
        std::vector<Rational> r0(phiz.size());
        for (size_t k = 0; k < phiz.size(); ++k) r0[k] = Rational(phiz[k]);
        std::vector<Rational> r1 = coeffs_;
        trim(r1);
        std::vector<Rational> s0{}, s1{Rational(1)};
        while (!r1.empty()) {
            auto [q, rem] = divmod(r0, r1);
            std::vector<Rational> s2 = sub(s0, mul(q, s1));
            r0 = r1;
            r1 = rem;
            s0 = s1;
            s1 = s2;
        }
        // r0 is the (nonzero constant) gcd; s0 * this == r0 (mod Phi).
        if (r0.size() != 1) throw MathError("inverse: gcd with cyclotomic polynomial not constant");
        Rational g = r0[0];
        std::vector<Rational> inv(s0.size());
        for (size_t k = 0; k < s0.size(); ++k) inv[k] = s0[k] / g;
        CycloScalar out = zero(order_);
        out.coeffs_ = reduce(inv, order_);
        return out;
    }

    CycloScalar operator/(const CycloScalar& o) const { return *this * o.inverse(); }

    CycloScalar pow(long e) const {
        if (e < 0) return inverse().pow(-e);
        CycloScalar acc = one(order_);
        CycloScalar base = *this;
        unsigned long ue = static_cast<unsigned long>(e);
        while (ue) {
            if (ue & 1) acc = acc * base;
            base = base * base;
            ue >>= 1;
        }
        return acc;
    }

    CycloScalar& operator+=(const CycloScalar& o) { return *this = *this + o; }
    CycloScalar& operator-=(const CycloScalar& o) { return *this = *this - o; }
    CycloScalar& operator*=(const CycloScalar& o) { return *this = *this * o; }

    bool operator==(const CycloScalar& o) const { return order_ == o.order_ && coeffs_ == o.coeffs_; }
    bool operator!=(const CycloScalar& o) const { return !(*this == o); }

    // Total order, used for canonical term sorting only.
    int cmp(const CycloScalar& o) const {
        if (order_ != o.order_) return order_ < o.order_ ? -1 : 1;
        for (size_t k = 0; k < coeffs_.size(); ++k) {
            int c = ::cmp(coeffs_[k], o.coeffs_[k]);
            if (c != 0) return c;
        }
        return 0;
    }
    bool operator<(const CycloScalar& o) const { return cmp(o) < 0; }

    static constexpr unsigned kDefaultOrder = 12;

private:
    static void check_order(const CycloScalar& a, const CycloScalar& b) {
        if (a.order_ != b.order_) throw MathError("mixed cyclotomic field orders");
    }

    static void trim(std::vector<Rational>& p) {
        while (!p.empty() && p.back() == 0) p.pop_back();
    }

    static std::vector<Rational> mul(const std::vector<Rational>& a, const std::vector<Rational>& b) {
        if (a.empty() || b.empty()) return {};
        std::vector<Rational> r(a.size() + b.size() - 1);
        for (size_t i = 0; i < a.size(); ++i)
            for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
        trim(r);
        return r;
    }

    static std::vector<Rational> sub(const std::vector<Rational>& a, const std::vector<Rational>& b) {
        std::vector<Rational> r = a;
        if (r.size() < b.size()) r.resize(b.size());
        for (size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
        trim(r);
        return r;
    }

    static std::pair<std::vector<Rational>, std::vector<Rational>> divmod(std::vector<Rational> a,
                                                                          const std::vector<Rational>& b) {
        std::vector<Rational> q;
        if (a.size() >= b.size()) q.assign(a.size() - b.size() + 1, Rational(0));
        while (a.size() >= b.size() && !a.empty()) {
            Rational c = a.back() / b.back();
            size_t shift = a.size() - b.size();
            q[shift] = c;
            for (size_t j = 0; j < b.size(); ++j) a[shift + j] -= c * b[j];
            trim(a);
        }
        trim(q);
        return {q, a};
    }

    static std::vector<Rational> reduce(std::vector<Rational> poly, unsigned order) {
        const auto& phi = detail::cyclotomic_poly(order);
        size_t deg = phi.size() - 1;
        for (size_t k = poly.size(); k-- > deg;) {
            Rational c = poly[k];
            if (c == 0) continue;
            poly[k] = 0;
            for (size_t j = 0; j < deg; ++j) poly[k - deg + j] -= c * Rational(phi[j]);
        }
        poly.resize(deg);
        for (auto& c : poly) c.canonicalize();
        return poly;
    }

    unsigned order_;
    std::vector<Rational> coeffs_;
};

inline CycloScalar operator*(long a, const CycloScalar& b) { return CycloScalar(a, 1, b.order()) * b; }

}  // namespace diffham
