// Exact linear solving over Q(zeta_N).
//
// Sparse Gaussian elimination with full provenance: a solve either returns a
// particular solution plus a kernel basis, or an inconsistency certificate,
// i.e. row multipliers y with y^T A = 0 and y^T b != 0.

#pragma once

#include <diffham/cyclotomic.hpp>

#include <cstddef>
#include <map>
#include <utility>
#include <vector>

namespace diffham {

using SparseRow = std::map<std::size_t, CycloScalar>;  // col -> nonzero entry

struct LinearSolution {
    bool consistent = false;
    std::vector<CycloScalar> particular;           // free variables set to zero
    std::vector<std::vector<CycloScalar>> kernel;  // basis of the homogeneous solutions
    std::map<std::size_t, CycloScalar> certificate;  // row index -> multiplier (inconsistent case)
};

namespace detail {

inline void row_axpy(SparseRow& dst, const CycloScalar& c, const SparseRow& src) {
    if (c.is_zero()) return;
    for (const auto& [col, v] : src) {
        auto it = dst.find(col);
        if (it == dst.end()) {
            CycloScalar nv = c * v;
            if (!nv.is_zero()) dst.emplace(col, nv);
        } else {
            it->second += c * v;
            if (it->second.is_zero()) dst.erase(it);
        }
    }
}

}  // namespace detail

// Solve A x = b where A is given as sparse rows over ncols unknowns.
inline LinearSolution solve_linear_sparse(const std::vector<SparseRow>& rows,
                                          const std::vector<CycloScalar>& rhs,
                                          std::size_t ncols,
                                          unsigned order = CycloScalar::kDefaultOrder) {
    struct WorkRow {
        SparseRow a;
        CycloScalar b;
        std::map<std::size_t, CycloScalar> prov;  // combination of original rows
    };
    // pivot col -> reduced row with unit pivot
    std::map<std::size_t, WorkRow> pivots;

    LinearSolution sol;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        WorkRow w{rows[r], rhs[r], {{r, CycloScalar::one(order)}}};
        // reduce against existing pivots
        for (auto it = w.a.begin(); it != w.a.end();) {
            auto pit = pivots.find(it->first);
            if (pit == pivots.end()) {
                ++it;
                continue;
            }
            CycloScalar c = -(it->second);
            const WorkRow& p = pit->second;
            detail::row_axpy(w.a, c, p.a);
            w.b += c * p.b;
            for (const auto& [orow, m] : p.prov) {
                w.prov[orow] += c * m;
                if (w.prov[orow].is_zero()) w.prov.erase(orow);
            }
            it = w.a.begin();  // entries before the old position are untouched pivots? restart to stay safe
        }
        if (w.a.empty()) {
            if (!w.b.is_zero()) {
                // verify the certificate against the original system before
                // handing it out: sum y_r A_r = 0 and sum y_r b_r != 0
                SparseRow comb;
                CycloScalar combb = CycloScalar::zero(order);
                for (const auto& [orow, m] : w.prov) {
                    detail::row_axpy(comb, m, rows[orow]);
                    combb += m * rhs[orow];
                }
                if (!comb.empty() || combb.is_zero())
                    throw MathError("internal error: invalid inconsistency certificate");
                sol.consistent = false;
                sol.certificate = w.prov;
                return sol;
            }
            continue;  // redundant row
        }
        // normalize on leading column
        auto lead = w.a.begin();
        std::size_t pcol = lead->first;
        CycloScalar inv = lead->second.inverse();
        for (auto& [col, v] : w.a) v = inv * v;
        w.b = inv * w.b;
        for (auto& [orow, m] : w.prov) m = inv * m;
        // eliminate pcol from previously stored pivot rows
        for (auto& [col, p] : pivots) {
            auto hit = p.a.find(pcol);
            if (hit == p.a.end()) continue;
            CycloScalar c = -(hit->second);
            detail::row_axpy(p.a, c, w.a);
            p.b += c * w.b;
            for (const auto& [orow, m] : w.prov) {
                p.prov[orow] += c * m;
                if (p.prov[orow].is_zero()) p.prov.erase(orow);
            }
        }
        pivots.emplace(pcol, std::move(w));
    }

    sol.consistent = true;
    sol.particular.assign(ncols, CycloScalar::zero(order));
    for (const auto& [pcol, p] : pivots) sol.particular[pcol] = p.b;

    // kernel basis: one vector per free column
    for (std::size_t col = 0; col < ncols; ++col) {
        if (pivots.count(col)) continue;
        std::vector<CycloScalar> v(ncols, CycloScalar::zero(order));
        v[col] = CycloScalar::one(order);
        for (const auto& [pcol, p] : pivots) {
            auto hit = p.a.find(col);
            if (hit != p.a.end()) v[pcol] = -hit->second;
        }
        sol.kernel.push_back(std::move(v));
    }
    return sol;
}

inline LinearSolution solve_linear(const std::vector<std::vector<CycloScalar>>& a,
                                   const std::vector<CycloScalar>& b,
                                   unsigned order = CycloScalar::kDefaultOrder) {
    std::vector<SparseRow> rows(a.size());
    std::size_t ncols = 0;
    for (std::size_t r = 0; r < a.size(); ++r) {
        if (a[r].size() > ncols) ncols = a[r].size();
        for (std::size_t c = 0; c < a[r].size(); ++c)
            if (!a[r][c].is_zero()) rows[r][c] = a[r][c];
    }
    return solve_linear_sparse(rows, b, ncols, order);
}

}  // namespace diffham
