// End-to-end acceptance run.  Prints one verdict line per criterion and exits
// with the number of failures.

#include "helpers.hpp"

#include <diffham/diffham.hpp>

#include <functional>
#include <iostream>
#include <random>
#include <string>
#include <vector>

using namespace diffham;

namespace {

int failures = 0;

void report(int num, const std::string& name, bool ok) {
    std::cout << "criterion " << (num < 10 ? "0" : "") << num << " " << name << ": "
              << (ok ? "PASS" : "FAIL") << std::endl;
    if (!ok) ++failures;
}

bool run(const std::function<bool()>& f) {
    try {
        return f();
    } catch (const std::exception& e) {
        std::cout << "  unexpected error: " << e.what() << std::endl;
        return false;
    }
}

bool catalog_hamiltonianity() {
    for (const auto& e : catalog_list())
        if (!is_hamiltonian(e.bracket)) return false;
    return true;
}

bool compatibility_matrix() {
    DiffOperator k0 = catalog_get("K0").bracket;
    DiffOperator k2t = catalog_get("K2t_1").bracket;
    for (int k = 2; k <= 5; ++k)
        if (!check_compatible(k0, catalog_get("K" + std::to_string(k) + "_1").bracket))
            return false;
    if (!check_compatible(k0, k2t)) return false;
    if (!check_compatible(k0, catalog_get("K3t_1").bracket)) return false;
    if (!check_compatible(k2t, catalog_get("Q1").bracket)) return false;
    if (!check_compatible(k0 + catalog_get("K2_1").bracket, catalog_get("Q1t").bracket))
        return false;
    DiffOperator s3 = k2t.stretched(3);
    if (!is_hamiltonian(s3)) return false;
    if (check_compatible(s3, k0)) return false;
    if (check_compatible(s3, k2t)) return false;
    return true;
}

bool normal_form() {
    FunctionalDensity logu = FunctionalDensity::log_u(0, CycloScalar(1));
    // exponential coordinates u = e^v: the bracket of v with itself under the
    // first Volterra structure collapses to the constant normal form
    LambdaBracket nf = master_bracket(catalog_get("volterra_K1").bracket, logu, logu);
    if (!(nf == parse_bracket("L^1 - L^-1"))) return false;
    // same change of coordinates on the second structure
    LambdaBracket vv = master_bracket(catalog_get("volterra_K2").bracket, logu, logu);
    LambdaBracket transformed = vv.substituted(parse_expr("exp(u[0])"));
    return transformed == catalog_get("K2t_1").bracket;
}

bool second_order_trivialization() {
    Bivector target = operator_to_bivector(catalog_get("K2t_1").bracket);
    DiffExpr f = parse_expr("exp(u[0]) + exp(u[1])");
    LocalFunctional x(-(f * DiffExpr::theta(0)));
    Bivector p0 = normal_form_bivector(1);
    if (!functional_equal(schouten(p0.value, x), target.value)) return false;
    auto res = solve_trivializing_field(1, target,
                                        {parse_expr("exp(u[0])"), parse_expr("exp(u[1])")});
    return res.found && res.characteristic == f;
}

bool conjugation() {
    DiffOperator fstar = parse_operator("-u[0]^-1 - u[1]^-1*S^1");
    DiffOperator kp = conjugate(parse_operator("S^1 - S^-1"), fstar);
    DiffOperator kp_expected = parse_operator(
        "u[1]^-1*u[2]^-1*S^2 + (u[0]^-1*u[1]^-1 + u[1]^-1*u[2]^-1)*S^1"
        " - (u[-1]^-1*u[0]^-1 + u[0]^-1*u[1]^-1)*S^-1 - u[-1]^-1*u[0]^-1*S^-2");
    if (!(kp == kp_expected)) return false;

    DiffOperator q1u = parse_operator(
        "u[1]^-1*u[4]^-1*S^4 + (u[0]^-1*u[3]^-1 + u[1]^-1*u[4]^-1)*S^3 + u[0]^-1*u[3]^-1*S^2"
        " - u[-2]^-1*u[1]^-1*S^-2 - (u[-3]^-1*u[0]^-1 + u[-2]^-1*u[1]^-1)*S^-3"
        " - u[-3]^-1*u[0]^-1*S^-4");
    auto res = solve_preimage(q1u, fstar, 3, {DiffExpr::one()});
    if (!res.found || !res.kernel.empty()) return false;
    if (!(res.solution == parse_operator("S^3 - S^-3"))) return false;
    return conjugate(res.solution, fstar) == q1u;
}

bool cohomology_dimensions() {
    auto d1 = cohomology_dims_F(1);
    if (d1 != std::vector<long>{2, 1, 0}) return false;
    for (int k = 1; k <= 4; ++k) {
        auto da = cohomology_dims_A(k);
        if ((int)da.size() != 2 * k + 1) return false;
        long binom = 1;
        for (int p = 0; p <= 2 * k; ++p) {
            if (da[p] != binom) return false;
            binom = binom * (2 * k - p) / (p + 1);
        }
    }
    auto d2 = cohomology_dims_F(2);
    if (d2[2] != 2) return false;
    auto ker = induced_shift_kernel(2, 3);
    if (ker.size() != 1) return false;
    return ker[0].to_expr()
           == parse_expr("th[0]*th[1]*th[2] + th[0]*th[1]*th[3]"
                         " + th[0]*th[2]*th[3] + th[1]*th[2]*th[3]");
}

bool stretched_nonexistence() {
    Bivector target = operator_to_bivector(parse_operator("S^1 - S^-1"));
    std::vector<DiffExpr> basis;
    for (int n = -12; n <= 12; ++n) basis.push_back(DiffExpr::u(n));
    for (int i = -12; i <= 12; ++i)
        for (int j = i; j <= 12; ++j) basis.push_back(DiffExpr::u(i) * DiffExpr::u(j));
    auto res = solve_trivializing_field(2, target, basis);
    // the solver verifies the certificate against the assembled system before
    // returning it, so a nonempty certificate here is a checked witness
    return !res.found && !res.certificate.empty();
}

bool flows() {
    DiffExpr volterra_rhs = parse_expr("u[0]*u[1] - u[-1]*u[0]");
    if (!(hamiltonian_flow(catalog_get("volterra_K1").bracket, DiffExpr::one())
          == volterra_rhs))
        return false;
    if (!(hamiltonian_flow(catalog_get("volterra_K2").bracket, parse_expr("1/2*u[0]^-1"))
          == volterra_rhs))
        return false;
    DiffExpr flow = hamiltonian_flow(catalog_get("K3t_1").bracket, DiffExpr::one());
    DiffExpr expected = parse_expr(
        "(1+I)*exp(u[0]+I*u[1]) + (1-I)*exp(u[1]+I*u[2])"
        " - (1-I)*exp(u[-1]+I*u[0]) - (1+I)*exp(u[-2]+I*u[-1])");
    if (!(flow == expected)) return false;
    // combined variable w_n = u_n + i u_{n+1}: the evolution closes up to a
    // 2-stretched flow of exponential type
    DiffExpr dtw = flow + flow.shifted(1).scaled(CycloScalar::i());
    DiffExpr target = parse_expr("(1+I)*exp(u[2]+I*u[3]) - (1+I)*exp(u[-2]+I*u[-1])");
    return dtw == target;
}

bool property_suites() {
    using testgen::random_expr;
    using testgen::random_scalar;
    using testgen::random_skew_operator;
    const int cases = 200;

    {
        std::mt19937 rng(101);
        for (int it = 0; it < cases; ++it) {
            DiffExpr f = random_expr(rng, it % 3, 3);
            FunctionalDensity d(f);
            if (it % 5 == 0) d.add_log(it % 4 - 2, random_scalar(rng));
            FunctionalDensity diff = d.shifted(1) - d;
            if (!var_der_u(diff).is_zero() || !var_der_theta(diff).is_zero()) return false;
        }
    }
    {
        std::mt19937 rng(102);
        for (int it = 0; it < cases; ++it) {
            Bivector p0 = normal_form_bivector(1 + it % 3);
            DiffExpr e = random_expr(rng, it % 3, 2);
            if (!apply_DP(p0, apply_DP(p0, e)).is_zero()) return false;
        }
    }
    {
        std::mt19937 rng(103);
        for (int it = 0; it < cases; ++it) {
            int p = 1 + it % 3, q = 1 + (it / 3) % 3;
            LocalFunctional P(random_expr(rng, p)), Q(random_expr(rng, q));
            DiffExpr rhs = schouten(Q, P).density.main;
            DiffExpr want = (p * q) % 2 == 0 ? rhs : -rhs;
            if (!functional_is_zero(LocalFunctional(schouten(P, Q).density.main - want)))
                return false;
        }
    }
    {
        std::mt19937 rng(104);
        for (int it = 0; it < cases; ++it) {
            int p = 1 + it % 2, q = 1 + (it / 2) % 3, r = 1 + (it / 6) % 2;
            LocalFunctional P(random_expr(rng, p)), Q(random_expr(rng, q)),
                R(random_expr(rng, r));
            auto sgn = [](int a, int b) { return CycloScalar((a * b) % 2 == 0 ? 1 : -1); };
            DiffExpr j = schouten(schouten(P, Q), R).density.main.scaled(sgn(p, r))
                       + schouten(schouten(Q, R), P).density.main.scaled(sgn(q, p))
                       + schouten(schouten(R, P), Q).density.main.scaled(sgn(r, q));
            if (!functional_is_zero(LocalFunctional(j))) return false;
        }
    }
    {
        std::mt19937 rng(105);
        for (int it = 0; it < cases; ++it) {
            int k = 1 + it % 2;
            Bivector p0 = normal_form_bivector(k);
            DiffExpr w = DiffExpr::theta(0) * DiffExpr::theta(1 + it % (2 * k - 1));
            DiffExpr e = w + apply_DP(p0, random_expr(rng, 1));
            auto hr = homotopy_reduce(e, k);
            if (!(e == hr.representative.to_expr() + apply_DP(p0, hr.primitive)))
                return false;
        }
    }
    {
        std::mt19937 rng(106);
        LambdaBracket B = parse_bracket("u[0]*u[1]*L^1 - u[-1]*u[0]*L^-1");
        for (int it = 0; it < cases; ++it) {
            DiffExpr f = random_expr(rng, 0), g = random_expr(rng, 0), h = random_expr(rng, 0);
            FunctionalDensity fd(f), gd(g), hd(h);
            LambdaBracket base = master_bracket(B, fd, gd);
            LambdaBracket sf = master_bracket(B, FunctionalDensity(f.shifted(1)), gd);
            LambdaBracket down(12u);
            for (const auto& [s, c] : base.coeffs()) down.add_coeff(s - 1, c);
            if (!(sf == down)) return false;
            LambdaBracket sg = master_bracket(B, fd, FunctionalDensity(g.shifted(1)));
            LambdaBracket up(12u);
            for (const auto& [s, c] : base.coeffs()) up.add_coeff(s + 1, c.shifted(1));
            if (!(sg == up)) return false;
            LambdaBracket gh = master_bracket(B, fd, FunctionalDensity(g * h));
            LambdaBracket fh = master_bracket(B, fd, hd);
            LambdaBracket pred(12u);
            for (const auto& [s, c] : base.coeffs()) pred.add_coeff(s, c * h);
            for (const auto& [s, c] : fh.coeffs()) pred.add_coeff(s, g * c);
            if (!(gh == pred)) return false;
        }
    }
    {
        std::mt19937 rng(107);
        int done = 0;
        while (done < cases) {
            DiffOperator k = random_skew_operator(rng, 3);
            if (k.coeffs().empty()) continue;
            if (!schouten_pva_crosscheck(k)) return false;
            ++done;
        }
    }
    return true;
}

bool round_trip() {
    std::mt19937 rng(108);
    for (int it = 0; it < 1000; ++it) {
        DiffExpr e = testgen::random_expr(rng, it % 3, 3);
        if (!(parse_expr(print_canonical(e)) == e)) return false;
    }
    std::uniform_int_distribution<int> len(0, 40);
    std::uniform_int_distribution<int> byte(1, 255);
    for (int it = 0; it < 500; ++it) {
        std::string s;
        int n = len(rng);
        for (int j = 0; j < n; ++j) s.push_back(static_cast<char>(byte(rng)));
        try {
            (void)parse_expr(s);
        } catch (const MathError&) {
        }
        // anything but a clean parse or a MathError escapes and fails the run
    }
    return true;
}

}  // namespace

int main() {
    report(1, "catalog hamiltonianity", run(catalog_hamiltonianity));
    report(2, "compatibility matrix", run(compatibility_matrix));
    report(3, "normal form in exponential coordinates", run(normal_form));
    report(4, "second order trivialization", run(second_order_trivialization));
    report(5, "conjugation and preimage", run(conjugation));
    report(6, "cohomology dimensions", run(cohomology_dimensions));
    report(7, "stretched nonexistence certificate", run(stretched_nonexistence));
    report(8, "hamiltonian flows", run(flows));
    report(9, "randomized property suites", run(property_suites));
    report(10, "parser round trip and robustness", run(round_trip));
    return failures;
}
