#include <diffham/diffham.hpp>

#include <catch2/catch_amalgamated.hpp>

using namespace diffham;

TEST_CASE("commutative part of the term algebra") {
    DiffExpr a = DiffExpr::u(0) * DiffExpr::u(1);
    DiffExpr b = DiffExpr::u(1) * DiffExpr::u(0);
    CHECK(a == b);
    CHECK((a - b).is_zero());
    CHECK(DiffExpr::u(0, 3) == DiffExpr::u(0) * DiffExpr::u(0) * DiffExpr::u(0));
    CHECK((DiffExpr::u(0, 2) * DiffExpr::u(0, -2)) == DiffExpr::one());
}

TEST_CASE("theta factors anticommute") {
    DiffExpr t0 = DiffExpr::theta(0), t1 = DiffExpr::theta(1);
    CHECK(t0 * t1 == -(t1 * t0));
    CHECK((t0 * t0).is_zero());
    CHECK((t0 * t1 * t0).is_zero());
    DiffExpr t2 = DiffExpr::theta(2);
    // moving t2 across two factors gives a plus sign
    CHECK(t2 * t0 * t1 == t0 * t1 * t2);
}

TEST_CASE("shift acts on all indices") {
    DiffExpr e = parse_expr("u[0]*u[1]*th[2] + exp(u[-1])");
    CHECK(e.shifted(3) == parse_expr("u[3]*u[4]*th[5] + exp(u[2])"));
    CHECK(e.shifted(2).shifted(-2) == e);
}

TEST_CASE("exponential factors merge their linear forms") {
    DiffExpr p = parse_expr("exp(u[0])") * parse_expr("exp(I*u[0]+u[1])");
    CHECK(p == parse_expr("exp((1+I)*u[0]+u[1])"));
    CHECK(parse_expr("exp(u[0])") * parse_expr("exp(-u[0])") == DiffExpr::one());
}

TEST_CASE("partial derivatives in u") {
    CHECK(parse_expr("u[0]^3").partial_u(0) == parse_expr("3*u[0]^2"));
    CHECK(parse_expr("u[0]^-1").partial_u(0) == parse_expr("-u[0]^-2"));
    CHECK(parse_expr("exp(2*u[1])").partial_u(1) == parse_expr("2*exp(2*u[1])"));
    CHECK(parse_expr("u[0]*u[1]").partial_u(2).is_zero());
    // product rule across the u power and the exponential
    CHECK(parse_expr("u[0]*exp(u[0])").partial_u(0)
          == parse_expr("exp(u[0]) + u[0]*exp(u[0])"));
}

TEST_CASE("left theta derivative carries the position sign") {
    DiffExpr t01 = DiffExpr::theta(0) * DiffExpr::theta(1);
    CHECK(t01.partial_theta(0) == DiffExpr::theta(1));
    CHECK(t01.partial_theta(1) == -DiffExpr::theta(0));
    DiffExpr t012 = t01 * DiffExpr::theta(2);
    CHECK(t012.partial_theta(1) == -(DiffExpr::theta(0) * DiffExpr::theta(2)));
    CHECK(t012.partial_theta(3).is_zero());
}

TEST_CASE("theta degree bookkeeping") {
    CHECK(parse_expr("u[0]*th[1]*th[2]").theta_degree() == 2);
    CHECK(DiffExpr::zero().theta_degree() == -1);
    CHECK_THROWS_AS(parse_expr("th[0] + th[0]*th[1]").theta_degree(), MathError);
    DiffExpr mixed = parse_expr("th[0] + th[0]*th[1]");
    CHECK(mixed.theta_component(1) == parse_expr("th[0]"));
    CHECK(mixed.theta_component(2) == parse_expr("th[0]*th[1]"));
}

TEST_CASE("variational derivative in u") {
    // delta/delta u of u0 u1 collects both shifts
    CHECK(var_der_u(parse_expr("u[0]*u[1]")) == parse_expr("u[1] + u[-1]"));
    CHECK(var_der_u(parse_expr("u[0]^2")) == parse_expr("2*u[0]"));
    // total differences are annihilated
    DiffExpr f = parse_expr("u[0]^2*u[3] + exp(u[1]+u[2])");
    CHECK(var_der_u(f.shifted(1) - f).is_zero());
}

TEST_CASE("variational derivative in theta") {
    CHECK(var_der_theta(parse_expr("u[0]*th[1]")) == parse_expr("u[-1]"));
    DiffExpr f = parse_expr("u[1]*th[0]*th[2]");
    CHECK(var_der_theta(f.shifted(1) - f).is_zero());
}

TEST_CASE("densities with logarithmic terms") {
    FunctionalDensity lg = FunctionalDensity::log_u(0, CycloScalar(2));
    CHECK(var_der_u(lg) == parse_expr("2*u[0]^-1"));
    FunctionalDensity sum = lg + FunctionalDensity(parse_expr("u[0]*u[1]"));
    CHECK(var_der_u(sum) == parse_expr("2*u[0]^-1 + u[1] + u[-1]"));
    CHECK(lg.shifted(2).logs.count(2) == 1);
}

TEST_CASE("substitution of coordinates") {
    // u = e^v turns monomials into exponentials
    DiffExpr m = parse_expr("u[0]*u[1]");
    CHECK(m.substituted(parse_expr("exp(u[0])")) == parse_expr("exp(u[0]+u[1])"));
    CHECK(parse_expr("u[0]^-1").substituted(parse_expr("exp(u[0])"))
          == parse_expr("exp(-u[0])"));
    // log(e^v) = v
    FunctionalDensity lg = FunctionalDensity::log_u(0, CycloScalar(1));
    FunctionalDensity sub = lg.substituted(parse_expr("exp(u[0])"));
    CHECK_FALSE(sub.has_logs());
    CHECK(sub.main == parse_expr("u[0]"));
    // polynomial image of a positive power
    CHECK(parse_expr("u[1]^2").substituted(parse_expr("u[0]+u[1]"))
          == parse_expr("u[1]^2 + 2*u[1]*u[2] + u[2]^2"));
}

TEST_CASE("functional classes identify total differences") {
    LocalFunctional a(parse_expr("u[0]*u[1]"));
    LocalFunctional b(parse_expr("u[1]*u[2]"));
    CHECK(functional_equal(a, b));
    CHECK_FALSE(functional_equal(a, LocalFunctional(parse_expr("u[0]^2"))));
    CHECK(functional_is_zero(LocalFunctional(parse_expr("u[1]^2 - u[0]^2"))));
    CHECK_FALSE(functional_is_zero(LocalFunctional(parse_expr("u[0]"))));
    // a bare constant is not a total difference
    CHECK_FALSE(functional_is_zero(LocalFunctional(DiffExpr::one())));
    // but log densities with cancelling coefficients are
    FunctionalDensity d = FunctionalDensity::log_u(0, CycloScalar(1));
    d.add_log(3, CycloScalar(-1));
    d.main = d.main + parse_expr("u[1] - u[0]");
    CHECK(functional_is_zero(LocalFunctional(d)));
}
