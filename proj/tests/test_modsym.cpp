#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "ellbf/curve.hpp"
#include "ellbf/errors.hpp"
#include "ellbf/modsym.hpp"
#include "ellbf/numutil.hpp"
#include "ellbf/padic.hpp"

using namespace ellbf;

namespace {

SymbolEngine engine_11a1(long bits = 128, long D = 10000) {
  return SymbolEngine(curve_from_list({0, -1, 1, -10, -20}),
                      SymbolEngine::Options{bits, D, ""});
}

}  // namespace

TEST_CASE("real periods") {
  auto eng = engine_11a1();
  const Periods& per = eng.periods();
  CHECK(per.real_components == 1);
  double omega = per.omega_plus.to_double();
  CHECK(std::abs(omega - 1.269209) < 1e-5);

  SymbolEngine e37(curve_from_list({0, 0, 1, -1, 0}), SymbolEngine::Options{128, 10000, ""});
  CHECK(e37.periods().real_components == 2);
  CHECK(e37.periods().omega_plus.to_double() > 0);
}

TEST_CASE("fricke sign of a rank zero curve") {
  auto eng = engine_11a1();
  CHECK(eng.fricke_sign() == -1);
}

TEST_CASE("symbol normalization [0]^+ = L(E,1)/omega_plus") {
  auto eng = engine_11a1(128, 100);
  CHECK(eng.symbol_plus(mpq_class(0)) == mpq_class(1, 5));
  // integer r behaves like 0
  CHECK(eng.symbol_plus(mpq_class(3)) == mpq_class(1, 5));
}

TEST_CASE("parity") {
  auto eng = engine_11a1();
  for (const auto& r : {mpq_class(1, 7), mpq_class(2, 7), mpq_class(3, 13)}) {
    CHECK(eng.symbol_plus(r) == eng.symbol_plus(mpq_class(-r)));
  }
}

TEST_CASE("hecke relation at ell = 3") {
  auto eng = engine_11a1();
  mpq_class r(1, 7);
  mpq_class lhs = eng.symbol_plus(3 * r);
  for (long k = 0; k < 3; ++k) lhs += eng.symbol_plus((r + k) / 3);
  // a_3 = -1
  CHECK(lhs == -eng.symbol_plus(r));
}

TEST_CASE("determinism across transport choices") {
  auto eng = engine_11a1();
  for (const auto& r : {mpq_class(2, 7), mpq_class(5, 49), mpq_class(-3, 13)}) {
    mpq_class base = eng.symbol_plus(r);
    CHECK(eng.symbol_plus_with(r, SymbolEngine::PathOptions{1, 1, 1}) == base);
    CHECK(eng.symbol_plus_with(r, SymbolEngine::PathOptions{-1, 1, 1}) == base);
    CHECK(eng.symbol_plus_with(r, SymbolEngine::PathOptions{0, 2, 3}) == base);
  }
}

TEST_CASE("unsupported cusp class") {
  auto eng = engine_11a1();
  CHECK_THROWS_AS(eng.symbol_plus(mpq_class(1, 11)), domain_error);
}

TEST_CASE("theta element at level 0") {
  auto eng = engine_11a1();
  ThetaElement th = eng.theta_element(7, 0, 2);
  CHECK(th.coeffs.size() == 6);
  // Galois symmetry: coefficients at a and -a agree
  for (long a = 1; a < 7; ++a) CHECK(th.coeffs.at(a) == th.coeffs.at(7 - a));
  // linearity: the sum of coefficients is the image of sum_a [a/7]^+
  mpq_class total = 0;
  for (long a = 1; a < 7; ++a) total += eng.symbol_plus(mpq_class(a, 7));
  mpz_class q = pow_p(7, 2);
  mpz_class expect = total.get_num() % q * invmod(total.get_den(), q) % q;
  if (expect < 0) expect += q;
  mpz_class got = 0;
  for (const auto& [a, c] : th.coeffs) got = (got + c) % q;
  CHECK(got == expect);
  // and that sum is (a_p - 2) [0]^+
  CHECK(total == mpq_class(-4, 5));

  CHECK_THROWS_AS(eng.theta_element(11, 0, 2), not_ordinary_error);
}

TEST_CASE("theta projection and inflation") {
  auto eng = engine_11a1();
  ThetaElement t0 = eng.theta_element(7, 0, 3);
  ThetaElement tm1 = eng.theta_element(7, -1, 3);
  ThetaElement nu = theta_inflate(tm1);
  CHECK(nu.level == 0);
  CHECK(nu.coeffs.size() == 6);
  for (const auto& [a, c] : nu.coeffs) CHECK(c == tm1.coeffs.at(1));
  ThetaElement down = theta_project(t0);
  CHECK(down.level == -1);
  mpz_class q = pow_p(7, 3);
  mpz_class s = 0;
  for (const auto& [a, c] : t0.coeffs) s = (s + c) % q;
  CHECK(down.coeffs.at(1) == s);
}

TEST_CASE("theta norm relation at n = 1") {
  auto eng = engine_11a1();
  int M = 3;
  ThetaElement t1 = eng.theta_element(7, 1, M);
  ThetaElement t0 = eng.theta_element(7, 0, M);
  ThetaElement tm1 = eng.theta_element(7, -1, M);
  mpz_class q = pow_p(7, M);
  mpz_class ap = (q - 2) % q;  // a_7 = -2
  ThetaElement rhs = theta_combine(ap, t0, q - 1, theta_inflate(tm1));
  ThetaElement lhs = theta_project(t1);
  REQUIRE(lhs.coeffs.size() == rhs.coeffs.size());
  for (const auto& [a, c] : lhs.coeffs) CHECK(c == rhs.coeffs.at(a));
}

TEST_CASE("branch components decompose theta") {
  auto eng = engine_11a1();
  ThetaElement th = eng.theta_element(7, 0, 3);
  mpz_class q = pow_p(7, 3);
  std::map<long, mpz_class> sum;
  for (int r = 0; r < 6; ++r) {
    ThetaElement er = branch_component(th, r);
    for (const auto& [a, c] : er.coeffs) sum[a] = (sum[a] + c) % q;
  }
  for (const auto& [a, c] : th.coeffs) CHECK(sum.at(a) == c);
}

TEST_CASE("branch projection conventions") {
  auto eng = engine_11a1();
  ThetaElement th = eng.theta_element(7, 0, 3);
  mpz_class q = pow_p(7, 3);
  // r = 0, n = 0: constant polynomial (1/(p-1)) sum_a coeffs[a]
  IwasawaElement p0 = project_branch(th, 0);
  mpz_class s = 0;
  for (const auto& [a, c] : th.coeffs) s = (s + c) % q;
  mpz_class expect = s * invmod(mpz_class(6), q) % q;
  CHECK(p0.at_zero() == expect);
  CHECK(p0.degree() <= 0);
  // unnormalized branch polynomial is (p-1) times the projected one
  IwasawaElement phi0 = branch_polynomial(th, 0);
  CHECK(phi0.at_zero() == s);
  // at level 1 the polynomial has degree < p
  ThetaElement th1 = eng.theta_element(7, 1, 2);
  IwasawaElement p1 = project_branch(th1, 0);
  CHECK(p1.degree() <= 6);
}

TEST_CASE("stabilized L interpolation at the trivial character") {
  auto eng = engine_11a1();
  int M = 2;
  IwasawaElement G0 = stabilized_Lp(eng, 7, 0, M);
  PadicInt alpha = hensel_unit_root(mpz_class(-2), 7, M);
  CHECK(alpha.residue == 26);
  mpz_class q = pow_p(7, M);
  mpz_class ainv = invmod(alpha.residue, q);
  mpz_class interp = (1 - ainv) * (1 - ainv) % q;
  mpz_class zero_plus = 1 * invmod(mpz_class(5), q) % q;  // [0]^+ = 1/5
  mpz_class expect = interp * zero_plus % q;
  if (expect < 0) expect += q;
  CHECK(G0.at_zero() == expect);
  auto v = valuation(make_padic(7, M, G0.at_zero()));
  CHECK(v == 0);
}

TEST_CASE("stabilized L interpolation survives one precision digit") {
  // contract: G_n(0) = (1 - 1/alpha)^2 [0]^+ mod p^{M-1} at every level
  auto eng = engine_11a1();
  int M = 4;
  mpz_class qq = pow_p(7, M - 1);
  PadicInt alpha = hensel_unit_root(mpz_class(-2), 7, M);
  mpz_class ainv = invmod(alpha.residue, pow_p(7, M));
  mpz_class expect = (1 - ainv) * (1 - ainv) % qq * invmod(mpz_class(5), qq) % qq;
  if (expect < 0) expect += qq;
  for (int n = 0; n <= 1; ++n) {
    IwasawaElement G = stabilized_Lp(eng, 7, n, M);
    CHECK(G.at_zero() % qq == expect);
  }
}

TEST_CASE("persistent symbol cache") {
  auto dir = std::filesystem::temp_directory_path() / "ellbf_symbol_cache_test";
  std::filesystem::remove_all(dir);
  mpq_class v1, v2;
  {
    SymbolEngine eng(curve_from_list({0, -1, 1, -10, -20}),
                     SymbolEngine::Options{128, 10000, dir.string()});
    v1 = eng.symbol_plus(mpq_class(2, 7));
    eng.theta_element(7, 0, 2);  // flushes the cache
  }
  bool found = false;
  for (const auto& f : std::filesystem::directory_iterator(dir))
    if (f.path().filename().string().starts_with("sym_")) found = true;
  CHECK(found);
  {
    SymbolEngine eng(curve_from_list({0, -1, 1, -10, -20}),
                     SymbolEngine::Options{128, 10000, dir.string()});
    v2 = eng.symbol_plus(mpq_class(2, 7));
  }
  CHECK(v1 == v2);
  std::filesystem::remove_all(dir);
}

TEST_CASE("dirichlet characters") {
  DirichletCharacter chi = make_character(7, 1, 1, 128);
  CHECK(chi.order == 42);
  CHECK(chi.primitive);
  // multiplicativity of the exponent table
  mpz_class q = pow_p(7, 2);
  for (long a = 1; a < 49; ++a) {
    if (a % 7 == 0) continue;
    for (long b : {2L, 5L, 12L}) {
      long ab = mpz_class(mpz_class(a) * b % q).get_si();
      CHECK((chi.exponents.at(a) + chi.exponents.at(b)) % chi.order == chi.exponents.at(ab));
    }
  }
  // |gauss sum|^2 = conductor for a primitive character
  double norm = c_abs2(chi.gauss_sum).to_double();
  CHECK(std::abs(norm - 49.0) < 1e-20);
  // imprimitive: index divisible by p at n >= 1
  DirichletCharacter chi7 = make_character(7, 1, 7, 96);
  CHECK_FALSE(chi7.primitive);
}

TEST_CASE("reconstruction respects the denominator bound") {
  // [1/7]^+ = 7/10 for this curve; a bound of 1 cannot represent it
  SymbolEngine eng(curve_from_list({0, -1, 1, -10, -20}), SymbolEngine::Options{128, 1, ""});
  CHECK_THROWS_AS(eng.symbol_plus(mpq_class(1, 7)), reconstruction_error);
}

TEST_CASE("engine rejects tiny float precision") {
  CHECK_THROWS_AS(SymbolEngine(curve_from_list({0, -1, 1, -10, -20}),
                               SymbolEngine::Options{32, 100, ""}),
                  domain_error);
}

TEST_CASE("engine rejects additive curves") {
  CHECK_THROWS_AS(SymbolEngine(curve_from_list({0, 0, 0, -1, 0}),
                               SymbolEngine::Options{128, 100, ""}),
                  additive_reduction_error);
}

TEST_CASE("stabilized L at different moduli agree after reduction") {
  auto eng = engine_11a1();
  IwasawaElement lo = stabilized_Lp(eng, 7, 1, 4);
  IwasawaElement hi = stabilized_Lp(eng, 7, 1, 8);
  REQUIRE(hi.coeffs.size() >= lo.coeffs.size());
  mpz_class q = pow_p(7, 4);
  for (size_t i = 0; i < lo.coeffs.size(); ++i) CHECK(hi.coeffs[i] % q == lo.coeffs[i]);
}

TEST_CASE("rank one curve: positive fricke sign and vanishing central value") {
  // 37a1 has sign +1, so the base L-value contribution vanishes identically
  SymbolEngine eng(curve_from_list({0, 0, 1, -1, 0}), SymbolEngine::Options{128, 10000, ""});
  CHECK(eng.fricke_sign() == 1);
  CHECK(eng.symbol_plus(mpq_class(0)) == 0);
  // Hecke at ell = 2 (a_2 = -2) with exact rationals
  auto an = an_sequence(curve_from_list({0, 0, 1, -1, 0}), 2);
  mpq_class r(1, 5);
  mpq_class lhs = eng.symbol_plus(2 * r);
  for (long k = 0; k < 2; ++k) lhs += eng.symbol_plus((r + k) / 2);
  CHECK(lhs == static_cast<long>(an[2]) * eng.symbol_plus(r));
  // parity on this curve too
  CHECK(eng.symbol_plus(mpq_class(2, 5)) == eng.symbol_plus(mpq_class(-2, 5)));
}

TEST_CASE("curve with multiplicative reduction at 2") {
  SymbolEngine eng(curve_from_list({1, 1, 0, -1, 0}), SymbolEngine::Options{128, 10000, ""});
  auto an = an_sequence(curve_from_list({1, 1, 0, -1, 0}), 3);
  mpq_class r(1, 3);
  mpq_class lhs = eng.symbol_plus(3 * r);
  for (long k = 0; k < 3; ++k) lhs += eng.symbol_plus((r + k) / 3);
  CHECK(lhs == static_cast<long>(an[3]) * eng.symbol_plus(r));
}
