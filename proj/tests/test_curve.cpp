#include <doctest.h>

#include <filesystem>
#include <numeric>
#include <random>

#include "ellbf/curve.hpp"
#include "ellbf/errors.hpp"
#include "ellbf/numutil.hpp"

using namespace ellbf;

namespace {

EllipticCurve e11a1() { return curve_from_list({0, -1, 1, -10, -20}); }
EllipticCurve e37a1() { return curve_from_list({0, 0, 1, -1, 0}); }

// full naive point count of the (possibly singular) reduction mod v
long naive_count(const EllipticCurve& E, long v) {
  long a1 = mpz_fdiv_ui(E.a1().get_mpz_t(), v), a2 = mpz_fdiv_ui(E.a2().get_mpz_t(), v);
  long a3 = mpz_fdiv_ui(E.a3().get_mpz_t(), v), a4 = mpz_fdiv_ui(E.a4().get_mpz_t(), v);
  long a6 = mpz_fdiv_ui(E.a6().get_mpz_t(), v);
  long cnt = 1;
  for (long x = 0; x < v; ++x)
    for (long y = 0; y < v; ++y) {
      long lhs = (y * y + a1 * x * y + a3 * y) % v;
      long rhs = (((x * x % v) * x % v) + a2 * x % v * x % v + a4 * x % v + a6) % v;
      if ((lhs - rhs) % v == 0) ++cnt;
    }
  return cnt;
}

}  // namespace

TEST_CASE("derive invariants") {
  EllipticCurve E = e11a1();
  CHECK(E.c4 == 496);
  CHECK(E.c6 == 20008);
  CHECK(E.disc == -161051);
  REQUIRE(E.bad_primes.size() == 1);
  CHECK(E.bad_primes[0] == 11);

  EllipticCurve F = curve_from_list({0, 0, 0, -1, 0});
  CHECK(F.disc == 64);
  REQUIRE(F.bad_primes.size() == 1);
  CHECK(F.bad_primes[0] == 2);

  CHECK_THROWS_AS(curve_from_list({0, 0, 0, 0, 0}), singular_model_error);
  // 11a1 scaled by u = 2 is not minimal
  CHECK_THROWS_AS(curve_from_list({0, -4, 8, -160, -1280}), nonminimal_model_error);
}

TEST_CASE("invariant identities on random models") {
  std::mt19937 rng(2024);
  int checked = 0;
  while (checked < 1000) {
    auto r = [&]() { return static_cast<long long>(rng() % 41) - 20; };
    mpz_class a1(static_cast<long>(r())), a2(static_cast<long>(r())), a3(static_cast<long>(r())),
        a4(static_cast<long>(r())), a6(static_cast<long>(r()));
    EllipticCurve E;
    try {
      E = derive_invariants(a1, a2, a3, a4, a6);
    } catch (const error&) {
      continue;  // singular or nonminimal random model
    }
    CHECK(4 * E.b8 == E.b2 * E.b6 - E.b4 * E.b4);
    CHECK(1728 * E.disc == E.c4 * E.c4 * E.c4 - E.c6 * E.c6);
    ++checked;
  }
}

TEST_CASE("local data at multiplicative primes") {
  LocalData d = local_data_semistable(e11a1(), mpz_class(11));
  CHECK(d.kodaira_n == 5);
  CHECK(d.split);
  CHECK(d.tamagawa == 5);
  CHECK(d.component_order == 5);

  LocalData d37 = local_data_semistable(e37a1(), mpz_class(37));
  CHECK(d37.kodaira_n == 1);
  CHECK(d37.tamagawa == 1);

  CHECK_THROWS_AS(local_data_semistable(e11a1(), mpz_class(7)), domain_error);
  CHECK_THROWS_AS(local_data_semistable(curve_from_list({0, 0, 0, -1, 0}), mpz_class(2)),
                  additive_reduction_error);
}

TEST_CASE("split criterion agrees with the reduced point count") {
  // #E~(F_v) (all points, including the node) is v when split, v + 2 when not
  std::vector<std::array<long long, 5>> curves = {
      {0, -1, 1, -10, -20},  // 11a1
      {0, 0, 1, -1, 0},      // 37a1
      {1, 1, 1, -10, -10},   // 15a1
      {1, -1, 1, -1, -14},   // 17a1
      {1, 0, 0, -4, -1},     // 21a1
      {1, 1, 0, -1, 0},      // 26b1, multiplicative at 2
  };
  for (const auto& a : curves) {
    EllipticCurve E = curve_from_list(a);
    for (const auto& v : E.bad_primes) {
      LocalData d = local_data_semistable(E, v);
      long cnt = naive_count(E, v.get_si());
      CHECK(cnt == (d.split ? v.get_si() : v.get_si() + 2));
      CHECK(d.tamagawa == (d.split ? d.kodaira_n : (d.kodaira_n % 2 == 0 ? 2 : 1)));
      CHECK(d.component_order == ord_p(E.disc, v));
    }
  }
}

TEST_CASE("point counts") {
  EllipticCurve E = e11a1();
  CHECK(count_points(E, mpz_class(2)).count == 5);
  CHECK(count_points(E, mpz_class(2)).a_ell == -2);
  CHECK(count_points(E, mpz_class(3)).count == 5);
  CHECK(count_points(E, mpz_class(3)).a_ell == -1);
  CHECK(count_points(E, mpz_class(5)).count == 5);
  CHECK(count_points(E, mpz_class(5)).a_ell == 1);
  CHECK_THROWS_AS(count_points(E, mpz_class(11)), domain_error);

  // Hasse bound for all good primes up to 100 on several curves
  for (const auto& a : std::vector<std::array<long long, 5>>{
           {0, -1, 1, -10, -20}, {0, 0, 1, -1, 0}, {1, 1, 1, -10, -10}, {1, -1, 1, -1, -14}}) {
    EllipticCurve C = curve_from_list(a);
    for (long ell : primes_up_to(100)) {
      if (mpz_divisible_ui_p(C.disc.get_mpz_t(), static_cast<unsigned long>(ell))) continue;
      PointCount pc = count_points(C, mpz_class(ell));
      CHECK(pc.a_ell * pc.a_ell <= 4 * ell);
    }
  }
}

TEST_CASE("a_n sequence") {
  EllipticCurve E = e11a1();
  auto an = an_sequence(E, 200);
  CHECK(an[1] == 1);
  CHECK(an[2] == -2);
  CHECK(an[3] == -1);
  CHECK(an[4] == 2);
  CHECK(an[5] == 1);
  CHECK(an[6] == 2);
  CHECK(an[9] == -2);
  CHECK(an[11] == 1);
  CHECK(an[13] == 4);

  // multiplicativity and the ell-power recursions, exactly, for n <= 200
  for (long n = 2; n <= 200; ++n) {
    for (long m = 2; m * n <= 200; ++m) {
      if (std::gcd(n, m) == 1) CHECK(an[static_cast<size_t>(n * m)] == an[n] * an[m]);
    }
  }
  for (long ell : primes_up_to(14)) {
    if (ell == 11) {
      CHECK(an[121] == an[11] * an[11]);
      continue;
    }
    for (long pk = ell * ell; pk <= 200; pk *= ell) {
      long long prev2 = (pk == ell * ell) ? 1 : an[static_cast<size_t>(pk / ell / ell)];
      CHECK(an[static_cast<size_t>(pk)] ==
            an[static_cast<size_t>(ell)] * an[static_cast<size_t>(pk / ell)] - ell * prev2);
    }
  }
}

TEST_CASE("a_n cache round trip") {
  auto dir = std::filesystem::temp_directory_path() / "ellbf_an_cache_test";
  std::filesystem::remove_all(dir);
  EllipticCurve E = e11a1();
  auto a1 = an_sequence(E, 50, dir.string());
  REQUIRE(std::filesystem::exists(dir));
  bool found = false;
  for (const auto& f : std::filesystem::directory_iterator(dir)) found |= f.is_regular_file();
  CHECK(found);
  auto a2 = an_sequence(E, 50, dir.string());
  CHECK(a1 == a2);
  // extending the bound keeps cached values
  auto a3 = an_sequence(E, 80, dir.string());
  for (long n = 1; n <= 50; ++n) CHECK(a3[static_cast<size_t>(n)] == a1[static_cast<size_t>(n)]);
  std::filesystem::remove_all(dir);
}

TEST_CASE("torsion") {
  TorsionInfo t = torsion_order(e11a1(), 7);
  CHECK(t.order == 5);
  CHECK(t.confirmed);
  CHECK(t.p_part == 1);
  TorsionInfo t5 = torsion_order(e11a1(), 5);
  CHECK(t5.p_part == 5);

  TorsionInfo t37 = torsion_order(e37a1(), 3);
  CHECK(t37.order == 1);
  CHECK(t37.p_part == 1);

  // a curve with 2-power torsion; the Lutz-Nagell search is the proof, the
  // gcd bound must be a multiple of it
  TorsionInfo t15 = torsion_order(curve_from_list({1, 1, 1, -10, -10}), 2);
  CHECK(t15.order > 1);
  CHECK(t15.p_part == t15.order);  // all torsion here is 2-power
  CHECK(t15.gcd_bound % t15.order == 0);
}

TEST_CASE("good ordinary") {
  EllipticCurve E = e11a1();
  CHECK(is_good_ordinary(E, 7));
  CHECK_FALSE(is_good_ordinary(E, 11));
  auto an = an_sequence(E, 19);
  CHECK(is_good_ordinary(E, 19) == (an[19] % 19 != 0));
  CHECK_THROWS_AS(is_good_ordinary(E, 2), domain_error);
}
