// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ellbf/bf.hpp"
#include "ellbf/curve.hpp"
#include "ellbf/errors.hpp"
#include "ellbf/iwasawa.hpp"
#include "ellbf/modsym.hpp"
#include "ellbf/numutil.hpp"
#include "ellbf/padic.hpp"
#include "ellbf/verifier.hpp"

#ifndef ELLBF_FIXTURE_DIR
#define ELLBF_FIXTURE_DIR "fixtures"
#endif

using namespace ellbf;

namespace {

int failures = 0;

void run(int number, const std::string& title, const std::function<void()>& body) {
  auto start = std::chrono::steady_clock::now();
  std::string detail;
  bool ok = true;
  try {
    body();
  } catch (const std::exception& e) {
    ok = false;
    detail = e.what();
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("[%s] criterion %2d: %s (%.2f s)%s%s\n", ok ? "PASS" : "FAIL", number, title.c_str(),
              secs, detail.empty() ? "" : " -- ", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::runtime_error(msg);
}

EllipticCurve e11a1() { return curve_from_list({0, -1, 1, -10, -20}); }

// q prod_{k>=1} (1-q^k)^2 (1-q^{11k})^2, expanded exactly to q^bound
std::vector<long long> eta_product_an(int bound) {
  std::vector<long long> poly(static_cast<size_t>(bound), 0);
  poly[0] = 1;
  auto times_one_minus_qk = [&](int k) {
    for (int i = bound - 1; i >= k; --i) poly[static_cast<size_t>(i)] -= poly[static_cast<size_t>(i - k)];
  };
  for (int k = 1; k < bound; ++k) {
    times_one_minus_qk(k);
    times_one_minus_qk(k);
    if (11 * k < bound) {
      times_one_minus_qk(11 * k);
      times_one_minus_qk(11 * k);
    }
  }
  std::vector<long long> an(static_cast<size_t>(bound) + 1, 0);
  for (int n = 1; n <= bound; ++n) an[static_cast<size_t>(n)] = poly[static_cast<size_t>(n - 1)];
  return an;
}

SelmerFixture load_bundled_fixture(int n) {
  return load_fixture(std::string(ELLBF_FIXTURE_DIR) + "/11a1_p7_n" + std::to_string(n) + ".json");
}

SelmerFixture corrupted_fixture() {
  nlohmann::json j = fixture_to_json(load_bundled_fixture(0));
  j["sel_p_infty_order"] = "7";
  j["source"] = "negative control";
  return fixture_from_json(j);
}

mpz_class embed(const mpq_class& x, long p, int M) {
  mpz_class q = pow_p(p, M);
  mpz_class r = x.get_num() % q * invmod(x.get_den(), q) % q;
  if (r < 0) r += q;
  return r;
}

FiniteBFSystem random_perfect_system(long p, const std::vector<int>& exps, std::mt19937& rng) {
  int m = *std::max_element(exps.begin(), exps.end());
  size_t n = exps.size();
  long long pm = pow_p(p, m).get_si();
  for (int attempt = 0; attempt < 500; ++attempt) {
    FiniteBFSystem S;
    S.p = p;
    S.m = m;
    S.exponents = exps;
    S.pairing.assign(n, std::vector<long long>(n, 0));
    S.bockstein.assign(n, std::vector<long long>(n, 0));
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) {
        long long scale = pow_p(p, m - std::min(exps[i], exps[j])).get_si();
        S.pairing[i][j] = scale * (rng() % (pm / scale));
        long long bscale = exps[j] > exps[i] ? pow_p(p, exps[j] - exps[i]).get_si() : 1;
        long long bmod = pow_p(p, exps[j]).get_si();
        S.bockstein[j][i] = bscale * (rng() % std::max<long long>(bmod / bscale, 1));
      }
    validate_system(S);
    if (pairing_perfect(S)) return S;
  }
  throw std::runtime_error("no perfect pairing found for shape");
}

FiniteBFSystem shift_action_system(long p, int e, long diag, long offdiag) {
  size_t n = static_cast<size_t>(p - 1);
  long long pe = pow_p(p, e).get_si();
  FiniteBFSystem S;
  S.p = p;
  S.m = e;
  S.exponents.assign(n, e);
  S.pairing.assign(n, std::vector<long long>(n, 0));
  for (size_t i = 0; i < n; ++i) S.pairing[i][i] = 1;
  S.bockstein.assign(n, std::vector<long long>(n, 0));
  for (size_t i = 0; i < n; ++i) {
    S.bockstein[i][i] = diag % pe;
    S.bockstein[(i + 1) % n][i] = offdiag % pe;
  }
  Mat shift(n, std::vector<long long>(n, 0));
  for (size_t i = 0; i < n; ++i) shift[(i + 1) % n][i] = 1;
  S.action = {shift};
  validate_system(S);
  return S;
}

// shared engines so the exact symbol cache is reused across criteria
SymbolEngine& engine_B128() {
  static SymbolEngine eng(e11a1(), SymbolEngine::Options{128, 10000, ""});
  return eng;
}

SymbolEngine& engine_B256() {
  static SymbolEngine eng(e11a1(), SymbolEngine::Options{256, 10000, ""});
  return eng;
}

void check_trivial_character_interpolation(SymbolEngine& eng, int M) {
  IwasawaElement G0 = stabilized_Lp(eng, 7, 0, M);
  PadicInt alpha = hensel_unit_root(mpz_class(-2), 7, M);
  mpz_class q49 = pow_p(7, 2);
  require(alpha.residue % q49 == 26, "alpha != 26 mod 49");
  mpz_class q = pow_p(7, M);
  mpz_class ainv = invmod(alpha.residue, q);
  mpz_class expect = (1 - ainv) * (1 - ainv) % q * embed(mpq_class(1, 5), 7, M) % q;
  if (expect < 0) expect += q;
  require(G0.at_zero() % q49 == expect % q49, "G_0(0) != (1 - 1/alpha)^2 [0]^+ mod 7^2");
}

NewtonInvariants g1_invariants(SymbolEngine& eng, int M) {
  IwasawaElement G1 = stabilized_Lp(eng, 7, 1, M);
  return newton_invariants(G1);
}

TheoremReport theorem_at(SymbolEngine& eng, int n, const SelmerFixture& fix, int M,
                         mpfr_prec_t B) {
  VerifyConfig cfg;
  cfg.padic_precision = M;
  cfg.float_bits = B;
  return check_theorem(eng, 7, n, fix, cfg);
}

}  // namespace

int main() {
  std::printf("acceptance suite: path-integral identity artifact\n");

  run(1, "a_1..a_13 match the eta-product oracle", [] {
    auto oracle = eta_product_an(13);
    auto an = an_sequence(e11a1(), 13);
    for (int n = 1; n <= 13; ++n)
      require(an[static_cast<size_t>(n)] == oracle[static_cast<size_t>(n)],
              "a_" + std::to_string(n) + " mismatch");
  });

  run(2, "local data at v = 11: I_5, split, c = 5, component order 5", [] {
    LocalData d = local_data_semistable(e11a1(), mpz_class(11));
    require(d.kodaira_n == 5, "kodaira");
    require(d.split, "split");
    require(d.tamagawa == 5, "tamagawa");
    require(d.component_order == 5, "component order");
  });

  run(3, "modular-symbol normalization [0]^+ = 1/5 (B = 128, D = 100)", [] {
    SymbolEngine eng(e11a1(), SymbolEngine::Options{128, 100, ""});
    require(eng.symbol_plus(mpq_class(0)) == mpq_class(1, 5), "[0]^+ != 1/5");
  });

  run(4, "Hecke property for ell in {2,3}, 20 random r with denominator <= 50", [] {
    SymbolEngine& eng = engine_B128();
    auto an = an_sequence(e11a1(), 3);
    std::mt19937 rng(20240811);
    int done = 0;
    while (done < 20) {
      long den = 1 + rng() % 50;
      if (den % 11 == 0) continue;
      long num = 1 + rng() % (2 * den);
      mpq_class r(num, den);
      r.canonicalize();
      for (long ell : {2L, 3L}) {
        mpq_class lhs = eng.symbol_plus(ell * r);
        for (long k = 0; k < ell; ++k) lhs += eng.symbol_plus((r + k) / ell);
        require(lhs == static_cast<long>(an[static_cast<size_t>(ell)]) * eng.symbol_plus(r),
                "T_" + std::to_string(ell) + " fails at r = " + r.get_str());
      }
      ++done;
    }
  });

  run(5, "theta norm relation mod 7^3 at n = 1 and n = 2", [] {
    SymbolEngine& eng = engine_B128();
    int M = 3;
    mpz_class q = pow_p(7, M);
    mpz_class ap = (q - 2) % q;  // a_7 = -2
    for (int n = 1; n <= 2; ++n) {
      ThetaElement tn = eng.theta_element(7, n, M);
      ThetaElement tn1 = eng.theta_element(7, n - 1, M);
      ThetaElement tn2 = eng.theta_element(7, n - 2, M);
      ThetaElement lhs = theta_project(tn);
      ThetaElement rhs = theta_combine(ap, tn1, q - 1, theta_inflate(tn2));
      require(lhs.coeffs.size() == rhs.coeffs.size(), "coefficient count mismatch");
      for (const auto& [a, c] : lhs.coeffs)
        require(c == rhs.coeffs.at(a), "congruence fails at sigma_" + std::to_string(a) +
                                           ", n = " + std::to_string(n));
    }
  });

  run(6, "trivial-character interpolation: G_0(0) = (1-1/alpha)^2 [0]^+ mod 7^2", [] {
    check_trivial_character_interpolation(engine_B128(), 2);
  });

  run(7, "Iwasawa invariants of G_1 for (11a1, p = 7) are (0, 0)", [] {
    auto inv = g1_invariants(engine_B128(), 8);
    require(inv == NewtonInvariants{0, 0},
            "got (" + std::to_string(inv.mu) + ", " + std::to_string(inv.lambda) + ")");
    // stability across levels: once p^n > lambda the invariants are frozen
    IwasawaElement G2 = stabilized_Lp(engine_B128(), 7, 2, 8);
    require(newton_invariants(G2) == inv, "invariants changed between G_1 and G_2");
  });

  run(8, "BF oracle equivalence over all shapes of order <= p^4, p in {3,5}", [] {
    std::mt19937 rng(424242);
    std::vector<std::vector<int>> shapes = {{1},          {2},       {1, 1},       {3},
                                            {2, 1},       {1, 1, 1}, {4},          {3, 1},
                                            {2, 2},       {2, 1, 1}, {1, 1, 1, 1}};
    for (long p : {3L, 5L}) {
      for (const auto& shape : shapes) {
        for (int trial = 0; trial < 20; ++trial) {
          FiniteBFSystem S = random_perfect_system(p, shape, rng);
          mpz_class brute = bf_sum_bruteforce(S);
          require(brute >= 0, "negative sum");
          require(brute == S.group_order() * bockstein_kernel_order(S),
                  "brute force != |G| |ker delta|");
          require(brute == bf_sum_closed(S), "closed form mismatch");
        }
      }
    }
  });

  run(9, "isotypic product identity on systems with F_p^x-action", [] {
    int count = 0;
    std::mt19937 rng(5150);
    std::vector<std::pair<long, int>> layouts = {{3, 1}, {3, 2}, {5, 1}};
    for (const auto& [p, e] : layouts) {
      int trials = (p == 5) ? 4 : 3;
      for (int trial = 0; trial < trials; ++trial) {
        long pe = pow_p(p, e).get_si();
        auto S = shift_action_system(p, e, rng() % pe, rng() % pe);
        auto res = isotypic_split_sum(S);  // asserts product == total internally
        mpz_class prod = 1;
        for (const auto& [r, v] : res.component_values) prod *= v;
        require(prod == res.value, "product mismatch");
        ++count;
      }
    }
    require(count >= 10, "fewer than 10 systems exercised");
  });

  run(10, "end-to-end identity at (11a1, p = 7, n = 0, 1) plus negative control", [] {
    SymbolEngine& eng = engine_B128();
    for (int n = 0; n <= 1; ++n) {
      TheoremReport r = theorem_at(eng, n, load_bundled_fixture(n), 8, 128);
      require(r.pass, "verdict fail at n = " + std::to_string(n));
      require(r.lhs_value == 1 && r.rhs_value == 1,
              "sides differ from 1 at n = " + std::to_string(n));
    }
    TheoremReport bad = theorem_at(eng, 0, corrupted_fixture(), 8, 128);
    require(!bad.pass, "negative control passed");
    require(bad.rhs_value == 7 && bad.lhs_value == 1, "negative control factors wrong");
    std::string text = report_to_text(bad, e11a1());
    require(text.find("discrepancy") != std::string::npos, "no itemized discrepancy");
  });

  run(11, "growth formula for synthetic (mu, lambda) in {0,1,2}^2", [] {
    long p = 3;
    int M = 70;
    std::mt19937 rng(31337);
    for (int mu = 0; mu <= 2; ++mu)
      for (int lambda = 0; lambda <= 2; ++lambda) {
        std::vector<mpz_class> dist(static_cast<size_t>(lambda) + 1, mpz_class(0));
        dist[static_cast<size_t>(lambda)] = 1;
        if (lambda > 0) dist[0] = p * (1 + static_cast<long>(rng() % 3));
        IwasawaElement d = make_iwasawa(p, M, dist);
        IwasawaElement u = make_iwasawa(
            p, M, {mpz_class(1 + 2 * p), mpz_class(static_cast<long>(rng() % 9))});
        IwasawaElement g = iw_scale(iw_mul(d, u), pow_p(p, mu));
        auto inv = newton_invariants(g);
        require(inv.mu == mu && inv.lambda == lambda, "synthetic invariants wrong");
        int prev = product_valuation(g, 0);
        for (int n = 1; n <= 3; ++n) {
          int cur = product_valuation(g, n);
          if (pow_p(p, n - 1) > lambda) {
            long phi = mpz_class(pow_p(p, n) - pow_p(p, n - 1)).get_si();
            require(cur - prev == mu * phi + lambda,
                    "increment wrong at n = " + std::to_string(n) + " for (mu, lambda) = (" +
                        std::to_string(mu) + ", " + std::to_string(lambda) + ")");
          }
          prev = cur;
        }
      }
  });

  run(12, "precision stability: criteria 6, 7, 10 at doubled M and B", [] {
    SymbolEngine& eng = engine_B256();
    check_trivial_character_interpolation(eng, 4);
    auto inv = g1_invariants(eng, 16);
    require(inv == NewtonInvariants{0, 0}, "(mu, lambda) changed at doubled precision");
    SymbolEngine& base = engine_B128();
    for (int n = 0; n <= 1; ++n) {
      TheoremReport lo = theorem_at(base, n, load_bundled_fixture(n), 8, 128);
      TheoremReport hi = theorem_at(eng, n, load_bundled_fixture(n), 16, 256);
      require(lo.pass == hi.pass, "verdict changed");
      require(lo.lhs_valuation == hi.lhs_valuation, "valuation changed");
      require(lo.rhs_value == hi.rhs_value, "rhs changed");
    }
  });

  if (failures == 0) {
    std::printf("all criteria passed\n");
    return 0;
  }
  std::printf("%d criterion(s) failed\n", failures);
  return 1;
}
