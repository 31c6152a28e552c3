#pragma once

#include <gmpxx.h>

#include <array>
#include <string>
#include <vector>

namespace ellbf {

// Globally minimal integral Weierstrass model with derived invariants.
struct EllipticCurve {
  std::array<mpz_class, 5> a;  // a1, a2, a3, a4, a6
  mpz_class b2, b4, b6, b8;
  mpz_class c4, c6;
  mpz_class disc;
  std::vector<mpz_class> bad_primes;  // primes dividing disc, ascending

  const mpz_class& a1() const { return a[0]; }
  const mpz_class& a2() const { return a[1]; }
  const mpz_class& a3() const { return a[2]; }
  const mpz_class& a4() const { return a[3]; }
  const mpz_class& a6() const { return a[4]; }

  // conductor = product of bad primes for semistable curves
  mpz_class conductor() const;
};

// Validates disc != 0 and global minimality (no prime q with ord_q(c4) >= 4
// and ord_q(disc) >= 12).
EllipticCurve derive_invariants(const mpz_class& a1, const mpz_class& a2, const mpz_class& a3,
                                const mpz_class& a4, const mpz_class& a6);
EllipticCurve curve_from_list(const std::array<long long, 5>& a);

// Reduction data at a prime of multiplicative reduction (Kodaira type I_n).
struct LocalData {
  mpz_class prime;
  long kodaira_n = 0;      // n of I_n = ord_v(disc)
  bool split = false;
  long tamagawa = 0;       // n if split, gcd(2, n) otherwise
  long component_order = 0;  // = kodaira_n
};

LocalData local_data_semistable(const EllipticCurve& E, const mpz_class& v);

struct PointCount {
  mpz_class prime;
  mpz_class count;  // #E~(F_ell) including the point at infinity
  mpz_class a_ell;  // ell + 1 - count
};

PointCount count_points(const EllipticCurve& E, const mpz_class& ell);

// Hecke eigenvalue sequence a_1..a_bound (index 0 unused).  Requires the
// curve to be semistable; a_ell at a bad prime is +1 (split) or -1 (not).
std::vector<long long> an_sequence(const EllipticCurve& E, long bound,
                                   const std::string& cache_dir = "");

// Incremental a_n table with an optional on-disk cache of prime values,
// one file per curve keyed by (c4, c6, disc), lines "ell a_ell" ascending.
class AnTable {
public:
  AnTable(const EllipticCurve& E, std::string cache_dir = "");
  void ensure(long bound);
  long long at(long n) const;
  long bound() const { return static_cast<long>(an_.size()) - 1; }
  const EllipticCurve& curve() const { return E_; }

private:
  void load_cache();
  void save_cache() const;

  EllipticCurve E_;
  std::string cache_dir_;
  std::vector<long long> an_;          // an_[n], n <= bound
  std::vector<std::pair<long, long long>> prime_ap_;  // cached prime values
};

struct TorsionInfo {
  int order = 1;        // order confirmed by bounded point search
  int gcd_bound = 1;    // gcd of reduction counts (always a multiple of order)
  int p_part = 1;       // p-part of the confirmed order
  bool confirmed = true;  // false: search and gcd bound disagree, order is only an upper bound
};

// Torsion order of E(Q) via gcd of #E~(F_ell) over >= 5 good odd primes,
// confirmed by a Lutz-Nagell search on the scaled model
// Y^2 = X^3 - 27 c4 X - 54 c6.
TorsionInfo torsion_order(const EllipticCurve& E, long p);

bool is_good_ordinary(const EllipticCurve& E, long p);

}  // namespace ellbf
