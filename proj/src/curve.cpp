#include "ellbf/curve.hpp"

#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "ellbf/errors.hpp"
#include "ellbf/numutil.hpp"

namespace ellbf {

mpz_class EllipticCurve::conductor() const {
  mpz_class n = 1;
  for (const auto& v : bad_primes) n *= v;
  return n;
}

EllipticCurve derive_invariants(const mpz_class& a1, const mpz_class& a2, const mpz_class& a3,
                                const mpz_class& a4, const mpz_class& a6) {
  EllipticCurve E;
  E.a = {a1, a2, a3, a4, a6};
  E.b2 = a1 * a1 + 4 * a2;
  E.b4 = 2 * a4 + a1 * a3;
  E.b6 = a3 * a3 + 4 * a6;
  E.b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
  E.c4 = E.b2 * E.b2 - 24 * E.b4;
  E.c6 = -E.b2 * E.b2 * E.b2 + 36 * E.b2 * E.b4 - 216 * E.b6;
  E.disc = -E.b2 * E.b2 * E.b8 - 8 * E.b4 * E.b4 * E.b4 - 27 * E.b6 * E.b6 + 9 * E.b2 * E.b4 * E.b6;
  if (E.disc == 0) throw singular_model_error("derive_invariants: discriminant vanishes");

  for (const auto& [q, e] : factor(E.disc)) {
    E.bad_primes.push_back(q);
    if (e >= 12 && (E.c4 == 0 || ord_p(E.c4, q) >= 4))
      throw nonminimal_model_error("derive_invariants: model is not globally minimal at " +
                                   q.get_str());
  }
  return E;
}

EllipticCurve curve_from_list(const std::array<long long, 5>& a) {
  return derive_invariants(mpz_class(static_cast<long>(a[0])), mpz_class(static_cast<long>(a[1])),
                           mpz_class(static_cast<long>(a[2])), mpz_class(static_cast<long>(a[3])),
                           mpz_class(static_cast<long>(a[4])));
}

LocalData local_data_semistable(const EllipticCurve& E, const mpz_class& v) {
  if (!mpz_divisible_p(E.disc.get_mpz_t(), v.get_mpz_t()))
    throw domain_error("local_data_semistable: good reduction at " + v.get_str());
  if (E.c4 == 0 || mpz_divisible_p(E.c4.get_mpz_t(), v.get_mpz_t()))
    throw additive_reduction_error("local_data_semistable: additive reduction at " + v.get_str());

  LocalData d;
  d.prime = v;
  d.kodaira_n = ord_p(E.disc, v);
  d.component_order = d.kodaira_n;

  if (v == 2) {
    // Locate the singular point of the reduction and factor the tangent
    // quadratic Y^2 + a1 XY + (x0 + a2) X^2 over F_2.  Reducible (distinct
    // rational slopes) iff the X^2 coefficient vanishes.
    long a1 = mpz_fdiv_ui(E.a1().get_mpz_t(), 2);
    long a2 = mpz_fdiv_ui(E.a2().get_mpz_t(), 2);
    long a3 = mpz_fdiv_ui(E.a3().get_mpz_t(), 2);
    long a4 = mpz_fdiv_ui(E.a4().get_mpz_t(), 2);
    long a6 = mpz_fdiv_ui(E.a6().get_mpz_t(), 2);
    long x0 = -1;
    for (long x = 0; x < 2 && x0 < 0; ++x)
      for (long y = 0; y < 2; ++y) {
        long f = (y * y + a1 * x * y + a3 * y + x * x * x + a2 * x * x + a4 * x + a6) % 2;
        long fx = (a1 * y + 3 * x * x + 2 * a2 * x + a4) % 2;
        long fy = (a1 * x + a3) % 2;  // 2y = 0 mod 2
        if (f == 0 && fx == 0 && fy == 0) {
          x0 = x;
          break;
        }
      }
    if (x0 < 0) throw error("local_data_semistable: no singular point found mod 2");
    d.split = ((x0 + a2) % 2 == 0);
  } else {
    d.split = legendre(-E.c6, v) == 1;
  }
  d.tamagawa = d.split ? d.kodaira_n : (d.kodaira_n % 2 == 0 ? 2 : 1);
  return d;
}

PointCount count_points(const EllipticCurve& E, const mpz_class& ell) {
  if (mpz_divisible_p(E.disc.get_mpz_t(), ell.get_mpz_t()))
    throw domain_error("count_points: bad prime " + ell.get_str());
  PointCount pc;
  pc.prime = ell;
  if (ell == 2) {
    long a1 = mpz_fdiv_ui(E.a1().get_mpz_t(), 2), a2 = mpz_fdiv_ui(E.a2().get_mpz_t(), 2);
    long a3 = mpz_fdiv_ui(E.a3().get_mpz_t(), 2), a4 = mpz_fdiv_ui(E.a4().get_mpz_t(), 2);
    long a6 = mpz_fdiv_ui(E.a6().get_mpz_t(), 2);
    long cnt = 1;
    for (long x = 0; x < 2; ++x)
      for (long y = 0; y < 2; ++y)
        if ((y * y + a1 * x * y + a3 * y + x * x * x + a2 * x * x + a4 * x + a6) % 2 == 0) ++cnt;
    pc.count = static_cast<long>(cnt);
  } else {
    long l = mpz_get_si(ell.get_mpz_t());
    // Quadratic-residue bitmap, then one solvability test per x:
    // (2y + a1 x + a3)^2 = D(x) with D = (a1 x + a3)^2 + 4(x^3 + a2 x^2 + a4 x + a6).
    std::vector<unsigned char> qr(static_cast<size_t>(l), 0);
    for (long t = 0; t <= l / 2; ++t) qr[static_cast<size_t>(t * t % l)] = 1;
    long a1 = mpz_fdiv_ui(E.a1().get_mpz_t(), l), a2 = mpz_fdiv_ui(E.a2().get_mpz_t(), l);
    long a3 = mpz_fdiv_ui(E.a3().get_mpz_t(), l), a4 = mpz_fdiv_ui(E.a4().get_mpz_t(), l);
    long a6 = mpz_fdiv_ui(E.a6().get_mpz_t(), l);
    long long cnt = 1;
    for (long x = 0; x < l; ++x) {
      long lin = (a1 * x + a3) % l;
      long cub = ((x * x % l) * x % l + a2 * x % l * x % l + a4 * x % l + a6) % l;
      long dd = (lin * lin % l + 4 * cub % l) % l;
      if (dd == 0)
        cnt += 1;
      else if (qr[static_cast<size_t>(dd)])
        cnt += 2;
    }
    pc.count = static_cast<long>(cnt);
  }
  pc.a_ell = ell + 1 - pc.count;
  // Hasse bound |a_ell|^2 <= 4 ell.
  if (pc.a_ell * pc.a_ell > 4 * ell)
    throw error("count_points: Hasse bound violated at " + ell.get_str());
  return pc;
}

// ---------------------------------------------------------------------------
// a_n table with optional on-disk prime cache

AnTable::AnTable(const EllipticCurve& E, std::string cache_dir)
    : E_(E), cache_dir_(std::move(cache_dir)) {
  an_.assign(2, 1);  // an_[0] unused, a_1 = 1
  if (!cache_dir_.empty()) load_cache();
}

namespace {
std::string cache_name(const EllipticCurve& E) {
  return "al_" + E.c4.get_str() + "_" + E.c6.get_str() + "_" + E.disc.get_str() + ".txt";
}
}  // namespace

void AnTable::load_cache() {
  std::ifstream in(std::filesystem::path(cache_dir_) / cache_name(E_));
  if (!in) return;
  long ell;
  long long ap;
  while (in >> ell >> ap) prime_ap_.emplace_back(ell, ap);
}

void AnTable::save_cache() const {
  if (cache_dir_.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(cache_dir_, ec);
  auto final_path = std::filesystem::path(cache_dir_) / cache_name(E_);
  auto tmp_path = final_path;
  tmp_path += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp_path);
    for (const auto& [ell, ap] : prime_ap_) out << ell << " " << ap << "\n";
  }
  std::filesystem::rename(tmp_path, final_path, ec);
  if (ec) std::filesystem::remove(tmp_path, ec);
}

void AnTable::ensure(long bound) {
  if (bound < 1) throw domain_error("an_sequence: bound must be >= 1");
  if (bound <= this->bound()) return;

  std::map<long, long long> ap;
  for (const auto& [ell, v] : prime_ap_) ap[ell] = v;

  std::vector<long> primes = primes_up_to(bound);
  bool new_primes = false;
  for (long ell : primes) {
    if (ap.count(ell)) continue;
    new_primes = true;
    if (mpz_divisible_ui_p(E_.disc.get_mpz_t(), static_cast<unsigned long>(ell))) {
      LocalData d = local_data_semistable(E_, ell);  // throws if additive
      ap[ell] = d.split ? 1 : -1;
    } else {
      ap[ell] = mpz_get_si(count_points(E_, ell).a_ell.get_mpz_t());
    }
  }
  prime_ap_.assign(ap.begin(), ap.end());
  if (new_primes) save_cache();

  // Smallest prime factor sieve, then Hecke recursion and multiplicativity.
  std::vector<long> spf(static_cast<size_t>(bound) + 1, 0);
  for (long ell : primes)
    for (long j = ell; j <= bound; j += ell)
      if (spf[j] == 0) spf[j] = ell;

  an_.assign(static_cast<size_t>(bound) + 1, 0);
  an_[1] = 1;
  for (long n = 2; n <= bound; ++n) {
    long ell = spf[n];
    long pk = ell, m = n / ell;
    while (m % ell == 0) {
      pk *= ell;
      m /= ell;
    }
    if (m > 1) {
      an_[n] = an_[pk] * an_[m];
      continue;
    }
    // n = ell^k
    long k = 0;
    for (long t = n; t > 1; t /= ell) ++k;
    if (k == 1) {
      an_[n] = ap.at(ell);
    } else if (mpz_divisible_ui_p(E_.disc.get_mpz_t(), static_cast<unsigned long>(ell))) {
      an_[n] = an_[n / ell] * ap.at(ell);
    } else {
      long long prev2 = (k == 2) ? 1 : an_[n / (ell * ell)];
      an_[n] = ap.at(ell) * an_[n / ell] - ell * prev2;
    }
  }
}

long long AnTable::at(long n) const {
  if (n < 1 || n > bound()) throw domain_error("AnTable: index out of range");
  return an_[static_cast<size_t>(n)];
}

std::vector<long long> an_sequence(const EllipticCurve& E, long bound, const std::string& cache_dir) {
  AnTable t(E, cache_dir);
  t.ensure(bound);
  std::vector<long long> out(static_cast<size_t>(bound) + 1, 0);
  for (long n = 1; n <= bound; ++n) out[n] = t.at(n);
  return out;
}

// ---------------------------------------------------------------------------
// torsion via gcd of reductions + Lutz-Nagell confirmation

namespace {

// Rational point on a long Weierstrass model, infinity encoded by inf flag.
struct QPoint {
  mpq_class x, y;
  bool inf = true;
};

bool on_curve(const EllipticCurve& E, const QPoint& P) {
  if (P.inf) return true;
  mpq_class lhs = P.y * P.y + E.a1() * P.x * P.y + E.a3() * P.y;
  mpq_class rhs = P.x * P.x * P.x + E.a2() * P.x * P.x + E.a4() * P.x + E.a6();
  return lhs == rhs;
}

QPoint add_points(const EllipticCurve& E, const QPoint& P, const QPoint& Q) {
  if (P.inf) return Q;
  if (Q.inf) return P;
  mpq_class a1 = E.a1(), a2 = E.a2(), a3 = E.a3(), a4 = E.a4();
  if (P.x == Q.x) {
    mpq_class neg_y = -Q.y - a1 * Q.x - a3;
    if (P.y == neg_y) return {};  // P + (-P) = O
  }
  mpq_class lam, nu;
  if (P.x != Q.x) {
    lam = (Q.y - P.y) / (Q.x - P.x);
    nu = P.y - lam * P.x;
  } else {
    mpq_class denom = 2 * P.y + a1 * P.x + a3;
    lam = (3 * P.x * P.x + 2 * a2 * P.x + a4 - a1 * P.y) / denom;
    nu = P.y - lam * P.x;
  }
  QPoint R;
  R.inf = false;
  R.x = lam * lam + a1 * lam - a2 - P.x - Q.x;
  R.y = -(lam + a1) * R.x - nu - a3;
  return R;
}

// Order of P if it is torsion (Mazur: order <= 12), 0 otherwise.
int point_order(const EllipticCurve& E, const QPoint& P) {
  QPoint Q = P;
  for (int k = 1; k <= 12; ++k) {
    if (Q.inf) return k;
    Q = add_points(E, Q, P);
  }
  return 0;
}

// Integer roots of the monic cubic X^3 + A X + B by bisection on each
// monotone interval; exact mpz comparisons throughout.
std::vector<mpz_class> cubic_integer_roots(const mpz_class& A, const mpz_class& B) {
  auto eval = [&](const mpz_class& x) -> mpz_class { return x * x * x + A * x + B; };
  mpz_class bound = 2;
  {
    mpz_class absA = abs(A), absB = abs(B);
    mpz_class m = absA > absB ? absA : absB;
    while (bound < m + 2) bound *= 2;
  }
  std::vector<mpz_class> ends = {-bound, bound};
  if (A < 0) {
    // critical points at +-sqrt(-A/3)
    mpz_class c;
    mpz_class t = (-A) / 3;
    mpz_sqrt(c.get_mpz_t(), t.get_mpz_t());
    for (const mpz_class& e : {mpz_class(-c - 1), mpz_class(-c), mpz_class(c), mpz_class(c + 1)})
      ends.push_back(e);
  }
  std::sort(ends.begin(), ends.end());
  std::vector<mpz_class> roots;
  for (size_t i = 0; i + 1 < ends.size(); ++i) {
    mpz_class lo = ends[i], hi = ends[i + 1];
    if (lo >= hi) continue;
    mpz_class flo = eval(lo), fhi = eval(hi);
    for (const mpz_class& e : {lo, hi})
      if (eval(e) == 0) roots.push_back(e);
    if ((flo < 0) == (fhi < 0) || flo == 0 || fhi == 0) continue;
    while (hi - lo > 1) {
      mpz_class mid = (lo + hi) / 2;
      mpz_class fm = eval(mid);
      if (fm == 0) {
        roots.push_back(mid);
        break;
      }
      if ((fm < 0) == (flo < 0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
  return roots;
}

}  // namespace

TorsionInfo torsion_order(const EllipticCurve& E, long p) {
  TorsionInfo info;

  // gcd of group orders over the first five good odd primes > 2
  mpz_class g = 0;
  int used = 0;
  for (long ell = 3; used < 5; ell += 2) {
    if (!is_prime(mpz_class(ell))) continue;
    if (mpz_divisible_ui_p(E.disc.get_mpz_t(), static_cast<unsigned long>(ell))) continue;
    mpz_class cnt = count_points(E, ell).count;
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), cnt.get_mpz_t());
    ++used;
  }
  info.gcd_bound = static_cast<int>(g.get_si());

  // Lutz-Nagell on Y^2 = X^3 - 27 c4 X - 54 c6 (discriminant 6^12 disc):
  // torsion points have Y = 0 or Y^2 dividing the discriminant.
  mpz_class A = -27 * E.c4;
  mpz_class B = -54 * E.c6;
  mpz_class D = abs(E.disc);
  std::map<mpz_class, int> dfac;
  dfac[2] = 12;
  dfac[3] = 12;
  for (const auto& [q, e] : factor(D)) dfac[q] += e;

  std::vector<mpz_class> ys = {0};
  {
    std::vector<mpz_class> part = {1};
    for (const auto& [q, e] : dfac) {
      std::vector<mpz_class> next;
      mpz_class qe = 1;
      for (int k = 0; k <= e / 2; ++k) {
        for (const auto& v : part) next.push_back(v * qe);
        qe *= q;
      }
      part = std::move(next);
    }
    ys.insert(ys.end(), part.begin(), part.end());
  }

  std::set<std::pair<mpq_class, mpq_class>> seen;
  int torsion_points = 0;
  for (const auto& Y : ys) {
    for (const auto& X : cubic_integer_roots(A, B - Y * Y)) {
      for (int sgn : {1, -1}) {
        mpz_class Ys = sgn * Y;
        // back to the original model: x = (X - 3 b2)/36, y = (Y/108 - a1 x - a3)/2
        QPoint P;
        P.inf = false;
        P.x = mpq_class(X - 3 * E.b2) / 36;
        P.x.canonicalize();
        P.y = (mpq_class(Ys) / 108 - E.a1() * P.x - E.a3()) / 2;
        P.y.canonicalize();
        if (!on_curve(E, P)) continue;
        if (!seen.insert({P.x, P.y}).second) continue;
        if (point_order(E, P) > 0) ++torsion_points;
        if (Y == 0) break;
      }
    }
  }
  info.order = torsion_points + 1;
  info.confirmed = (info.order == info.gcd_bound);

  int pp = 1;
  int o = info.order;
  while (o % p == 0) {
    pp *= static_cast<int>(p);
    o /= static_cast<int>(p);
  }
  info.p_part = pp;
  return info;
}

bool is_good_ordinary(const EllipticCurve& E, long p) {
  if (p == 2 || !is_prime(mpz_class(p))) throw domain_error("is_good_ordinary: p must be an odd prime");
  if (mpz_divisible_ui_p(E.disc.get_mpz_t(), static_cast<unsigned long>(p))) return false;
  mpz_class ap = count_points(E, p).a_ell;
  return !mpz_divisible_ui_p(ap.get_mpz_t(), static_cast<unsigned long>(p));
}

}  // namespace ellbf
