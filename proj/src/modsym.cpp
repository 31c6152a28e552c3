#include "ellbf/modsym.hpp"

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ellbf/errors.hpp"
#include "ellbf/numutil.hpp"

namespace ellbf {

namespace {

// p-adic image of a rational with p-free denominator.
mpz_class embed_rational(const mpq_class& x, long p, int M) {
  mpz_class q = pow_p(p, M);
  mpz_class den = x.get_den();
  if (mpz_divisible_ui_p(den.get_mpz_t(), static_cast<unsigned long>(p)))
    throw normalization_error("rational has p in its denominator: " + x.get_str());
  mpz_class r = x.get_num() % q * invmod(den, q) % q;
  if (r < 0) r += q;
  return r;
}

// Real roots of the monic cubic x^3 + c2 x^2 + c1 x + c0 (rational
// coefficients, distinct roots).  Double-precision seeds polished by Newton
// iteration at full working precision.
std::vector<Real> cubic_real_roots(const mpq_class& c2, const mpq_class& c1, const mpq_class& c0,
                                   bool three_real, mpfr_prec_t prec) {
  double C2 = c2.get_d(), C1 = c1.get_d(), C0 = c0.get_d();
  double P = C1 - C2 * C2 / 3.0;
  double Q = 2.0 * C2 * C2 * C2 / 27.0 - C2 * C1 / 3.0 + C0;
  std::vector<double> seeds;
  if (three_real) {
    double m = 2.0 * std::sqrt(-P / 3.0);
    double arg = 3.0 * Q / (P * m);
    arg = std::min(1.0, std::max(-1.0, arg));
    double phi = std::acos(arg);
    for (int k = 0; k < 3; ++k) seeds.push_back(m * std::cos(phi / 3.0 - 2.0 * M_PI * k / 3.0) - C2 / 3.0);
  } else {
    double disc = Q * Q / 4.0 + P * P * P / 27.0;
    double s = std::sqrt(std::max(disc, 0.0));
    double t = std::cbrt(-Q / 2.0 + s) + std::cbrt(-Q / 2.0 - s);
    seeds.push_back(t - C2 / 3.0);
  }
  Real rc2 = Real::from(c2, prec), rc1 = Real::from(c1, prec), rc0 = Real::from(c0, prec);
  std::vector<Real> roots;
  for (double s : seeds) {
    Real x(prec);
    mpfr_set_d(x.get(), s, MPFR_RNDN);
    for (int it = 0; it < 10; ++it) {
      Real fx = ((x + rc2) * x + rc1) * x + rc0;
      Real dfx = (Real::from(3, prec) * x + Real::from(2, prec) * rc2) * x + rc1;
      x = x - fx / dfx;
    }
    roots.push_back(x);
  }
  std::sort(roots.begin(), roots.end(), [](const Real& a, const Real& b) { return b < a; });
  return roots;  // descending
}

}  // namespace

// ---------------------------------------------------------------------------
// engine basics

SymbolEngine::SymbolEngine(const EllipticCurve& E, Options opt)
    : E_(E), opt_(opt), W_(opt.float_bits + 64), an_(E, opt.cache_dir) {
  if (opt_.float_bits < 64) throw domain_error("SymbolEngine: float_bits must be >= 64");
  mpz_class n = E_.conductor();
  if (!n.fits_slong_p()) throw domain_error("SymbolEngine: conductor too large");
  N_ = n.get_si();
  // only semistable (squarefree) levels are in scope; this also validates
  // that every bad fiber is multiplicative
  for (const auto& v : E_.bad_primes) local_data_semistable(E_, v);
}

SymbolEngine::~SymbolEngine() {
  try {
    flush_symbol_cache();
  } catch (...) {
  }
}

long long SymbolEngine::a_p(long p) {
  if (mpz_divisible_ui_p(E_.disc.get_mpz_t(), static_cast<unsigned long>(p)))
    return local_data_semistable(E_, p).split ? 1 : -1;
  return mpz_get_si(count_points(E_, mpz_class(p)).a_ell.get_mpz_t());
}

long SymbolEngine::terms_needed(double y) const {
  if (y <= 0) throw domain_error("terms_needed: nonpositive height");
  double L = 2.0 * M_PI * y;
  double target = (static_cast<double>(opt_.float_bits) + 8.0) * std::log(2.0);
  double log1mx = std::log1p(-std::exp(-L));
  long T = std::max<long>(16, static_cast<long>(std::ceil(target / L)));
  // tail( sum_{n>T} n e^{-Ln} ) <= e^{-L(T+1)} (T+2) / (1-e^{-L})^2
  for (int guard = 0; guard < 200; ++guard) {
    double logtail = -L * (static_cast<double>(T) + 1) + std::log(static_cast<double>(T) + 2.0) -
                     2.0 * log1mx;
    if (logtail < -target) return T;
    double deficit = (logtail + target) / L;
    T += std::max<long>(1, static_cast<long>(std::ceil(deficit)));
    if (T > 8000000) throw error("terms_needed: q-expansion truncation limit exceeded");
  }
  throw error("terms_needed: failed to converge");
}

Complex SymbolEngine::S_sum(const Real& x, const Real& y, double y_lower) {
  long T = terms_needed(y_lower);
  an_.ensure(T);
  Complex q = c_exp_2pii(x, y);
  Complex qn = q;
  Complex acc(W_);
  mpfr_t t;
  mpfr_init2(t, W_);
  for (long n = 1; n <= T; ++n) {
    long long an = an_.at(n);
    if (an != 0) {
      mpfr_mul_si(t, qn.re.get(), an, MPFR_RNDN);
      mpfr_div_ui(t, t, static_cast<unsigned long>(n), MPFR_RNDN);
      mpfr_add(acc.re.get(), acc.re.get(), t, MPFR_RNDN);
      mpfr_mul_si(t, qn.im.get(), an, MPFR_RNDN);
      mpfr_div_ui(t, t, static_cast<unsigned long>(n), MPFR_RNDN);
      mpfr_add(acc.im.get(), acc.im.get(), t, MPFR_RNDN);
    }
    if (n < T) qn = qn * q;
  }
  mpfr_clear(t);
  return acc;
}

Real SymbolEngine::f_on_axis(const Real& y, double y_lower) {
  long T = terms_needed(y_lower);
  an_.ensure(T);
  Real two_pi_y(W_);
  mpfr_const_pi(two_pi_y.get(), MPFR_RNDN);
  mpfr_mul_2si(two_pi_y.get(), two_pi_y.get(), 1, MPFR_RNDN);
  mpfr_mul(two_pi_y.get(), two_pi_y.get(), y.get(), MPFR_RNDN);
  mpfr_neg(two_pi_y.get(), two_pi_y.get(), MPFR_RNDN);
  Real r = r_exp(two_pi_y);
  Real rn = r;
  Real acc(W_);
  mpfr_t t;
  mpfr_init2(t, W_);
  for (long n = 1; n <= T; ++n) {
    long long an = an_.at(n);
    if (an != 0) {
      mpfr_mul_si(t, rn.get(), an, MPFR_RNDN);
      mpfr_add(acc.get(), acc.get(), t, MPFR_RNDN);
    }
    if (n < T) rn = rn * r;
  }
  mpfr_clear(t);
  return acc;
}

Complex SymbolEngine::S_base() {
  if (!s_base_) {
    Real rootN = r_sqrt(Real::from(N_, W_));
    Real y = Real::from(1, W_) / rootN;
    double y_lower = 0.999 / std::sqrt(static_cast<double>(N_));
    s_base_ = S_sum(Real::from(0, W_), y, y_lower);
  }
  return *s_base_;
}

int SymbolEngine::fricke_sign() {
  if (wN_) return *wN_;
  Real rootN = r_sqrt(Real::from(N_, W_));
  double dN = std::sqrt(static_cast<double>(N_));
  int sign = 0;
  for (const auto& frac : {mpq_class(27, 25), mpq_class(5, 4), mpq_class(3, 2)}) {
    Real y0 = Real::from(frac, W_) / rootN;
    double y0d = 0.999 * frac.get_d() / dN;
    Real f1 = f_on_axis(y0, y0d);
    Real y1 = Real::from(1, W_) / (Real::from(N_, W_) * y0);
    double y1d = 0.999 / (static_cast<double>(N_) * frac.get_d() / dN);
    Real f2 = f_on_axis(y1, y1d);
    Real tiny = r_scale2(Real::from(1, W_), -static_cast<long>(opt_.float_bits) / 4);
    if (!(r_abs(f1) > tiny) || !(r_abs(f2) > tiny)) continue;
    // w = f(i/(N y0)) / (N (i y0)^2 f(i y0)) = -f2 / (N y0^2 f1)
    Real w = -f2 / (Real::from(N_, W_) * y0 * y0 * f1);
    Real eps = r_scale2(Real::from(1, W_), -12);
    if (r_abs(w - Real::from(1, W_)) < eps) {
      sign = 1;
      break;
    }
    if (r_abs(w + Real::from(1, W_)) < eps) {
      sign = -1;
      break;
    }
    throw error("fricke_sign: eigenvalue not within tolerance of +-1");
  }
  if (sign == 0) throw error("fricke_sign: no usable test point");
  wN_ = sign;
  return sign;
}

Complex SymbolEngine::S_eval(const mpq_class& x, const mpq_class& y) {
  mpq_class norm = x * x + y * y;
  mpq_class y_flip = y / (N_ * norm);
  if (y_flip > y) {
    // Fricke flip raises the height: S(tau) = w S(-1/(N tau)) + (1-w) S_base
    mpq_class x_flip = -x / (N_ * norm);
    Complex s = S_sum(Real::from(x_flip, W_), Real::from(y_flip, W_), y_flip.get_d() * 0.999);
    int w = fricke_sign();
    if (w == 1) return s;
    Complex base = S_base();
    return c_scale(base, Real::from(2, W_)) - s;
  }
  return S_sum(Real::from(x, W_), Real::from(y, W_), y.get_d() * 0.999);
}

// ---------------------------------------------------------------------------
// periods

const Periods& SymbolEngine::periods() {
  if (periods_) return *periods_;
  // 2-division values: roots of x^3 + (b2/4) x^2 + (b4/2) x + b6/4
  mpq_class c2(E_.b2), c1(E_.b4), c0(E_.b6);
  c2 /= 4;
  c1 /= 2;
  c0 /= 4;
  Real pi(W_);
  mpfr_const_pi(pi.get(), MPFR_RNDN);
  if (E_.disc > 0) {
    auto roots = cubic_real_roots(c2, c1, c0, true, W_);
    Real omega = pi / r_agm(r_sqrt(roots[0] - roots[2]), r_sqrt(roots[0] - roots[1]));
    periods_ = Periods{omega, 2};
  } else {
    auto roots = cubic_real_roots(c2, c1, c0, false, W_);
    const Real& e1 = roots[0];
    // quadratic cofactor x^2 + Bx + C, complex roots b +- ic
    Real B = Real::from(c2, W_) + e1;
    Real C = Real::from(c1, W_) + e1 * B;
    Real b = -r_scale2(B, -1);
    Real csq = C - b * b;
    Real gamma = (e1 - b) * (e1 - b) + csq;
    Real sg = r_sqrt(gamma);
    Real m1 = r_sqrt(r_scale2(sg + (e1 - b), -1));
    Real m2 = r_sqrt(sg);
    Real omega = pi / r_agm(m1, m2);
    periods_ = Periods{omega, 1};
  }
  return *periods_;
}

// ---------------------------------------------------------------------------
// symbols

Complex SymbolEngine::lambda_value(const mpq_class& r, const PathOptions& path) {
  mpz_class a = r.get_num();
  mpz_class m = r.get_den();
  mpz_class g;
  mpz_gcd_ui(g.get_mpz_t(), m.get_mpz_t(), static_cast<unsigned long>(N_));
  if (g != 1)
    throw domain_error("modular symbol at a cusp not equivalent to 0 (gcd(den, N) > 1): " +
                       r.get_str());

  int w = fricke_sign();
  Complex base(W_);
  if (w == -1) base = c_scale(S_base(), Real::from(2, W_));
  if (m == 1) return base;

  // gamma = (A a; Nk m) in Gamma_0(N) with gamma(0) = a/m: solve A m - a N k = 1.
  mpz_class aN = a * N_;
  mpz_class gg, u, v;
  mpz_gcdext(gg.get_mpz_t(), u.get_mpz_t(), v.get_mpz_t(), m.get_mpz_t(), aN.get_mpz_t());
  if (gg != 1) throw error("lambda_value: transport matrix does not exist");
  mpz_class A = u, k = -v;
  // minimize |k| over k -> k - t m (A -> A - t a N)
  mpz_class t, rem;
  mpz_fdiv_qr(t.get_mpz_t(), rem.get_mpz_t(), k.get_mpz_t(), m.get_mpz_t());
  if (2 * rem > m) t += 1;
  k -= t * m;
  A -= t * aN;
  k += path.k_shift * m;
  A += path.k_shift * aN;
  if (k == 0) throw error("lambda_value: degenerate transport");

  mpz_class C = N_ * k;
  mpq_class x1(-m, C);
  x1.canonicalize();
  mpq_class y1(mpz_class(path.height_num), abs(C) * path.height_den);
  y1.canonicalize();
  mpq_class x2(A, C);
  x2.canonicalize();
  mpq_class y2 = mpq_class(1) / (mpq_class(C * C) * y1);
  y2.canonicalize();

  return base - S_eval(x1, y1) + S_eval(x2, y2);
}

mpq_class SymbolEngine::reconstruct(const Real& v) const {
  Real tol = r_scale2(Real::from(1, W_), -static_cast<long>(opt_.float_bits) / 2);
  mpz_class D(opt_.denom_bound);
  Real x = v;
  mpz_class p_prev = 1, q_prev = 0, p, q;
  mpz_class a;
  for (int it = 0; it < 80; ++it) {
    mpfr_get_z(a.get_mpz_t(), x.get(), MPFR_RNDD);
    if (it == 0) {
      p = a;
      q = 1;
    } else {
      mpz_class pn = a * p + p_prev, qn = a * q + q_prev;
      p_prev = p;
      q_prev = q;
      p = pn;
      q = qn;
    }
    if (q > D) break;
    Real approx = Real::from(p, W_) / Real::from(q, W_);
    if (r_abs(v - approx) < tol) {
      mpq_class out(p, q);
      out.canonicalize();
      return out;
    }
    Real frac = x - Real::from(a, W_);
    if (frac.is_zero()) break;
    x = Real::from(1, W_) / frac;
  }
  throw reconstruction_error(
      "rational reconstruction failed (no denominator <= bound at tolerance); retry with larger "
      "float precision");
}

mpq_class SymbolEngine::symbol_plus(const mpq_class& r) {
  mpq_class key = r;
  key.canonicalize();
  auto it = symbols_.find(key);
  if (it != symbols_.end()) return it->second;
  if (!opt_.cache_dir.empty() && !loaded_dens_.count(key.get_den())) {
    load_symbol_file(key.get_den());
    it = symbols_.find(key);
    if (it != symbols_.end()) return it->second;
  }
  Complex lam = lambda_value(key, PathOptions{});
  Real value = lam.re / periods().omega_plus;
  mpq_class out = reconstruct(value);
  symbols_[key] = out;
  dirty_dens_.insert(key.get_den());
  return out;
}

mpq_class SymbolEngine::symbol_plus_with(const mpq_class& r, const PathOptions& path) {
  mpq_class key = r;
  key.canonicalize();
  Complex lam = lambda_value(key, path);
  Real value = lam.re / periods().omega_plus;
  return reconstruct(value);
}

ModularSymbol SymbolEngine::modular_symbol(const mpq_class& r) {
  mpq_class key = r;
  key.canonicalize();
  return ModularSymbol{key, symbol_plus(key)};
}

// ---------------------------------------------------------------------------
// persistent symbol cache (one file per denominator)

namespace {
std::string symbol_file_name(const EllipticCurve& E, const mpz_class& den) {
  return "sym_" + E.c4.get_str() + "_" + E.c6.get_str() + "_" + E.disc.get_str() + "_" +
         den.get_str() + ".txt";
}
}  // namespace

void SymbolEngine::load_symbol_file(const mpz_class& den) {
  loaded_dens_.insert(den);
  std::ifstream in(std::filesystem::path(opt_.cache_dir) / symbol_file_name(E_, den));
  if (!in) return;
  std::string num_s, val_s;
  while (in >> num_s >> val_s) {
    mpq_class r(mpz_class(num_s), den);
    r.canonicalize();
    mpq_class val(val_s);
    val.canonicalize();
    symbols_.emplace(r, val);
  }
}

void SymbolEngine::flush_symbol_cache() {
  if (opt_.cache_dir.empty() || dirty_dens_.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(opt_.cache_dir, ec);
  for (const auto& den : dirty_dens_) {
    auto final_path = std::filesystem::path(opt_.cache_dir) / symbol_file_name(E_, den);
    auto tmp = final_path;
    tmp += ".tmp" + std::to_string(::getpid());
    {
      std::ofstream out(tmp);
      for (const auto& [r, val] : symbols_)
        if (r.get_den() == den) out << r.get_num().get_str() << " " << val.get_str() << "\n";
    }
    std::filesystem::rename(tmp, final_path, ec);
    if (ec) std::filesystem::remove(tmp, ec);
  }
  dirty_dens_.clear();
}

// ---------------------------------------------------------------------------
// theta elements

ThetaElement SymbolEngine::theta_element(long p, int n, int M) {
  if (n < -1) throw domain_error("theta_element: level must be >= -1");
  if (M < 1) throw domain_error("theta_element: precision must be >= 1");
  if (!is_good_ordinary(E_, p))
    throw not_ordinary_error("theta_element: curve is not good ordinary at " + std::to_string(p));
  ThetaElement th;
  th.p = p;
  th.level = n;
  th.precision = M;
  if (n == -1) {
    th.coeffs[1] = embed_rational(symbol_plus(mpq_class(0)), p, M);
    return th;
  }
  mpz_class q = pow_p(p, n + 1);
  long qn = q.get_si();
  for (long a = 1; a < qn; ++a) {
    if (a % p == 0) continue;
    mpq_class r(a, qn);
    r.canonicalize();
    th.coeffs[a] = embed_rational(symbol_plus(r), p, M);
  }
  flush_symbol_cache();
  return th;
}

ThetaElement theta_project(const ThetaElement& th) {
  if (th.level < 0) throw domain_error("theta_project: nothing below level -1");
  ThetaElement out;
  out.p = th.p;
  out.level = th.level - 1;
  out.precision = th.precision;
  mpz_class q = pow_p(th.p, th.precision);
  long modulus = 1;
  if (out.level >= 0) modulus = pow_p(th.p, out.level + 1).get_si();
  for (const auto& [a, c] : th.coeffs) {
    long key = out.level >= 0 ? a % modulus : 1;
    mpz_class& slot = out.coeffs[key];
    slot = (slot + c) % q;
  }
  return out;
}

ThetaElement theta_inflate(const ThetaElement& th) {
  ThetaElement out;
  out.p = th.p;
  out.level = th.level + 1;
  out.precision = th.precision;
  long q_to = pow_p(th.p, out.level + 1).get_si();
  long q_from = th.level >= 0 ? pow_p(th.p, th.level + 1).get_si() : 1;
  for (long a = 1; a < q_to; ++a) {
    if (a % th.p == 0) continue;
    long key = th.level >= 0 ? a % q_from : 1;
    out.coeffs[a] = th.coeffs.at(key);
  }
  return out;
}

ThetaElement theta_combine(const mpz_class& c1, const ThetaElement& t1, const mpz_class& c2,
                           const ThetaElement& t2) {
  if (t1.p != t2.p || t1.level != t2.level || t1.precision != t2.precision)
    throw domain_error("theta_combine: incompatible operands");
  ThetaElement out;
  out.p = t1.p;
  out.level = t1.level;
  out.precision = t1.precision;
  mpz_class q = pow_p(t1.p, t1.precision);
  for (const auto& [a, c] : t1.coeffs) out.coeffs[a] = c1 * c % q;
  for (const auto& [a, c] : t2.coeffs) {
    mpz_class& slot = out.coeffs[a];
    slot = (slot + c2 * c) % q;
    if (slot < 0) slot += q;
  }
  for (auto& [a, c] : out.coeffs)
    if (c < 0) c += q;
  return out;
}

ThetaElement branch_component(const ThetaElement& th, int r) {
  if (th.level < 0) throw domain_error("branch_component: level must be >= 0");
  long p = th.p;
  int M = th.precision;
  mpz_class q = pow_p(p, M);
  mpz_class qn = pow_p(p, th.level + 1);
  mpz_class inv_pm1 = invmod(mpz_class(p - 1), q);
  long rr = ((r % (p - 1)) + (p - 1)) % (p - 1);

  ThetaElement out;
  out.p = p;
  out.level = th.level;
  out.precision = M;
  for (const auto& [b, unused] : th.coeffs) out.coeffs[b] = 0;
  for (long u = 1; u < p; ++u) {
    mpz_class delta = teichmuller(mpz_class(u), p, th.level + 1).residue;
    mpz_class delta_inv = invmod(delta, qn);
    // omega^{-r}(delta) as a scalar mod p^M
    mpz_class w = powmod(teichmuller(mpz_class(u), p, M).residue,
                         mpz_class((p - 1 - rr) % (p - 1)), q);
    for (auto& [b, slot] : out.coeffs) {
      long src = mpz_class(delta_inv * b % qn).get_si();
      slot = (slot + w * th.coeffs.at(src)) % q;
    }
  }
  for (auto& [b, c] : out.coeffs) c = c * inv_pm1 % q;
  return out;
}

namespace {

// expand sum_j d[j] (1+T)^j  mod p^M
IwasawaElement one_unit_expand(const std::vector<mpz_class>& d, long p, int M, int level) {
  mpz_class q = pow_p(p, M);
  std::vector<mpz_class> acc(1, mpz_class(0));
  std::vector<mpz_class> pw(1, mpz_class(1));  // (1+T)^j
  for (size_t j = 0; j < d.size(); ++j) {
    if (acc.size() < pw.size()) acc.resize(pw.size(), mpz_class(0));
    if (d[j] != 0)
      for (size_t i = 0; i < pw.size(); ++i) acc[i] = (acc[i] + d[j] * pw[i]) % q;
    if (j + 1 < d.size()) {
      // pw *= (1+T)
      pw.push_back(0);
      for (size_t i = pw.size() - 1; i > 0; --i) pw[i] = (pw[i] + pw[i - 1]) % q;
    }
  }
  return make_iwasawa(p, M, std::move(acc), level);
}

}  // namespace

IwasawaElement project_branch(const ThetaElement& th, int r) {
  ThetaElement comp = branch_component(th, r);
  long p = th.p;
  int n = th.level;
  mpz_class qn = pow_p(p, n + 1);
  long pn = pow_p(p, n).get_si();
  std::vector<mpz_class> d(static_cast<size_t>(pn), mpz_class(0));
  mpz_class g = 1 + p;
  mpz_class b = 1;
  for (long j = 0; j < pn; ++j) {
    auto it = comp.coeffs.find(b.get_si());
    if (it != comp.coeffs.end()) d[static_cast<size_t>(j)] = it->second;
    b = b * g % qn;
  }
  return one_unit_expand(d, p, th.precision, n);
}

IwasawaElement branch_polynomial(const ThetaElement& th, int r) {
  if (th.level < 0) throw domain_error("branch_polynomial: level must be >= 0");
  long p = th.p;
  int M = th.precision;
  mpz_class q = pow_p(p, M);
  long pn = pow_p(p, th.level).get_si();
  long rr = ((r % (p - 1)) + (p - 1)) % (p - 1);
  OneUnitLog lg(p, th.level);
  std::vector<mpz_class> d(static_cast<size_t>(pn), mpz_class(0));
  for (const auto& [a, c] : th.coeffs) {
    long k = lg.log_of(mpz_class(a));
    mpz_class w = rr == 0 ? mpz_class(1)
                          : powmod(teichmuller(mpz_class(a), p, M).residue, mpz_class(rr), q);
    d[static_cast<size_t>(k)] = (d[static_cast<size_t>(k)] + c * w) % q;
  }
  return one_unit_expand(d, p, M, th.level);
}

IwasawaElement stabilized_Lp(SymbolEngine& eng, long p, int n, int M) {
  if (n < 0) throw domain_error("stabilized_Lp: level must be >= 0");
  mpz_class ap(static_cast<long>(eng.a_p(p)));
  PadicInt alpha = hensel_unit_root(ap, p, M);
  PadicInt alpha_inv = padic_inv(alpha);
  mpz_class q = pow_p(p, M);
  mpz_class c1 = padic_pow(alpha_inv, n + 1).residue;
  mpz_class c2 = q - padic_pow(alpha_inv, n + 2).residue;

  ThetaElement tn = eng.theta_element(p, n, M);
  ThetaElement tm = eng.theta_element(p, n - 1, M);
  ThetaElement nu = theta_inflate(tm);
  ThetaElement combined = theta_combine(c1, tn, c2, nu);
  return branch_polynomial(combined, 0);
}

// ---------------------------------------------------------------------------
// Dirichlet characters

DirichletCharacter make_character(long p, int n, long index, mpfr_prec_t bits) {
  DirichletCharacter chi;
  chi.p = p;
  chi.n = n;
  mpz_class q = pow_p(p, n + 1);
  long qn = q.get_si();
  long order = (p - 1) * pow_p(p, n).get_si();
  chi.order = order;
  chi.index = ((index % order) + order) % order;

  // smallest primitive root modulo p^{n+1}
  std::vector<long> prime_divs;
  for (const auto& [f, e] : factor(mpz_class(order))) prime_divs.push_back(f.get_si());
  long g = 0;
  for (long cand = 2; cand < qn; ++cand) {
    if (cand % p == 0) continue;
    bool ok = true;
    for (long f : prime_divs)
      if (powmod(mpz_class(cand), mpz_class(order / f), q) == 1) {
        ok = false;
        break;
      }
    if (ok) {
      g = cand;
      break;
    }
  }
  if (g == 0) throw error("make_character: no primitive root found");
  chi.generator = g;

  mpz_class a = 1;
  for (long k = 0; k < order; ++k) {
    chi.exponents[a.get_si()] = chi.index * k % order;
    a = a * g % q;
  }

  mpfr_prec_t W = bits + 32;
  Complex tau(W);
  for (const auto& [aa, e] : chi.exponents) {
    mpq_class arg = mpq_class(e, order) + mpq_class(aa, qn);
    arg.canonicalize();
    tau = tau + c_exp_2pii(Real::from(arg, W), Real::from(0, W));
  }
  chi.gauss_sum = tau;
  chi.primitive = (n == 0) ? (chi.index != 0) : (chi.index % p != 0);
  return chi;
}

}  // namespace ellbf
