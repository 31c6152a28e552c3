#include "ellbf/iwasawa.hpp"

#include <algorithm>

#include "ellbf/errors.hpp"
#include "ellbf/numutil.hpp"

namespace ellbf {

namespace {

void reduce_and_trim(std::vector<mpz_class>& c, const mpz_class& q) {
  for (auto& x : c) {
    x %= q;
    if (x < 0) x += q;
  }
  while (!c.empty() && c.back() == 0) c.pop_back();
}

// In-place remainder by a monic divisor, coefficients mod q.
void rem_by_monic(std::vector<mpz_class>& c, const std::vector<mpz_class>& f, const mpz_class& q) {
  long df = static_cast<long>(f.size()) - 1;
  while (static_cast<long>(c.size()) - 1 >= df) {
    mpz_class lead = c.back();
    long shift = static_cast<long>(c.size()) - 1 - df;
    if (lead != 0) {
      for (long i = 0; i <= df; ++i) {
        c[shift + i] = (c[shift + i] - lead * f[i]) % q;
        if (c[shift + i] < 0) c[shift + i] += q;
      }
    }
    c.pop_back();
    while (!c.empty() && c.back() == 0) c.pop_back();
  }
}

void require_compatible(const IwasawaElement& a, const IwasawaElement& b) {
  if (a.p != b.p || a.precision != b.precision)
    throw domain_error("Iwasawa arithmetic on incompatible operands");
}

}  // namespace

IwasawaElement make_iwasawa(long p, int precision, std::vector<mpz_class> coeffs,
                            std::optional<int> modulus_level) {
  if (precision < 1) throw domain_error("make_iwasawa: precision must be >= 1");
  IwasawaElement g;
  g.p = p;
  g.precision = precision;
  mpz_class q = pow_p(p, precision);
  reduce_and_trim(coeffs, q);
  if (modulus_level) {
    IwasawaElement w = omega_poly(*modulus_level, p, precision);
    rem_by_monic(coeffs, w.coeffs, q);
  }
  g.coeffs = std::move(coeffs);
  g.modulus_level = modulus_level;
  return g;
}

IwasawaElement omega_poly(int n, long p, int M) {
  if (n < 0) throw domain_error("omega_poly: level must be >= 0");
  mpz_class q = pow_p(p, M);
  mpz_class pn = pow_p(p, n);
  unsigned long deg = mpz_get_ui(pn.get_mpz_t());
  std::vector<mpz_class> c(deg + 1);
  mpz_class bin;
  for (unsigned long k = 0; k <= deg; ++k) {
    mpz_bin_ui(bin.get_mpz_t(), pn.get_mpz_t(), k);
    c[k] = bin % q;
  }
  c[0] -= 1;  // (1+T)^{p^n} - 1
  IwasawaElement g;
  g.p = p;
  g.precision = M;
  reduce_and_trim(c, q);
  g.coeffs = std::move(c);
  return g;
}

IwasawaElement iw_add(const IwasawaElement& a, const IwasawaElement& b) {
  require_compatible(a, b);
  std::vector<mpz_class> c(std::max(a.coeffs.size(), b.coeffs.size()));
  for (size_t i = 0; i < c.size(); ++i) {
    if (i < a.coeffs.size()) c[i] += a.coeffs[i];
    if (i < b.coeffs.size()) c[i] += b.coeffs[i];
  }
  return make_iwasawa(a.p, a.precision, std::move(c), a.modulus_level);
}

IwasawaElement iw_scale(const IwasawaElement& a, const mpz_class& s) {
  std::vector<mpz_class> c = a.coeffs;
  for (auto& x : c) x *= s;
  return make_iwasawa(a.p, a.precision, std::move(c), a.modulus_level);
}

IwasawaElement iw_mul(const IwasawaElement& a, const IwasawaElement& b) {
  require_compatible(a, b);
  if (a.is_zero() || b.is_zero()) return make_iwasawa(a.p, a.precision, {}, a.modulus_level);
  std::vector<mpz_class> c(a.coeffs.size() + b.coeffs.size() - 1);
  for (size_t i = 0; i < a.coeffs.size(); ++i)
    for (size_t j = 0; j < b.coeffs.size(); ++j) c[i + j] += a.coeffs[i] * b.coeffs[j];
  return make_iwasawa(a.p, a.precision, std::move(c), a.modulus_level);
}

IwasawaElement iw_mod(const IwasawaElement& a, const IwasawaElement& f_monic) {
  require_compatible(a, f_monic);
  if (f_monic.is_zero() || f_monic.coeffs.back() != 1)
    throw domain_error("iw_mod: divisor must be monic");
  std::vector<mpz_class> c = a.coeffs;
  rem_by_monic(c, f_monic.coeffs, pow_p(a.p, a.precision));
  IwasawaElement r;
  r.p = a.p;
  r.precision = a.precision;
  r.coeffs = std::move(c);
  r.modulus_level = a.modulus_level;
  return r;
}

NewtonInvariants newton_invariants(const IwasawaElement& g) {
  if (g.is_zero())
    throw precision_error("newton_invariants: element vanishes mod p^M", 2 * g.precision);
  int mu = g.precision;
  for (const auto& c : g.coeffs)
    if (c != 0) mu = std::min(mu, static_cast<int>(ord_p(c, g.p)));
  long lambda = 0;
  for (size_t i = 0; i < g.coeffs.size(); ++i) {
    if (g.coeffs[i] != 0 && ord_p(g.coeffs[i], g.p) == mu) {
      lambda = static_cast<long>(i);
      break;
    }
  }
  return {mu, lambda};
}

PadicInt resultant_mod(const IwasawaElement& f, const IwasawaElement& g) {
  require_compatible(f, g);
  if (f.is_zero() || f.coeffs.back() != 1)
    throw domain_error("resultant_mod: first argument must be monic");
  long p = f.p;
  int M = f.precision;
  mpz_class q = pow_p(p, M);

  long df = f.degree();
  long dg = std::max<long>(g.degree(), 0);  // zero polynomial handled below
  if (g.is_zero()) return make_padic(p, M, 0);
  if (df == 0) return make_padic(p, M, 1);  // empty product over no roots

  // Sylvester matrix, descending coefficients: dg rows of f-shifts followed
  // by df rows of g-shifts.
  long n = df + dg;
  std::vector<std::vector<mpz_class>> S(n, std::vector<mpz_class>(n, mpz_class(0)));
  for (long r = 0; r < dg; ++r)
    for (long i = 0; i <= df; ++i) S[r][r + i] = f.coeffs[df - i] % q;
  for (long r = 0; r < df; ++r)
    for (long i = 0; i <= dg; ++i) S[dg + r][r + i] = g.coeffs[dg - i] % q;

  // Gaussian elimination over Z/p^M.  Pivot = entry of minimal valuation in
  // the remaining submatrix (row and column swaps).  Rows below are cleared
  // by row_j <- u * row_j - (S[j][k]/p^v) * row_k with pivot = p^v * u, which
  // is exact mod p^M because every remaining entry has valuation >= v.  The
  // determinant picks up a factor u per cleared row; those are divided out at
  // the end (units are exactly invertible).
  int sign = 1;
  mpz_class pivot_prod = 1;
  mpz_class unit_div = 1;
  for (long k = 0; k < n; ++k) {
    long bi = -1, bj = -1;
    int bv = M;
    for (long i = k; i < n && bv > 0; ++i)
      for (long j = k; j < n; ++j) {
        if (S[i][j] == 0) continue;
        int v = static_cast<int>(ord_p(S[i][j], p));
        if (v < bv) {
          bv = v;
          bi = i;
          bj = j;
          if (bv == 0) break;
        }
      }
    if (bi < 0) return make_padic(p, M, 0);  // remaining block vanishes mod p^M
    if (bi != k) {
      std::swap(S[bi], S[k]);
      sign = -sign;
    }
    if (bj != k) {
      for (long i = 0; i < n; ++i) std::swap(S[i][bj], S[i][k]);
      sign = -sign;
    }
    mpz_class pivot = S[k][k];
    pivot_prod = pivot_prod * pivot % q;
    mpz_class pv = pow_p(p, bv);
    mpz_class u = pivot / pv;
    mpz_class qv = q / pv;  // p^{M-v}
    for (long i = k + 1; i < n; ++i) {
      if (S[i][k] == 0) continue;  // row untouched, determinant unchanged
      mpz_class m = (S[i][k] / pv) % qv;
      for (long j = k; j < n; ++j) {
        S[i][j] = (u * S[i][j] - m * S[k][j]) % q;
        if (S[i][j] < 0) S[i][j] += q;
      }
      unit_div = unit_div * u % q;
    }
  }
  mpz_class det = pivot_prod * invmod(unit_div, q) % q;
  if (sign < 0) det = (q - det) % q;
  return make_padic(p, M, det);
}

int product_valuation(const IwasawaElement& g, int n) {
  IwasawaElement w = omega_poly(n, g.p, g.precision);
  PadicInt r = resultant_mod(w, g);
  auto v = valuation(r);
  if (!v)
    throw precision_error(
        "product_valuation: resultant vanishes mod p^M; retry with a larger modulus",
        2 * g.precision);
  return *v;
}

}  // namespace ellbf
