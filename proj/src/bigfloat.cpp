#include "ellbf/bigfloat.hpp"

#include <vector>

namespace ellbf {

Real Real::from(long v, mpfr_prec_t prec) {
  Real r(prec);
  mpfr_set_si(r.x_, v, MPFR_RNDN);
  return r;
}

Real Real::from(const mpz_class& v, mpfr_prec_t prec) {
  Real r(prec);
  mpfr_set_z(r.x_, v.get_mpz_t(), MPFR_RNDN);
  return r;
}

Real Real::from(const mpq_class& v, mpfr_prec_t prec) {
  Real r(prec);
  mpfr_set_q(r.x_, v.get_mpq_t(), MPFR_RNDN);
  return r;
}

std::string Real::str(int digits) const {
  std::vector<char> buf(static_cast<size_t>(digits) + 48);
  mpfr_snprintf(buf.data(), buf.size(), "%.*Rg", digits, x_);
  return std::string(buf.data());
}

#define ELLBF_REAL_BINOP(op, fn)                         \
  Real operator op(const Real& a, const Real& b) {       \
    Real r(a.prec());                                    \
    fn(r.get(), a.get(), b.get(), MPFR_RNDN);            \
    return r;                                            \
  }
ELLBF_REAL_BINOP(+, mpfr_add)
ELLBF_REAL_BINOP(-, mpfr_sub)
ELLBF_REAL_BINOP(*, mpfr_mul)
ELLBF_REAL_BINOP(/, mpfr_div)
#undef ELLBF_REAL_BINOP

Real operator-(const Real& a) {
  Real r(a.prec());
  mpfr_neg(r.get(), a.get(), MPFR_RNDN);
  return r;
}

bool operator<(const Real& a, const Real& b) { return mpfr_less_p(a.get(), b.get()) != 0; }
bool operator>(const Real& a, const Real& b) { return mpfr_greater_p(a.get(), b.get()) != 0; }

Real r_abs(const Real& a) {
  Real r(a.prec());
  mpfr_abs(r.get(), a.get(), MPFR_RNDN);
  return r;
}

Real r_sqrt(const Real& a) {
  Real r(a.prec());
  mpfr_sqrt(r.get(), a.get(), MPFR_RNDN);
  return r;
}

Real r_agm(const Real& a, const Real& b) {
  Real r(a.prec());
  mpfr_agm(r.get(), a.get(), b.get(), MPFR_RNDN);
  return r;
}

Real r_exp(const Real& a) {
  Real r(a.prec());
  mpfr_exp(r.get(), a.get(), MPFR_RNDN);
  return r;
}

Real r_scale2(const Real& a, long e) {
  Real r(a.prec());
  mpfr_mul_2si(r.get(), a.get(), e, MPFR_RNDN);
  return r;
}

std::pair<Real, Real> r_sincos_2pi(const Real& x) {
  mpfr_prec_t prec = x.prec();
  // reduce x mod 1 first so the argument to sin/cos stays small
  Real frac(prec + 16);
  mpfr_set(frac.get(), x.get(), MPFR_RNDN);
  Real fl(prec + 16);
  mpfr_floor(fl.get(), frac.get());
  mpfr_sub(frac.get(), frac.get(), fl.get(), MPFR_RNDN);
  Real two_pi(prec + 16);
  mpfr_const_pi(two_pi.get(), MPFR_RNDN);
  mpfr_mul_2si(two_pi.get(), two_pi.get(), 1, MPFR_RNDN);
  Real arg(prec + 16);
  mpfr_mul(arg.get(), frac.get(), two_pi.get(), MPFR_RNDN);
  Real s(prec), c(prec);
  mpfr_sin_cos(s.get(), c.get(), arg.get(), MPFR_RNDN);
  return {std::move(s), std::move(c)};
}

Complex operator+(const Complex& a, const Complex& b) { return {a.re + b.re, a.im + b.im}; }
Complex operator-(const Complex& a, const Complex& b) { return {a.re - b.re, a.im - b.im}; }

Complex operator*(const Complex& a, const Complex& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

Complex c_div(const Complex& a, const Complex& b) {
  Real d = c_abs2(b);
  return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
}

Complex c_scale(const Complex& a, const Real& s) { return {a.re * s, a.im * s}; }

Real c_abs2(const Complex& a) { return a.re * a.re + a.im * a.im; }

Complex c_exp_2pii(const Real& x, const Real& y) {
  auto [s, c] = r_sincos_2pi(x);
  Real two_pi_y(y.prec());
  mpfr_const_pi(two_pi_y.get(), MPFR_RNDN);
  mpfr_mul_2si(two_pi_y.get(), two_pi_y.get(), 1, MPFR_RNDN);
  mpfr_mul(two_pi_y.get(), two_pi_y.get(), y.get(), MPFR_RNDN);
  mpfr_neg(two_pi_y.get(), two_pi_y.get(), MPFR_RNDN);
  Real radius = r_exp(two_pi_y);
  return {c * radius, s * radius};
}

}  // namespace ellbf
