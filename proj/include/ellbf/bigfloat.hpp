#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <string>
#include <utility>

namespace ellbf {

// Minimal RAII wrapper around mpfr_t.  Every value carries its own working
// precision; binary operations round into the left operand's precision.
class Real {
public:
  explicit Real(mpfr_prec_t prec) { mpfr_init2(x_, prec); mpfr_set_zero(x_, 1); }
  Real(const Real& o) { mpfr_init2(x_, mpfr_get_prec(o.x_)); mpfr_set(x_, o.x_, MPFR_RNDN); }
  Real(Real&& o) noexcept { mpfr_init2(x_, mpfr_get_prec(o.x_)); mpfr_swap(x_, o.x_); }
  Real& operator=(const Real& o) {
    if (this != &o) { mpfr_set_prec(x_, mpfr_get_prec(o.x_)); mpfr_set(x_, o.x_, MPFR_RNDN); }
    return *this;
  }
  Real& operator=(Real&& o) noexcept {
    if (this != &o) mpfr_swap(x_, o.x_);
    return *this;
  }
  ~Real() { mpfr_clear(x_); }

  mpfr_ptr get() { return x_; }
  mpfr_srcptr get() const { return x_; }
  mpfr_prec_t prec() const { return mpfr_get_prec(x_); }

  static Real from(long v, mpfr_prec_t prec);
  static Real from(const mpz_class& v, mpfr_prec_t prec);
  static Real from(const mpq_class& v, mpfr_prec_t prec);

  double to_double() const { return mpfr_get_d(x_, MPFR_RNDN); }
  std::string str(int digits = 30) const;

  int sign() const { return mpfr_sgn(x_); }
  bool is_zero() const { return mpfr_zero_p(x_); }

private:
  mpfr_t x_;
};

Real operator+(const Real& a, const Real& b);
Real operator-(const Real& a, const Real& b);
Real operator*(const Real& a, const Real& b);
Real operator/(const Real& a, const Real& b);
Real operator-(const Real& a);
bool operator<(const Real& a, const Real& b);
bool operator>(const Real& a, const Real& b);

Real r_abs(const Real& a);
Real r_sqrt(const Real& a);
Real r_agm(const Real& a, const Real& b);
Real r_exp(const Real& a);
Real r_scale2(const Real& a, long e);  // a * 2^e
// sin and cos of 2*pi*x in one reduction
std::pair<Real, Real> r_sincos_2pi(const Real& x);

// Complex value as a pair of Reals; enough for q-series and Gauss sums.
struct Complex {
  Real re, im;
  Complex() : re(64), im(64) {}
  explicit Complex(mpfr_prec_t prec) : re(prec), im(prec) {}
  Complex(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}
};

Complex operator+(const Complex& a, const Complex& b);
Complex operator-(const Complex& a, const Complex& b);
Complex operator*(const Complex& a, const Complex& b);
Complex c_div(const Complex& a, const Complex& b);
Complex c_scale(const Complex& a, const Real& s);
Real c_abs2(const Complex& a);
// e^{2 pi i (x + i y)} = e^{-2 pi y} (cos 2 pi x + i sin 2 pi x)
Complex c_exp_2pii(const Real& x, const Real& y);

}  // namespace ellbf
