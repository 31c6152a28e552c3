#pragma once

#include <stdexcept>
#include <string>

namespace ellbf {

// Base class for all library errors.
class error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Input outside an operation's domain (good prime where a bad one is
// required, even p, invalid bound, ...).
class domain_error : public error {
public:
  using error::error;
};

// Weierstrass model with vanishing discriminant.
class singular_model_error : public error {
public:
  using error::error;
};

// Model fails the global-minimality test; callers must supply minimal models.
class nonminimal_model_error : public error {
public:
  using error::error;
};

// Additive reduction at a bad prime; only multiplicative fibers are handled.
class additive_reduction_error : public error {
public:
  using error::error;
};

// p | a_p, so there is no unit root.
class not_ordinary_error : public error {
public:
  using error::error;
};

// A p-adic computation came out indistinguishable from zero at the working
// modulus.  suggested_precision() is a modulus exponent to retry with.
class precision_error : public error {
public:
  precision_error(const std::string& msg, int suggested)
      : error(msg), suggested_(suggested) {}
  int suggested_precision() const { return suggested_; }

private:
  int suggested_;
};

// No rational within the denominator bound matched the float value.
class reconstruction_error : public error {
public:
  using error::error;
};

// A modular-symbol value has p in its denominator (fatal by contract).
class normalization_error : public error {
public:
  using error::error;
};

// Malformed fixture / system descriptor.
class validation_error : public error {
public:
  using error::error;
};

// Brute-force enumeration would exceed the configured size limit.
class size_limit_error : public error {
public:
  using error::error;
};

}  // namespace ellbf
