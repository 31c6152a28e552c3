#include "ellbf/bf.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "ellbf/errors.hpp"
#include "ellbf/numutil.hpp"
#include "ellbf/padic.hpp"

namespace ellbf {

mpz_class FiniteBFSystem::group_order() const {
  mpz_class r = 1;
  for (int e : exponents) r *= pow_p(p, e);
  return r;
}

long long FiniteBFSystem::value_modulus() const {
  mpz_class q = pow_p(p, m);
  if (!q.fits_slong_p()) throw validation_error("p^m too large");
  return q.get_si();
}

// ---------------------------------------------------------------------------
// descriptor io

FiniteBFSystem system_from_json(const nlohmann::json& j) {
  FiniteBFSystem S;
  try {
    S.p = j.at("p").get<long>();
    S.m = j.at("m").get<int>();
    if (S.p < 2 || !is_prime(mpz_class(S.p))) throw validation_error("p: not a prime");
    if (S.m < 1) throw validation_error("m: must be >= 1");
    for (const auto& o : j.at("orders")) {
      mpz_class order = mpz_class(static_cast<long>(o.get<long long>()));
      if (order <= 1 || !is_p_power(order, mpz_class(S.p)))
        throw validation_error("orders: entries must be powers of p greater than 1");
      int e = static_cast<int>(ord_p(order, S.p));
      if (e > S.m) throw validation_error("orders: exponent exceeds m");
      S.exponents.push_back(e);
    }
    auto read_matrix = [&](const nlohmann::json& mj) {
      Mat M;
      for (const auto& row : mj) M.push_back(row.get<std::vector<long long>>());
      return M;
    };
    S.pairing = read_matrix(j.at("pairing"));
    S.bockstein = read_matrix(j.at("bockstein"));
    if (j.contains("action"))
      for (const auto& mj : j.at("action")) S.action.push_back(read_matrix(mj));
  } catch (const nlohmann::json::exception& e) {
    throw validation_error(std::string("system descriptor: ") + e.what());
  }
  validate_system(S);
  return S;
}

FiniteBFSystem load_system(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open system descriptor: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw validation_error(std::string("system descriptor parse: ") + e.what());
  }
  return system_from_json(j);
}

nlohmann::ordered_json system_to_json(const FiniteBFSystem& S) {
  nlohmann::ordered_json j;
  j["p"] = S.p;
  j["m"] = S.m;
  std::vector<long long> orders;
  for (int e : S.exponents) orders.push_back(pow_p(S.p, e).get_si());
  j["orders"] = orders;
  j["pairing"] = S.pairing;
  j["bockstein"] = S.bockstein;
  if (!S.action.empty()) j["action"] = S.action;
  return j;
}

// ---------------------------------------------------------------------------
// validation

namespace {

void check_shape(const Mat& M, size_t n, const std::string& name) {
  if (M.size() != n) throw validation_error(name + ": wrong number of rows");
  for (const auto& row : M)
    if (row.size() != n) throw validation_error(name + ": wrong number of columns");
}

long long mod_pow_ll(long long base, long long e) {
  long long r = 1;
  for (long long i = 0; i < e; ++i) r *= base;
  return r;
}

std::vector<long long> apply_matrix(const FiniteBFSystem& S, const Mat& M,
                                    const std::vector<long long>& x) {
  size_t n = S.rank();
  std::vector<long long> y(n, 0);
  for (size_t j = 0; j < n; ++j) {
    long long mod = mod_pow_ll(S.p, S.exponents[j]);
    long long acc = 0;
    for (size_t i = 0; i < n; ++i) acc = (acc + M[j][i] % mod * (x[i] % mod)) % mod;
    y[j] = ((acc % mod) + mod) % mod;
  }
  return y;
}

bool matrices_equal_as_maps(const FiniteBFSystem& S, const Mat& A, const Mat& B) {
  size_t n = S.rank();
  // compare columns modulo the target orders
  for (size_t i = 0; i < n; ++i) {
    std::vector<long long> e(n, 0);
    e[i] = 1;
    if (apply_matrix(S, A, e) != apply_matrix(S, B, e)) return false;
  }
  return true;
}

Mat matrix_compose(const FiniteBFSystem& S, const Mat& A, const Mat& B) {
  // (A o B)[j][i] = sum_k A[j][k] B[k][i], entries reduced mod p^{e_j}
  size_t n = S.rank();
  Mat C(n, std::vector<long long>(n, 0));
  for (size_t j = 0; j < n; ++j) {
    long long mod = mod_pow_ll(S.p, S.exponents[j]);
    for (size_t i = 0; i < n; ++i) {
      long long acc = 0;
      for (size_t k = 0; k < n; ++k) acc = (acc + A[j][k] % mod * (B[k][i] % mod)) % mod;
      C[j][i] = ((acc % mod) + mod) % mod;
    }
  }
  return C;
}

Mat identity_matrix(size_t n) {
  Mat I(n, std::vector<long long>(n, 0));
  for (size_t i = 0; i < n; ++i) I[i][i] = 1;
  return I;
}

// Matrices of the action of every u = 1..p-1 (index u-1).
std::vector<Mat> action_matrices(const FiniteBFSystem& S) {
  size_t n = S.rank();
  long p = S.p;
  std::vector<Mat> out(static_cast<size_t>(p - 1));
  if (S.action.size() == static_cast<size_t>(p - 1)) {
    out = S.action;
  } else if (S.action.size() == 1) {
    // generator = smallest primitive root mod p
    long g = 0;
    for (long c = 2; c < p; ++c)
      if (mul_order(mpz_class(c), mpz_class(p)) == p - 1) {
        g = c;
        break;
      }
    if (g == 0 && p == 2) g = 1;
    Mat pw = identity_matrix(n);
    long u = 1;
    out[0] = pw;  // u = 1 = g^0
    for (long k = 1; k < p - 1; ++k) {
      pw = matrix_compose(S, S.action[0], pw);
      u = u * g % p;
      out[static_cast<size_t>(u - 1)] = pw;
    }
  } else {
    throw validation_error("action: expected 1 or p-1 matrices");
  }
  return out;
}

}  // namespace

void validate_system(const FiniteBFSystem& S) {
  size_t n = S.rank();
  if (n == 0) throw validation_error("orders: empty group");
  check_shape(S.pairing, n, "pairing");
  check_shape(S.bockstein, n, "bockstein");
  mpz_class pm = pow_p(S.p, S.m);
  // pairing respects the cyclic orders: p^{m - min(e_i, e_j)} | P[i][j]
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      int need = S.m - std::min(S.exponents[i], S.exponents[j]);
      if (mpz_class(static_cast<long>(S.pairing[i][j])) % pow_p(S.p, need) != 0)
        throw validation_error("pairing: entry (" + std::to_string(i) + "," + std::to_string(j) +
                               ") does not respect the cyclic orders");
    }
  // bockstein respects orders: p^{e_j - e_i} | B[j][i] when e_j > e_i
  for (size_t j = 0; j < n; ++j)
    for (size_t i = 0; i < n; ++i)
      if (S.exponents[j] > S.exponents[i]) {
        int need = S.exponents[j] - S.exponents[i];
        if (mpz_class(static_cast<long>(S.bockstein[j][i])) % pow_p(S.p, need) != 0)
          throw validation_error("bockstein: entry (" + std::to_string(j) + "," +
                                 std::to_string(i) + ") does not respect the cyclic orders");
      }
  if (S.has_action()) {
    auto mats = action_matrices(S);
    // multiplicative order dividing p-1, and compatibility M_u M_v = M_{uv}
    for (long u = 1; u < S.p; ++u)
      for (long v = 1; v < S.p; ++v) {
        Mat prod = matrix_compose(S, mats[static_cast<size_t>(u - 1)],
                                  mats[static_cast<size_t>(v - 1)]);
        if (!matrices_equal_as_maps(S, prod, mats[static_cast<size_t>(u * v % S.p - 1)]))
          throw validation_error("action: matrices do not define a group action of F_p^x");
      }
    if (!matrices_equal_as_maps(S, mats[0], identity_matrix(n)))
      throw validation_error("action: matrix for u = 1 is not the identity");
    // commutes with the Bockstein
    for (long u = 1; u < S.p; ++u) {
      Mat a = matrix_compose(S, mats[static_cast<size_t>(u - 1)], S.bockstein);
      Mat b = matrix_compose(S, S.bockstein, mats[static_cast<size_t>(u - 1)]);
      if (!matrices_equal_as_maps(S, a, b))
        throw validation_error("action: does not commute with the Bockstein");
    }
  }
}

// ---------------------------------------------------------------------------
// element enumeration

namespace {

template <class F>
void for_each_element(const FiniteBFSystem& S, F&& f) {
  size_t n = S.rank();
  std::vector<long long> orders(n);
  for (size_t i = 0; i < n; ++i) orders[i] = mod_pow_ll(S.p, S.exponents[i]);
  std::vector<long long> x(n, 0);
  while (true) {
    f(x);
    size_t i = 0;
    while (i < n) {
      if (++x[i] < orders[i]) break;
      x[i] = 0;
      ++i;
    }
    if (i == n) return;
  }
}

}  // namespace

long long pairing_exponent(const FiniteBFSystem& S, const std::vector<long long>& x,
                           const std::vector<long long>& y) {
  long long q = S.value_modulus();
  long long acc = 0;
  size_t n = S.rank();
  for (size_t i = 0; i < n; ++i) {
    if (x[i] == 0) continue;
    long long row = 0;
    for (size_t j = 0; j < n; ++j)
      row = (row + (S.pairing[i][j] % q) * (y[j] % q)) % q;
    acc = (acc + x[i] % q * row) % q;
  }
  return ((acc % q) + q) % q;
}

std::vector<long long> apply_bockstein(const FiniteBFSystem& S, const std::vector<long long>& x) {
  return apply_matrix(S, S.bockstein, x);
}

// ---------------------------------------------------------------------------
// cyclotomic accumulator

CyclotomicSum::CyclotomicSum(long p, int m) : p_(p), m_(m) {
  mpz_class q = pow_p(p, m);
  if (!q.fits_slong_p()) throw validation_error("CyclotomicSum: p^m too large");
  q_ = q.get_si();
  bucket_.assign(static_cast<size_t>(q_), mpz_class(0));
}

mpz_class CyclotomicSum::to_integer() const {
  // zeta^d+j = -sum_{t=0}^{p-2} zeta^{t p^{m-1} + j} for the degree
  // d = (p-1) p^{m-1} of the p^m-th cyclotomic polynomial.
  long long pm1 = q_ / p_;           // p^{m-1}
  long long d = (p_ - 1) * pm1;     // degree
  std::vector<mpz_class> canon(static_cast<size_t>(d));
  for (long long i = 0; i < d; ++i)
    canon[static_cast<size_t>(i)] = bucket_[static_cast<size_t>(i)] -
                                    bucket_[static_cast<size_t>(d + (i % pm1))];
  for (long long i = 1; i < d; ++i)
    if (canon[static_cast<size_t>(i)] != 0)
      throw validation_error(
          "character sum is not a rational integer (broken pairing or Bockstein input)");
  return canon[0];
}

// ---------------------------------------------------------------------------
// sums

namespace {

mpz_class bf_sum_impl(const FiniteBFSystem& S, long long max_pairs, bool delta_on_left) {
  validate_system(S);
  mpz_class order = S.group_order();
  if (order * order > static_cast<long>(max_pairs))
    throw size_limit_error("bf_sum_bruteforce: |G|^2 exceeds the configured limit");
  long long q = S.value_modulus();
  size_t n = S.rank();
  CyclotomicSum acc(S.p, S.m);
  for_each_element(S, [&](const std::vector<long long>& b) {
    std::vector<long long> w = delta_on_left ? b : apply_bockstein(S, b);
    // u_i = sum_j P[i][j] w_j mod p^m.  The inner sum over a collapses to a
    // product of geometric sums in principle, but we accumulate every term in
    // the cyclotomic ring to keep the evaluation honest.
    std::vector<long long> u(n, 0);
    for (size_t i = 0; i < n; ++i) {
      long long row = 0;
      for (size_t j = 0; j < n; ++j) row = (row + (S.pairing[i][j] % q) * (w[j] % q)) % q;
      u[i] = ((row % q) + q) % q;
    }
    if (delta_on_left) {
      for_each_element(S, [&](const std::vector<long long>& a) {
        std::vector<long long> da = apply_bockstein(S, a);
        long long e = 0;
        for (size_t i = 0; i < n; ++i) e = (e + da[i] * u[i]) % q;
        acc.add(e);
      });
    } else {
      for_each_element(S, [&](const std::vector<long long>& a) {
        long long e = 0;
        for (size_t i = 0; i < n; ++i) e = (e + a[i] * u[i]) % q;
        acc.add(e);
      });
    }
  });
  mpz_class value = acc.to_integer();
  if (value < 0) throw validation_error("character sum came out negative");
  return value;
}

}  // namespace

mpz_class bf_sum_bruteforce(const FiniteBFSystem& S, long long max_pairs) {
  return bf_sum_impl(S, max_pairs, false);
}

mpz_class bf_sum_bruteforce_left(const FiniteBFSystem& S, long long max_pairs) {
  return bf_sum_impl(S, max_pairs, true);
}

// ---------------------------------------------------------------------------
// Smith normal form

mpz_class snf_diagonal_product(std::vector<std::vector<mpz_class>> M) {
  size_t rows = M.size();
  if (rows == 0) return 1;
  size_t cols = M[0].size();
  mpz_class prod = 1;
  for (size_t s = 0; s < rows && s < cols; ++s) {
    // move the minimal nonzero entry of the trailing submatrix to (s, s)
    while (true) {
      size_t bi = s, bj = s;
      bool found = false;
      for (size_t i = s; i < rows; ++i)
        for (size_t j = s; j < cols; ++j)
          if (M[i][j] != 0 &&
              (!found || abs(M[i][j]) < abs(M[bi][bj]))) {
            bi = i;
            bj = j;
            found = true;
          }
      if (!found) return 0;  // map not surjective onto remaining coordinates
      std::swap(M[bi], M[s]);
      for (size_t i = 0; i < rows; ++i) std::swap(M[i][bj], M[i][s]);
      bool clean = true;
      for (size_t i = s + 1; i < rows; ++i)
        if (M[i][s] != 0) {
          mpz_class t = M[i][s] / M[s][s];
          for (size_t j = s; j < cols; ++j) M[i][j] -= t * M[s][j];
          if (M[i][s] != 0) clean = false;
        }
      for (size_t j = s + 1; j < cols; ++j)
        if (M[s][j] != 0) {
          mpz_class t = M[s][j] / M[s][s];
          for (size_t i = s; i < rows; ++i) M[i][j] -= t * M[i][s];
          if (M[s][j] != 0) clean = false;
        }
      if (clean) break;
    }
    prod *= abs(M[s][s]);
  }
  return prod;
}

mpz_class bockstein_kernel_order(const FiniteBFSystem& S) {
  // |ker delta| = |coker [B | diag(p^{e_j})]| for the endomorphism delta.
  size_t n = S.rank();
  std::vector<std::vector<mpz_class>> M(n, std::vector<mpz_class>(2 * n, mpz_class(0)));
  for (size_t j = 0; j < n; ++j) {
    for (size_t i = 0; i < n; ++i) M[j][i] = static_cast<long>(S.bockstein[j][i]);
    M[j][n + j] = pow_p(S.p, S.exponents[j]);
  }
  return snf_diagonal_product(std::move(M));
}

bool pairing_perfect(const FiniteBFSystem& S) {
  mpz_class order = S.group_order();
  if (order <= 10000) {
    long long q = S.value_modulus();
    size_t n = S.rank();
    long radical = 0;
    for_each_element(S, [&](const std::vector<long long>& x) {
      for (size_t j = 0; j < n; ++j) {
        long long col = 0;
        for (size_t i = 0; i < n; ++i) col = (col + (S.pairing[i][j] % q) * x[i]) % q;
        if (((col % q) + q) % q != 0) return;
      }
      ++radical;
    });
    return radical == 1;
  }
  // Smith-form criterion: radical = ker of the adjoint map
  // x -> ( sum_i x_i P[i][j] / p^{m-e_j} mod p^{e_j} )_j
  size_t n = S.rank();
  std::vector<std::vector<mpz_class>> M(n, std::vector<mpz_class>(2 * n, mpz_class(0)));
  for (size_t j = 0; j < n; ++j) {
    mpz_class scale = pow_p(S.p, S.m - S.exponents[j]);
    for (size_t i = 0; i < n; ++i)
      M[j][i] = mpz_class(static_cast<long>(S.pairing[i][j])) / scale;
    M[j][n + j] = pow_p(S.p, S.exponents[j]);
  }
  return snf_diagonal_product(std::move(M)) == 1;
}

mpz_class bf_sum_closed(const FiniteBFSystem& S) {
  validate_system(S);
  if (!pairing_perfect(S))
    throw validation_error("bf_sum_closed: pairing is not perfect, closed form invalid");
  return S.group_order() * bockstein_kernel_order(S);
}

// ---------------------------------------------------------------------------
// isotypic decomposition

std::vector<std::vector<long long>> isotypic_component(const FiniteBFSystem& S, int r) {
  if (!S.has_action()) throw domain_error("isotypic_component: system has no action");
  auto mats = action_matrices(S);
  size_t n = S.rank();
  long p = S.p;
  mpz_class pm = pow_p(p, S.m);
  mpz_class inv = invmod(mpz_class(p - 1), pm);
  int rr = ((r % (p - 1)) + (p - 1)) % (p - 1);

  // e_r = (1/(p-1)) sum_u omega^{-r}(u) M_u, entries mod p^m
  std::vector<std::vector<mpz_class>> er(n, std::vector<mpz_class>(n, mpz_class(0)));
  for (long u = 1; u < p; ++u) {
    mpz_class w = powmod(teichmuller(mpz_class(u), p, S.m).residue,
                         mpz_class((p - 1 - rr) % (p - 1)), pm);
    const Mat& Mu = mats[static_cast<size_t>(u - 1)];
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j)
        er[i][j] = (er[i][j] + w * static_cast<long>(Mu[i][j])) % pm;
  }
  for (auto& row : er)
    for (auto& x : row) x = x * inv % pm;

  std::set<std::vector<long long>> image;
  for_each_element(S, [&](const std::vector<long long>& x) {
    std::vector<long long> y(n, 0);
    for (size_t j = 0; j < n; ++j) {
      mpz_class mod = pow_p(S.p, S.exponents[j]);
      mpz_class acc = 0;
      for (size_t i = 0; i < n; ++i) acc += er[j][i] * static_cast<long>(x[i]);
      acc %= mod;
      if (acc < 0) acc += mod;
      y[j] = acc.get_si();
    }
    image.insert(std::move(y));
  });
  return {image.begin(), image.end()};
}

BFSumResult isotypic_split_sum(const FiniteBFSystem& S, long long max_pairs) {
  validate_system(S);
  if (!S.has_action()) throw domain_error("isotypic_split_sum: system has no action");
  BFSumResult result;
  result.value = bf_sum_bruteforce(S, max_pairs);

  long p = S.p;
  std::vector<std::vector<std::vector<long long>>> comps;
  mpz_class comp_order_product = 1;
  for (int r = 0; r < p - 1; ++r) {
    comps.push_back(isotypic_component(S, r));
    comp_order_product *= static_cast<long>(comps.back().size());
  }
  if (comp_order_product != S.group_order())
    throw validation_error("isotypic_split_sum: components do not decompose the group");

  mpz_class product = 1;
  for (int r = 0; r < p - 1; ++r) {
    const auto& Gr = comps[static_cast<size_t>(r)];
    const auto& Gs = comps[static_cast<size_t>(((-r % (p - 1)) + (p - 1)) % (p - 1))];
    CyclotomicSum acc(S.p, S.m);
    for (const auto& b : Gs) {
      std::vector<long long> w = apply_bockstein(S, b);
      for (const auto& a : Gr) acc.add(pairing_exponent(S, a, w));
    }
    mpz_class v = acc.to_integer();
    result.component_values[r] = v;
    product *= v;
  }
  if (product != result.value)
    throw validation_error(
        "isotypic_split_sum: product of component sums does not match the full sum");
  return result;
}

mpz_class path_integral_prediction(const mpz_class& sel_order_pm, const mpz_class& torsion_quotient,
                                   long p) {
  if (!is_p_power(sel_order_pm, mpz_class(p)))
    throw domain_error("path_integral_prediction: Selmer order is not a power of p");
  if (!is_p_power(torsion_quotient, mpz_class(p)))
    throw domain_error("path_integral_prediction: torsion quotient is not a power of p");
  return sel_order_pm * torsion_quotient;
}

}  // namespace ellbf
