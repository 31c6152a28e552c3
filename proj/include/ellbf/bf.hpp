#pragma once

#include <gmpxx.h>

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace ellbf {

using Mat = std::vector<std::vector<long long>>;

// Finite abelian p-group G = prod Z/p^{e_i} with a pairing into (1/p^m)Z/Z,
// a homomorphism delta : G -> G, and an optional F_p^x-action.
//
//   <x, y> = sum_ij x_i P[i][j] y_j / p^m   (mod 1)
//   (delta x)_j = sum_i B[j][i] x_i         (mod p^{e_j})
//
// The action is given either by the matrix of a fixed generator of F_p^x
// (list of length 1; the generator is the smallest primitive root mod p) or
// by one matrix per residue u = 1..p-1 in that order.
struct FiniteBFSystem {
  long p = 0;
  int m = 1;
  std::vector<int> exponents;  // e_i, 1 <= e_i <= m
  Mat pairing;
  Mat bockstein;
  std::vector<Mat> action;  // empty when absent

  size_t rank() const { return exponents.size(); }
  mpz_class group_order() const;
  long long value_modulus() const;  // p^m
  bool has_action() const { return !action.empty(); }
};

FiniteBFSystem system_from_json(const nlohmann::json& j);
FiniteBFSystem load_system(const std::string& path);
nlohmann::ordered_json system_to_json(const FiniteBFSystem& S);

// Well-definedness of pairing/bockstein on the cyclic factors, action order
// and commutation.  Throws validation_error.
void validate_system(const FiniteBFSystem& S);

// x -> <x, .> injective.  Brute force for |G| <= 1e4, Smith-form criterion
// otherwise.
bool pairing_perfect(const FiniteBFSystem& S);

// |ker delta| via the Smith normal form of [B | diag(p^{e_j})].
mpz_class bockstein_kernel_order(const FiniteBFSystem& S);

// Exact sum_{(a,b) in G x G} e(<a, delta b>), accumulated in Z[zeta_{p^m}]
// and certified to be a rational integer.
mpz_class bf_sum_bruteforce(const FiniteBFSystem& S, long long max_pairs = 10000000);

// Same sum with delta applied on the left slot instead: e(<delta a, b>).
mpz_class bf_sum_bruteforce_left(const FiniteBFSystem& S, long long max_pairs = 10000000);

// |G| * |ker delta|; requires a perfect pairing.
mpz_class bf_sum_closed(const FiniteBFSystem& S);

struct BFSumResult {
  mpz_class value;
  std::map<int, mpz_class> component_values;  // r -> sum over G_r x G_{-r}
};

// Isotypic decomposition under the F_p^x-action: per-branch sums whose
// product is asserted to equal the full sum.
BFSumResult isotypic_split_sum(const FiniteBFSystem& S, long long max_pairs = 10000000);

// omega^r-isotypic component of G as a list of element vectors.
std::vector<std::vector<long long>> isotypic_component(const FiniteBFSystem& S, int r);

// Pairing exponent <x, y> * p^m mod p^m.
long long pairing_exponent(const FiniteBFSystem& S, const std::vector<long long>& x,
                           const std::vector<long long>& y);
std::vector<long long> apply_bockstein(const FiniteBFSystem& S, const std::vector<long long>& x);

// |Sel(Q_n, E[p^m])| * |E(Q_n)/p^m| contract: both inputs must be p-powers.
mpz_class path_integral_prediction(const mpz_class& sel_order_pm, const mpz_class& torsion_quotient,
                                   long p);

// Smith normal form over Z: diagonalize by unimodular row/column operations
// and return |product of diagonal entries| (the order of the cokernel when
// the matrix has full row rank).
mpz_class snf_diagonal_product(std::vector<std::vector<mpz_class>> M);

// Exact accumulator in Z[zeta_{p^m}] using exponent buckets mod p^m.
class CyclotomicSum {
public:
  CyclotomicSum(long p, int m);
  void add(long long exponent) { bucket_[static_cast<size_t>(exponent % q_)] += 1; }
  // Reduce modulo the p^m-th cyclotomic polynomial; throws validation_error
  // unless the value is a rational integer.
  mpz_class to_integer() const;

private:
  long p_;
  int m_;
  long long q_;
  std::vector<mpz_class> bucket_;
};

}  // namespace ellbf
