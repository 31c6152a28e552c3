// ellbf: exact arithmetic for the p-adic L-valuation identity of semistable
// elliptic curves, plus finite BF character sums.
//
// exit codes: 0 success/pass, 1 computational failure, 2 verdict fail,
//             64 usage error.

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ellbf/bf.hpp"
#include "ellbf/curve.hpp"
#include "ellbf/errors.hpp"
#include "ellbf/numutil.hpp"
#include "ellbf/iwasawa.hpp"
#include "ellbf/modsym.hpp"
#include "ellbf/padic.hpp"
#include "ellbf/verifier.hpp"

namespace {

using nlohmann::ordered_json;

struct RunConfig {
  std::string curve_spec;
  long p = 0;
  int n = 0;
  int padic_precision = 8;
  long float_bits = 128;
  long denom_bound = 10000;
  std::string fixture_path;
  std::string system_path;
  std::string output = "text";
  std::string r_spec;
  long bound = 20;
  long v = 0;

  bool json() const { return output == "json"; }
};

std::array<long long, 5> parse_curve(const std::string& s) {
  std::array<long long, 5> a{};
  std::stringstream ss(s);
  std::string tok;
  size_t i = 0;
  while (std::getline(ss, tok, ',')) {
    if (i >= 5) throw ellbf::domain_error("curve: expected 5 comma-separated integers");
    a[i++] = std::stoll(tok);
  }
  if (i != 5) throw ellbf::domain_error("curve: expected 5 comma-separated integers");
  return a;
}

mpq_class parse_rational(const std::string& s) {
  mpq_class r(s);
  r.canonicalize();
  return r;
}

std::string cache_dir_from_env() {
  const char* d = std::getenv("ELLBF_CACHE_DIR");
  return d ? std::string(d) : std::string();
}

void validate_config(const RunConfig& cfg, bool needs_p) {
  if (cfg.padic_precision < 2) throw ellbf::domain_error("precision M must be >= 2");
  if (cfg.float_bits < 64) throw ellbf::domain_error("float-bits B must be >= 64");
  if (needs_p && (cfg.p < 3 || !ellbf::is_prime(mpz_class(cfg.p))))
    throw ellbf::domain_error("p must be an odd prime");
  if (cfg.output != "text" && cfg.output != "json")
    throw ellbf::domain_error("output must be 'text' or 'json'");
}

ellbf::SymbolEngine make_engine(const ellbf::EllipticCurve& E, const RunConfig& cfg) {
  return ellbf::SymbolEngine(
      E, ellbf::SymbolEngine::Options{cfg.float_bits, cfg.denom_bound, cache_dir_from_env()});
}

void emit(const RunConfig& cfg, const ordered_json& j, const std::string& text) {
  if (cfg.json())
    std::cout << j.dump(2) << "\n";
  else
    std::cout << text;
}

int cmd_curve_info(const RunConfig& cfg) {
  auto E = ellbf::curve_from_list(parse_curve(cfg.curve_spec));
  ordered_json j;
  std::vector<std::string> a;
  for (const auto& c : E.a) a.push_back(c.get_str());
  j["a_invariants"] = a;
  j["b2"] = E.b2.get_str();
  j["b4"] = E.b4.get_str();
  j["b6"] = E.b6.get_str();
  j["b8"] = E.b8.get_str();
  j["c4"] = E.c4.get_str();
  j["c6"] = E.c6.get_str();
  j["disc"] = E.disc.get_str();
  std::vector<std::string> bad;
  for (const auto& v : E.bad_primes) bad.push_back(v.get_str());
  j["bad_primes"] = bad;
  std::ostringstream os;
  os << "a = [" << E.a1() << "," << E.a2() << "," << E.a3() << "," << E.a4() << "," << E.a6()
     << "]\n"
     << "b2 = " << E.b2 << ", b4 = " << E.b4 << ", b6 = " << E.b6 << ", b8 = " << E.b8 << "\n"
     << "c4 = " << E.c4 << ", c6 = " << E.c6 << "\n"
     << "disc = " << E.disc << "\n"
     << "bad primes =";
  for (const auto& v : E.bad_primes) os << " " << v;
  os << "\n";
  emit(cfg, j, os.str());
  return 0;
}

int cmd_local_data(const RunConfig& cfg) {
  auto E = ellbf::curve_from_list(parse_curve(cfg.curve_spec));
  auto d = ellbf::local_data_semistable(E, mpz_class(cfg.v));
  ordered_json j;
  j["prime"] = d.prime.get_str();
  j["kodaira"] = "I" + std::to_string(d.kodaira_n);
  j["split"] = d.split;
  j["tamagawa"] = d.tamagawa;
  j["component_order"] = d.component_order;
  std::ostringstream os;
  os << "v = " << d.prime << ": Kodaira I_" << d.kodaira_n << ", "
     << (d.split ? "split" : "non-split") << " multiplicative, c_v = " << d.tamagawa
     << ", component order = " << d.component_order << "\n";
  emit(cfg, j, os.str());
  return 0;
}

int cmd_ap(const RunConfig& cfg) {
  auto E = ellbf::curve_from_list(parse_curve(cfg.curve_spec));
  auto an = ellbf::an_sequence(E, cfg.bound, cache_dir_from_env());
  ordered_json j;
  std::ostringstream os;
  for (long n = 2; n <= cfg.bound; ++n) {
    j["a_" + std::to_string(n)] = an[static_cast<size_t>(n)];
    os << "a_" << n << " = " << an[static_cast<size_t>(n)] << "\n";
  }
  emit(cfg, j, os.str());
  return 0;
}

int cmd_torsion(const RunConfig& cfg) {
  auto E = ellbf::curve_from_list(parse_curve(cfg.curve_spec));
  auto t = ellbf::torsion_order(E, cfg.p);
  ordered_json j;
  j["order"] = t.order;
  j["gcd_bound"] = t.gcd_bound;
  j["p"] = cfg.p;
  j["p_part"] = t.p_part;
  j["status"] = t.confirmed ? "confirmed" : "upper bound only";
  std::ostringstream os;
  os << "torsion order = " << t.order << " (" << (t.confirmed ? "confirmed" : "upper bound only")
     << ", gcd bound " << t.gcd_bound << "), " << cfg.p << "-part = " << t.p_part << "\n";
  emit(cfg, j, os.str());
  return 0;
}

int cmd_period(const RunConfig& cfg) {
  auto E = ellbf::curve_from_list(parse_curve(cfg.curve_spec));
  auto eng = make_engine(E, cfg);
  const auto& per = eng.periods();
  ordered_json j;
  j["omega_plus"] = per.omega_plus.str(30);
  j["real_components"] = per.real_components;
  std::ostringstream os;
  os << "omega_plus = " << per.omega_plus.str(30) << "\n"
     << "real components = " << per.real_components << "\n";
  emit(cfg, j, os.str());
  return 0;
}

int cmd_modsym(const RunConfig& cfg) {
  auto E = ellbf::curve_from_list(parse_curve(cfg.curve_spec));
  auto eng = make_engine(E, cfg);
  auto sym = eng.modular_symbol(parse_rational(cfg.r_spec));
  ordered_json j;
  j["r"] = sym.r.get_str();
  j["value_plus"] = sym.value_plus.get_str();
  std::ostringstream os;
  os << "[" << sym.r << "]^+ = " << sym.value_plus << "\n";
  emit(cfg, j, os.str());
  return 0;
}

int cmd_theta(const RunConfig& cfg) {
  auto E = ellbf::curve_from_list(parse_curve(cfg.curve_spec));
  auto eng = make_engine(E, cfg);
  auto th = eng.theta_element(cfg.p, cfg.n, cfg.padic_precision);
  ordered_json j;
  j["p"] = th.p;
  j["n"] = th.level;
  j["precision"] = th.precision;
  ordered_json coeffs;
  std::ostringstream os;
  os << "theta element, level " << th.level << ", coefficients mod " << cfg.p << "^"
     << th.precision << ":\n";
  for (const auto& [a, c] : th.coeffs) {
    coeffs[std::to_string(a)] = c.get_str();
    os << "  sigma_" << a << ": " << c << "\n";
  }
  j["coeffs"] = coeffs;
  emit(cfg, j, os.str());
  return 0;
}

int cmd_padic_l(const RunConfig& cfg) {
  auto E = ellbf::curve_from_list(parse_curve(cfg.curve_spec));
  auto eng = make_engine(E, cfg);
  auto G = ellbf::stabilized_Lp(eng, cfg.p, cfg.n, cfg.padic_precision);
  auto inv = ellbf::newton_invariants(G);
  ordered_json j;
  j["p"] = cfg.p;
  j["n"] = cfg.n;
  j["precision"] = cfg.padic_precision;
  std::vector<std::string> coeffs;
  for (const auto& c : G.coeffs) coeffs.push_back(c.get_str());
  j["coeffs"] = coeffs;
  j["mu"] = inv.mu;
  j["lambda"] = inv.lambda;
  std::ostringstream os;
  os << "G_" << cfg.n << " mod (" << cfg.p << "^" << cfg.padic_precision << ", omega_" << cfg.n
     << "), coefficients (T^0, T^1, ...):\n ";
  for (const auto& c : G.coeffs) os << " " << c;
  os << "\nmu = " << inv.mu << ", lambda = " << inv.lambda << "\n";
  emit(cfg, j, os.str());
  return 0;
}

int cmd_bf_sum(const RunConfig& cfg) {
  auto S = ellbf::load_system(cfg.system_path);
  mpz_class brute = ellbf::bf_sum_bruteforce(S);
  mpz_class brute_left = ellbf::bf_sum_bruteforce_left(S);
  mpz_class closed = ellbf::bf_sum_closed(S);
  ordered_json j;
  j["group_order"] = S.group_order().get_str();
  j["brute_force"] = brute.get_str();
  j["brute_force_delta_left"] = brute_left.get_str();
  j["orders_agree"] = (brute == brute_left);
  j["closed_form"] = closed.get_str();
  std::ostringstream os;
  os << "|G| = " << S.group_order() << "\n";
  os << "brute force sum = " << brute << "\n";
  os << "delta-on-left sum = " << brute_left << (brute == brute_left ? " (agrees)" : " (DISAGREES)")
     << "\n";
  os << "closed form |G|*|ker delta| = " << closed << "\n";
  if (S.has_action()) {
    auto split = ellbf::isotypic_split_sum(S);
    ordered_json comps;
    os << "isotypic components:\n";
    for (const auto& [r, v] : split.component_values) {
      comps[std::to_string(r)] = v.get_str();
      os << "  r = " << r << ": " << v << "\n";
    }
    j["components"] = comps;
  }
  emit(cfg, j, os.str());
  return 0;
}

int cmd_verify(const RunConfig& cfg) {
  auto E = ellbf::curve_from_list(parse_curve(cfg.curve_spec));
  auto fix = ellbf::load_fixture(cfg.fixture_path);
  ellbf::VerifyConfig vc{cfg.padic_precision, cfg.float_bits, cfg.denom_bound,
                         cache_dir_from_env(), 3};
  auto report = ellbf::check_theorem(E, cfg.p, cfg.n, fix, vc);
  emit(cfg, ellbf::report_to_json(report, E), ellbf::report_to_text(report, E));
  return report.pass ? 0 : 2;
}

int cmd_keylemma(const RunConfig& cfg) {
  auto E = ellbf::curve_from_list(parse_curve(cfg.curve_spec));
  auto fix = ellbf::load_fixture(cfg.fixture_path);
  ellbf::VerifyConfig vc{cfg.padic_precision, cfg.float_bits, cfg.denom_bound,
                         cache_dir_from_env(), 3};
  auto report = ellbf::check_keylemma(E, cfg.p, cfg.n, fix, vc);
  emit(cfg, ellbf::report_to_json(report, E), ellbf::report_to_text(report, E));
  if (report.verdict_mode && !report.pass) return 2;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"p-adic L-valuations and BF character sums for semistable elliptic curves"};
  app.require_subcommand(1);

  RunConfig cfg;
  app.add_option("--output", cfg.output, "output format: text|json")->capture_default_str();
  app.add_option("-M,--precision", cfg.padic_precision, "p-adic working precision (mod p^M)")
      ->capture_default_str();
  app.add_option("-B,--float-bits", cfg.float_bits, "float working precision in bits")
      ->capture_default_str();
  app.add_option("-D,--denom-bound", cfg.denom_bound, "rational reconstruction denominator bound")
      ->capture_default_str();

  auto add_curve = [&](CLI::App* c) {
    c->add_option("--curve", cfg.curve_spec, "a1,a2,a3,a4,a6")->required();
  };

  auto* c_info = app.add_subcommand("curve-info", "Weierstrass invariants and bad primes");
  add_curve(c_info);

  auto* c_local = app.add_subcommand("local-data", "reduction data at a bad prime");
  add_curve(c_local);
  c_local->add_option("--v", cfg.v, "bad prime")->required();

  auto* c_ap = app.add_subcommand("ap", "Hecke eigenvalues a_2..a_bound");
  add_curve(c_ap);
  c_ap->add_option("--bound", cfg.bound, "largest index")->required();

  auto* c_tors = app.add_subcommand("torsion", "torsion order and its p-part");
  add_curve(c_tors);
  c_tors->add_option("--p", cfg.p, "prime for the p-part")->required();

  auto* c_period = app.add_subcommand("period", "real period by AGM");
  add_curve(c_period);

  auto* c_modsym = app.add_subcommand("modsym", "plus modular symbol [r]^+");
  add_curve(c_modsym);
  c_modsym->add_option("--r", cfg.r_spec, "rational number a/b")->required();

  auto* c_theta = app.add_subcommand("theta", "Mazur-Tate theta element");
  add_curve(c_theta);
  c_theta->add_option("--p", cfg.p, "odd prime of good ordinary reduction")->required();
  c_theta->add_option("--n", cfg.n, "level (conductor p^{n+1})")->required();

  auto* c_lp = app.add_subcommand("padic-l", "stabilized p-adic L truncation G_n and (mu, lambda)");
  add_curve(c_lp);
  c_lp->add_option("--p", cfg.p, "odd prime of good ordinary reduction")->required();
  c_lp->add_option("--n", cfg.n, "level")->required();

  auto* c_bf = app.add_subcommand("bf-sum", "exact BF character sum of a finite system");
  c_bf->add_option("--system", cfg.system_path, "system descriptor JSON")->required();

  auto* c_verify = app.add_subcommand("verify", "check the path integral identity");
  add_curve(c_verify);
  c_verify->add_option("--p", cfg.p, "odd prime")->required();
  c_verify->add_option("--n", cfg.n, "cyclotomic level")->required();
  c_verify->add_option("--fixture", cfg.fixture_path, "Selmer fixture JSON")->required();

  auto* c_lemma = app.add_subcommand("keylemma", "check the Selmer valuation identity");
  add_curve(c_lemma);
  c_lemma->add_option("--p", cfg.p, "odd prime")->required();
  c_lemma->add_option("--n", cfg.n, "cyclotomic level")->required();
  c_lemma->add_option("--fixture", cfg.fixture_path, "Selmer fixture JSON")->required();

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError&) {
    std::cerr << "usage error; run with --help\n";
    return 64;
  }

  try {
    if (c_info->parsed()) {
      validate_config(cfg, false);
      return cmd_curve_info(cfg);
    }
    if (c_local->parsed()) {
      validate_config(cfg, false);
      return cmd_local_data(cfg);
    }
    if (c_ap->parsed()) {
      validate_config(cfg, false);
      if (cfg.bound < 1) throw ellbf::domain_error("bound must be >= 1");
      return cmd_ap(cfg);
    }
    if (c_tors->parsed()) {
      validate_config(cfg, true);
      return cmd_torsion(cfg);
    }
    if (c_period->parsed()) {
      validate_config(cfg, false);
      return cmd_period(cfg);
    }
    if (c_modsym->parsed()) {
      validate_config(cfg, false);
      return cmd_modsym(cfg);
    }
    if (c_theta->parsed()) {
      validate_config(cfg, true);
      return cmd_theta(cfg);
    }
    if (c_lp->parsed()) {
      validate_config(cfg, true);
      return cmd_padic_l(cfg);
    }
    if (c_bf->parsed()) {
      validate_config(cfg, false);
      return cmd_bf_sum(cfg);
    }
    if (c_verify->parsed()) {
      validate_config(cfg, true);
      return cmd_verify(cfg);
    }
    if (c_lemma->parsed()) {
      validate_config(cfg, true);
      return cmd_keylemma(cfg);
    }
  } catch (const ellbf::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 64;
}
