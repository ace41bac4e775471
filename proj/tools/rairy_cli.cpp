// rairy-cli: kernel grids, F_r tables, Monte-Carlo edge statistics, equilibrium data, identity checks.
//
// Option precedence: command-line flags > RAIRY_<NAME> environment variables > --config file
// (flat key=value lines, '#' comments) > defaults.
// Exit codes: 0 success, 1 numerical failure or failed checks, 2 invalid input.

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rairy/ensemble.hpp"
#include "rairy/equilibrium.hpp"
#include "rairy/fredholm.hpp"
#include "rairy/kernel.hpp"
#include "rairy/verify.hpp"

namespace {

using json = nlohmann::json;
using namespace rairy;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numbers printed with round-trip precision so outputs are bit-stable.
std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (path != "-") {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw std::runtime_error("cannot open output file " + path);
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::vector<double> make_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || !std::isfinite(step)) throw DomainError("step must be positive");
  if (!(hi >= lo)) throw DomainError("max must not be below min");
  const long count = static_cast<long>(std::floor((hi - lo) / step + 1e-9)) + 1;
  if (count > 100000) throw DomainError("grid too large");
  std::vector<double> g;
  for (long i = 0; i < count; ++i) g.push_back(lo + i * step);
  return g;
}

void check_format(const std::string& f) {
  if (f != "csv" && f != "json") throw DomainError("format must be csv or json");
}

struct Common {
  std::string out = "-";
  std::string format = "csv";
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--out", c.out, "output path, - for stdout");
  sub->add_option("--format", c.format, "csv or json");
}

// ---- kernel-grid

struct KernelGridArgs {
  Common io;
  int r = 0;
  double tau = 0.0;
  double min = -4.0, max = 4.0, step = 0.5;
  double tol = 1e-10;
  std::string oracle = "none";
};

int cmd_kernel_grid(const KernelGridArgs& a) {
  check_format(a.io.format);
  if (a.oracle != "none" && a.oracle != "airy") throw DomainError("oracle must be none or airy");
  if (a.oracle == "airy" && a.r != 0) throw DomainError("the airy oracle applies to r = 0 only");
  const kernel::KernelParams p{a.r, a.tau, a.tol, 1.0};
  kernel::validate(p);
  const auto grid = make_grid(a.min, a.max, a.step);
  const bool oracle = a.oracle == "airy";
  Output out(a.io.out);
  auto& os = out.stream();
  json rows = json::array();
  if (a.io.format == "csv") {
    os << "# schema=1\n";
    os << "zeta_x,zeta_y,K,abs_err" << (oracle ? ",K_airy,airy_diff" : "") << '\n';
  }
  for (double x : grid)
    for (double y : grid) {
      const auto v = kernel::r_airy_kernel(x, y, p);
      const double ai = oracle ? kernel::airy_kernel_classical(x, y) : 0.0;
      if (a.io.format == "csv") {
        os << num(x) << ',' << num(y) << ',' << num(v.value) << ',' << num(v.abs_error);
        if (oracle) os << ',' << num(ai) << ',' << num(std::abs(v.value - ai));
        os << '\n';
      } else {
        json row = {{"zeta_x", x}, {"zeta_y", y}, {"K", v.value}, {"abs_err", v.abs_error}};
        if (oracle) {
          row["K_airy"] = ai;
          row["airy_diff"] = std::abs(v.value - ai);
        }
        rows.push_back(row);
      }
    }
  if (a.io.format == "json")
    os << json{{"schema", 1}, {"r", a.r}, {"tau", a.tau}, {"rows", rows}}.dump(1) << '\n';
  return 0;
}

// ---- fr-cdf

struct FrCdfArgs {
  Common io;
  int r = 0;
  double tau = 0.0;
  double s_min = -5.0, s_max = 3.0, s_step = 0.25;
  int quad_order = 40;
  double tol = 1e-9;
};

int cmd_fr_cdf(const FrCdfArgs& a) {
  check_format(a.io.format);
  const auto grid = make_grid(a.s_min, a.s_max, a.s_step);
  if (a.quad_order < 8) throw DomainError("quad-order must be >= 8");
  kernel::validate({a.r, a.tau, a.tol, 1.0});
  const auto t = fredholm::fr_cdf_grid(grid, a.r, a.tau, a.quad_order, a.tol);
  Output out(a.io.out);
  auto& os = out.stream();
  if (a.io.format == "csv") {
    fredholm::write_csv(os, t);
  } else {
    os << json{{"schema", 1}, {"r", a.r}, {"tau", a.tau}, {"quad_order", a.quad_order},
               {"s", t.s_grid}, {"F", t.F_values}, {"est_error", t.point_errors},
               {"max_est_error", t.est_error}}
              .dump(1)
       << '\n';
  }
  return 0;
}

// ---- mc-edge

struct McEdgeArgs {
  Common io;
  int n = 400;
  int r = 1;
  double a = std::nan("");
  int draws = 1000;
  std::uint64_t seed = 0;
  int quad_order = 32;
  double table_step = 0.1;
  std::string draws_out;
};

int cmd_mc_edge(const McEdgeArgs& a) {
  check_format(a.io.format);
  if (a.draws < 1) throw DomainError("draws must be >= 1");
  if (a.quad_order < 8) throw DomainError("quad-order must be >= 8");
  const auto eq = equilibrium::solve_one_cut(equilibrium::Potential({0.0, 0.0, 0.5}));
  const double a_c = equilibrium::critical_a(eq);
  ensemble::EnsembleSpec spec{a.n, a.r, std::isnan(a.a) ? a_c : a.a, a.seed};
  ensemble::validate(spec);
  const double c1 = equilibrium::c1_from_density(eq).value;
  const double tau = a.r > 0 ? std::cbrt(static_cast<double>(a.n)) * (spec.a - a_c) / c1 : 0.0;

  auto samples = ensemble::sample_many(spec, a.draws, 0);
  const auto sc = ensemble::edge_scaling(eq, spec);
  for (auto& s : samples) s.zeta_coords = ensemble::edge_rescale(s, sc);
  const auto cdf = ensemble::largest_eig_cdf(samples);

  const auto grid = make_grid(-8.0, 6.0, a.table_step);
  const auto table = fredholm::fr_cdf_grid(grid, a.r, tau, a.quad_order);
  const auto F = ensemble::interpolate_cdf(table.s_grid, table.F_values);
  const double ks = ensemble::ks_distance(cdf, F);

  if (!a.draws_out.empty()) {
    Output d(a.draws_out);
    ensemble::write_draws_csv(d.stream(), samples);
  }
  Output out(a.io.out);
  auto& os = out.stream();
  if (a.io.format == "csv") {
    os << "# schema=1\n";
    os << "# n=" << a.n << " r=" << a.r << " a=" << num(spec.a) << " tau=" << num(tau)
       << " draws=" << a.draws << " seed=" << a.seed << " delta=" << num(sc.delta) << '\n';
    os << "# ks=" << num(ks) << " dkw99=" << num(cdf.dkw_epsilon) << '\n';
    os << "zeta,F_empirical,F_limit\n";
    for (double z : cdf.values) os << num(z) << ',' << num(cdf(z)) << ',' << num(F(z)) << '\n';
  } else {
    std::vector<double> emp, lim;
    for (double z : cdf.values) {
      emp.push_back(cdf(z));
      lim.push_back(F(z));
    }
    os << json{{"schema", 1}, {"n", a.n}, {"r", a.r}, {"a", spec.a}, {"tau", tau},
               {"draws", a.draws}, {"seed", a.seed}, {"delta", sc.delta}, {"ks", ks},
               {"dkw99", cdf.dkw_epsilon}, {"zeta", cdf.values}, {"F_empirical", emp},
               {"F_limit", lim}}
              .dump(1)
       << '\n';
  }
  return 0;
}

// ---- eq-measure

struct EqArgs {
  Common io;
  std::string potential = "0,0,0.5";
  double a = std::nan("");
  int n = 0;
};

int cmd_eq_measure(const EqArgs& a) {
  check_format(a.io.format);
  const auto V = equilibrium::Potential::parse(a.potential);
  const auto eq = equilibrium::solve_one_cut(V);
  const auto c1 = equilibrium::scaling_constant_c1(eq);
  std::vector<std::pair<std::string, json>> kv = {
      {"alpha", eq.alpha()},
      {"beta", eq.beta()},
      {"ell1", eq.ell1()},
      {"c1", c1.value},
      {"c1_error", c1.error},
      {"a_c", equilibrium::critical_a(eq)},
      {"beta_dot", equilibrium::beta_dot(eq)},
  };
  if (!std::isnan(a.a)) {
    std::optional<int> n;
    if (a.n > 0) n = a.n;
    const auto rep = equilibrium::classify_regime(eq, a.a, n);
    kv.emplace_back("a", a.a);
    kv.emplace_back("regime", equilibrium::regime_name(rep.regime));
    if (rep.tau) kv.emplace_back("tau", *rep.tau);
    if (rep.a_star) kv.emplace_back("a_star", *rep.a_star);
    if (rep.b_star) kv.emplace_back("b_star", *rep.b_star);
  }
  Output out(a.io.out);
  auto& os = out.stream();
  if (a.io.format == "csv") {
    os << "# schema=1\n";
    os << "key,value\n";
    for (const auto& [k, v] : kv)
      os << k << ',' << (v.is_string() ? v.get<std::string>() : num(v.get<double>())) << '\n';
  } else {
    json j = {{"schema", 1}, {"potential", V.coefficients()}};
    for (const auto& [k, v] : kv) j[k] = v;
    os << j.dump(1) << '\n';
  }
  return 0;
}

// ---- verify

struct VerifyArgs {
  Common io;
  std::string suite = "fast";
};

int cmd_verify(const VerifyArgs& a) {
  check_format(a.io.format);
  if (a.suite != "fast" && a.suite != "full") throw DomainError("suite must be fast or full");
  const auto rows = verify::run_suite(a.suite == "fast" ? verify::Suite::Fast : verify::Suite::Full);
  Output out(a.io.out);
  auto& os = out.stream();
  bool ok = true;
  for (const auto& r : rows) ok = ok && r.pass;
  if (a.io.format == "csv") {
    verify::print_table(os, rows);
    os << (ok ? "all checks passed" : "some checks FAILED") << '\n';
  } else {
    json arr = json::array();
    for (const auto& r : rows)
      arr.push_back({{"name", r.name}, {"pass", r.pass}, {"measured", r.measured},
                     {"threshold", r.threshold}, {"detail", r.detail}});
    os << json{{"schema", 1}, {"suite", a.suite}, {"checks", arr}, {"pass", ok}}.dump(1) << '\n';
  }
  return ok ? 0 : 1;
}

// ---- config and environment

std::map<std::string, std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto eqpos = line.find('=');
    if (eqpos == std::string::npos)
      throw UsageError("config line " + std::to_string(lineno) + ": expected key=value");
    auto trim = [](std::string s) {
      const auto l = s.find_first_not_of(" \t\r\"");
      const auto r = s.find_last_not_of(" \t\r\"");
      return l == std::string::npos ? std::string{} : s.substr(l, r - l + 1);
    };
    std::string key = trim(line.substr(0, eqpos));
    for (char& c : key)
      if (c == '_') c = '-';
    kv[key] = trim(line.substr(eqpos + 1));
  }
  return kv;
}

std::string env_name(const std::string& opt) {
  std::string e = "RAIRY_";
  for (char c : opt) e += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return e;
}

// Rebuild argv as: prog sub [config args] [env args] [user args]; later values win.
std::vector<std::string> layered_args(int argc, char** argv, CLI::App& app) {
  std::vector<std::string> args(argv, argv + argc);
  std::size_t sub_pos = 0;
  for (std::size_t i = 1; i < args.size(); ++i)
    if (!args[i].empty() && args[i][0] != '-') {
      sub_pos = i;
      break;
    }
  if (sub_pos == 0) return args;
  CLI::App* sub = nullptr;
  try {
    sub = app.get_subcommand(args[sub_pos]);
  } catch (const CLI::OptionNotFound&) {
    return args;
  }
  std::string config;
  for (std::size_t i = sub_pos + 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) config = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) config = args[i].substr(9);
  }
  if (config.empty())
    if (const char* e = std::getenv("RAIRY_CONFIG")) config = e;

  std::vector<std::string> injected;
  if (!config.empty()) {
    for (const auto& [k, v] : read_config(config)) {
      if (k == "config") continue;
      if (sub->get_option_no_throw("--" + k) == nullptr)
        throw UsageError("unknown config key '" + k + "' for " + sub->get_name());
      injected.push_back("--" + k);
      injected.push_back(v);
    }
  }
  for (const CLI::Option* opt : sub->get_options()) {
    const std::string name = opt->get_single_name();
    if (name.empty() || name == "help" || name == "config") continue;
    if (const char* e = std::getenv(env_name(name).c_str())) {
      injected.push_back("--" + name);
      injected.push_back(e);
    }
  }
  std::vector<std::string> out(args.begin(), args.begin() + static_cast<long>(sub_pos) + 1);
  out.insert(out.end(), injected.begin(), injected.end());
  out.insert(out.end(), args.begin() + static_cast<long>(sub_pos) + 1, args.end());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"r-Airy kernels, deformed Tracy-Widom laws, equilibrium data and edge statistics"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  std::string config_path;
  auto add_config = [&](CLI::App* s) { s->add_option("--config", config_path, "flat key=value file"); };

  KernelGridArgs kg;
  auto* s_kg = app.add_subcommand("kernel-grid", "r-Airy kernel on a square zeta grid");
  add_common(s_kg, kg.io);
  add_config(s_kg);
  s_kg->add_option("--r", kg.r, "number of outliers");
  s_kg->add_option("--tau", kg.tau, "detuning");
  s_kg->add_option("--min", kg.min);
  s_kg->add_option("--max", kg.max);
  s_kg->add_option("--step", kg.step);
  s_kg->add_option("--tol", kg.tol, "quadrature tolerance");
  s_kg->add_option("--oracle", kg.oracle, "none or airy");

  FrCdfArgs fr;
  auto* s_fr = app.add_subcommand("fr-cdf", "largest-eigenvalue law F_r on an s grid");
  add_common(s_fr, fr.io);
  add_config(s_fr);
  s_fr->add_option("--r", fr.r);
  s_fr->add_option("--tau", fr.tau);
  s_fr->add_option("--s-min", fr.s_min);
  s_fr->add_option("--s-max", fr.s_max);
  s_fr->add_option("--s-step", fr.s_step);
  s_fr->add_option("--quad-order", fr.quad_order);
  s_fr->add_option("--tol", fr.tol, "kernel tolerance");

  McEdgeArgs mc;
  auto* s_mc = app.add_subcommand("mc-edge", "sample the spiked Gaussian ensemble and compare with F_r");
  add_common(s_mc, mc.io);
  add_config(s_mc);
  s_mc->add_option("--n", mc.n, "matrix size");
  s_mc->add_option("--r", mc.r, "source rank");
  s_mc->add_option("--a", mc.a, "source strength (default a_c)");
  s_mc->add_option("--draws", mc.draws);
  s_mc->add_option("--seed", mc.seed);
  s_mc->add_option("--quad-order", mc.quad_order, "Nystrom order of the limit table");
  s_mc->add_option("--table-step", mc.table_step, "spacing of the limit table");
  s_mc->add_option("--draws-out", mc.draws_out, "also write the top eigenvalues of every draw");

  EqArgs eqa;
  auto* s_eq = app.add_subcommand("eq-measure", "one-cut equilibrium data and regime report");
  add_common(s_eq, eqa.io);
  add_config(s_eq);
  s_eq->add_option("--potential", eqa.potential, "coefficients, constant term first");
  s_eq->add_option("--a", eqa.a, "source strength for the regime report");
  s_eq->add_option("--n", eqa.n, "matrix size for the near-critical tau");

  VerifyArgs va;
  auto* s_v = app.add_subcommand("verify", "identity suites with pass/fail table");
  add_common(s_v, va.io);
  add_config(s_v);
  s_v->add_option("--suite", va.suite, "fast or full");

  try {
    const auto layered = layered_args(argc, argv, app);
    std::vector<std::string> rev(layered.rbegin(), layered.rend() - 1);
    app.parse(std::move(rev));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (s_kg->parsed()) return cmd_kernel_grid(kg);
    if (s_fr->parsed()) return cmd_fr_cdf(fr);
    if (s_mc->parsed()) return cmd_mc_edge(mc);
    if (s_eq->parsed()) return cmd_eq_measure(eqa);
    if (s_v->parsed()) return cmd_verify(va);
  } catch (const DomainError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const PreconditionError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
