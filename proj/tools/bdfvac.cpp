// bdfvac: self-consistent polarized-vacuum solver on a momentum lattice.
//
// Subcommands
//   solve         run the fixed-point iteration from a JSON config
//   response      tabulate the linear-response function B(k)
//   constants     evaluate the contraction-certificate constants
//   validate      randomised checks of the inequality toolbox
//   lattice-info  size/memory report for a lattice configuration
//
// Exit codes: 0 success, 1 failed run (gap collapse, divergence, violated
// certificate with --require-certificate, validation violations), 2 bad
// usage or configuration.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "bdf/certificate.hpp"
#include "bdf/errors.hpp"
#include "bdf/response.hpp"
#include "bdf/scf.hpp"
#include "bdf/version.hpp"

using json = nlohmann::ordered_json;
using namespace bdf;

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json make_manifest(const std::string& command, json parameters) {
  json m;
  m["tool"] = "bdfvac";
  m["version"] = kVersion;
  m["command"] = command;
  m["parameters"] = std::move(parameters);
  return m;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file: " + path.string());
  out << text;
  if (!out) throw ConfigError("write failed: " + path.string());
}

void write_json(const std::filesystem::path& path, const json& j) {
  write_text(path, j.dump(2) + "\n");
}

// Solver configuration: a flat JSON object with exactly these keys.
const char* const kConfigKeys[] = {
    "alpha",         "lambda",        "grid.points_per_axis", "grid.spacing",
    "source.profile", "source.z",     "source.sigma",         "scheme",
    "exchange",      "tol",           "max_iter",
};

SolverConfig parse_config(const json& j, json& echo) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : kConfigKeys) known |= item.key() == k;
    if (!known) throw ConfigError("unknown config key: " + item.key());
  }
  for (const char* k : kConfigKeys)
    if (!j.contains(k)) throw ConfigError(std::string("missing config key: ") + k);

  auto num = [&](const char* k) -> double {
    if (!j.at(k).is_number()) throw ConfigError(std::string(k) + " must be a number");
    return j.at(k).get<double>();
  };
  auto str = [&](const char* k) -> std::string {
    if (!j.at(k).is_string()) throw ConfigError(std::string(k) + " must be a string");
    return j.at(k).get<std::string>();
  };

  SolverConfig cfg;
  cfg.alpha = num("alpha");
  if (!(cfg.alpha >= 0.0)) throw ConfigError("alpha must be >= 0");
  const double lambda = num("lambda");
  if (!(lambda > 0.0)) throw ConfigError("lambda must be > 0");

  if (!j.at("grid.points_per_axis").is_number_integer())
    throw ConfigError("grid.points_per_axis must be an integer");
  cfg.lattice.points_per_axis = j.at("grid.points_per_axis").get<int>();
  cfg.lattice.spacing = num("grid.spacing");
  cfg.lattice.cutoff = lambda;

  const std::string profile = str("source.profile");
  if (profile != "gaussian") throw ConfigError("source.profile must be \"gaussian\"");
  cfg.source.profile = SourceSpec::Profile::gaussian;
  cfg.source.z = num("source.z");
  cfg.source.sigma = num("source.sigma");
  if (!(cfg.source.sigma > 0.0)) throw ConfigError("source.sigma must be > 0");

  const std::string scheme = str("scheme");
  if (scheme == "plain")
    cfg.scheme = Scheme::plain;
  else if (scheme == "preconditioned")
    cfg.scheme = Scheme::preconditioned;
  else
    throw ConfigError("scheme must be \"plain\" or \"preconditioned\"");

  if (!j.at("exchange").is_boolean()) throw ConfigError("exchange must be a boolean");
  cfg.exchange_enabled = j.at("exchange").get<bool>();

  cfg.tol = num("tol");
  if (!(cfg.tol > 0.0)) throw ConfigError("tol must be > 0");
  if (!j.at("max_iter").is_number_integer())
    throw ConfigError("max_iter must be an integer");
  cfg.max_iter = j.at("max_iter").get<int>();
  if (cfg.max_iter < 1) throw ConfigError("max_iter must be >= 1");

  echo = j;
  return cfg;
}

SolverConfig load_config(const std::string& path, json& echo) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return parse_config(j, echo);
}

json energy_json(const EnergyBreakdown& e) {
  json out;
  out["kinetic"] = e.kinetic;
  out["direct_external"] = e.direct_external;
  out["direct_self"] = e.direct_self;
  out["exchange"] = e.exchange;
  out["total"] = e.total;
  return out;
}

json certificate_json(const Certificate& c) {
  json out;
  out["alpha"] = c.alpha;
  out["lambda"] = c.lambda;
  out["b"] = c.b;
  out["source_c_norm"] = c.n_c_norm;
  out["alpha_b"] = c.alpha_b_value;
  out["r_b"] = c.r_b;
  out["x_star"] = c.x_star;
  out["weak_field"] = c.weak_field;
  out["alpha_bound"] = c.alpha_bound;
  out["banach_ball"] = c.banach_ball;
  out["tail_ok"] = c.tail_ok;
  out["pass"] = c.pass;
  return out;
}

json verification_json(const VerificationReport& v) {
  json out;
  out["commutator_norm"] = v.commutator_norm;
  out["commutator_ok"] = v.commutator_ok;
  out["charge_str"] = v.charge_str;
  out["charge_ok"] = v.charge_ok;
  out["d_value"] = v.d_value;
  out["d_times_alpha_pi4"] = v.d_times_alpha_pi4;
  out["d_ok"] = v.d_ok;
  out["optimality_samples"] = v.optimality_samples;
  out["worst_delta_e"] = v.worst_delta_e;
  out["optimality_ok"] = v.optimality_ok;
  out["all_ok"] = v.all_ok;
  return out;
}

const char* status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iter_exceeded: return "max_iter_exceeded";
    case SolveStatus::diverged: return "diverged";
  }
  return "unknown";
}

void write_trace_csv(const std::filesystem::path& path,
                     const std::vector<IterationRecord>& history) {
  std::string text =
      "iter,x_increment,energy_total,energy_kinetic,energy_direct,energy_exchange,"
      "charge,min_abs_eig\n";
  for (const auto& r : history) {
    text += std::to_string(r.iter);
    text += ',' + fmt17(r.x_increment);
    text += ',' + fmt17(r.energy.total);
    text += ',' + fmt17(r.energy.kinetic);
    text += ',' + fmt17(r.energy.direct_external + r.energy.direct_self);
    text += ',' + fmt17(r.energy.exchange);
    text += ',' + fmt17(r.charge_str);
    text += ',' + fmt17(r.min_abs_eig);
    text += '\n';
  }
  write_text(path, text);
}

int run_solve(const std::string& config_path, const std::string& out_dir,
              const std::string& warm_start, const std::string& save_path,
              bool require_certificate, double cert_b, bool quiet) {
  json echo;
  const SolverConfig cfg = load_config(config_path, echo);

  json params;
  params["config"] = echo;
  params["config_path"] = config_path;
  params["require_certificate"] = require_certificate;
  params["certificate_b"] = cert_b;
  if (!warm_start.empty()) params["warm_start"] = warm_start;

  SolverResult res = [&] {
    if (warm_start.empty()) return solve(cfg);
    auto [q0, rho0] = load_state(warm_start);
    return solve(cfg, std::move(q0), std::move(rho0));
  }();

  if (!quiet) {
    std::cout << "status: " << status_name(res.status) << " after "
              << res.history.size() << " iterations\n";
    if (!res.history.empty())
      std::cout << "final increment: " << fmt17(res.history.back().x_increment)
                << "  energy: " << fmt17(res.history.back().energy.total) << "\n";
    std::cout << "contraction rate: " << fmt17(res.contraction_rate) << "\n";
  }

  // Existence/uniqueness certificate for this coupling and source; the
  // constants need lambda >= 3.
  json cert = nullptr;
  bool cert_pass = true;
  if (cfg.lattice.cutoff >= 3.0) {
    const DensityField n = source_density(res.lattice, cfg.source);
    const Certificate c = check_conditions(cfg.alpha, cfg.lattice.cutoff, n, cert_b);
    cert = certificate_json(c);
    cert_pass = c.pass;
  } else if (require_certificate) {
    throw ConfigError("--require-certificate needs lambda >= 3");
  }

  const std::filesystem::path out(out_dir);
  std::filesystem::create_directories(out);

  json report;
  report["manifest"] = make_manifest("solve", params);
  report["status"] = status_name(res.status);
  report["iterations"] = res.history.size();
  report["contraction_rate"] = res.contraction_rate;
  json final_state;
  if (!res.history.empty()) {
    const IterationRecord& last = res.history.back();
    final_state["x_increment"] = last.x_increment;
    final_state["energy"] = energy_json(last.energy);
    final_state["charge"] = last.charge_str;
    final_state["min_abs_eig"] = last.min_abs_eig;
  }
  report["final"] = final_state;
  report["verification"] =
      res.converged ? verification_json(res.verification) : json(nullptr);
  report["certificate"] = cert;
  json lat;
  lat["modes"] = res.lattice->mode_count();
  lat["diffs"] = res.lattice->diff_count();
  lat["spacing"] = res.lattice->spec().spacing;
  lat["cutoff"] = res.lattice->spec().cutoff;
  report["lattice"] = lat;

  write_json(out / "report.json", report);
  write_trace_csv(out / "trace.csv", res.history);
  if (!save_path.empty()) save_state(save_path, res.q, res.rho_prime);
  if (!quiet) std::cout << "wrote " << (out / "report.json").string() << "\n";

  if (res.status == SolveStatus::diverged) return 1;
  if (require_certificate && !cert_pass) {
    if (!quiet) std::cout << "certificate violated\n";
    return 1;
  }
  return 0;
}

int run_response(double lambda, double k_min, double k_max, int points, bool log_grid,
                 const std::string& out_dir, bool quiet) {
  if (!(lambda > 0.0)) throw ConfigError("lambda must be > 0");
  if (!(k_min > 0.0) || !(k_max >= k_min)) throw ConfigError("need 0 < k-min <= k-max");
  if (points < 1) throw ConfigError("points must be >= 1");
  if (log_grid && points < 2 && k_max > k_min)
    throw ConfigError("log grid needs at least 2 points");

  std::string text = "k_abs,lambda,B_1d,B_3d,rel_diff\n";
  for (int i = 0; i < points; ++i) {
    const double t = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
    const double k = log_grid ? k_min * std::pow(k_max / k_min, t)
                              : k_min + t * (k_max - k_min);
    const double b1 = b_lambda_1d(k, lambda);
    const double b3 = b_lambda_3d(Vec3(0.0, 0.0, k), lambda);
    const double rel = std::abs(b3 - b1) / std::max(std::abs(b1), 1e-300);
    text += fmt17(k) + ',' + fmt17(lambda) + ',' + fmt17(b1) + ',' + fmt17(b3) +
            ',' + fmt17(rel) + '\n';
  }

  const std::filesystem::path out(out_dir);
  std::filesystem::create_directories(out);
  write_text(out / "response.csv", text);
  if (!quiet) {
    std::cout << "B(0) closed form: " << fmt17(b_lambda_zero_closed(lambda))
              << "  large-cutoff asymptote: " << fmt17(b_lambda_zero_asymptotic(lambda))
              << "\n";
    std::cout << "wrote " << (out / "response.csv").string() << "\n";
  }
  return 0;
}

int run_constants(double lambda, double b, const std::string& out_dir, bool quiet) {
  json params;
  params["lambda"] = lambda;
  params["b"] = b;

  json out_j;
  out_j["manifest"] = make_manifest("constants", params);

  const CrDetail cr = c_r_detail();
  json cr_j;
  cr_j["value"] = cr.value;
  cr_j["theta"] = cr.theta;
  cr_j["sup_x"] = cr.sup_x;
  out_j["c_r"] = cr_j;
  out_j["c_m"] = c_m();
  out_j["c6"] = c6();
  out_j["c_inf"] = c_inf();
  json kp;
  kp["1.5"] = k_p(1.5);
  kp["2"] = k_p(2.0);
  kp["3"] = k_p(3.0);
  out_j["k_p"] = kp;
  json spq;
  spq["6,4"] = s_pq(6.0, 4.0);
  spq["6,5"] = s_pq(6.0, 5.0);
  spq["6,6"] = s_pq(6.0, 6.0);
  out_j["s_pq"] = spq;

  json kappas = json::array();
  for (int n = 1; n <= 12; ++n) kappas.push_back(kappa(n, lambda));
  out_j["kappa"] = kappas;

  const AlphaBound ab = alpha_b(lambda, b);
  json ab_j;
  ab_j["alpha_b"] = ab.alpha_b;
  ab_j["a_max"] = ab.a_max;
  ab_j["x_star"] = ab.x_star;
  ab_j["r_b"] = ab.r_b;
  ab_j["tail_fraction"] = ab.tail_fraction;
  out_j["alpha_bound"] = ab_j;

  const std::filesystem::path out(out_dir);
  std::filesystem::create_directories(out);
  write_json(out / "constants.json", out_j);
  if (!quiet) {
    std::cout << "C_R = " << fmt17(cr.value) << "  C_M = " << fmt17(c_m())
              << "  alpha_b(" << lambda << ", b=" << b << ") = " << fmt17(ab.alpha_b)
              << "\n";
    std::cout << "wrote " << (out / "constants.json").string() << "\n";
  }
  return 0;
}

int run_validate(long samples, std::uint64_t seed, long kernel_samples,
                 const std::string& out_dir, bool quiet) {
  if (samples < 1) throw ConfigError("samples must be >= 1");
  const InequalityReport rep = inequality_suite(samples, seed, kernel_samples);

  json params;
  params["samples"] = samples;
  params["seed"] = seed;
  params["kernel_samples"] = kernel_samples;

  json out_j;
  out_j["manifest"] = make_manifest("validate", params);
  json fams = json::array();
  for (const auto& f : rep.families) {
    json fj;
    fj["name"] = f.name;
    fj["samples"] = f.samples;
    fj["violations"] = f.violations;
    fj["worst_ratio"] = f.worst_ratio;
    fj["worst_input"] = f.worst_input;
    fams.push_back(fj);
    if (!quiet)
      std::cout << (f.violations == 0 ? "ok  " : "FAIL") << "  " << f.name
                << "  worst ratio " << fmt17(f.worst_ratio) << "\n";
  }
  out_j["families"] = fams;
  out_j["total_violations"] = rep.total_violations;

  const std::filesystem::path out(out_dir);
  std::filesystem::create_directories(out);
  write_json(out / "validate.json", out_j);
  if (!quiet) std::cout << "wrote " << (out / "validate.json").string() << "\n";
  return rep.total_violations == 0 ? 0 : 1;
}

int run_lattice_info(int points, double spacing, double lambda) {
  LatticeSpec spec{points, spacing, lambda};
  const LatticePtr lat = Lattice::create(spec);
  const long m = lat->mode_count();
  const long kernel_bytes = 16L * 16L * m * m;  // complex<double> blocks

  json out_j;
  json params;
  params["points_per_axis"] = points;
  params["spacing"] = spacing;
  params["lambda"] = lambda;
  out_j["manifest"] = make_manifest("lattice-info", params);
  out_j["modes"] = m;
  out_j["diffs"] = lat->diff_count();
  out_j["dv"] = lat->dv();
  out_j["kernel_bytes"] = kernel_bytes;
  double max_p = 0.0;
  for (int i = 0; i < lat->mode_count(); ++i)
    max_p = std::max(max_p, lat->mode(i).norm());
  out_j["max_mode_norm"] = max_p;
  std::cout << out_j.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"polarized-vacuum solver on a momentum lattice"};
  app.require_subcommand(1);
  bool quiet = false;
  app.add_flag("--quiet", quiet, "suppress progress output");

  auto* solve_cmd = app.add_subcommand("solve", "run the self-consistent iteration");
  std::string config_path, out_dir = ".", warm_start, save_path;
  bool require_certificate = false;
  double cert_b = 0.3;
  solve_cmd->add_option("--config", config_path, "JSON configuration file")->required();
  solve_cmd->add_option("--out", out_dir, "output directory (report.json, trace.csv)");
  solve_cmd->add_option("--warm-start", warm_start, "state snapshot to resume from");
  solve_cmd->add_option("--save-state", save_path, "write final state snapshot here");
  solve_cmd->add_flag("--require-certificate", require_certificate,
                      "exit 1 unless the contraction certificate passes");
  solve_cmd->add_option("--cert-b", cert_b, "weak-field split point b in (0,1)");

  auto* resp_cmd = app.add_subcommand("response", "tabulate B(k) (response.csv)");
  double r_lambda = 10.0, k_min = 0.1, k_max = 0.0;
  int r_points = 32;
  bool log_grid = false;
  std::string r_out = ".";
  resp_cmd->add_option("--lambda", r_lambda, "momentum cutoff");
  resp_cmd->add_option("--k-min", k_min, "smallest |k| (> 0)");
  resp_cmd->add_option("--k-max", k_max, "largest |k| (default 2 lambda)");
  resp_cmd->add_option("--points", r_points, "number of grid points");
  resp_cmd->add_flag("--log", log_grid, "logarithmic k grid");
  resp_cmd->add_option("--out", r_out, "output directory");

  auto* const_cmd = app.add_subcommand("constants", "certificate constants (constants.json)");
  double c_lambda = 100.0, c_b = 0.3;
  std::string c_out = ".";
  const_cmd->add_option("--lambda", c_lambda, "momentum cutoff (>= 3)");
  const_cmd->add_option("--b", c_b, "weak-field split point b in (0,1)");
  const_cmd->add_option("--out", c_out, "output directory");

  auto* val_cmd = app.add_subcommand("validate", "randomised inequality checks (validate.json)");
  long v_samples = 100000, v_kernels = 16;
  std::uint64_t v_seed = 0;
  std::string v_out = ".";
  val_cmd->add_option("--samples", v_samples, "samples per inequality family");
  val_cmd->add_option("--seed", v_seed, "RNG seed");
  val_cmd->add_option("--kernel-samples", v_kernels, "random kernels for the exchange bound");
  val_cmd->add_option("--out", v_out, "output directory");

  auto* lat_cmd = app.add_subcommand("lattice-info", "lattice size and memory report");
  int l_points = 8;
  double l_spacing = 1.0, l_lambda = 4.0;
  lat_cmd->add_option("--points", l_points, "points per axis (even)")->required();
  lat_cmd->add_option("--spacing", l_spacing, "momentum step")->required();
  lat_cmd->add_option("--lambda", l_lambda, "momentum cutoff")->required();

  for (auto* sub : app.get_subcommands(nullptr)) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*solve_cmd)
      return run_solve(config_path, out_dir, warm_start, save_path, require_certificate,
                       cert_b, quiet);
    if (*resp_cmd) {
      if (k_max <= 0.0) k_max = 2.0 * r_lambda;
      return run_response(r_lambda, k_min, k_max, r_points, log_grid, r_out, quiet);
    }
    if (*const_cmd) return run_constants(c_lambda, c_b, c_out, quiet);
    if (*val_cmd) return run_validate(v_samples, v_seed, v_kernels, v_out, quiet);
    if (*lat_cmd) return run_lattice_info(l_points, l_spacing, l_lambda);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const SnapshotError& e) {
    std::cerr << "snapshot error: " << e.what() << "\n";
    return 2;
  } catch (const LatticeMismatch& e) {
    std::cerr << "lattice mismatch: " << e.what() << "\n";
    return 2;
  } catch (const GapCollapse& e) {
    std::cerr << "gap collapse: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
