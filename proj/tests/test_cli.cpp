#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <sys/wait.h>

// end-to-end checks driving the installed binary (path injected at build time)

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const int rc = std::system((std::string(BDFVAC_PATH) + " " + args).c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json default_config() {
  json j;
  j["alpha"] = 0.1;
  j["lambda"] = 2.0;
  j["grid.points_per_axis"] = 4;
  j["grid.spacing"] = 1.0;
  j["source.profile"] = "gaussian";
  j["source.z"] = 1.0;
  j["source.sigma"] = 1.0;
  j["scheme"] = "preconditioned";
  j["exchange"] = true;
  j["tol"] = 1e-8;
  j["max_iter"] = 50;
  return j;
}

fs::path scratch() {
  const fs::path dir = "cli_scratch";
  fs::create_directories(dir);
  return dir;
}

fs::path write_config(const json& j, const std::string& name) {
  const fs::path p = scratch() / name;
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << j.dump(2) << "\n";
  return p;
}

int line_count(const std::string& text) {
  int n = 0;
  for (char c : text) n += c == '\n';
  return n;
}

}  // namespace

TEST_CASE("solve writes the full artifact set") {
  const auto cfg = write_config(default_config(), "base.json");
  const fs::path out = scratch() / "solve_out";
  REQUIRE(run("--quiet solve --config " + cfg.string() + " --out " + out.string()) == 0);

  const json report = json::parse(slurp(out / "report.json"));
  CHECK(report["manifest"]["tool"] == "bdfvac");
  CHECK(report["manifest"]["command"] == "solve");
  CHECK(report["manifest"]["parameters"]["config"]["alpha"] == 0.1);
  CHECK(report["status"] == "converged");
  CHECK(report["iterations"].get<int>() >= 2);
  CHECK(report["final"]["x_increment"].get<double>() <= 1e-8);
  CHECK(report["final"]["energy"]["total"].get<double>() < 0.0);
  CHECK(report["verification"]["all_ok"] == true);
  CHECK(report["certificate"].is_null());  // constants need a larger cutoff
  CHECK(report["lattice"]["modes"] == 33);
  CHECK(report["lattice"]["diffs"] == 185);

  const std::string trace = slurp(out / "trace.csv");
  CHECK(trace.rfind("iter,x_increment,energy_total,energy_kinetic,energy_direct,"
                    "energy_exchange,charge,min_abs_eig\n", 0) == 0);
  CHECK(line_count(trace) == report["iterations"].get<int>() + 1);
}

TEST_CASE("identical runs produce identical bytes") {
  const auto cfg = write_config(default_config(), "det.json");
  const fs::path a = scratch() / "det_a", b = scratch() / "det_b";
  REQUIRE(run("--quiet solve --config " + cfg.string() + " --out " + a.string()) == 0);
  REQUIRE(run("--quiet solve --config " + cfg.string() + " --out " + b.string()) == 0);
  CHECK(slurp(a / "report.json") == slurp(b / "report.json"));
  CHECK(slurp(a / "trace.csv") == slurp(b / "trace.csv"));
}

TEST_CASE("configuration problems exit with code 2") {
  auto bad = default_config();
  bad["surprise"] = 1;
  CHECK(run("--quiet solve --config " + write_config(bad, "extra_key.json").string()) == 2);

  bad = default_config();
  bad.erase("tol");
  CHECK(run("--quiet solve --config " + write_config(bad, "missing_key.json").string()) == 2);

  bad = default_config();
  bad["scheme"] = "fast";
  CHECK(run("--quiet solve --config " + write_config(bad, "bad_scheme.json").string()) == 2);

  bad = default_config();
  bad["alpha"] = "strong";
  CHECK(run("--quiet solve --config " + write_config(bad, "alpha_str.json").string()) == 2);

  const fs::path broken = scratch() / "broken.json";
  std::ofstream(broken) << "{ not json";
  CHECK(run("--quiet solve --config " + broken.string()) == 2);
  CHECK(run("--quiet solve --config " + (scratch() / "absent.json").string()) == 2);

  CHECK(run("--quiet") == 2);                        // a subcommand is required
  CHECK(run("--quiet solve") == 2);                  // --config is required
  CHECK(run("--quiet solve --nonsense x") == 2);     // unknown flag
  CHECK(run("--quiet lattice-info --points 5 --spacing 1 --lambda 2 > /dev/null 2>&1") == 2);
  CHECK(run("--quiet response --lambda 10 --k-min 0") == 2);
}

TEST_CASE("lattice-info reports sizes on stdout") {
  const fs::path out = scratch() / "lat.json";
  REQUIRE(run("lattice-info --points 4 --spacing 1 --lambda 2 > " + out.string()) == 0);
  const json info = json::parse(slurp(out));
  CHECK(info["modes"] == 33);
  CHECK(info["diffs"] == 185);
  CHECK(info["dv"] == 1.0);
  CHECK(info["kernel_bytes"].get<long>() == 16L * 16L * 33L * 33L);
  CHECK(info["max_mode_norm"].get<double>() == doctest::Approx(2.0));
}

TEST_CASE("response sweep tabulates both evaluations") {
  const fs::path out = scratch() / "resp_out";
  REQUIRE(run("--quiet response --lambda 10 --k-min 0.5 --k-max 2 --points 4 --out " +
              out.string()) == 0);
  const std::string csv = slurp(out / "response.csv");
  CHECK(line_count(csv) == 5);
  CHECK(csv.rfind("k_abs,lambda,B_1d,B_3d,rel_diff\n", 0) == 0);
  // every tabulated point keeps the two evaluations close
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  while (std::getline(lines, line)) {
    const auto last = line.rfind(',');
    CHECK(std::stod(line.substr(last + 1)) < 1e-3);
  }
}

TEST_CASE("constants snapshot") {
  const fs::path out = scratch() / "const_out";
  REQUIRE(run("--quiet constants --lambda 100 --b 0.3 --out " + out.string()) == 0);
  const json c = json::parse(slurp(out / "constants.json"));
  CHECK(c["c_r"]["value"].get<double>() == doctest::Approx(0.7853981).epsilon(1e-5));
  CHECK(c["c_m"].get<double>() == doctest::Approx(2.1588987).epsilon(1e-6));
  CHECK(c["kappa"].size() == 12);
  CHECK(c["alpha_bound"]["alpha_b"].get<double>() == doctest::Approx(0.018560).epsilon(1e-3));
}

TEST_CASE("validation run is clean and recorded") {
  const fs::path out = scratch() / "val_out";
  REQUIRE(run("--quiet validate --samples 2000 --seed 3 --kernel-samples 2 --out " +
              out.string()) == 0);
  const json v = json::parse(slurp(out / "validate.json"));
  CHECK(v["total_violations"] == 0);
  CHECK(v["families"].size() == 14);
}

TEST_CASE("state snapshots feed warm starts") {
  const auto cfg = write_config(default_config(), "warm.json");
  const fs::path state = scratch() / "warm_state.bin";
  const fs::path cold = scratch() / "warm_cold", warm = scratch() / "warm_warm";
  REQUIRE(run("--quiet solve --config " + cfg.string() + " --out " + cold.string() +
              " --save-state " + state.string()) == 0);
  REQUIRE(run("--quiet solve --config " + cfg.string() + " --out " + warm.string() +
              " --warm-start " + state.string()) == 0);
  const json report = json::parse(slurp(warm / "report.json"));
  CHECK(report["status"] == "converged");
  CHECK(report["iterations"].get<int>() <= 2);

  // the snapshot only fits the lattice it came from
  auto other = default_config();
  other["lambda"] = 1.0;
  CHECK(run("--quiet solve --config " + write_config(other, "warm_other.json").string() +
            " --warm-start " + state.string()) == 2);
  CHECK(run("--quiet solve --config " + cfg.string() + " --warm-start " +
            (scratch() / "no_state.bin").string()) == 2);
}

TEST_CASE("certificate gating") {
  // cutoff below the constants' domain: the flag is a configuration error
  const auto small = write_config(default_config(), "cert_small.json");
  CHECK(run("--quiet solve --config " + small.string() + " --require-certificate --out " +
            (scratch() / "cert_small_out").string()) == 2);

  auto big = default_config();
  big["lambda"] = 3.0;
  big["grid.spacing"] = 1.5;
  big["alpha"] = 0.005;
  const fs::path good_out = scratch() / "cert_good";
  REQUIRE(run("--quiet solve --config " + write_config(big, "cert_good.json").string() +
              " --require-certificate --cert-b 0.3 --out " + good_out.string()) == 0);
  const json good = json::parse(slurp(good_out / "report.json"));
  CHECK(good["certificate"]["pass"] == true);
  CHECK(good["certificate"]["weak_field"] == true);

  big["alpha"] = 0.05;  // above the admissible threshold at this cutoff
  const fs::path bad_out = scratch() / "cert_bad";
  CHECK(run("--quiet solve --config " + write_config(big, "cert_bad.json").string() +
            " --require-certificate --cert-b 0.3 --out " + bad_out.string()) == 1);
  const json bad = json::parse(slurp(bad_out / "report.json"));
  CHECK(bad["certificate"]["pass"] == false);
  CHECK(bad["status"] == "converged");  // the run itself was fine
}

TEST_CASE("a run that cannot contract exits 1") {
  auto wild = default_config();
  wild["alpha"] = 100.0;
  wild["scheme"] = "plain";
  wild["max_iter"] = 40;
  const fs::path out = scratch() / "diverge_out";
  CHECK(run("--quiet solve --config " + write_config(wild, "diverge.json").string() +
            " --out " + out.string()) == 1);
  const json report = json::parse(slurp(out / "report.json"));
  CHECK(report["status"] == "diverged");
  CHECK(report["verification"].is_null());
}
