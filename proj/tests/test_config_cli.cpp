#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "doctest.h"
#include "gapped1d/config.hpp"
#include "gapped1d/hamiltonian.hpp"
#include "gapped1d/pipeline.hpp"

using namespace gapped1d;
namespace fs = std::filesystem;

namespace {

nlohmann::json tiny_doc(int n) {
  return nlohmann::json{
      {"model", {{"model", "tfim"}, {"n", n}, {"params", {{"g", 2.0}}}}},
      {"oracle", true},
      {"caps", {{"s_cap", 6}, {"b_cap", 6}, {"growth_cap", 2}}},
      {"net", {{"count", 24}}},
      {"agsp", {{"m", 6}, {"ell", 16}, {"final_m", 16}, {"final_ell", 16}}},
      {"solver", {{"max_iter", 800}}},
  };
}

fs::path fresh_dir(const std::string& leaf) {
  const fs::path dir = fs::temp_directory_path() / leaf;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

CliResult run_cli(const std::string& args, const fs::path& dir) {
  const fs::path out_file = dir / "cli_stdout.txt";
  const fs::path err_file = dir / "cli_stderr.txt";
  const std::string cmd = std::string(GAPPED1D_CLI_PATH) + " " + args + " > " +
                          out_file.string() + " 2> " + err_file.string();
  const int raw = std::system(cmd.c_str());
  CliResult r;
  r.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = read_text(out_file);
  r.err = read_text(err_file);
  return r;
}

}  // namespace

TEST_CASE("default configs round trip through json") {
  const RunConfig def{};
  const RunConfig back = RunConfig::from_json(def.to_json());
  CHECK(back.to_json().dump(2) == def.to_json().dump(2));
  const RunConfig merged = config_from_document(nlohmann::json::object());
  CHECK(merged.to_json().dump(2) == def.to_json().dump(2));
}

TEST_CASE("unknown keys are named in the error") {
  nlohmann::json doc = {{"caps", {{"scap", 3}}}};
  try {
    config_from_document(doc);
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("caps.scap") != std::string::npos);
  }
}

TEST_CASE("type mismatches are rejected, including silent float narrowing") {
  CHECK_THROWS_AS(
      config_from_document(nlohmann::json{{"seed", "zero"}}), ConfigError);
  CHECK_THROWS_AS(
      config_from_document(nlohmann::json{{"caps", {{"s_cap", 2.5}}}}),
      ConfigError);
  CHECK_NOTHROW(
      config_from_document(nlohmann::json{{"caps", {{"s_cap", 4.0}}}}));
  CHECK_THROWS_AS(
      config_from_document(nlohmann::json{{"seed", -4}}), ConfigError);
}

TEST_CASE("overrides reach nested keys and re-canonicalize the model") {
  const RunConfig cfg = config_from_document(
      tiny_doc(4),
      {"seed=42", "net.count=12", "model.params.g=1.25", "radius=0.125"});
  CHECK(cfg.seed == 42);
  CHECK(cfg.net.count == 12);
  CHECK(cfg.model.g == doctest::Approx(1.25));
  CHECK(cfg.radius == doctest::Approx(0.125));

  try {
    config_from_document(tiny_doc(4), {"net.coont=12"});
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("net.coont") != std::string::npos);
  }
}

TEST_CASE("validation names the offending key") {
  try {
    config_from_document(nlohmann::json{{"net", {{"eta", 0.0}}}});
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("net.eta") != std::string::npos);
  }
  CHECK_THROWS_AS(config_from_document(
                      nlohmann::json{{"solver", {{"step_rule", "fixed"}}}}),
                  ConfigError);
  // the scale that divides out a known ground energy needs the oracle
  CHECK_THROWS_AS(
      config_from_document(
          nlohmann::json{{"agsp", {{"scale_mode", "known_epsilon0"}}}}),
      ConfigError);
  CHECK_NOTHROW(config_from_document(
      nlohmann::json{{"oracle", true},
                     {"agsp", {{"scale_mode", "known_epsilon0"}}}}));
}

TEST_CASE("wrong kind model parameters are rejected") {
  nlohmann::json doc = {
      {"model",
       {{"model", "tfim"}, {"n", 4}, {"params", {{"delta", 1.0}}}}}};
  CHECK_THROWS_AS(config_from_document(doc), ConfigError);
}

TEST_CASE("theory planning reports premises and enforces them on demand") {
  RunConfig cfg = config_from_document(tiny_doc(4));
  const nlohmann::json off = theory_block(cfg, 0.0, false);
  CHECK(off.at("available").get<bool>() == false);

  const nlohmann::json on = theory_block(cfg, 0.4, false);
  CHECK(on.at("available").get<bool>() == true);
  CHECK(on.at("checks").is_object());
  CHECK(on.at("checks").size() == 3);
  for (const auto& c : on.at("checks")) CHECK(c.at("ok").get<bool>());
  CHECK(on.at("plan").at("m").get<double>() > 0);

  cfg.c_eps_override = 0.4;  // violates every smallness premise
  const nlohmann::json bad = theory_block(cfg, 0.4, false);
  bool any_fail = false;
  for (const auto& c : bad.at("checks"))
    if (!c.at("ok").get<bool>()) any_fail = true;
  CHECK(any_fail);
  try {
    theory_block(cfg, 0.4, true);
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("theory premise") != std::string::npos);
  }
}

TEST_CASE("configs load from disk with overrides applied") {
  const fs::path dir = fresh_dir("gapped1d_cfg_test");
  const fs::path cfg_path = dir / "run.json";
  write_text(cfg_path, tiny_doc(3).dump(2));
  const RunConfig cfg = load_config(cfg_path.string(), {"seed=9"});
  CHECK(cfg.model.n == 3);
  CHECK(cfg.seed == 9);
  CHECK_THROWS_AS(load_config((dir / "absent.json").string()), ConfigError);
  write_text(dir / "broken.json", "{ not json");
  CHECK_THROWS_AS(load_config((dir / "broken.json").string()), ConfigError);
}

TEST_CASE("cli solve writes the full artifact set") {
  const fs::path dir = fresh_dir("gapped1d_cli_solve");
  const fs::path cfg_path = dir / "run.json";
  write_text(cfg_path, tiny_doc(2).dump(2));
  const CliResult r = run_cli(
      "solve --config " + cfg_path.string() + " --out " + dir.string(), dir);
  CHECK(r.code == 0);
  REQUIRE(fs::exists(dir / "report.json"));
  REQUIRE(fs::exists(dir / "result.mps.json"));
  REQUIRE(fs::exists(dir / "summary.txt"));
  CHECK(r.out.find("final") != std::string::npos);

  const nlohmann::json report =
      nlohmann::json::parse(read_text(dir / "report.json"));
  CHECK(report.at("status").at("exit_code").get<int>() == 0);
  CHECK(report.at("artifact").get<std::string>() == "result.mps.json");
  const double energy = report.at("final").at("energy").get<double>();
  const double eps0 = report.at("epsilon0").get<double>();
  CHECK(std::abs(energy - eps0) < 1e-6);

  // the effective config in the report reloads to the same document
  const RunConfig back =
      config_from_document(report.at("effective_config"));
  CHECK(back.to_json().dump(2) == report.at("effective_config").dump(2));

  const nlohmann::json artifact =
      nlohmann::json::parse(read_text(dir / "result.mps.json"));
  CHECK(artifact.at("format").get<std::string>() == "mps/1");
  CHECK(artifact.at("energy").get<double>() == doctest::Approx(energy));
}

TEST_CASE("cli solve honors seed flags and rejects bad overrides") {
  const fs::path dir = fresh_dir("gapped1d_cli_seed");
  const fs::path cfg_path = dir / "run.json";
  write_text(cfg_path, tiny_doc(2).dump(2));
  const CliResult ok = run_cli("solve --config " + cfg_path.string() +
                                   " --seed 42 --out " + dir.string(),
                               dir);
  CHECK(ok.code == 0);
  const nlohmann::json report =
      nlohmann::json::parse(read_text(dir / "report.json"));
  CHECK(report.at("effective_config").at("seed").get<std::uint64_t>() == 42);

  const CliResult bad = run_cli("solve --config " + cfg_path.string() +
                                    " --override bad.key=1 --out " +
                                    dir.string(),
                                dir);
  CHECK(bad.code == 3);
  CHECK(bad.err.find("bad.key") != std::string::npos);
}

TEST_CASE("cli aborts surface as exit code two with a report") {
  const fs::path dir = fresh_dir("gapped1d_cli_abort");
  nlohmann::json doc = tiny_doc(3);
  doc["net"]["count"] = 2;
  doc["radius"] = 1e-9;
  doc["solver"]["feas_tol"] = 1e-12;
  doc["solver"]["max_iter"] = 150;
  const fs::path cfg_path = dir / "run.json";
  write_text(cfg_path, doc.dump(2));
  const CliResult r = run_cli(
      "solve --config " + cfg_path.string() + " --out " + dir.string(), dir);
  CHECK(r.code == 2);
  REQUIRE(fs::exists(dir / "report.json"));
  CHECK(!fs::exists(dir / "result.mps.json"));
  const nlohmann::json report =
      nlohmann::json::parse(read_text(dir / "report.json"));
  CHECK(report.at("status").at("exit_code").get<int>() == 2);
  CHECK(report.at("status").at("aborted_iteration").get<int>() >= 1);
}

TEST_CASE("cli verify runs the fast check suite") {
  const fs::path dir = fresh_dir("gapped1d_cli_verify");
  const CliResult r = run_cli("verify --instances 2", dir);
  CHECK(r.code == 0);
  CHECK(r.out.find("pass") != std::string::npos);
}

TEST_CASE("cli bench emits a csv header even for an empty suite") {
  const fs::path dir = fresh_dir("gapped1d_cli_bench");
  const fs::path suite = dir / "suite.json";
  write_text(suite, "[]");
  const CliResult r = run_cli("bench --suite " + suite.string(), dir);
  CHECK(r.code == 0);
  CHECK(r.out.find(
            "name,n,d,fidelity,energy_error,wall_seconds,peak_set,peak_bond,"
            "status") != std::string::npos);
}

TEST_CASE("cli refresh-fixtures reproduces the frozen spectra") {
  const fs::path dir = fresh_dir("gapped1d_cli_fixtures");
  const fs::path out = dir / "spectra.json";
  const CliResult r = run_cli("refresh-fixtures --path " + out.string(), dir);
  CHECK(r.code == 0);
  REQUIRE(fs::exists(out));
  const std::vector<SpectrumFixture> fresh =
      load_spectrum_fixtures(out.string());
  const std::vector<SpectrumFixture> frozen = load_spectrum_fixtures(
      std::string(GAPPED1D_FIXTURE_DIR) + "/spectra.json");
  REQUIRE(fresh.size() == frozen.size());
  for (std::size_t k = 0; k < fresh.size(); ++k) {
    CHECK(std::abs(fresh[k].epsilon0 - frozen[k].epsilon0) < 1e-9);
    CHECK(std::abs(fresh[k].epsilon1 - frozen[k].epsilon1) < 1e-9);
  }
}
