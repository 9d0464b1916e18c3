#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "gapped1d/checks.hpp"
#include "gapped1d/config.hpp"
#include "gapped1d/oracle.hpp"
#include "gapped1d/pipeline.hpp"

namespace {

using namespace gapped1d;

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

int cmd_solve(const std::string& config_path, bool oracle_flag,
              bool have_seed, std::uint64_t seed_value,
              const std::string& out_dir,
              std::vector<std::string> overrides) {
  if (oracle_flag) overrides.push_back("oracle=true");
  if (have_seed) overrides.push_back("seed=" + std::to_string(seed_value));
  const RunConfig cfg = load_config(config_path, overrides);
  RunResult res = run(cfg);

  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);
  if (res.report.exit_code == 0) {
    res.report.artifact = "result.mps.json";
    nlohmann::json artifact;
    artifact["format"] = "mps/1";
    artifact["model"] = res.report.model_name;
    artifact["energy"] = res.energy;
    artifact["model_energy"] = res.model_energy;
    artifact["state"] = mps_to_json(res.state);
    write_text(dir / "result.mps.json", artifact.dump(2) + "\n");
  }
  write_text(dir / "report.json", res.report.to_json().dump(2) + "\n");
  const std::string summary = res.report.summary_text();
  write_text(dir / "summary.txt", summary);
  std::cout << summary;
  std::cerr << "wrote " << (dir / "report.json").string() << "\n";
  return res.report.exit_code;
}

int cmd_verify(int instances, std::uint64_t seed,
               const std::string& fixtures) {
  std::vector<CheckResult> results = lemma_checks(instances, seed);
  if (!fixtures.empty()) results.push_back(check_fixture_file(fixtures));
  std::cout << std::left << std::setw(34) << "check" << std::right
            << std::setw(6) << "count" << std::setw(14) << "worst"
            << std::setw(11) << "tol"
            << "  status\n";
  bool all = true;
  for (const CheckResult& r : results) {
    all = all && r.pass;
    std::cout << std::left << std::setw(34) << r.name << std::right
              << std::setw(6) << r.instances << std::setw(14)
              << std::scientific << std::setprecision(2) << r.worst
              << std::setw(11) << r.tolerance << "  "
              << (r.pass ? "pass" : "FAIL") << "\n";
  }
  std::cout << (all ? "all checks passed\n" : "CHECK FAILURES\n");
  return all ? 0 : 1;
}

nlohmann::json default_bench_suite() {
  nlohmann::json suite = nlohmann::json::array();
  for (int n : {4, 6}) {
    nlohmann::json row;
    row["model"] = {{"model", "tfim"}, {"n", n}, {"params", {{"g", 2.0}}}};
    row["oracle"] = true;
    row["agsp"] = {{"scale_mode", "known_epsilon0"}};
    row["caps"] = {{"s_cap", 8}, {"b_cap", 8}};
    row["net"] = {{"count", 96}};
    suite.push_back(row);
  }
  return suite;
}

int cmd_bench(const std::string& suite_path, const std::string& out_path) {
  nlohmann::json suite;
  if (suite_path.empty()) {
    suite = default_bench_suite();
  } else {
    std::ifstream in(suite_path);
    if (!in) throw ConfigError("cannot read bench suite '" + suite_path + "'");
    try {
      in >> suite;
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError("bench suite parse error: " + std::string(e.what()));
    }
  }
  if (!suite.is_array())
    throw ConfigError("bench suite must be a JSON array of run configs");

  std::ostringstream csv;
  csv << "name,n,d,fidelity,energy_error,wall_seconds,peak_set,peak_bond,"
         "status\n";
  for (const auto& row : suite) {
    std::string name = "?";
    int n = 0, d = 0;
    std::string status = "ok";
    double fid = std::nan(""), err = std::nan(""), wall = std::nan("");
    int peak_set = 0, peak_bond = 0;
    try {
      const RunConfig cfg = config_from_document(row);
      name = cfg.model.name();
      n = cfg.model.n;
      d = cfg.model.d;
      const auto t0 = std::chrono::steady_clock::now();
      const RunResult res = run(cfg);
      wall = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                           t0)
                 .count();
      for (const IterationReport& ir : res.report.iterations) {
        peak_set = std::max({peak_set, ir.size_extend, ir.size_cardinality,
                             ir.size_bond, ir.size_error});
        peak_bond = std::max({peak_bond, ir.bond_extend, ir.bond_cardinality,
                              ir.bond_bond, ir.bond_error});
      }
      if (res.report.exit_code != 0) {
        status = "aborted: " + res.report.diagnostic;
      } else {
        fid = res.report.final_fidelity;
        if (res.report.oracle)
          err = std::abs(res.report.final_energy - res.report.epsilon0);
      }
    } catch (const std::exception& e) {
      status = std::string("error: ") + e.what();
    }
    auto num = [](double x) {
      if (std::isnan(x)) return std::string();
      std::ostringstream os;
      os << std::setprecision(10) << x;
      return os.str();
    };
    std::string safe_status = status;
    for (char& c : safe_status)
      if (c == ',' || c == '\n') c = ';';
    csv << name << "," << n << "," << d << "," << num(fid) << "," << num(err)
        << "," << num(wall) << "," << peak_set << "," << peak_bond << ","
        << safe_status << "\n";
  }
  if (out_path.empty()) {
    std::cout << csv.str();
  } else {
    write_text(out_path, csv.str());
    std::cerr << "wrote " << out_path << "\n";
  }
  return 0;
}

int cmd_refresh_fixtures(const std::string& path) {
  const NumericsConfig nm;
  const std::vector<SpectrumFixture> fixtures = compute_spectrum_fixtures(nm);
  save_spectrum_fixtures(path, fixtures);
  std::cout << "wrote " << fixtures.size() << " fixtures to " << path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Viable-set ground-state solver for gapped one-dimensional chains"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".", fixtures_path, suite_path,
              csv_path;
  std::vector<std::string> overrides;
  bool oracle_flag = false;
  std::uint64_t seed_value = 0;
  int instances = 120;
  std::uint64_t verify_seed = 0x4c454d4d41ull;
  std::string refresh_path = "tests/fixtures/spectra.json";

  CLI::App* solve = app.add_subcommand("solve", "Run the sweep on a config");
  solve->add_option("--config", config_path, "Run configuration JSON")
      ->required();
  solve->add_flag("--oracle", oracle_flag,
                  "Enable dense cross-checks and fidelity tracking");
  CLI::Option* seed_opt =
      solve->add_option("--seed", seed_value, "Override the run seed");
  solve->add_option("--out", out_dir, "Output directory (default .)");
  solve->add_option("--override", overrides,
                    "Config override key=value (repeatable, dotted keys)");

  CLI::App* verify = app.add_subcommand("verify", "Run the property suites");
  verify->add_option("--instances", instances, "Instances per check");
  verify->add_option("--seed", verify_seed, "Master seed for the suites");
  verify->add_option("--fixtures", fixtures_path,
                     "Also check a spectrum fixture file");

  CLI::App* bench = app.add_subcommand("bench", "Timed runs, CSV output");
  bench->add_option("--suite", suite_path,
                    "JSON array of run configs (default: built-in pair)");
  bench->add_option("--out", csv_path, "CSV output path (default stdout)");

  CLI::App* refresh =
      app.add_subcommand("refresh-fixtures", "Regenerate spectrum fixtures");
  refresh->add_option("--path", refresh_path, "Fixture file to write");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed())
      return cmd_solve(config_path, oracle_flag, seed_opt->count() > 0,
                       seed_value, out_dir, overrides);
    if (verify->parsed())
      return cmd_verify(instances, verify_seed, fixtures_path);
    if (bench->parsed()) return cmd_bench(suite_path, csv_path);
    if (refresh->parsed()) return cmd_refresh_fixtures(refresh_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
