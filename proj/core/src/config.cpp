#include "gapped1d/config.hpp"

#include <cmath>
#include <fstream>

namespace gapped1d {

namespace {

// Overlays user values onto the canonical default document.  Every user
// key must already exist in the defaults, with a matching value shape.
void assign_checked(nlohmann::json& slot, const nlohmann::json& v,
                    const std::string& path) {
  if (slot.is_object())
    throw ConfigError("config key '" + path + "' expects an object");
  if (v.is_object() || v.is_array() != slot.is_array() ||
      v.is_boolean() != slot.is_boolean() ||
      v.is_string() != slot.is_string() || v.is_number() != slot.is_number())
    throw ConfigError("config key '" + path + "' has the wrong type");
  if (slot.is_number_integer() && v.is_number_float()) {
    const double x = v.get<double>();
    if (x != std::floor(x))
      throw ConfigError("config key '" + path + "' expects an integer");
  }
  slot = v;
}

void overlay(nlohmann::json& base, const nlohmann::json& user,
             const std::string& prefix) {
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string path =
        prefix.empty() ? it.key() : prefix + "." + it.key();
    if (!base.contains(it.key()))
      throw ConfigError("unknown config key '" + path + "'");
    nlohmann::json& slot = base[it.key()];
    if (slot.is_object()) {
      if (!it.value().is_object())
        throw ConfigError("config key '" + path + "' expects an object");
      overlay(slot, it.value(), path);
    } else {
      assign_checked(slot, it.value(), path);
    }
  }
}

void apply_override(nlohmann::json& root, const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("override '" + spec + "' must have the form key=value");
  const std::string key = spec.substr(0, eq);
  const std::string value = spec.substr(eq + 1);

  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    parts.push_back(key.substr(start, dot - start));
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  nlohmann::json* cur = &root;
  for (std::size_t k = 0; k + 1 < parts.size(); ++k) {
    if (!cur->is_object() || !cur->contains(parts[k]))
      throw ConfigError("override references unknown key '" + key + "'");
    cur = &(*cur)[parts[k]];
  }
  if (!cur->is_object() || !cur->contains(parts.back()))
    throw ConfigError("override references unknown key '" + key + "'");

  nlohmann::json parsed;
  try {
    parsed = nlohmann::json::parse(value);
  } catch (const nlohmann::json::parse_error&) {
    parsed = value;  // bare words are strings
  }
  assign_checked((*cur)[parts.back()], parsed, key);
}

nlohmann::json canonical_model(const nlohmann::json& j) {
  try {
    return ModelSpec::from_json(j).to_json();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
}

std::uint64_t read_seed(const nlohmann::json& j) {
  if (j.is_number_integer() && !j.is_number_unsigned() &&
      j.get<long long>() < 0)
    throw ConfigError("config key 'seed' must be nonnegative");
  return j.get<std::uint64_t>();
}

}  // namespace

NetSpec::Mode net_mode_from_string(const std::string& mode) {
  if (mode == "full") return NetSpec::Mode::FullGrid;
  if (mode == "random") return NetSpec::Mode::RandomSample;
  throw ConfigError("net.mode must be 'full' or 'random', got '" + mode + "'");
}

AgspScaleMode scale_mode_from_string(const std::string& mode) {
  if (mode == "unnormalized") return AgspScaleMode::UnnormalizedScale;
  if (mode == "known_epsilon0") return AgspScaleMode::KnownEpsilon0;
  throw ConfigError(
      "agsp.scale_mode must be 'unnormalized' or 'known_epsilon0', got '" +
      mode + "'");
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j;
  j["model"] = model.to_json();
  j["seed"] = seed;
  j["oracle"] = oracle;
  j["theory_mode"] = theory_mode;
  j["epsilon"] = epsilon;
  j["c_eps_override"] = c_eps_override;
  j["radius"] = radius;
  j["final_q"] = final_q;
  j["r_proxy"] = r_proxy;
  j["compress_tol"] = compress_tol;
  j["measure_k"] = measure_k;
  j["caps"] = {{"s_cap", caps.s_cap},
               {"b_cap", caps.b_cap},
               {"growth_cap", caps.growth_cap}};
  j["net"] = {{"B", net.B},
              {"eta", net.eta},
              {"mode", net.mode},
              {"count", net.count},
              {"cap", net.cap}};
  j["agsp"] = {{"m", agsp.m},
               {"ell", agsp.ell},
               {"kappa_cap", agsp.kappa_cap},
               {"strict", agsp.strict},
               {"scale_mode", agsp.scale_mode},
               {"final_m", agsp.final_m},
               {"final_ell", agsp.final_ell},
               {"branch_cap", agsp.branch_cap}};
  j["solver"] = {{"feas_tol", solver.feas_tol},
                 {"obj_tol", solver.obj_tol},
                 {"max_iter", solver.max_iter},
                 {"penalty_init", solver.penalty_init},
                 {"penalty_growth", solver.penalty_growth},
                 {"penalty_max", solver.penalty_max},
                 {"window", solver.window},
                 {"step_rule", solver.step_rule}};
  j["numerics"] = {{"svd_discard", numerics.svd_discard},
                   {"gram_threshold", numerics.gram_threshold},
                   {"drop_norm", numerics.drop_norm},
                   {"dedupe_overlap", numerics.dedupe_overlap},
                   {"dense_cap_dim", numerics.dense_cap_dim}};
  return j;
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  try {
    RunConfig c;
    c.model = ModelSpec::from_json(j.at("model"));
    c.seed = read_seed(j.at("seed"));
    c.oracle = j.at("oracle").get<bool>();
    c.theory_mode = j.at("theory_mode").get<bool>();
    c.epsilon = j.at("epsilon").get<double>();
    c.c_eps_override = j.at("c_eps_override").get<double>();
    c.radius = j.at("radius").get<double>();
    c.final_q = j.at("final_q").get<double>();
    c.r_proxy = j.at("r_proxy").get<double>();
    c.compress_tol = j.at("compress_tol").get<double>();
    c.measure_k = j.at("measure_k").get<bool>();
    const auto& caps = j.at("caps");
    c.caps.s_cap = caps.at("s_cap").get<int>();
    c.caps.b_cap = caps.at("b_cap").get<int>();
    c.caps.growth_cap = caps.at("growth_cap").get<int>();
    const auto& net = j.at("net");
    c.net.B = net.at("B").get<int>();
    c.net.eta = net.at("eta").get<double>();
    c.net.mode = net.at("mode").get<std::string>();
    c.net.count = net.at("count").get<int>();
    c.net.cap = net.at("cap").get<long long>();
    const auto& agsp = j.at("agsp");
    c.agsp.m = agsp.at("m").get<int>();
    c.agsp.ell = agsp.at("ell").get<long long>();
    c.agsp.kappa_cap = agsp.at("kappa_cap").get<int>();
    c.agsp.strict = agsp.at("strict").get<bool>();
    c.agsp.scale_mode = agsp.at("scale_mode").get<std::string>();
    c.agsp.final_m = agsp.at("final_m").get<int>();
    c.agsp.final_ell = agsp.at("final_ell").get<long long>();
    c.agsp.branch_cap = agsp.at("branch_cap").get<long long>();
    const auto& sol = j.at("solver");
    c.solver.feas_tol = sol.at("feas_tol").get<double>();
    c.solver.obj_tol = sol.at("obj_tol").get<double>();
    c.solver.max_iter = sol.at("max_iter").get<int>();
    c.solver.penalty_init = sol.at("penalty_init").get<double>();
    c.solver.penalty_growth = sol.at("penalty_growth").get<double>();
    c.solver.penalty_max = sol.at("penalty_max").get<double>();
    c.solver.window = sol.at("window").get<int>();
    c.solver.step_rule = sol.at("step_rule").get<std::string>();
    const auto& nm = j.at("numerics");
    c.numerics.svd_discard = nm.at("svd_discard").get<double>();
    c.numerics.gram_threshold = nm.at("gram_threshold").get<double>();
    c.numerics.drop_norm = nm.at("drop_norm").get<double>();
    c.numerics.dedupe_overlap = nm.at("dedupe_overlap").get<double>();
    c.numerics.dense_cap_dim = nm.at("dense_cap_dim").get<long long>();
    return c;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

RunConfig config_from_document(const nlohmann::json& user,
                               const std::vector<std::string>& overrides) {
  if (!user.is_object()) throw ConfigError("config root must be an object");
  nlohmann::json merged = RunConfig{}.to_json();
  nlohmann::json rest = user;
  if (rest.contains("model")) {
    if (!rest["model"].is_object())
      throw ConfigError("config key 'model' expects an object");
    merged["model"] = canonical_model(rest["model"]);
    rest.erase("model");
  }
  overlay(merged, rest, "");
  bool touched_model = false;
  for (const auto& ov : overrides) {
    apply_override(merged, ov);
    touched_model = touched_model || ov.rfind("model", 0) == 0;
  }
  if (touched_model) merged["model"] = canonical_model(merged["model"]);
  RunConfig cfg = RunConfig::from_json(merged);
  validate_config(cfg);
  return cfg;
}

RunConfig load_config(const std::string& path,
                      const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config parse error in '" + path + "': " + e.what());
  }
  return config_from_document(j, overrides);
}

void validate_config(const RunConfig& cfg) {
  try {
    LocalHamiltonian::build(cfg.model);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
  auto require = [](bool ok, const std::string& key, const std::string& what) {
    if (!ok) throw ConfigError("config key '" + key + "' " + what);
  };
  require(cfg.caps.s_cap >= 1, "caps.s_cap", "must be >= 1");
  require(cfg.caps.b_cap >= 1, "caps.b_cap", "must be >= 1");
  require(cfg.caps.growth_cap >= 1, "caps.growth_cap", "must be >= 1");
  require(cfg.net.B >= 1, "net.B", "must be >= 1");
  require(cfg.net.eta > 0.0, "net.eta", "must be positive");
  net_mode_from_string(cfg.net.mode);
  require(cfg.net.count >= 1, "net.count", "must be >= 1");
  require(cfg.net.cap >= 1, "net.cap", "must be >= 1");
  require(cfg.radius > 0.0, "radius", "must be positive");
  require(cfg.epsilon >= 0.0, "epsilon", "must be nonnegative");
  require(cfg.final_q >= 0.0, "final_q", "must be nonnegative");
  require(cfg.r_proxy > 0.0, "r_proxy", "must be positive");
  require(cfg.compress_tol >= 0.0, "compress_tol", "must be nonnegative");
  require(cfg.agsp.m >= 1, "agsp.m", "must be >= 1");
  require(cfg.agsp.ell >= 1, "agsp.ell", "must be >= 1");
  require(cfg.agsp.final_m >= 1, "agsp.final_m", "must be >= 1");
  require(cfg.agsp.final_ell >= 1, "agsp.final_ell", "must be >= 1");
  require(cfg.agsp.branch_cap >= 1, "agsp.branch_cap", "must be >= 1");
  const AgspScaleMode sm = scale_mode_from_string(cfg.agsp.scale_mode);
  if (sm == AgspScaleMode::KnownEpsilon0 && !cfg.oracle)
    throw ConfigError(
        "config key 'agsp.scale_mode' value 'known_epsilon0' needs the "
        "oracle to supply the ground energy");
  require(cfg.solver.feas_tol > 0.0, "solver.feas_tol", "must be positive");
  require(cfg.solver.obj_tol > 0.0, "solver.obj_tol", "must be positive");
  require(cfg.solver.max_iter >= 1, "solver.max_iter", "must be >= 1");
  require(cfg.solver.penalty_init > 0.0, "solver.penalty_init",
          "must be positive");
  require(cfg.solver.penalty_growth > 1.0, "solver.penalty_growth",
          "must exceed 1");
  require(cfg.solver.penalty_max >= cfg.solver.penalty_init,
          "solver.penalty_max", "must be >= solver.penalty_init");
  require(cfg.solver.window >= 1, "solver.window", "must be >= 1");
  require(cfg.solver.step_rule == "norm_sqrt", "solver.step_rule",
          "must be 'norm_sqrt'");
  require(cfg.numerics.svd_discard >= 0.0, "numerics.svd_discard",
          "must be nonnegative");
  require(cfg.numerics.gram_threshold > 0.0, "numerics.gram_threshold",
          "must be positive");
  require(cfg.numerics.drop_norm > 0.0, "numerics.drop_norm",
          "must be positive");
  require(cfg.numerics.dedupe_overlap > 0.0 &&
              cfg.numerics.dedupe_overlap <= 1.0,
          "numerics.dedupe_overlap", "must lie in (0, 1]");
  require(cfg.numerics.dense_cap_dim >= 2, "numerics.dense_cap_dim",
          "must be >= 2");
  if (cfg.theory_mode && cfg.epsilon <= 0.0 && !cfg.oracle)
    throw ConfigError(
        "config key 'epsilon' must be positive in theory mode unless the "
        "oracle supplies the gap");
}

nlohmann::json theory_block(const RunConfig& cfg, double epsilon,
                            bool enforce) {
  nlohmann::json block;
  if (epsilon <= 0.0) {
    if (enforce)
      throw ConfigError(
          "config key 'epsilon': theory mode needs a positive gap");
    block["available"] = false;
    return block;
  }
  const double c_eps = cfg.c_eps_override > 0.0
                           ? cfg.c_eps_override
                           : (epsilon / 169.0) * (epsilon / 169.0);
  struct Check {
    const char* label;
    double lhs;
    double rhs;
    bool strict;
  };
  const Check checks[] = {
      {"c_eps*(1+1/eps) <= 1/2", c_eps * (1.0 + 1.0 / epsilon), 0.5, false},
      {"14*sqrt(c_eps)/eps < 1/12", 14.0 * std::sqrt(c_eps) / epsilon,
       1.0 / 12.0, true},
      {"84*c_eps/eps < 1/2", 84.0 * c_eps / epsilon, 0.5, true},
  };
  nlohmann::json cj;
  for (const auto& c : checks) {
    const bool ok = c.strict ? c.lhs < c.rhs : c.lhs <= c.rhs;
    cj[c.label] = {{"lhs", c.lhs}, {"ok", ok}};
    if (enforce && !ok)
      throw ConfigError(std::string("theory premise violated: ") + c.label +
                        " (lhs = " + std::to_string(c.lhs) + ")");
  }
  const int n = cfg.model.n;
  const double q = cfg.final_q > 0.0
                       ? cfg.final_q
                       : static_cast<double>(n) * cfg.caps.s_cap;
  const AgspPlan plan = choose_parameters(n, cfg.model.d, epsilon, q, 0.0,
                                          cfg.c_eps_override);
  block["available"] = true;
  block["epsilon"] = epsilon;
  block["c_eps"] = c_eps;
  block["checks"] = cj;
  block["plan"] = {{"q", q},
                   {"m", plan.m},
                   {"ell_exact", plan.ell_exact},
                   {"ell_clamped", plan.ell_clamped}};
  block["bond_budget_48_n_r"] = 48.0 * n * cfg.r_proxy;
  return block;
}

}  // namespace gapped1d
