#include "gsm/bench/config.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace gsm {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + ": key '" + key + "' has the wrong type");
  }
}

std::string postprocess_name(PostprocessMode m) {
  switch (m) {
    case PostprocessMode::Auto:
      return "auto";
    case PostprocessMode::LsOmp:
      return "ls_omp";
    case PostprocessMode::OmpStep:
      return "omp_step";
    case PostprocessMode::None:
      return "none";
  }
  return "auto";
}

PostprocessMode parse_postprocess(const std::string& s) {
  if (s == "auto") return PostprocessMode::Auto;
  if (s == "ls_omp") return PostprocessMode::LsOmp;
  if (s == "omp_step") return PostprocessMode::OmpStep;
  if (s == "none") return PostprocessMode::None;
  throw ConfigError("unknown postprocess mode '" + s + "'");
}

json inner_to_json(const InnerSolverConfig& c) {
  return {{"max_iters", c.max_iters},
          {"rel_obj_tol", c.rel_obj_tol},
          {"abs_grad_tol", c.abs_grad_tol},
          {"restart_every", c.restart_every}};
}

InnerSolverConfig inner_from_json(const json& j, InnerSolverConfig c, const std::string& where) {
  check_keys(j, {"max_iters", "rel_obj_tol", "abs_grad_tol", "restart_every"}, where);
  read(j, "max_iters", c.max_iters, where);
  read(j, "rel_obj_tol", c.rel_obj_tol, where);
  read(j, "abs_grad_tol", c.abs_grad_tol, where);
  read(j, "restart_every", c.restart_every, where);
  return c;
}

json homotopy_to_json(const HomotopyConfig& c) {
  return {{"delta0", c.delta0},
          {"delta_gamma", c.delta_gamma},
          {"delta_gamma_big", c.delta_gamma_big},
          {"n_gamma", c.n_gamma},
          {"eps_x", c.eps_x},
          {"eps_w", c.eps_w},
          {"mm_rel_tol_single", c.mm_rel_tol_single},
          {"mm_rel_tol_double", c.mm_rel_tol_double},
          {"sparse_stop_iters", c.sparse_stop_iters},
          {"wsparse_stop_iters", c.wsparse_stop_iters},
          {"power", static_cast<int>(c.power)},
          {"mm_max_iters", c.mm_max_iters},
          {"max_gamma_steps", c.max_gamma_steps},
          {"inner_power2", inner_to_json(c.inner_power2)},
          {"inner_power1", inner_to_json(c.inner_power1)},
          {"postprocess", postprocess_name(c.postprocess)}};
}

HomotopyConfig homotopy_from_json(const json& j, const std::string& where) {
  check_keys(j,
             {"delta0", "delta_gamma", "delta_gamma_big", "n_gamma", "eps_x", "eps_w", "mm_rel_tol_single",
              "mm_rel_tol_double", "sparse_stop_iters", "wsparse_stop_iters", "power", "mm_max_iters",
              "max_gamma_steps", "inner_power2", "inner_power1", "postprocess"},
             where);
  HomotopyConfig c;
  read(j, "delta0", c.delta0, where);
  read(j, "delta_gamma", c.delta_gamma, where);
  read(j, "delta_gamma_big", c.delta_gamma_big, where);
  read(j, "n_gamma", c.n_gamma, where);
  read(j, "eps_x", c.eps_x, where);
  read(j, "eps_w", c.eps_w, where);
  read(j, "mm_rel_tol_single", c.mm_rel_tol_single, where);
  read(j, "mm_rel_tol_double", c.mm_rel_tol_double, where);
  read(j, "sparse_stop_iters", c.sparse_stop_iters, where);
  read(j, "wsparse_stop_iters", c.wsparse_stop_iters, where);
  read(j, "mm_max_iters", c.mm_max_iters, where);
  read(j, "max_gamma_steps", c.max_gamma_steps, where);
  if (j.contains("power")) {
    int p = 2;
    read(j, "power", p, where);
    if (p != 1 && p != 2) throw ConfigError(where + ": power must be 1 or 2");
    c.power = p == 1 ? Power::One : Power::Two;
  }
  if (j.contains("inner_power2")) c.inner_power2 = inner_from_json(j["inner_power2"], c.inner_power2, where + ".inner_power2");
  if (j.contains("inner_power1")) c.inner_power1 = inner_from_json(j["inner_power1"], c.inner_power1, where + ".inner_power1");
  if (j.contains("postprocess")) {
    std::string s;
    read(j, "postprocess", s, where);
    c.postprocess = parse_postprocess(s);
  }
  c.validate();
  return c;
}

json parse_text(const std::string& text, const std::string& where) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

json recovery_to_json(const RecoverySpec& s) {
  json ks = json::array();
  for (Index k : s.ks) ks.push_back(k);
  return {{"matrix", to_string(s.matrix)},
          {"rho", s.rho},
          {"signal", to_string(s.signal)},
          {"n", s.n},
          {"d", s.d},
          {"k", ks},
          {"nu", s.nu},
          {"trials", s.trials},
          {"seed", s.seed},
          {"methods", s.methods},
          {"threads", s.threads},
          {"full_scale", s.full_scale},
          {"gsm",
           {{"grid", s.gsm.grid == GridKind::Standard ? "standard" : "coarse"},
            {"grid_size", s.gsm.grid_size},
            {"early_stop", s.gsm.early_stop},
            {"early_stop_count", s.gsm.early_stop_count},
            {"delta_lambda", s.gsm.delta_lambda},
            {"lambda_a_floor", s.gsm.lambda_a_floor},
            {"homotopy", homotopy_to_json(s.gsm.homotopy)}}},
          {"lp",
           {{"p_grid", s.lp_p_grid},
            {"lambda_count", s.lp_lambda_count},
            {"eps0", s.lp.eps0},
            {"eps_min", s.lp.eps_min},
            {"alpha_eps", s.lp.alpha_eps},
            {"max_iters", s.lp.max_iters}}},
          {"dc", {{"eta", s.dc_eta}}}};
}

}  // namespace

RecoverySpec parse_recovery_spec(const std::string& json_text) {
  const std::string where = "recovery config";
  const json j = parse_text(json_text, where);
  check_keys(j,
             {"matrix", "rho", "signal", "n", "d", "k", "nu", "trials", "seed", "methods", "threads", "full_scale",
              "gsm", "lp", "dc"},
             where);
  RecoverySpec s;
  std::string str;
  if (j.contains("matrix")) {
    read(j, "matrix", str, where);
    s.matrix = parse_matrix_kind(str);
  }
  if (j.contains("signal")) {
    read(j, "signal", str, where);
    s.signal = parse_signal_kind(str);
  }
  read(j, "rho", s.rho, where);
  read(j, "n", s.n, where);
  read(j, "d", s.d, where);
  if (j.contains("k")) {
    if (j["k"].is_number_integer()) {
      s.ks = {j["k"].get<Index>()};
    } else {
      read(j, "k", s.ks, where);
    }
  }
  read(j, "nu", s.nu, where);
  read(j, "trials", s.trials, where);
  read(j, "seed", s.seed, where);
  read(j, "methods", s.methods, where);
  read(j, "threads", s.threads, where);
  read(j, "full_scale", s.full_scale, where);
  if (j.contains("gsm")) {
    const json& g = j["gsm"];
    const std::string gw = where + ".gsm";
    check_keys(g, {"grid", "grid_size", "early_stop", "early_stop_count", "delta_lambda", "lambda_a_floor", "homotopy"},
               gw);
    if (g.contains("grid")) {
      read(g, "grid", str, gw);
      if (str != "standard" && str != "coarse") throw ConfigError(gw + ": grid must be 'standard' or 'coarse'");
      s.gsm.grid = str == "standard" ? GridKind::Standard : GridKind::Coarse;
    }
    read(g, "grid_size", s.gsm.grid_size, gw);
    read(g, "early_stop", s.gsm.early_stop, gw);
    read(g, "early_stop_count", s.gsm.early_stop_count, gw);
    read(g, "delta_lambda", s.gsm.delta_lambda, gw);
    read(g, "lambda_a_floor", s.gsm.lambda_a_floor, gw);
    if (g.contains("homotopy")) s.gsm.homotopy = homotopy_from_json(g["homotopy"], gw + ".homotopy");
  }
  if (j.contains("lp")) {
    const json& l = j["lp"];
    const std::string lw = where + ".lp";
    check_keys(l, {"p_grid", "lambda_count", "eps0", "eps_min", "alpha_eps", "max_iters"}, lw);
    read(l, "p_grid", s.lp_p_grid, lw);
    read(l, "lambda_count", s.lp_lambda_count, lw);
    read(l, "eps0", s.lp.eps0, lw);
    read(l, "eps_min", s.lp.eps_min, lw);
    read(l, "alpha_eps", s.lp.alpha_eps, lw);
    read(l, "max_iters", s.lp.max_iters, lw);
  }
  if (j.contains("dc")) {
    check_keys(j["dc"], {"eta"}, where + ".dc");
    read(j["dc"], "eta", s.dc_eta, where + ".dc");
  }
  s.validate();
  return s;
}

RecoverySpec load_recovery_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "' for reading");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_recovery_spec(ss.str());
}

std::string dump_recovery_spec(const RecoverySpec& spec) { return recovery_to_json(spec).dump(2); }

HomotopyConfig parse_homotopy_config(const std::string& json_text) {
  return homotopy_from_json(parse_text(json_text, "homotopy config"), "homotopy config");
}

std::string dump_homotopy_config(const HomotopyConfig& cfg) { return homotopy_to_json(cfg).dump(2); }

std::string default_config_json() {
  const KernelAccuracySpec ka;
  const KernelTimingSpec kt;
  json cells = json::array();
  for (const auto& [d, k] : kt.cells) cells.push_back({d, k});
  json dists = json::array();
  for (auto dist : ka.dists) dists.push_back(to_string(dist));
  const json j = {{"recovery", recovery_to_json(RecoverySpec{})},
                  {"homotopy", homotopy_to_json(HomotopyConfig{})},
                  {"kernel_accuracy",
                   {{"d", ka.dims}, {"k", ka.ks}, {"gamma", ka.gammas}, {"dist", dists}, {"trials", ka.trials},
                    {"seed", ka.seed}}},
                  {"kernel_timing",
                   {{"cells", cells}, {"gamma", kt.gamma}, {"dist", to_string(kt.dist)}, {"trials", kt.trials},
                    {"seed", kt.seed}}}};
  return j.dump(2);
}

}  // namespace gsm
