#include "banditstream/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "banditstream/environments.hpp"
#include "banditstream/policies_contextual.hpp"
#include "banditstream/policies_recurrent.hpp"
#include "banditstream/policies_stochastic.hpp"

namespace banditstream {

namespace {

using nlohmann::json;

std::string strip_comment(const std::string& line) {
  bool in_str = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (c == '"' && (i == 0 || line[i - 1] != '\\')) in_str = !in_str;
    if (c == '#' && !in_str) return line.substr(0, i);
  }
  return line;
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

json parse_scalar(const std::string& raw, int line_no) {
  const std::string v = trim(raw);
  if (v.empty()) throw ConfigError("toml line " + std::to_string(line_no) + ": empty value");
  if (v.front() == '"') {
    if (v.size() < 2 || v.back() != '"')
      throw ConfigError("toml line " + std::to_string(line_no) + ": unterminated string");
    std::string out;
    for (size_t i = 1; i + 1 < v.size(); ++i) {
      if (v[i] == '\\' && i + 2 < v.size()) {
        ++i;
        switch (v[i]) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          default:
            throw ConfigError("toml line " + std::to_string(line_no) + ": bad escape");
        }
      } else {
        out += v[i];
      }
    }
    return out;
  }
  if (v == "true") return true;
  if (v == "false") return false;
  // integer?
  {
    size_t pos = 0;
    try {
      const long long n = std::stoll(v, &pos);
      if (pos == v.size()) return n;
    } catch (const std::exception&) {
    }
  }
  {
    size_t pos = 0;
    try {
      const double d = std::stod(v, &pos);
      if (pos == v.size()) return d;
    } catch (const std::exception&) {
    }
  }
  throw ConfigError("toml line " + std::to_string(line_no) + ": cannot parse value `" + v + "`");
}

json parse_value(const std::string& raw, int line_no) {
  const std::string v = trim(raw);
  if (!v.empty() && v.front() == '[') {
    if (v.back() != ']')
      throw ConfigError("toml line " + std::to_string(line_no) + ": unterminated array");
    json arr = json::array();
    std::string body = v.substr(1, v.size() - 2);
    std::string item;
    int depth = 0;
    bool in_str = false;
    for (char c : body) {
      if (c == '"') in_str = !in_str;
      if (!in_str) {
        if (c == '[') ++depth;
        if (c == ']') --depth;
        if (c == ',' && depth == 0) {
          if (!trim(item).empty()) arr.push_back(parse_value(item, line_no));
          item.clear();
          continue;
        }
      }
      item += c;
    }
    if (!trim(item).empty()) arr.push_back(parse_value(item, line_no));
    return arr;
  }
  return parse_scalar(v, line_no);
}

std::vector<std::string> split_key(const std::string& key, int line_no) {
  std::vector<std::string> parts;
  std::string cur;
  bool in_str = false;
  for (char c : key) {
    if (c == '"') {
      in_str = !in_str;
      continue;
    }
    if (c == '.' && !in_str) {
      parts.push_back(trim(cur));
      cur.clear();
      continue;
    }
    cur += c;
  }
  parts.push_back(trim(cur));
  for (const auto& p : parts)
    if (p.empty())
      throw ConfigError("toml line " + std::to_string(line_no) + ": empty key segment");
  return parts;
}

json* descend(json& root, const std::vector<std::string>& parts, int line_no) {
  json* node = &root;
  for (const auto& p : parts) {
    if (!node->is_object())
      throw ConfigError("toml line " + std::to_string(line_no) + ": key collision at `" + p + "`");
    node = &(*node)[p];
  }
  return node;
}

}  // namespace

json parse_toml(const std::string& text) {
  json root = json::object();
  json* table = &root;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  std::string pendingkey;
  std::string pending;
  int pending_line = 0;
  int bracket_depth = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_comment(line);
    if (bracket_depth > 0) {
      pending += " " + line;
      for (char c : line) {
        if (c == '[') ++bracket_depth;
        if (c == ']') --bracket_depth;
      }
      if (bracket_depth > 0) continue;
      (*table)[pendingkey] = parse_value(pending, pending_line);
      pending.clear();
      continue;
    }
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '[') {
      const bool array_table = t.size() > 1 && t[1] == '[';
      const std::string close = array_table ? "]]" : "]";
      if (t.substr(t.size() - close.size()) != close)
        throw ConfigError("toml line " + std::to_string(line_no) + ": bad table header");
      const std::string name =
          trim(t.substr(array_table ? 2 : 1, t.size() - 2 * close.size()));
      const auto parts = split_key(name, line_no);
      json* node = &root;
      for (size_t i = 0; i + 1 < parts.size(); ++i) node = &(*node)[parts[i]];
      if (array_table) {
        json& arr = (*node)[parts.back()];
        if (arr.is_null()) arr = json::array();
        if (!arr.is_array())
          throw ConfigError("toml line " + std::to_string(line_no) + ": not an array table");
        arr.push_back(json::object());
        table = &arr.back();
      } else {
        json& obj = (*node)[parts.back()];
        if (obj.is_null()) obj = json::object();
        if (!obj.is_object())
          throw ConfigError("toml line " + std::to_string(line_no) + ": not a table");
        table = &obj;
      }
      continue;
    }
    const size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("toml line " + std::to_string(line_no) + ": expected key = value");
    const auto parts = split_key(trim(t.substr(0, eq)), line_no);
    std::string value = trim(t.substr(eq + 1));
    // multi-line arrays
    int depth = 0;
    bool in_str = false;
    for (char c : value) {
      if (c == '"') in_str = !in_str;
      if (!in_str) {
        if (c == '[') ++depth;
        if (c == ']') --depth;
      }
    }
    json* node = table;
    if (parts.size() > 1)
      node = descend(*table, std::vector<std::string>(parts.begin(), parts.end() - 1), line_no);
    if (depth > 0) {
      pendingkey = parts.back();
      if (parts.size() > 1)
        throw ConfigError("toml line " + std::to_string(line_no) +
                          ": dotted key with multi-line array unsupported");
      pending = value;
      pending_line = line_no;
      bracket_depth = depth;
      continue;
    }
    if (node->contains(parts.back()))
      throw ConfigError("toml line " + std::to_string(line_no) + ": duplicate key `" +
                        parts.back() + "`");
    (*node)[parts.back()] = parse_value(value, line_no);
  }
  if (bracket_depth > 0) throw ConfigError("toml: unterminated array at end of file");
  return root;
}

json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
    try {
      return json::parse(buf.str());
    } catch (const std::exception& e) {
      throw ConfigError(std::string("bad JSON config: ") + e.what());
    }
  }
  return parse_toml(buf.str());
}

void apply_override(json& cfg, const std::string& key, const std::string& value) {
  json parsed;
  try {
    parsed = parse_value(value, 0);
  } catch (const ConfigError&) {
    parsed = value;  // bare strings need no quoting on the command line
  }
  const auto parts = split_key(key, 0);
  json* node = &cfg;
  for (size_t i = 0; i + 1 < parts.size(); ++i) {
    const std::string& p = parts[i];
    if (node->is_array()) {
      size_t idx = 0;
      try {
        idx = static_cast<size_t>(std::stoul(p));
      } catch (const std::exception&) {
        throw ConfigError("--set " + key + ": `" + p + "` is not an array index");
      }
      if (idx >= node->size()) throw ConfigError("--set " + key + ": index out of range");
      node = &(*node)[idx];
    } else {
      node = &(*node)[p];
    }
  }
  json* leaf = node;
  if (leaf->is_array()) {
    size_t idx = 0;
    try {
      idx = static_cast<size_t>(std::stoul(parts.back()));
    } catch (const std::exception&) {
      throw ConfigError("--set " + key + ": `" + parts.back() + "` is not an array index");
    }
    if (idx >= leaf->size()) throw ConfigError("--set " + key + ": index out of range");
    (*leaf)[idx] = parsed;
  } else {
    (*leaf)[parts.back()] = parsed;
  }
}

// ---------------------------------------------------------------------------
// Validation

namespace {

void require_keys(const json& obj, const std::string& where,
                  const std::set<std::string>& allowed,
                  const std::set<std::string>& required = {}) {
  if (!obj.is_object()) throw ConfigError(where + ": expected a table");
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key()))
      throw ConfigError(where + ": unknown key `" + it.key() + "`");
  for (const auto& r : required)
    if (!obj.contains(r)) throw ConfigError(where + ": missing required key `" + r + "`");
}

double num_or(const json& obj, const std::string& key, double dflt) {
  if (!obj.contains(key)) return dflt;
  if (!obj[key].is_number()) throw ConfigError("key `" + key + "` must be a number");
  return obj[key].get<double>();
}

long long int_or(const json& obj, const std::string& key, long long dflt) {
  if (!obj.contains(key)) return dflt;
  if (!obj[key].is_number_integer()) throw ConfigError("key `" + key + "` must be an integer");
  return obj[key].get<long long>();
}

bool bool_or(const json& obj, const std::string& key, bool dflt) {
  if (!obj.contains(key)) return dflt;
  if (!obj[key].is_boolean()) throw ConfigError("key `" + key + "` must be a boolean");
  return obj[key].get<bool>();
}

std::string str_or(const json& obj, const std::string& key, const std::string& dflt) {
  if (!obj.contains(key)) return dflt;
  if (!obj[key].is_string()) throw ConfigError("key `" + key + "` must be a string");
  return obj[key].get<std::string>();
}

const std::set<std::string> kEnvKinds = {
    "stationary_gaussian", "stationary_bernoulli", "linear_profile",
    "variable_context",    "recurrent_var",        "periodic",
    "periodic_random",     "trace_replay"};

void validate_env(const json& env) {
  require_keys(env, "[env]",
               {"kind", "K", "means", "mean_min", "mean_max", "sigma", "d", "L", "S",
                "sigma_profile", "r_noise", "a0", "b0", "reward_sigma", "alpha_prior",
                "mu_prior", "cycle_len", "n_periods", "period_len", "path", "alpha",
                "dynamic_arms", "max_new", "T"},
               {"kind"});
  const std::string kind = env["kind"].get<std::string>();
  if (!kEnvKinds.count(kind)) throw ConfigError("[env]: unknown kind `" + kind + "`");
}

void validate_obs(const json& obs) {
  require_keys(obs, "[obs]", {"mode", "p"});
  const std::string mode = str_or(obs, "mode", "all");
  obs_mode_from_string(mode);
  const double p = num_or(obs, "p", 1.0);
  if (p < 0.0 || p > 1.0) throw ConfigError("[obs]: p must lie in [0, 1]");
}

const std::map<std::string, std::set<std::string>> kPolicyKeys = {
    {"random", {}},
    {"epsilon_greedy", {"eps_c", "eps_d"}},
    {"ucb", {"b"}},
    {"cucb", {"b"}},
    {"cucbv", {"a", "c", "b"}},
    {"ucbv", {"a", "c", "b"}},
    {"ucb_delta", {"delta"}},
    {"moss", {"T", "K"}},
    {"ts_bernoulli", {}},
    {"ts_bounded", {"b"}},
    {"ts_gaussian", {"ts_a", "ts_b", "ts_sigma"}},
    {"discounted_ucb", {"gamma", "b", "xi"}},
    {"sliding_window_ucb", {"tau", "b", "xi"}},
    {"linucb", {"lambda", "alpha"}},
    {"oful", {"lambda", "delta", "R", "S_bound"}},
    {"contextual_ts", {"lambda", "sigma"}},
    {"samplin_ucb", {"lambda", "R", "S_bound", "L_norm", "delta"}},
    {"hidden_linucb_mean", {"delta"}},
    {"hidden_linucb_sample",
     {"delta", "L_samples", "M", "steps_per_period", "sigma0", "sigma_ctx"}},
    {"hidden_linucb_vi",
     {"delta", "delta1", "delta2", "S_bound", "a0", "b0", "window", "nbIt",
      "randomized_init"}},
    {"rrts", {"sigma", "alpha_prior", "mu_prior", "window", "nbIt", "randomized_init"}},
    {"rsts",
     {"d", "sigma", "delta_lds", "alpha_prior", "gamma_prior", "window", "nbIt",
      "mem_theta", "mem_wb"}},
    {"revealed_reward_ts", {"sigma"}},
    {"oracle", {}},
};

void validate_policy(const json& pol, size_t index) {
  const std::string where = "[[policy]] #" + std::to_string(index + 1);
  if (!pol.is_object() || !pol.contains("name"))
    throw ConfigError(where + ": missing `name`");
  const std::string name = pol["name"].get<std::string>();
  const auto it = kPolicyKeys.find(name);
  if (it == kPolicyKeys.end()) throw ConfigError(where + ": unknown policy `" + name + "`");
  auto allowed = it->second;
  allowed.insert("name");
  allowed.insert("label");
  require_keys(pol, where, allowed);
}

bool path_exists(const json& cfg, const std::string& key) {
  const auto parts = split_key(key, 0);
  const json* node = &cfg;
  for (const auto& p : parts) {
    if (node->is_array()) {
      try {
        const size_t idx = static_cast<size_t>(std::stoul(p));
        if (idx >= node->size()) return false;
        node = &(*node)[idx];
        continue;
      } catch (const std::exception&) {
        return false;
      }
    }
    if (!node->is_object() || !node->contains(p)) return false;
    node = &(*node)[p];
  }
  return true;
}

}  // namespace

void validate_config(const json& cfg) {
  require_keys(cfg, "config", {"experiment", "env", "obs", "policy", "sweep"},
               {"experiment", "env", "policy"});
  const json& exp = cfg["experiment"];
  require_keys(exp, "[experiment]",
               {"T", "k", "runs", "seed", "emit_every", "name", "desk_scale"}, {"T", "k"});
  const long long T = int_or(exp, "T", 0);
  const long long k = int_or(exp, "k", 0);
  const long long runs = int_or(exp, "runs", 1);
  const long long every = int_or(exp, "emit_every", 1);
  if (T < 1) throw ConfigError("[experiment]: T must be >= 1");
  if (k < 1) throw ConfigError("[experiment]: k must be >= 1");
  if (runs < 1) throw ConfigError("[experiment]: runs must be >= 1");
  if (every < 1) throw ConfigError("[experiment]: emit_every must be >= 1");
  validate_env(cfg["env"]);
  if (cfg.contains("obs")) validate_obs(cfg["obs"]);
  if (!cfg["policy"].is_array() || cfg["policy"].empty())
    throw ConfigError("config: at least one [[policy]] required");
  for (size_t i = 0; i < cfg["policy"].size(); ++i) validate_policy(cfg["policy"][i], i);
  if (cfg.contains("sweep")) {
    if (!cfg["sweep"].is_object()) throw ConfigError("[sweep]: expected a table");
    for (auto it = cfg["sweep"].begin(); it != cfg["sweep"].end(); ++it) {
      if (!it.value().is_array() )
        throw ConfigError("[sweep]: values must be arrays (key `" + it.key() + "`)");
      if (!path_exists(cfg, it.key()))
        throw ConfigError("[sweep]: key `" + it.key() + "` does not exist in the config");
    }
  }
  // Semantic cross-checks that need K.
  const json& env = cfg["env"];
  long long K = int_or(env, "K", 0);
  if (env.contains("means")) K = static_cast<long long>(env["means"].size());
  if (K > 0 && k > K) throw ConfigError("[experiment]: k must not exceed the arm count");
}

ExperimentSpec parse_experiment(const json& cfg) {
  validate_config(cfg);
  ExperimentSpec spec;
  spec.raw = cfg;
  const json& exp = cfg["experiment"];
  spec.T = static_cast<int>(int_or(exp, "T", 1));
  spec.k = static_cast<int>(int_or(exp, "k", 1));
  spec.runs = static_cast<int>(int_or(exp, "runs", 1));
  spec.seed = static_cast<std::uint64_t>(int_or(exp, "seed", 1));
  spec.emit_every = static_cast<int>(int_or(exp, "emit_every", 1));
  spec.name = str_or(exp, "name", "");
  if (const char* env_seed = std::getenv("BANDITSTREAM_SEED")) {
    try {
      spec.seed = std::stoull(env_seed);
    } catch (const std::exception&) {
      throw ConfigError("BANDITSTREAM_SEED must be an integer");
    }
  }
  spec.env = cfg["env"];
  spec.obs = cfg.contains("obs") ? cfg["obs"] : json::object();
  for (const auto& p : cfg["policy"]) spec.policies.push_back(p);
  if (cfg.contains("sweep"))
    for (auto it = cfg["sweep"].begin(); it != cfg["sweep"].end(); ++it)
      spec.sweep.emplace_back(it.key(), it.value());
  return spec;
}

// ---------------------------------------------------------------------------
// Factories

std::unique_ptr<Environment> make_environment(const json& env, const json& obs) {
  ObservationProcess op;
  op.mode = obs_mode_from_string(str_or(obs, "mode", "all"));
  op.p = num_or(obs, "p", 1.0);
  const std::string kind = env["kind"].get<std::string>();
  if (kind == "stationary_gaussian" || kind == "stationary_bernoulli") {
    std::vector<double> means;
    if (env.contains("means")) {
      means = env["means"].get<std::vector<double>>();
    } else {
      const int K = static_cast<int>(int_or(env, "K", 0));
      if (K < 1) throw ConfigError("[env]: stationary kinds need `means` or `K`");
      const double lo = num_or(env, "mean_min", 0.0);
      const double hi = num_or(env, "mean_max", K > 1 ? 0.9 : 0.0);
      means.resize(static_cast<size_t>(K));
      for (int i = 0; i < K; ++i)
        means[static_cast<size_t>(i)] =
            K > 1 ? hi - (hi - lo) * static_cast<double>(i) / static_cast<double>(K - 1)
                  : hi;
    }
    const auto dist = kind == "stationary_bernoulli" ? StationaryDist::Bernoulli
                                                     : StationaryDist::Gaussian;
    return std::make_unique<StationaryEnv>(std::move(means), dist,
                                           num_or(env, "sigma", 1.0), op);
  }
  if (kind == "linear_profile")
    return std::make_unique<LinearProfileEnv>(
        static_cast<int>(int_or(env, "K", 50)), static_cast<int>(int_or(env, "d", 5)),
        num_or(env, "L", 1.0), num_or(env, "S", 1.0), num_or(env, "sigma_profile", 0.1),
        num_or(env, "r_noise", std::sqrt(0.1)), op);
  if (kind == "variable_context")
    return std::make_unique<VariableContextEnv>(
        static_cast<int>(int_or(env, "K", 50)), static_cast<int>(int_or(env, "d", 10)),
        num_or(env, "a0", 2.0), num_or(env, "b0", 1.0), num_or(env, "S", 1.0),
        num_or(env, "reward_sigma", 1.0), op);
  if (kind == "recurrent_var")
    return std::make_unique<RecurrentVarEnv>(
        static_cast<int>(int_or(env, "K", 30)), num_or(env, "sigma", 1.0),
        num_or(env, "alpha_prior", 1.0), num_or(env, "mu_prior", 0.0), op);
  if (kind == "periodic")
    return std::make_unique<PeriodicEnv>(
        static_cast<int>(int_or(env, "K", 200)),
        static_cast<int>(int_or(env, "cycle_len", 100)),
        static_cast<int>(int_or(env, "n_periods", 4)),
        static_cast<int>(int_or(env, "period_len", 25)), num_or(env, "reward_sigma", 1.0),
        op);
  if (kind == "periodic_random")
    return std::make_unique<PeriodicRandomEnv>(static_cast<int>(int_or(env, "K", 200)),
                                               num_or(env, "reward_sigma", 1.0), op);
  if (kind == "trace_replay") {
    RewardWeights w;
    if (env.contains("alpha")) {
      const auto a = env["alpha"].get<std::vector<double>>();
      if (a.size() != 5) throw ConfigError("[env]: alpha must have 5 entries");
      std::copy(a.begin(), a.end(), w.alpha.begin());
    }
    if (!env.contains("path")) throw ConfigError("[env]: trace_replay needs `path`");
    return std::make_unique<TraceReplayEnv>(
        env["path"].get<std::string>(), w, static_cast<int>(int_or(env, "K", 0)),
        static_cast<int>(int_or(env, "T", 0)), bool_or(env, "dynamic_arms", false),
        static_cast<int>(int_or(env, "max_new", 1000)), op);
  }
  throw ConfigError("[env]: unknown kind `" + kind + "`");
}

std::string policy_label(const json& policy) {
  if (policy.contains("label")) return policy["label"].get<std::string>();
  return policy["name"].get<std::string>();
}

std::unique_ptr<Policy> make_policy(const json& pol, Environment* env,
                                    const ExperimentSpec& exp) {
  const std::string name = pol["name"].get<std::string>();
  if (name == "oracle") return std::make_unique<OraclePolicy>(env);
  if (name == "revealed_reward_ts")
    return std::make_unique<RevealedRewardTsPolicy>(num_or(pol, "sigma", 1.0));
  if (name == "linucb" || name == "oful" || name == "contextual_ts") {
    LinearPolicyConfig cfg;
    cfg.kind = name == "linucb" ? LinearPolicyKind::LinUCB
               : name == "oful" ? LinearPolicyKind::OFUL
                                : LinearPolicyKind::ContextualTS;
    cfg.lambda = num_or(pol, "lambda", 1.0);
    cfg.alpha = num_or(pol, "alpha", 1.0 + std::sqrt(std::log(2.0 / 0.05) / 2.0));
    cfg.delta = num_or(pol, "delta", 0.05);
    cfg.R = num_or(pol, "R", 1.0);
    cfg.S_bound = num_or(pol, "S_bound", 1.0);
    cfg.sigma = num_or(pol, "sigma", 1.0);
    return std::make_unique<LinearContextualPolicy>(cfg);
  }
  if (name == "samplin_ucb") {
    SampLinUcbConfig cfg;
    cfg.lambda = num_or(pol, "lambda", 0.0);
    cfg.R = num_or(pol, "R", 1.0);
    cfg.S_bound = num_or(pol, "S_bound", 1.0);
    cfg.L_norm = num_or(pol, "L_norm", 1.0);
    cfg.delta = num_or(pol, "delta", 0.05);
    return std::make_unique<SampLinUcbPolicy>(cfg);
  }
  if (name == "hidden_linucb_mean" || name == "hidden_linucb_sample" ||
      name == "hidden_linucb_vi") {
    HiddenLinUcbConfig cfg;
    cfg.delta = num_or(pol, "delta", 0.05);
    cfg.delta1 = num_or(pol, "delta1", 0.025);
    cfg.delta2 = num_or(pol, "delta2", 0.025);
    cfg.S_bound = num_or(pol, "S_bound", 1.0);
    cfg.L_samples = static_cast<int>(int_or(pol, "L_samples", 50));
    cfg.M = static_cast<int>(int_or(pol, "M", 8));
    cfg.steps_per_period = static_cast<int>(int_or(pol, "steps_per_period", 10));
    cfg.sigma0 = num_or(pol, "sigma0", 1.0);
    cfg.sigma_ctx = num_or(pol, "sigma_ctx", 1.0);
    cfg.a0 = num_or(pol, "a0", 1.0);
    cfg.b0 = num_or(pol, "b0", 1.0);
    cfg.window = static_cast<int>(int_or(pol, "window", 100));
    cfg.nbIt = static_cast<int>(int_or(pol, "nbIt", 10));
    cfg.randomized_init = bool_or(pol, "randomized_init", false);
    if (name == "hidden_linucb_mean") return std::make_unique<HiddenLinUcbMeanPolicy>(cfg);
    if (name == "hidden_linucb_sample")
      return std::make_unique<HiddenLinUcbSamplePolicy>(cfg);
    return std::make_unique<HiddenLinUcbViPolicy>(cfg);
  }
  if (name == "rrts") {
    RrtsConfig cfg;
    cfg.sigma = num_or(pol, "sigma", 1.0);
    cfg.alpha_prior = num_or(pol, "alpha_prior", 1.0);
    cfg.mu_prior = num_or(pol, "mu_prior", 0.0);
    cfg.window = static_cast<int>(int_or(pol, "window", 200));
    cfg.nbIt = static_cast<int>(int_or(pol, "nbIt", 10));
    cfg.randomized_init = bool_or(pol, "randomized_init", false);
    return std::make_unique<RecurrentRelationalTsPolicy>(cfg);
  }
  if (name == "rsts") {
    RstsConfig cfg;
    cfg.d = static_cast<int>(int_or(pol, "d", 4));
    cfg.sigma = num_or(pol, "sigma", 1.0);
    cfg.delta_lds = num_or(pol, "delta_lds", 1.0);
    cfg.alpha_prior = num_or(pol, "alpha_prior", 1.0);
    cfg.gamma_prior = num_or(pol, "gamma_prior", 1.0);
    cfg.window = static_cast<int>(int_or(pol, "window", 100));
    cfg.nbIt = static_cast<int>(int_or(pol, "nbIt", 10));
    cfg.mem_theta = bool_or(pol, "mem_theta", true);
    cfg.mem_wb = bool_or(pol, "mem_wb", true);
    return std::make_unique<RecurrentStateTsPolicy>(cfg);
  }
  // stationary family
  StochasticPolicyConfig cfg;
  cfg.kind = stochastic_kind_from_string(name);
  cfg.b = num_or(pol, "b", 1.0);
  cfg.a = num_or(pol, "a", 1.0);
  cfg.c = num_or(pol, "c", 1.0);
  cfg.delta = num_or(pol, "delta", 0.05);
  cfg.T = int_or(pol, "T", exp.T);
  cfg.K = static_cast<int>(int_or(pol, "K", env != nullptr ? env->num_arms() : 0));
  cfg.eps_c = num_or(pol, "eps_c", 1.0);
  cfg.eps_d = num_or(pol, "eps_d", 0.1);
  cfg.gamma = num_or(pol, "gamma", 1.0);
  cfg.tau = static_cast<int>(int_or(pol, "tau", 1));
  cfg.xi = num_or(pol, "xi", 0.6);
  cfg.ts_a = num_or(pol, "ts_a", 0.0);
  cfg.ts_b = num_or(pol, "ts_b", 1.0);
  cfg.ts_sigma = num_or(pol, "ts_sigma", 1.0);
  return std::make_unique<StochasticPolicy>(cfg);
}

std::vector<std::pair<std::string, json>> expand_sweep(const json& cfg) {
  std::vector<std::pair<std::string, json>> cells;
  if (!cfg.contains("sweep") || cfg["sweep"].empty()) {
    cells.emplace_back("", cfg);
    return cells;
  }
  std::vector<std::pair<std::string, json>> grid;
  for (auto it = cfg["sweep"].begin(); it != cfg["sweep"].end(); ++it)
    grid.emplace_back(it.key(), it.value());
  std::vector<size_t> idx(grid.size(), 0);
  for (;;) {
    json cell = cfg;
    cell.erase("sweep");
    std::string label;
    for (size_t g = 0; g < grid.size(); ++g) {
      const json& val = grid[g].second[idx[g]];
      apply_override(cell, grid[g].first,
                     val.is_string() ? val.get<std::string>() : val.dump());
      if (!label.empty()) label += "_";
      label += grid[g].first + "=" + (val.is_string() ? val.get<std::string>() : val.dump());
    }
    cells.emplace_back(label, cell);
    size_t g = 0;
    for (; g < grid.size(); ++g) {
      if (++idx[g] < grid[g].second.size()) break;
      idx[g] = 0;
    }
    if (g == grid.size()) break;
  }
  return cells;
}

double discounted_ucb_gamma_helper(long long T, long long change_points) {
  return 1.0 - std::sqrt(static_cast<double>(change_points) / static_cast<double>(T)) / 4.0;
}

int sliding_window_tau_helper(long long T, long long change_points) {
  return static_cast<int>(2.0 * std::sqrt(static_cast<double>(T) *
                                          std::log(static_cast<double>(T)) /
                                          static_cast<double>(change_points)));
}

}  // namespace banditstream
