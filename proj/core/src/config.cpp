#include "streamopt/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "streamopt/errors.hpp"

namespace streamopt {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Raw key/value view with consumption tracking so unconsumed keys can be
// reported as unknown.
class KvView {
 public:
  explicit KvView(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
      if (!kv_.emplace(key, value).second)
        throw ConfigError("config: duplicate key '" + key + "'");
    }
  }

  bool has(const std::string& key) const { return kv_.count(key) != 0; }

  std::string take(const std::string& key, const std::string& fallback) {
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    consumed_.insert(consumed_.end(), key);
    return it->second;
  }

  void finish() const {
    for (const auto& [key, value] : kv_) {
      if (std::find(consumed_.begin(), consumed_.end(), key) == consumed_.end())
        throw ConfigError("config: unknown key '" + key + "'");
    }
  }

 private:
  std::map<std::string, std::string> kv_;
  std::vector<std::string> consumed_;
};

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' expects a number, got '" + v + "'");
  }
}

long to_long(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long x = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' expects an integer, got '" + v + "'");
  }
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const unsigned long long x = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return static_cast<std::uint64_t>(x);
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' expects an unsigned integer, got '" + v + "'");
  }
}

bool to_flag(const std::string& key, const std::string& v) {
  if (v == "on" || v == "true" || v == "1") return true;
  if (v == "off" || v == "false" || v == "0") return false;
  throw ConfigError("config: key '" + key + "' expects on/off, got '" + v + "'");
}

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  KvView kv(text);
  ExperimentConfig cfg;

  if (!kv.has("problem")) throw ConfigError("config: missing required key 'problem'");
  if (!kv.has("method")) throw ConfigError("config: missing required key 'method'");
  if (!kv.has("d")) throw ConfigError("config: missing required key 'd'");
  if (!kv.has("N") && !kv.has("samples"))
    throw ConfigError("config: missing required key 'N' (alias 'samples')");

  cfg.id = kv.take("id", "");
  cfg.problem = problem_from_name(kv.take("problem", "ls"));
  cfg.method = method_from_name(kv.take("method", "sgd"));
  cfg.dim = static_cast<int>(to_long("d", kv.take("d", "0")));
  {
    const std::string n1 = kv.take("N", "");
    const std::string n2 = kv.take("samples", "");
    if (!n1.empty() && !n2.empty()) throw ConfigError("config: give only one of 'N'/'samples'");
    cfg.samples = to_long("N", n1.empty() ? n2 : n1);
  }
  cfg.runs = static_cast<int>(to_long("runs", kv.take("runs", "1")));
  cfg.seed = to_u64("seed", kv.take("seed", "0"));
  cfg.checkpoints = static_cast<int>(to_long("checkpoints", kv.take("checkpoints", "50")));
  cfg.noise_sd = to_double("noise_sd", kv.take("noise_sd", "1"));
  cfg.r = to_double("r", kv.take("r", "1"));
  cfg.timing = to_flag("timing", kv.take("timing", "off"));
  cfg.out = kv.take("out", "out.csv");

  cfg.averaged = to_flag("averaging",
                         kv.take("averaging", cfg.method == Method::kWassn ? "on" : "off"));

  const std::string bmode = kv.take("batch.mode", "constant");
  if (bmode == "constant") {
    for (const char* k : {"batch.c_rho", "batch.rho"}) {
      if (kv.has(k))
        throw ConfigError(std::string("config: key '") + k + "' requires batch.mode = increasing");
    }
    cfg.batch = BatchSchedule::constant(to_long("batch.n", kv.take("batch.n", std::to_string(cfg.dim))));
  } else if (bmode == "increasing") {
    if (kv.has("batch.n"))
      throw ConfigError("config: key 'batch.n' requires batch.mode = constant");
    cfg.batch = BatchSchedule::increasing(to_long("batch.c_rho", kv.take("batch.c_rho", "1")),
                                          to_double("batch.rho", kv.take("batch.rho", "0.5")));
  } else {
    throw ConfigError("config: batch.mode expects constant/increasing, got '" + bmode + "'");
  }

  const bool proportion_step =
      cfg.method == Method::kSsn || cfg.method == Method::kNewtonDirect;
  if (proportion_step) {
    cfg.step = StepSchedule::sample_proportion();
    // power-law keys are meaningless here; reject to avoid silent surprises
    for (const char* k : {"step.c_gamma", "step.gamma", "step.beta", "step.t0"}) {
      if (kv.has(k))
        throw ConfigError(std::string("config: key '") + k +
                          "' does not apply to the sample-proportion step of this method");
    }
  } else {
    cfg.step = StepSchedule::power_law(to_double("step.c_gamma", kv.take("step.c_gamma", "1")),
                                       to_double("step.gamma", kv.take("step.gamma", "0.75")),
                                       to_double("step.beta", kv.take("step.beta", "0")),
                                       to_double("step.t0", kv.take("step.t0", "0")));
  }

  cfg.w = to_double("weights.w", kv.take("weights.w", "2"));
  cfg.w_prime = to_double("weights.w_prime", kv.take("weights.w_prime", "2"));
  cfg.p = to_double("p", kv.take("p", "1"));
  cfg.c_iota = to_double("c_iota", kv.take("c_iota", "1"));
  {
    const std::string def = cfg.method == Method::kWassn ? "0.1" : "0.25";
    cfg.iota = to_double("iota", kv.take("iota", def));
  }
  cfg.regularize = to_flag("regularize", kv.take("regularize", "on"));

  cfg.adagrad_g0 = to_double("adagrad.g0", kv.take("adagrad.g0", "1"));
  cfg.clamp.c_hi = to_double("adagrad.c_hi", kv.take("adagrad.c_hi", "1"));
  cfg.clamp.e_hi = to_double("adagrad.e_hi", kv.take("adagrad.e_hi", "0.2"));
  cfg.clamp.c_lo = to_double("adagrad.c_lo", kv.take("adagrad.c_lo", "1"));
  cfg.clamp.e_lo = to_double("adagrad.e_lo", kv.take("adagrad.e_lo", "-0.2"));

  kv.finish();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

void validate_experiment(const ExperimentConfig& cfg) {
  if (cfg.dim < 1) throw ConfigError("config: d must be >= 1");
  if (cfg.samples < 1) throw ConfigError("config: N must be >= 1");
  if (cfg.runs < 1) throw ConfigError("config: runs must be >= 1");
  if (cfg.checkpoints < 1) throw ConfigError("config: checkpoints must be >= 1");
  if (!(cfg.noise_sd >= 0.0)) throw ConfigError("config: noise_sd must be >= 0");
  if (!(cfg.r >= 0.0)) throw ConfigError("config: r must be >= 0");
  if (cfg.out.empty()) throw ConfigError("config: out must be nonempty");
  // Constructing a throwaway optimizer exercises every schedule, curvature
  // and clamp constraint through the same code path the runs will use.
  Optimizer probe(optimizer_config(cfg), Vector(cfg.dim, 0.0));
  (void)probe;
}

OptimizerConfig optimizer_config(const ExperimentConfig& cfg) {
  OptimizerConfig oc;
  oc.method = cfg.method;
  oc.problem = cfg.problem;
  oc.dim = cfg.dim;
  oc.step = cfg.step;
  oc.batch = cfg.batch;
  oc.averaged = cfg.averaged;
  oc.w = cfg.w;
  oc.curvature.p = cfg.p;
  oc.curvature.c_iota = cfg.c_iota;
  oc.curvature.iota = cfg.iota;
  oc.curvature.w_prime = cfg.w_prime;
  oc.curvature.regularize = cfg.regularize;
  oc.clamp = cfg.clamp;
  oc.adagrad_g0 = cfg.adagrad_g0;
  return oc;
}

std::string series_name(const ExperimentConfig& cfg) {
  return method_series_name(cfg.method, cfg.averaged);
}

std::string resolved_config_text(const ExperimentConfig& cfg) {
  std::map<std::string, std::string> kv;
  kv["id"] = cfg.id;
  kv["problem"] = problem_name(cfg.problem);
  kv["method"] = method_base_name(cfg.method);
  kv["averaging"] = cfg.averaged ? "on" : "off";
  kv["d"] = std::to_string(cfg.dim);
  kv["N"] = std::to_string(cfg.samples);
  kv["runs"] = std::to_string(cfg.runs);
  kv["seed"] = std::to_string(cfg.seed);
  kv["checkpoints"] = std::to_string(cfg.checkpoints);
  kv["noise_sd"] = fmt_double(cfg.noise_sd);
  kv["r"] = fmt_double(cfg.r);
  kv["timing"] = cfg.timing ? "on" : "off";
  kv["out"] = cfg.out;
  kv["batch.mode"] = cfg.batch.mode == BatchMode::kConstant ? "constant" : "increasing";
  if (cfg.batch.mode == BatchMode::kConstant) {
    kv["batch.n"] = std::to_string(cfg.batch.n);
  } else {
    kv["batch.c_rho"] = std::to_string(cfg.batch.c_rho);
    kv["batch.rho"] = fmt_double(cfg.batch.rho);
  }
  if (cfg.step.mode == StepMode::kPowerLaw) {
    kv["step.c_gamma"] = fmt_double(cfg.step.c_gamma);
    kv["step.gamma"] = fmt_double(cfg.step.gamma);
    kv["step.beta"] = fmt_double(cfg.step.beta);
    kv["step.t0"] = fmt_double(cfg.step.t0);
  }
  kv["weights.w"] = fmt_double(cfg.w);
  kv["weights.w_prime"] = fmt_double(cfg.w_prime);
  kv["p"] = fmt_double(cfg.p);
  kv["c_iota"] = fmt_double(cfg.c_iota);
  kv["iota"] = fmt_double(cfg.iota);
  kv["regularize"] = cfg.regularize ? "on" : "off";
  if (cfg.method == Method::kAdagrad) {
    kv["adagrad.g0"] = fmt_double(cfg.adagrad_g0);
    kv["adagrad.c_hi"] = fmt_double(cfg.clamp.c_hi);
    kv["adagrad.e_hi"] = fmt_double(cfg.clamp.e_hi);
    kv["adagrad.c_lo"] = fmt_double(cfg.clamp.c_lo);
    kv["adagrad.e_lo"] = fmt_double(cfg.clamp.e_lo);
  }
  std::ostringstream out;
  for (const auto& [k, v] : kv) out << k << " = " << v << "\n";
  return out.str();
}

}  // namespace streamopt
