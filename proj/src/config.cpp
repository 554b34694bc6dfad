#include "hypertopic/config.hpp"

#include "hypertopic/error.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>

namespace hypertopic {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
  throw Error(ErrorKind::ParseError, "invalid value '" + value + "' for " + key);
}

}  // namespace

ConfigMap ConfigMap::parse(std::istream& in, const std::string& source) {
  ConfigMap map;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::ParseError, source + ":" + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(s.substr(0, eq));
    if (key.empty()) throw Error(ErrorKind::ParseError, source + ":" + std::to_string(lineno) + ": empty key");
    map.values_[key] = trim(s.substr(eq + 1));
  }
  return map;
}

ConfigMap ConfigMap::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open " + path.string());
  return parse(in, path.string());
}

std::string ConfigMap::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double ConfigMap::get_double(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  char* end = nullptr;
  const double v = std::strtod(it->second.c_str(), &end);
  if (it->second.empty() || end != it->second.c_str() + it->second.size()) bad_value(key, it->second);
  return v;
}

long long ConfigMap::get_int(const std::string& key, long long fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  long long v = 0;
  const auto& s = it->second;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) bad_value(key, s);
  return v;
}

std::uint64_t ConfigMap::get_uint64(const std::string& key, std::uint64_t fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::uint64_t v = 0;
  const auto& s = it->second;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) bad_value(key, s);
  return v;
}

bool ConfigMap::get_bool(const std::string& key, bool fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const auto& s = it->second;
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  bad_value(key, s);
}

void ConfigMap::check_keys(const std::set<std::string>& known) const {
  for (const auto& [k, v] : values_)
    if (!known.contains(k)) throw Error(ErrorKind::ConfigInvalid, "unknown configuration key '" + k + "'");
}

std::string ConfigMap::canonical() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + "=" + v + "\n";
  return out;
}

std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

const std::set<std::string>& solver_keys() {
  static const std::set<std::string> keys{
      "K",        "tau_p",     "tau_a",         "scale_penalty",     "eta0",      "max_iters",
      "tolerance", "step_mode", "init_mode",    "seed",              "backtracking", "max_halvings",
      "penalty_gradient", "kappa_refresh", "check_feasibility", "threads", "lp", "up", "la", "ua"};
  return keys;
}

const std::set<std::string>& synth_keys() {
  static const std::set<std::string> keys{
      "K",  "T",  "n_t", "p",  "regime", "sigma", "design", "rho", "replicates", "seed",
      "lp", "up", "la",  "ua", "doc_concentration", "word_concentration", "rho_min", "rho_max",
      "allow_rho_outside_guards", "heterogeneous_rho"};
  return keys;
}

const std::set<std::string>& rank_keys() {
  static const std::set<std::string> keys{"delta", "alpha", "lp", "up", "k_cap", "seed"};
  return keys;
}

namespace {

FeasibleBounds bounds_from(const ConfigMap& m) {
  FeasibleBounds b;
  b.lp = m.get_double("lp", b.lp);
  b.up = m.get_double("up", b.up);
  b.la = m.get_double("la", b.la);
  b.ua = m.get_double("ua", b.ua);
  return b;
}

}  // namespace

SolverConfig solver_config_from(const ConfigMap& m) {
  SolverConfig c;
  c.K = m.get_int("K", c.K);
  c.tau_p = m.get_double("tau_p", c.tau_p);
  c.tau_a = m.get_double("tau_a", c.tau_a);
  c.scale_penalty = m.get_bool("scale_penalty", c.scale_penalty);
  c.eta0 = m.get_double("eta0", c.eta0);
  c.max_iters = static_cast<int>(m.get_int("max_iters", c.max_iters));
  if (m.contains("tolerance")) c.tolerance = m.get_double("tolerance", 0.0);
  const std::string step = m.get_string("step_mode", "kappa");
  if (step == "kappa") c.step_mode = StepMode::KappaScaled;
  else if (step == "fixed") c.step_mode = StepMode::Fixed;
  else bad_value("step_mode", step);
  const std::string init = m.get_string("init_mode", "spectral");
  if (init == "spectral") c.init_mode = InitMode::Spectral;
  else if (init == "random") c.init_mode = InitMode::Random;
  else bad_value("init_mode", init);
  c.seed = m.get_uint64("seed", c.seed);
  c.backtracking = m.get_bool("backtracking", c.backtracking);
  c.max_halvings = static_cast<int>(m.get_int("max_halvings", c.max_halvings));
  const std::string pg = m.get_string("penalty_gradient", "as_printed");
  if (pg == "as_printed") c.penalty_gradient = PenaltyGradient::AsPrinted;
  else if (pg == "exact") c.penalty_gradient = PenaltyGradient::Exact;
  else bad_value("penalty_gradient", pg);
  c.kappa_refresh = static_cast<int>(m.get_int("kappa_refresh", c.kappa_refresh));
  c.check_feasibility = m.get_bool("check_feasibility", c.check_feasibility);
  c.threads = static_cast<int>(m.get_int("threads", c.threads));
  c.bounds = bounds_from(m);
  return c;
}

SynthConfig synth_config_from(const ConfigMap& m) {
  SynthConfig c;
  c.K = m.get_int("K", c.K);
  c.T = m.get_int("T", c.T);
  c.n_t = m.get_int("n_t", c.n_t);
  c.p = m.get_int("p", c.p);
  try {
    c.regime = parse_regime(m.get_string("regime", to_string(c.regime)));
    c.design = parse_design(m.get_string("design", to_string(c.design)));
  } catch (const Error& e) {
    throw Error(ErrorKind::ParseError, e.what());
  }
  c.sigma = m.get_double("sigma", c.sigma);
  c.rho = m.get_double("rho", c.rho);
  c.replicates = static_cast<int>(m.get_int("replicates", c.replicates));
  c.seed = m.get_uint64("seed", c.seed);
  c.bounds = bounds_from(m);
  c.doc_concentration = m.get_double("doc_concentration", c.doc_concentration);
  c.word_concentration = m.get_double("word_concentration", c.word_concentration);
  c.rho_min = m.get_double("rho_min", c.rho_min);
  c.rho_max = m.get_double("rho_max", c.rho_max);
  c.allow_rho_outside_guards = m.get_bool("allow_rho_outside_guards", c.allow_rho_outside_guards);
  c.heterogeneous_rho = m.get_bool("heterogeneous_rho", c.heterogeneous_rho);
  return c;
}

RankSelectConfig rank_config_from(const ConfigMap& m) {
  RankSelectConfig c;
  c.delta = m.get_double("delta", c.delta);
  c.alpha = m.get_double("alpha", c.alpha);
  c.lp = m.get_double("lp", c.lp);
  c.up = m.get_double("up", c.up);
  c.k_cap = m.get_int("k_cap", c.k_cap);
  c.seed = m.get_uint64("seed", c.seed);
  return c;
}

}  // namespace hypertopic
