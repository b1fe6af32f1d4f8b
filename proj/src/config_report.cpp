#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "wnlab/cli_reports.hpp"
#include "wnlab/commutant_lab.hpp"

namespace wnlab {

namespace {

const char* kVersion = "wnlab-1";

struct KeySpec {
  const char* section;
  const char* key;
  const char* def;  // "" means derived at lookup time
};

// Every setting that affects results, in canonical order.
const std::vector<KeySpec> kKeys = {
    {"general", "algebra", "su2"},
    {"one-particle", "i_geo", "4"},
    {"one-particle", "n_grid", ""},
    {"fock", "coherent_n_max", "12"},
    {"fock", "operator_n_max", "6"},
    {"kernels", "i_geo", "1"},
    {"kernels", "n_grid", ""},
    {"kernels", "n_max", "5"},
    {"energy-rep", "i_geo", "2"},
    {"energy-rep", "n_grid", ""},
    {"energy-rep", "n_max", "4"},
    {"energy-rep", "coherent_i_geo", "4"},
    {"commutant", "i_geo", "2"},
    {"commutant", "n_grid", ""},
    {"commutant", "n_max", "4"},
    {"commutant", "l_max", "2"},
    {"commutant", "directions", "default"},
    {"commutant", "max_k", "2"},
    {"commutant", "threshold", "1e-8"},
};

const std::set<std::string> kGeneralOnly = {"seed", "cache_dir", "report_dir", "report_format"};

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

bool known_key(const std::string& section, const std::string& key) {
  if (section == "tolerances") return true;
  if (section == "general" && kGeneralOnly.count(key)) return true;
  for (const auto& k : kKeys) {
    if (k.key != key) continue;
    if (section == k.section || section == "general") return true;
  }
  return false;
}

std::string fmt_double(double x) {
  std::ostringstream os;
  os << std::setprecision(6) << std::scientific << x;
  return os.str();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string round_trip(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Timings would break byte-identical reports.
bool is_timing(const CheckRow& c) { return c.tag == "desk-scale budget"; }

}  // namespace

RunConfig RunConfig::defaults() { return RunConfig{}; }

RunConfig RunConfig::parse(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line, section = "general";
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    line = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": bad section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": empty key or value");
    if (!known_key(section, key))
      throw ConfigError("line " + std::to_string(lineno) + ": unknown key " + section + "." + key);
    cfg.values[section][key] = value;
  }
  if (cfg.values.count("general") && cfg.values["general"].count("seed")) {
    const std::string s = cfg.values["general"]["seed"];
    try {
      std::size_t used = 0;
      cfg.seed = std::stoull(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
    } catch (const std::exception&) {
      throw ConfigError("general.seed: not an unsigned integer: " + s);
    }
  }
  return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string RunConfig::get(const std::string& section, const std::string& key,
                           const std::string& def) const {
  for (const std::string& s : {section, std::string("general")}) {
    auto it = values.find(s);
    if (it == values.end()) continue;
    auto jt = it->second.find(key);
    if (jt != it->second.end()) return jt->second;
  }
  if (key == "n_grid") return std::to_string(4 * get_int(section, "i_geo", 0) + 1);
  for (const auto& k : kKeys)
    if (k.section == section && k.key == key) return k.def;
  return def;
}

int RunConfig::get_int(const std::string& section, const std::string& key, int def) const {
  const std::string s = get(section, key, std::to_string(def));
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(section + "." + key + ": not an integer: " + s);
  }
}

double RunConfig::get_double(const std::string& section, const std::string& key, double def) const {
  const std::string s = get(section, key, round_trip(def));
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(section + "." + key + ": not a number: " + s);
  }
}

double RunConfig::tol(const std::string& name, double def) const {
  auto it = values.find("tolerances");
  if (it == values.end() || !it->second.count(name)) return def;
  return get_double("tolerances", name, def);
}

void RunConfig::validate() const {
  const std::string alg = get("general", "algebra", "su2");
  if (alg != "su2" && alg != "su3") throw ConfigError("general.algebra must be su2 or su3");
  for (const std::string s : {"one-particle", "kernels", "energy-rep", "commutant"}) {
    const int i = get_int(s, "i_geo", 0);
    if (i < 1) throw ConfigError(s + ".i_geo must be >= 1");
    if (get_int(s, "n_grid", 0) < 4 * i + 1) throw ConfigError(s + ".n_grid must be >= 4 i_geo + 1");
  }
  for (const std::string s : {"kernels", "energy-rep", "commutant"})
    if (get_int(s, "n_max", 0) < 2) throw ConfigError(s + ".n_max must be >= 2");
  for (const std::string k : {"coherent_n_max", "operator_n_max"})
    if (get_int("fock", k, 0) < 2) throw ConfigError("fock." + k + " must be >= 2");
  if (get_int("energy-rep", "coherent_i_geo", 0) < 4)
    throw ConfigError("energy-rep.coherent_i_geo must be >= 4");
  if (get_int("commutant", "l_max", 0) < 0) throw ConfigError("commutant.l_max must be >= 0");
  if (get_int("commutant", "max_k", 0) < 0) throw ConfigError("commutant.max_k must be >= 0");
  const std::string dirs = get("commutant", "directions", "default");
  if (dirs != "default" && dirs != "constants")
    throw ConfigError("commutant.directions must be default or constants");
  if (get_double("commutant", "threshold", 1e-8) <= 0) throw ConfigError("commutant.threshold must be > 0");
  const std::string fmt = report_format();
  if (fmt != "json" && fmt != "csv" && fmt != "both")
    throw ConfigError("general.report_format must be json, csv or both");
  auto it = values.find("tolerances");
  if (it != values.end())
    for (const auto& [k, v] : it->second)
      if (!(get_double("tolerances", k, 0) > 0)) throw ConfigError("tolerances." + k + " must be > 0");
}

std::string RunConfig::canonical() const {
  std::ostringstream os;
  os << "version=" << kVersion << "\n";
  os << "seed=" << seed << "\n";
  os << "negative_control=" << (negative_control ? 1 : 0) << "\n";
  for (const auto& k : kKeys) os << k.section << "." << k.key << "=" << get(k.section, k.key, k.def) << "\n";
  auto it = values.find("tolerances");
  if (it != values.end())
    for (const auto& [k, v] : it->second) os << "tolerances." << k << "=" << v << "\n";
  return os.str();
}

std::uint64_t RunConfig::hash() const { return fnv1a(canonical()); }

std::string RunConfig::cache_dir() const {
  if (const char* env = std::getenv("WNLAB_CACHE_DIR"); env && *env) return env;
  return get("general", "cache_dir", ".wnlab-cache");
}

std::string RunConfig::report_dir() const { return get("general", "report_dir", "wnlab-reports"); }

std::string RunConfig::report_format() const { return get("general", "report_format", "both"); }

std::string hex64(std::uint64_t h) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

bool SuiteResult::pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const CheckRow& r) { return r.pass; });
}

void SuiteResult::at_most(const std::string& name, const std::string& tag, double value, double bound) {
  rows.push_back({name, tag, value, bound, "<=", 0, value <= bound});
}

void SuiteResult::at_least(const std::string& name, const std::string& tag, double value, double bound) {
  rows.push_back({name, tag, value, bound, ">=", 0, value >= bound});
}

void SuiteResult::equals(const std::string& name, const std::string& tag, double value, double expected) {
  rows.push_back({name, tag, value, expected, "==", 0, value == expected});
}

void SuiteResult::within(const std::string& name, const std::string& tag, double value, double center,
                         double halfwidth) {
  rows.push_back({name, tag, value, center, "in", halfwidth, std::abs(value - center) <= halfwidth});
}

const std::vector<std::string> kSuiteNames = {"algebra", "one-particle", "fock",
                                              "kernels", "energy-rep",   "commutant"};

SuiteResult run_suite(const std::string& name, const RunConfig& cfg) {
  if (name == "algebra") return run_algebra_suite(cfg);
  if (name == "one-particle") return run_one_particle_suite(cfg);
  if (name == "fock") return run_fock_suite(cfg);
  if (name == "kernels") return run_kernels_suite(cfg);
  if (name == "energy-rep") return run_energy_rep_suite(cfg);
  if (name == "commutant") return run_commutant_suite(cfg);
  throw std::invalid_argument("unknown suite " + name);
}

std::string run_id(const RunConfig& cfg, const std::string& suite) {
  return suite + "-" + hex64(cfg.hash());
}

nlohmann::ordered_json report_json(const RunConfig& cfg, const std::string& suite,
                                   const std::vector<SuiteResult>& results) {
  nlohmann::ordered_json j;
  j["tool"] = "wnlab";
  j["version"] = kVersion;
  j["run_id"] = run_id(cfg, suite);
  j["config_hash"] = hex64(cfg.hash());
  j["seed"] = cfg.seed;
  j["negative_control"] = cfg.negative_control;
  j["suite"] = suite;
  nlohmann::ordered_json settings = nlohmann::ordered_json::object();
  std::istringstream in(cfg.canonical());
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    settings[line.substr(0, eq)] = line.substr(eq + 1);
  }
  j["settings"] = settings;
  bool all = true;
  nlohmann::ordered_json suites = nlohmann::ordered_json::array();
  for (const auto& r : results) {
    nlohmann::ordered_json s;
    s["suite"] = r.suite;
    s["pass"] = r.pass();
    nlohmann::ordered_json checks = nlohmann::ordered_json::array();
    for (const auto& c : r.rows) {
      nlohmann::ordered_json row;
      row["check"] = c.name;
      row["tag"] = c.tag;
      if (is_timing(c))
        row["value"] = "not recorded";
      else
        row["value"] = std::isfinite(c.value) ? nlohmann::ordered_json(c.value) : nlohmann::ordered_json(round_trip(c.value));
      row["relation"] = c.relation;
      row["bound"] = c.bound;
      if (c.relation == "in") row["halfwidth"] = c.bound2;
      row["pass"] = c.pass;
      checks.push_back(row);
    }
    s["checks"] = checks;
    s["data"] = r.data;
    suites.push_back(s);
    all = all && r.pass();
  }
  j["pass"] = all;
  j["suites"] = suites;
  return j;
}

std::string report_csv(const std::vector<SuiteResult>& results) {
  std::ostringstream os;
  os << "suite,check,tag,value,relation,bound,halfwidth,pass\n";
  for (const auto& r : results)
    for (const auto& c : r.rows)
      os << csv_field(r.suite) << "," << csv_field(c.name) << "," << csv_field(c.tag) << ","
         << (is_timing(c) ? "not recorded" : round_trip(c.value)) << "," << c.relation << "," << round_trip(c.bound) << ","
         << (c.relation == "in" ? round_trip(c.bound2) : "") << "," << (c.pass ? "PASS" : "FAIL") << "\n";
  return os.str();
}

std::string write_reports(const RunConfig& cfg, const std::string& suite,
                          const std::vector<SuiteResult>& results) {
  const std::string id = run_id(cfg, suite);
  const std::filesystem::path dir = cfg.report_dir();
  std::filesystem::create_directories(dir);
  const std::string fmt = cfg.report_format();
  if (fmt == "json" || fmt == "both") {
    std::ofstream out(dir / (id + ".json"), std::ios::binary);
    out << report_json(cfg, suite, results).dump(2) << "\n";
  }
  if (fmt == "csv" || fmt == "both") {
    std::ofstream out(dir / (id + ".csv"), std::ios::binary);
    out << report_csv(results);
  }
  return id;
}

std::string render_report(const std::string& report_dir, const std::string& id) {
  const std::filesystem::path path = std::filesystem::path(report_dir) / (id + ".json");
  std::ifstream in(path);
  if (!in) throw std::runtime_error("no report for run " + id + " in " + report_dir);
  const auto j = nlohmann::json::parse(in);
  std::ostringstream os;
  os << "run " << j.at("run_id").get<std::string>() << "  suite " << j.at("suite").get<std::string>()
     << "  config " << j.at("config_hash").get<std::string>() << "  seed " << j.at("seed").get<std::uint64_t>()
     << (j.at("negative_control").get<bool>() ? "  (negative control)" : "") << "\n";
  int fails = 0;
  for (const auto& s : j.at("suites")) {
    os << "\n[" << s.at("suite").get<std::string>() << "]\n";
    os << std::left << std::setw(6) << "" << std::setw(52) << "check" << std::setw(28) << "tag"
       << std::setw(14) << "value" << "bound\n";
    for (const auto& c : s.at("checks")) {
      const bool pass = c.at("pass").get<bool>();
      fails += !pass;
      std::string value = c.at("value").is_number() ? fmt_double(c.at("value").get<double>())
                                                    : c.at("value").get<std::string>();
      std::string bound = c.at("relation").get<std::string>() + " " + fmt_double(c.at("bound").get<double>());
      if (c.contains("halfwidth")) bound += " +- " + fmt_double(c.at("halfwidth").get<double>());
      os << std::left << std::setw(6) << (pass ? "PASS" : "FAIL") << std::setw(52)
         << c.at("check").get<std::string>() << std::setw(28) << c.at("tag").get<std::string>()
         << std::setw(14) << value << bound << "\n";
    }
  }
  os << "\n" << fails << " FAIL row(s)\n";
  return os.str();
}

std::string summary_lines(const SuiteResult& r) {
  std::ostringstream os;
  for (const auto& c : r.rows) {
    os << (c.pass ? "PASS " : "FAIL ") << r.suite << ": " << c.name << " = " << fmt_double(c.value) << " ("
       << c.relation << " " << fmt_double(c.bound);
    if (c.relation == "in") os << " +- " << fmt_double(c.bound2);
    os << ")\n";
  }
  std::ostringstream t;
  t << std::fixed << std::setprecision(2) << r.seconds;
  os << (r.pass() ? "PASS " : "FAIL ") << r.suite << " suite (" << t.str() << " s)\n";
  return os.str();
}

}  // namespace wnlab
