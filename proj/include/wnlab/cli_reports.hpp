#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace wnlab {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Key-value configuration with [sections]. Lookups fall back from a suite
/// section to [general], then to the built-in default.
struct RunConfig {
  std::map<std::string, std::map<std::string, std::string>> values;
  std::uint64_t seed = 20240611;
  bool negative_control = false;
  bool parallel = false;

  static RunConfig defaults();
  static RunConfig parse(const std::string& text);
  static RunConfig load(const std::string& path);

  std::string get(const std::string& section, const std::string& key, const std::string& def) const;
  int get_int(const std::string& section, const std::string& key, int def) const;
  double get_double(const std::string& section, const std::string& key, double def) const;
  /// Tolerance override from [tolerances], else def.
  double tol(const std::string& name, double def) const;

  /// Checks grid, truncation and tolerance invariants; throws ConfigError.
  void validate() const;
  /// Canonical text of every resolved setting that affects results.
  std::string canonical() const;
  std::uint64_t hash() const;

  std::string cache_dir() const;   // WNLAB_CACHE_DIR, then [general] cache_dir
  std::string report_dir() const;  // [general] report_dir, default "wnlab-reports"
  std::string report_format() const;
};

std::string hex64(std::uint64_t h);

struct CheckRow {
  std::string name;
  std::string tag;       // the identity or property being checked
  double value = 0;
  double bound = 0;
  std::string relation;  // "<=", ">=", "==" or "in" (bound +- bound2)
  double bound2 = 0;
  bool pass = false;
};

struct SuiteResult {
  std::string suite;
  std::vector<CheckRow> rows;
  nlohmann::ordered_json data = nlohmann::ordered_json::object();
  double seconds = 0;  // printed, never written to reports

  bool pass() const;
  void at_most(const std::string& name, const std::string& tag, double value, double bound);
  void at_least(const std::string& name, const std::string& tag, double value, double bound);
  void equals(const std::string& name, const std::string& tag, double value, double expected);
  void within(const std::string& name, const std::string& tag, double value, double center,
              double halfwidth);
};

extern const std::vector<std::string> kSuiteNames;

/// Runs one suite. Throws ConfigError for bad settings and std::invalid_argument
/// for an unknown name.
SuiteResult run_suite(const std::string& name, const RunConfig& cfg);

SuiteResult run_algebra_suite(const RunConfig& cfg);
SuiteResult run_one_particle_suite(const RunConfig& cfg);
SuiteResult run_fock_suite(const RunConfig& cfg);
SuiteResult run_kernels_suite(const RunConfig& cfg);
SuiteResult run_energy_rep_suite(const RunConfig& cfg);
SuiteResult run_commutant_suite(const RunConfig& cfg);

/// Deterministic report: config hash, seed, settings and every check row.
nlohmann::ordered_json report_json(const RunConfig& cfg, const std::string& suite,
                                   const std::vector<SuiteResult>& results);
std::string report_csv(const std::vector<SuiteResult>& results);
std::string run_id(const RunConfig& cfg, const std::string& suite);

/// Writes <report_dir>/<run_id>.json and/or .csv; returns the run id.
std::string write_reports(const RunConfig& cfg, const std::string& suite,
                          const std::vector<SuiteResult>& results);
/// Table of check, tag, value, bound and PASS/FAIL; throws std::runtime_error
/// when the report does not exist.
std::string render_report(const std::string& report_dir, const std::string& id);

/// One line per check plus a suite summary line.
std::string summary_lines(const SuiteResult& r);

}  // namespace wnlab
