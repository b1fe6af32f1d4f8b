#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "wnlab/cli_reports.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;

int verify(const std::string& suite, const std::string& config_path, const std::optional<std::uint64_t>& seed,
           bool parallel, bool negative_control) {
  using namespace wnlab;
  RunConfig cfg = config_path.empty() ? RunConfig::defaults() : RunConfig::load(config_path);
  if (seed) cfg.seed = *seed;
  cfg.parallel = parallel;
  cfg.negative_control = negative_control;
  cfg.validate();

  std::vector<std::string> names;
  if (suite == "all")
    names = kSuiteNames;
  else
    names = {suite};
  for (const auto& n : names)
    if (std::find(kSuiteNames.begin(), kSuiteNames.end(), n) == kSuiteNames.end())
      throw ConfigError("unknown suite '" + n + "'");

  std::vector<SuiteResult> results;
  bool ok = true;
  for (const auto& n : names) {
    results.push_back(run_suite(n, cfg));
    std::cout << summary_lines(results.back()) << std::flush;
    ok = ok && results.back().pass();
  }
  const std::string id = write_reports(cfg, suite, results);
  std::cout << "config hash " << hex64(cfg.hash()) << ", report " << id << " in " << cfg.report_dir() << "\n";
  std::cout << (ok ? "verify: PASS" : "verify: FAIL") << "\n";
  return ok ? kExitPass : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical checks for the energy representation of circle gauge groups"};
  app.require_subcommand(1);

  std::string suite, config_path;
  std::optional<std::uint64_t> seed;
  bool parallel = false, negative_control = false;
  auto* ver = app.add_subcommand("verify", "Run a check suite and write a report");
  ver->add_option("suite", suite, "algebra, one-particle, fock, kernels, energy-rep, commutant or all")->required();
  ver->add_option("--config", config_path, "INI configuration file");
  ver->add_option("--seed", seed, "Override the RNG seed");
  ver->add_flag("--parallel", parallel, "Assemble constraint blocks on several threads");
  ver->add_flag("--negative-control", negative_control, "Flip one sign per suite; checks must fail");

  std::string id, report_dir = "wnlab-reports";
  auto* rep = app.add_subcommand("report", "Render a stored report");
  rep->add_option("run_id", id, "Run id printed by verify")->required();
  rep->add_option("--report-dir", report_dir, "Directory holding reports");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*ver) return verify(suite, config_path, seed, parallel, negative_control);
    std::cout << wnlab::render_report(report_dir, id);
    return kExitPass;
  } catch (const wnlab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFail;
  }
}
