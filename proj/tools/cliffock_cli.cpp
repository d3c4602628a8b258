// Experiment driver for the Clifford Bargmann-Fock toolkit. Each subcommand
// loads a flat key-value config, runs the experiment, writes CSV files and a
// gnuplot script into the output directory, and prints one PASS/FAIL line
// per contract. Exit codes: 0 all contracts pass, 1 contract failure,
// 2 usage or config error.

#include <CLI11.hpp>
#include <cliffock/cliffock.hpp>

#include <cstdio>
#include <exception>
#include <functional>
#include <map>
#include <string>

namespace {

using RunFn = std::function<std::vector<cliffock::ContractResult>(const cliffock::ExperimentConfig&)>;

const std::map<std::string, RunFn>& subcommands() {
  static const std::map<std::string, RunFn> table = {
      {"kernel", cliffock::run_kernel},     {"dirac", cliffock::run_dirac},
      {"mvi", cliffock::run_mvi},           {"moser", cliffock::run_moser},
      {"diagonal", cliffock::run_diagonal}, {"decay", cliffock::run_decay},
      {"witness", cliffock::run_witness},   {"harmonic", cliffock::run_harmonic},
      {"all", cliffock::run_all},
  };
  return table;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"weighted Bergman kernel experiments for Clifford Bargmann-Fock spaces"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_override;
  std::string chosen;
  for (const auto& [name, fn] : subcommands()) {
    CLI::App* sub = app.add_subcommand(name, "run the '" + name + "' experiment");
    sub->add_option("--config", config_path, "flat key-value config file")->required();
    sub->add_option("--output", output_override, "override output.dir from the config");
    sub->callback([&chosen, name = name] { chosen = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    const cliffock::Config raw = cliffock::Config::parse_file(config_path);
    cliffock::ExperimentConfig cfg = cliffock::load_experiment_config(raw);
    if (!output_override.empty()) cfg.output_dir = output_override;

    const auto results = subcommands().at(chosen)(cfg);
    int failures = 0;
    for (const auto& r : results) {
      std::printf("%s %-32s %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
      failures += r.pass ? 0 : 1;
    }
    std::printf("%s: %zu contracts, %d failed\n", chosen.c_str(), results.size(), failures);
    return failures == 0 ? 0 : 1;
  } catch (const cliffock::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
