#include "qprobe/runner.hpp"
#include "qprobe/version.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

struct FlagOverrides {
  std::optional<std::string> config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<double> s;
  std::optional<std::int64_t> runs;
  std::optional<double> eta;
  std::optional<double> transmission;
  std::optional<double> xi;
  std::optional<double> visibility;
  std::optional<int> cutoff;
  bool strict = false;
};

void add_common_flags(CLI::App* app, FlagOverrides& flags) {
  app->add_option("--config", flags.config_path, "JSON config file");
  app->add_option("--seed", flags.seed, "Base RNG seed (overrides config)");
  app->add_option("--out", flags.out, "Output path (stdout when omitted)");
  app->add_option("--format", flags.format, "Output format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  app->add_option("--s", flags.s, "Ordering parameter s");
  app->add_option("--runs", flags.runs, "Runs per setting N");
  app->add_option("--eta", flags.eta, "Detector quantum efficiency");
  app->add_option("--T", flags.transmission, "Beam-splitter power transmission");
  app->add_option("--xi", flags.xi, "Squared mode overlap");
  app->add_option("--visibility", flags.visibility, "Interference visibility (sets xi)");
  app->add_option("--cutoff", flags.cutoff, "Count cut-off K");
  app->add_flag("--strict", flags.strict, "Exit 3 when a numeric divergence is flagged");
}

qprobe::RunConfig load_config(const FlagOverrides& flags) {
  std::string text = "{}";
  if (flags.config_path) {
    std::ifstream is(*flags.config_path);
    if (!is) throw qprobe::ConfigError("cannot read config file '" + *flags.config_path + "'");
    std::ostringstream buffer;
    buffer << is.rdbuf();
    text = buffer.str();
  }
  qprobe::RunConfig config = qprobe::RunConfig::from_json(text);
  if (flags.seed) config.seed = *flags.seed;
  if (flags.out) config.out = *flags.out;
  if (flags.format) config.format = *flags.format;
  if (flags.s) config.s = *flags.s;
  if (flags.runs) config.runs = *flags.runs;
  if (flags.eta) config.detector.efficiency = *flags.eta;
  if (flags.transmission) config.detector.transmission = *flags.transmission;
  if (flags.xi && flags.visibility)
    throw qprobe::ConfigError("give exactly one of --xi or --visibility");
  if (flags.xi) config.detector.overlap = *flags.xi;
  if (flags.visibility) config.detector.overlap = qprobe::visibility_to_overlap(*flags.visibility);
  if (flags.cutoff) config.detector.cutoff = *flags.cutoff;
  if (flags.strict) config.strict = true;
  config.detector.validate();
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quasidistribution measurement simulator: direct photon counting and homodyne baselines"};
  app.set_version_flag("--version", std::string(qprobe::kVersion));
  app.require_subcommand(1);

  FlagOverrides flags;
  CLI::App* quasi = app.add_subcommand("quasi", "Evaluate W(alpha; s) on a grid");
  CLI::App* counts = app.add_subcommand("counts", "Photocount distribution at one probe point");
  CLI::App* simulate =
      app.add_subcommand("simulate", "Monte Carlo scan with exact error bands");
  CLI::App* stats = app.add_subcommand("stats", "Estimator pathology sweeps and demos");
  CLI::App* homodyne = app.add_subcommand("homodyne", "Marginals, tomography, random phase");
  for (CLI::App* sub : {quasi, counts, simulate, stats, homodyne}) add_common_flags(sub, flags);

  CLI11_PARSE(app, argc, argv);

  try {
    const qprobe::RunConfig config = load_config(flags);
    if (quasi->parsed()) return qprobe::cmd_quasi(config);
    if (counts->parsed()) return qprobe::cmd_counts(config);
    if (simulate->parsed()) return qprobe::cmd_simulate(config);
    if (stats->parsed()) return qprobe::cmd_stats(config);
    if (homodyne->parsed()) return qprobe::cmd_homodyne(config);
  } catch (const qprobe::DivergenceError& e) {
    std::cerr << "{\"error\":\"divergence\",\"message\":\"" << e.what() << "\"}\n";
    return 3;
  } catch (const qprobe::ConfigError& e) {
    std::cerr << "{\"error\":\"config\",\"message\":\"" << e.what() << "\"}\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "{\"error\":\"config\",\"message\":\"" << e.what() << "\"}\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "{\"error\":\"internal\",\"message\":\"" << e.what() << "\"}\n";
    return 1;
  }
  return 0;
}
