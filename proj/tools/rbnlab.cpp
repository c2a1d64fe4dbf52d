// rbnlab: batch driver for random Boolean network experiments.
//
//   rbnlab entropy-scan --config cfg --seed 1 --out results/scan
//   rbnlab figure --results results/scan --id fig2
//
// Exit status: 0 success, 2 invalid configuration or request, 3 the output
// directory belongs to a different configuration, 1 anything else.

#include <cstdlib>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "rbn/config.hpp"
#include "rbn/figures.hpp"
#include "rbn/harness.hpp"

namespace {

struct RunOptions {
  std::string config_file;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<unsigned> workers;
  bool quiet = false;
};

void add_run_options(CLI::App* cmd, RunOptions& o) {
  cmd->add_option("-c,--config", o.config_file, "experiment file of 'key = value' lines")->check(CLI::ExistingFile);
  cmd->add_option("--set", o.overrides, "override one key, e.g. --set K=0.5:8:0.5")->take_all();
  cmd->add_option("--seed", o.seed, "master seed (required here or in the config)");
  cmd->add_option("-o,--out", o.out, "output directory");
  cmd->add_option("-j,--workers", o.workers, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_flag("-q,--quiet", o.quiet, "suppress progress lines");
}

rbn::ExperimentConfig build_config(const RunOptions& o, const std::string& default_kind) {
  rbn::KeyValues values;
  values["kind"] = default_kind;
  if (!o.config_file.empty()) {
    std::ifstream in(o.config_file);
    for (const auto& [k, v] : rbn::read_key_values(in)) values[k] = v;
  }
  for (const auto& item : o.overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw rbn::ConfigError(item, "--set expects key=value");
    values[item.substr(0, eq)] = item.substr(eq + 1);
  }
  if (o.seed) values["seed"] = std::to_string(*o.seed);
  if (o.workers) values["workers"] = std::to_string(*o.workers);
  if (!o.out.empty()) values["output"] = o.out;

  auto config = rbn::ExperimentConfig::from_key_values(values);
  if (default_kind == "measure-curves" && config.kind == rbn::ExperimentKind::CumulativeLandscape) {
    // "measure" serves both evolution-measure kinds.
  } else if (rbn::to_string(config.kind) != default_kind) {
    throw rbn::ConfigError("kind", "this subcommand runs " + default_kind + " experiments");
  }
  config.validate();
  if (config.output.empty()) {
    const char* root = std::getenv("RBNLAB_OUTPUT_ROOT");
    config.output = std::string(root && *root ? root : "results") + "/" + rbn::to_string(config.kind) + "-" +
                    rbn::hex64(config.hash()).substr(0, 12);
  }
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random Boolean network lab: functional entropy scans and evolutionary learning studies"};
  app.set_version_flag("--version", RBNLAB_VERSION);
  app.require_subcommand(1);

  struct Sub {
    const char* name;
    const char* kind;
    const char* help;
  };
  const Sub subs[] = {
      {"entropy-scan", "entropy-scan", "functional entropy over an (N, I, K) grid"},
      {"scaling-fit", "max-entropy-scaling", "maximum-entropy connectivity per N and its power-law fit"},
      {"evolve", "evolve-sweep", "evolutionary runs over an (N, K, I, s) grid"},
      {"measure", "measure-curves", "learning measure curves and their cumulative areas"},
  };
  std::vector<RunOptions> options(std::size(subs));
  std::vector<CLI::App*> commands;
  for (std::size_t i = 0; i < std::size(subs); ++i) {
    commands.push_back(app.add_subcommand(subs[i].name, subs[i].help));
    add_run_options(commands.back(), options[i]);
  }

  std::string results_dir, figure_id, figure_out;
  bool list_figures = false;
  auto* figure = app.add_subcommand("figure", "emit the CSV series of a figure from a result directory");
  figure->add_option("-r,--results", results_dir, "result directory written by a run");
  figure->add_option("--id", figure_id, "figure id, fig2 .. fig12");
  figure->add_option("-o,--out", figure_out, "write to this file instead of stdout");
  figure->add_flag("--list", list_figures, "list the figure ids");

  CLI11_PARSE(app, argc, argv);

  try {
    for (std::size_t i = 0; i < commands.size(); ++i) {
      if (!commands[i]->parsed()) continue;
      const auto config = build_config(options[i], subs[i].kind);
      const auto manifest = rbn::run_experiment(config, options[i].quiet ? nullptr : &std::cerr);
      std::cout << config.output << "\n";
      std::cerr << "config " << manifest.config_hash << ", " << manifest.cells << " cells, "
                << manifest.wall_time_s << " s\n";
      return 0;
    }
    if (list_figures) {
      for (const auto& [id, title] : rbn::figure_catalog()) std::cout << id << "\t" << title << "\n";
      return 0;
    }
    if (results_dir.empty() || figure_id.empty()) throw rbn::FigureCoverageError("figure needs --results and --id");
    const auto text = rbn::figure_data(results_dir, figure_id);
    if (figure_out.empty()) {
      std::cout << text;
    } else {
      std::ofstream(figure_out) << text;
    }
    return 0;
  } catch (const rbn::ResumeMismatchError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const rbn::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const rbn::FigureCoverageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const rbn::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
