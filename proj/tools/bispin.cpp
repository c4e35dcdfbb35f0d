// bispin: command-line front end for the donor spin toolkit.
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bispin/commands.hpp"
#include "bispin/config.hpp"
#include "bispin/io.hpp"

namespace {

struct CommonOptions {
  std::string config_path;
  std::optional<long long> seed;
  std::optional<int> workers;
  std::string out;
  std::vector<std::string> assignments;
};

struct FitOptions {
  std::string model;
  std::string input;
  std::optional<double> fix_delta;
  std::optional<int> n_lines;
  std::string mode;
};

void add_common(CLI::App* sub, CommonOptions& o) {
  sub->add_option("--config", o.config_path, "configuration file (sectioned key = value)");
  sub->add_option("--seed", o.seed, "base seed");
  sub->add_option("--workers", o.workers, "worker threads");
  sub->add_option("--out", o.out, "output directory");
  sub->add_option("--set", o.assignments, "override section.key=value (repeatable)");
}

bispin::RunConfig resolve(const CommonOptions& o, const FitOptions& f) {
  bispin::RunConfig cfg = o.config_path.empty() ? bispin::RunConfig{} : bispin::RunConfig::from_file(o.config_path);
  for (const auto& a : o.assignments) cfg.set_assignment(a);
  if (o.seed) cfg.set("run.seed", std::to_string(*o.seed));
  if (o.workers) cfg.set("run.workers", std::to_string(*o.workers));
  if (!o.out.empty()) cfg.set("run.out", o.out);
  if (!f.model.empty()) cfg.set("fit.model", f.model);
  if (!f.input.empty()) cfg.set("fit.input", f.input);
  if (f.fix_delta) cfg.set("fit.fix_delta_k", bispin::format_double(*f.fix_delta));
  if (f.n_lines) cfg.set("fit.n_lines", std::to_string(*f.n_lines));
  if (!f.mode.empty()) cfg.set("fit.mode", f.mode);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Donor electron-nuclear spin levels, spectra, bath decoherence and fits"};
  app.set_version_flag("--version", BISPIN_VERSION);
  app.require_subcommand(1);

  CommonOptions common;
  FitOptions fit;
  std::vector<CLI::App*> subs;
  const std::vector<std::pair<std::string, std::string>> described{
      {"levels", "energy levels and concurrences over a field grid"},
      {"resonances", "resonant fields at a fixed frequency, plus a derivative spectrum"},
      {"freqmap", "frequency-field map of allowed transitions"},
      {"rabi", "relative nutation frequencies of the resonant transitions"},
      {"cce", "CCE-2 Hahn-echo ensemble for one transition"},
      {"cce-converge", "CCE ensembles over bath sizes and pair cutoffs"},
      {"fit", "fit a model to a CSV file"},
      {"print-config", "print the fully resolved configuration"},
  };
  for (const auto& [name, help] : described) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub, common);
    subs.push_back(sub);
  }
  CLI::App* fit_cmd = app.get_subcommand("fit");
  fit_cmd->add_option("--model", fit.model, "echo_decay|t1_raman_orbach|exp_recovery|gaussian_lines|linear_baseline");
  fit_cmd->add_option("--input", fit.input, "input CSV");
  fit_cmd->add_option("--fix-delta", fit.fix_delta, "hold Delta/kB fixed (K) for t1_raman_orbach");
  fit_cmd->add_option("--n-lines", fit.n_lines, "gaussian_lines: number of lines");
  fit_cmd->add_option("--mode", fit.mode, "gaussian_lines: absorption|derivative");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? bispin::kExitOk : bispin::kExitUsage;
  }

  const CLI::App* chosen = app.get_subcommands().front();
  try {
    const bispin::RunConfig cfg = resolve(common, fit);
    if (chosen->get_name() == "print-config") {
      std::cout << cfg.to_text();
      return bispin::kExitOk;
    }
    const bispin::CommandOutcome outcome = bispin::run_command(chosen->get_name(), cfg);
    for (const auto& f : outcome.files) std::cout << (outcome.out_dir / f).string() << "\n";
    if (outcome.exit_code == bispin::kExitNumerical) std::cerr << "bispin: fit did not converge\n";
    return outcome.exit_code;
  } catch (const bispin::UsageError& e) {
    std::cerr << "bispin: " << e.what() << "\n";
    return bispin::kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "bispin: " << e.what() << "\n";
    return bispin::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "bispin: numerical failure: " << e.what() << "\n";
    return bispin::kExitNumerical;
  }
}
