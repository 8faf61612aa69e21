// minglab: experiment harness for the cyclic-shift amplifier model.
// One subcommand per experiment; a JSON config file may carry the manifest,
// with command-line flags overriding individual fields.

#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "minglab/experiments.hpp"
#include "minglab/version.hpp"

namespace {

struct FlagOverrides {
  std::string config_path;
  std::vector<std::size_t> n_list;
  std::optional<double> alpha;
  std::optional<double> h0;
  std::optional<double> a1_sq;
  std::optional<double> phase;
  std::string samples;  // integer or "auto"
  std::optional<std::size_t> defects;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output;
  std::optional<std::string> format;
  std::optional<std::size_t> memory_cap_mb;
};

void add_common_flags(CLI::App* cmd, FlagOverrides& flags) {
  cmd->add_option("--config", flags.config_path, "JSON config file (flags override its fields)");
  cmd->add_option("--n", flags.n_list, "apparatus sizes")->delimiter(',');
  cmd->add_option("--alpha", flags.alpha, "defect budget exponent, in (0,1)");
  cmd->add_option("--h0", flags.h0, "base action constant");
  cmd->add_option("--a1-sq", flags.a1_sq, "|a1|^2 of the incident particle, in [0,1]");
  cmd->add_option("--phase", flags.phase, "relative phase of a1 (radians)");
  cmd->add_option("--samples", flags.samples, "quadrature sample count, or 'auto' (= 2n+1)");
  cmd->add_option("--defects", flags.defects, "random flips applied to the initial pattern");
  cmd->add_option("--seed", flags.seed, "64-bit seed; outputs are byte-identical per seed");
  cmd->add_option("--output", flags.output, "output file path (default: stdout)");
  cmd->add_option("--format", flags.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--memory-cap-mb", flags.memory_cap_mb,
                  "refuse runs whose working set would exceed this many MiB");
}

int apply_and_run(minglab::Command command, const FlagOverrides& flags) {
  using minglab::ConfigError;
  try {
    minglab::ExperimentConfig config;
    if (!flags.config_path.empty()) {
      config = minglab::load_config_json(flags.config_path, command);
    }
    config.command = command;
    if (!flags.n_list.empty()) config.n_list = flags.n_list;
    if (flags.alpha) config.alpha = *flags.alpha;
    if (flags.h0) config.h0 = *flags.h0;
    if (flags.a1_sq) config.a1_sq = *flags.a1_sq;
    if (flags.phase) config.phase = *flags.phase;
    if (!flags.samples.empty()) {
      if (flags.samples == "auto") {
        config.samples.reset();
      } else {
        try {
          config.samples = std::stoull(flags.samples);
        } catch (const std::exception&) {
          throw ConfigError("samples", "samples must be a positive integer or 'auto'");
        }
      }
    }
    if (flags.defects) config.defects = *flags.defects;
    if (flags.seed) config.seed = *flags.seed;
    if (flags.output) config.output = *flags.output;
    if (flags.format) config.format = minglab::parse_format(*flags.format);
    if (flags.memory_cap_mb) config.memory_cap_mb = *flags.memory_cap_mb;
    return minglab::run_experiment(config, std::cout, std::cerr);
  } catch (const ConfigError& e) {
    std::cerr << "config error: field '" << e.field() << "': " << e.what() << '\n';
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cyclic-shift amplifier laboratory"};
  app.set_version_flag("--version", std::string("minglab ") + minglab::kVersion);
  app.require_subcommand(1);

  struct Sub {
    const char* name;
    const char* help;
    minglab::Command command;
  };
  const Sub subs[] = {
      {"average", "time-averaged pointer vs closed form per apparatus size",
       minglab::Command::kAverage},
      {"trajectory", "pointer samples f(t) over one period at a single size",
       minglab::Command::kTrajectory},
      {"noise", "mean/variance sweep across apparatus sizes", minglab::Command::kNoise},
      {"limit", "finite-size extrapolation vs the classical two-point expectation",
       minglab::Command::kLimit},
      {"validate", "dense-oracle validation suite (n <= 12)", minglab::Command::kValidate},
      {"orbits", "cyclic orbit counts vs the prime-size formula", minglab::Command::kOrbits},
      {"macro-check", "prefix-independence diagnostic for the pointer family",
       minglab::Command::kMacroCheck},
  };

  FlagOverrides flags;
  minglab::Command selected = minglab::Command::kAverage;
  for (const Sub& sub : subs) {
    CLI::App* cmd = app.add_subcommand(sub.name, sub.help);
    add_common_flags(cmd, flags);
    const minglab::Command command = sub.command;
    cmd->callback([&selected, command]() { selected = command; });
  }

  CLI11_PARSE(app, argc, argv);
  return apply_and_run(selected, flags);
}
