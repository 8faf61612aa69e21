#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace minglab {

enum class Command { kAverage, kTrajectory, kNoise, kLimit, kValidate, kOrbits, kMacroCheck };
enum class OutputFormat { kCsv, kJson };

Command parse_command(const std::string& name);
const char* command_name(Command c);
OutputFormat parse_format(const std::string& name);
const char* format_name(OutputFormat f);

/// Invalid configuration, tagged with the offending field.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// One experiment manifest: JSON document merged with CLI flag overrides
/// (flags win).  Identical config + seed reproduces output byte for byte.
struct ExperimentConfig {
  Command command = Command::kAverage;
  std::vector<std::size_t> n_list;
  double alpha = 0.5;
  double h0 = 1.0;
  double a1_sq = 0.5;
  double phase = 0.0;                   // relative phase of a1, radians
  std::optional<std::size_t> samples;   // quadrature points; empty = 2n+1
  std::size_t defects = 0;              // random flips applied to the initial pattern
  std::uint64_t seed = 1;
  std::string output;                   // empty = stdout
  OutputFormat format = OutputFormat::kCsv;
  std::size_t memory_cap_mb = 4096;

  void validate() const;  // throws ConfigError
};

/// Defaults overlaid with the JSON document at `path`.  If `expect` is set
/// and the document carries a conflicting "command" key, that is a config
/// error rather than a silent override.
ExperimentConfig load_config_json(const std::string& path,
                                  std::optional<Command> expect = std::nullopt);

using Cell = std::variant<std::uint64_t, double, std::string, bool>;

struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

ResultTable run_average(const ExperimentConfig& config);
ResultTable run_trajectory(const ExperimentConfig& config);
ResultTable run_noise(const ExperimentConfig& config);
ResultTable run_limit(const ExperimentConfig& config);
ResultTable run_orbits(const ExperimentConfig& config);
ResultTable run_macro_check(const ExperimentConfig& config);

/// Test hook used by the validation suite's negative control; a nonzero skew
/// corrupts the fast-path phase convention.
struct ValidationHooks {
  double eigenphase_skew = 0.0;
};

struct ValidationOutcome {
  ResultTable table;  // n, check, max_error, tolerance, status
  std::vector<std::string> lines;
  bool all_passed = false;
};

/// Dense-oracle suite: path equivalence, unitarity, shift exactness, orbit
/// counts and pointer fast/dense agreement at the per-check tolerances.
ValidationOutcome run_validate(const ExperimentConfig& config,
                               const ValidationHooks& hooks = {});

std::string render_csv(const ResultTable& table);
std::string render_json(const ResultTable& table);

/// Write-temp-then-rename: `path` appears complete or not at all.
void write_atomic(const std::string& path, const std::string& content);

/// Run the configured command end to end: validates, executes, writes the
/// output file (atomically) or streams to `out`.  Returns the process exit
/// code: 0 success, 1 validation/runtime failure, 2 config error.
int run_experiment(const ExperimentConfig& config, std::ostream& out, std::ostream& err,
                   const ValidationHooks& hooks = {});

}  // namespace minglab
