#include "minglab/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "minglab/averaging.hpp"
#include "minglab/dynamics.hpp"
#include "minglab/limit.hpp"
#include "minglab/observable.hpp"
#include "minglab/orbit.hpp"
#include "minglab/pattern.hpp"
#include "minglab/rng.hpp"
#include "minglab/version.hpp"

namespace minglab {

namespace {

using json = nlohmann::ordered_json;

std::string format_double(double value) {
  if (!std::isfinite(value)) {
    throw std::logic_error("refusing to emit a non-finite numeric field");
  }
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

std::string format_cell(const Cell& cell) {
  if (const auto* u = std::get_if<std::uint64_t>(&cell)) return std::to_string(*u);
  if (const auto* d = std::get_if<double>(&cell)) return format_double(*d);
  if (const auto* b = std::get_if<bool>(&cell)) return *b ? "true" : "false";
  return std::get<std::string>(cell);
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string quoted = "\"";
  for (char c : field) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

// Every row carries the run context alongside the command-specific columns.
void append_context_columns(ResultTable& table, const ExperimentConfig& config) {
  table.columns.insert(table.columns.end(), {"alpha", "a1_sq", "seed", "version"});
  for (auto& row : table.rows) {
    row.emplace_back(config.alpha);
    row.emplace_back(config.a1_sq);
    row.emplace_back(std::uint64_t{config.seed});
    row.emplace_back(std::string(kVersion));
  }
}

Incident incident_from(const ExperimentConfig& config) {
  return Incident::from_prob(config.a1_sq, config.phase);
}

// Initial apparatus configuration: the armed pattern, optionally perturbed by
// `defects` random flips.  Closed-form averaging requires a full rotation
// period, so shift-invariant draws (possible only for tiny n) are redrawn.
Pattern initial_pattern(std::size_t n, const ExperimentConfig& config, Rng& rng) {
  Pattern p = make_cocked_pattern(n);
  if (config.defects == 0) return p;
  for (int attempt = 0; attempt < 64; ++attempt) {
    const std::vector<std::size_t> flips = rng.distinct_positions(config.defects, n);
    Pattern q = p.flipped(flips);
    if (q.rotation_period() == n) return q;
  }
  throw std::runtime_error("could not draw a full-period perturbed initial pattern");
}

std::size_t samples_for(const ExperimentConfig& config, std::size_t n) {
  return config.samples.value_or(auto_sample_count(n));
}

void check_policy_compatible(const ExperimentConfig& config) {
  for (const std::size_t n : config.n_list) {
    if (2 * defect_budget(n, config.alpha) >= n) {
      throw ConfigError("n", "defect budget floor(n^alpha) reaches n/2 at n=" +
                                 std::to_string(n) + "; increase n or lower alpha");
    }
  }
}

void check_memory(const ExperimentConfig& config) {
  const double cap_bytes = static_cast<double>(config.memory_cap_mb) * 1024.0 * 1024.0;
  double worst = 0.0;
  for (const std::size_t n : config.n_list) {
    double bytes = 0.0;
    if (config.command == Command::kValidate) {
      // Dense oracle: Hamiltonian matrix plus eigenvector blocks.
      bytes = 2.0 * 16.0 * std::pow(4.0, static_cast<double>(n));
    } else if (config.command == Command::kOrbits) {
      bytes = static_cast<double>(std::size_t{1} << std::min<std::size_t>(n, 20));
    } else {
      // Orbit storage: a handful of length-n complex vectors per sector plus
      // the quadrature sample arrays.
      const double m = static_cast<double>(samples_for(config, n));
      bytes = 160.0 * static_cast<double>(n) + 16.0 * m;
    }
    worst = std::max(worst, bytes);
  }
  if (worst > cap_bytes) {
    std::ostringstream msg;
    msg << "estimated working set " << static_cast<std::uint64_t>(worst / (1024.0 * 1024.0))
        << " MiB exceeds memory_cap_mb=" << config.memory_cap_mb
        << "; raise the cap if this size is intended";
    throw ConfigError("memory_cap_mb", msg.str());
  }
}

}  // namespace

Command parse_command(const std::string& name) {
  if (name == "average") return Command::kAverage;
  if (name == "trajectory") return Command::kTrajectory;
  if (name == "noise") return Command::kNoise;
  if (name == "limit") return Command::kLimit;
  if (name == "validate") return Command::kValidate;
  if (name == "orbits") return Command::kOrbits;
  if (name == "macro-check") return Command::kMacroCheck;
  throw ConfigError("command", "unknown command '" + name + "'");
}

const char* command_name(Command c) {
  switch (c) {
    case Command::kAverage: return "average";
    case Command::kTrajectory: return "trajectory";
    case Command::kNoise: return "noise";
    case Command::kLimit: return "limit";
    case Command::kValidate: return "validate";
    case Command::kOrbits: return "orbits";
    case Command::kMacroCheck: return "macro-check";
  }
  return "?";
}

OutputFormat parse_format(const std::string& name) {
  if (name == "csv") return OutputFormat::kCsv;
  if (name == "json") return OutputFormat::kJson;
  throw ConfigError("format", "format must be csv or json, got '" + name + "'");
}

const char* format_name(OutputFormat f) {
  return f == OutputFormat::kCsv ? "csv" : "json";
}

void ExperimentConfig::validate() const {
  if (n_list.empty()) throw ConfigError("n", "at least one apparatus size is required");
  for (const std::size_t n : n_list) {
    if (n < 2) throw ConfigError("n", "apparatus sizes must be >= 2");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha", "alpha must lie in (0, 1)");
  if (!(h0 > 0.0)) throw ConfigError("h0", "h0 must be positive");
  if (!(a1_sq >= 0.0 && a1_sq <= 1.0)) throw ConfigError("a1_sq", "a1_sq must lie in [0, 1]");
  if (!std::isfinite(phase)) throw ConfigError("phase", "phase must be finite");
  if (samples.has_value() && *samples < 1) {
    throw ConfigError("samples", "samples must be >= 1 (or omitted for auto = 2n+1)");
  }
  if (command == Command::kTrajectory && n_list.size() != 1) {
    throw ConfigError("n", "trajectory runs take exactly one apparatus size");
  }
  if (command == Command::kValidate) {
    for (const std::size_t n : n_list) {
      if (n > kDenseCap) {
        throw ConfigError("n", "validation is bounded by the dense oracle cap n <= " +
                                   std::to_string(kDenseCap));
      }
    }
  }
  if (command == Command::kOrbits) {
    for (const std::size_t n : n_list) {
      if (n > 62) throw ConfigError("n", "orbit counting overflows 64-bit counts for n > 62");
    }
  } else {
    check_policy_compatible(*this);
  }
  for (const std::size_t n : n_list) {
    if (defects > n) throw ConfigError("defects", "cannot flip more positions than exist");
  }
  check_memory(*this);
}

ExperimentConfig load_config_json(const std::string& path, std::optional<Command> expect) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open config file '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ConfigError("config", std::string("config is not valid JSON: ") + e.what());
  }
  ExperimentConfig config;
  if (expect) config.command = *expect;
  for (const auto& [key, value] : doc.items()) {
    try {
      if (key == "command") {
        config.command = parse_command(value.get<std::string>());
        if (expect && config.command != *expect) {
          throw ConfigError("command",
                            std::string("config file says '") + command_name(config.command) +
                                "' but the CLI invoked '" + command_name(*expect) + "'");
        }
      } else if (key == "n") {
        config.n_list.clear();
        if (value.is_array()) {
          for (const auto& v : value) config.n_list.push_back(v.get<std::size_t>());
        } else {
          config.n_list.push_back(value.get<std::size_t>());
        }
      } else if (key == "alpha") {
        config.alpha = value.get<double>();
      } else if (key == "h0") {
        config.h0 = value.get<double>();
      } else if (key == "a1_sq") {
        config.a1_sq = value.get<double>();
      } else if (key == "phase") {
        config.phase = value.get<double>();
      } else if (key == "samples") {
        if (value.is_string()) {
          if (value.get<std::string>() != "auto") {
            throw ConfigError("samples", "samples must be a positive integer or \"auto\"");
          }
          config.samples.reset();
        } else {
          config.samples = value.get<std::size_t>();
        }
      } else if (key == "defects") {
        config.defects = value.get<std::size_t>();
      } else if (key == "seed") {
        config.seed = value.get<std::uint64_t>();
      } else if (key == "output") {
        config.output = value.get<std::string>();
      } else if (key == "format") {
        config.format = parse_format(value.get<std::string>());
      } else if (key == "memory_cap_mb") {
        config.memory_cap_mb = value.get<std::size_t>();
      } else {
        throw ConfigError(key, "unknown config key");
      }
    } catch (const json::exception& e) {
      throw ConfigError(key, std::string("bad value: ") + e.what());
    }
  }
  return config;
}

ResultTable run_average(const ExperimentConfig& config) {
  ResultTable table;
  table.columns = {"n",         "alpha",           "a1_sq",       "kappa_n",
                   "mean_quadrature", "mean_closed_form", "limit_value", "deviation",
                   "variance",  "samples",         "seed",        "version"};
  const Incident v0 = incident_from(config);
  Rng rng(config.seed);
  for (const std::size_t n : config.n_list) {
    const ApparatusSpec spec = ApparatusSpec::make(n, config.h0);
    const CockedPolicy policy = CockedPolicy::make(config.alpha, n);
    const Pattern start = initial_pattern(n, config, rng);
    const std::size_t kappa = cocked_shift_count(spec, policy);
    const std::size_t m = samples_for(config, n);
    const TrajectoryAverage quad = time_average_quadrature(spec, policy, v0, m, start);
    const TrajectoryAverage closed = time_average_closed_form(spec, policy, v0, start);
    const double limit = limit_value(v0);
    table.rows.push_back({std::uint64_t{n}, config.alpha, config.a1_sq, std::uint64_t{kappa},
                          quad.mean, closed.mean, limit, closed.mean - limit, quad.variance,
                          std::uint64_t{m}, std::uint64_t{config.seed},
                          std::string(kVersion)});
  }
  return table;
}

ResultTable run_trajectory(const ExperimentConfig& config) {
  ResultTable table;
  table.columns = {"n", "t", "f_n"};
  const std::size_t n = config.n_list.front();
  const Incident v0 = incident_from(config);
  Rng rng(config.seed);
  const ApparatusSpec spec = ApparatusSpec::make(n, config.h0);
  const CockedPolicy policy = CockedPolicy::make(config.alpha, n);
  const Pattern start = initial_pattern(n, config, rng);
  const std::size_t m = samples_for(config, n);

  const OrbitBasisPtr basis = orbit(start);
  const OrbitPropagator propagator(basis, spec);
  const std::vector<std::uint8_t> flags =
      rotation_cocked_flags(start, basis->period(), policy);
  const double frozen_mass = is_cocked(start, policy).is_member ? 1.0 : 0.0;

  std::vector<Complex> unit(basis->period(), Complex{0.0, 0.0});
  unit[0] = Complex{1.0, 0.0};
  const std::vector<Complex> spectrum = propagator.analyze(unit);
  std::vector<Complex> amp;
  for (std::size_t j = 0; j < m; ++j) {
    const double t = static_cast<double>(j) / static_cast<double>(m);
    propagator.synthesize(spectrum, t, amp);
    double mass1 = 0.0;
    for (std::size_t k = 0; k < amp.size(); ++k) {
      if (flags[k]) mass1 += std::norm(amp[k]);
    }
    const double f =
        std::clamp(1.0 - v0.a0_sq() * frozen_mass - v0.a1_sq() * mass1, 0.0, 1.0);
    table.rows.push_back({std::uint64_t{n}, t, f});
  }
  append_context_columns(table, config);
  return table;
}

ResultTable run_noise(const ExperimentConfig& config) {
  ResultTable table;
  table.columns = {"n", "mean", "variance"};
  const Incident v0 = incident_from(config);
  const std::vector<TrajectoryAverage> scan =
      time_variance_scan(config.n_list, config.alpha, config.h0, v0, config.samples);
  for (const TrajectoryAverage& row : scan) {
    table.rows.push_back({std::uint64_t{row.n}, row.mean, row.variance});
  }
  append_context_columns(table, config);
  return table;
}

ResultTable run_limit(const ExperimentConfig& config) {
  ResultTable table;
  table.columns = {"L_hat", "residual", "classical_expectation"};
  const Incident v0 = incident_from(config);
  std::vector<LimitSample> data;
  for (const std::size_t n : config.n_list) {
    const ApparatusSpec spec = ApparatusSpec::make(n, config.h0);
    const CockedPolicy policy = CockedPolicy::make(config.alpha, n);
    const std::size_t kappa = cocked_shift_count(spec, policy);
    const TrajectoryAverage quad =
        time_average_quadrature(spec, policy, v0, samples_for(config, n));
    data.push_back(LimitSample{n, quad.mean, kappa});
  }
  const LimitFit fit = extrapolate_limit(data);
  const double expectation = classical_expectation(build_classical_system(v0));
  table.rows.push_back({fit.estimate, fit.residual, expectation});
  append_context_columns(table, config);
  return table;
}

ResultTable run_orbits(const ExperimentConfig& config) {
  ResultTable table;
  table.columns = {"n", "prime", "count", "formula_count"};
  for (const std::size_t n : config.n_list) {
    const bool prime = is_prime(n);
    const std::uint64_t count = count_orbits(n);
    // 2 + (2^n - 2)/n, the two constant configurations plus the full-period
    // orbits; an integer by Fermat's little theorem, so primes only
    // (composite sizes report 0 here).
    const std::uint64_t formula =
        prime ? 2 + ((std::uint64_t{1} << n) - 2) / n : 0;
    table.rows.push_back({std::uint64_t{n}, prime, count, formula});
  }
  append_context_columns(table, config);
  return table;
}

ResultTable run_macro_check(const ExperimentConfig& config) {
  ResultTable table;
  table.columns = {"n",   "prefix_id", "estimate", "spread",
                   "prefix_sites", "family",    "pass",     "note"};
  MacroCheckParams params;
  params.n_grid = config.n_list;
  params.seed = config.seed;
  const ObservableFamily family = pointer_defect_family(config.alpha);
  const MacroCheckReport report = macroscopicity_check(family, params);
  for (const MacroCheckRow& row : report.rows) {
    table.rows.push_back({std::uint64_t{row.n}, std::uint64_t{row.prefix_id}, row.estimate,
                          row.spread, std::uint64_t{row.prefix_sites}, family.name,
                          report.pass, report.note});
  }
  append_context_columns(table, config);
  return table;
}

namespace {

struct Check {
  std::string name;
  double max_error;
  double tolerance;
  bool pass() const { return max_error <= tolerance; }
};

void run_checks_for_n(std::size_t n, const ExperimentConfig& config,
                      const ValidationHooks& hooks, Rng& rng, std::vector<Check>& out) {
  const ApparatusSpec spec = ApparatusSpec::make(n, config.h0);
  const CockedPolicy policy = CockedPolicy::make(config.alpha, n);
  const Pattern cocked = make_cocked_pattern(n);
  const OrbitBasisPtr basis = orbit(cocked);
  const OrbitPropagator fast(basis, spec, hooks.eigenphase_skew);
  const auto hamiltonian = DenseHamiltonian::build(spec);
  const DensePropagator dense(hamiltonian);
  const std::size_t period = basis->period();

  // unitarity: fast and dense preserve norms at random states and times
  {
    double err = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
      const SectorState s = SectorState::orbit_vector(basis, rng.unit_vector(period));
      const SectorState d = SectorState::dense_vector(n, rng.unit_vector(std::size_t{1} << n));
      for (int k = 0; k < 4; ++k) {
        const double t = rng.uniform(-2.0, 2.0);
        err = std::max(err, std::abs(fast.evolve(s, t).norm() - 1.0));
        err = std::max(err, std::abs(dense.evolve(d, t).norm() - 1.0));
      }
    }
    out.push_back(Check{"unitarity", err, 1e-12});
  }

  // shift-exactness: t = m/n moves a basis vector m orbit positions, nothing else
  {
    double worst_leak = 0.0;
    for (const std::size_t m : {std::size_t{1}, std::size_t{2}, n - 1}) {
      const SectorState s = SectorState::orbit_basis_vector(basis, 0);
      const SectorState evolved =
          fast.evolve(s, static_cast<double>(m) / static_cast<double>(n));
      const std::size_t target = m % period;
      double leak = 0.0;
      for (std::size_t j = 0; j < period; ++j) {
        if (j != target) leak += std::norm(evolved.amplitudes()[j]);
      }
      worst_leak = std::max(worst_leak, leak);
    }
    out.push_back(Check{"shift-exactness", worst_leak, 1e-20});
  }

  // path-equivalence: fast and dense evolution agree on orbit-supported states
  {
    double err = 0.0;
    for (int trial = 0; trial < 4; ++trial) {
      const SectorState s = SectorState::orbit_vector(basis, rng.unit_vector(period));
      const SectorState s_dense = s.to_dense();
      for (int k = 0; k < 5; ++k) {
        const double t = rng.uniform01();
        const SectorState a = fast.evolve(s, t).to_dense();
        const SectorState b = dense.evolve(s_dense, t);
        for (std::size_t v = 0; v < a.amplitudes().size(); ++v) {
          err = std::max(err, std::abs(a.amplitudes()[v] - b.amplitudes()[v]));
        }
      }
    }
    out.push_back(Check{"path-equivalence", err, 1e-10});
  }

  // orbit-count: enumeration agrees with Burnside, and with the prime formula
  {
    const std::uint64_t enumerated = count_orbits_by_enumeration(n);
    const std::uint64_t burnside = count_orbits_by_burnside(n);
    double err = std::abs(static_cast<double>(enumerated) - static_cast<double>(burnside));
    if (is_prime(n)) {
      const std::uint64_t formula = 2 + ((std::uint64_t{1} << n) - 2) / n;
      err = std::max(err,
                     std::abs(static_cast<double>(enumerated) - static_cast<double>(formula)));
    }
    out.push_back(Check{"orbit-count", err, 0.0});
  }

  // fn-fast-dense: the pointer observable agrees across representations
  {
    double err = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
      const Incident v0 =
          Incident::from_prob(rng.uniform01(), rng.uniform(0.0, 2.0 * std::numbers::pi));
      const SectorState s1 = SectorState::orbit_vector(basis, rng.unit_vector(period));
      const SectorState s0 = SectorState::orbit_basis_vector(basis, 0);
      const CombinedState fast_state = CombinedState::make(v0, s0, s1);
      const CombinedState dense_state = CombinedState::make(v0, s0.to_dense(), s1.to_dense());
      for (int k = 0; k < 2; ++k) {
        const double t = rng.uniform01();
        const double f_fast =
            pointer_observable(evolve_combined(fast_state, t, fast), policy);
        const double f_dense =
            pointer_observable(evolve_combined(dense_state, t, dense), policy);
        err = std::max(err, std::abs(f_fast - f_dense));
      }
    }
    out.push_back(Check{"fn-fast-dense", err, 1e-10});
  }

  // quadrature-fast-dense: one-period means agree across representations
  {
    const Incident v0 = incident_from(config);
    const std::size_t m = auto_sample_count(n);
    const TrajectoryAverage a = time_average_quadrature(spec, policy, v0, m);
    const TrajectoryAverage b = time_average_quadrature(spec, policy, v0, m, std::nullopt,
                                                        EvolutionPath::kDense);
    out.push_back(Check{"quadrature-fast-dense", std::abs(a.mean - b.mean), 1e-10});
  }
}

}  // namespace

ValidationOutcome run_validate(const ExperimentConfig& config, const ValidationHooks& hooks) {
  ValidationOutcome outcome;
  outcome.table.columns = {"n", "check", "max_error", "tolerance", "status"};
  outcome.all_passed = true;
  Rng rng(config.seed);
  for (const std::size_t n : config.n_list) {
    std::vector<Check> checks;
    run_checks_for_n(n, config, hooks, rng, checks);
    for (const Check& c : checks) {
      outcome.all_passed = outcome.all_passed && c.pass();
      outcome.table.rows.push_back({std::uint64_t{n}, c.name, c.max_error, c.tolerance,
                                    std::string(c.pass() ? "pass" : "FAIL")});
      std::ostringstream line;
      line << (c.pass() ? "[PASS] " : "[FAIL] ") << "n=" << n << ' ' << c.name
           << " max_error=" << format_double(c.max_error)
           << " tolerance=" << format_double(c.tolerance);
      outcome.lines.push_back(line.str());
    }
  }
  return outcome;
}

std::string render_csv(const ResultTable& table) {
  std::string out;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c > 0) out += ',';
    out += csv_escape(table.columns[c]);
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) out += ',';
      out += csv_escape(format_cell(row[c]));
    }
    out += '\n';
  }
  return out;
}

std::string render_json(const ResultTable& table) {
  json rows = json::array();
  for (const auto& row : table.rows) {
    json obj = json::object();
    for (std::size_t c = 0; c < row.size(); ++c) {
      const Cell& cell = row[c];
      if (const auto* u = std::get_if<std::uint64_t>(&cell)) {
        obj[table.columns[c]] = *u;
      } else if (const auto* d = std::get_if<double>(&cell)) {
        if (!std::isfinite(*d)) throw std::logic_error("non-finite numeric field");
        obj[table.columns[c]] = *d;
      } else if (const auto* b = std::get_if<bool>(&cell)) {
        obj[table.columns[c]] = *b;
      } else {
        obj[table.columns[c]] = std::get<std::string>(cell);
      }
    }
    rows.push_back(std::move(obj));
  }
  return rows.dump(2) + "\n";
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) {
      out.close();
      fs::remove(tmp);
      throw std::runtime_error("failed writing '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("failed to move output into place: " + ec.message());
  }
}

int run_experiment(const ExperimentConfig& config, std::ostream& out, std::ostream& err,
                   const ValidationHooks& hooks) {
  try {
    config.validate();
    ResultTable table;
    bool checks_passed = true;
    switch (config.command) {
      case Command::kAverage: table = run_average(config); break;
      case Command::kTrajectory: table = run_trajectory(config); break;
      case Command::kNoise: table = run_noise(config); break;
      case Command::kLimit: table = run_limit(config); break;
      case Command::kOrbits: table = run_orbits(config); break;
      case Command::kMacroCheck: table = run_macro_check(config); break;
      case Command::kValidate: {
        const ValidationOutcome outcome = run_validate(config, hooks);
        for (const std::string& line : outcome.lines) out << line << '\n';
        table = outcome.table;
        checks_passed = outcome.all_passed;
        break;
      }
    }
    const std::string rendered =
        config.format == OutputFormat::kCsv ? render_csv(table) : render_json(table);
    if (config.output.empty()) {
      out << rendered;
    } else {
      write_atomic(config.output, rendered);
    }
    return checks_passed ? 0 : 1;
  } catch (const ConfigError& e) {
    err << "config error: field '" << e.field() << "': " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace minglab
