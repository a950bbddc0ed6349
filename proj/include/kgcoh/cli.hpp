#pragma once

// Command-line front end: run configuration, figure recipes, verification
// suites and CSV/JSON emission. `run` is the whole program minus main(), so
// tests can drive it with in-memory streams.

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "kgcoh/linear_osc.hpp"
#include "kgcoh/numerics.hpp"

namespace kgcoh::cli {

using json = nlohmann::ordered_json;
using KeyValues = std::map<std::string, std::string>;

/// Exit-code contract.
inline constexpr int kExitOk = 0;
inline constexpr int kExitVerificationFailed = 1;
inline constexpr int kExitUsage = 2;

/// Environment variable that overrides the output directory.
inline constexpr const char* kOutputDirEnv = "KGCOH_OUTPUT_DIR";

enum class ModelKind { Linear, PoschlTeller };
enum class OutputFormat { Csv, Json };
enum class Method { Series, Quadrature };

struct RunConfig {
  ModelKind model = ModelKind::Linear;
  double m = 1.0;
  double k = 1.0;
  double omega = 1.0;
  std::string branch = "plus";
  complex alpha{0.0, 0.0};
  int truncation = 50;
  double t0 = 0.0;
  double t1 = 50.0;
  double dt = 0.05;
  std::optional<std::size_t> grid_count;  // per-command default when unset
  int levels = 9;
  Method method = Method::Series;
  int n_max = 10;
  double tol = 1e-6;
  std::string weight = "candidate";
  std::string output;  // empty: stdout
  std::string out_dir = ".";
  OutputFormat format = OutputFormat::Csv;

  /// Builds and validates a config from key=value pairs (keys are the long
  /// flag names). Throws ConfigError on unknown keys or invalid values.
  static RunConfig from_key_values(const KeyValues& values);
  json to_json() const;
};

/// Keys accepted in config files and as --flags.
const std::vector<std::string>& config_keys();

/// Flat key=value text; '#' starts a comment, blank lines are skipped.
KeyValues parse_key_values(std::istream& in);
KeyValues read_config_file(const std::string& path);

/// "a+bi", "a-bi", "a", "bi" with optional whitespace; 'j' is accepted for 'i'.
complex parse_alpha(const std::string& text);

/// %.9g
std::string format_number(double v);

struct FigureRecipe {
  std::string id;
  std::string quantity;  // column the figure plots
  complex alpha;
  double t0 = 0.0;
  double t1 = 50.0;
  double dt = 0.05;
  double k = 1.0;
  int truncation = 50;
};

const std::vector<FigureRecipe>& figure_recipes();
std::optional<FigureRecipe> find_recipe(const std::string& id);

inline constexpr const char* kCsvHeader = "t,dx,dp,product,ex,ep";
void write_csv(std::ostream& out, const linear::TimeSeries& series);
json series_to_json(const linear::TimeSeries& series);

struct CheckResult {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  std::string relation;  // "<=", ">=", ...
  bool passed = false;
};

struct SuiteResult {
  std::string suite;
  std::vector<CheckResult> checks;
  bool passed() const;
  json to_json() const;
};

/// spectra | coherence | measure | oracle | normalization | all.
/// Throws ConfigError for unknown names.
SuiteResult run_suite(const std::string& name);
const std::vector<std::string>& suite_names();

/// Time series for a config: closed-form series for the linear model unless
/// method = quadrature; the quadrature engine for Poschl-Teller.
linear::TimeSeries evolve_series(const RunConfig& config);

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kgcoh::cli
