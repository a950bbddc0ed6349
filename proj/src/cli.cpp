#include "kgcoh/cli.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <regex>
#include <sstream>

#include "CLI11.hpp"
#include "kgcoh/errors.hpp"
#include "kgcoh/evolution.hpp"
#include "kgcoh/oracle.hpp"
#include "kgcoh/poschl_teller.hpp"

namespace kgcoh::cli {

namespace {

double parse_real(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || !std::isfinite(v)) {
    throw ConfigError("invalid number for '" + key + "': " + text);
  }
  return v;
}

long parse_integer(const std::string& key, const std::string& text) {
  long v = 0;
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), last, v);
  if (ec != std::errc{} || ptr != last) {
    throw ConfigError("invalid integer for '" + key + "': " + text);
  }
  return v;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::string format_alpha(complex a) {
  std::string out = format_number(a.real());
  out += a.imag() < 0.0 || std::signbit(a.imag()) ? "-" : "+";
  out += format_number(std::abs(a.imag())) + "i";
  return out;
}

const char* model_name(ModelKind m) { return m == ModelKind::Linear ? "linear" : "pt"; }

pt::SignBranch branch_of(const RunConfig& c) {
  return c.branch == "minus" ? pt::SignBranch::Minus : pt::SignBranch::Plus;
}

evolution::Model model_of(const RunConfig& c) {
  if (c.model == ModelKind::Linear) return linear::LinearModel::make(c.m, c.k);
  return pt::PTModel::make(c.m, c.omega, branch_of(c));
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "model", "m",      "k",     "omega", "branch", "alpha",  "truncation",
      "t0",    "t1",     "dt",    "grid-count",      "n",      "method",
      "n-max", "tol",    "weight", "output", "out-dir", "format"};
  return keys;
}

RunConfig RunConfig::from_key_values(const KeyValues& values) {
  const auto& keys = config_keys();
  for (const auto& [key, value] : values) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw ConfigError("unknown configuration key '" + key + "'");
    }
  }
  auto get = [&](const std::string& key) -> std::optional<std::string> {
    auto it = values.find(key);
    if (it == values.end()) return std::nullopt;
    return it->second;
  };

  RunConfig c;
  if (auto v = get("model")) {
    if (*v == "linear") {
      c.model = ModelKind::Linear;
    } else if (*v == "pt" || *v == "poschl-teller") {
      c.model = ModelKind::PoschlTeller;
    } else {
      throw ConfigError("model must be 'linear' or 'pt'");
    }
  }
  if (auto v = get("m")) c.m = parse_real("m", *v);
  if (auto v = get("k")) c.k = parse_real("k", *v);
  if (auto v = get("omega")) c.omega = parse_real("omega", *v);
  if (auto v = get("branch")) {
    if (*v != "plus" && *v != "minus") throw ConfigError("branch must be 'plus' or 'minus'");
    c.branch = *v;
  }
  if (auto v = get("alpha")) c.alpha = parse_alpha(*v);
  c.truncation = c.model == ModelKind::Linear ? 50 : 60;
  if (auto v = get("truncation")) c.truncation = static_cast<int>(parse_integer("truncation", *v));
  if (auto v = get("t0")) c.t0 = parse_real("t0", *v);
  if (auto v = get("t1")) c.t1 = parse_real("t1", *v);
  if (auto v = get("dt")) c.dt = parse_real("dt", *v);
  if (auto v = get("grid-count")) {
    const long n = parse_integer("grid-count", *v);
    if (n < 101) throw ConfigError("grid-count must be at least 101");
    c.grid_count = static_cast<std::size_t>(n);
  }
  if (auto v = get("n")) c.levels = static_cast<int>(parse_integer("n", *v));
  if (auto v = get("method")) {
    if (*v == "series") {
      c.method = Method::Series;
    } else if (*v == "quadrature") {
      c.method = Method::Quadrature;
    } else {
      throw ConfigError("method must be 'series' or 'quadrature'");
    }
  }
  if (auto v = get("n-max")) c.n_max = static_cast<int>(parse_integer("n-max", *v));
  if (auto v = get("tol")) c.tol = parse_real("tol", *v);
  if (auto v = get("weight")) {
    if (*v != "candidate" && *v != "control") {
      throw ConfigError("weight must be 'candidate' or 'control'");
    }
    c.weight = *v;
  }
  if (auto v = get("output")) c.output = *v;
  if (auto v = get("out-dir")) c.out_dir = *v;
  if (auto v = get("format")) {
    if (*v == "csv") {
      c.format = OutputFormat::Csv;
    } else if (*v == "json") {
      c.format = OutputFormat::Json;
    } else {
      throw ConfigError("format must be 'csv' or 'json'");
    }
  }

  // Semantic validation; model constructors carry the parameter messages.
  try {
    (void)model_of(c);
  } catch (const ArgumentError& e) {
    throw ConfigError(e.what());
  }
  if (c.truncation < 1) throw ConfigError("truncation must be >= 1");
  if (!(c.t0 < c.t1)) throw ConfigError("time range requires t0 < t1");
  if (!(c.dt > 0.0)) throw ConfigError("time step must be positive");
  if (c.levels < 1) throw ConfigError("n must be >= 1");
  if (c.n_max < 0 || c.n_max > 12) throw ConfigError("n-max must lie in [0, 12]");
  if (!(c.tol >= 1e-8)) throw ConfigError("tol must be >= 1e-8");
  return c;
}

json RunConfig::to_json() const {
  json j;
  j["model"] = model_name(model);
  j["m"] = m;
  if (model == ModelKind::Linear) {
    j["k"] = k;
  } else {
    j["omega"] = omega;
    j["branch"] = branch;
  }
  j["alpha"] = format_alpha(alpha);
  j["truncation"] = truncation;
  j["t0"] = t0;
  j["t1"] = t1;
  j["dt"] = dt;
  if (grid_count) j["grid_count"] = *grid_count;
  j["method"] = method == Method::Series ? "series" : "quadrature";
  return j;
}

KeyValues parse_key_values(std::istream& in) {
  KeyValues kv;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(number) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(number) + ": empty key");
    kv[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

KeyValues read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_key_values(in);
}

complex parse_alpha(const std::string& text) {
  std::string s;
  for (char ch : text) {
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  }
  static const std::string num = R"((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)";
  static const std::regex full("^([+-]?" + num + ")([+-])(" + num + ")?[ij]$");
  static const std::regex real_only("^([+-]?" + num + ")$");
  static const std::regex imag_only("^([+-]?)(" + num + ")?[ij]$");
  std::smatch m;
  auto value = [](const std::string& t) { return parse_real("alpha", t); };
  if (std::regex_match(s, m, full)) {
    const double b = m[3].matched ? value(m[3].str()) : 1.0;
    return {value(m[1].str()), m[2].str() == "-" ? -b : b};
  }
  if (std::regex_match(s, m, real_only)) {
    const std::string r = m[1].str();
    return {value(r[0] == '+' ? r.substr(1) : r), 0.0};
  }
  if (std::regex_match(s, m, imag_only)) {
    const double b = m[2].matched ? value(m[2].str()) : 1.0;
    return {0.0, m[1].str() == "-" ? -b : b};
  }
  throw ConfigError("cannot parse alpha '" + text + "' (expected a+bi)");
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Figures and series output

const std::vector<FigureRecipe>& figure_recipes() {
  static const std::vector<FigureRecipe> recipes = [] {
    const complex small{0.1, 0.2};
    const complex large{1.0, 2.0};
    return std::vector<FigureRecipe>{
        {"fig1", "product", small, 0.0, 50.0},   {"fig2", "product", large, 0.0, 100.0},
        {"fig3", "product", large, 0.0, 100.0},  {"fig4", "dx", small, 0.0, 50.0},
        {"fig5", "dp", small, 0.0, 50.0},        {"fig6", "dx", large, 0.0, 100.0},
        {"fig7", "dp", large, 0.0, 100.0},       {"fig8", "ex", small, 0.0, 50.0},
        {"fig9", "ep", small, 0.0, 50.0},        {"fig10", "ex", large, 0.0, 100.0},
        {"fig11", "ep", large, 0.0, 100.0},
    };
  }();
  return recipes;
}

std::optional<FigureRecipe> find_recipe(const std::string& id) {
  for (const auto& r : figure_recipes()) {
    if (r.id == id) return r;
  }
  return std::nullopt;
}

void write_csv(std::ostream& out, const linear::TimeSeries& series) {
  out << kCsvHeader << '\n';
  for (const auto& s : series.samples) {
    out << format_number(s.t) << ',' << format_number(s.dx) << ',' << format_number(s.dp) << ','
        << format_number(s.product) << ',' << format_number(s.mean_x) << ','
        << format_number(s.mean_p) << '\n';
  }
}

json series_to_json(const linear::TimeSeries& series) {
  json rows = json::array();
  for (const auto& s : series.samples) {
    rows.push_back({{"t", s.t},
                    {"dx", s.dx},
                    {"dp", s.dp},
                    {"product", s.product},
                    {"ex", s.mean_x},
                    {"ep", s.mean_p}});
  }
  return rows;
}

linear::TimeSeries evolve_series(const RunConfig& c) {
  const std::vector<double> times = linear::uniform_times(c.t0, c.t1, c.dt);
  if (c.model == ModelKind::Linear && c.method == Method::Series) {
    const auto model = linear::LinearModel::make(c.m, c.k);
    return linear::time_series(model, {c.alpha, c.truncation}, times);
  }
  const evolution::Model model = model_of(c);
  evolution::StateVector state =
      c.model == ModelKind::Linear
          ? evolution::make_state(std::get<linear::LinearModel>(model),
                                  linear::CoherentSpec{c.alpha, c.truncation})
          : evolution::make_state(std::get<pt::PTModel>(model),
                                  pt::coherent_coefficients(std::get<pt::PTModel>(model),
                                                            c.alpha, c.truncation));
  const Grid grid = evolution::default_grid(model, c.grid_count.value_or(4001));
  linear::TimeSeries series;
  for (double t : times) {
    const linear::Moments mo = evolution::quadrature_moments(state, grid, t);
    const linear::Uncertainty u = linear::uncertainty_from_moments(mo);
    series.samples.push_back(
        {t, mo.mean_x, mo.mean_p, u.dx * u.dx, u.dp * u.dp, u.dx, u.dp, u.product});
  }
  return series;
}

// ---------------------------------------------------------------------------
// Verification suites

bool SuiteResult::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

json SuiteResult::to_json() const {
  json j;
  j["suite"] = suite;
  json arr = json::array();
  for (const auto& c : checks) {
    arr.push_back({{"name", c.name},
                   {"value", c.value},
                   {"relation", c.relation},
                   {"bound", c.bound},
                   {"passed", c.passed}});
  }
  j["checks"] = std::move(arr);
  j["passed"] = passed();
  return j;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"spectra", "coherence", "measure",
                                                 "oracle", "normalization", "all"};
  return names;
}

namespace {

CheckResult at_most(std::string name, double value, double bound) {
  return {std::move(name), value, bound, "<=", value <= bound};
}

CheckResult above(std::string name, double value, double bound) {
  return {std::move(name), value, bound, ">", value > bound};
}

CheckResult at_least(std::string name, double value, double bound) {
  return {std::move(name), value, bound, ">=", value >= bound};
}

// alpha values with |alpha| <= 2 used by the coherence and normalization suites
const std::vector<complex>& small_alphas() {
  static const std::vector<complex> a = {{0.0, 0.0}, {0.5, 0.0}, {1.0, 0.5}, {-1.2, 0.8},
                                         {1.5, -1.3}};
  return a;
}

void spectra_checks(std::vector<CheckResult>& out) {
  auto add_report = [&](const std::string& tag, const oracle::SpectrumReport& r) {
    double eps_err = 0.0;
    for (std::size_t n = 0; n < r.n_count; ++n) {
      const double e2 = r.analytic[n] * r.analytic[n];
      eps_err = std::max(eps_err, std::abs(r.fd_energies[n] * r.fd_energies[n] - e2) / e2);
    }
    out.push_back(at_most(tag + ".epsilon_max_rel_error", eps_err, 1e-3));
    out.push_back(at_least(tag + ".min_convergence_order", r.min_order, 1.8));
    out.push_back(at_most(tag + ".max_convergence_order", r.max_order, 2.2));
  };
  const auto lin = linear::LinearModel::make(1.0, 1.0);
  std::vector<double> e_lin;
  for (int n = 0; n < 9; ++n) e_lin.push_back(linear::energy(lin, n));
  add_report("linear", oracle::spectrum_compare(oracle::linear_spec(1.0, 1.0), e_lin, 9));

  const auto ptm = pt::PTModel::make(1.0, 1.0);
  std::vector<double> e_pt, e_wrong;
  for (int n = 0; n < 9; ++n) {
    e_pt.push_back(pt::energy(ptm, n));
    e_wrong.push_back(ptm.omega * (n + ptm.lambda + 0.1));
  }
  const auto pt_spec = oracle::poschl_teller_spec(1.0, 1.0);
  add_report("pt", oracle::spectrum_compare(pt_spec, e_pt, 9));
  const auto wrong = oracle::spectrum_compare(pt_spec, e_wrong, 9);
  out.push_back(above("pt.shifted_lambda_control.max_rel_error", wrong.max_rel_error, 1e-3));
}

void coherence_checks(std::vector<CheckResult>& out) {
  const auto ptm = pt::PTModel::make(1.0, 1.0);
  double phase = 0.0;
  for (const complex& a : small_alphas()) {
    for (int j = 0; j < 20; ++j) {
      const double t = 2.0 * std::numbers::pi * j / 19.0;
      phase = std::max(phase, pt::phase_coherence_check(ptm, a, 60, t));
    }
  }
  out.push_back(at_most("pt.phase_coherence.max_residual", phase, 1e-12));

  double eigen = 0.0;
  for (const complex& a : small_alphas()) {
    const auto st = pt::coherent_coefficients(ptm, a, 60);
    const auto lowered = pt::apply_annihilation(ptm, st.coefficients);
    double r2 = 0.0, c2 = 0.0;
    for (std::size_t n = 0; n < lowered.size(); ++n) {
      r2 += std::norm(lowered[n] - a * st.coefficients[n]);
      c2 += std::norm(st.coefficients[n]);
    }
    eigen = std::max(eigen, std::sqrt(r2 / c2));
  }
  out.push_back(at_most("pt.eigenstate.max_residual", eigen, 1e-10));

  double spacing = 0.0;
  for (int n = 0; n < 60; ++n) {
    spacing = std::max(spacing, std::abs(pt::energy(ptm, n + 1) - pt::energy(ptm, n) - ptm.omega));
  }
  const double ulp_bound = 4.0 * std::numeric_limits<double>::epsilon() * pt::energy(ptm, 60);
  out.push_back(at_most("pt.equal_spacing.max_deviation", spacing, ulp_bound));

  const auto lin = linear::LinearModel::make(1.0, 1.0);
  double at_zero = 0.0;
  for (const complex& a : small_alphas()) {
    at_zero = std::max(at_zero, evolution::lowering_residual(
                                    evolution::make_state(lin, {a, 50}), 0.0));
  }
  out.push_back(at_most("linear.lowering_residual.t0", at_zero, 1e-12));
  const double later =
      evolution::lowering_residual(evolution::make_state(lin, {{1.0, 2.0}, 50}), 1.0);
  out.push_back(above("linear.lowering_residual.alpha=1+2i.t1", later, 1e-3));
}

void measure_checks(std::vector<CheckResult>& out) {
  const auto ptm = pt::PTModel::make(1.0, 1.0);
  for (const auto& m : pt::verify_measure_moments(ptm, 10, 1e-6)) {
    out.push_back(at_most("pt.measure.moment" + std::to_string(m.n) + ".rel_error",
                          m.converged ? m.rel_error : std::numeric_limits<double>::infinity(),
                          1e-6));
  }
  const auto control = pt::verify_measure_moments(ptm, 0, 1e-6, pt::WeightKind::NegativeControl);
  out.push_back(above("pt.measure.control.moment0.rel_error", control[0].rel_error, 1e-6));
}

void oracle_checks(std::vector<CheckResult>& out) {
  const auto lin = linear::LinearModel::make(1.0, 1.0);
  const Grid grid = evolution::default_grid(lin);
  const std::vector<complex> alphas = {{0.1, 0.2}, {1.0, 2.0}, {2.0, -1.0}, {3.0, 0.0}};
  const std::vector<double> times = {0.0, 0.7, 3.1, 12.9};
  double worst = 0.0;
  double min_product = std::numeric_limits<double>::infinity();
  for (const complex& a : alphas) {
    const linear::CoherentSpec spec{a, 50};
    const auto state = evolution::make_state(lin, spec);
    for (double t : times) {
      const auto closed = linear::expectation_series(lin, spec, t);
      const auto quad = evolution::quadrature_moments(state, grid, t);
      const double pairs[4][2] = {{closed.mean_x, quad.mean_x},
                                  {closed.mean_p, quad.mean_p},
                                  {closed.mean_x2, quad.mean_x2},
                                  {closed.mean_p2, quad.mean_p2}};
      for (const auto& p : pairs) {
        const double allowed = std::max(1e-6 * std::abs(p[0]), 1e-8);
        worst = std::max(worst, std::abs(p[0] - p[1]) / allowed);
      }
      min_product = std::min({min_product, linear::uncertainty_from_moments(closed).product,
                              linear::uncertainty_from_moments(quad).product});
    }
  }
  out.push_back(at_most("linear.series_vs_quadrature.max_scaled_discrepancy", worst, 1.0));
  out.push_back(at_least("linear.min_heisenberg_product", min_product, 0.5 * (1.0 - 1e-6)));
}

void normalization_checks(std::vector<CheckResult>& out) {
  double lin_dev = 0.0;
  double pt_dev = 0.0;
  const auto ptm = pt::PTModel::make(1.0, 1.0);
  for (const complex& a : small_alphas()) {
    double s = 0.0;
    for (const complex& c : linear::coherent_coefficients({a, 50})) s += std::norm(c);
    lin_dev = std::max(lin_dev, std::abs(1.0 - s));
    s = 0.0;
    for (const complex& c : pt::coherent_coefficients(ptm, a, 60).coefficients) s += std::norm(c);
    pt_dev = std::max(pt_dev, std::abs(1.0 - s));
  }
  out.push_back(at_most("linear.norm_deviation", lin_dev, 1e-10));
  out.push_back(at_most("pt.norm_deviation", pt_dev, 1e-10));
}

}  // namespace

SuiteResult run_suite(const std::string& name) {
  SuiteResult r;
  r.suite = name;
  const bool all = name == "all";
  if (std::find(suite_names().begin(), suite_names().end(), name) == suite_names().end()) {
    throw ConfigError("unknown verification suite '" + name + "'");
  }
  if (all || name == "spectra") spectra_checks(r.checks);
  if (all || name == "coherence") coherence_checks(r.checks);
  if (all || name == "measure") measure_checks(r.checks);
  if (all || name == "oracle") oracle_checks(r.checks);
  if (all || name == "normalization") normalization_checks(r.checks);
  return r;
}

// ---------------------------------------------------------------------------
// Commands

namespace {

template <typename Fn>
void emit(const RunConfig& c, std::ostream& out, Fn&& write) {
  if (c.output.empty()) {
    write(out);
    return;
  }
  std::ofstream file(c.output, std::ios::binary);
  if (!file) throw ConfigError("cannot open output file '" + c.output + "'");
  write(file);
}

int cmd_spectrum(const RunConfig& c, std::ostream& out) {
  std::vector<std::array<double, 2>> rows;
  const evolution::Model model = model_of(c);
  for (int n = 0; n < c.levels; ++n) {
    rows.push_back(std::visit(
        [n](const auto& m) -> std::array<double, 2> {
          return {energy(m, n), schrodinger_eigenvalue(m, n)};
        },
        model));
  }
  emit(c, out, [&](std::ostream& o) {
    if (c.format == OutputFormat::Csv) {
      o << "n,E_n,epsilon_n\n";
      for (std::size_t n = 0; n < rows.size(); ++n) {
        o << n << ',' << format_number(rows[n][0]) << ',' << format_number(rows[n][1]) << '\n';
      }
    } else {
      json j;
      j["config"] = c.to_json();
      j["levels"] = json::array();
      for (std::size_t n = 0; n < rows.size(); ++n) {
        j["levels"].push_back({{"n", n}, {"E_n", rows[n][0]}, {"epsilon_n", rows[n][1]}});
      }
      o << j.dump(2) << '\n';
    }
  });
  return kExitOk;
}

int cmd_state(const RunConfig& c, std::ostream& out) {
  json j;
  j["config"] = c.to_json();
  std::vector<complex> coeffs;
  if (c.model == ModelKind::Linear) {
    coeffs = linear::coherent_coefficients({c.alpha, c.truncation});
  } else {
    const auto model = pt::PTModel::make(c.m, c.omega, branch_of(c));
    const auto st = pt::coherent_coefficients(model, c.alpha, c.truncation);
    j["lambda"] = model.lambda;
    j["S_alpha"] = st.s_alpha;
    j["N_alpha"] = st.n_alpha;
    coeffs = st.coefficients;
  }
  json rows = json::array();
  CompensatedSum cumulative;
  for (std::size_t n = 0; n < coeffs.size(); ++n) {
    cumulative.add(std::norm(coeffs[n]));
    rows.push_back({{"n", n},
                    {"re", coeffs[n].real()},
                    {"im", coeffs[n].imag()},
                    {"abs2", std::norm(coeffs[n])},
                    {"cumulative_norm", cumulative.value()}});
  }
  j["coefficients"] = std::move(rows);
  emit(c, out, [&](std::ostream& o) { o << j.dump(2) << '\n'; });
  return kExitOk;
}

int cmd_evolve(const RunConfig& c, std::ostream& out) {
  const linear::TimeSeries series = evolve_series(c);
  emit(c, out, [&](std::ostream& o) {
    if (c.format == OutputFormat::Csv) {
      write_csv(o, series);
    } else {
      json j;
      j["config"] = c.to_json();
      j["samples"] = series_to_json(series);
      o << j.dump(2) << '\n';
    }
  });
  return kExitOk;
}

int cmd_figures(const std::string& id, const RunConfig& c, std::ostream& out) {
  std::vector<FigureRecipe> recipes;
  if (id == "all") {
    recipes = figure_recipes();
  } else if (auto r = find_recipe(id)) {
    recipes.push_back(*r);
  } else {
    throw ConfigError("unknown figure '" + id + "' (expected fig1..fig11 or all)");
  }
  std::filesystem::create_directories(c.out_dir);
  for (const auto& r : recipes) {
    RunConfig rc;
    rc.model = ModelKind::Linear;
    rc.k = r.k;
    rc.alpha = r.alpha;
    rc.truncation = r.truncation;
    rc.t0 = r.t0;
    rc.t1 = r.t1;
    rc.dt = r.dt;
    const linear::TimeSeries series = evolve_series(rc);
    const auto base = std::filesystem::path(c.out_dir) / r.id;
    {
      std::ofstream csv(base.string() + ".csv", std::ios::binary);
      if (!csv) throw ConfigError("cannot write " + base.string() + ".csv");
      write_csv(csv, series);
    }
    json meta;
    meta["figure"] = r.id;
    meta["quantity"] = r.quantity;
    meta["columns"] = kCsvHeader;
    meta["rows"] = series.samples.size();
    meta["config"] = rc.to_json();
    std::ofstream js(base.string() + ".json", std::ios::binary);
    js << meta.dump(2) << '\n';
    out << base.string() << ".csv\n";
  }
  return kExitOk;
}

int cmd_verify(const std::string& suite, std::ostream& out) {
  const SuiteResult r = run_suite(suite);
  out << r.to_json().dump(2) << '\n';
  return r.passed() ? kExitOk : kExitVerificationFailed;
}

int cmd_measure_check(const RunConfig& c, std::ostream& out) {
  const auto model = pt::PTModel::make(c.m, c.omega);
  const auto kind =
      c.weight == "control" ? pt::WeightKind::NegativeControl : pt::WeightKind::Candidate;
  const auto report = pt::verify_measure_moments(model, c.n_max, c.tol, kind);

  // Empirical sign of the weight on a log-spaced probe grid.
  const pt::MeasureWeight w{model.lambda, kind};
  double w_min = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 60; ++i) w_min = std::min(w_min, w(std::pow(10.0, -3.0 + 0.1 * i)));

  json j;
  j["config"] = {{"m", c.m}, {"omega", c.omega}, {"n_max", c.n_max}, {"tol", c.tol},
                 {"weight", c.weight}};
  j["lambda"] = model.lambda;
  json rows = json::array();
  bool ok = true;
  for (const auto& m : report) {
    rows.push_back({{"n", m.n},
                    {"computed", m.computed},
                    {"target", m.target},
                    {"rel_error", m.rel_error},
                    {"cutoff", m.cutoff},
                    {"converged", m.converged},
                    {"passed", m.passed}});
    ok = ok && m.passed;
  }
  j["moments"] = std::move(rows);
  j["weight_min_on_probe_grid"] = w_min;
  j["passed"] = ok;
  emit(c, out, [&](std::ostream& o) { o << j.dump(2) << '\n'; });
  return ok ? kExitOk : kExitVerificationFailed;
}

int cmd_oracle(const RunConfig& c, std::ostream& out) {
  const std::size_t count = c.grid_count.value_or(8001);
  if (count % 2 == 0) throw ConfigError("oracle grid-count must be odd");
  if (c.levels > 20) throw ConfigError("oracle compares at most 20 levels");
  oracle::PotentialSpec spec =
      c.model == ModelKind::Linear
          ? oracle::linear_spec(c.m, c.k, count)
          : oracle::poschl_teller_spec(c.m, c.omega, count, branch_of(c));
  const evolution::Model model = model_of(c);
  std::vector<double> analytic;
  for (int n = 0; n < c.levels; ++n) {
    analytic.push_back(std::visit([n](const auto& m) { return energy(m, n); }, model));
  }
  const auto r = oracle::spectrum_compare(spec, analytic, static_cast<std::size_t>(c.levels));
  json j;
  j["config"] = c.to_json();
  j["coarse_count"] = r.coarse_count;
  j["fine_count"] = r.fine_count;
  json rows = json::array();
  for (std::size_t n = 0; n < r.n_count; ++n) {
    rows.push_back({{"n", n},
                    {"analytic_E", r.analytic[n]},
                    {"fd_E", r.fd_energies[n]},
                    {"rel_error_coarse", r.rel_error_coarse[n]},
                    {"rel_error_fine", r.rel_error_fine[n]},
                    {"order", r.order[n]}});
  }
  j["levels"] = std::move(rows);
  j["max_rel_error"] = r.max_rel_error;
  j["min_order"] = r.min_order;
  j["max_order"] = r.max_order;
  j["converged"] = r.converged;
  j["passed"] = r.passed;
  emit(c, out, [&](std::ostream& o) { o << j.dump(2) << '\n'; });
  return r.passed ? kExitOk : kExitVerificationFailed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"kgcoh: coherent states of a relativistic spinless particle"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  app.add_option("--config", config_path, "flat key=value config file (flags win)");

  KeyValues flags;
  auto add = [&flags](CLI::App* sub, const std::string& key, const std::string& help,
                      const std::string& alias = "") {
    const std::string name = alias.empty() ? "--" + key : alias + ",--" + key;
    sub->add_option_function<std::string>(
        name, [&flags, key](const std::string& v) { flags[key] = v; }, help);
  };
  auto add_model = [&](CLI::App* sub) {
    add(sub, "model", "linear | pt");
    add(sub, "m", "mass");
    add(sub, "k", "linear coupling");
    add(sub, "omega", "Poschl-Teller frequency");
    add(sub, "branch", "Poschl-Teller sign branch: plus | minus");
  };

  auto* spectrum = app.add_subcommand("spectrum", "relativistic and Schrodinger levels");
  add_model(spectrum);
  add(spectrum, "n", "number of levels");
  add(spectrum, "format", "csv | json");
  add(spectrum, "output", "output file (default stdout)", "-o");

  auto* state = app.add_subcommand("state", "coherent-state coefficients as JSON");
  add_model(state);
  add(state, "alpha", "eigenvalue a+bi");
  add(state, "truncation", "highest basis index N", "-N");
  add(state, "output", "output file (default stdout)", "-o");

  auto* evolve = app.add_subcommand("evolve", "uncertainty time series");
  add_model(evolve);
  add(evolve, "alpha", "eigenvalue a+bi");
  add(evolve, "truncation", "highest basis index N", "-N");
  add(evolve, "t0", "start time");
  add(evolve, "t1", "end time");
  add(evolve, "dt", "time step");
  add(evolve, "grid-count", "quadrature grid points");
  add(evolve, "method", "series | quadrature");
  add(evolve, "format", "csv | json");
  add(evolve, "output", "output file (default stdout)", "-o");

  auto* figures = app.add_subcommand("figures", "write figure CSVs (fig1..fig11 | all)");
  std::string figure_id;
  figures->add_option("figure", figure_id, "figure identifier")->required();
  add(figures, "out-dir", "output directory");

  auto* verify = app.add_subcommand("verify", "run a verification suite");
  std::string suite;
  verify->add_option("suite", suite, "spectra | coherence | measure | oracle | normalization | all")
      ->required();

  auto* measure = app.add_subcommand("measure-check", "resolution-of-unity moment check");
  add(measure, "m", "mass");
  add(measure, "omega", "Poschl-Teller frequency");
  add(measure, "n-max", "highest moment");
  add(measure, "tol", "relative tolerance");
  add(measure, "weight", "candidate | control");
  add(measure, "output", "output file (default stdout)", "-o");

  auto* fd = app.add_subcommand("oracle", "finite-difference spectrum vs analytic levels");
  add_model(fd);
  add(fd, "grid-count", "fine grid points (odd)");
  add(fd, "n", "number of levels");
  add(fd, "output", "output file (default stdout)", "-o");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    KeyValues merged;
    if (!config_path.empty()) merged = read_config_file(config_path);
    if (const char* dir = std::getenv(kOutputDirEnv); dir != nullptr && *dir != '\0') {
      merged["out-dir"] = dir;
    }
    for (const auto& [key, value] : flags) merged[key] = value;
    const RunConfig config = RunConfig::from_key_values(merged);

    if (spectrum->parsed()) return cmd_spectrum(config, out);
    if (state->parsed()) return cmd_state(config, out);
    if (evolve->parsed()) return cmd_evolve(config, out);
    if (figures->parsed()) return cmd_figures(figure_id, config, out);
    if (verify->parsed()) return cmd_verify(suite, out);
    if (measure->parsed()) return cmd_measure_check(config, out);
    if (fd->parsed()) return cmd_oracle(config, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitVerificationFailed;
  }
  return kExitUsage;
}

}  // namespace kgcoh::cli
