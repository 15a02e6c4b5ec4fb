#include "coimpact/cli.hpp"

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <functional>
#include <iomanip>
#include <json.hpp>
#include <memory>
#include <optional>
#include <sstream>

#include "coimpact/calibration.hpp"
#include "coimpact/core_domain.hpp"
#include "coimpact/csv_io.hpp"
#include "coimpact/errors.hpp"
#include "coimpact/estimators.hpp"
#include "coimpact/gaussian_analytic.hpp"
#include "coimpact/numeric.hpp"
#include "coimpact/sign_sim.hpp"
#include "coimpact/specfun.hpp"

namespace coimpact {

namespace {

using json = nlohmann::ordered_json;

constexpr const char* kSimulateKeys = R"(config keys (JSON object, unknown keys rejected):
  p_n              object mapping N (as a string) to probability, summing to 1
  gamma_eps        hidden-factor sign coupling in [0, 1]
  volume_scheme    "half-normal" | "histogram" | "dirichlet" | "stable"
  sigma            half-normal scale (constant scaling) or c in sigma_N = c/N
  sigma_scaling    "constant" | "inverse-n"
  histogram        {"edges": [...], "masses": [...]} for the histogram scheme
  dirichlet_total  total volume fraction for the dirichlet scheme
  stable_alpha     stability index in (0, 2] for the stable scheme
  stable_scale     scale for the stable scheme
  y_ratio          impact prefactor Y > 0
  noise_sd         sd of the additive Gaussian return noise
  seed             unsigned 64-bit seed
  days             number of panels to generate)";

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::array<char, 32> buf{};
  std::strftime(buf.data(), buf.size(), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf.data();
}

struct Output {
  std::string path;
  json config = json::object();
  std::vector<std::string> inputs;
  std::optional<std::uint64_t> seed;
};

void emit(const std::string& command, const Output& o, const std::string& content, std::ostream& out) {
  if (o.path.empty()) {
    out << content;
    return;
  }
  {
    std::ofstream file(o.path, std::ios::binary);
    if (!file) throw ConfigError("cannot write " + o.path);
    file << content;
  }
  json manifest;
  manifest["command"] = command;
  manifest["config"] = o.config;
  json digests = json::object();
  for (const auto& in : o.inputs) digests[in] = sha256_file(in);
  manifest["inputs"] = digests;
  manifest["seed"] = o.seed ? json(*o.seed) : json(nullptr);
  manifest["version"] = std::string(kVersion);
  manifest["timestamp"] = utc_timestamp();
  std::ofstream file(o.path + ".manifest.json", std::ios::binary);
  if (!file) throw ConfigError("cannot write " + o.path + ".manifest.json");
  file << manifest.dump(2) << '\n';
}

std::vector<double> log_grid(double lo, double hi, int points) {
  if (!(lo > 0.0 && hi >= lo)) throw ConfigError("phi range must satisfy 0 < phi-min <= phi-max");
  if (points < 1) throw ConfigError("--points must be at least 1");
  std::vector<double> grid;
  for (int i = 0; i < points; ++i) {
    if (points == 1) {
      grid.push_back(lo);
      break;
    }
    const double t = static_cast<double>(i) / (points - 1);
    grid.push_back(i == points - 1 ? hi : std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo))));
  }
  return grid;
}

std::vector<double> parse_grid(const std::string& text, const char* what) {
  std::vector<double> grid;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
    if (parts.size() != 3) throw ConfigError(std::string(what) + ": expected start:stop:step");
    const double start = parse_double(parts[0], what);
    const double stop = parse_double(parts[1], what);
    const double step = parse_double(parts[2], what);
    if (!(step > 0.0) || stop < start) throw ConfigError(std::string(what) + ": need step > 0 and stop >= start");
    const auto count = static_cast<long long>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (long long i = 0; i < count; ++i) grid.push_back(std::round((start + step * i) * 1e9) / 1e9);
  } else {
    std::stringstream ss(text);
    for (std::string part; std::getline(ss, part, ',');) grid.push_back(parse_double(part, what));
  }
  if (grid.empty()) throw ConfigError(std::string(what) + ": empty grid");
  return grid;
}

std::string key(int n) { return std::to_string(n); }

json curve_json(const ImpactCurve& curve) {
  json bins = json::array();
  for (const auto& b : curve.bins)
    bins.push_back({{"phi_center", b.phi_center}, {"mean_impact", b.mean_impact}, {"std_error", b.std_error},
                    {"count", b.count}});
  return bins;
}

std::vector<DayPanel> load_panels(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  return read_panel_csv(in);
}

// ---- ingest -----------------------------------------------------------------

struct IngestOptions {
  std::string input;
  std::string out;
  std::string report;
  std::string symbols;
  std::string latest_end = "16:01:00";
  long long min_duration = 120;
  double max_participation = 0.30;
};

int cmd_ingest(const IngestOptions& o, std::ostream& out, std::ostream& err) {
  FilterConfig config;
  if (!o.symbols.empty()) {
    std::set<std::string> names;
    std::stringstream ss(o.symbols);
    for (std::string s; std::getline(ss, s, ',');)
      if (!s.empty()) names.insert(s);
    config.symbol_whitelist = names;
  }
  config.latest_end = parse_clock(o.latest_end);
  config.min_duration = std::chrono::seconds(o.min_duration);
  config.max_participation = o.max_participation;
  config.validate();

  std::ifstream in(o.input, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + o.input);
  const auto records = read_metaorder_csv(in);
  if (records.empty()) err << "warning: " << o.input << " has no metaorder records\n";
  const FilterResult filtered = apply_filters(records, config);
  const auto panels = build_panels(filtered.kept);

  std::ostringstream csv;
  write_panel_csv(csv, panels);

  const auto& r = filtered.report;
  json report = {{"input", r.input},         {"kept", r.kept},         {"filter_1", r.filter_1},
                 {"filter_2", r.filter_2},   {"filter_3", r.filter_3}, {"filter_4", r.filter_4},
                 {"filter_4_unchecked", r.filter_4_unchecked},          {"panels", panels.size()}};

  Output output;
  output.path = o.out;
  output.inputs = {o.input};
  output.config = {{"symbols", o.symbols},
                   {"latest_end", o.latest_end},
                   {"min_duration_seconds", o.min_duration},
                   {"max_participation", o.max_participation}};
  emit("ingest", output, csv.str(), out);
  if (o.report.empty()) {
    err << report.dump() << '\n';
  } else {
    std::ofstream file(o.report, std::ios::binary);
    if (!file) throw ConfigError("cannot write " + o.report);
    file << report.dump(2) << '\n';
  }
  return kExitOk;
}

// ---- simulate ---------------------------------------------------------------

struct SimulateOptions {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> days;
};

template <class T>
T get_as(const json& doc, const char* name) {
  try {
    return doc.at(name).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key ") + name + ": " + e.what());
  }
}

struct ParsedSimConfig {
  SimConfig sim;
  std::size_t days = 0;
};

ParsedSimConfig parse_sim_config(const json& doc) {
  static const std::set<std::string> allowed = {"p_n",          "gamma_eps",     "volume_scheme",   "sigma",
                                                "sigma_scaling", "histogram",    "dirichlet_total", "stable_alpha",
                                                "stable_scale", "y_ratio",       "noise_sd",        "seed",
                                                "days"};
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [k, v] : doc.items())
    if (!allowed.contains(k)) throw ConfigError("unknown config key: " + k);

  ParsedSimConfig parsed;
  SimConfig& c = parsed.sim;
  if (!doc.contains("p_n") || !doc["p_n"].is_object()) throw ConfigError("config key p_n: object required");
  for (const auto& [k, v] : doc["p_n"].items()) {
    const long long n = parse_integer(k, "p_n key");
    if (n < 1 || n > 1000000) throw ConfigError("config key p_n: N out of range: " + k);
    if (!v.is_number()) throw ConfigError("config key p_n: probability must be a number");
    c.p_n[static_cast<int>(n)] = v.get<double>();
  }
  if (doc.contains("gamma_eps")) c.sign_model.gamma_eps = get_as<double>(doc, "gamma_eps");
  if (doc.contains("y_ratio")) c.y_ratio = get_as<double>(doc, "y_ratio");
  if (doc.contains("noise_sd")) c.noise_sd = get_as<double>(doc, "noise_sd");
  if (doc.contains("seed")) c.seed = get_as<std::uint64_t>(doc, "seed");
  parsed.days = doc.contains("days") ? get_as<std::size_t>(doc, "days") : 0;

  const std::string scheme = doc.contains("volume_scheme") ? get_as<std::string>(doc, "volume_scheme") : "half-normal";
  if (scheme == "half-normal") {
    SigmaScaling scaling;
    const std::string kind = doc.contains("sigma_scaling") ? get_as<std::string>(doc, "sigma_scaling") : "constant";
    if (kind == "constant")
      scaling.kind = SigmaScaling::Kind::kConstant;
    else if (kind == "inverse-n")
      scaling.kind = SigmaScaling::Kind::kInverseN;
    else
      throw ConfigError("config key sigma_scaling: expected constant or inverse-n, got " + kind);
    scaling.value = get_as<double>(doc, "sigma");
    c.volume_scheme = HalfNormalVolumes{scaling};
  } else if (scheme == "histogram") {
    const json& h = doc.at("histogram");
    c.volume_scheme = HistogramVolumes{get_as<std::vector<double>>(h, "edges"), get_as<std::vector<double>>(h, "masses")};
  } else if (scheme == "dirichlet") {
    c.volume_scheme = DirichletVolumes{doc.contains("dirichlet_total") ? get_as<double>(doc, "dirichlet_total") : 1.0};
  } else if (scheme == "stable") {
    c.volume_scheme = StableVolumes{get_as<double>(doc, "stable_alpha"), get_as<double>(doc, "stable_scale")};
  } else {
    throw ConfigError("config key volume_scheme: unknown scheme " + scheme);
  }
  return parsed;
}

int cmd_simulate(const SimulateOptions& o, std::ostream& out, std::ostream&) {
  json doc;
  try {
    doc = json::parse(read_file(o.config));
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + o.config + ": " + e.what());
  }
  ParsedSimConfig parsed = parse_sim_config(doc);
  if (o.seed) parsed.sim.seed = *o.seed;
  if (o.days) parsed.days = *o.days;
  if (parsed.days < 1) throw ConfigError("days must be at least 1");
  parsed.sim.validate();

  const auto panels = generate_synthetic_market(parsed.sim, parsed.days);
  std::ostringstream csv;
  write_panel_csv(csv, panels);

  Output output;
  output.path = o.out;
  output.inputs = {o.config};
  output.config = doc;
  output.config["seed"] = parsed.sim.seed;
  output.config["days"] = parsed.days;
  output.seed = parsed.sim.seed;
  emit("simulate", output, csv.str(), out);
  return kExitOk;
}

// ---- impact-mc --------------------------------------------------------------

struct ImpactMcOptions {
  int n = 0;
  double gamma = 0.0;
  double sigma = 0.0;
  std::size_t samples = kDefaultMcSamples;
  std::uint64_t seed = 0;
  double phi_min = 1e-5;
  double phi_max = 0.1;
  int points = 20;
  std::string out;
};

int cmd_impact_mc(const ImpactMcOptions& o, std::ostream& out, std::ostream&) {
  const SignModel model{o.gamma};
  model.validate();
  const VolumeScheme volumes = HalfNormalVolumes{{SigmaScaling::Kind::kConstant, o.sigma}};
  validate_volume_scheme(volumes);
  const RngStream stream(o.seed, 0);
  std::ostringstream csv;
  csv << "phi,impact,stderr\n";
  for (double phi : log_grid(o.phi_min, o.phi_max, o.points)) {
    const McEstimate mc = mc_impact(phi, o.n, model, volumes, o.samples, stream);
    csv << format_double(phi) << ',' << format_double(mc.mean) << ',' << format_double(mc.std_error) << '\n';
  }
  Output output;
  output.path = o.out;
  output.config = {{"n", o.n},           {"gamma", o.gamma},     {"sigma", o.sigma},
                   {"samples", o.samples}, {"phi_min", o.phi_min}, {"phi_max", o.phi_max},
                   {"points", o.points}};
  output.seed = o.seed;
  emit("impact-mc", output, csv.str(), out);
  return kExitOk;
}

// ---- curve ------------------------------------------------------------------

struct CurveOptions {
  std::string model;
  int n = 2;
  double sigma = 0.0;
  double cphi = 0.0;
  double alpha = 1.5;
  double c = 1.0;
  double phi_min = 1e-5;
  double phi_max = 0.1;
  int points = 50;
  std::string out;
};

int cmd_curve(const CurveOptions& o, std::ostream& out, std::ostream&) {
  std::function<double(double)> f;
  if (o.model == "iid-gaussian") {
    if (!(o.sigma > 0.0)) throw ConfigError("--sigma must be positive");
    f = [&](double phi) { return iid_gaussian_impact(phi, o.n, o.sigma); };
  } else if (o.model == "correlated-gaussian") {
    const GaussianPanelModel model{o.n, o.sigma * o.sigma, o.cphi};
    model.validate();
    f = [model](double phi) { return correlated_gaussian_impact(phi, model); };
  } else if (o.model == "levy-asymptote") {
    const double slope = levy_linear_slope(o.n, o.c, o.alpha);
    f = [slope](double phi) { return std::min(slope * phi, std::sqrt(phi)); };
  } else {
    throw ConfigError("--model must be iid-gaussian, correlated-gaussian or levy-asymptote");
  }
  std::ostringstream csv;
  csv << "phi,impact\n";
  for (double phi : log_grid(o.phi_min, o.phi_max, o.points))
    csv << format_double(phi) << ',' << format_double(f(phi)) << '\n';
  Output output;
  output.path = o.out;
  output.config = {{"model", o.model},     {"n", o.n},     {"sigma", o.sigma},
                   {"cphi", o.cphi},       {"alpha", o.alpha}, {"c", o.c},
                   {"phi_min", o.phi_min}, {"phi_max", o.phi_max}, {"points", o.points}};
  emit("curve", output, csv.str(), out);
  return kExitOk;
}

// ---- analyze ----------------------------------------------------------------

struct AnalyzeOptions {
  std::string input;
  std::string out;
  std::size_t bins = 20;
  std::size_t min_count = kDefaultMinCount;
  std::size_t min_panels = kDefaultMinPanels;
};

json try_curve(std::span<const SignedSample> samples, std::size_t bins, std::size_t min_count) {
  try {
    return {{"bins", curve_json(binned_curve(samples, bins, min_count))}};
  } catch (const InsufficientDataError& e) {
    return {{"error", e.what()}};
  }
}

int cmd_analyze(const AnalyzeOptions& o, std::ostream& out, std::ostream& err) {
  const auto panels = load_panels(o.input);
  if (panels.empty()) err << "warning: " << o.input << " has no panels\n";
  json report;

  const auto corr = sign_correlation_by_n(panels, o.min_panels);
  json c = json::object();
  for (const auto& [n, e] : corr.values)
    c[key(n)] = {{"panels", e.panels}, {"mean_sign", e.mean_sign}, {"mean_rho", e.mean_rho},
                 {"c_eps", e.c_eps},   {"std_error", e.std_error}};
  json failures = json::object();
  for (const auto& [n, msg] : corr.failures) failures[key(n)] = msg;
  report["sign_correlation_by_n"] = c;
  report["sign_correlation_failures"] = failures;

  json s = json::object();
  for (const auto& [n, e] : sigma_by_n(panels, o.min_panels))
    s[key(n)] = {{"panels", e.panels}, {"sigma", e.sigma}, {"phi_star", e.phi_star}};
  report["sigma_by_n"] = s;

  json h = json::object();
  for (const auto& [n, e] : herfindahl_by_n(panels, o.min_panels))
    h[key(n)] = {{"panels", e.count}, {"mean", e.mean}, {"std_error", e.std_error}};
  report["herfindahl_by_n"] = h;

  json hist = json::object();
  for (const auto& [n, count] : n_histogram(panels))
    hist[key(n)] = {{"panels", count}, {"p", static_cast<double>(count) / static_cast<double>(panels.size())}};
  report["p_n"] = hist;

  std::vector<SignedSample> global, own;
  for (const auto& p : panels) {
    global.push_back({p.net_flow, p.rescaled_return});
    for (double phi : p.phis) own.push_back({phi, p.rescaled_return});
  }
  report["impact_curve"] = {{"global", try_curve(global, o.bins, o.min_count)},
                            {"per_metaorder", try_curve(own, o.bins, o.min_count)}};

  Output output;
  output.path = o.out;
  output.inputs = {o.input};
  output.config = {{"bins", o.bins}, {"min_count", o.min_count}, {"min_panels", o.min_panels}};
  emit("analyze", output, report.dump(2) + "\n", out);
  return kExitOk;
}

// ---- calibrate --------------------------------------------------------------

struct CalibrateOptions {
  std::string input;
  std::string out;
  std::string alpha_grid = "0.1:2.0:0.1";
  std::string delta_grid = "0.1:1.0:0.05";
  double rho_threshold = 0.05;
  std::size_t samples = kDefaultMcSamples;
  std::uint64_t seed = 0;
  std::size_t bins = 10;
  std::size_t min_count = kDefaultMinCount;
  std::size_t min_panels = kDefaultMinPanels;
  int n_min = 2;
  int n_max = 10;
};

json gamma_json(const GammaEstimate& g) {
  return {{"panels", g.panels}, {"mean_rho", g.mean_rho}, {"rho_std_error", g.rho_std_error},
          {"gamma", g.gamma},   {"std_error", g.std_error}, {"clamped", g.clamped}};
}

int cmd_calibrate(const CalibrateOptions& o, std::ostream& out, std::ostream& err) {
  const auto alphas = parse_grid(o.alpha_grid, "--alpha-grid");
  const auto deltas = parse_grid(o.delta_grid, "--delta-grid");
  const auto panels = load_panels(o.input);
  json report;

  const GridFitResult grid = fit_alpha_delta(panels, alphas, deltas);
  json points = json::array();
  for (const auto& g : grid.grid)
    points.push_back({{"alpha", g.alpha}, {"delta", g.delta}, {"y_fit", g.y_fit}, {"r_squared", g.r_squared}});
  report["grid_fit"] = {{"alpha_grid", alphas},     {"delta_grid", deltas},     {"grid", points},
                        {"alpha_star", grid.alpha_star}, {"delta_star", grid.delta_star}, {"r2_max", grid.r2_max}};

  const YRatioFit y = fit_y_ratio(panels, grid.alpha_star, grid.delta_star);
  report["y_ratio"] = {{"alpha", grid.alpha_star}, {"delta", grid.delta_star}, {"y_ratio", y.y_ratio},
                       {"std_error", y.std_error}, {"panels", y.panels}};

  const GammaFit gamma = fit_gamma_eps(panels, o.min_panels);
  json by_n = json::object();
  for (const auto& [n, g] : gamma.by_n) by_n[key(n)] = gamma_json(g);
  report["gamma_by_n"] = {{"by_n", by_n},
                          {"plateau_min_n", gamma.plateau_min_n},
                          {"plateau", gamma.plateau ? gamma_json(*gamma.plateau) : json(nullptr)}};

  const auto gmm = fit_gmm_gaussian(panels, o.min_panels);
  json g = json::object();
  for (const auto& [n, f] : gmm.values)
    g[key(n)] = {{"panels", f.panels},           {"a_n", f.a_n},     {"b_n", f.b_n},
                 {"sigma2", f.second_moment},    {"cross_moment", f.cross_moment},
                 {"c_phi", f.c_phi},             {"c_phi_std_error", f.c_phi_std_error}};
  json gmm_failures = json::object();
  for (const auto& [n, msg] : gmm.failures) gmm_failures[key(n)] = msg;
  report["gmm_by_n"] = {{"by_n", g}, {"failures", gmm_failures}};

  std::vector<SignedSample> own;
  for (const auto& p : panels)
    for (double phi : p.phis) own.push_back({phi, p.rescaled_return});
  try {
    const ShiftedSqrtFit fit = fit_shifted_sqrt(binned_curve(own, o.bins, o.min_count));
    report["shifted_sqrt"] = {{"a", fit.a}, {"b", fit.b}, {"weighted_sse", fit.weighted_sse},
                              {"unit_weights", fit.unit_weights}};
  } catch (const InsufficientDataError& e) {
    report["shifted_sqrt"] = {{"error", e.what()}};
    err << "warning: shifted_sqrt: " << e.what() << '\n';
  }

  ComparisonConfig cc;
  cc.rho_threshold = o.rho_threshold;
  cc.n_min = o.n_min;
  cc.n_max = o.n_max;
  cc.n_bins = o.bins;
  cc.min_count = o.min_count;
  cc.sim_samples = o.samples;
  try {
    json subs = json::array();
    for (const auto& sub : model_vs_empirical(panels, cc, RngStream(o.seed, 0))) {
      json bins = json::array();
      for (const auto& b : sub.bins)
        bins.push_back({{"phi_center", b.phi_center}, {"count", b.count},   {"empirical", b.empirical},
                        {"empirical_se", b.empirical_se}, {"model", b.model}, {"model_se", b.model_se},
                        {"z", b.z}});
      json p_n = json::object(), gam = json::object(), sig = json::object();
      for (const auto& [n, v] : sub.p_n) p_n[key(n)] = v;
      for (const auto& [n, v] : sub.gamma) gam[key(n)] = v;
      for (const auto& [n, v] : sub.sigma) sig[key(n)] = v;
      subs.push_back({{"label", sub.label}, {"panels", sub.panels}, {"y_ratio", sub.y_ratio.y_ratio},
                      {"y_std_error", sub.y_ratio.std_error}, {"p_n", p_n}, {"gamma", gam}, {"sigma", sig},
                      {"bins", bins}});
    }
    report["model_vs_empirical"] = subs;
  } catch (const ValidationError& e) {
    report["model_vs_empirical"] = {{"error", e.what()}};
    err << "warning: model_vs_empirical: " << e.what() << '\n';
  }
  report["metadata"] = {{"grid", "alpha and delta grids as listed; defaults 0.1:2.0:0.1 and 0.1:1.0:0.05"},
                        {"p_n_weighting", "metaorder-weighted"},
                        {"sign_correlation_weighting", "panel-weighted"}};

  Output output;
  output.path = o.out;
  output.inputs = {o.input};
  output.config = {{"alpha_grid", o.alpha_grid}, {"delta_grid", o.delta_grid}, {"rho_threshold", o.rho_threshold},
                   {"samples", o.samples},       {"bins", o.bins},             {"min_count", o.min_count},
                   {"min_panels", o.min_panels}, {"n_min", o.n_min},           {"n_max", o.n_max}};
  output.seed = o.seed;
  emit("calibrate", output, report.dump(2) + "\n", out);
  return kExitOk;
}

// ---- specfun-check ----------------------------------------------------------

struct SpecfunOptions {
  std::string out;
  double threshold = 1e-10;
};

struct SpecfunCase {
  const char* function;
  double a, b, z;
  double reference;
};

// References evaluated independently at 30 significant digits.
constexpr std::array<SpecfunCase, 17> kSpecfunCases = {{
    {"gamma", 0.25, 0, 0, 3.6256099082219083119},
    {"gamma", 0.5, 0, 0, 1.7724538509055160273},
    {"gamma", 1.25, 0, 0, 0.90640247705547707798},
    {"gamma", 3.7, 0, 0, 4.1706517837966031654},
    {"gamma", 10.0, 0, 0, 362880.0},
    {"gamma", 55.5, 0, 0, 1.7080962807994106384e+72},
    {"gamma", 150.25, 0, 0, 1.3321507761951634843e+261},
    {"kummer_1f1_scaled", 1.25, 1.5, 0.0, 1.0},
    {"kummer_1f1_scaled", 1.25, 1.5, 0.5, 0.92606072706004751589},
    {"kummer_1f1_scaled", 1.25, 1.5, 10.0, 0.54619748981782940033},
    {"kummer_1f1_scaled", 1.25, 1.5, 29.5, 0.4186314984433978325},
    {"kummer_1f1_scaled", 1.25, 1.5, 31.0, 0.41351672741070953837},
    {"kummer_1f1_scaled", 1.25, 1.5, 100.0, 0.30899471246548342625},
    {"kummer_1f1_scaled", 1.25, 1.5, 1e4, 0.097773495627876707136},
    {"kummer_1f1_scaled", 0.5, 2.5, 45.0, 0.00037904620919967106372},
    {"kummer_1f1_scaled", -2.0, 0.5, 7.0, 0.03495547534625645464},
    {"kummer_1f1_scaled", 2.0, 3.0, 60.0, 0.032777777777777777778},
}};

int cmd_specfun_check(const SpecfunOptions& o, std::ostream& out, std::ostream& err) {
  std::ostringstream csv;
  csv << "function,input,value,reference,relative_error,pass\n";
  bool all_pass = true;
  for (const auto& c : kSpecfunCases) {
    const bool is_gamma = std::string_view(c.function) == "gamma";
    const double value = is_gamma ? gamma_fn(c.a) : kummer_1f1_scaled(c.a, c.b, c.z);
    const std::string input =
        is_gamma ? format_double(c.a) : format_double(c.a) + ";" + format_double(c.b) + ";" + format_double(c.z);
    const double rel = std::fabs(value - c.reference) / std::fabs(c.reference);
    const bool pass = rel <= o.threshold;
    all_pass = all_pass && pass;
    csv << c.function << ',' << input << ',' << format_double(value) << ',' << format_double(c.reference) << ','
        << format_double(rel) << ',' << (pass ? "true" : "false") << '\n';
  }
  Output output;
  output.path = o.out;
  output.config = {{"threshold", o.threshold}};
  emit("specfun-check", output, csv.str(), out);
  if (!all_pass) {
    err << "specfun-check: relative error above " << format_double(o.threshold) << '\n';
    return kExitNumerical;
  }
  return kExitOk;
}

}  // namespace

std::string sha256_file(const std::string& path) {
  const std::string bytes = read_file(path);
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &length, EVP_sha256(), nullptr) != 1)
    throw ConfigError("sha256 failed for " + path);
  std::ostringstream hex;
  for (unsigned int i = 0; i < length; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return hex.str();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Co-impact modelling toolkit: metaorder panels, impact curves, simulation and calibration",
               "coimpact"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1, 1);

  IngestOptions ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Filter metaorder CSV and aggregate into day panels");
  c_ingest->add_option("--input", ingest.input, "Metaorder CSV")->required();
  c_ingest->add_option("--out", ingest.out, "Panel CSV path (default: standard output)");
  c_ingest->add_option("--report", ingest.report, "Rejection report JSON path (default: standard error)");
  c_ingest->add_option("--symbols", ingest.symbols, "Comma-separated symbol whitelist");
  c_ingest->add_option("--latest-end", ingest.latest_end, "Reject metaorders ending at or after HH:MM:SS")
      ->capture_default_str();
  c_ingest->add_option("--min-duration", ingest.min_duration, "Minimum duration in seconds (exclusive)")
      ->capture_default_str();
  c_ingest->add_option("--max-participation", ingest.max_participation, "Maximum participation rate (exclusive)")
      ->capture_default_str();

  SimulateOptions simulate;
  auto* c_sim = app.add_subcommand("simulate", "Generate synthetic day panels");
  c_sim->add_option("--config", simulate.config, "JSON configuration")->required();
  c_sim->add_option("--out", simulate.out, "Panel CSV path (default: standard output)");
  c_sim->add_option("--seed", simulate.seed, "Override the config seed");
  c_sim->add_option("--days", simulate.days, "Override the config day count");
  c_sim->footer(kSimulateKeys);

  ImpactMcOptions mc;
  auto* c_mc = app.add_subcommand("impact-mc", "Monte Carlo impact curve I_N(phi)/Y with half-normal volumes");
  c_mc->add_option("--n", mc.n, "Number of co-executed metaorders")->required();
  c_mc->add_option("--gamma", mc.gamma, "Hidden-factor sign coupling")->capture_default_str();
  c_mc->add_option("--sigma", mc.sigma, "Volume fraction scale")->required();
  c_mc->add_option("--samples", mc.samples, "Samples per point")->capture_default_str();
  c_mc->add_option("--seed", mc.seed, "Random seed")->capture_default_str();
  c_mc->add_option("--phi-min", mc.phi_min)->capture_default_str();
  c_mc->add_option("--phi-max", mc.phi_max)->capture_default_str();
  c_mc->add_option("--points", mc.points, "Log-spaced grid points")->capture_default_str();
  c_mc->add_option("--out", mc.out, "CSV path (default: standard output)");

  CurveOptions curve;
  auto* c_curve = app.add_subcommand("curve", "Analytic impact curves");
  c_curve->add_option("--model", curve.model, "iid-gaussian | correlated-gaussian | levy-asymptote")->required();
  c_curve->add_option("--n", curve.n, "Number of co-executed metaorders")->capture_default_str();
  c_curve->add_option("--sigma", curve.sigma, "Volume fraction sd")->capture_default_str();
  c_curve->add_option("--cphi", curve.cphi, "Volume correlation (correlated-gaussian)")->capture_default_str();
  c_curve->add_option("--alpha", curve.alpha, "Stable index (levy-asymptote)")->capture_default_str();
  c_curve->add_option("--c", curve.c, "Stable scale c in exp(-c|t|^alpha) (levy-asymptote)")->capture_default_str();
  c_curve->add_option("--phi-min", curve.phi_min)->capture_default_str();
  c_curve->add_option("--phi-max", curve.phi_max)->capture_default_str();
  c_curve->add_option("--points", curve.points, "Log-spaced grid points")->capture_default_str();
  c_curve->add_option("--out", curve.out, "CSV path (default: standard output)");

  AnalyzeOptions analyze;
  auto* c_an = app.add_subcommand("analyze", "Panel statistics report");
  c_an->add_option("--input", analyze.input, "Panel CSV")->required();
  c_an->add_option("--out", analyze.out, "JSON path (default: standard output)");
  c_an->add_option("--bins", analyze.bins, "Impact curve bins")->capture_default_str();
  c_an->add_option("--min-count", analyze.min_count, "Minimum bin population")->capture_default_str();
  c_an->add_option("--min-panels", analyze.min_panels, "Minimum panels per N")->capture_default_str();

  CalibrateOptions cal;
  auto* c_cal = app.add_subcommand("calibrate", "Fit model parameters to panels");
  c_cal->add_option("--input", cal.input, "Panel CSV")->required();
  c_cal->add_option("--out", cal.out, "JSON path (default: standard output)");
  c_cal->add_option("--alpha-grid", cal.alpha_grid, "start:stop:step or comma list")->capture_default_str();
  c_cal->add_option("--delta-grid", cal.delta_grid, "start:stop:step or comma list")->capture_default_str();
  c_cal->add_option("--rho-threshold", cal.rho_threshold, "Sub-sample split on realized sign correlation")
      ->capture_default_str();
  c_cal->add_option("--samples", cal.samples, "Monte Carlo samples per model point")->capture_default_str();
  c_cal->add_option("--seed", cal.seed, "Random seed")->capture_default_str();
  c_cal->add_option("--bins", cal.bins, "Impact curve bins")->capture_default_str();
  c_cal->add_option("--min-count", cal.min_count, "Minimum bin population")->capture_default_str();
  c_cal->add_option("--min-panels", cal.min_panels, "Minimum panels per N")->capture_default_str();
  c_cal->add_option("--n-min", cal.n_min, "Smallest N in the model comparison")->capture_default_str();
  c_cal->add_option("--n-max", cal.n_max, "Largest N in the model comparison")->capture_default_str();

  SpecfunOptions sf;
  auto* c_sf = app.add_subcommand("specfun-check", "Special function self-test table");
  c_sf->add_option("--out", sf.out, "CSV path (default: standard output)");
  c_sf->add_option("--threshold", sf.threshold, "Maximum relative error")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    CLI::App* failed = &app;
    for (auto* sub : app.get_subcommands()) failed = sub;
    err << failed->help();
    return kExitValidation;
  }

  try {
    if (*c_ingest) return cmd_ingest(ingest, out, err);
    if (*c_sim) return cmd_simulate(simulate, out, err);
    if (*c_mc) return cmd_impact_mc(mc, out, err);
    if (*c_curve) return cmd_curve(curve, out, err);
    if (*c_an) return cmd_analyze(analyze, out, err);
    if (*c_cal) return cmd_calibrate(cal, out, err);
    if (*c_sf) return cmd_specfun_check(sf, out, err);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitValidation;
}

}  // namespace coimpact
