#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "wgapdc/errors.hpp"
#include "wgapdc/grid.hpp"
#include "wgapdc/io.hpp"
#include "wgapdc/jsa.hpp"
#include "wgapdc/material.hpp"
#include "wgapdc/pump.hpp"

namespace wgapdc {

struct FitTarget {
  double signal_nm = 1549.8;
  double idler_nm = 1549.8;
  double pump_nm = 774.9;
  friend bool operator==(const FitTarget&, const FitTarget&) = default;
};

struct KWindowConfig {
  double center = 0.0;
  double width = kPi / 2;
  double c0 = 0.0, c1 = 0.0, c2 = 0.0;
  friend bool operator==(const KWindowConfig&, const KWindowConfig&) = default;
};

struct FilterConfig {
  double signal_min_nm = 0.0, signal_max_nm = 0.0;
  double idler_min_nm = 0.0, idler_max_nm = 0.0;
  friend bool operator==(const FilterConfig&, const FilterConfig&) = default;
};

struct PumpChannelConfig {
  int channel = 0;
  double re = 1.0;
  double im = 0.0;
  friend bool operator==(const PumpChannelConfig&, const PumpChannelConfig&) = default;
};

inline const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names{"fig2_contours",   "fig3_pump_shaping", "fig4_phase_engineering",
                                              "fig5_filtered",   "fig7_experiment",   "fig8_marginals",
                                              "fig9_pm_curve",   "fig10_near_degenerate", "custom"};
  return names;
}

inline bool is_scenario_name(const std::string& s) {
  for (const auto& n : scenario_names())
    if (n == s) return true;
  return false;
}

/// Everything a run needs. Defaults are the experimental-comparison parameter set.
struct RunConfig {
  std::string scenario = "custom";

  // material
  std::array<double, 10> sellmeier{5.35583, 0.100473, 0.20692, 100.0, 11.34927, 1.5334e-2,
                                   4.629e-7, 3.862e-8, -0.89e-8, 2.657e-5};
  double temperature_c = 185.0;
  std::optional<double> qpm_period_m = 1.8353521949564924e-5;
  std::optional<FitTarget> fit_qpm;
  double coupling_scale = 6.5e-2;
  double damping_m = 4.9e-6;
  std::optional<double> coupling_constant_per_m;
  double index_offset = 0.0;

  // geometry
  double length_m = 0.04;
  int channel_count = 41;

  // pump
  double pump_wavelength_nm = 774.9;
  double pump_fwhm_nm = 0.5 / kTwoPi;
  std::vector<PumpChannelConfig> pump_channels{{0, 1.0, 0.0}};
  std::optional<KWindowConfig> pump_k_window;
  std::vector<double> sweep_pump_nm{774.9, 774.5, 774.2, 773.9};

  // grid
  double grid_lambda_min_nm = 1300.0;
  double grid_lambda_max_nm = 1800.0;
  /// 0 selects a spacing of one pump sigma_omega.
  std::size_t grid_points = 0;
  double grid_band_sigmas = 6.0;

  std::optional<FilterConfig> filter;
  std::optional<double> smoothing_nm;

  // outputs
  std::string out_dir = "out";
  bool csv = true;
  bool image = true;
  bool tensor = false;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;

  MaterialModel material() const {
    MaterialModel m;
    m.sellmeier.a = {sellmeier[0], sellmeier[1], sellmeier[2], sellmeier[3], sellmeier[4], sellmeier[5]};
    m.sellmeier.b = {sellmeier[6], sellmeier[7], sellmeier[8], sellmeier[9]};
    m.temperature_c = temperature_c;
    m.coupling_scale = coupling_scale;
    m.damping = damping_m;
    m.constant_coupling = coupling_constant_per_m;
    m.index_offset = index_offset;
    if (fit_qpm) {
      m.qpm_period = 1.0;
      m.qpm_period = fit_qpm_period({fit_qpm->signal_nm * kNanometre, fit_qpm->idler_nm * kNanometre},
                                    fit_qpm->pump_nm * kNanometre, m);
    } else if (qpm_period_m) {
      m.qpm_period = *qpm_period_m;
    } else {
      throw ConfigError("either qpm_period_m or fit_qpm must be given");
    }
    m.validate();
    return m;
  }

  ArrayGeometry geometry() const { return {length_m, channel_count, temperature_c}; }

  PumpSpec pump() const {
    PumpSpec p;
    p.central_wavelength = pump_wavelength_nm * kNanometre;
    p.spectral_fwhm = pump_fwhm_nm * kNanometre;
    if (pump_k_window) {
      p.spatial = KWindowPump{pump_k_window->center, pump_k_window->width,
                              {pump_k_window->c0, pump_k_window->c1, pump_k_window->c2}};
    } else {
      PerChannelPump pc;
      pc.amplitudes.clear();
      for (const auto& c : pump_channels) pc.amplitudes.emplace_back(c.channel, cplx{c.re, c.im});
      p.spatial = pc;
    }
    return p;
  }

  Grid grid() const {
    std::size_t points = grid_points;
    if (points == 0) {
      const double w0 = wavelength_to_omega(grid_lambda_max_nm * kNanometre);
      const double w1 = wavelength_to_omega(grid_lambda_min_nm * kNanometre);
      points = static_cast<std::size_t>(std::floor((w1 - w0) / pump().sigma_omega())) + 1;
    }
    return Grid::from_wavelengths(grid_lambda_min_nm * kNanometre, grid_lambda_max_nm * kNanometre, points,
                                  channel_count);
  }

  std::optional<SpectralFilter> spectral_filter() const {
    if (!filter) return std::nullopt;
    const auto f = SpectralFilter::from_wavelengths(filter->signal_min_nm * kNanometre, filter->signal_max_nm * kNanometre,
                                                    filter->idler_min_nm * kNanometre, filter->idler_max_nm * kNanometre);
    f.validate();
    return f;
  }

  /// Checks every physical invariant; throws on the first violation.
  void validate() const {
    if (!is_scenario_name(scenario)) throw ConfigError("unknown scenario '" + scenario + "'");
    if (fit_qpm && qpm_period_m) throw ConfigError("qpm_period_m and fit_qpm are mutually exclusive");
    const MaterialModel m = material();
    geometry().validate();
    const PumpSpec p = pump();
    p.validate(channel_count);
    if (!(grid_lambda_min_nm > 0.0 && grid_lambda_max_nm > grid_lambda_min_nm))
      throw ConfigError("grid: need 0 < grid_lambda_min_nm < grid_lambda_max_nm");
    if (!(grid_band_sigmas > 0.0)) throw ConfigError("grid_band_sigmas must be > 0");
    (void)refractive_index(grid_lambda_min_nm * kNanometre, m);
    (void)refractive_index(grid_lambda_max_nm * kNanometre, m);
    (void)refractive_index(pump_wavelength_nm * kNanometre, m);
    for (double s : sweep_pump_nm) {
      if (!(s > 0.0)) throw ConfigError("sweep_pump_nm entries must be > 0");
      (void)refractive_index(s * kNanometre, m);
    }
    (void)spectral_filter();
    if (smoothing_nm && !(*smoothing_nm > 0.0)) throw ConfigError("smoothing_nm must be > 0");
  }
};

namespace detail {

inline std::string where(const YAML::Node& n, const std::string& key) {
  std::ostringstream os;
  const auto mark = n.Mark();
  if (mark.line >= 0) os << "line " << mark.line + 1 << ": ";
  os << "key '" << key << "'";
  return os.str();
}

template <class T>
T as(const YAML::Node& n, const std::string& key) {
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(where(n, key) + ": cannot convert '" + YAML::Dump(n) + "'");
  }
}

inline bool is_null(const YAML::Node& n) { return !n || n.IsNull(); }

inline void check_keys(const YAML::Node& map, const std::set<std::string>& known, const std::string& context) {
  if (!map.IsMap()) throw ConfigError(where(map, context) + ": expected a mapping");
  for (const auto& kv : map) {
    const auto key = kv.first.as<std::string>();
    if (!known.count(key)) throw ConfigError(where(kv.first, key) + ": unknown key" + (context.empty() ? "" : " in " + context));
  }
}

}  // namespace detail

/// Builds a validated RunConfig from a YAML mapping. Unknown keys, type
/// mismatches and invariant violations raise ConfigError with the line.
inline RunConfig config_from_node(const YAML::Node& root) {
  using detail::as;
  using detail::is_null;
  RunConfig c;
  if (is_null(root)) {
    c.validate();
    return c;
  }
  static const std::set<std::string> known{
      "scenario",         "sellmeier",         "temperature_c",      "qpm_period_m",  "fit_qpm",
      "coupling_scale",   "damping_m",         "coupling_constant_per_m", "index_offset", "length_m",
      "channel_count",    "pump_wavelength_nm", "pump_fwhm_nm",      "pump_channels", "pump_k_window",
      "sweep_pump_nm",    "grid_lambda_min_nm", "grid_lambda_max_nm", "grid_points",  "grid_band_sigmas",
      "filter",           "smoothing_nm",      "out_dir",            "csv",           "image",
      "tensor"};
  detail::check_keys(root, known, "");

  auto get = [&](const char* key, auto& field) {
    if (const auto n = root[key]) field = as<std::decay_t<decltype(field)>>(n, key);
  };
  get("scenario", c.scenario);
  if (const auto n = root["sellmeier"]) {
    if (!n.IsSequence() || n.size() != 10) throw ConfigError(detail::where(n, "sellmeier") + ": expected 10 numbers");
    for (std::size_t i = 0; i < 10; ++i) c.sellmeier[i] = as<double>(n[i], "sellmeier");
  }
  get("temperature_c", c.temperature_c);
  const bool has_period = static_cast<bool>(root["qpm_period_m"]);
  const bool has_fit = root["fit_qpm"] && !is_null(root["fit_qpm"]);
  if (has_period && !is_null(root["qpm_period_m"]) && has_fit)
    throw ConfigError(detail::where(root["fit_qpm"], "fit_qpm") + ": qpm_period_m and fit_qpm are mutually exclusive");
  if (has_fit) {
    const auto n = root["fit_qpm"];
    detail::check_keys(n, {"signal_nm", "idler_nm", "pump_nm"}, "fit_qpm");
    FitTarget t;
    if (n["signal_nm"]) t.signal_nm = as<double>(n["signal_nm"], "fit_qpm.signal_nm");
    if (n["idler_nm"]) t.idler_nm = as<double>(n["idler_nm"], "fit_qpm.idler_nm");
    if (n["pump_nm"]) t.pump_nm = as<double>(n["pump_nm"], "fit_qpm.pump_nm");
    c.fit_qpm = t;
    c.qpm_period_m.reset();
  } else if (has_period) {
    const auto n = root["qpm_period_m"];
    if (is_null(n)) c.qpm_period_m.reset();
    else c.qpm_period_m = as<double>(n, "qpm_period_m");
  }
  get("coupling_scale", c.coupling_scale);
  get("damping_m", c.damping_m);
  if (const auto n = root["coupling_constant_per_m"]) {
    if (is_null(n)) c.coupling_constant_per_m.reset();
    else c.coupling_constant_per_m = as<double>(n, "coupling_constant_per_m");
  }
  get("index_offset", c.index_offset);
  get("length_m", c.length_m);
  get("channel_count", c.channel_count);
  get("pump_wavelength_nm", c.pump_wavelength_nm);
  get("pump_fwhm_nm", c.pump_fwhm_nm);
  if (const auto n = root["pump_channels"]) {
    if (!n.IsSequence()) throw ConfigError(detail::where(n, "pump_channels") + ": expected a list of [channel, re, im]");
    c.pump_channels.clear();
    for (const auto& e : n) {
      if (!e.IsSequence() || e.size() < 2 || e.size() > 3)
        throw ConfigError(detail::where(e, "pump_channels") + ": entries are [channel, re] or [channel, re, im]");
      PumpChannelConfig pc;
      pc.channel = as<int>(e[0], "pump_channels");
      pc.re = as<double>(e[1], "pump_channels");
      pc.im = e.size() == 3 ? as<double>(e[2], "pump_channels") : 0.0;
      c.pump_channels.push_back(pc);
    }
  }
  if (const auto n = root["pump_k_window"]) {
    if (is_null(n)) {
      c.pump_k_window.reset();
    } else {
      detail::check_keys(n, {"center", "width", "c0", "c1", "c2"}, "pump_k_window");
      KWindowConfig w;
      if (n["center"]) w.center = as<double>(n["center"], "pump_k_window.center");
      if (n["width"]) w.width = as<double>(n["width"], "pump_k_window.width");
      if (n["c0"]) w.c0 = as<double>(n["c0"], "pump_k_window.c0");
      if (n["c1"]) w.c1 = as<double>(n["c1"], "pump_k_window.c1");
      if (n["c2"]) w.c2 = as<double>(n["c2"], "pump_k_window.c2");
      c.pump_k_window = w;
    }
  }
  if (const auto n = root["sweep_pump_nm"]) {
    if (!n.IsSequence()) throw ConfigError(detail::where(n, "sweep_pump_nm") + ": expected a list");
    c.sweep_pump_nm.clear();
    for (const auto& e : n) c.sweep_pump_nm.push_back(as<double>(e, "sweep_pump_nm"));
  }
  get("grid_lambda_min_nm", c.grid_lambda_min_nm);
  get("grid_lambda_max_nm", c.grid_lambda_max_nm);
  if (const auto n = root["grid_points"]) {
    const long long v = as<long long>(n, "grid_points");
    if (v < 0) throw ConfigError(detail::where(n, "grid_points") + ": must be >= 0");
    c.grid_points = static_cast<std::size_t>(v);
  }
  get("grid_band_sigmas", c.grid_band_sigmas);
  if (const auto n = root["filter"]) {
    if (is_null(n)) {
      c.filter.reset();
    } else {
      detail::check_keys(n, {"signal_min_nm", "signal_max_nm", "idler_min_nm", "idler_max_nm"}, "filter");
      FilterConfig f;
      for (const char* k : {"signal_min_nm", "signal_max_nm", "idler_min_nm", "idler_max_nm"})
        if (!n[k]) throw ConfigError(detail::where(n, std::string("filter.") + k) + ": missing");
      f.signal_min_nm = as<double>(n["signal_min_nm"], "filter.signal_min_nm");
      f.signal_max_nm = as<double>(n["signal_max_nm"], "filter.signal_max_nm");
      f.idler_min_nm = as<double>(n["idler_min_nm"], "filter.idler_min_nm");
      f.idler_max_nm = as<double>(n["idler_max_nm"], "filter.idler_max_nm");
      c.filter = f;
    }
  }
  if (const auto n = root["smoothing_nm"]) {
    if (is_null(n)) c.smoothing_nm.reset();
    else c.smoothing_nm = as<double>(n, "smoothing_nm");
  }
  get("out_dir", c.out_dir);
  get("csv", c.csv);
  get("image", c.image);
  get("tensor", c.tensor);

  try {
    c.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  }
  return c;
}

inline YAML::Node load_yaml(const std::string& text) {
  try {
    return YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("configuration syntax: ") + e.what());
  }
}

inline RunConfig parse_config(const std::string& text) { return config_from_node(load_yaml(text)); }

/// Applies "key=value" overrides; dotted keys address nested mappings.
inline void apply_overrides(YAML::Node& root, const std::vector<std::string>& overrides) {
  if (!root || root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + o + "' is not key=value");
    const std::string key = o.substr(0, eq);
    const YAML::Node value = load_yaml(o.substr(eq + 1));
    const auto dot = key.find('.');
    if (dot == std::string::npos) {
      root[key] = value;
    } else {
      YAML::Node parent = root[key.substr(0, dot)];
      if (!parent.IsMap()) parent = YAML::Node(YAML::NodeType::Map);
      parent[key.substr(dot + 1)] = value;
      root[key.substr(0, dot)] = parent;
    }
  }
}

/// Canonical text form; parse_config(serialize(c)) == c.
inline std::string serialize(const RunConfig& c) {
  using io::format_double;
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string("null"); };
  std::ostringstream os;
  os << "scenario: " << YAML::Dump(YAML::Node(c.scenario)) << '\n';
  os << "# extraordinary Sellmeier a1..a6, b1..b4 (default: congruent LiNbO3, Jundt 1997)\n";
  os << "sellmeier: [";
  for (std::size_t i = 0; i < c.sellmeier.size(); ++i) os << (i ? ", " : "") << format_double(c.sellmeier[i]);
  os << "]\n";
  os << "temperature_c: " << format_double(c.temperature_c) << '\n';
  if (c.fit_qpm) {
    os << "fit_qpm: {signal_nm: " << format_double(c.fit_qpm->signal_nm)
       << ", idler_nm: " << format_double(c.fit_qpm->idler_nm) << ", pump_nm: " << format_double(c.fit_qpm->pump_nm)
       << "}\n";
  } else {
    os << "qpm_period_m: " << opt(c.qpm_period_m) << '\n';
  }
  os << "coupling_scale: " << format_double(c.coupling_scale) << '\n';
  os << "damping_m: " << format_double(c.damping_m) << '\n';
  os << "coupling_constant_per_m: " << opt(c.coupling_constant_per_m) << '\n';
  os << "index_offset: " << format_double(c.index_offset) << '\n';
  os << "length_m: " << format_double(c.length_m) << '\n';
  os << "channel_count: " << c.channel_count << '\n';
  os << "pump_wavelength_nm: " << format_double(c.pump_wavelength_nm) << '\n';
  os << "pump_fwhm_nm: " << format_double(c.pump_fwhm_nm) << '\n';
  os << "pump_channels: [";
  for (std::size_t i = 0; i < c.pump_channels.size(); ++i)
    os << (i ? ", " : "") << '[' << c.pump_channels[i].channel << ", " << format_double(c.pump_channels[i].re) << ", "
       << format_double(c.pump_channels[i].im) << ']';
  os << "]\n";
  if (c.pump_k_window) {
    const auto& w = *c.pump_k_window;
    os << "pump_k_window: {center: " << format_double(w.center) << ", width: " << format_double(w.width)
       << ", c0: " << format_double(w.c0) << ", c1: " << format_double(w.c1) << ", c2: " << format_double(w.c2) << "}\n";
  } else {
    os << "pump_k_window: null\n";
  }
  os << "sweep_pump_nm: [";
  for (std::size_t i = 0; i < c.sweep_pump_nm.size(); ++i) os << (i ? ", " : "") << format_double(c.sweep_pump_nm[i]);
  os << "]\n";
  os << "grid_lambda_min_nm: " << format_double(c.grid_lambda_min_nm) << '\n';
  os << "grid_lambda_max_nm: " << format_double(c.grid_lambda_max_nm) << '\n';
  os << "grid_points: " << c.grid_points << '\n';
  os << "grid_band_sigmas: " << format_double(c.grid_band_sigmas) << '\n';
  if (c.filter) {
    const auto& f = *c.filter;
    os << "filter: {signal_min_nm: " << format_double(f.signal_min_nm) << ", signal_max_nm: " << format_double(f.signal_max_nm)
       << ", idler_min_nm: " << format_double(f.idler_min_nm) << ", idler_max_nm: " << format_double(f.idler_max_nm)
       << "}\n";
  } else {
    os << "filter: null\n";
  }
  os << "smoothing_nm: " << opt(c.smoothing_nm) << '\n';
  os << "out_dir: " << YAML::Dump(YAML::Node(c.out_dir)) << '\n';
  os << "csv: " << (c.csv ? "true" : "false") << '\n';
  os << "image: " << (c.image ? "true" : "false") << '\n';
  os << "tensor: " << (c.tensor ? "true" : "false") << '\n';
  return os.str();
}

}  // namespace wgapdc
