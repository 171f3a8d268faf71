#pragma once

#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "wgapdc/config.hpp"
#include "wgapdc/correlations.hpp"
#include "wgapdc/io.hpp"
#include "wgapdc/pipeline.hpp"

namespace wgapdc {

/// Human-readable summary lines produced by a scenario run.
struct ScenarioReport {
  std::vector<std::string> lines;

  template <class... Args>
  void add(Args&&... args) {
    std::ostringstream os;
    (os << ... << args);
    lines.push_back(os.str());
  }
};

/// Starting configuration of each named scenario.
inline RunConfig scenario_preset(const std::string& name) {
  if (!is_scenario_name(name)) throw ConfigError("unknown scenario '" + name + "'");
  RunConfig c;
  c.scenario = name;
  auto near_degenerate = [&] {
    c.coupling_constant_per_m = 400.0;
    c.channel_count = 51;
    c.qpm_period_m.reset();
    c.fit_qpm = FitTarget{1550.1, 1550.1, 775.05};
    c.pump_wavelength_nm = 775.05;
    c.pump_fwhm_nm = 0.5;
  };
  if (name == "fig2_contours" || name == "fig3_pump_shaping" || name == "fig10_near_degenerate") {
    near_degenerate();
  } else if (name == "fig4_phase_engineering") {
    c.coupling_scale = 0.13;
    c.channel_count = 49;
    c.qpm_period_m.reset();
    c.fit_qpm = FitTarget{1550.0, 1550.0, 775.0};
    c.pump_wavelength_nm = 775.0;
    c.pump_k_window = KWindowConfig{};
    c.grid_lambda_min_nm = 1549.9;
    c.grid_lambda_max_nm = 1550.1;
    c.grid_points = 21;
    c.filter = FilterConfig{1549.9, 1550.1, 1549.9, 1550.1};
  } else if (name == "fig5_filtered") {
    c.coupling_scale = 0.13;
    c.qpm_period_m.reset();
    const double lp = 1.0 / (1.0 / 1400.0 + 1.0 / 1600.0);
    c.fit_qpm = FitTarget{1400.0, 1600.0, lp};
    c.pump_wavelength_nm = lp;
  } else if (name == "fig8_marginals") {
    c.pump_wavelength_nm = 773.9;
  }
  return c;
}

namespace detail {

inline io::CsvAxis k_axis(const Grid& g, const char* name) { return {name, "rad", g.k_axis()}; }
inline io::CsvAxis n_axis(const Grid& g, const char* name) { return {name, "channel", io::to_doubles(g.channel_axis())}; }

inline void write_matrix(io::OutputSink& sink, const RunConfig& cfg, const std::string& stem, const Array2<double>& m,
                         const io::CsvAxis& rows, const io::CsvAxis& cols, const std::string& quantity,
                         const std::vector<std::string>& notes = {}) {
  if (cfg.csv) sink.write(stem + ".csv", io::matrix_csv(m, rows, cols, quantity, notes));
  if (cfg.image) {
    const auto img = io::heatmap_image(m, rows, cols, quantity);
    sink.write(stem + ".ppm", img.pixmap);
    sink.write(stem + ".ppm.txt", img.sidecar);
  }
}

inline void write_correlations(io::OutputSink& sink, const RunConfig& cfg, const std::string& prefix,
                               const CorrelationMaps& maps) {
  const auto& g = maps.grid;
  write_matrix(sink, cfg, prefix + "gamma_k", maps.gamma_k, k_axis(g, "k_s"), k_axis(g, "k_i"),
               "Gamma_k, probability per momentum cell");
  write_matrix(sink, cfg, prefix + "gamma_n", maps.gamma_n, n_axis(g, "n_s"), n_axis(g, "n_i"),
               "Gamma_n, probability per channel pair");
  if (cfg.csv)
    sink.write(prefix + "phase_k.csv", io::matrix_csv(maps.phase_k, k_axis(g, "k_s"), k_axis(g, "k_i"),
                                                      "arg of the frequency-integrated momentum amplitude [rad]"));
}

inline void write_spatio_spectral(io::OutputSink& sink, const RunConfig& cfg, const std::string& prefix,
                                  const SpatioSpectralMap& map, const std::string& tag = "") {
  Array2<double> per_nm = map.intensity;
  for (auto& v : per_nm.data()) v *= kNanometre;
  std::vector<double> nm(map.wavelength.size());
  for (std::size_t j = 0; j < nm.size(); ++j) nm[j] = map.wavelength[j] / kNanometre;
  write_matrix(sink, cfg, prefix + "spatio_spectral" + tag, per_nm, {"n", "channel", io::to_doubles(map.channels)},
               {"lambda", "nm", nm}, "single-photon intensity density [1/nm], signal plus idler");
  if (cfg.csv) {
    std::vector<std::optional<double>> x(nm.begin(), nm.end());
    const auto s = spectral_marginal(map, 0);
    std::vector<std::optional<double>> y;
    for (double v : s) y.emplace_back(v * kNanometre);
    sink.write(prefix + "central_marginal" + tag + ".csv",
               io::table_csv({{"lambda", "nm", x}, {"intensity", "1/nm", y}}, {"central channel spectral marginal"}));
  }
}

inline std::string pump_tag(double lambda_p) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "pump_%.2fnm", lambda_p / kNanometre);
  return buf;
}

inline std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

/// Mismatch targets of the three contour regimes: Delta beta_A = 0, -2 C0, +2 C0.
inline std::vector<std::pair<std::string, double>> contour_regimes(double c0) {
  return {{"i_rectangle", 0.0}, {"ii_circle", 2.0 * c0}, {"iii_corners", -2.0 * c0}};
}

inline double constant_coupling_of(const RunConfig& cfg) {
  if (!cfg.coupling_constant_per_m) throw ConfigError("this scenario needs coupling_constant_per_m");
  return *cfg.coupling_constant_per_m;
}

}  // namespace detail

/// Degenerate narrowband configuration whose single-waveguide mismatch at
/// omega_p / 2 equals `mismatch`; used by the contour scenario.
inline RunConfig contour_case_config(const RunConfig& base, double mismatch, double half_band_nm = 0.1,
                                     std::size_t points = 21) {
  const double lp = tune_pump_for_mismatch(base.material(), mismatch, base.pump_wavelength_nm * kNanometre);
  RunConfig c = base;
  c.pump_wavelength_nm = lp / kNanometre;
  const double centre = 2.0 * c.pump_wavelength_nm;
  c.grid_lambda_min_nm = centre - half_band_nm;
  c.grid_lambda_max_nm = centre + half_band_nm;
  c.grid_points = points;
  c.filter = FilterConfig{centre - half_band_nm, centre + half_band_nm, centre - half_band_nm, centre + half_band_nm};
  return c;
}

inline ScenarioReport run_custom(const RunConfig& cfg, io::OutputSink& sink, const std::string& prefix = "") {
  ScenarioReport rep;
  const auto p = Pipeline::from_config(cfg);
  const auto src = p.source();
  const auto maps = correlation_maps(src);
  detail::write_correlations(sink, cfg, prefix, maps);
  rep.add("slices evaluated: ", src.evaluated_slices());
  if (p.grid.symmetric_axes()) {
    const auto map = spatio_spectral_intensity(src);
    detail::write_spatio_spectral(sink, cfg, prefix, map);
    if (cfg.smoothing_nm)
      detail::write_spatio_spectral(sink, cfg, prefix, smooth_spectral(map, *cfg.smoothing_nm * kNanometre),
                                    "_smoothed");
    const auto prof = channel_profile(map);
    rep.add("channels above 5% of central: ", spread_count(prof, map.channel_row(0), 0.05));
  }
  if (cfg.tensor) sink.write(prefix + "jsa.bin", io::encode_tensor(src.to_dense()));
  return rep;
}

inline ScenarioReport run_fig2(const RunConfig& cfg, io::OutputSink& sink) {
  ScenarioReport rep;
  const double c0 = detail::constant_coupling_of(cfg);
  std::vector<std::optional<double>> lp_col, dbw_col, found_col, on_col;
  for (const auto& [name, target] : detail::contour_regimes(c0)) {
    const RunConfig c = contour_case_config(cfg, target);
    const auto p = Pipeline::from_config(c);
    const auto maps = correlation_maps(p.source());
    detail::write_correlations(sink, cfg, "fig2_contours/" + name + "/", maps);
    const auto [found, on] = contour_agreement(maps.gamma_k, p.grid, target / (2.0 * c0));
    rep.add(name, ": pump ", detail::fmt(c.pump_wavelength_nm, 6), " nm, maxima on contour ", on, "/", found);
    lp_col.emplace_back(c.pump_wavelength_nm);
    dbw_col.emplace_back(target);
    found_col.emplace_back(found);
    on_col.emplace_back(on);
  }
  if (cfg.csv)
    sink.write("fig2_contours/contours.csv",
               io::table_csv({{"pump_wavelength", "nm", lp_col},
                              {"delta_beta_omega", "1/m", dbw_col},
                              {"maxima", "count", found_col},
                              {"maxima_on_contour", "count", on_col}},
                             {"regimes i, ii, iii: delta_beta_A = 0, -2 C0, +2 C0"}));
  return rep;
}

inline ScenarioReport run_fig3(const RunConfig& cfg, io::OutputSink& sink) {
  ScenarioReport rep;
  // central case: the configuration as given (single pumped channel at degeneracy)
  auto central = run_custom(cfg, sink, "fig3_pump_shaping/central/");
  for (auto& l : central.lines) rep.add("central: ", l);
  RunConfig shaped = cfg;
  shaped.pump_k_window = KWindowConfig{};
  const auto p = Pipeline::from_config(shaped);
  const auto maps = correlation_maps(p.source());
  detail::write_correlations(sink, cfg, "fig3_pump_shaping/k_window/", maps);
  const auto [anti, diag] = diagonal_fractions(maps.gamma_n, maps.channel_axis, 1);
  rep.add("k_window: mass near n_s = -n_i ", detail::fmt(anti), ", near n_s = n_i ", detail::fmt(diag));
  return rep;
}

inline ScenarioReport run_fig4(const RunConfig& cfg, io::OutputSink& sink) {
  ScenarioReport rep;
  struct Case {
    const char* name;
    double c1, c2;
  };
  const KWindowConfig base_window = cfg.pump_k_window.value_or(KWindowConfig{});
  std::optional<CorrelationMaps> baseline;
  for (const Case& cs : {Case{"zero_phase", 0.0, 0.0}, Case{"linear_phase", 4.0, 0.0}, Case{"quadratic_phase", 0.0, 2.0}}) {
    RunConfig c = cfg;
    KWindowConfig w = base_window;
    w.c1 += cs.c1;
    w.c2 += cs.c2;
    c.pump_k_window = w;
    const auto maps = correlation_maps(Pipeline::from_config(c).source());
    detail::write_correlations(sink, cfg, std::string("fig4_phase_engineering/") + cs.name + "/", maps);
    const double m2 = diagonal_second_moment(maps.gamma_n, maps.channel_axis);
    if (!baseline) {
      baseline = maps;
      const auto [anti, diag] = diagonal_fractions(maps.gamma_n, maps.channel_axis, 1);
      rep.add(cs.name, ": +45 deg second moment ", detail::fmt(m2), ", mass near n_s = -n_i ", detail::fmt(anti),
              ", near n_s = n_i ", detail::fmt(diag));
    } else if (cs.c1 != 0.0) {
      const int s = -static_cast<int>(std::lround(cs.c1));
      const auto shifted = circular_shift(baseline->gamma_n, s);
      double dev = 0.0;
      for (std::size_t j = 0; j < shifted.size(); ++j)
        dev = std::max(dev, std::abs(shifted.data()[j] - maps.gamma_n.data()[j]));
      rep.add(cs.name, ": shift ", s, " channels, max deviation from shifted baseline ", dev);
    } else {
      rep.add(cs.name, ": +45 deg second moment ", detail::fmt(m2), " (baseline ",
              detail::fmt(diagonal_second_moment(baseline->gamma_n, baseline->channel_axis)), ")");
    }
  }
  return rep;
}

inline ScenarioReport run_fig5(const RunConfig& cfg, io::OutputSink& sink) {
  ScenarioReport rep;
  const MaterialModel model = cfg.material();
  PumpSpec pump = cfg.pump();
  const double lp = cfg.pump_wavelength_nm;
  struct Placement {
    const char* name;
    double signal_nm;
  };
  for (const Placement& pl : {Placement{"a1_short", 1390.0}, Placement{"a2_matched", 1400.0}, Placement{"a3_long", 1410.0}}) {
    const double idler_nm = 1.0 / (1.0 / lp - 1.0 / pl.signal_nm);
    const double half = 1.0;
    const auto filter = SpectralFilter::from_wavelengths((pl.signal_nm - half) * kNanometre, (pl.signal_nm + half) * kNanometre,
                                                         (idler_nm - half) * kNanometre, (idler_nm + half) * kNanometre);
    const std::size_t points = 41;
    const UniformAxis ws{filter.signal_min, (filter.signal_max - filter.signal_min) / (points - 1), points};
    const UniformAxis wi{filter.idler_min, (filter.idler_max - filter.idler_min) / (points - 1), points};
    const Grid grid(ws, wi, cfg.channel_count);
    const BandedJsa src(grid, cfg.geometry(), pump, model, filter, cfg.grid_band_sigmas);
    const auto maps = correlation_maps(src);
    detail::write_correlations(sink, cfg, std::string("fig5_filtered/") + pl.name + "/", maps);
    const double cs = coupling(pl.signal_nm * kNanometre, model);
    const double ci = coupling(idler_nm * kNanometre, model);
    rep.add(pl.name, ": signal ", detail::fmt(pl.signal_nm, 1), " nm, idler ", detail::fmt(idler_nm, 1),
            " nm, C_s ", detail::fmt(cs, 2), " 1/m, C_i ", detail::fmt(ci, 2), " 1/m");
  }
  return rep;
}

inline ScenarioReport run_fig7(const RunConfig& cfg, io::OutputSink& sink) {
  ScenarioReport rep;
  const auto base = Pipeline::from_config(cfg);
  for (double lp_nm : cfg.sweep_pump_nm) {
    const double lp = lp_nm * kNanometre;
    const auto map = spatio_spectral_intensity(base.with_pump_wavelength(lp).source());
    const std::string prefix = "fig7_experiment/" + detail::pump_tag(lp) + "/";
    detail::write_spatio_spectral(sink, cfg, prefix, map);
    if (cfg.smoothing_nm)
      detail::write_spatio_spectral(sink, cfg, prefix, smooth_spectral(map, *cfg.smoothing_nm * kNanometre), "_smoothed");
    const auto prof = channel_profile(map);
    const auto marginal = spectral_marginal(map, 0);
    const auto w = fwhm(map.wavelength, marginal);
    rep.add(detail::pump_tag(lp), ": channels above 5% of central ", spread_count(prof, map.channel_row(0), 0.05),
            ", central FWHM ", w ? detail::fmt(*w / kNanometre, 2) : std::string("n/a"), " nm");
  }
  return rep;
}

inline ScenarioReport run_fig8(const RunConfig& cfg, io::OutputSink& sink) {
  ScenarioReport rep;
  const auto p = Pipeline::from_config(cfg);
  const auto map = spatio_spectral_intensity(p.source());
  const auto upper = spatial_marginal(map, 1550e-9, 1750e-9);
  const auto lower = spatial_marginal(map, 1350e-9, 1550e-9);
  if (cfg.csv) {
    std::vector<std::optional<double>> n, u, l;
    for (std::size_t r = 0; r < map.channels.size(); ++r) {
      n.emplace_back(map.channels[r]);
      u.emplace_back(upper[r]);
      l.emplace_back(lower[r]);
    }
    sink.write("fig8_marginals/spatial_marginals.csv",
               io::table_csv({{"n", "channel", n}, {"upper_1550_1750nm", "rel", u}, {"lower_1350_1550nm", "rel", l}},
                             {"spatial marginals, central channel = 1", "pump " + detail::fmt(cfg.pump_wavelength_nm, 2) + " nm"}));
  }
  const auto c = map.channel_row(0);
  rep.add("channels above 10% of central: upper ", spread_count(upper, c, 0.1), ", lower ", spread_count(lower, c, 0.1));
  return rep;
}

inline ScenarioReport run_fig9(const RunConfig& cfg, io::OutputSink& sink) {
  ScenarioReport rep;
  std::vector<double> pumps;
  for (double v : cfg.sweep_pump_nm) pumps.push_back(v * kNanometre);
  const auto curve = phase_matching_curve(pumps, Pipeline::from_config(cfg));
  std::vector<std::optional<double>> lp, ls, li, fs, fi, sep, res;
  auto nm = [](const std::optional<double>& v) { return v ? std::optional<double>(*v / kNanometre) : std::nullopt; };
  for (const auto& b : curve) {
    lp.emplace_back(b.pump_wavelength / kNanometre);
    ls.push_back(nm(b.lambda_s));
    li.push_back(nm(b.lambda_i));
    fs.push_back(nm(b.fwhm_s));
    fi.push_back(nm(b.fwhm_i));
    sep.emplace_back(b.separation() / kNanometre);
    const double r = energy_residual(b);
    res.push_back(std::isfinite(r) ? std::optional<double>(r) : std::nullopt);
    rep.add(detail::pump_tag(b.pump_wavelength), ": branches ", b.lambda_s ? detail::fmt(*b.lambda_s / kNanometre, 2) : "-",
            " / ", b.lambda_i ? detail::fmt(*b.lambda_i / kNanometre, 2) : "-", " nm",
            b.degenerate ? " (degenerate)" : "");
  }
  if (cfg.csv)
    sink.write("fig9_pm_curve/pm_curve.csv",
               io::table_csv({{"pump_wavelength", "nm", lp},
                              {"lambda_s_peak", "nm", ls},
                              {"lambda_i_peak", "nm", li},
                              {"fwhm_s", "nm", fs},
                              {"fwhm_i", "nm", fi},
                              {"separation", "nm", sep},
                              {"energy_residual", "rel", res}},
                             {"branch maxima of the central-channel marginal"}));
  return rep;
}

inline ScenarioReport run_fig10(const RunConfig& cfg, io::OutputSink& sink) {
  ScenarioReport rep;
  const double c0 = detail::constant_coupling_of(cfg);
  const MaterialModel model = cfg.material();
  for (const auto& [name, target] : detail::contour_regimes(c0)) {
    RunConfig c = cfg;
    c.pump_wavelength_nm = tune_pump_for_mismatch(model, target, cfg.pump_wavelength_nm * kNanometre) / kNanometre;
    const auto maps = correlation_maps(Pipeline::from_config(c).source());
    detail::write_correlations(sink, cfg, "fig10_near_degenerate/" + name + "/", maps);
    const auto [anti, diag] = diagonal_fractions(maps.gamma_n, maps.channel_axis, 1);
    rep.add(name, ": pump ", detail::fmt(c.pump_wavelength_nm, 6), " nm, mass near n_s = n_i ", detail::fmt(diag),
            ", near n_s = -n_i ", detail::fmt(anti));
  }
  return rep;
}

/// Runs cfg.scenario, writing into `sink` (the manifest is left to the caller).
inline ScenarioReport run_scenario(const RunConfig& cfg, io::OutputSink& sink) {
  cfg.validate();
  sink.write("config.yaml", serialize(cfg));
  const auto& s = cfg.scenario;
  if (s == "fig2_contours") return run_fig2(cfg, sink);
  if (s == "fig3_pump_shaping") return run_fig3(cfg, sink);
  if (s == "fig4_phase_engineering") return run_fig4(cfg, sink);
  if (s == "fig5_filtered") return run_fig5(cfg, sink);
  if (s == "fig7_experiment") return run_fig7(cfg, sink);
  if (s == "fig8_marginals") return run_fig8(cfg, sink);
  if (s == "fig9_pm_curve") return run_fig9(cfg, sink);
  if (s == "fig10_near_degenerate") return run_fig10(cfg, sink);
  return run_custom(cfg, sink);
}

}  // namespace wgapdc
