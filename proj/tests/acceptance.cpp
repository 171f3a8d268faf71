// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "wgapdc/scenarios.hpp"
#include "wgapdc/verification.hpp"

using namespace wgapdc;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string nm(double m, int digits = 2) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << m / kNanometre;
  return os.str();
}

RunConfig experiment() { return scenario_preset("fig7_experiment"); }

SpatioSpectralMap map_at(const RunConfig& cfg, double lp_nm) {
  return spatio_spectral_intensity(Pipeline::from_config(cfg).with_pump_wavelength(lp_nm * kNanometre).source());
}

// 1 and 2 share the degenerate map
std::optional<SpatioSpectralMap> degenerate_map;
double degenerate_seconds = 0.0;

const SpatioSpectralMap& degenerate() {
  if (!degenerate_map) {
    const auto t0 = Clock::now();
    degenerate_map = map_at(experiment(), 774.9);
    degenerate_seconds = seconds_since(t0);
  }
  return *degenerate_map;
}

Outcome spatial_spread() {
  const auto& map = degenerate();
  const auto prof = channel_profile(map);
  const int n = spread_count(prof, map.channel_row(0), 0.05);
  std::ostringstream os;
  os << n << " channels above 5% of peak (want 5 +- 1), map built in " << degenerate_seconds << " s (limit 120)";
  return {std::abs(n - 5) <= 1 && degenerate_seconds < 120.0, os.str()};
}

Outcome spectral_width() {
  const auto& map = degenerate();
  const auto w = fwhm(map.wavelength, spectral_marginal(map, 0));
  if (!w) return {false, "central marginal has no half-maximum crossings"};
  return {std::abs(*w - 100e-9) <= 30e-9, "central FWHM " + nm(*w) + " nm (want 100 +- 30)"};
}

Outcome branch_asymmetry() {
  const auto map = map_at(experiment(), 773.9);
  const auto c = map.channel_row(0);
  const int up = spread_count(spatial_marginal(map, 1550e-9, 1750e-9), c, 0.1);
  const int lo = spread_count(spatial_marginal(map, 1350e-9, 1550e-9), c, 0.1);

  // upper branch of the channel-summed spectrum, at the native grid and two detector resolutions
  auto upper_peaks = [&](const SpatioSpectralMap& m) {
    const auto spectrum = channel_integrated_spectrum(m);
    const double split = 2 * 773.9e-9;
    std::vector<double> part;
    for (std::size_t j = 0; j < spectrum.size(); ++j)
      if (m.wavelength[j] > split) part.push_back(spectrum[j]);
    return significant_peaks(part).size();
  };
  double max_step = 0.0;
  for (std::size_t j = 1; j < map.wavelength.size(); ++j)
    max_step = std::max(max_step, map.wavelength[j] - map.wavelength[j - 1]);
  const auto raw = upper_peaks(map);
  const auto two = upper_peaks(smooth_spectral(map, 2e-9));
  const auto ten = upper_peaks(smooth_spectral(map, 10e-9));
  std::ostringstream os;
  os << "spread upper " << up << " vs lower " << lo << "; upper-branch peaks: grid (" << nm(max_step, 3)
     << " nm) " << raw << ", 2 nm " << two << ", 10 nm " << ten;
  return {up - lo >= 1 && max_step <= 2e-9 && raw >= 2 && two >= 2 && ten == 1, os.str()};
}

Outcome phase_matching_sweep() {
  const auto t0 = Clock::now();
  const RunConfig cfg = experiment();
  std::vector<double> pumps;
  for (double v : cfg.sweep_pump_nm) pumps.push_back(v * kNanometre);
  const auto curve = phase_matching_curve(pumps, Pipeline::from_config(cfg));
  const double secs = seconds_since(t0);
  bool ok = secs < 600.0;
  std::ostringstream os;
  double worst = 0.0;
  std::vector<std::pair<double, double>> det_sep;
  for (const auto& b : curve) {
    const double r = energy_residual(b);
    worst = std::max(worst, r);
    det_sep.emplace_back(774.9e-9 - b.pump_wavelength, b.separation());
    os << nm(b.pump_wavelength) << ": " << nm(b.separation(), 1) << " nm; ";
  }
  ok = ok && worst <= 0.005;
  std::sort(det_sep.begin(), det_sep.end());
  for (std::size_t j = 1; j < det_sep.size(); ++j) ok = ok && det_sep[j].second > det_sep[j - 1].second;
  // 0.4 nm detuning (774.5 nm) must already split
  for (const auto& b : curve)
    if (std::abs(b.pump_wavelength - 774.5e-9) < 1e-13) ok = ok && !b.degenerate && b.separation() > 0.0;
  os << "worst energy residual " << worst * 100 << "%, sweep " << secs << " s";
  return {ok, os.str()};
}

Outcome contours() {
  const RunConfig base = scenario_preset("fig2_contours");
  const double c0 = *base.coupling_constant_per_m;
  bool ok = true;
  std::ostringstream os;
  for (const auto& [name, target] : detail::contour_regimes(c0)) {
    const RunConfig c = contour_case_config(base, target);
    const auto p = Pipeline::from_config(c);
    const auto maps = correlation_maps(p.source());
    const auto [found, on] = contour_agreement(maps.gamma_k, p.grid, target / (2.0 * c0));
    ok = ok && found > 0 && on == found;
    os << name << " " << on << "/" << found << "; ";
  }
  os << "maxima within one cell of the analytic contour";
  return {ok, os.str()};
}

Outcome phase_engineering() {
  const RunConfig base = scenario_preset("fig4_phase_engineering");
  auto maps_for = [&](double c1, double c2) {
    RunConfig c = base;
    c.pump_k_window = KWindowConfig{0.0, kPi / 2, 0.0, c1, c2};
    return correlation_maps(Pipeline::from_config(c).source());
  };
  const auto zero = maps_for(0, 0);
  const auto lin = maps_for(4, 0);
  const auto quad = maps_for(0, 2);
  const auto expect = circular_shift(zero.gamma_n, -4);
  double dev = 0.0;
  for (std::size_t j = 0; j < expect.size(); ++j) dev = std::max(dev, std::abs(expect.data()[j] - lin.gamma_n.data()[j]));
  const auto [ar, ac] = argmax(zero.gamma_n);
  const auto [br, bc] = argmax(lin.gamma_n);
  const int n = zero.grid.channel_count();
  auto wrap = [n](long d) { return static_cast<int>(((d % n) + n + n / 2) % n - n / 2); };
  const int dr = wrap(static_cast<long>(br) - static_cast<long>(ar));
  const int dc = wrap(static_cast<long>(bc) - static_cast<long>(ac));
  // the map is symmetric, so the argmax may land on the mirrored partner
  const auto [brr, bcc] = argmax(circular_shift(zero.gamma_n, -4));
  const bool argmax_ok = (dr == -4 && dc == -4) || (br == brr && bc == bcc) || (br == bcc && bc == brr);
  const double m0 = diagonal_second_moment(zero.gamma_n, zero.channel_axis);
  const double m2 = diagonal_second_moment(quad.gamma_n, quad.channel_axis);
  const auto [anti, diag] = diagonal_fractions(zero.gamma_n, zero.channel_axis, 1);
  std::ostringstream os;
  os << "shift deviation " << dev << " (<= 1e-9), argmax moved by " << (argmax_ok ? "the phase slope" : "other")
     << "; +45 moment " << m0 << " -> " << m2 << "; zero phase anti/diag mass " << anti << "/" << diag;
  return {dev <= 1e-9 && argmax_ok && m2 > m0 && anti > diag, os.str()};
}

Outcome oracles() {
  const auto t0 = Clock::now();
  const auto a = verification::check_phase_match_factor();
  const auto b = verification::check_transform();
  const auto c = verification::check_realspace();
  const double secs = seconds_since(t0);
  std::ostringstream os;
  os << "pm " << a.metric << ", dft " << b.metric << ", realspace rel " << c.metric << ", total " << secs << " s (limit 300)";
  return {a.pass && b.pass && c.pass && secs < 300.0, os.str()};
}

Outcome invariants() {
  const auto rs = verification::check_invariants(100);
  bool ok = true;
  std::ostringstream os;
  for (const auto& r : rs) {
    ok = ok && r.pass;
    os << r.name.substr(0, r.name.find(" (")) << " " << r.metric << "; ";
  }
  os << "100 random configurations";
  return {ok, os.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"1 degenerate spatial spread", spatial_spread},
      {"2 degenerate spectral width", spectral_width},
      {"3 branch asymmetry and double peak", branch_asymmetry},
      {"4 phase-matching curve", phase_matching_sweep},
      {"5 contour regimes", contours},
      {"6 phase engineering", phase_engineering},
      {"7 oracle equivalences", oracles},
      {"8 invariant suite", invariants},
  };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("[%s] %-36s %7.1f s  %s\n", o.pass ? "PASS" : "FAIL", name, seconds_since(t0), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
