#pragma once

#include "wgapdc/jsa.hpp"

namespace wgapdc::testing {

/// Small symmetric problem centred on the degenerate point of `pump`.
struct SmallCase {
  Grid grid;
  ArrayGeometry geometry;
  PumpSpec pump;
  MaterialModel model;
};

inline SmallCase small_case(int channels = 9, std::size_t points = 13, double half_width_nm = 6.0,
                            double pump_nm = 774.9) {
  SmallCase c;
  c.pump.central_wavelength = pump_nm * 1e-9;
  c.pump.spectral_fwhm = 2e-9;
  c.geometry.channel_count = channels;
  c.geometry.length = 0.02;
  const double centre = 2 * pump_nm;
  c.grid = Grid::from_wavelengths((centre - half_width_nm) * 1e-9, (centre + half_width_nm) * 1e-9, points, channels);
  return c;
}

inline JsaTensor build(const SmallCase& c) { return build_jsa(c.grid, c.geometry, c.pump, c.model); }

}  // namespace wgapdc::testing
