#include "qrep/cavity_design.hpp"

#include <cmath>
#include <stdexcept>

#include "qrep/constants.hpp"

namespace qrep {

double ModeGeometry::radius_at(double z_from_mirror1) const {
  const double z = z_from_mirror1 - waist_position;
  return w0 * std::sqrt(1.0 + (z / rayleigh_range) * (z / rayleigh_range));
}

ModeGeometry mode_geometry(const CavityGeometry& geom) {
  const double L = geom.length;
  const double g1 = 1.0 - L / geom.roc1;
  const double g2 = 1.0 - L / geom.roc2;
  const double g1g2 = g1 * g2;
  if (!(g1g2 >= 0.0 && g1g2 <= 1.0)) {
    throw std::domain_error("mode_geometry: resonator is not stable");
  }

  ModeGeometry mode;
  const double denom = g1 + g2 - 2.0 * g1g2;
  if (std::abs(denom) < 1e-15) {
    // Within the stable band, denom = 0 only at the symmetric confocal
    // point (g1 = g2 = 0, finite waist) and the planar-planar point
    // (g1 = g2 = 1, zero waist); g1 g2 separates the two.
    if (g1g2 > 0.5) {
      throw std::domain_error("mode_geometry: degenerate mode (w0 = 0)");
    }
    // Symmetric confocal limit g1 = g2 = 0: waist at the center.
    mode.waist_position = 0.5 * L;
    mode.w0 = std::sqrt(L * geom.wavelength / (2.0 * pi));
  } else {
    mode.waist_position = L * g2 * (1.0 - g1) / denom;
    const double w0_sq = (L * geom.wavelength / pi) *
                         std::sqrt(g1g2 * (1.0 - g1g2)) / std::abs(denom);
    if (!(w0_sq > 0.0)) {
      throw std::domain_error("mode_geometry: degenerate mode (w0 = 0)");
    }
    mode.w0 = std::sqrt(w0_sq);
  }
  mode.rayleigh_range = pi * mode.w0 * mode.w0 / geom.wavelength;
  return mode;
}

KappaRates kappa_rates(const MirrorSet& mirrors, double length) {
  KappaRates k;
  const double scale = c_light / (4.0 * length);
  k.kappa_oc = scale * mirrors.transmission_oc_ppm * 1e-6;
  k.kappa_loss =
      scale *
      (mirrors.transmission_hr_ppm + 2.0 * mirrors.parasitic_ppm_per_mirror) *
      1e-6;
  return k;
}

double coupling_g(const CavityGeometry& geom, double gamma_partial,
                  double atom_z_from_mirror1) {
  const ModeGeometry mode = mode_geometry(geom);
  const double w_atom = mode.radius_at(atom_z_from_mirror1);
  const double v_eff = pi * w_atom * w_atom * geom.length / 4.0;
  return std::sqrt(3.0 * c_light * geom.wavelength * geom.wavelength *
                   gamma_partial / (8.0 * pi * v_eff));
}

double cooperativity(double g, double kappa_total, double gamma) {
  return g * g / (kappa_total * gamma);
}

double fiber_overlap(double w_m, double r_m, double w_f, double wavelength,
                     double n_fiber) {
  const double ratio = w_f / w_m + w_m / w_f;
  const double phase = pi * n_fiber * w_f * w_m / (wavelength * r_m);
  return 4.0 / (ratio * ratio + phase * phase);
}

}  // namespace qrep
