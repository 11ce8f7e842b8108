#pragma once

namespace qrep {

// Mirror losses in parts per million per bounce.
struct MirrorSet {
  double transmission_oc_ppm = 0.0;
  double transmission_hr_ppm = 0.0;
  double parasitic_ppm_per_mirror = 0.0;
};

// Two-mirror Fabry-Perot geometry.  Mirror 1 carries roc1 and sits at z = 0;
// mirror 2 carries roc2 and sits at z = length.
struct CavityGeometry {
  double length = 0.0;      // m
  double roc1 = 0.0;        // m
  double roc2 = 0.0;        // m
  double wavelength = 0.0;  // m
};

struct ModeGeometry {
  double w0 = 0.0;              // waist radius, m
  double waist_position = 0.0;  // m from mirror 1
  double rayleigh_range = 0.0;  // m

  // 1/e^2 intensity radius at position z measured from mirror 1.
  double radius_at(double z_from_mirror1) const;
};

struct KappaRates {
  double kappa_oc = 0.0;    // rad/s (field decay through the output coupler)
  double kappa_loss = 0.0;  // rad/s (all other round-trip losses)
  double total() const { return kappa_oc + kappa_loss; }
};

// Gaussian TEM00 mode of a stable two-mirror resonator.  Throws
// std::domain_error for unstable geometries (g1 g2 outside [0, 1]).
ModeGeometry mode_geometry(const CavityGeometry& geom);

// kappa_oc = c T_oc / (4L); kappa_loss = c (T_hr + 2 parasitic) / (4L).
KappaRates kappa_rates(const MirrorSet& mirrors, double length);

// Atom-field coupling for a dipole transition with partial linewidth
// Gamma_partial (rad/s, population-decay convention):
//   g = sqrt(3 c lambda^2 Gamma_partial / (8 pi V_eff)),
//   V_eff = pi w(z_atom)^2 L / 4.
double coupling_g(const CavityGeometry& geom, double gamma_partial,
                  double atom_z_from_mirror1);

// C = g^2 / (kappa_total Gamma).
double cooperativity(double g, double kappa_total, double gamma);

// Power overlap of the cavity mode (radius w_m, wavefront curvature radius
// r_m at the coupling mirror) with a fiber mode of radius w_f whose phase
// front is flat; n_f is the fiber core index:
//   eps = 4 / [ (w_f/w_m + w_m/w_f)^2 + (pi n_f w_f w_m / (lambda r_m))^2 ].
double fiber_overlap(double w_m, double r_m, double w_f, double wavelength,
                     double n_fiber);

}  // namespace qrep
