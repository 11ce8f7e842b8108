#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "qrep/constants.hpp"
#include "qrep/hilbert.hpp"
#include "qrep/lindblad.hpp"
#include "qrep/stats.hpp"
#include "qrep/trajectory.hpp"

namespace qrep {

// Atomic level scheme of the two-stage cascade.
//
// States: g (initial ground), e (upper excited), i∓ (intermediate states
// reached by telecom-photon emission), f∓ (final ground states reached by
// herald emission), sink (absorber for decays that leave the simulated
// system).  The second herald polarization mode adds m0 and m∓2 ground
// states.
//
// The herald-stage relative amplitudes follow the (a, b, c) convention:
// from i₋ the three decay paths go to m0 (amplitude a), f₋ (b, the herald
// transition) and m₋2 (c); primed letters are the mirror-image paths from
// i₊.  |a|=|a′|, |b|=|b′|, |c|=|c′| is required.  Amplitude-squares are
// normalized such that branching(x) = x² / (S / (1 − f₁)) with
// S = a² + b² + c² and f₁ the fixed branching into the lower hyperfine
// ground manifold (always outside the system).
//
// The telecom-stage relative sign between the e→i₋ and e→i₊ paths and the
// herald-stage sign between i₋→f₋ and i₊→f₊ are set by the phases
// theta and theta_tilde (each 0 or π): the i₊ telecom amplitude carries
// cos(theta) and the f₊ herald amplitude carries cos(theta_tilde − theta).
struct LevelScheme {
  double a = -1.0;
  double a_p = -1.0;
  double b = 1.7320508075688772;    // sqrt(3)
  double b_p = 1.7320508075688772;
  double c = -2.449489742783178;    // sqrt(6)
  double c_p = -2.449489742783178;
  double branching_f1 = 1.0 / 6.0;  // i∓ → lower hyperfine ground manifold

  double theta = pi;
  double theta_tilde = pi;

  // Population-decay rates, rad/s.
  double gamma_e_to_i = mhz_2pi(1.62);    // e → intermediate fine-structure level
  double gamma_e_out = mhz_2pi(0.30);     // e → other fine-structure level
  double sigma_fraction = 5.0 / 12.0;     // share of gamma_e_to_i per i∓ branch
  double gamma_i_total = mhz_2pi(5.75);   // i∓ total linewidth

  double gamma_e_total() const { return gamma_e_to_i + gamma_e_out; }
  void validate() const;  // throws std::invalid_argument on violated invariants
};

// Crossed-cavity rates (all rad/s; kappa is the field decay rate, so a mode
// with total kappa loses photons at rate 2*kappa).
struct CrossedCavityParams {
  double g_t = mhz_2pi(70.25);
  double kappa_t_oc = mhz_2pi(95.43);
  double kappa_t_loss = mhz_2pi(7.95);
  double g_h = mhz_2pi(16.3);
  double kappa_h_oc = mhz_2pi(11.93);
  double kappa_h_loss = mhz_2pi(1.49);
  double second_mode_detuning = 0.0;  // rad/s, used with second heralding mode
  double fiber_overlap = 0.96;        // classical telecom fiber-coupling efficiency
};

// Gaussian control pulse driving the effective g <-> e transition:
// Omega(t) = omega0 * exp(-4 ln2 ((t - center)/fwhm)^2).
struct ControlPulse {
  double fwhm = 5.9 * ns;
  double omega0 = 0.0;  // rad/s, peak effective Rabi rate
  double center = 0.0;  // s

  GaussianPulse envelope() const { return GaussianPulse{omega0, center, fwhm}; }
  double area() const { return envelope().area(); }
};

struct CascadeBuildOptions {
  bool worst_case_recycling = false;  // decays leaving the system collapse to g
  bool second_heralding_mode = false; // add the orthogonal herald polarization
  int telecom_truncation = 1;         // photons per telecom mode (2 for the
                                      // multi-photon study)
  double recycling_boost = 1.0;       // rate multiplier on recycled channels
  double light_shift = 0.0;           // rad/s, constant detuning on |e>

  bool dark_state = false;            // optional far-detuned parasitic level
  double dark_detuning = mhz_2pi(500.0);
  double dark_drive_ratio = 1.0;      // drive amplitude relative to g<->e
};

// Assembled system: Hilbert-space layout, Lindblad model and bookkeeping.
struct CascadeModel {
  HilbertSpace space;
  LindbladModel lindblad;
  LevelScheme scheme;
  CrossedCavityParams cavities;
  ControlPulse pulse;
  CascadeBuildOptions options;

  // Atom basis indices (-1 when the state is absent).  m0 and m∓2 are the
  // stable storage sublevels reached by free-space decay of i∓; sink absorbs
  // population that leaves the modeled level set entirely.
  int s_g = 0, s_e = 1, s_im = 2, s_ip = 3, s_fm = 4, s_fp = 5;
  int s_m0 = 6, s_mm2 = 7, s_mp2 = 8, s_sink = 9;
  int s_dark = -1;
  // Factor indices.
  int f_atom = 0, f_tel_p = 1, f_tel_m = 2, f_her = 3, f_her2 = -1;

  Eigen::VectorXcd initial_state() const;  // |g, vacuum>
  SpMat atom_population(int atom_state) const;
  SpMat mode_number(int factor) const;
};

CascadeModel build_model(const LevelScheme& scheme,
                         const CrossedCavityParams& cavities,
                         const ControlPulse& pulse,
                         const CascadeBuildOptions& options = {});

// Simulation window used throughout: the pulse is centered at 2.2*fwhm and
// the window extends to max(60 ns, 4.4*fwhm + 45 ns) so that both output
// wave packets (the herald tail in particular) are captured.
struct SimulationWindow {
  double pulse_center;
  double t_end;
};
SimulationWindow simulation_window(double fwhm);

// Residual population in g at t_end for a given pulse, computed from the
// no-jump (non-Hermitian) evolution.  Exact for models in which no collapse
// channel repopulates g (the default cascade).
double residual_ground_population(const CascadeModel& model);

// Finds the minimal peak Rabi rate omega0 (within 1% bisection accuracy)
// whose residual ground population at the end of the window is < 1%.
// The builder receives a fully specified pulse (fwhm, center, omega0).
// Throws std::runtime_error if the residual cannot be brought below 1%.
double calibrate_pulse(
    const std::function<CascadeModel(const ControlPulse&)>& builder,
    double fwhm);

// Convenience overload for the standard model.
double calibrate_pulse(const LevelScheme& scheme,
                       const CrossedCavityParams& cavities, double fwhm);

// Output photon fluxes 2*kappa_oc*<n> (photons/s) on a time grid, from the
// master equation.
struct FluxCurves {
  std::vector<double> times;            // s
  std::vector<double> flux_entangling;  // photons/s, sigma+ plus sigma-
  std::vector<double> flux_heralding;   // photons/s
  std::vector<double> flux_heralding2;  // photons/s (empty unless second mode)
};
FluxCurves flux_curves(const CascadeModel& model,
                       const std::vector<double>& times);

// One recorded herald/telecom arrival-time pair.
struct ArrivalSample {
  double t_herald = 0.0;   // s
  double t_telecom = 0.0;  // s
  bool herald_oc = true;
  bool telecom_oc_and_fiber = false;  // includes the fiber-coupling draw
  int extra_photons = 0;              // telecom output photons beyond the first
};

struct ArrivalSampleSet {
  std::vector<ArrivalSample> samples;
};

struct CascadeOutcome {
  double p_ht = 0.0;
  double p_ht_stderr = 0.0;
  // Failure probabilities by cause; p_ht + sum(loss_budget) = 1.
  std::map<std::string, double> loss_budget;
  std::map<std::string, double> loss_budget_stderr;
  ArrivalSampleSet samples;
  std::size_t n_traj = 0;
  std::size_t n_success = 0;  // exactly one herald and one telecom output photon
};

// Monte Carlo estimate of the heralded success probability p_ht: the
// fraction of trajectories with exactly one herald photon through the
// heralding output coupler and exactly one telecom photon through the
// entangling output coupler, multiplied by the fiber overlap.  Failures are
// attributed to the first loss event: free_space_5p12 (spontaneous decay of
// the intermediate level), entangling_parasitic, heralding_parasitic, or
// other (upper-level free-space decay, incomplete emission, fiber coupling).
CascadeOutcome success_probability(const CascadeModel& model,
                                   std::size_t n_traj, std::uint64_t seed);

struct SweepPoint {
  double fwhm = 0.0;
  double p_ht = 0.0;
  double stderr_ = 0.0;
};

// Calibrates the pulse and evaluates p_ht for each FWHM.
std::vector<SweepPoint> sweep_fwhm(const LevelScheme& scheme,
                                   const CrossedCavityParams& cavities,
                                   const std::vector<double>& fwhms,
                                   std::size_t n_traj, std::uint64_t seed);

struct MultiphotonResult {
  double fraction = 0.0;
  Interval ci95;
  std::size_t n_heralded = 0;
  std::size_t n_multi = 0;
};

// Fraction of heralded trajectories (>= 1 herald output photon) that emit
// two or more telecom output photons, under worst-case recycling.  The model
// must have telecom truncation >= 2.
MultiphotonResult multiphoton_fraction(const CascadeModel& model,
                                       std::size_t n_traj,
                                       std::uint64_t seed);

}  // namespace qrep
