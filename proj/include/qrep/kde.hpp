#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "qrep/cascade.hpp"

namespace qrep {

// Two-dimensional Gaussian kernel density estimate of the joint
// (herald arrival time, telecom arrival time) distribution.
//
// Rows index the herald-time grid, columns the telecom-time grid.
// `density` is normalized so that sum(density) * dt_herald * dt_telecom = 1.
// `batch_mass` holds the un-normalized kernel mass split over contiguous
// sample batches (summing to the total mass); it supports jackknife error
// bars on derived quantities.
struct KdeEstimate {
    std::vector<double> herald_times;   // grid points [s]
    std::vector<double> telecom_times;  // grid points [s]
    Eigen::MatrixXd density;            // joint density [1/s^2]
    std::vector<Eigen::MatrixXd> batch_mass;
    double dt_herald = 0.0;
    double dt_telecom = 0.0;
    double sigma_herald = 0.0;   // kernel bandwidth on the herald axis [s]
    double sigma_telecom = 0.0;  // kernel bandwidth on the telecom axis [s]
    std::size_t n_samples = 0;
};

// A one-dimensional temporal envelope on an explicit time grid,
// normalized so that sum(density) * dt = 1.
struct Envelope {
    std::vector<double> times;
    Eigen::VectorXd density;
    double dt = 0.0;
};

// Build the KDE from heralded arrival samples.  Bandwidths are tied to the
// cavity linewidths: sigma = 1 / (6 kappa_total) per axis.  The grid step is
// 0.25 ns and the grid spans [0, max arrival + 5 sigma] on each axis.
// Requires at least 100 samples and a nonzero spread on both axes.
KdeEstimate kde2d(const ArrivalSampleSet& samples, double kappa_t_total,
                  double kappa_h_total, int n_batches = 20);

// Telecom-time envelope conditioned on a herald detection at time t_h
// (nearest grid row, renormalized).  Throws std::domain_error when t_h lies
// outside the grid or in a region of negligible herald density.
Envelope conditional_envelope(const KdeEstimate& kde, double t_h);

// Telecom-time marginal (KDE integrated over the herald axis).
Envelope telecom_marginal(const KdeEstimate& kde);

// Herald-time marginal (KDE integrated over the telecom axis).
Envelope herald_marginal(const KdeEstimate& kde);

// Mode overlap of two single-photon temporal envelopes:
// (integral of sqrt(p1 p2))^2, evaluated on the shared grid.
// Both envelopes must share the same grid.  Result lies in [0, 1].
double pair_contrast(const Envelope& e1, const Envelope& e2);

// Herald-averaged two-photon contrast
//   C = sum_ij w_i w_j c_ij,
// where w is the herald-time marginal and c_ij the pair contrast of the
// telecom envelopes conditioned on herald times i and j.
double average_contrast(const KdeEstimate& kde);

struct ContrastEstimate {
    double value = 0.0;
    double stderr_ = 0.0;  // jackknife over sample batches
};

// Average contrast with a jackknife standard error over the stored batches.
ContrastEstimate average_contrast_error(const KdeEstimate& kde);

// Fidelity of the entangled state generated by interfering two identical
// sources, given the averaged contrast: F = (1 + C) / 2.
double fidelity_from_contrast(double contrast);

struct PostselectPoint {
    double window = 0.0;    // acceptance window on |t_h1 - t_h2| [s]
    double contrast = 0.0;  // contrast restricted to accepted pairs
    double retained = 0.0;  // probability a herald pair is accepted
};

// Contrast/efficiency trade-off when only herald pairs with
// |t_h1 - t_h2| <= window are accepted.
std::vector<PostselectPoint> postselect_tradeoff(
    const KdeEstimate& kde, const std::vector<double>& windows);

}  // namespace qrep
