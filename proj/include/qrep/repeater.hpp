#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "qrep/stats.hpp"

namespace qrep {

// Parameters of one elementary repeater link and of the swap operation.
struct LinkParams {
    double l0_km = 50.0;            // elementary link length [km]
    double attenuation_km = 22.0;   // fiber attenuation length [km]
    double fiber_speed_km_s = 2.0e5;  // signal velocity in fiber [km/s]
    double processing_time_s = 100e-6;  // per-attempt local processing [s]
    double p_ht = 0.53;             // herald & telecom two-photon probability
    double eta_h = 0.8;             // heralding detection efficiency
    double eta_t = 0.8;             // telecom detection efficiency
    double retrieval = 0.61;        // photon retrieval for the swap readout
    double projection = 0.8;        // Bell-projection success weight

    void validate() const;  // throws std::invalid_argument on bad values
};

// Success probability of one elementary entanglement attempt:
//   p_e = 1/2 (p_ht eta_h eta_t)^2 exp(-L0 / L_att).
double entangle_prob(const LinkParams& p);

// Success probability of one entanglement swap:  p_es = R p_p eta_h.
double swap_prob(const LinkParams& p);

// Duration of one attempt cycle:  L0 / c_fiber + processing time  [s].
double cycle_time(const LinkParams& p);

// Expected number of cycles until all of n parallel geometric processes with
// per-cycle success probability p have succeeded:
//   Z_n(p) = sum_{j=1..n} C(n,j) (-1)^{j+1} / (1 - (1-p)^j).
// Throws std::invalid_argument unless 0 < p <= 1.
double z_n(int n, double p);

// Expected cycles to distribute entanglement over n links with the restart
// strategy (discard everything when any swap fails):  Z_n(pe) / pes^(n-1).
double attempts_restart(int n, double pe, double pes);

// Expected storage cycles of the longest-held pair with the restart
// strategy:  Z_{n-1}(pe) + 1  (1 for n = 1).
double storage_restart_cycles(int n, double pe);

enum class Strategy { keep, restart };

struct McEstimate {
    double mean = 0.0;
    Interval ci95;  // percentile bootstrap of the mean
    std::size_t runs = 0;
};

struct ChainEnsemble {
    McEstimate attempts;  // cycles until the end-to-end pair exists
    McEstimate storage;   // cycles the oldest surviving pair waited
};

// Monte Carlo of the full chain protocol.  Links attempt entanglement every
// cycle; a node swaps as soon as both adjacent pairs exist (all eligible
// swaps happen within the cycle, left to right).  Strategy `keep` reverts
// only the two pairs consumed by a failed swap; `restart` discards all
// pairs when any swap of the final cascade fails.
ChainEnsemble simulate_chain(int n, double pe, double pes, Strategy strategy,
                             std::size_t runs, std::uint64_t seed);

struct RatePoint {
    double l_km = 0.0;      // total distance
    double rate_hz = 0.0;   // distributed pairs per second
    Interval rate_ci;       // only meaningful when mc == true
    bool mc = false;
};

// Entanglement distribution rate over total distance l_km with n links.
// The restart strategy is evaluated in closed form; keep uses Monte Carlo.
RatePoint distribution_rate(const LinkParams& base, int n, Strategy strategy,
                            double l_km, std::size_t runs, std::uint64_t seed);

std::vector<RatePoint> rate_vs_distance(const LinkParams& base, int n,
                                        Strategy strategy,
                                        const std::vector<double>& l_grid_km,
                                        std::size_t runs, std::uint64_t seed);

struct StoragePoint {
    double l_km = 0.0;
    double storage_s = 0.0;  // mean storage time of the oldest pair
    Interval storage_ci;
};

// Mean storage time of the longest-held pair, from the chain Monte Carlo.
StoragePoint storage_time(const LinkParams& base, int n, Strategy strategy,
                          double l_km, std::size_t runs, std::uint64_t seed);

std::vector<StoragePoint> storage_vs_distance(
    const LinkParams& base, int n, Strategy strategy,
    const std::vector<double>& l_grid_km, std::size_t runs,
    std::uint64_t seed);

}  // namespace qrep
