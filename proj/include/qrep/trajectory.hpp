#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "qrep/lindblad.hpp"
#include "qrep/rng.hpp"

namespace qrep {

struct JumpEvent {
  double t = 0.0;
  int channel = -1;
};

struct TrajectoryResult {
  std::vector<JumpEvent> jumps;
  Eigen::VectorXcd psi_final;  // normalized
  std::int64_t rhs_evals = 0;
};

struct TrajectoryOptions {
  IntegratorOptions integrator;
  double jump_time_tol = 1e-12;  // bisection tolerance on the jump instant
};

// Observer invoked at requested sample times with the unnormalized
// wavefunction (norm^2 < 1 between jumps); normalize expectations as
// <O> = <psi|O|psi>/<psi|psi>.
using TrajectorySampler =
    std::function<void(std::size_t /*time index*/, const Eigen::VectorXcd&)>;

// One quantum trajectory of the unraveled master equation on [t0, t1]:
// deterministic drift under A + sum f_j D_j, jump when |psi|^2 falls to the
// next uniform threshold, channel k chosen with probability proportional to
// |C_k psi|^2, jump instants located by bisection on the dense output.
TrajectoryResult run_trajectory(
    const CompiledModel& m, const Eigen::VectorXcd& psi0, double t0, double t1,
    Rng& rng, const TrajectoryOptions& opt = TrajectoryOptions{},
    const std::vector<double>* sample_times = nullptr,
    const TrajectorySampler& sampler = nullptr);

// Ensemble-averaged Hermitian observables over n trajectories; trajectory i
// draws from stream (seed, index0 + i).  Returns [obs][time] means.
struct EnsembleAverages {
  std::vector<std::vector<double>> mean;    // [obs][time]
  std::vector<std::vector<double>> stderr_; // [obs][time]
  std::size_t n_traj = 0;
};
EnsembleAverages average_observables(
    const CompiledModel& m, const Eigen::VectorXcd& psi0,
    const std::vector<double>& times, const std::vector<SpMat>& observables,
    std::size_t n_traj, std::uint64_t seed, std::uint64_t index0 = 0,
    const TrajectoryOptions& opt = TrajectoryOptions{});

}  // namespace qrep
