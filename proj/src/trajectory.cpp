#include "qrep/trajectory.hpp"

#include <cmath>
#include <stdexcept>

namespace qrep {

namespace {

double draw_threshold(Rng& rng) {
  double r;
  do {
    r = rng.uniform();
  } while (r == 0.0);  // r in (0,1): r=1 would fire at t0, r=0 never
  return r;
}

}  // namespace

TrajectoryResult run_trajectory(const CompiledModel& m,
                                const Eigen::VectorXcd& psi0, double t0,
                                double t1, Rng& rng,
                                const TrajectoryOptions& opt,
                                const std::vector<double>* sample_times,
                                const TrajectorySampler& sampler) {
  TrajectoryResult res;
  auto rhs = [&m](double t, const Eigen::VectorXcd& y) {
    return m.rhs_psi(t, y);
  };
  Dopri5<Eigen::VectorXcd, decltype(rhs)&> stepper(rhs, opt.integrator);
  stepper.init(t0, psi0);

  std::size_t next_sample = 0;
  auto emit_through = [&](double t_hi, auto&& state_at) {
    if (!sampler || !sample_times) return;
    while (next_sample < sample_times->size() &&
           (*sample_times)[next_sample] <= t_hi) {
      sampler(next_sample, state_at((*sample_times)[next_sample]));
      ++next_sample;
    }
  };
  // Samples exactly at t0 see the initial state.
  emit_through(t0, [&](double) -> const Eigen::VectorXcd& { return psi0; });

  double r = draw_threshold(rng);
  while (stepper.step(t1)) {
    double n2 = stepper.y().squaredNorm();
    if (n2 > r) {
      emit_through(stepper.t(),
                   [&](double s) { return stepper.dense(s); });
      continue;
    }
    // Norm fell through the threshold inside [t_prev, t]: bisect the
    // crossing time on the dense interpolant.
    double a = stepper.t_prev();
    double b = stepper.t();
    while (b - a > opt.jump_time_tol) {
      double mid = 0.5 * (a + b);
      if (stepper.dense(mid).squaredNorm() > r) {
        a = mid;
      } else {
        b = mid;
      }
    }
    double t_jump = b;
    Eigen::VectorXcd psi_m = stepper.dense(t_jump);
    emit_through(t_jump, [&](double s) { return stepper.dense(s); });

    // Channel selection with probability |C_k psi|^2 / sum_k |C_k psi|^2.
    int n_jump = m.n_jumps();
    std::vector<Eigen::VectorXcd> cpsi(n_jump);
    std::vector<double> w(n_jump);
    double w_tot = 0.0;
    for (int k = 0; k < n_jump; ++k) {
      cpsi[k] = m.jump_op(k) * psi_m;
      w[k] = cpsi[k].squaredNorm();
      w_tot += w[k];
    }
    if (w_tot <= 0.0) {
      // No channel can fire (numerical norm floor); stop jumping.
      r = 0.0;
      stepper.restart(t_jump, psi_m);
      continue;
    }
    double u = rng.uniform() * w_tot;
    int pick = n_jump - 1;
    double acc = 0.0;
    for (int k = 0; k < n_jump; ++k) {
      acc += w[k];
      if (u < acc) {
        pick = k;
        break;
      }
    }
    res.jumps.push_back({t_jump, pick});
    Eigen::VectorXcd psi_new = cpsi[pick] / std::sqrt(w[pick]);
    r = draw_threshold(rng);
    stepper.restart(t_jump, psi_new);
  }
  emit_through(t1, [&](double) -> const Eigen::VectorXcd& {
    return stepper.y();
  });

  res.psi_final = stepper.y();
  double nf = res.psi_final.norm();
  if (nf > 0.0) res.psi_final /= nf;
  res.rhs_evals = stepper.rhs_evals();
  return res;
}

EnsembleAverages average_observables(const CompiledModel& m,
                                     const Eigen::VectorXcd& psi0,
                                     const std::vector<double>& times,
                                     const std::vector<SpMat>& observables,
                                     std::size_t n_traj, std::uint64_t seed,
                                     std::uint64_t index0,
                                     const TrajectoryOptions& opt) {
  std::size_t n_obs = observables.size();
  std::size_t n_t = times.size();
  std::vector<std::vector<double>> sum(n_obs, std::vector<double>(n_t, 0.0));
  std::vector<std::vector<double>> sum2(n_obs, std::vector<double>(n_t, 0.0));

  for (std::size_t i = 0; i < n_traj; ++i) {
    Rng rng(seed, index0 + i);
    auto sampler = [&](std::size_t ti, const Eigen::VectorXcd& psi) {
      double n2 = psi.squaredNorm();
      if (n2 <= 0.0) return;
      for (std::size_t o = 0; o < n_obs; ++o) {
        double v = expectation(observables[o], psi).real() / n2;
        sum[o][ti] += v;
        sum2[o][ti] += v * v;
      }
    };
    run_trajectory(m, psi0, times.front(), times.back(), rng, opt, &times,
                   sampler);
  }

  EnsembleAverages out;
  out.n_traj = n_traj;
  out.mean.assign(n_obs, std::vector<double>(n_t, 0.0));
  out.stderr_.assign(n_obs, std::vector<double>(n_t, 0.0));
  double n = static_cast<double>(n_traj);
  for (std::size_t o = 0; o < n_obs; ++o) {
    for (std::size_t ti = 0; ti < n_t; ++ti) {
      double mu = sum[o][ti] / n;
      out.mean[o][ti] = mu;
      if (n_traj > 1) {
        double var = (sum2[o][ti] - n * mu * mu) / (n - 1.0);
        out.stderr_[o][ti] = std::sqrt(std::max(0.0, var) / n);
      }
    }
  }
  return out;
}

}  // namespace qrep
