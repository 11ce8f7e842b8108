#include "qrep/lindblad.hpp"

#include <stdexcept>

namespace qrep {

int LindbladModel::jump_index(const std::string& label) const {
  for (std::size_t k = 0; k < jumps.size(); ++k) {
    if (jumps[k].label == label) return static_cast<int>(k);
  }
  throw std::invalid_argument("unknown jump channel: " + label);
}

CompiledModel::CompiledModel(const LindbladModel& m) : dim_(m.dim) {
  const cd mi(0.0, -1.0);
  SpMat k_tot(dim_, dim_);
  for (const auto& j : m.jumps) {
    SpMat cadj = j.c.adjoint();
    SpMat cc = cadj * j.c;
    k_tot += cc;
    jump_ops_.push_back(j.c);
    jump_adj_.push_back(std::move(cadj));
    jump_labels_.push_back(j.label);
  }
  a_ = mi * m.h0 - cd(0.5, 0.0) * k_tot;
  a_.makeCompressed();
  a_adj_ = a_.adjoint();
  a_adj_.makeCompressed();
  for (const auto& d : m.drives) {
    SpMat dd = mi * d.op;
    dd.makeCompressed();
    drive_ops_.push_back(std::move(dd));
    drive_coeffs_.push_back(d.coeff);
  }
}

Eigen::VectorXcd CompiledModel::rhs_psi(double t,
                                        const Eigen::VectorXcd& psi) const {
  Eigen::VectorXcd out = a_ * psi;
  for (std::size_t j = 0; j < drive_ops_.size(); ++j) {
    double f = drive_coeffs_[j](t);
    if (f != 0.0) out.noalias() += f * (drive_ops_[j] * psi);
  }
  return out;
}

Eigen::MatrixXcd CompiledModel::rhs_rho(double t,
                                        const Eigen::MatrixXcd& rho) const {
  Eigen::MatrixXcd out = a_ * rho;
  out.noalias() += rho * a_adj_;
  for (std::size_t j = 0; j < drive_ops_.size(); ++j) {
    double f = drive_coeffs_[j](t);
    if (f != 0.0) {
      // D = -i op is anti-Hermitian, so rho M^dag picks up -f rho D.
      out.noalias() += f * (drive_ops_[j] * rho);
      out.noalias() -= f * (rho * drive_ops_[j]);
    }
  }
  for (std::size_t k = 0; k < jump_ops_.size(); ++k) {
    Eigen::MatrixXcd crho = jump_ops_[k] * rho;
    out.noalias() += crho * jump_adj_[k];
  }
  return out;
}

std::vector<std::vector<double>> evolve_master(
    const CompiledModel& m, Eigen::MatrixXcd& rho,
    const std::vector<double>& times, const std::vector<SpMat>& observables,
    const IntegratorOptions& opt) {
  std::vector<std::vector<double>> exps(observables.size());
  for (auto& v : exps) v.reserve(times.size());
  if (times.empty()) return exps;

  auto rhs = [&m](double t, const Eigen::MatrixXcd& r) {
    return m.rhs_rho(t, r);
  };
  Dopri5<Eigen::MatrixXcd, decltype(rhs)&> stepper(rhs, opt);
  stepper.init(times.front(), rho);

  auto record = [&](const Eigen::MatrixXcd& r) {
    for (std::size_t o = 0; o < observables.size(); ++o) {
      exps[o].push_back(expectation(observables[o], r).real());
    }
  };
  record(rho);
  for (std::size_t i = 1; i < times.size(); ++i) {
    while (stepper.step(times[i])) {
    }
    record(stepper.y());
  }
  rho = stepper.y();
  return exps;
}

}  // namespace qrep
