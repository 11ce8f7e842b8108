#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qrep/hilbert.hpp"
#include "qrep/integrator.hpp"

namespace qrep {

// Time-dependent Hamiltonian term H_j(t) = coeff(t) * op with op Hermitian
// and coeff real.
struct Drive {
  SpMat op;
  std::function<double(double)> coeff;
};

// Collapse operator with a label used by estimators to classify events.
struct JumpChannel {
  SpMat c;
  std::string label;
};

// Open-system model: H(t) = h0 + sum_j coeff_j(t) op_j, plus collapse
// operators {C_k}.  Rates follow the convention that C_k fully carries its
// channel rate (e.g. sqrt(2 kappa) a for a cavity field decaying at field
// rate kappa, sqrt(Gamma_partial) |lo><hi| for a radiative branch).
struct LindbladModel {
  int dim = 0;
  SpMat h0;
  std::vector<Drive> drives;
  std::vector<JumpChannel> jumps;

  int jump_index(const std::string& label) const;  // throws if absent
};

// Precomputed operators shared by the wavefunction and density-matrix
// propagators: A = -i h0 - (1/2) sum_k C_k^dag C_k, plus -i op_j for drives.
class CompiledModel {
 public:
  explicit CompiledModel(const LindbladModel& m);

  int dim() const { return dim_; }
  const SpMat& a() const { return a_; }
  int n_drives() const { return static_cast<int>(drive_ops_.size()); }
  double drive_coeff(int j, double t) const { return drive_coeffs_[j](t); }
  const SpMat& drive_op(int j) const { return drive_ops_[j]; }  // -i op_j
  int n_jumps() const { return static_cast<int>(jump_ops_.size()); }
  const SpMat& jump_op(int k) const { return jump_ops_[k]; }
  const SpMat& jump_op_adj(int k) const { return jump_adj_[k]; }
  const std::string& jump_label(int k) const { return jump_labels_[k]; }

  // d psi = (A + sum_j f_j(t) D_j) psi   (non-Hermitian evolution)
  Eigen::VectorXcd rhs_psi(double t, const Eigen::VectorXcd& psi) const;

  // d rho = M rho + rho M^dag + sum_k C_k rho C_k^dag,  M = -iH(t) - K/2
  Eigen::MatrixXcd rhs_rho(double t, const Eigen::MatrixXcd& rho) const;

 private:
  int dim_;
  SpMat a_;       // -i h0 - K/2
  SpMat a_adj_;   // A^dag
  std::vector<SpMat> drive_ops_;  // -i op_j (anti-Hermitian)
  std::vector<std::function<double(double)>> drive_coeffs_;
  std::vector<SpMat> jump_ops_;
  std::vector<SpMat> jump_adj_;
  std::vector<std::string> jump_labels_;
};

// Density-matrix propagation, sampling Hermitian observables on a time grid.
// Returns expectations[obs][time]; rho is advanced in place.
std::vector<std::vector<double>> evolve_master(
    const CompiledModel& m, Eigen::MatrixXcd& rho,
    const std::vector<double>& times, const std::vector<SpMat>& observables,
    const IntegratorOptions& opt = IntegratorOptions{});

}  // namespace qrep
