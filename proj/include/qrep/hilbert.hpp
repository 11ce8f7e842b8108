#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace qrep {

using cd = std::complex<double>;
using SpMat = Eigen::SparseMatrix<cd, Eigen::RowMajor>;

// Tensor-product space of named factors; the first factor carries the
// slowest-varying index (conventional Kronecker ordering).
class HilbertSpace {
 public:
  struct Factor {
    std::string name;
    int dim;
  };

  HilbertSpace() = default;
  explicit HilbertSpace(std::vector<Factor> factors);

  int dim() const { return dim_; }
  int n_factors() const { return static_cast<int>(factors_.size()); }
  const Factor& factor(int k) const { return factors_[k]; }
  int index_of(const std::string& name) const;  // throws if absent

  // Basis index of the product state with the given per-factor levels.
  int basis_index(const std::vector<int>& levels) const;

  // Level of factor k within composite basis index i.
  int level_of(int i, int k) const;

  // op acting on factor k, identity elsewhere.
  SpMat embed(int k, const SpMat& op) const;
  SpMat embed(const std::string& name, const SpMat& op) const;

 private:
  std::vector<Factor> factors_;
  std::vector<int> strides_;
  int dim_ = 1;
};

SpMat sp_identity(int n);
SpMat sp_zero(int n);
// |a><b| in an n-level factor.
SpMat sp_transition(int n, int a, int b, cd amp = cd(1.0, 0.0));
// Bosonic annihilation operator truncated to n levels (0..n-1 quanta).
SpMat sp_destroy(int n);
SpMat sp_kron(const SpMat& a, const SpMat& b);

// <psi| op |psi> (op need not be Hermitian; returns the complex value).
cd expectation(const SpMat& op, const Eigen::VectorXcd& psi);
// Tr(op rho).
cd expectation(const SpMat& op, const Eigen::MatrixXcd& rho);

}  // namespace qrep
