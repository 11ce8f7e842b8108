#include "qrep/hilbert.hpp"

#include <stdexcept>

namespace qrep {

HilbertSpace::HilbertSpace(std::vector<Factor> factors)
    : factors_(std::move(factors)) {
  // Stride of factor k = product of the dimensions of all later factors.
  strides_.assign(factors_.size(), 1);
  for (int k = static_cast<int>(factors_.size()) - 1; k >= 0; --k) {
    strides_[k] = dim_;
    dim_ *= factors_[k].dim;
  }
}

int HilbertSpace::index_of(const std::string& name) const {
  for (std::size_t k = 0; k < factors_.size(); ++k) {
    if (factors_[k].name == name) return static_cast<int>(k);
  }
  throw std::invalid_argument("unknown Hilbert factor: " + name);
}

int HilbertSpace::basis_index(const std::vector<int>& levels) const {
  if (levels.size() != factors_.size()) {
    throw std::invalid_argument("level list does not match factor count");
  }
  int idx = 0;
  for (std::size_t k = 0; k < factors_.size(); ++k) {
    if (levels[k] < 0 || levels[k] >= factors_[k].dim) {
      throw std::out_of_range("level outside factor dimension");
    }
    idx += levels[k] * strides_[k];
  }
  return idx;
}

int HilbertSpace::level_of(int i, int k) const {
  return (i / strides_[k]) % factors_[k].dim;
}

SpMat HilbertSpace::embed(int k, const SpMat& op) const {
  if (op.rows() != factors_[k].dim || op.cols() != factors_[k].dim) {
    throw std::invalid_argument("operator does not match factor dimension");
  }
  SpMat out = sp_identity(1);
  for (int j = 0; j < n_factors(); ++j) {
    out = sp_kron(out, j == k ? op : sp_identity(factors_[j].dim));
  }
  return out;
}

SpMat HilbertSpace::embed(const std::string& name, const SpMat& op) const {
  return embed(index_of(name), op);
}

SpMat sp_identity(int n) {
  SpMat m(n, n);
  m.setIdentity();
  return m;
}

SpMat sp_zero(int n) { return SpMat(n, n); }

SpMat sp_transition(int n, int a, int b, cd amp) {
  SpMat m(n, n);
  m.insert(a, b) = amp;
  m.makeCompressed();
  return m;
}

SpMat sp_destroy(int n) {
  SpMat m(n, n);
  for (int k = 1; k < n; ++k) m.insert(k - 1, k) = std::sqrt(double(k));
  m.makeCompressed();
  return m;
}

SpMat sp_kron(const SpMat& a, const SpMat& b) {
  SpMat out(a.rows() * b.rows(), a.cols() * b.cols());
  std::vector<Eigen::Triplet<cd>> trip;
  trip.reserve(static_cast<std::size_t>(a.nonZeros()) * b.nonZeros());
  for (int i = 0; i < a.outerSize(); ++i) {
    for (SpMat::InnerIterator ia(a, i); ia; ++ia) {
      for (int j = 0; j < b.outerSize(); ++j) {
        for (SpMat::InnerIterator ib(b, j); ib; ++ib) {
          trip.emplace_back(ia.row() * b.rows() + ib.row(),
                            ia.col() * b.cols() + ib.col(),
                            ia.value() * ib.value());
        }
      }
    }
  }
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

cd expectation(const SpMat& op, const Eigen::VectorXcd& psi) {
  return psi.dot(op * psi);
}

cd expectation(const SpMat& op, const Eigen::MatrixXcd& rho) {
  return (op * rho).trace();
}

}  // namespace qrep
