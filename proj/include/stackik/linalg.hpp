#pragma once

#include <stdexcept>

#include <Eigen/Core>

namespace stackik {

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Gain applied to singular value `sigma` by the damped inverse.
/// With damping > 0 this is σ/(σ²+λ²) for every σ; with damping == 0 it is
/// 1/σ for σ ≥ cutoff and 0 otherwise.
inline double damped_inverse_gain(double sigma, double damping, double cutoff) {
  if (damping > 0.0) return sigma / (sigma * sigma + damping * damping);
  return (sigma > 0.0 && sigma >= cutoff) ? 1.0 / sigma : 0.0;
}

/// Thin SVD of a small dense matrix by one-sided (Hestenes) Jacobi
/// rotations. Buffers are sized on construction; `compute` on a matrix of
/// the same shape never allocates. Singular values come out sorted in
/// decreasing order; singular vectors of exactly-zero singular values are
/// left as zero columns.
class SmallSvd {
 public:
  SmallSvd() = default;
  SmallSvd(Eigen::Index rows, Eigen::Index cols);

  /// Throws std::invalid_argument on a shape mismatch.
  void compute(const Eigen::Ref<const Eigen::MatrixXd>& m);

  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }
  const Eigen::VectorXd& singular_values() const { return sigma_; }
  /// rows × k, k = min(rows, cols)
  const Eigen::MatrixXd& matrix_u() const { return u_; }
  /// cols × k
  const Eigen::MatrixXd& matrix_v() const { return v_; }
  int sweeps() const { return sweeps_; }

 private:
  Eigen::Index rows_ = 0;
  Eigen::Index cols_ = 0;
  Eigen::MatrixXd work_;
  Eigen::MatrixXd rot_;
  Eigen::VectorXd sigma_;
  Eigen::MatrixXd u_;
  Eigen::MatrixXd v_;
  int sweeps_ = 0;
};

/// V · diag(σᵢ/(σᵢ²+λ²)) · Uᵀ from a full SVD of M. Singular values below
/// sv_threshold · σ_max are rank-deficient: they are zeroed when
/// damping == 0 and left to the damped formula otherwise. Throws
/// NumericalError on non-finite input.
Eigen::MatrixXd damped_pinv(const Eigen::MatrixXd& m, double damping, double sv_threshold);

/// Number of singular values at or above sv_threshold · σ_max.
int numerical_rank(const Eigen::MatrixXd& m, double sv_threshold);

}  // namespace stackik
