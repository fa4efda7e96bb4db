#include "stackik/linalg.hpp"

#include <cmath>
#include <limits>

namespace stackik {

namespace {

constexpr int kMaxSweeps = 64;

}  // namespace

SmallSvd::SmallSvd(Eigen::Index rows, Eigen::Index cols) : rows_(rows), cols_(cols) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("SmallSvd: empty shape");
  const Eigen::Index k = std::min(rows, cols);
  const Eigen::Index m = std::max(rows, cols);
  work_.setZero(m, k);
  rot_.setZero(k, k);
  sigma_.setZero(k);
  u_.setZero(rows, k);
  v_.setZero(cols, k);
}

void SmallSvd::compute(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  if (m.rows() != rows_ || m.cols() != cols_) throw std::invalid_argument("SmallSvd: shape mismatch");
  // Orthogonalize the k columns of the tall orientation B (m×k):
  // B·W = Q with Q column-orthogonal, so B = Q·Wᵀ.
  const bool wide = rows_ <= cols_;
  if (wide) {
    work_ = m.transpose();
  } else {
    work_ = m;
  }
  const Eigen::Index k = work_.cols();
  rot_.setIdentity();

  const double tol = std::numeric_limits<double>::epsilon() * static_cast<double>(work_.rows());
  sweeps_ = 0;
  bool rotated = true;
  while (rotated && sweeps_ < kMaxSweeps) {
    rotated = false;
    ++sweeps_;
    // Squared column norms, refreshed once per sweep and updated in closed
    // form after each rotation.
    for (Eigen::Index j = 0; j < k; ++j) sigma_(j) = work_.col(j).squaredNorm();
    for (Eigen::Index p = 0; p + 1 < k; ++p) {
      for (Eigen::Index q = p + 1; q < k; ++q) {
        const double alpha = sigma_(p);
        const double beta = sigma_(q);
        const double gamma = work_.col(p).dot(work_.col(q));
        if (gamma == 0.0 || std::abs(gamma) <= tol * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        sigma_(p) = alpha - t * gamma;
        sigma_(q) = beta + t * gamma;
        for (Eigen::Index i = 0; i < work_.rows(); ++i) {
          const double bp = work_(i, p);
          const double bq = work_(i, q);
          work_(i, p) = c * bp - s * bq;
          work_(i, q) = s * bp + c * bq;
        }
        for (Eigen::Index i = 0; i < k; ++i) {
          const double wp = rot_(i, p);
          const double wq = rot_(i, q);
          rot_(i, p) = c * wp - s * wq;
          rot_(i, q) = s * wp + c * wq;
        }
      }
    }
  }

  for (Eigen::Index j = 0; j < k; ++j) sigma_(j) = work_.col(j).norm();

  // Selection sort by decreasing singular value, swapping columns in place.
  for (Eigen::Index j = 0; j + 1 < k; ++j) {
    Eigen::Index best = j;
    for (Eigen::Index i = j + 1; i < k; ++i) {
      if (sigma_(i) > sigma_(best)) best = i;
    }
    if (best != j) {
      std::swap(sigma_(j), sigma_(best));
      work_.col(j).swap(work_.col(best));
      rot_.col(j).swap(rot_.col(best));
    }
  }

  // wide:  M = Bᵀ = W·Qᵀ → U = W, V = Q·Σ⁻¹
  // tall:  M = B  = Q·Wᵀ → U = Q·Σ⁻¹, V = W
  Eigen::MatrixXd& normalized = wide ? v_ : u_;
  Eigen::MatrixXd& rotation = wide ? u_ : v_;
  rotation = rot_;
  for (Eigen::Index j = 0; j < k; ++j) {
    if (sigma_(j) > 0.0) {
      normalized.col(j) = work_.col(j) / sigma_(j);
    } else {
      normalized.col(j).setZero();
    }
  }
}

Eigen::MatrixXd damped_pinv(const Eigen::MatrixXd& m, double damping, double sv_threshold) {
  if (damping < 0.0) throw std::invalid_argument("damped_pinv: damping must be nonnegative");
  if (!(sv_threshold > 0.0)) throw std::invalid_argument("damped_pinv: sv_threshold must be positive");
  if (m.rows() < 1 || m.cols() < 1) throw std::invalid_argument("damped_pinv: empty matrix");
  if (!m.allFinite()) throw NumericalError("damped_pinv: matrix has non-finite entries");
  SmallSvd svd(m.rows(), m.cols());
  svd.compute(m);
  const auto& sigma = svd.singular_values();
  const double cutoff = sv_threshold * sigma(0);
  Eigen::VectorXd gains(sigma.size());
  for (Eigen::Index i = 0; i < sigma.size(); ++i) gains(i) = damped_inverse_gain(sigma(i), damping, cutoff);
  return svd.matrix_v() * gains.asDiagonal() * svd.matrix_u().transpose();
}

int numerical_rank(const Eigen::MatrixXd& m, double sv_threshold) {
  if (m.rows() < 1 || m.cols() < 1) throw std::invalid_argument("numerical_rank: empty matrix");
  if (!m.allFinite()) throw NumericalError("numerical_rank: matrix has non-finite entries");
  SmallSvd svd(m.rows(), m.cols());
  svd.compute(m);
  const auto& sigma = svd.singular_values();
  const double cutoff = sv_threshold * sigma(0);
  int rank = 0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma(i) > 0.0 && sigma(i) >= cutoff) ++rank;
  }
  return rank;
}

}  // namespace stackik
