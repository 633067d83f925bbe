#pragma once

// Dense numeric kernels shared by the encoder and the reduction stage.
// All functions are row-oriented: one row per token.

#include <cmath>

#include <Eigen/Dense>

namespace chemtok {

/// Row-wise softmax of `logits + bias` where `bias(j)` is added to every
/// entry of column j. Each row is shifted by its maximum before exponentiation.
template <typename Derived, typename BiasDerived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> softmax_rows(
    const Eigen::MatrixBase<Derived>& logits, const Eigen::MatrixBase<BiasDerived>& column_bias) {
  using Scalar = typename Derived::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out =
      logits.rowwise() + column_bias.derived().transpose();
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const Scalar m = out.row(i).maxCoeff();
    out.row(i) = (out.row(i).array() - m).exp().matrix();
    out.row(i) /= out.row(i).sum();
  }
  return out;
}

template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> softmax_rows(
    const Eigen::MatrixBase<Derived>& logits) {
  using Vec = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>;
  return softmax_rows(logits, Vec::Zero(logits.cols()));
}

/// Per-row layer normalization with unit gain and zero shift.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> layer_norm_rows(
    const Eigen::MatrixBase<Derived>& x, typename Derived::Scalar eps = 1e-6) {
  using Scalar = typename Derived::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const Scalar mean = x.row(i).mean();
    const auto centered = (x.row(i).array() - mean).eval();
    const Scalar var = centered.square().mean();
    out.row(i) = (centered / std::sqrt(var + eps)).matrix();
  }
  return out;
}

/// tanh approximation of GELU, applied elementwise.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> gelu(
    const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  const Scalar c = std::sqrt(Scalar(2) / Scalar(M_PI));
  const auto a = x.array();
  return (Scalar(0.5) * a * (Scalar(1) + (c * (a + Scalar(0.044715) * a.cube())).tanh())).matrix();
}

/// Rows scaled to unit L2 norm; rows with norm below `eps` become zero.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> normalized_rows(
    const Eigen::MatrixBase<Derived>& x, typename Derived::Scalar eps = 1e-12) {
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> out = x;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const auto n = out.row(i).norm();
    if (n > eps) {
      out.row(i) /= n;
    } else {
      out.row(i).setZero();
    }
  }
  return out;
}

/// Cosine similarity between every row of `a` and every row of `b`.
template <typename DerivedA, typename DerivedB>
Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, Eigen::Dynamic> cosine_similarity(
    const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  return normalized_rows(a) * normalized_rows(b).transpose();
}

/// Population variance of a vector (divides by n). Zero for empty input.
template <typename Derived>
typename Derived::Scalar population_variance(const Eigen::MatrixBase<Derived>& v) {
  if (v.size() == 0) return 0;
  const auto mean = v.mean();
  return (v.array() - mean).square().mean();
}

}  // namespace chemtok
