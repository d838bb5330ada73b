#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace phast::ad::kernels {

using Matrix = Eigen::MatrixXd;

inline void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

inline Matrix add(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "add: shape mismatch");
  return a + b;
}

inline Matrix sub(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "sub: shape mismatch");
  return a - b;
}

inline Matrix mul(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "mul: shape mismatch");
  return a.cwiseProduct(b);
}

inline Matrix div(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "div: shape mismatch");
  return a.cwiseQuotient(b);
}

inline Matrix scale(const Matrix& a, double c) { return a * c; }

inline Matrix add_scalar(const Matrix& a, double c) { return a.array() + c; }

inline Matrix matmul(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.rows(), "matmul: inner dimensions disagree");
  return a * b;
}

inline Matrix transpose(const Matrix& a) { return a.transpose(); }

inline Matrix sum_rows(const Matrix& a) { return a.colwise().sum(); }         // 1 x M
inline Matrix sum_cols(const Matrix& a) { return a.rowwise().sum(); }         // N x 1

inline Matrix broadcast_rows(const Matrix& a, int n) {
  require(a.rows() == 1, "broadcast_rows: input must have one row");
  return a.replicate(n, 1);
}

inline Matrix broadcast_cols(const Matrix& a, int n) {
  require(a.cols() == 1, "broadcast_cols: input must have one column");
  return a.replicate(1, n);
}

inline Matrix gather_rows(const Matrix& a, const std::vector<int>& idx) {
  Matrix out(static_cast<Eigen::Index>(idx.size()), a.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    require(idx[i] >= 0 && idx[i] < a.rows(), "gather_rows: index out of range");
    out.row(static_cast<Eigen::Index>(i)) = a.row(idx[i]);
  }
  return out;
}

// Sums row i of the input into output row ids[i]. Accumulation runs in
// ascending input order so results are bitwise reproducible.
inline Matrix segment_sum(const Matrix& a, const std::vector<int>& ids, int num_segments) {
  require(static_cast<Eigen::Index>(ids.size()) == a.rows(), "segment_sum: ids length mismatch");
  Matrix out = Matrix::Zero(num_segments, a.cols());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    require(ids[i] >= 0 && ids[i] < num_segments, "segment_sum: segment id out of range");
    out.row(ids[i]) += a.row(static_cast<Eigen::Index>(i));
  }
  return out;
}

inline Matrix concat_cols(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows(), "concat_cols: row counts disagree");
  Matrix out(a.rows(), a.cols() + b.cols());
  out.leftCols(a.cols()) = a;
  out.rightCols(b.cols()) = b;
  return out;
}

inline Matrix slice_cols(const Matrix& a, int start, int len) {
  require(start >= 0 && len >= 0 && start + len <= a.cols(), "slice_cols: range out of bounds");
  return a.middleCols(start, len);
}

// ln(0.5 e^x + 0.5) = softplus(x) - ln 2; the two-branch form is overflow safe
// and gives exactly 0 at x = 0.
inline Matrix shifted_softplus(const Matrix& a) {
  return a.unaryExpr([](double x) {
    const double sp = x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
    return sp - 0.6931471805599453;
  });
}

inline Matrix sigmoid(const Matrix& a) {
  return a.unaryExpr([](double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
  });
}

inline Matrix sqrt(const Matrix& a) { return a.cwiseSqrt(); }

inline Matrix clamp_min(const Matrix& a, double lo) { return a.cwiseMax(lo); }

// Row distances d (N x 1) against K centers: out(i,k) = exp(-(d_i - c_k)^2 / (2 w^2)).
inline Matrix gaussian_rbf(const Matrix& d, const Eigen::VectorXd& centers, double width) {
  require(d.cols() == 1, "gaussian_rbf: input must be a column");
  require(width > 0, "gaussian_rbf: width must be positive");
  const double inv2w2 = 1.0 / (2.0 * width * width);
  Matrix out(d.rows(), centers.size());
  for (Eigen::Index i = 0; i < d.rows(); ++i)
    for (Eigen::Index k = 0; k < centers.size(); ++k) {
      const double t = d(i, 0) - centers(k);
      out(i, k) = std::exp(-t * t * inv2w2);
    }
  return out;
}

}  // namespace phast::ad::kernels
