#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "phast/kernels.hpp"
#include "phast/params.hpp"
#include "phast/tape.hpp"

namespace phast::ad {

// The model forwards are written once against this interface and instantiated
// for two engines: EagerEngine computes plain matrices (no tape, nothing to
// differentiate, zero recording overhead) and TapeEngine records every
// operation for backward(). Values are bitwise identical between the two
// because both run the same kernels.

class EagerEngine {
 public:
  using V = Matrix;

  V constant(Matrix m) { return m; }
  V param(Parameter& p) { return p.value; }
  const Matrix& val(const V& v) const { return v; }

  V add(const V& a, const V& b) { return kernels::add(a, b); }
  V sub(const V& a, const V& b) { return kernels::sub(a, b); }
  V mul(const V& a, const V& b) { return kernels::mul(a, b); }
  V div(const V& a, const V& b) { return kernels::div(a, b); }
  V scale(const V& a, double c) { return kernels::scale(a, c); }
  V add_scalar(const V& a, double c) { return kernels::add_scalar(a, c); }
  V matmul(const V& a, const V& b) { return kernels::matmul(a, b); }
  V sum_rows(const V& a) { return kernels::sum_rows(a); }
  V sum_cols(const V& a) { return kernels::sum_cols(a); }
  V broadcast_rows(const V& a, int n) { return kernels::broadcast_rows(a, n); }
  V broadcast_cols(const V& a, int n) { return kernels::broadcast_cols(a, n); }
  V gather_rows(const V& a, const std::shared_ptr<const std::vector<int>>& idx) {
    return kernels::gather_rows(a, *idx);
  }
  V segment_sum(const V& a, const std::shared_ptr<const std::vector<int>>& ids, int n) {
    return kernels::segment_sum(a, *ids, n);
  }
  V concat_cols(const V& a, const V& b) { return kernels::concat_cols(a, b); }
  V slice_cols(const V& a, int start, int len) { return kernels::slice_cols(a, start, len); }
  V shifted_softplus(const V& a) { return kernels::shifted_softplus(a); }
  V sigmoid(const V& a) { return kernels::sigmoid(a); }
  V sqrt(const V& a) { return kernels::sqrt(a); }
  V clamp_min(const V& a, double lo) { return kernels::clamp_min(a, lo); }
  V gaussian_rbf(const V& d, const Eigen::VectorXd& centers, double width) {
    return kernels::gaussian_rbf(d, centers, width);
  }

  V linear(const V& x, const V& w, const V& bias) {
    Matrix y = kernels::matmul(x, w);
    y.rowwise() += Eigen::RowVectorXd(bias.row(0));
    return y;
  }
  V vector_norm_rows(const V& x, double eps = 0.0) {
    Matrix ss = kernels::sum_cols(kernels::mul(x, x));
    if (eps > 0.0) return kernels::add_scalar(kernels::sqrt(kernels::add_scalar(ss, eps * eps)), -eps);
    return kernels::sqrt(ss);
  }
  V cosine_rows(const V& a, const V& b, double eps) {
    Matrix dots = kernels::sum_cols(kernels::mul(a, b));
    Matrix na = kernels::sqrt(kernels::sum_cols(kernels::mul(a, a)));
    Matrix nb = kernels::sqrt(kernels::sum_cols(kernels::mul(b, b)));
    return kernels::div(dots, kernels::clamp_min(kernels::mul(na, nb), eps));
  }
  V sum_all(const V& x) { return kernels::sum_cols(kernels::sum_rows(x)); }
  V mean_all(const V& x) {
    return kernels::scale(sum_all(x), 1.0 / static_cast<double>(x.rows() * x.cols()));
  }
};

class TapeEngine {
 public:
  using V = Var;

  explicit TapeEngine(Tape& tape, bool params_require_grad = true)
      : tape_(&tape), params_require_grad_(params_require_grad) {}

  Tape& tape() { return *tape_; }

  V constant(Matrix m) { return tape_->constant(std::move(m)); }
  V param(Parameter& p) {
    V v = tape_->leaf(p.value, params_require_grad_);
    bindings_.push_back({&p, v});
    return v;
  }
  const Matrix& val(V v) const { return tape_->value(v); }

  // After backward(), adds each bound parameter's adjoint into its .grad.
  void accumulate_param_grads() {
    for (auto& [p, v] : bindings_) p->grad += tape_->grad(v);
  }
  const std::vector<std::pair<Parameter*, V>>& bindings() const { return bindings_; }

  V add(V a, V b) { return tape_->add(a, b); }
  V sub(V a, V b) { return tape_->sub(a, b); }
  V mul(V a, V b) { return tape_->mul(a, b); }
  V div(V a, V b) { return tape_->div(a, b); }
  V scale(V a, double c) { return tape_->scale(a, c); }
  V add_scalar(V a, double c) { return tape_->add_scalar(a, c); }
  V matmul(V a, V b) { return tape_->matmul(a, b); }
  V sum_rows(V a) { return tape_->sum_rows(a); }
  V sum_cols(V a) { return tape_->sum_cols(a); }
  V broadcast_rows(V a, int n) { return tape_->broadcast_rows(a, n); }
  V broadcast_cols(V a, int n) { return tape_->broadcast_cols(a, n); }
  V gather_rows(V a, std::shared_ptr<const std::vector<int>> idx) {
    return tape_->gather_rows(a, std::move(idx));
  }
  V segment_sum(V a, std::shared_ptr<const std::vector<int>> ids, int n) {
    return tape_->segment_sum(a, std::move(ids), n);
  }
  V concat_cols(V a, V b) { return tape_->concat_cols(a, b); }
  V slice_cols(V a, int start, int len) { return tape_->slice_cols(a, start, len); }
  V shifted_softplus(V a) { return tape_->shifted_softplus(a); }
  V sigmoid(V a) { return tape_->sigmoid(a); }
  V sqrt(V a) { return tape_->sqrt(a); }
  V clamp_min(V a, double lo) { return tape_->clamp_min(a, lo); }
  V gaussian_rbf(V d, const Eigen::VectorXd& centers, double width) {
    return tape_->gaussian_rbf(d, centers, width);
  }

  V linear(V x, V w, V bias) { return ad::linear(*tape_, x, w, bias); }
  V vector_norm_rows(V x, double eps = 0.0) { return ad::vector_norm_rows(*tape_, x, eps); }
  V cosine_rows(V a, V b, double eps) { return ad::cosine_rows(*tape_, a, b, eps); }
  V sum_all(V x) { return ad::sum_all(*tape_, x); }
  V mean_all(V x) { return ad::mean_all(*tape_, x); }

 private:
  Tape* tape_;
  bool params_require_grad_;
  std::vector<std::pair<Parameter*, V>> bindings_;
};

}  // namespace phast::ad
