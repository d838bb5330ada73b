#pragma once

#include <Eigen/Dense>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "phast/rng.hpp"

namespace phast {

struct Parameter {
  std::string name;
  Eigen::MatrixXd value;
  Eigen::MatrixXd grad;
};

// Named parameter collection with stable addresses and a fixed registration
// order; the optimizer walks parameters in that order, which pins the update
// sequence run to run.
class ParameterStore {
 public:
  Parameter& add(const std::string& name, int rows, int cols) {
    if (index_.count(name)) throw std::invalid_argument("parameter exists: " + name);
    auto p = std::make_unique<Parameter>();
    p->name = name;
    p->value = Eigen::MatrixXd::Zero(rows, cols);
    p->grad = Eigen::MatrixXd::Zero(rows, cols);
    index_[name] = items_.size();
    items_.push_back(std::move(p));
    return *items_.back();
  }

  bool has(const std::string& name) const { return index_.count(name) > 0; }

  Parameter& at(const std::string& name) {
    auto it = index_.find(name);
    if (it == index_.end()) throw std::out_of_range("no parameter: " + name);
    return *items_[it->second];
  }
  const Parameter& at(const std::string& name) const {
    return const_cast<ParameterStore*>(this)->at(name);
  }

  std::size_t size() const { return items_.size(); }
  Parameter& operator[](std::size_t i) { return *items_[i]; }
  const Parameter& operator[](std::size_t i) const { return *items_[i]; }

  void zero_grads() {
    for (auto& p : items_) p->grad.setZero();
  }

  std::size_t scalar_count() const {
    std::size_t n = 0;
    for (const auto& p : items_) n += static_cast<std::size_t>(p->value.size());
    return n;
  }

  // Uniform +-1/sqrt(fan_in) init; fan_in is the row count for weight
  // matrices. Biases and anything registered as *.zero stay at zero.
  void init_uniform(Parameter& p, Rng& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(std::max<Eigen::Index>(1, p.value.rows())));
    for (Eigen::Index i = 0; i < p.value.rows(); ++i)
      for (Eigen::Index j = 0; j < p.value.cols(); ++j)
        p.value(i, j) = rng.uniform(-bound, bound);
  }

 private:
  std::vector<std::unique_ptr<Parameter>> items_;
  std::map<std::string, std::size_t> index_;
};

// Adam with optional cosine decay, applied in registration order.
struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;
};

class Adam {
 public:
  Adam(ParameterStore& params, AdamConfig cfg) : params_(&params), cfg_(cfg) {
    m_.resize(params.size());
    v_.resize(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
      m_[i] = Eigen::MatrixXd::Zero(params[i].value.rows(), params[i].value.cols());
      v_[i] = Eigen::MatrixXd::Zero(params[i].value.rows(), params[i].value.cols());
    }
  }

  void step(double lr_override = -1.0) {
    ++t_;
    const double lr = lr_override >= 0 ? lr_override : cfg_.lr;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, t_);
    const double bc2 = 1.0 - std::pow(cfg_.beta2, t_);
    for (std::size_t i = 0; i < params_->size(); ++i) {
      Parameter& p = (*params_)[i];
      Eigen::MatrixXd g = p.grad;
      if (cfg_.weight_decay != 0.0) g += cfg_.weight_decay * p.value;
      m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * g;
      v_[i] = cfg_.beta2 * v_[i] + (1.0 - cfg_.beta2) * g.cwiseProduct(g);
      const Eigen::MatrixXd mhat = m_[i] / bc1;
      const Eigen::MatrixXd vhat = v_[i] / bc2;
      p.value -= lr * (mhat.array() / (vhat.array().sqrt() + cfg_.eps)).matrix();
    }
  }

 private:
  ParameterStore* params_;
  AdamConfig cfg_;
  std::vector<Eigen::MatrixXd> m_, v_;
  long t_ = 0;
};

}  // namespace phast
