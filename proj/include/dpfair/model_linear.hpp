#pragma once

#include <cmath>
#include <cstring>
#include <vector>

#include "dpfair/model.hpp"

namespace dpfair {

// Multinomial logistic regression: a single linear layer with a softmax
// head. Layout: W row-major (classes x dim), then biases (classes).
// With classes == 2 this is plain logistic regression.
class LinearSoftmaxModel final : public Model {
 public:
  LinearSoftmaxModel(std::size_t dim, int classes) : dim_(dim), classes_(classes) {
    if (dim == 0 || classes < 2) throw ConfigError("LinearSoftmaxModel: need dim>0, classes>=2");
    params_.assign(param_count(), 0.0);
  }

  std::string architecture() const override { return "logistic-regression"; }
  std::size_t param_count() const override { return (dim_ + 1) * static_cast<std::size_t>(classes_); }
  std::size_t input_dim() const override { return dim_; }
  int class_count() const override { return classes_; }

  const ParamVector& params() const override { return params_; }
  void set_params(const ParamVector& p) override {
    if (p.size() != params_.size()) throw ConfigError("LinearSoftmaxModel: parameter size mismatch");
    params_ = p;
  }

  void init_params(RngStream& rng) override {
    const double limit = std::sqrt(6.0 / static_cast<double>(dim_ + classes_));
    for (int k = 0; k < classes_; ++k)
      for (std::size_t j = 0; j < dim_; ++j)
        params_[k * dim_ + j] = limit * (2.0 * rng.uniform() - 1.0);
    for (int k = 0; k < classes_; ++k) params_[bias_ofs() + k] = 0.0;
  }

  void predict(const double* x, double* probs) const override {
    logits(x, probs);
    softmax(probs, classes_);
  }

  double loss(const double* x, int label) const override {
    thread_local std::vector<double> p;
    p.resize(classes_);
    predict(x, p.data());
    return nll(p.data(), label);
  }

  void loss_gradient(const double* x, int label, double* grad) const override {
    thread_local std::vector<double> p;
    p.resize(classes_);
    predict(x, p.data());
    for (int k = 0; k < classes_; ++k) {
      const double r = p[k] - (k == label ? 1.0 : 0.0);
      double* g = grad + k * dim_;
      for (std::size_t j = 0; j < dim_; ++j) g[j] = r * x[j];
      grad[bias_ofs() + k] = r;
    }
  }

  void output_gradient(const double* x, double* grad) const override {
    if (classes_ != 2) throw ConfigError("output_gradient requires a binary model");
    thread_local std::vector<double> p;
    p.resize(2);
    predict(x, p.data());
    const double s = p[1] * (1.0 - p[1]);  // dp1/dz1 = -dp1/dz0
    for (std::size_t j = 0; j < dim_; ++j) {
      grad[j] = -s * x[j];
      grad[dim_ + j] = s * x[j];
    }
    grad[bias_ofs()] = -s;
    grad[bias_ofs() + 1] = s;
  }

  std::unique_ptr<Model> clone() const override {
    return std::make_unique<LinearSoftmaxModel>(*this);
  }

  bool has_analytic_hessian() const override { return true; }

  // Per-sample Hessian of the softmax CE is (diag(p) - p p^T) kron xt xt^T
  // with xt = [x;1]. Accumulates weight * H_i v into out.
  void hvp_sample_analytic(const double* x, int /*label*/, const double* v,
                           double weight, double* out) const override {
    thread_local std::vector<double> p, u;
    p.resize(classes_);
    u.resize(classes_);
    predict(x, p.data());
    // u_k = v_k . x + v_bias_k
    for (int k = 0; k < classes_; ++k) {
      const double* vk = v + k * dim_;
      double s = v[bias_ofs() + k];
      for (std::size_t j = 0; j < dim_; ++j) s += vk[j] * x[j];
      u[k] = s;
    }
    double pu = 0.0;
    for (int k = 0; k < classes_; ++k) pu += p[k] * u[k];
    for (int k = 0; k < classes_; ++k) {
      const double w = weight * p[k] * (u[k] - pu);
      double* o = out + k * dim_;
      for (std::size_t j = 0; j < dim_; ++j) o[j] += w * x[j];
      out[bias_ofs() + k] += w;
    }
  }

 private:
  std::size_t bias_ofs() const { return dim_ * static_cast<std::size_t>(classes_); }

  void logits(const double* x, double* z) const {
    for (int k = 0; k < classes_; ++k) {
      const double* w = params_.data() + k * dim_;
      double s = params_[bias_ofs() + k];
      for (std::size_t j = 0; j < dim_; ++j) s += w[j] * x[j];
      z[k] = s;
    }
  }

  std::size_t dim_;
  int classes_;
  ParamVector params_;
};

}  // namespace dpfair
