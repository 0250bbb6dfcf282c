#pragma once

#include <cmath>
#include <numeric>
#include <vector>

#include "dpfair/model.hpp"

namespace dpfair {

// Fully connected network with tanh hidden activations and a softmax head.
// Layer l maps sizes_[l] -> sizes_[l+1]; weights row-major (out x in)
// followed by the bias, layers stored back to back.
class MlpModel final : public Model {
 public:
  MlpModel(std::size_t dim, std::vector<std::size_t> hidden, int classes)
      : dim_(dim), classes_(classes) {
    if (dim == 0 || classes < 2) throw ConfigError("MlpModel: need dim>0, classes>=2");
    sizes_.push_back(dim);
    for (std::size_t h : hidden) {
      if (h == 0) throw ConfigError("MlpModel: zero hidden width");
      sizes_.push_back(h);
    }
    sizes_.push_back(static_cast<std::size_t>(classes));
    layer_ofs_.resize(n_layers());
    std::size_t ofs = 0;
    for (std::size_t l = 0; l < n_layers(); ++l) {
      layer_ofs_[l] = ofs;
      ofs += sizes_[l + 1] * sizes_[l] + sizes_[l + 1];
    }
    params_.assign(ofs, 0.0);
  }

  std::string architecture() const override { return "mlp"; }
  std::size_t param_count() const override { return params_.size(); }
  std::size_t input_dim() const override { return dim_; }
  int class_count() const override { return classes_; }

  const ParamVector& params() const override { return params_; }
  void set_params(const ParamVector& p) override {
    if (p.size() != params_.size()) throw ConfigError("MlpModel: parameter size mismatch");
    params_ = p;
  }

  void init_params(RngStream& rng) override {
    for (std::size_t l = 0; l < n_layers(); ++l) {
      const std::size_t in = sizes_[l], out = sizes_[l + 1];
      const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
      double* w = params_.data() + layer_ofs_[l];
      for (std::size_t i = 0; i < out * in; ++i) w[i] = limit * (2.0 * rng.uniform() - 1.0);
      for (std::size_t i = 0; i < out; ++i) w[out * in + i] = 0.0;
    }
  }

  void predict(const double* x, double* probs) const override {
    auto& act = scratch_acts();
    forward(x, act);
    const std::vector<double>& z = act.back();
    for (int k = 0; k < classes_; ++k) probs[k] = z[k];
    softmax(probs, classes_);
  }

  double loss(const double* x, int label) const override {
    thread_local std::vector<double> p;
    p.resize(classes_);
    predict(x, p.data());
    return nll(p.data(), label);
  }

  void loss_gradient(const double* x, int label, double* grad) const override {
    auto& act = scratch_acts();
    forward(x, act);
    thread_local std::vector<double> delta, next_delta;
    // output layer: delta = p - onehot(y)
    delta.assign(act.back().begin(), act.back().end());
    softmax(delta.data(), classes_);
    delta[label] -= 1.0;
    for (std::size_t li = n_layers(); li-- > 0;) {
      const std::size_t in = sizes_[li], out = sizes_[li + 1];
      const double* input = (li == 0) ? x : act[li - 1].data();
      const double* w = params_.data() + layer_ofs_[li];
      double* gw = grad + layer_ofs_[li];
      for (std::size_t i = 0; i < out; ++i) {
        const double d = delta[i];
        double* row = gw + i * in;
        for (std::size_t j = 0; j < in; ++j) row[j] = d * input[j];
        gw[out * in + i] = d;
      }
      if (li > 0) {
        next_delta.assign(in, 0.0);
        for (std::size_t i = 0; i < out; ++i) {
          const double d = delta[i];
          const double* row = w + i * in;
          for (std::size_t j = 0; j < in; ++j) next_delta[j] += d * row[j];
        }
        // through tanh: act[li-1] holds tanh values
        const double* a = act[li - 1].data();
        for (std::size_t j = 0; j < in; ++j) next_delta[j] *= (1.0 - a[j] * a[j]);
        delta.swap(next_delta);
      }
    }
  }

  void output_gradient(const double* x, double* grad) const override {
    if (classes_ != 2) throw ConfigError("output_gradient requires a binary model");
    auto& act = scratch_acts();
    forward(x, act);
    thread_local std::vector<double> p, delta, next_delta;
    p.assign(act.back().begin(), act.back().end());
    softmax(p.data(), 2);
    const double s = p[1] * (1.0 - p[1]);
    delta = {-s, s};  // d p1 / d logits
    for (std::size_t li = n_layers(); li-- > 0;) {
      const std::size_t in = sizes_[li], out = sizes_[li + 1];
      const double* input = (li == 0) ? x : act[li - 1].data();
      const double* w = params_.data() + layer_ofs_[li];
      double* gw = grad + layer_ofs_[li];
      for (std::size_t i = 0; i < out; ++i) {
        const double d = delta[i];
        double* row = gw + i * in;
        for (std::size_t j = 0; j < in; ++j) row[j] = d * input[j];
        gw[out * in + i] = d;
      }
      if (li > 0) {
        next_delta.assign(in, 0.0);
        for (std::size_t i = 0; i < out; ++i) {
          const double d = delta[i];
          const double* row = w + i * in;
          for (std::size_t j = 0; j < in; ++j) next_delta[j] += d * row[j];
        }
        const double* a = act[li - 1].data();
        for (std::size_t j = 0; j < in; ++j) next_delta[j] *= (1.0 - a[j] * a[j]);
        delta.swap(next_delta);
      }
    }
  }

  std::unique_ptr<Model> clone() const override { return std::make_unique<MlpModel>(*this); }

 private:
  std::size_t n_layers() const { return sizes_.size() - 1; }

  std::vector<std::vector<double>>& scratch_acts() const {
    thread_local std::vector<std::vector<double>> act;
    act.resize(n_layers());
    for (std::size_t l = 0; l < n_layers(); ++l) act[l].resize(sizes_[l + 1]);
    return act;
  }

  // act[l] = layer output; hidden layers tanh'd, final layer raw logits.
  void forward(const double* x, std::vector<std::vector<double>>& act) const {
    const double* input = x;
    for (std::size_t l = 0; l < n_layers(); ++l) {
      const std::size_t in = sizes_[l], out = sizes_[l + 1];
      const double* w = params_.data() + layer_ofs_[l];
      double* o = act[l].data();
      for (std::size_t i = 0; i < out; ++i) {
        const double* row = w + i * in;
        double s = w[out * in + i];
        for (std::size_t j = 0; j < in; ++j) s += row[j] * input[j];
        o[i] = (l + 1 < n_layers()) ? std::tanh(s) : s;
      }
      input = o;
    }
  }

  std::size_t dim_;
  int classes_;
  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> layer_ofs_;
  ParamVector params_;
};

}  // namespace dpfair
