#pragma once

#include <cmath>
#include <cstring>
#include <vector>

#include "dpfair/model.hpp"

namespace dpfair {

// Two stride-2 valid 3x3 convolutions (tanh) followed by a softmax linear
// head. Input is a single-channel square image given as a flat row-major
// vector. 28x28 -> 13x13xC1 -> 6x6xC2 -> classes.
class CnnModel final : public Model {
 public:
  CnnModel(std::size_t img_h, std::size_t img_w, int classes, std::size_t c1 = 32,
           std::size_t c2 = 16)
      : h_(img_h), w_(img_w), classes_(classes), c1_(c1), c2_(c2) {
    if (classes < 2) throw ConfigError("CnnModel: classes>=2");
    h1_ = out_size(h_), w1_ = out_size(w_);
    h2_ = out_size(h1_), w2_ = out_size(w1_);
    if (h2_ == 0 || w2_ == 0) throw ConfigError("CnnModel: input too small");
    flat_ = c2_ * h2_ * w2_;
    ofs_w1_ = 0;
    ofs_b1_ = ofs_w1_ + c1_ * 9;
    ofs_w2_ = ofs_b1_ + c1_;
    ofs_b2_ = ofs_w2_ + c2_ * c1_ * 9;
    ofs_fw_ = ofs_b2_ + c2_;
    ofs_fb_ = ofs_fw_ + static_cast<std::size_t>(classes_) * flat_;
    params_.assign(ofs_fb_ + classes_, 0.0);
  }

  std::string architecture() const override { return "cnn"; }
  std::size_t param_count() const override { return params_.size(); }
  std::size_t input_dim() const override { return h_ * w_; }
  int class_count() const override { return classes_; }

  const ParamVector& params() const override { return params_; }
  void set_params(const ParamVector& p) override {
    if (p.size() != params_.size()) throw ConfigError("CnnModel: parameter size mismatch");
    params_ = p;
  }

  void init_params(RngStream& rng) override {
    auto fill_uniform = [&](std::size_t ofs, std::size_t count, std::size_t fan_in,
                            std::size_t fan_out) {
      const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
      for (std::size_t i = 0; i < count; ++i) params_[ofs + i] = limit * (2.0 * rng.uniform() - 1.0);
    };
    fill_uniform(ofs_w1_, c1_ * 9, 9, c1_ * 9);
    fill_uniform(ofs_w2_, c2_ * c1_ * 9, c1_ * 9, c2_ * 9);
    fill_uniform(ofs_fw_, static_cast<std::size_t>(classes_) * flat_, flat_, classes_);
    for (std::size_t i = 0; i < c1_; ++i) params_[ofs_b1_ + i] = 0.0;
    for (std::size_t i = 0; i < c2_; ++i) params_[ofs_b2_ + i] = 0.0;
    for (int i = 0; i < classes_; ++i) params_[ofs_fb_ + i] = 0.0;
  }

  void predict(const double* x, double* probs) const override {
    auto& ws = scratch();
    forward(x, ws);
    for (int k = 0; k < classes_; ++k) probs[k] = ws.logits[k];
    softmax(probs, classes_);
  }

  double loss(const double* x, int label) const override {
    thread_local std::vector<double> p;
    p.resize(classes_);
    predict(x, p.data());
    return nll(p.data(), label);
  }

  void loss_gradient(const double* x, int label, double* grad) const override {
    auto& ws = scratch();
    forward(x, ws);
    std::memset(grad, 0, params_.size() * sizeof(double));

    thread_local std::vector<double> delta;
    delta.assign(ws.logits.begin(), ws.logits.end());
    softmax(delta.data(), classes_);
    delta[label] -= 1.0;

    // fc layer
    const double* fw = params_.data() + ofs_fw_;
    ws.d2.assign(flat_, 0.0);
    for (int k = 0; k < classes_; ++k) {
      const double d = delta[k];
      double* gw = grad + ofs_fw_ + static_cast<std::size_t>(k) * flat_;
      const double* row = fw + static_cast<std::size_t>(k) * flat_;
      for (std::size_t i = 0; i < flat_; ++i) {
        gw[i] = d * ws.a2[i];
        ws.d2[i] += d * row[i];
      }
      grad[ofs_fb_ + k] = d;
    }
    for (std::size_t i = 0; i < flat_; ++i) ws.d2[i] *= (1.0 - ws.a2[i] * ws.a2[i]);

    // conv2 backward into d1 (pre-activation grads of layer 1 outputs)
    ws.d1.assign(c1_ * h1_ * w1_, 0.0);
    const double* w2 = params_.data() + ofs_w2_;
    for (std::size_t oc = 0; oc < c2_; ++oc) {
      double gb = 0.0;
      for (std::size_t oy = 0; oy < h2_; ++oy)
        for (std::size_t ox = 0; ox < w2_; ++ox) {
          const double d = ws.d2[(oc * h2_ + oy) * w2_ + ox];
          gb += d;
          for (std::size_t ic = 0; ic < c1_; ++ic) {
            const double* a = ws.a1.data() + (ic * h1_ + 2 * oy) * w1_ + 2 * ox;
            double* dd = ws.d1.data() + (ic * h1_ + 2 * oy) * w1_ + 2 * ox;
            const double* wrow = w2 + ((oc * c1_ + ic) * 9);
            double* gw = grad + ofs_w2_ + ((oc * c1_ + ic) * 9);
            for (std::size_t ky = 0; ky < 3; ++ky) {
              const double* ar = a + ky * w1_;
              double* dr = dd + ky * w1_;
              const double* wr = wrow + ky * 3;
              double* gr = gw + ky * 3;
              gr[0] += d * ar[0];
              gr[1] += d * ar[1];
              gr[2] += d * ar[2];
              dr[0] += d * wr[0];
              dr[1] += d * wr[1];
              dr[2] += d * wr[2];
            }
          }
        }
      grad[ofs_b2_ + oc] = gb;
    }
    for (std::size_t i = 0; i < ws.d1.size(); ++i) ws.d1[i] *= (1.0 - ws.a1[i] * ws.a1[i]);

    // conv1 backward (single input channel)
    for (std::size_t oc = 0; oc < c1_; ++oc) {
      double gb = 0.0;
      double* gw = grad + ofs_w1_ + oc * 9;
      for (std::size_t oy = 0; oy < h1_; ++oy)
        for (std::size_t ox = 0; ox < w1_; ++ox) {
          const double d = ws.d1[(oc * h1_ + oy) * w1_ + ox];
          gb += d;
          const double* xr = x + (2 * oy) * w_ + 2 * ox;
          for (std::size_t ky = 0; ky < 3; ++ky) {
            const double* r = xr + ky * w_;
            gw[ky * 3 + 0] += d * r[0];
            gw[ky * 3 + 1] += d * r[1];
            gw[ky * 3 + 2] += d * r[2];
          }
        }
      grad[ofs_b1_ + oc] = gb;
    }
  }

  std::unique_ptr<Model> clone() const override { return std::make_unique<CnnModel>(*this); }

 private:
  static std::size_t out_size(std::size_t in) { return in < 3 ? 0 : (in - 3) / 2 + 1; }

  struct Workspace {
    std::vector<double> a1, a2, logits, d1, d2;
  };

  Workspace& scratch() const {
    thread_local Workspace ws;
    ws.a1.resize(c1_ * h1_ * w1_);
    ws.a2.resize(flat_);
    ws.logits.resize(classes_);
    return ws;
  }

  void forward(const double* x, Workspace& ws) const {
    const double* w1 = params_.data() + ofs_w1_;
    for (std::size_t oc = 0; oc < c1_; ++oc) {
      const double b = params_[ofs_b1_ + oc];
      const double* k = w1 + oc * 9;
      for (std::size_t oy = 0; oy < h1_; ++oy)
        for (std::size_t ox = 0; ox < w1_; ++ox) {
          const double* xr = x + (2 * oy) * w_ + 2 * ox;
          double s = b;
          for (std::size_t ky = 0; ky < 3; ++ky) {
            const double* r = xr + ky * w_;
            s += k[ky * 3 + 0] * r[0] + k[ky * 3 + 1] * r[1] + k[ky * 3 + 2] * r[2];
          }
          ws.a1[(oc * h1_ + oy) * w1_ + ox] = std::tanh(s);
        }
    }
    const double* w2 = params_.data() + ofs_w2_;
    for (std::size_t oc = 0; oc < c2_; ++oc) {
      const double b = params_[ofs_b2_ + oc];
      for (std::size_t oy = 0; oy < h2_; ++oy)
        for (std::size_t ox = 0; ox < w2_; ++ox) {
          double s = b;
          for (std::size_t ic = 0; ic < c1_; ++ic) {
            const double* a = ws.a1.data() + (ic * h1_ + 2 * oy) * w1_ + 2 * ox;
            const double* k = w2 + (oc * c1_ + ic) * 9;
            for (std::size_t ky = 0; ky < 3; ++ky) {
              const double* r = a + ky * w1_;
              s += k[ky * 3 + 0] * r[0] + k[ky * 3 + 1] * r[1] + k[ky * 3 + 2] * r[2];
            }
          }
          ws.a2[(oc * h2_ + oy) * w2_ + ox] = std::tanh(s);
        }
    }
    const double* fw = params_.data() + ofs_fw_;
    for (int k = 0; k < classes_; ++k) {
      const double* row = fw + static_cast<std::size_t>(k) * flat_;
      double s = params_[ofs_fb_ + k];
      for (std::size_t i = 0; i < flat_; ++i) s += row[i] * ws.a2[i];
      ws.logits[k] = s;
    }
  }

  std::size_t h_, w_;
  int classes_;
  std::size_t c1_, c2_;
  std::size_t h1_, w1_, h2_, w2_, flat_;
  std::size_t ofs_w1_, ofs_b1_, ofs_w2_, ofs_b2_, ofs_fw_, ofs_fb_;
  ParamVector params_;
};

}  // namespace dpfair
