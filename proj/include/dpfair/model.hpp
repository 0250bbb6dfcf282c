#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>

#include "dpfair/common.hpp"
#include "dpfair/rng.hpp"

namespace dpfair {

// Non-owning view over a set of samples: row-major feature matrix plus
// integer labels, optionally restricted to a subset of row indices.
struct BatchView {
  const double* x = nullptr;
  const int* y = nullptr;
  const std::uint32_t* idx = nullptr;  // null means rows 0..n-1
  std::size_t n = 0;
  std::size_t dim = 0;

  const double* row(std::size_t i) const {
    const std::size_t r = idx ? idx[i] : i;
    return x + r * dim;
  }
  int label(std::size_t i) const { return y[idx ? idx[i] : i]; }
  bool empty() const { return n == 0; }
};

// A small differentiable classifier with probabilistic outputs and a
// per-sample cross-entropy loss. Parameters live in one flat vector so
// gradients, Hessian-vector products and DP mechanisms can treat the model
// as a point in R^d.
class Model {
 public:
  virtual ~Model() = default;

  virtual std::string architecture() const = 0;
  virtual std::size_t param_count() const = 0;
  virtual std::size_t input_dim() const = 0;
  virtual int class_count() const = 0;

  virtual const ParamVector& params() const = 0;
  virtual void set_params(const ParamVector& p) = 0;

  // Class probabilities for one sample (writes class_count() values).
  virtual void predict(const double* x, double* probs) const = 0;
  // Cross-entropy of one sample.
  virtual double loss(const double* x, int label) const = 0;
  // Gradient of the per-sample loss; overwrites grad (param_count() values).
  virtual void loss_gradient(const double* x, int label, double* grad) const = 0;
  // Gradient of the class-1 probability; binary models only (FairLens R2).
  virtual void output_gradient(const double* x, double* grad) const {
    (void)x;
    (void)grad;
    throw ConfigError(architecture() + ": output_gradient requires a binary model");
  }

  virtual std::unique_ptr<Model> clone() const = 0;

  // Glorot-style uniform initialization, biases zero.
  virtual void init_params(RngStream& rng) = 0;

  // Analytic Hessian support (exact HVPs without finite differences).
  virtual bool has_analytic_hessian() const { return false; }
  // Accumulates H*v for one sample into out (scaled by weight).
  virtual void hvp_sample_analytic(const double* x, int label, const double* v,
                                   double weight, double* out) const {
    (void)x;
    (void)label;
    (void)v;
    (void)weight;
    (void)out;
    throw NumericError(architecture() + ": no analytic Hessian");
  }

 protected:
  static void softmax(double* z, int k) {
    double m = z[0];
    for (int i = 1; i < k; ++i)
      if (z[i] > m) m = z[i];
    double s = 0.0;
    for (int i = 0; i < k; ++i) {
      z[i] = std::exp(z[i] - m);
      s += z[i];
    }
    for (int i = 0; i < k; ++i) z[i] /= s;
  }

  static double nll(const double* probs, int label) {
    return -std::log(probs[label] > 1e-300 ? probs[label] : 1e-300);
  }
};

}  // namespace dpfair
