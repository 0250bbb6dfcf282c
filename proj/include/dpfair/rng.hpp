#pragma once

#include <cstdint>
#include <random>

namespace dpfair {

// Deterministic random stream. Streams with distinct ids derived from the
// same master seed are independent, so parallel work never perturbs the
// draw order of another stream.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream_id & 0xffffffffu),
                      static_cast<std::uint32_t>(stream_id >> 32)};
    eng_.seed(seq);
  }

  double uniform() { return unif_(eng_); }                // [0,1)
  double gaussian() { return normal_(eng_); }             // N(0,1)
  double gaussian(double stddev) { return stddev == 0.0 ? 0.0 : stddev * normal_(eng_); }
  double rademacher() { return (eng_() & 1u) ? 1.0 : -1.0; }
  bool bernoulli(double p) { return unif_(eng_) < p; }
  std::uint64_t next() { return eng_(); }

  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
  std::uniform_real_distribution<double> unif_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

// The three named streams owned by a training run. Sampling decides batch
// membership, noise feeds the DP mechanisms, init feeds parameter draws.
struct RngBundle {
  RngStream sampling;
  RngStream noise;
  RngStream init;

  explicit RngBundle(std::uint64_t seed)
      : sampling(seed, 0xA1), noise(seed, 0xB2), init(seed, 0xC3) {}
};

}  // namespace dpfair
