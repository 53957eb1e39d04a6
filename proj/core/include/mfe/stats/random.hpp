#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include "mfe/types.hpp"

namespace mfe {

std::uint64_t splitmix64(std::uint64_t x);

/// Seed for the stream identified by `keys` under `master`. Streams for
/// distinct key tuples are statistically independent, so replicate results do
/// not depend on the order in which workers pick them up.
std::uint64_t stream_seed(std::uint64_t master, std::initializer_list<std::uint64_t> keys);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  bool bernoulli(double p) { return uniform() < p; }
  Vec normal_vec(int n);
  std::uint64_t next_u64() { return engine_(); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace mfe
