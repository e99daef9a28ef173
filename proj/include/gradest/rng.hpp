#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace gradest {

/// A reproducible random stream addressed by a key path.
///
/// A stream is identified by its master seed followed by a sequence of child
/// indices; `child(i)` appends one index. Streams with different key paths are
/// seeded through std::seed_seq from the full path, so replicate `r` always
/// sees the same numbers no matter which worker runs it or in what order.
class Stream {
 public:
  explicit Stream(std::uint64_t seed);

  Stream child(std::uint64_t index) const;

  const std::vector<std::uint64_t>& key() const noexcept { return key_; }

  /// Uniform on [0, 1).
  double uniform();
  double normal();
  /// Exponential with unit rate.
  double exponential();
  bool bernoulli(double p);

 private:
  explicit Stream(std::vector<std::uint64_t> key);
  void reseed();

  std::vector<std::uint64_t> key_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::exponential_distribution<double> exponential_{1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace gradest
