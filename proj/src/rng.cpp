#include "gradest/rng.hpp"

#include <utility>

namespace gradest {

Stream::Stream(std::uint64_t seed) : key_{seed} { reseed(); }

Stream::Stream(std::vector<std::uint64_t> key) : key_(std::move(key)) { reseed(); }

void Stream::reseed() {
  std::vector<std::uint32_t> words;
  words.reserve(2 * key_.size() + 1);
  words.push_back(static_cast<std::uint32_t>(key_.size()));
  for (const std::uint64_t part : key_) {
    words.push_back(static_cast<std::uint32_t>(part & 0xffffffffu));
    words.push_back(static_cast<std::uint32_t>(part >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  engine_.seed(seq);
}

Stream Stream::child(std::uint64_t index) const {
  std::vector<std::uint64_t> key = key_;
  key.push_back(index);
  return Stream(std::move(key));
}

double Stream::uniform() { return uniform_(engine_); }

double Stream::normal() { return normal_(engine_); }

double Stream::exponential() { return exponential_(engine_); }

bool Stream::bernoulli(double p) {
  if (p >= 1.0) {
    return true;
  }
  return uniform() < p;
}

}  // namespace gradest
