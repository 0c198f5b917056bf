#pragma once

#include <cstdint>
#include <limits>
#include <string_view>
#include <vector>

namespace geolift {

// Keyed counter-based random stream. Output k is a SplitMix64 finalization of
// (key + k * golden-gamma), where the key is derived from
// (master_seed, replication_index, stream_label). The sequence therefore
// depends only on the key, never on thread scheduling or on how many other
// streams were drawn before it.
//
// Satisfies UniformRandomBitGenerator. Distribution helpers use Boost.Random,
// whose algorithms are fixed across standard libraries.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t master_seed, std::uint64_t replication_index,
            std::string_view stream_label);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  // Independent stream keyed by this stream's key and an extra label.
  RngStream Derive(std::string_view label) const;

  double Uniform();                                  // [0, 1)
  double Uniform(double low, double high);           // [low, high)
  double Normal(double mean, double sd);             // sd == 0 returns mean exactly
  std::int64_t UniformInt(std::int64_t low, std::int64_t high);  // inclusive

  template <typename T>
  void Shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(UniformInt(0, static_cast<std::int64_t>(i) - 1));
      std::swap(values[i - 1], values[j]);
    }
  }

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  explicit RngStream(std::uint64_t key) : key_(key) {}

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t SplitMix64(std::uint64_t x);
std::uint64_t HashLabel(std::string_view label);

}  // namespace geolift
