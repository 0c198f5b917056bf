#include "core/rng.hpp"

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>

namespace geolift {

namespace {
constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t SplitMix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

// FNV-1a, 64 bit.
std::uint64_t HashLabel(std::string_view label) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t replication_index,
                     std::string_view stream_label) {
  std::uint64_t k = SplitMix64(master_seed + kGoldenGamma);
  k = SplitMix64(k ^ (replication_index * kGoldenGamma + 0x632BE59BD9B4E019ULL));
  k = SplitMix64(k ^ HashLabel(stream_label));
  key_ = k;
}

RngStream::result_type RngStream::operator()() {
  return SplitMix64(key_ + (++counter_) * kGoldenGamma);
}

RngStream RngStream::Derive(std::string_view label) const {
  return RngStream(SplitMix64(key_ ^ SplitMix64(HashLabel(label))));
}

double RngStream::Uniform() {
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

double RngStream::Uniform(double low, double high) {
  if (low == high) return low;
  return low + (high - low) * Uniform();
}

double RngStream::Normal(double mean, double sd) {
  if (sd == 0.0) return mean;
  boost::random::normal_distribution<double> dist(mean, sd);
  return dist(*this);
}

std::int64_t RngStream::UniformInt(std::int64_t low, std::int64_t high) {
  boost::random::uniform_int_distribution<std::int64_t> dist(low, high);
  return dist(*this);
}

}  // namespace geolift
