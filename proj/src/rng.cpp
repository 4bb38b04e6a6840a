#include "kolcouple/rng.hpp"

#include <cmath>

namespace kolcouple {

namespace {

constexpr std::uint64_t kPhiloxM = 0xD2B74407B1CE6E93ULL;
constexpr std::uint64_t kPhiloxW = 0x9E3779B97F4A7C15ULL;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
  unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  hi = static_cast<std::uint64_t>(p >> 64);
  lo = static_cast<std::uint64_t>(p);
}

}  // namespace

NoiseStream::NoiseStream(std::uint64_t master_seed, std::uint64_t replicate_id)
    : key0_(master_seed), ctr_hi_(replicate_id) {}

void NoiseStream::refill() {
  std::uint64_t c0 = ctr_lo_;
  std::uint64_t c1 = ctr_hi_;
  std::uint64_t key = key0_;
  for (int round = 0; round < 10; ++round) {
    std::uint64_t hi, lo;
    mulhilo(kPhiloxM, c0, hi, lo);
    c0 = hi ^ key ^ c1;
    c1 = lo;
    key += kPhiloxW;
  }
  buf_[0] = c0;
  buf_[1] = c1;
  buffered_ = 2;
  ++ctr_lo_;
}

std::uint64_t NoiseStream::next_u64() {
  if (buffered_ == 0) refill();
  return buf_[--buffered_];
}

double NoiseStream::uniform() {
  // 53 significant bits, offset by half an ulp so the value is never 0 or 1
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double NoiseStream::normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  double u1 = uniform();
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double theta = 2.0 * M_PI * u2;
  cached_normal_ = r * std::sin(theta);
  has_cached_normal_ = true;
  return r * std::cos(theta);
}

}  // namespace kolcouple
