#pragma once

#include <cstdint>

namespace kolcouple {

// Source of standard normal variates. Lets deterministic test drivers
// (e.g. a zero-noise hook) stand in for a real stream.
struct NormalSource {
  virtual double normal() = 0;
  virtual ~NormalSource() = default;
};

struct ZeroNormals final : NormalSource {
  double normal() override { return 0.0; }
};

// Counter-based random stream (Philox2x64-10). The key is the master seed
// and the 128-bit counter is (replicate_id, draw_block), so streams with
// distinct (master_seed, replicate_id) never share counter/key pairs and
// a stream is reproducible bit-for-bit from those two integers alone.
//
// Normals come from Box-Muller: fixed consumption per draw, no rejection,
// so a replicate's whole path is a pure function of (seed, id).
class NoiseStream final : public NormalSource {
 public:
  NoiseStream(std::uint64_t master_seed, std::uint64_t replicate_id);

  NoiseStream(const NoiseStream&) = delete;
  NoiseStream& operator=(const NoiseStream&) = delete;
  NoiseStream(NoiseStream&&) = default;
  NoiseStream& operator=(NoiseStream&&) = default;

  std::uint64_t next_u64();
  double uniform();           // strictly inside (0,1)
  double normal() override;   // N(0,1)

  std::uint64_t master_seed() const { return key0_; }
  std::uint64_t replicate_id() const { return ctr_hi_; }

 private:
  void refill();

  std::uint64_t key0_;
  std::uint64_t ctr_hi_;
  std::uint64_t ctr_lo_ = 0;
  std::uint64_t buf_[2] = {0, 0};
  int buffered_ = 0;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

inline NoiseStream derive_stream(std::uint64_t master_seed, std::uint64_t replicate_id) {
  return NoiseStream(master_seed, replicate_id);
}

}  // namespace kolcouple
