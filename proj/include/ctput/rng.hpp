#ifndef CTPUT_RNG_HPP
#define CTPUT_RNG_HPP

// Counter-based pseudo-random generator (Philox 4x32-10). A draw is a
// pure function of (seed, stream, counter), so replicas with distinct
// stream ids are reproducible and independent regardless of scheduling.

#include <array>
#include <cstdint>

namespace ctput {

struct Philox4x32 {
    static constexpr uint32_t kMul0 = 0xD2511F53u;
    static constexpr uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr uint32_t kWeyl1 = 0xBB67AE85u;

    static std::array<uint32_t, 4> block(std::array<uint32_t, 4> ctr,
                                         std::array<uint32_t, 2> key) {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kWeyl0;
                key[1] += kWeyl1;
            }
            const uint64_t p0 = uint64_t(kMul0) * ctr[0];
            const uint64_t p1 = uint64_t(kMul1) * ctr[2];
            ctr = {uint32_t(p1 >> 32) ^ ctr[1] ^ key[0], uint32_t(p1),
                   uint32_t(p0 >> 32) ^ ctr[3] ^ key[1], uint32_t(p0)};
        }
        return ctr;
    }
};

class CounterRng {
  public:
    explicit CounterRng(uint64_t seed, uint64_t stream = 0)
        : key_{uint32_t(seed), uint32_t(seed >> 32)},
          stream_{uint32_t(stream), uint32_t(stream >> 32)} {}

    uint64_t next_u64() {
        if (have_ == 0) refill();
        return buf_[--have_];
    }

    // 53-bit uniform in [0,1).
    double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

    // Strictly interior uniform in (0,1), for inverse-transform sampling.
    double next_open01() { return (double(next_u64() >> 12) + 0.5) * 0x1.0p-52; }

    // Jump the counter forward without generating output.
    void skip_blocks(uint64_t n) {
        counter_ += n;
        have_ = 0;
    }

    uint64_t seed() const { return uint64_t(key_[0]) | (uint64_t(key_[1]) << 32); }
    uint64_t stream() const { return uint64_t(stream_[0]) | (uint64_t(stream_[1]) << 32); }

  private:
    void refill() {
        const std::array<uint32_t, 4> out = Philox4x32::block(
            {uint32_t(counter_), uint32_t(counter_ >> 32), stream_[0], stream_[1]},
            {key_[0], key_[1]});
        ++counter_;
        buf_[1] = uint64_t(out[0]) | (uint64_t(out[1]) << 32);
        buf_[0] = uint64_t(out[2]) | (uint64_t(out[3]) << 32);
        have_ = 2;
    }

    uint32_t key_[2];
    uint32_t stream_[2];
    uint64_t counter_ = 0;
    uint64_t buf_[2] = {0, 0};
    int have_ = 0;
};

}  // namespace ctput

#endif
