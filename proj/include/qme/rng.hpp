// rng.hpp — Philox4x32-10 counter-based random stream. Each stream is keyed
// by (seed, stream id); draws depend only on the key and a draw counter, so
// per-trajectory streams are reproducible independently of execution order.

#pragma once

#include <array>
#include <cstdint>

namespace qme {

class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream_id)
        : key_{static_cast<std::uint32_t>(seed & 0xffffffffu),
               static_cast<std::uint32_t>(seed >> 32)},
          stream_id_(stream_id) {}

    // Uniform double in (0, 1].
    double uniform() {
        const std::uint64_t bits = next_u64();
        // 53-bit mantissa in [0,1), flipped to (0,1]
        return 1.0 - static_cast<double>(bits >> 11) * 0x1.0p-53;
    }

    std::uint64_t next_u64() {
        if (buffered_ < 2) refill();
        const std::uint32_t lo = buffer_[--buffered_];
        const std::uint32_t hi = buffer_[--buffered_];
        return (static_cast<std::uint64_t>(hi) << 32) | lo;
    }

private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    static void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                        std::uint32_t& lo) {
        const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
        hi = static_cast<std::uint32_t>(p >> 32);
        lo = static_cast<std::uint32_t>(p & 0xffffffffu);
    }

    void refill() {
        std::array<std::uint32_t, 4> ctr{
            static_cast<std::uint32_t>(counter_ & 0xffffffffu),
            static_cast<std::uint32_t>(counter_ >> 32),
            static_cast<std::uint32_t>(stream_id_ & 0xffffffffu),
            static_cast<std::uint32_t>(stream_id_ >> 32)};
        std::uint32_t k0 = key_[0], k1 = key_[1];
        for (int round = 0; round < 10; ++round) {
            std::uint32_t hi0, lo0, hi1, lo1;
            mulhilo(kMul0, ctr[0], hi0, lo0);
            mulhilo(kMul1, ctr[2], hi1, lo1);
            ctr = {hi1 ^ ctr[1] ^ k0, lo1, hi0 ^ ctr[3] ^ k1, lo0};
            k0 += kWeyl0;
            k1 += kWeyl1;
        }
        buffer_ = ctr;
        buffered_ = 4;
        ++counter_;
    }

    std::array<std::uint32_t, 2> key_;
    std::uint64_t stream_id_;
    std::uint64_t counter_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int buffered_ = 0;
};

} // namespace qme
