#ifndef BRANCHWAVE_RNG_HPP
#define BRANCHWAVE_RNG_HPP

#include <array>
#include <cmath>
#include <cstdint>

namespace branchwave {

// Philox4x32-10 counter-based generator. A stream is keyed by (seed, index),
// so sample i draws the same numbers no matter which worker runs it.
class CounterRng {
public:
    using result_type = std::uint64_t;

    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_(stream)
    {
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type(0); }

    result_type operator()()
    {
        if (have_ == 0)
            refill();
        --have_;
        return buf_[have_];
    }

    // Uniform on [0,1) with 53 random bits.
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    // Uniform on (0,1].
    double uniform_pos() { return 1.0 - uniform(); }

    double normal()
    {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform_pos()));
        const double a = 2.0 * M_PI * uniform();
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    std::uint64_t blocks_used() const { return block_; }

    static std::array<std::uint32_t, 4> philox_block(std::array<std::uint32_t, 4> ctr,
                                                     std::array<std::uint32_t, 2> k)
    {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                k[0] += 0x9E3779B9u;
                k[1] += 0xBB67AE85u;
            }
            const std::uint64_t p0 = std::uint64_t(0xD2511F53u) * ctr[0];
            const std::uint64_t p1 = std::uint64_t(0xCD9E8D57u) * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ k[0], static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ k[1], static_cast<std::uint32_t>(p0)};
        }
        return ctr;
    }

private:
    void refill()
    {
        const auto ctr = philox_block({static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32),
                                       static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32)},
                                      key_);
        buf_[0] = (std::uint64_t(ctr[0]) << 32) | ctr[1];
        buf_[1] = (std::uint64_t(ctr[2]) << 32) | ctr[3];
        have_ = 2;
        ++block_;
    }

    std::array<std::uint32_t, 2> key_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::array<std::uint64_t, 2> buf_{};
    int have_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace branchwave

#endif
