#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <random>

namespace cyclo {

/// Philox4x32-10 counter-based generator. The 64-bit seed is the key; the
/// stream identifiers (replicate, level) occupy the upper counter words and
/// the lower words count blocks, so distinct keys give independent streams.
class Philox4x32 {
public:
    using result_type = std::uint32_t;
    using Block = std::array<std::uint32_t, 4>;

    Philox4x32(std::uint64_t seed, std::uint32_t replicate, std::uint32_t level)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)}, stream_{replicate, level}
    {
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()()
    {
        if (pos_ == 4) {
            buffer_ = bijection({static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                                 stream_[1], stream_[0]},
                                key_);
            ++block_;
            pos_ = 0;
        }
        return buffer_[pos_++];
    }

    /// The keyed bijection itself, exposed for known-answer tests.
    static Block bijection(Block ctr, std::array<std::uint32_t, 2> key)
    {
        constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
        constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += W0;
                key[1] += W1;
            }
            const std::uint64_t p0 = static_cast<std::uint64_t>(M0) * ctr[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(M1) * ctr[2];
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        }
        return ctr;
    }

private:
    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 2> stream_;
    std::uint64_t block_ = 0;
    Block buffer_{};
    int pos_ = 4;
};

/// Standard normal variates from a keyed Philox stream.
class NormalStream {
public:
    NormalStream(std::uint64_t seed, std::uint64_t replicate, std::uint64_t level)
        : engine_(seed, static_cast<std::uint32_t>(replicate), static_cast<std::uint32_t>(level))
    {
    }

    double operator()() { return dist_(engine_); }

    template <class It>
    void fill(It first, It last)
    {
        for (; first != last; ++first) *first = dist_(engine_);
    }

private:
    Philox4x32 engine_;
    std::normal_distribution<double> dist_;
};

}  // namespace cyclo
