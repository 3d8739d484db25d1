#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace npc {

// Counter-based 64-bit generator. Output i is a bijective mix of key + i*gamma,
// so a stream is fully determined by its key and position.
class RandomStream {
public:
    using result_type = std::uint64_t;

    explicit RandomStream(std::uint64_t key = 0) noexcept : key_(key) {}

    // Key derived from a master seed and a list of identifiers (trial index,
    // block length, substream tag...). Order of identifiers matters.
    static RandomStream derive(std::uint64_t master_seed, std::initializer_list<std::uint64_t> ids) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept;

    // Uniform double in [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    std::uint64_t key() const noexcept { return key_; }
    std::uint64_t position() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t z) noexcept;

}  // namespace npc
