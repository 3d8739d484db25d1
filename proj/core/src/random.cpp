#include "npclass/random.hpp"

namespace npc {

namespace {
constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

RandomStream RandomStream::derive(std::uint64_t master_seed, std::initializer_list<std::uint64_t> ids) noexcept {
    std::uint64_t key = mix64(master_seed + kGamma);
    for (std::uint64_t id : ids) key = mix64(key ^ mix64(id + kGamma));
    return RandomStream(key);
}

RandomStream::result_type RandomStream::operator()() noexcept {
    ++counter_;
    return mix64(key_ + counter_ * kGamma);
}

}  // namespace npc
