#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace agentsim {

inline constexpr std::uint64_t kFnvOffsetBasis = 0xcbf29ce484222325ULL;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

/// 64-bit FNV-1a. Pass a previous result as `state` to continue a fold.
constexpr std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t state = kFnvOffsetBasis) noexcept
{
    for (unsigned char c : bytes) {
        state ^= c;
        state *= kFnvPrime;
    }
    return state;
}

/// 16 lowercase hex digits, zero padded.
std::string to_hex16(std::uint64_t value);

/// Inverse of to_hex16; throws std::invalid_argument on malformed input.
std::uint64_t from_hex16(std::string_view text);

} // namespace agentsim
