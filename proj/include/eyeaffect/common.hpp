#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>

namespace eyeaffect {

inline constexpr const char* kVersion = "0.1.0";

/// Corpus-wide video and annotation rate.
inline constexpr int kFrameRate = 25;

/// Feature window: 8 s at 25 fps.
inline constexpr int kWindowFrames = 200;

inline constexpr double frames_to_seconds(std::int64_t frames) {
    return static_cast<double>(frames) / kFrameRate;
}

/// Converts seconds to an integral frame count; throws ArgumentError when the
/// value is not a whole number of frames.
std::int64_t seconds_to_frames(double seconds);

/// 64-bit FNV-1a, used for catalog and input-file fingerprints.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);

std::string to_hex(std::uint64_t value);

}  // namespace eyeaffect
