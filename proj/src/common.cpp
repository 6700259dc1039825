#include "eyeaffect/common.hpp"

#include "eyeaffect/error.hpp"

#include <cstdio>

namespace eyeaffect {

std::int64_t seconds_to_frames(double seconds) {
    const double frames = seconds * kFrameRate;
    const double rounded = std::round(frames);
    if (std::fabs(frames - rounded) > 1e-6) {
        throw ArgumentError("shift of " + std::to_string(seconds) +
                            " s is not a whole number of frames at 25 fps");
    }
    return static_cast<std::int64_t>(rounded);
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed) {
    std::uint64_t hash = seed;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::string to_hex(std::uint64_t value) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

}  // namespace eyeaffect
