#include "eyeaffect/lld.hpp"

#include "eyeaffect/error.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace eyeaffect {

namespace {

std::vector<double> first_difference(const std::vector<double>& v) {
    std::vector<double> d(v.size(), 0.0);
    for (std::size_t t = 1; t < v.size(); ++t) {
        d[t] = v[t] - v[t - 1];
    }
    return d;
}

template <typename T>
std::span<const T> sub(const std::vector<T>& v, std::size_t start, std::size_t length) {
    return std::span<const T>(v).subspan(start, length);
}

}  // namespace

DescriptorWindow window_of(const DescriptorSeries& s, std::size_t start, std::size_t length) {
    if (start + length > s.size()) {
        throw ArgumentError("window exceeds descriptor series length");
    }
    if (!s.has_binary()) {
        throw ArgumentError("descriptor series has no binary channels");
    }
    return DescriptorWindow{
        sub(s.gaze_x, start, length),          sub(s.gaze_y, start, length),
        sub(s.d_gaze_x, start, length),        sub(s.d_gaze_y, start, length),
        sub(s.pupil_diam, start, length),      sub(s.d_pupil_diam, start, length),
        sub(s.blink_intensity, start, length), sub(s.direct_gaze, start, length),
        sub(s.gaze_approach, start, length),   sub(s.eyes_fixated, start, length),
        sub(s.eye_closure, start, length),     sub(s.pupil_dilation, start, length),
        sub(s.pupil_constriction, start, length),
    };
}

std::vector<int> default_pupil_ring() {
    return {0, 1, 2, 3, 4, 5, 6, 7};
}

double pupil_diameter_from_landmarks(std::span<const Point3> landmarks, std::span<const int> ring_indices) {
    if (ring_indices.size() < 3) {
        throw DataError("pupil ring needs at least 3 landmarks, got " + std::to_string(ring_indices.size()));
    }
    Point3 c;
    for (int idx : ring_indices) {
        if (idx < 0 || static_cast<std::size_t>(idx) >= landmarks.size()) {
            throw DataError("pupil ring index " + std::to_string(idx) + " outside the " +
                            std::to_string(landmarks.size()) + " available landmarks");
        }
        const auto& p = landmarks[static_cast<std::size_t>(idx)];
        c.x += p.x;
        c.y += p.y;
        c.z += p.z;
    }
    const double n = static_cast<double>(ring_indices.size());
    c.x /= n;
    c.y /= n;
    c.z /= n;
    double sum = 0.0;
    for (int idx : ring_indices) {
        const auto& p = landmarks[static_cast<std::size_t>(idx)];
        sum += std::sqrt((p.x - c.x) * (p.x - c.x) + (p.y - c.y) * (p.y - c.y) + (p.z - c.z) * (p.z - c.z));
    }
    return 2.0 * sum / n;
}

DescriptorSeries derive_numeric_llds(std::span<const FrameRecord> frames, std::span<const int> ring_indices) {
    if (frames.empty()) {
        throw ArgumentError("derive_numeric_llds needs at least one frame");
    }
    DescriptorSeries s;
    const std::size_t n = frames.size();
    s.gaze_x.reserve(n);
    s.gaze_y.reserve(n);
    s.pupil_diam.reserve(n);
    s.blink_intensity.reserve(n);
    for (std::size_t t = 0; t < n; ++t) {
        const auto& f = frames[t];
        if (t > 0 && f.frame_index != frames[t - 1].frame_index + 1) {
            throw DataError("frame sequence has a gap between frame " + std::to_string(frames[t - 1].frame_index) +
                            " and " + std::to_string(f.frame_index));
        }
        s.gaze_x.push_back(f.gaze_x);
        s.gaze_y.push_back(f.gaze_y);
        s.blink_intensity.push_back(f.blink_intensity);
        if (f.pupil_diameter) {
            s.pupil_diam.push_back(*f.pupil_diameter);
        } else if (!f.eye_landmarks.empty()) {
            s.pupil_diam.push_back(pupil_diameter_from_landmarks(f.eye_landmarks, ring_indices));
        } else {
            throw DataError("frame " + std::to_string(f.frame_index) +
                            " has neither a pupil diameter nor eye landmarks");
        }
    }
    s.d_gaze_x = first_difference(s.gaze_x);
    s.d_gaze_y = first_difference(s.gaze_y);
    s.d_pupil_diam = first_difference(s.pupil_diam);
    return s;
}

void derive_binary_llds(DescriptorSeries& s, const ThresholdConfig& cfg,
                        std::span<const unsigned char> direct_gaze_input) {
    const std::size_t n = s.size();
    if (s.gaze_y.size() != n || s.d_gaze_x.size() != n || s.d_gaze_y.size() != n || s.pupil_diam.size() != n ||
        s.d_pupil_diam.size() != n || s.blink_intensity.size() != n) {
        throw DataError("descriptor channels differ in length");
    }
    if (!direct_gaze_input.empty() && direct_gaze_input.size() != n) {
        throw DataError("direct gaze column has " + std::to_string(direct_gaze_input.size()) +
                        " frames, descriptors have " + std::to_string(n));
    }

    s.direct_gaze.assign(n, 0);
    s.gaze_approach.assign(n, 0);
    s.eyes_fixated.assign(n, 0);
    s.eye_closure.assign(n, 0);
    s.pupil_dilation.assign(n, 0);
    s.pupil_constriction.assign(n, 0);
    s.direct_gaze_heuristic = direct_gaze_input.empty();

    double prev_norm = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        const double norm = std::hypot(s.gaze_x[t], s.gaze_y[t]);
        s.eye_closure[t] = s.blink_intensity[t] >= cfg.closure_threshold;
        s.eyes_fixated[t] = std::hypot(s.d_gaze_x[t], s.d_gaze_y[t]) < cfg.fixation_threshold;
        s.gaze_approach[t] = t > 0 && norm < prev_norm - cfg.approach_epsilon;
        s.pupil_dilation[t] = s.d_pupil_diam[t] > cfg.pupil_delta;
        s.pupil_constriction[t] = s.d_pupil_diam[t] < -cfg.pupil_delta;
        s.direct_gaze[t] = direct_gaze_input.empty() ? norm < cfg.direct_gaze_angle : direct_gaze_input[t] != 0;
        prev_norm = norm;
    }
}

std::vector<unsigned char> direct_gaze_column(std::span<const FrameRecord> frames) {
    std::vector<unsigned char> out;
    out.reserve(frames.size());
    for (const auto& f : frames) {
        if (!f.direct_gaze) {
            return {};
        }
        out.push_back(*f.direct_gaze ? 1 : 0);
    }
    return out;
}

DescriptorSeries derive_llds(std::span<const FrameRecord> frames, const ThresholdConfig& cfg,
                             std::span<const int> ring_indices) {
    DescriptorSeries s = derive_numeric_llds(frames, ring_indices);
    derive_binary_llds(s, cfg, direct_gaze_column(frames));
    return s;
}

void truncate(DescriptorSeries& s, std::size_t length) {
    if (length >= s.size()) {
        return;
    }
    for (auto* v : {&s.gaze_x, &s.gaze_y, &s.d_gaze_x, &s.d_gaze_y, &s.pupil_diam, &s.d_pupil_diam,
                    &s.blink_intensity}) {
        v->resize(length);
    }
    for (auto* v : {&s.direct_gaze, &s.gaze_approach, &s.eyes_fixated, &s.eye_closure, &s.pupil_dilation,
                    &s.pupil_constriction}) {
        if (!v->empty()) {
            v->resize(length);
        }
    }
}

}  // namespace eyeaffect
