#pragma once

#include "eyeaffect/corpus.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace eyeaffect {

/// Thresholds for the computed binary descriptors.
struct ThresholdConfig {
    double closure_threshold = 1.0;     // blink intensity, 0..5 scale
    double fixation_threshold = 0.005;  // rad / frame
    double approach_epsilon = 0.0;      // rad
    double pupil_delta = 0.01;          // mm / frame
    double direct_gaze_angle = 0.087;   // rad, heuristic fallback only
};

/// Per-frame low-level descriptors of one subject. All channels have the
/// same length; binary channels are stored as 0/1 bytes.
struct DescriptorSeries {
    std::vector<double> gaze_x;
    std::vector<double> gaze_y;
    std::vector<double> d_gaze_x;
    std::vector<double> d_gaze_y;
    std::vector<double> pupil_diam;
    std::vector<double> d_pupil_diam;
    std::vector<double> blink_intensity;

    std::vector<unsigned char> direct_gaze;
    std::vector<unsigned char> gaze_approach;
    std::vector<unsigned char> eyes_fixated;
    std::vector<unsigned char> eye_closure;
    std::vector<unsigned char> pupil_dilation;
    std::vector<unsigned char> pupil_constriction;

    /// True when direct gaze came from the angle heuristic instead of a coder.
    bool direct_gaze_heuristic = false;

    std::size_t size() const { return gaze_x.size(); }
    bool has_binary() const { return direct_gaze.size() == size() && !direct_gaze.empty(); }
};

/// Read-only view of `[start, start + length)` of a DescriptorSeries.
struct DescriptorWindow {
    std::span<const double> gaze_x, gaze_y, d_gaze_x, d_gaze_y, pupil_diam, d_pupil_diam, blink_intensity;
    std::span<const unsigned char> direct_gaze, gaze_approach, eyes_fixated, eye_closure, pupil_dilation,
        pupil_constriction;

    std::size_t size() const { return gaze_x.size(); }
};

DescriptorWindow window_of(const DescriptorSeries& series, std::size_t start, std::size_t length);

/// Default ring: OpenFace eye landmarks 0..7 outline the pupil.
std::vector<int> default_pupil_ring();

/// Twice the mean distance from the selected ring points to their centroid.
/// Throws DataError for fewer than 3 points or an out-of-range index.
double pupil_diameter_from_landmarks(std::span<const Point3> landmarks, std::span<const int> ring_indices);

/// Fills the numeric channels. Pupil diameter comes from the frame's value
/// when present, otherwise from its landmark ring. Frames must be
/// contiguous; a gap throws DataError, as does a frame with no pupil source.
DescriptorSeries derive_numeric_llds(std::span<const FrameRecord> frames,
                                     std::span<const int> ring_indices = default_pupil_ring());

/// Fills the binary channels from the numeric ones. `direct_gaze_input`,
/// when non-empty, must match the series length and is copied verbatim.
void derive_binary_llds(DescriptorSeries& series, const ThresholdConfig& cfg,
                        std::span<const unsigned char> direct_gaze_input = {});

/// Collects the coder's direct-gaze flags; empty when any frame lacks one.
std::vector<unsigned char> direct_gaze_column(std::span<const FrameRecord> frames);

/// Both stages, using coder direct gaze when every frame carries it.
DescriptorSeries derive_llds(std::span<const FrameRecord> frames, const ThresholdConfig& cfg,
                             std::span<const int> ring_indices = default_pupil_ring());

/// Truncates every channel to `length` frames.
void truncate(DescriptorSeries& series, std::size_t length);

}  // namespace eyeaffect
