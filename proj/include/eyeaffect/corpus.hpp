#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace eyeaffect {

struct Point3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

/// Raw eye measurements for one 25 Hz video frame.
struct FrameRecord {
    std::int64_t frame_index = 0;
    double timestamp = 0.0;          // seconds, frame_index / 25
    double confidence = 1.0;
    double gaze_x = 0.0;             // radians
    double gaze_y = 0.0;             // radians
    double blink_intensity = 0.0;    // action-unit intensity, 0..5
    std::optional<double> pupil_diameter;  // mm
    std::vector<Point3> eye_landmarks;     // mm, in column-index order
    std::optional<bool> direct_gaze;       // human-coded
};

enum class Dimension { arousal, valence };

std::string to_string(Dimension d);
Dimension parse_dimension(const std::string& name);

/// One annotator's 25 Hz trace for one affect dimension, values in [-1, 1].
struct AnnotationTrace {
    Dimension dimension = Dimension::arousal;
    std::string annotator_id;
    std::vector<double> values;
};

struct Partition {
    std::vector<std::string> train;
    std::vector<std::string> validation;
    std::vector<std::string> test;

    std::vector<std::string> all() const;
    /// Throws DataError when a subject appears in more than one set.
    void check_disjoint() const;
};

/// Maps frame-CSV columns onto FrameRecord fields. Defaults follow the
/// OpenFace 2.x CSV writer plus an optional coder-supplied `direct_gaze`
/// column; OpenFace numbers frames from 1, hence `frame_base = 1`.
struct ColumnMap {
    std::string frame = "frame";
    std::int64_t frame_base = 1;
    std::string timestamp = "timestamp";
    std::string confidence = "confidence";
    std::string gaze_x = "gaze_angle_x";
    std::string gaze_y = "gaze_angle_y";
    std::string blink_intensity = "AU45_r";
    std::string pupil_diameter = "pupil_diameter";
    std::string direct_gaze = "direct_gaze";
    std::string landmark_x_prefix = "eye_lmk_X_";
    std::string landmark_y_prefix = "eye_lmk_Y_";
    std::string landmark_z_prefix = "eye_lmk_Z_";
};

/// Parses a frame CSV. Optional columns (confidence, pupil, landmarks, direct
/// gaze, timestamp) may be absent. Throws DataError on malformed cells, on
/// a frame index that does not strictly increase, and on timestamps that are
/// not on the 25 fps grid.
std::vector<FrameRecord> parse_frames(std::istream& in, const ColumnMap& columns = {});
std::vector<FrameRecord> parse_frames_file(const std::string& path, const ColumnMap& columns = {});

/// Writes frames using `columns` names; landmark columns are emitted for the
/// largest landmark count present.
void serialize_frames(std::ostream& out, const std::vector<FrameRecord>& frames,
                      const ColumnMap& columns = {});

/// Parses `time,<annotator>...` (',' or ';' separated). One trace per
/// annotator column. Throws DataError for a missing time column, a time step
/// other than 1/25 s, or any value outside [-1, 1].
std::vector<AnnotationTrace> parse_annotations(std::istream& in, Dimension dimension);
std::vector<AnnotationTrace> parse_annotations_file(const std::string& path, Dimension dimension);

void serialize_annotations(std::ostream& out, const std::vector<AnnotationTrace>& traces, char delimiter = ',');

/// Frame-wise mean over annotators, truncated to the shortest trace.
std::vector<double> gold_standard(const std::vector<AnnotationTrace>& traces);

/// Subject lists of the reference corpus split (8 / 8 / 7 subjects).
Partition default_partition();

/// INI-style `[train]`, `[validation]`, `[test]` sections, one subject id per
/// line (commas also accepted). `#` and `;` start comments.
Partition parse_partition(std::istream& in);
Partition parse_partition_file(const std::string& path);
void serialize_partition(std::ostream& out, const Partition& partition);

struct SynthOptions {
    std::uint64_t seed = 1;
    int n_subjects = 12;
    double duration_s = 120.0;
    double lag_s = 2.0;
    int n_annotators = 3;
    int n_train = -1;       // -1: two thirds of the subjects
    int n_test = 0;
};

struct SynthSubject {
    std::string id;
    std::vector<FrameRecord> frames;
    std::vector<AnnotationTrace> traces;  // arousal
    /// The latent series the target is a delayed function of: trailing
    /// 200-frame mean of the pupil diameter (partial window at the start).
    std::vector<double> driver;
};

struct SynthCorpus {
    std::vector<SynthSubject> subjects;
    Partition partition;
    /// Frame channels generated independently of the target.
    std::vector<std::string> noise_channels;
    std::string driver_channel;
};

/// Deterministic synthetic corpus. Pupil diameter drives the arousal target
/// through its trailing 8 s mean delayed by `lag_s`; gaze angles, blink
/// intensity and direct gaze are independent noise. Frames carry an 8-point
/// pupil ring in landmarks 0..7 and no pupil column, as OpenFace output does.
/// Throws ArgumentError for lag outside [0, 4.4] s or duration below 16 s.
SynthCorpus synth_corpus(const SynthOptions& options);

}  // namespace eyeaffect
