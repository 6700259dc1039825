#include "eyeaffect/corpus.hpp"

#include "eyeaffect/common.hpp"
#include "eyeaffect/csv.hpp"
#include "eyeaffect/error.hpp"
#include "eyeaffect/log.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

namespace eyeaffect {

namespace {

// Timestamps in OpenFace / RECOLA files carry millisecond precision.
constexpr double kTimeTolerance = 5e-4;

bool parse_bool_cell(const std::string& cell, std::size_t row, const std::string& column) {
    if (cell == "1" || cell == "true" || cell == "True" || cell == "TRUE") {
        return true;
    }
    if (cell == "0" || cell == "false" || cell == "False" || cell == "FALSE") {
        return false;
    }
    const double v = csv::parse_double(cell, row, column);
    if (v != 0.0 && v != 1.0) {
        throw DataError("row " + std::to_string(row) + ", column '" + column + "': expected 0/1, found '" +
                        cell + "'");
    }
    return v == 1.0;
}

std::vector<std::string> strip_comment_and_split(const std::string& line) {
    std::string body = line;
    const auto hash = body.find_first_of("#;");
    if (hash != std::string::npos) {
        body.erase(hash);
    }
    std::vector<std::string> out;
    std::string token;
    for (char c : body) {
        if (c == ',' || c == ' ' || c == '\t' || c == '\r') {
            if (!token.empty()) {
                out.push_back(token);
                token.clear();
            }
        } else {
            token.push_back(c);
        }
    }
    if (!token.empty()) {
        out.push_back(token);
    }
    return out;
}

}  // namespace

std::string to_string(Dimension d) {
    return d == Dimension::arousal ? "arousal" : "valence";
}

Dimension parse_dimension(const std::string& name) {
    if (name == "arousal") {
        return Dimension::arousal;
    }
    if (name == "valence") {
        return Dimension::valence;
    }
    throw ArgumentError("unknown affect dimension '" + name + "' (expected arousal|valence)");
}

std::vector<std::string> Partition::all() const {
    std::vector<std::string> ids;
    ids.insert(ids.end(), train.begin(), train.end());
    ids.insert(ids.end(), validation.begin(), validation.end());
    ids.insert(ids.end(), test.begin(), test.end());
    return ids;
}

void Partition::check_disjoint() const {
    std::set<std::string> seen;
    for (const auto& id : all()) {
        if (!seen.insert(id).second) {
            throw DataError("subject '" + id + "' appears in more than one partition set");
        }
    }
}

std::vector<FrameRecord> parse_frames(std::istream& in, const ColumnMap& columns) {
    const csv::Table table = csv::read(in, ',');

    const auto required = [&](const std::string& name) {
        const int idx = table.column(name);
        if (idx < 0) {
            throw DataError("frame csv is missing column '" + name + "'");
        }
        return idx;
    };
    const int c_frame = required(columns.frame);
    const int c_gx = required(columns.gaze_x);
    const int c_gy = required(columns.gaze_y);
    const int c_blink = required(columns.blink_intensity);
    const int c_time = table.column(columns.timestamp);
    const int c_conf = table.column(columns.confidence);
    const int c_pupil = table.column(columns.pupil_diameter);
    const int c_direct = table.column(columns.direct_gaze);

    std::vector<std::array<int, 3>> landmark_cols;
    for (int k = 0;; ++k) {
        const int x = table.column(columns.landmark_x_prefix + std::to_string(k));
        const int y = table.column(columns.landmark_y_prefix + std::to_string(k));
        const int z = table.column(columns.landmark_z_prefix + std::to_string(k));
        if (x < 0 || y < 0 || z < 0) {
            break;
        }
        landmark_cols.push_back({x, y, z});
    }

    std::vector<FrameRecord> frames;
    frames.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const std::size_t row_no = r + 1;
        const auto num = [&](int col) { return csv::parse_double(row[col], row_no, table.header[col]); };

        FrameRecord f;
        const double raw_frame = num(c_frame);
        if (raw_frame != std::floor(raw_frame)) {
            throw DataError("row " + std::to_string(row_no) + ", column '" + columns.frame +
                            "': frame index must be an integer");
        }
        f.frame_index = static_cast<std::int64_t>(raw_frame) - columns.frame_base;
        if (f.frame_index < 0) {
            throw DataError("row " + std::to_string(row_no) + ": frame index below frame_base");
        }
        if (!frames.empty() && f.frame_index <= frames.back().frame_index) {
            throw DataError("row " + std::to_string(row_no) + ": frame index " + row[c_frame] +
                            " does not follow " + std::to_string(frames.back().frame_index + columns.frame_base) +
                            " (frames must be strictly ascending)");
        }
        f.timestamp = frames_to_seconds(f.frame_index);
        if (c_time >= 0) {
            const double t = num(c_time);
            if (std::fabs(t - f.timestamp) > kTimeTolerance) {
                throw DataError("row " + std::to_string(row_no) + ": timestamp " + row[c_time] +
                                " is not frame/25 s; only 25 fps input is supported");
            }
        }
        if (c_conf >= 0) {
            f.confidence = num(c_conf);
        }
        f.gaze_x = num(c_gx);
        f.gaze_y = num(c_gy);
        f.blink_intensity = num(c_blink);
        if (f.blink_intensity < 0.0 || f.blink_intensity > 5.0) {
            throw DataError("row " + std::to_string(row_no) + ", column '" + columns.blink_intensity +
                            "': blink intensity outside [0, 5]");
        }
        if (c_pupil >= 0 && !row[c_pupil].empty()) {
            const double p = num(c_pupil);
            if (!(p > 0.0)) {
                throw DataError("row " + std::to_string(row_no) + ", column '" + columns.pupil_diameter +
                                "': pupil diameter must be positive");
            }
            f.pupil_diameter = p;
        }
        f.eye_landmarks.reserve(landmark_cols.size());
        for (const auto& [x, y, z] : landmark_cols) {
            f.eye_landmarks.push_back({num(x), num(y), num(z)});
        }
        if (c_direct >= 0 && !row[c_direct].empty()) {
            f.direct_gaze = parse_bool_cell(row[c_direct], row_no, columns.direct_gaze);
        }
        frames.push_back(std::move(f));
    }
    return frames;
}

std::vector<FrameRecord> parse_frames_file(const std::string& path, const ColumnMap& columns) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open " + path);
    }
    try {
        return parse_frames(in, columns);
    } catch (const DataError& e) {
        throw DataError(path + ": " + e.what());
    }
}

void serialize_frames(std::ostream& out, const std::vector<FrameRecord>& frames, const ColumnMap& columns) {
    std::size_t n_landmarks = 0;
    bool any_pupil = false;
    bool any_direct = false;
    for (const auto& f : frames) {
        n_landmarks = std::max(n_landmarks, f.eye_landmarks.size());
        any_pupil = any_pupil || f.pupil_diameter.has_value();
        any_direct = any_direct || f.direct_gaze.has_value();
    }

    std::string line = columns.frame + "," + columns.timestamp + "," + columns.confidence + "," + columns.gaze_x +
                       "," + columns.gaze_y;
    for (const auto* prefix : {&columns.landmark_x_prefix, &columns.landmark_y_prefix, &columns.landmark_z_prefix}) {
        for (std::size_t k = 0; k < n_landmarks; ++k) {
            line += "," + *prefix + std::to_string(k);
        }
    }
    line += "," + columns.blink_intensity;
    if (any_pupil) {
        line += "," + columns.pupil_diameter;
    }
    if (any_direct) {
        line += "," + columns.direct_gaze;
    }
    out << line << '\n';

    for (const auto& f : frames) {
        line = std::to_string(f.frame_index + columns.frame_base);
        line += "," + csv::format_double(f.timestamp) + "," + csv::format_double(f.confidence) + "," +
                csv::format_double(f.gaze_x) + "," + csv::format_double(f.gaze_y);
        for (int axis = 0; axis < 3; ++axis) {
            for (std::size_t k = 0; k < n_landmarks; ++k) {
                line.push_back(',');
                if (k < f.eye_landmarks.size()) {
                    const auto& p = f.eye_landmarks[k];
                    line += csv::format_double(axis == 0 ? p.x : axis == 1 ? p.y : p.z);
                } else {
                    line += "0";
                }
            }
        }
        line += "," + csv::format_double(f.blink_intensity);
        if (any_pupil) {
            line += "," + (f.pupil_diameter ? csv::format_double(*f.pupil_diameter) : std::string());
        }
        if (any_direct) {
            line += "," + (f.direct_gaze ? std::string(*f.direct_gaze ? "1" : "0") : std::string());
        }
        out << line << '\n';
    }
}

std::vector<AnnotationTrace> parse_annotations(std::istream& in, Dimension dimension) {
    const csv::Table table = csv::read(in);
    const int c_time = table.column("time");
    if (c_time < 0) {
        throw DataError("annotation csv has no 'time' column");
    }
    std::vector<AnnotationTrace> traces;
    std::vector<int> value_cols;
    for (std::size_t c = 0; c < table.header.size(); ++c) {
        if (static_cast<int>(c) == c_time) {
            continue;
        }
        AnnotationTrace trace;
        trace.dimension = dimension;
        trace.annotator_id = table.header[c];
        traces.push_back(std::move(trace));
        value_cols.push_back(static_cast<int>(c));
    }
    if (traces.empty()) {
        throw DataError("annotation csv has no annotator columns");
    }

    std::int64_t first_frame = 0;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const double t = csv::parse_double(row[c_time], r + 1, "time");
        if (r == 0) {
            first_frame = static_cast<std::int64_t>(std::llround(t * kFrameRate));
            if (first_frame < 0 || std::fabs(t - frames_to_seconds(first_frame)) > kTimeTolerance) {
                throw DataError("annotation time " + row[c_time] + " is not on the 25 Hz grid");
            }
        }
        const double expected = frames_to_seconds(first_frame + static_cast<std::int64_t>(r));
        if (std::fabs(t - expected) > kTimeTolerance) {
            throw DataError("annotation row " + std::to_string(r + 1) + ": time " + row[c_time] +
                            " breaks the 25 values/second rate");
        }
        for (std::size_t k = 0; k < value_cols.size(); ++k) {
            const double v = csv::parse_double(row[value_cols[k]], r + 1, table.header[value_cols[k]]);
            if (v < -1.0 || v > 1.0) {
                throw DataError("annotation row " + std::to_string(r + 1) + ", annotator '" +
                                traces[k].annotator_id + "': value " + row[value_cols[k]] + " outside [-1, 1]");
            }
            traces[k].values.push_back(v);
        }
    }
    if (first_frame > 0 && !table.rows.empty()) {
        warn("annotation trace starts at frame " + std::to_string(first_frame) +
             "; leading frames are filled with the first value");
        for (auto& trace : traces) {
            trace.values.insert(trace.values.begin(), static_cast<std::size_t>(first_frame), trace.values.front());
        }
    }
    return traces;
}

std::vector<AnnotationTrace> parse_annotations_file(const std::string& path, Dimension dimension) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open " + path);
    }
    try {
        return parse_annotations(in, dimension);
    } catch (const DataError& e) {
        throw DataError(path + ": " + e.what());
    }
}

void serialize_annotations(std::ostream& out, const std::vector<AnnotationTrace>& traces, char delimiter) {
    out << "time";
    std::size_t n = traces.empty() ? 0 : traces.front().values.size();
    for (const auto& t : traces) {
        out << delimiter << t.annotator_id;
        n = std::min(n, t.values.size());
    }
    out << '\n';
    char buf[32];
    for (std::size_t i = 0; i < n; ++i) {
        std::snprintf(buf, sizeof(buf), "%.2f", frames_to_seconds(static_cast<std::int64_t>(i)));
        std::string line = buf;
        for (const auto& t : traces) {
            line += delimiter;
            line += csv::format_double(t.values[i]);
        }
        out << line << '\n';
    }
}

std::vector<double> gold_standard(const std::vector<AnnotationTrace>& traces) {
    if (traces.empty()) {
        throw ArgumentError("gold_standard needs at least one trace");
    }
    std::size_t n = traces.front().values.size();
    for (const auto& t : traces) {
        n = std::min(n, t.values.size());
    }
    std::vector<double> mean(n, 0.0);
    for (const auto& t : traces) {
        for (std::size_t i = 0; i < n; ++i) {
            mean[i] += t.values[i];
        }
    }
    for (double& v : mean) {
        v /= static_cast<double>(traces.size());
    }
    return mean;
}

Partition default_partition() {
    Partition p;
    p.train = {"P16", "P17", "P19", "P21", "P23", "P26", "P30", "P65"};
    p.validation = {"P25", "P28", "P34", "P37", "P41", "P48", "P56", "P58"};
    p.test = {"P39", "P42", "P43", "P45", "P46", "P62", "P64"};
    return p;
}

Partition parse_partition(std::istream& in) {
    Partition p;
    std::vector<std::string>* current = nullptr;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto open = line.find('[');
        if (open != std::string::npos && line.find_first_not_of(" \t") == open) {
            const auto close = line.find(']', open);
            if (close == std::string::npos) {
                throw DataError("partition line " + std::to_string(line_no) + ": unterminated section");
            }
            const std::string name = line.substr(open + 1, close - open - 1);
            if (name == "train") {
                current = &p.train;
            } else if (name == "validation") {
                current = &p.validation;
            } else if (name == "test") {
                current = &p.test;
            } else {
                throw DataError("partition line " + std::to_string(line_no) + ": unknown section [" + name + "]");
            }
            continue;
        }
        const auto ids = strip_comment_and_split(line);
        if (ids.empty()) {
            continue;
        }
        if (current == nullptr) {
            throw DataError("partition line " + std::to_string(line_no) + ": subject id outside a section");
        }
        current->insert(current->end(), ids.begin(), ids.end());
    }
    p.check_disjoint();
    return p;
}

Partition parse_partition_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open " + path);
    }
    return parse_partition(in);
}

void serialize_partition(std::ostream& out, const Partition& partition) {
    const auto section = [&](const char* name, const std::vector<std::string>& ids) {
        out << '[' << name << "]\n";
        for (const auto& id : ids) {
            out << id << '\n';
        }
    };
    section("train", partition.train);
    section("validation", partition.validation);
    section("test", partition.test);
}

namespace {

constexpr double kPupilMean = 3.5;
constexpr double kPupilScale = 0.25;
constexpr double kDriverAr = 0.5;
constexpr double kGazeAr = 0.9;
constexpr int kRingPoints = 8;

SynthSubject synth_subject(const SynthOptions& opt, int index) {
    std::seed_seq seq{static_cast<std::uint32_t>(opt.seed), static_cast<std::uint32_t>(opt.seed >> 32),
                      static_cast<std::uint32_t>(index), 0x5e1dU};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);

    const auto n = static_cast<std::size_t>(std::llround(opt.duration_s * kFrameRate));
    const auto lag = static_cast<std::size_t>(seconds_to_frames(opt.lag_s));

    char id[16];
    std::snprintf(id, sizeof(id), "S%02d", index + 1);
    SynthSubject subject;
    subject.id = id;

    std::vector<double> pupil(n);
    double ar = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        ar = kDriverAr * ar + normal(rng);
        pupil[t] = std::max(1.0, kPupilMean + kPupilScale * ar);
    }

    subject.driver.resize(n);
    double running = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        running += pupil[t];
        if (t >= static_cast<std::size_t>(kWindowFrames)) {
            running -= pupil[t - kWindowFrames];
        }
        const auto count = std::min<std::size_t>(t + 1, kWindowFrames);
        subject.driver[t] = running / static_cast<double>(count);
    }

    // Stationary SD of a 200-frame mean of the AR(1) pupil process.
    const double ar_var = 1.0 / (1.0 - kDriverAr * kDriverAr);
    const double mean_sd =
        kPupilScale * std::sqrt(ar_var * (1.0 + kDriverAr) / (1.0 - kDriverAr) / kWindowFrames);
    std::vector<double> signal(n);
    for (std::size_t t = 0; t < n; ++t) {
        const std::size_t src = t >= lag ? t - lag : 0;
        signal[t] = std::tanh((subject.driver[src] - kPupilMean) / mean_sd);
    }

    for (int a = 0; a < opt.n_annotators; ++a) {
        AnnotationTrace trace;
        trace.dimension = Dimension::arousal;
        trace.annotator_id = "A" + std::to_string(a + 1);
        trace.values.resize(n);
        for (std::size_t t = 0; t < n; ++t) {
            trace.values[t] = std::clamp(0.6 * signal[t] + 0.65 * normal(rng), -1.0, 1.0);
        }
        subject.traces.push_back(std::move(trace));
    }

    subject.frames.resize(n);
    double gx = 0.0;
    double gy = 0.0;
    bool direct = uniform(rng) < 0.5;
    int blink_left = 0;
    double blink_peak = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        auto& f = subject.frames[t];
        f.frame_index = static_cast<std::int64_t>(t);
        f.timestamp = frames_to_seconds(f.frame_index);
        f.confidence = 0.98;
        gx = kGazeAr * gx + 0.02 * normal(rng);
        gy = kGazeAr * gy + 0.02 * normal(rng);
        f.gaze_x = gx + 0.005 * normal(rng);
        f.gaze_y = gy + 0.005 * normal(rng);

        if (blink_left == 0 && uniform(rng) < 0.03) {
            blink_left = 3 + static_cast<int>(uniform(rng) * 6.0);
            blink_peak = 1.5 + 2.5 * uniform(rng);
        }
        if (blink_left > 0) {
            f.blink_intensity = std::clamp(blink_peak + 0.2 * normal(rng), 0.0, 5.0);
            --blink_left;
        } else {
            f.blink_intensity = std::clamp(std::fabs(0.1 * normal(rng)), 0.0, 5.0);
        }

        if (uniform(rng) < 0.02) {
            direct = !direct;
        }
        f.direct_gaze = direct;

        const double radius = pupil[t] / 2.0;
        f.eye_landmarks.reserve(kRingPoints);
        for (int k = 0; k < kRingPoints; ++k) {
            const double angle = 2.0 * std::numbers::pi * k / kRingPoints;
            f.eye_landmarks.push_back({-30.0 + radius * std::cos(angle), 5.0 + radius * std::sin(angle), 600.0});
        }
    }
    return subject;
}

}  // namespace

SynthCorpus synth_corpus(const SynthOptions& options) {
    if (options.lag_s < 0.0 || options.lag_s > 4.4 + 1e-9) {
        throw ArgumentError("synthetic lag must lie in [0, 4.4] s");
    }
    if (options.duration_s < 16.0) {
        throw ArgumentError("synthetic duration must be at least 16 s (two feature windows)");
    }
    if (options.n_subjects < 1 || options.n_annotators < 1) {
        throw ArgumentError("synthetic corpus needs at least one subject and one annotator");
    }
    seconds_to_frames(options.lag_s);

    SynthCorpus corpus;
    corpus.driver_channel = "pupil_diameter";
    corpus.noise_channels = {"gaze_x", "gaze_y", "blink_intensity", "direct_gaze"};
    for (int i = 0; i < options.n_subjects; ++i) {
        corpus.subjects.push_back(synth_subject(options, i));
    }

    const int n = options.n_subjects;
    const int n_test = std::clamp(options.n_test, 0, n);
    int n_train = options.n_train >= 0 ? options.n_train : (2 * n + 2) / 3;
    n_train = std::clamp(n_train, 0, n - n_test);
    for (int i = 0; i < n; ++i) {
        const auto& id = corpus.subjects[static_cast<std::size_t>(i)].id;
        if (i < n_train) {
            corpus.partition.train.push_back(id);
        } else if (i < n - n_test) {
            corpus.partition.validation.push_back(id);
        } else {
            corpus.partition.test.push_back(id);
        }
    }
    return corpus;
}

}  // namespace eyeaffect
