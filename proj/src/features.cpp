#include "eyeaffect/features.hpp"

#include "eyeaffect/common.hpp"
#include "eyeaffect/csv.hpp"
#include "eyeaffect/error.hpp"
#include "eyeaffect/stats.hpp"
#include "eyeaffect/wavelet.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <unordered_map>

namespace eyeaffect {

namespace {

constexpr std::array<EventStat, 4> kShortEvent = {EventStat::ratio, EventStat::dur_mean, EventStat::dur_max,
                                                  EventStat::dur_total};
constexpr std::array<EventStat, 4> kApproachEvent = {EventStat::ratio, EventStat::dur_median, EventStat::dur_mean,
                                                     EventStat::dur_max};
constexpr std::array<EventStat, 5> kLongEvent = {EventStat::ratio, EventStat::dur_min, EventStat::dur_median,
                                                 EventStat::dur_mean, EventStat::dur_max};
constexpr std::array<Stat, 14> kNumericStats = {
    Stat::min, Stat::max, Stat::mean, Stat::median, Stat::q1, Stat::q3, Stat::skewness,
    Stat::kurtosis, Stat::sd, Stat::iqr12, Stat::iqr23, Stat::iqr13, Stat::slope, Stat::intercept,
};
constexpr std::array<Stat, 9> kBlinkStats = {
    Stat::max, Stat::mean, Stat::median, Stat::q3, Stat::sd, Stat::iqr12, Stat::iqr23, Stat::slope, Stat::intercept,
};

static_assert(3 * kShortEvent.size() == 12);
static_assert(kApproachEvent.size() + 2 * kLongEvent.size() == 14);
static_assert(6 * kNumericStats.size() == 84);
static_assert(kBlinkStats.size() == 9);
static_assert(6 * 13 + 12 + 6 * 12 + 11 == kWaveletFeatureCount);
static_assert(12 + 14 + 84 + 9 + kWaveletFeatureCount == 292);

struct EventChannel {
    const char* prefix;
    FeatureGroup group;
    std::span<const unsigned char> DescriptorWindow::*channel;
};

struct NumericChannel {
    const char* prefix;
    FeatureGroup group;
    std::span<const double> DescriptorWindow::*channel;
};

constexpr std::array<EventChannel, 3> kShortEventChannels = {{
    {"gaze.direct", FeatureGroup::gaze, &DescriptorWindow::direct_gaze},
    {"pupil.dilation", FeatureGroup::pupil, &DescriptorWindow::pupil_dilation},
    {"pupil.constriction", FeatureGroup::pupil, &DescriptorWindow::pupil_constriction},
}};
constexpr EventChannel kApproachChannel = {"gaze.approach", FeatureGroup::gaze, &DescriptorWindow::gaze_approach};
constexpr std::array<EventChannel, 2> kLongEventChannels = {{
    {"gaze.fixated", FeatureGroup::gaze, &DescriptorWindow::eyes_fixated},
    {"closure.eye_closure", FeatureGroup::closure, &DescriptorWindow::eye_closure},
}};
constexpr std::array<NumericChannel, 6> kNumericChannels = {{
    {"pupil.diam", FeatureGroup::pupil, &DescriptorWindow::pupil_diam},
    {"pupil.ddiam", FeatureGroup::pupil, &DescriptorWindow::d_pupil_diam},
    {"gaze.x", FeatureGroup::gaze, &DescriptorWindow::gaze_x},
    {"gaze.y", FeatureGroup::gaze, &DescriptorWindow::gaze_y},
    {"gaze.dx", FeatureGroup::gaze, &DescriptorWindow::d_gaze_x},
    {"gaze.dy", FeatureGroup::gaze, &DescriptorWindow::d_gaze_y},
}};
constexpr NumericChannel kBlinkChannel = {"closure.blink_intensity", FeatureGroup::closure,
                                          &DescriptorWindow::blink_intensity};

FeatureCatalog build_eye_catalog() {
    std::vector<FeatureEntry> entries;
    const auto add = [&](const std::string& name, FeatureGroup g, FeatureKind k) {
        entries.push_back({name, g, k});
    };
    for (const auto& c : kShortEventChannels) {
        for (EventStat s : kShortEvent) {
            add(std::string(c.prefix) + "." + std::string(event_stat_name(s)), c.group, FeatureKind::event);
        }
    }
    for (EventStat s : kApproachEvent) {
        add(std::string(kApproachChannel.prefix) + "." + std::string(event_stat_name(s)), kApproachChannel.group,
            FeatureKind::event);
    }
    for (const auto& c : kLongEventChannels) {
        for (EventStat s : kLongEvent) {
            add(std::string(c.prefix) + "." + std::string(event_stat_name(s)), c.group, FeatureKind::event);
        }
    }
    for (const auto& c : kNumericChannels) {
        for (Stat s : kNumericStats) {
            add(std::string(c.prefix) + "." + std::string(stat_name(s)), c.group, FeatureKind::stat);
        }
    }
    for (Stat s : kBlinkStats) {
        add(std::string(kBlinkChannel.prefix) + "." + std::string(stat_name(s)), kBlinkChannel.group,
            FeatureKind::stat);
    }
    for (const auto& name : wavelet_feature_names(7)) {
        add(name, FeatureGroup::pupil, FeatureKind::wavelet);
    }
    return FeatureCatalog(std::move(entries));
}

FeatureEntry classify_foreign(const std::string& name) {
    FeatureEntry e{name, FeatureGroup::external, FeatureKind::external};
    if (name.rfind("gaze.", 0) == 0) {
        e.group = FeatureGroup::gaze;
        e.kind = FeatureKind::stat;
    } else if (name.rfind("pupil.", 0) == 0) {
        e.group = FeatureGroup::pupil;
        e.kind = FeatureKind::stat;
    } else if (name.rfind("closure.", 0) == 0) {
        e.group = FeatureGroup::closure;
        e.kind = FeatureKind::stat;
    }
    return e;
}

}  // namespace

std::string to_string(FeatureGroup g) {
    switch (g) {
        case FeatureGroup::gaze: return "gaze";
        case FeatureGroup::pupil: return "pupil";
        case FeatureGroup::closure: return "closure";
        case FeatureGroup::external: return "external";
    }
    return "?";
}

std::string to_string(FeatureKind k) {
    switch (k) {
        case FeatureKind::stat: return "stat";
        case FeatureKind::event: return "event";
        case FeatureKind::wavelet: return "wavelet";
        case FeatureKind::external: return "external";
    }
    return "?";
}

FeatureCatalog::FeatureCatalog(std::vector<FeatureEntry> entries) : entries_(std::move(entries)) {
    std::set<std::string> seen;
    for (const auto& e : entries_) {
        if (!seen.insert(e.name).second) {
            throw DataError("duplicate feature name '" + e.name + "' in catalog");
        }
    }
}

std::vector<std::string> FeatureCatalog::names() const {
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) {
        out.push_back(e.name);
    }
    return out;
}

int FeatureCatalog::find(const std::string& name) const {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (entries_[i].name == name) {
            return static_cast<int>(i);
        }
    }
    return -1;
}

std::size_t FeatureCatalog::count(FeatureGroup g) const {
    std::size_t n = 0;
    for (const auto& e : entries_) {
        n += e.group == g;
    }
    return n;
}

std::size_t FeatureCatalog::count(FeatureKind k) const {
    std::size_t n = 0;
    for (const auto& e : entries_) {
        n += e.kind == k;
    }
    return n;
}

std::vector<std::size_t> FeatureCatalog::indices(FeatureGroup g) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (entries_[i].group == g) {
            out.push_back(i);
        }
    }
    return out;
}

FeatureCatalog FeatureCatalog::subset(const std::vector<bool>& mask) const {
    if (mask.size() != entries_.size()) {
        throw DataError("mask width " + std::to_string(mask.size()) + " does not match catalog width " +
                        std::to_string(entries_.size()));
    }
    std::vector<FeatureEntry> kept;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (mask[i]) {
            kept.push_back(entries_[i]);
        }
    }
    return FeatureCatalog(std::move(kept));
}

std::uint64_t FeatureCatalog::hash() const {
    std::uint64_t h = fnv1a64("");
    for (const auto& e : entries_) {
        h = fnv1a64(e.name, h);
        h = fnv1a64("\n", h);
    }
    return h;
}

const FeatureCatalog& eye_catalog() {
    static const FeatureCatalog catalog = build_eye_catalog();
    return catalog;
}

void FeatureMatrix::check_finite() const {
    for (Eigen::Index r = 0; r < rows.rows(); ++r) {
        for (Eigen::Index c = 0; c < rows.cols(); ++c) {
            if (!std::isfinite(rows(r, c))) {
                throw DataError("feature '" + catalog[static_cast<std::size_t>(c)].name + "' is not finite at frame " +
                                std::to_string(frame_offset + r));
            }
        }
    }
}

std::vector<std::pair<std::size_t, std::size_t>> window_slices(std::size_t series_length, std::size_t window,
                                                               std::size_t stride) {
    if (window == 0 || stride == 0) {
        throw ArgumentError("window and stride must be positive");
    }
    if (series_length < window) {
        throw DataError("series of " + std::to_string(series_length) + " frames is shorter than the " +
                        std::to_string(window) + "-frame window");
    }
    std::vector<std::pair<std::size_t, std::size_t>> out;
    out.reserve((series_length - window) / stride + 1);
    for (std::size_t end = window - 1; end < series_length; end += stride) {
        out.emplace_back(end + 1 - window, end);
    }
    return out;
}

std::vector<double> assemble_feature_vector(const DescriptorWindow& w, std::span<const double> wavelet_block) {
    if (wavelet_block.size() != static_cast<std::size_t>(kWaveletFeatureCount)) {
        throw DataError("wavelet block has " + std::to_string(wavelet_block.size()) + " values, expected " +
                        std::to_string(kWaveletFeatureCount));
    }
    std::vector<double> out;
    out.reserve(eye_catalog().size());
    const auto push_events = [&](std::span<const unsigned char> flags, std::span<const EventStat> subset) {
        const EventStats all = event_stats(flags);
        for (EventStat s : subset) {
            out.push_back(all[s]);
        }
    };
    const auto push_stats = [&](std::span<const double> values, std::span<const Stat> subset) {
        const DescriptiveStats all = descriptive_stats(values);
        for (Stat s : subset) {
            out.push_back(all[s]);
        }
    };
    for (const auto& c : kShortEventChannels) {
        push_events(w.*(c.channel), kShortEvent);
    }
    push_events(w.*(kApproachChannel.channel), kApproachEvent);
    for (const auto& c : kLongEventChannels) {
        push_events(w.*(c.channel), kLongEvent);
    }
    for (const auto& c : kNumericChannels) {
        push_stats(w.*(c.channel), kNumericStats);
    }
    push_stats(w.*(kBlinkChannel.channel), kBlinkStats);
    out.insert(out.end(), wavelet_block.begin(), wavelet_block.end());
    if (out.size() != eye_catalog().size()) {
        throw DataError("assembled " + std::to_string(out.size()) + " features, catalog has " +
                        std::to_string(eye_catalog().size()));
    }
    return out;
}

FeatureMatrix compute_features(const DescriptorSeries& series) {
    const auto windows = window_slices(series.size(), kWindowFrames, 1);
    FeatureMatrix m;
    m.catalog = eye_catalog();
    m.frame_offset = kWindowFrames - 1;
    m.rows.resize(static_cast<Eigen::Index>(windows.size()), static_cast<Eigen::Index>(m.catalog.size()));
    for (std::size_t r = 0; r < windows.size(); ++r) {
        const auto [start, end] = windows[r];
        const DescriptorWindow w = window_of(series, start, end - start + 1);
        const WaveletDecomposition dec = dwt_db10(w.pupil_diam, 7);
        const std::vector<double> block = wavelet_feature_block(dec);
        const std::vector<double> row = assemble_feature_vector(w, block);
        m.rows.row(static_cast<Eigen::Index>(r)) =
            Eigen::Map<const Eigen::RowVectorXd>(row.data(), static_cast<Eigen::Index>(row.size()));
    }
    m.check_finite();
    return m;
}

FeatureMatrix filter_group(const FeatureMatrix& matrix, FeatureGroup group) {
    std::vector<bool> mask(matrix.width());
    for (std::size_t i = 0; i < mask.size(); ++i) {
        mask[i] = matrix.catalog[i].group == group;
    }
    return select_columns(matrix, mask);
}

FeatureMatrix select_columns(const FeatureMatrix& matrix, const std::vector<bool>& mask) {
    FeatureMatrix out;
    out.catalog = matrix.catalog.subset(mask);
    out.frame_offset = matrix.frame_offset;
    out.rows.resize(matrix.rows.rows(), static_cast<Eigen::Index>(out.catalog.size()));
    Eigen::Index dst = 0;
    for (std::size_t c = 0; c < mask.size(); ++c) {
        if (mask[c]) {
            out.rows.col(dst++) = matrix.rows.col(static_cast<Eigen::Index>(c));
        }
    }
    return out;
}

void write_feature_csv(std::ostream& out, const FeatureMatrix& matrix) {
    std::string line = "frame";
    for (const auto& e : matrix.catalog.entries()) {
        line += "," + e.name;
    }
    out << line << '\n';
    std::vector<double> row(matrix.width());
    for (Eigen::Index r = 0; r < matrix.rows.rows(); ++r) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            row[c] = matrix.rows(r, static_cast<Eigen::Index>(c));
        }
        line = std::to_string(matrix.frame_offset + r);
        csv::append_row(line, row);
        out << line << '\n';
    }
}

FeatureMatrix read_feature_csv(std::istream& in) {
    const csv::Table table = csv::read(in, ',');
    if (table.header.empty() || table.header.front() != "frame") {
        throw DataError("feature csv must start with a 'frame' column");
    }
    std::vector<FeatureEntry> entries;
    const auto& eye = eye_catalog();
    for (std::size_t c = 1; c < table.header.size(); ++c) {
        const int idx = eye.find(table.header[c]);
        entries.push_back(idx >= 0 ? eye[static_cast<std::size_t>(idx)] : classify_foreign(table.header[c]));
    }
    FeatureMatrix m;
    m.catalog = FeatureCatalog(std::move(entries));
    m.rows.resize(static_cast<Eigen::Index>(table.rows.size()), static_cast<Eigen::Index>(m.catalog.size()));
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const auto frame = static_cast<std::int64_t>(csv::parse_double(row[0], r + 1, "frame"));
        if (r == 0) {
            m.frame_offset = frame;
        } else if (frame != m.frame_offset + static_cast<std::int64_t>(r)) {
            throw DataError("feature csv row " + std::to_string(r + 1) + ": frame " + row[0] +
                            " breaks the contiguous frame sequence");
        }
        for (std::size_t c = 1; c < row.size(); ++c) {
            m.rows(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c - 1)) =
                csv::parse_double(row[c], r + 1, table.header[c]);
        }
    }
    return m;
}

FeatureMatrix read_feature_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open " + path);
    }
    try {
        return read_feature_csv(in);
    } catch (const DataError& e) {
        throw DataError(path + ": " + e.what());
    }
}

}  // namespace eyeaffect
