#pragma once

#include "eyeaffect/lld.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace eyeaffect {

enum class FeatureGroup { gaze, pupil, closure, external };
enum class FeatureKind { stat, event, wavelet, external };

std::string to_string(FeatureGroup g);
std::string to_string(FeatureKind k);

struct FeatureEntry {
    std::string name;
    FeatureGroup group = FeatureGroup::gaze;
    FeatureKind kind = FeatureKind::stat;
};

/// Ordered, uniquely named feature columns.
class FeatureCatalog {
public:
    FeatureCatalog() = default;
    explicit FeatureCatalog(std::vector<FeatureEntry> entries);

    std::size_t size() const { return entries_.size(); }
    const FeatureEntry& operator[](std::size_t i) const { return entries_[i]; }
    const std::vector<FeatureEntry>& entries() const { return entries_; }
    std::vector<std::string> names() const;

    /// Column index or -1.
    int find(const std::string& name) const;
    std::size_t count(FeatureGroup g) const;
    std::size_t count(FeatureKind k) const;
    std::vector<std::size_t> indices(FeatureGroup g) const;

    /// Entries where `mask` is true.
    FeatureCatalog subset(const std::vector<bool>& mask) const;

    /// Fingerprint of the ordered names.
    std::uint64_t hash() const;

private:
    std::vector<FeatureEntry> entries_;
};

/// The 292-column eye catalog:
///   12 event  - direct gaze, pupil dilation, pupil constriction (ratio, mean/max/total duration)
///   14 event  - gaze approach (ratio, median/mean/max duration), eyes fixated and
///               eye closure (ratio, min/median/mean/max duration)
///   84 stat   - pupil diameter, its delta, gaze x/y and their deltas x 14 statistics
///    9 stat   - blink intensity
///  173 wavelet - db10 coefficient statistics of the pupil diameter
/// Groups: gaze 69, pupil 209, closure 14.
const FeatureCatalog& eye_catalog();

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Per-frame features; row r belongs to frame `frame_offset + r`, the last
/// frame of its window.
struct FeatureMatrix {
    RowMatrix rows;
    FeatureCatalog catalog;
    std::int64_t frame_offset = 0;

    std::size_t frames() const { return static_cast<std::size_t>(rows.rows()); }
    std::size_t width() const { return static_cast<std::size_t>(rows.cols()); }
    /// Throws DataError if any cell is NaN or infinite.
    void check_finite() const;
};

/// Full windows [t - window + 1, t] for t = window - 1 .. length - 1, as
/// inclusive (start, end) pairs. Throws DataError when length < window.
std::vector<std::pair<std::size_t, std::size_t>> window_slices(std::size_t series_length,
                                                               std::size_t window = 200, std::size_t stride = 1);

/// Event and statistic features of one window followed by `wavelet_block`,
/// in eye_catalog() order. Throws DataError if the block is not 173 wide.
std::vector<double> assemble_feature_vector(const DescriptorWindow& window, std::span<const double> wavelet_block);

/// Features of every full 200-frame window of a series.
FeatureMatrix compute_features(const DescriptorSeries& series);

/// Columns of `matrix` whose catalog group is `group`.
FeatureMatrix filter_group(const FeatureMatrix& matrix, FeatureGroup group);

/// Keeps the columns where `mask` is true.
FeatureMatrix select_columns(const FeatureMatrix& matrix, const std::vector<bool>& mask);

/// CSV with a leading `frame` column then catalog names.
void write_feature_csv(std::ostream& out, const FeatureMatrix& matrix);

/// Parses a feature CSV. Columns known to eye_catalog() keep their group and
/// kind; anything else is tagged by prefix (`ext.` names are kept verbatim).
FeatureMatrix read_feature_csv(std::istream& in);
FeatureMatrix read_feature_csv_file(const std::string& path);

}  // namespace eyeaffect
