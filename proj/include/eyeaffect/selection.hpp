#pragma once

#include "eyeaffect/corpus.hpp"
#include "eyeaffect/features.hpp"
#include "eyeaffect/model.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace eyeaffect {

/// Ground-truth backward shifts, stored as whole frames at 25 fps.
struct ShiftConfig {
    std::vector<std::int64_t> frames;

    /// 0, 0.2, ..., 4.4 s: 23 shifts.
    static ShiftConfig defaults();
    /// Throws ArgumentError for negative or non-frame-aligned values.
    static ShiftConfig from_seconds(const std::vector<double>& seconds);
    std::vector<double> seconds() const;
};

/// y'[t] = y[t + shift]; the result is `shift` values shorter. Throws
/// ArgumentError when the shift is negative or not shorter than the trace.
std::vector<double> shift_labels(std::span<const double> values, std::int64_t shift_frames);
AnnotationTrace shift_labels(const AnnotationTrace& trace, double shift_seconds);

struct MiResult {
    double nats = 0.0;
    /// One of the variables collapsed into a single bin.
    bool degenerate = false;
};

/// Bin index per sample. Variables with at most two distinct values get one
/// bin per value; otherwise equal-frequency bins by rank, with tied values
/// sharing the bin of their first rank. Returns the number of bins used.
int quantile_bins(std::span<const double> values, int bins, std::vector<int>& out);

/// Plug-in MI estimate in nats over quantile bins of each variable, clamped
/// at 0. Throws ArgumentError on a length mismatch.
MiResult mutual_information(std::span<const double> x, std::span<const double> y, int bins = 32);

/// MI of every column of `features` (frames x width) against `labels`.
std::vector<double> mi_scores(const RowMatrix& features, std::span<const double> labels, int bins = 32);

struct FilterResult {
    std::vector<double> mi_scores;
    std::vector<bool> retained;
    std::size_t n_retained = 0;
};

/// Keeps a feature iff its score is >= threshold. Warns when nothing is kept.
FilterResult mi_filter(std::vector<double> scores, double threshold);
FilterResult mi_filter(const FeatureMatrix& matrix, std::span<const double> labels, double threshold, int bins = 32);

/// Features and full-length frame-indexed target of one subject.
struct SubjectData {
    std::string id;
    FeatureMatrix features;
    std::vector<double> target;
};

/// Feature rows paired with the target shifted by `shift_frames`: row r
/// (frame frame_offset + r) pairs with target[frame_offset + r + shift].
/// Trailing rows without a target are dropped.
struct AlignedSubject {
    RowMatrix features;
    Eigen::VectorXd target;
};
AlignedSubject align(const SubjectData& subject, std::int64_t shift_frames);

enum class Protocol { before, during, after, none };

std::string to_string(Protocol p);
Protocol parse_protocol(const std::string& name);

struct SelectionReport {
    Protocol protocol = Protocol::none;
    std::optional<double> threshold;  // empty: no MI filtering
    std::int64_t shift_frames = 0;
    std::vector<double> mi_scores;
    std::vector<bool> retained;
    double val_ccc = 0.0;
    double val_sse = 0.0;
    std::size_t n_features = 0;
    bool failed = false;
    std::string failure;
    /// Wall time spent training this cell; 0 when it came from the cache.
    double train_seconds = 0.0;

    double shift_seconds() const { return static_cast<double>(shift_frames) / 25.0; }
};

struct SweepOptions {
    std::vector<double> thresholds{0.1, 0.15, 0.2};
    ShiftConfig shifts = ShiftConfig::defaults();
    ModelConfig model;
    int bins = 32;
    unsigned threads = 0;  // 0: hardware concurrency
};

struct CellOutcome {
    double val_ccc = 0.0;
    double val_sse = 0.0;
    std::size_t n_features = 0;
    double train_seconds = 0.0;
    TrainedModel model;
};

/// Trains on the masked training features against shifted targets and scores
/// the validation subjects (pooled CCC on the original scale, mean squared
/// error on the standardized scale). Throws DataError for an empty mask.
CellOutcome evaluate_cell(const std::vector<SubjectData>& train, const std::vector<SubjectData>& validation,
                          const std::vector<bool>& mask, std::int64_t shift_frames, const ModelConfig& config);

/// Best of `reports` by CCC, then fewer features, then smaller shift; failed
/// cells are skipped. Returns -1 if every cell failed.
int best_report(const std::vector<SelectionReport>& reports);

/// Runs the feature-selection protocols.
///  before: shift 0, rows {none, thresholds...}
///  during: for each threshold, every shift, re-filtering on shifted labels
///  none:   every shift, no filtering
///  after:  best shift of the `none` sweep, rows {none, thresholds...}
/// Identical (mask, shift) cells are trained once.
class SelectionSweep {
public:
    SelectionSweep(std::vector<SubjectData> train, std::vector<SubjectData> validation, SweepOptions options);

    std::vector<SelectionReport> run(Protocol protocol);
    std::vector<SelectionReport> run_during(const std::vector<std::optional<double>>& thresholds);
    /// before, then during at the threshold of before's best filtered row,
    /// then none, then after.
    std::vector<SelectionReport> run_full();

    /// Trains the cell that a report describes and returns its model.
    TrainedModel train_report_model(const SelectionReport& report);

    const SweepOptions& options() const { return options_; }
    const std::vector<double>& scores_for(std::int64_t shift_frames);

private:
    std::vector<SelectionReport> evaluate_rows(Protocol protocol,
                                               const std::vector<std::pair<std::optional<double>, std::int64_t>>& cells);

    std::vector<SubjectData> train_;
    std::vector<SubjectData> validation_;
    SweepOptions options_;
    std::vector<std::pair<std::int64_t, std::vector<double>>> score_cache_;
    std::vector<std::pair<std::string, CellOutcome>> cell_cache_;
};

/// `protocol,threshold,shift_s,n_features,val_sse,val_ccc`; threshold "none"
/// when unfiltered, nan metrics for failed cells.
void write_sweep_csv(std::ostream& out, const std::vector<SelectionReport>& reports);
/// Parses the summary columns back (scores and masks are not part of the CSV).
std::vector<SelectionReport> read_sweep_csv(std::istream& in);

/// Line chart of validation CCC against shift, one line per (protocol,
/// threshold) series with more than one shift.
void write_sweep_svg(std::ostream& out, const std::vector<SelectionReport>& reports);

}  // namespace eyeaffect
