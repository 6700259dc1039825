#pragma once

#include "eyeaffect/corpus.hpp"
#include "eyeaffect/features.hpp"
#include "eyeaffect/lld.hpp"
#include "eyeaffect/model.hpp"
#include "eyeaffect/selection.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace eyeaffect {

/// Every tunable of the pipeline. Defaults reproduce the reference protocol.
struct PipelineConfig {
    Dimension dimension = Dimension::arousal;
    ColumnMap columns;
    std::vector<int> pupil_ring = default_pupil_ring();
    ThresholdConfig lld;
    std::vector<double> thresholds{0.1, 0.15, 0.2};
    ShiftConfig shifts = ShiftConfig::defaults();
    int bins = 32;
    ModelConfig model;
    unsigned threads = 0;
    /// "eye" reads features/, "fused" reads fuse/.
    std::string feature_set = "eye";

    void validate() const;
};

/// Applies `section.key = value` pairs from an INI stream. Unknown sections
/// or keys throw ArgumentError.
void apply_ini(PipelineConfig& config, std::istream& in);
void apply_ini_file(PipelineConfig& config, const std::string& path);
/// Writes the full configuration as INI; apply_ini() reads it back.
void write_ini(std::ostream& out, const PipelineConfig& config);
nlohmann::json config_json(const PipelineConfig& config);

/// Channel CSV written by `ingest`: a `frame` column, the seven numeric
/// descriptors, then the six binary ones as 0/1.
void write_descriptor_csv(std::ostream& out, const DescriptorSeries& series, std::int64_t first_frame);
DescriptorSeries read_descriptor_csv(std::istream& in, std::int64_t* first_frame = nullptr);

/// External (for example acoustic) features keyed by frame index; frames
/// need not be contiguous.
struct ExternalFeatures {
    std::vector<std::int64_t> frames;
    std::vector<std::string> names;
    RowMatrix rows;
};
ExternalFeatures read_external_csv(std::istream& in);

/// Early fusion: eye columns followed by the external ones renamed
/// `ext.<name>`. The external frames must be exactly the eye frames; a
/// mismatch throws DataError listing the offending frame ranges.
FeatureMatrix fuse(const FeatureMatrix& eye, const ExternalFeatures& external);

/// Corpus directory layout shared by `synth` and real data:
///   frames/<id>.csv                   OpenFace-style frame descriptors
///   annotations/<dimension>/<id>.csv  time;<annotator>... traces
///   partition.ini                     optional, reference split otherwise
struct CorpusLayout {
    std::filesystem::path root;

    std::filesystem::path frames(const std::string& id) const;
    std::filesystem::path annotations(Dimension d, const std::string& id) const;
    std::filesystem::path partition() const;
    /// partition.ini when present, otherwise the reference split.
    Partition load_partition() const;
};

/// Writes a synthetic corpus in CorpusLayout form plus truth.json.
void write_corpus(const SynthCorpus& corpus, const std::filesystem::path& dir, const SynthOptions& options);

struct StageSummary {
    std::string stage;
    std::vector<std::string> outputs;  // relative to the stage directory
    std::string message;
};

/// A run directory; every stage writes `<root>/<stage>/` including a
/// manifest.json that lists the config, input hashes and outputs.
class Workspace {
public:
    explicit Workspace(std::filesystem::path root) : root_(std::move(root)) {}

    const std::filesystem::path& root() const { return root_; }
    std::filesystem::path stage_dir(const std::string& stage) const { return root_ / stage; }
    /// Throws DataError naming `stage` and the missing prerequisite when
    /// `path` does not exist.
    void require(const std::string& stage, const std::filesystem::path& path, const std::string& producer) const;

private:
    std::filesystem::path root_;
};

StageSummary run_synth(const std::filesystem::path& out_dir, const SynthOptions& options);
StageSummary run_ingest(const Workspace& ws, const std::filesystem::path& corpus_dir, const PipelineConfig& config);
/// `dump_wavelet_frame`, when set, also writes the db10 coefficients of the
/// pupil window ending at that frame for every subject.
StageSummary run_features(const Workspace& ws, const PipelineConfig& config,
                          std::optional<std::int64_t> dump_wavelet_frame = std::nullopt);
StageSummary run_fuse(const Workspace& ws, const std::filesystem::path& external_dir, const PipelineConfig& config);
/// `protocol` is before, during, after, none or all (the chained protocols).
StageSummary run_select(const Workspace& ws, const PipelineConfig& config, const std::string& protocol);

struct TrainOverrides {
    std::optional<double> shift_seconds;
    /// Engaged with an empty value: train on every feature.
    std::optional<std::optional<double>> threshold;
    /// Ignore select/selection.json.
    bool ignore_selection = false;
};
StageSummary run_train(const Workspace& ws, const PipelineConfig& config, const TrainOverrides& overrides = {});
StageSummary run_eval(const Workspace& ws, const PipelineConfig& config, const std::string& split = "validation");
StageSummary run_baseline(const Workspace& ws, const std::filesystem::path& corpus_dir, const PipelineConfig& config,
                          const std::string& split = "validation");
StageSummary run_report(const Workspace& ws, const PipelineConfig& config, bool svg = true);

/// Features and targets of one partition split of a run directory, after
/// `ingest` and `features` (or `fuse` for feature_set "fused").
std::vector<SubjectData> load_subjects(const Workspace& ws, const std::string& split,
                                       const std::string& feature_set = "eye");

/// Directory named by EYEAFFECT_CACHE_DIR, if set.
std::optional<std::filesystem::path> cache_dir();

}  // namespace eyeaffect
