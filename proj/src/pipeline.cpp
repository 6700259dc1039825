#include "eyeaffect/pipeline.hpp"

#include "eyeaffect/common.hpp"
#include "eyeaffect/csv.hpp"
#include "eyeaffect/error.hpp"
#include "eyeaffect/eval.hpp"
#include "eyeaffect/log.hpp"
#include "eyeaffect/parallel.hpp"
#include "eyeaffect/wavelet.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace eyeaffect {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ------------------------------------------------------------------ helpers

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
    out << content;
    if (!out) {
        throw DataError("failed writing " + path.string());
    }
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream ss(text);
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b != std::string::npos) {
            out.push_back(item.substr(b, e - b + 1));
        }
    }
    return out;
}

double to_number(const std::string& key, const std::string& value) {
    try {
        return csv::parse_double(value, 0, key);
    } catch (const DataError&) {
        throw ArgumentError("config key " + key + ": '" + value + "' is not a number");
    }
}

std::vector<double> to_numbers(const std::string& key, const std::string& value) {
    std::vector<double> out;
    for (const auto& item : split_list(value)) {
        out.push_back(to_number(key, item));
    }
    return out;
}

template <typename T>
std::string join(const std::vector<T>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) {
            out += ',';
        }
        if constexpr (std::is_floating_point_v<T>) {
            out += csv::format_double(values[i]);
        } else {
            out += std::to_string(values[i]);
        }
    }
    return out;
}

std::string threshold_text(const std::optional<double>& t) {
    return t ? csv::format_double(*t) : "none";
}

/// Collects a stage's provenance and writes manifest.json.
class Manifest {
public:
    Manifest(std::string stage, const PipelineConfig* config) : stage_(std::move(stage)) {
        if (config != nullptr) {
            doc_["config"] = config_json(*config);
            doc_["seed"] = config->model.seed;
        }
    }

    void input(const std::string& name, const std::string& bytes) { inputs_[name] = to_hex(fnv1a64(bytes)); }
    void input_file(const std::string& name, const fs::path& path) { input(name, read_text(path)); }
    json& extra() { return doc_; }

    /// Writes `content` to `dir / rel` and records it.
    void emit(const fs::path& dir, const std::string& rel, const std::string& content) {
        write_text(dir / rel, content);
        outputs_[rel] = to_hex(fnv1a64(content));
    }

    StageSummary finish(const fs::path& dir, std::string message) {
        doc_["tool"] = "eyeaffect";
        doc_["version"] = kVersion;
        doc_["stage"] = stage_;
        doc_["inputs"] = inputs_;
        doc_["outputs"] = outputs_;
        write_text(dir / "manifest.json", doc_.dump(2) + "\n");
        StageSummary s;
        s.stage = stage_;
        for (const auto& [rel, hash] : outputs_) {
            s.outputs.push_back(rel);
        }
        s.outputs.push_back("manifest.json");
        s.message = std::move(message);
        return s;
    }

private:
    std::string stage_;
    json doc_ = json::object();
    std::map<std::string, std::string> inputs_;
    std::map<std::string, std::string> outputs_;
};

// Stage directory names.
constexpr const char* kIngest = "ingest";
constexpr const char* kFeatures = "features";
constexpr const char* kFuse = "fuse";
constexpr const char* kSelect = "select";
constexpr const char* kTrain = "train";
constexpr const char* kEval = "eval";
constexpr const char* kBaseline = "baseline";
constexpr const char* kReport = "report";

constexpr const char* kDescriptorHeader =
    "frame,gaze_x,gaze_y,d_gaze_x,d_gaze_y,pupil_diam,d_pupil_diam,blink_intensity,"
    "direct_gaze,gaze_approach,eyes_fixated,eye_closure,pupil_dilation,pupil_constriction";

fs::path feature_dir(const Workspace& ws, const std::string& feature_set) {
    if (feature_set == "eye") {
        return ws.stage_dir(kFeatures) / "subjects";
    }
    if (feature_set == "fused") {
        return ws.stage_dir(kFuse) / "subjects";
    }
    throw ArgumentError("feature set must be 'eye' or 'fused', got '" + feature_set + "'");
}

Partition workspace_partition(const Workspace& ws, const std::string& stage) {
    const fs::path p = ws.stage_dir(kIngest) / "partition.ini";
    ws.require(stage, p, "ingest");
    return parse_partition_file(p.string());
}

std::vector<double> read_target_csv(const fs::path& path) {
    const csv::Table t = csv::read_file(path.string(), ',');
    if (t.header != std::vector<std::string>{"frame", "target"}) {
        throw DataError(path.string() + ": expected header frame,target");
    }
    std::vector<double> values;
    values.reserve(t.rows.size());
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto frame = csv::parse_double(t.rows[r][0], r + 1, "frame");
        if (frame != static_cast<double>(r)) {
            throw DataError(path.string() + ": target rows must start at frame 0 and be contiguous");
        }
        values.push_back(csv::parse_double(t.rows[r][1], r + 1, "target"));
    }
    return values;
}

SubjectData load_subject(const Workspace& ws, const std::string& feature_set, const std::string& id,
                         const std::string& stage) {
    const fs::path fpath = feature_dir(ws, feature_set) / (id + ".csv");
    ws.require(stage, fpath, feature_set == "eye" ? "features" : "fuse");
    const fs::path tpath = ws.stage_dir(kIngest) / "targets" / (id + ".csv");
    if (!fs::exists(tpath)) {
        throw DataError(stage + ": subject " + id + " has no target trace (annotations missing at ingest)");
    }
    SubjectData s;
    s.id = id;
    s.features = read_feature_csv_file(fpath.string());
    s.target = read_target_csv(tpath);
    return s;
}

std::vector<SubjectData> load_split(const Workspace& ws, const std::string& feature_set,
                                    const std::vector<std::string>& ids, const std::string& stage,
                                    const std::string& split) {
    if (ids.empty()) {
        throw DataError(stage + ": the partition has no " + split + " subjects");
    }
    std::vector<SubjectData> out;
    for (const auto& id : ids) {
        out.push_back(load_subject(ws, feature_set, id, stage));
    }
    return out;
}

const std::vector<std::string>& split_ids(const Partition& p, const std::string& split) {
    if (split == "train") return p.train;
    if (split == "validation") return p.validation;
    if (split == "test") return p.test;
    throw ArgumentError("split must be train, validation or test, got '" + split + "'");
}

SweepOptions sweep_options(const PipelineConfig& c) {
    SweepOptions o;
    o.thresholds = c.thresholds;
    o.shifts = c.shifts;
    o.model = c.model;
    o.bins = c.bins;
    o.threads = c.threads;
    return o;
}

json report_json(const SelectionReport& r, const FeatureCatalog& catalog) {
    json j;
    j["protocol"] = to_string(r.protocol);
    j["threshold"] = r.threshold ? json(*r.threshold) : json(nullptr);
    j["shift_frames"] = r.shift_frames;
    j["shift_s"] = r.shift_seconds();
    j["n_features"] = r.n_features;
    j["val_ccc"] = r.val_ccc;
    j["val_sse"] = r.val_sse;
    json names = json::array();
    for (std::size_t i = 0; i < r.retained.size(); ++i) {
        if (r.retained[i]) {
            names.push_back(catalog[i].name);
        }
    }
    j["retained"] = names;
    return j;
}

std::string ranges_text(const std::vector<std::int64_t>& frames) {
    std::string out;
    std::size_t i = 0;
    int shown = 0;
    while (i < frames.size()) {
        std::size_t j = i;
        while (j + 1 < frames.size() && frames[j + 1] == frames[j] + 1) {
            ++j;
        }
        if (shown == 8) {
            out += ", ...";
            break;
        }
        if (!out.empty()) {
            out += ", ";
        }
        out += std::to_string(frames[i]);
        if (j > i) {
            out += "-" + std::to_string(frames[j]);
        }
        ++shown;
        i = j + 1;
    }
    return out;
}

}  // namespace

// --------------------------------------------------------------------- config

void PipelineConfig::validate() const {
    model.validate();
    if (bins < 2) {
        throw ArgumentError("selection.bins must be at least 2");
    }
    if (shifts.frames.empty()) {
        throw ArgumentError("selection.shifts must not be empty");
    }
    for (double t : thresholds) {
        if (!(t >= 0.0)) {
            throw ArgumentError("selection.thresholds must be non-negative");
        }
    }
    if (feature_set != "eye" && feature_set != "fused") {
        throw ArgumentError("run.feature_set must be 'eye' or 'fused'");
    }
    if (pupil_ring.size() < 3) {
        throw ArgumentError("lld.pupil_ring needs at least 3 landmark indices");
    }
}

void apply_ini(PipelineConfig& c, std::istream& in) {
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ArgumentError(std::string("config: ") + e.what());
    }
    for (const auto& [section, keys] : tree) {
        if (keys.empty() && !keys.data().empty()) {
            throw ArgumentError("config key '" + section + "' must sit inside a section");
        }
        for (const auto& [key, node] : keys) {
            const std::string v = node.data();
            const std::string full = section + "." + key;
            const auto number = [&] { return to_number(full, v); };
            const auto integer = [&] {
                const double d = number();
                if (d != std::floor(d)) {
                    throw ArgumentError("config key " + full + " must be an integer");
                }
                return static_cast<long long>(d);
            };
            if (section == "corpus") {
                auto& m = c.columns;
                if (key == "dimension") c.dimension = parse_dimension(v);
                else if (key == "frame_base") m.frame_base = integer();
                else if (key == "frame") m.frame = v;
                else if (key == "timestamp") m.timestamp = v;
                else if (key == "confidence") m.confidence = v;
                else if (key == "gaze_x") m.gaze_x = v;
                else if (key == "gaze_y") m.gaze_y = v;
                else if (key == "blink_intensity") m.blink_intensity = v;
                else if (key == "pupil_diameter") m.pupil_diameter = v;
                else if (key == "direct_gaze") m.direct_gaze = v;
                else if (key == "landmark_x_prefix") m.landmark_x_prefix = v;
                else if (key == "landmark_y_prefix") m.landmark_y_prefix = v;
                else if (key == "landmark_z_prefix") m.landmark_z_prefix = v;
                else throw ArgumentError("unknown config key " + full);
            } else if (section == "lld") {
                if (key == "closure_threshold") c.lld.closure_threshold = number();
                else if (key == "fixation_threshold") c.lld.fixation_threshold = number();
                else if (key == "approach_epsilon") c.lld.approach_epsilon = number();
                else if (key == "pupil_delta") c.lld.pupil_delta = number();
                else if (key == "direct_gaze_angle") c.lld.direct_gaze_angle = number();
                else if (key == "pupil_ring") {
                    c.pupil_ring.clear();
                    for (double d : to_numbers(full, v)) {
                        c.pupil_ring.push_back(static_cast<int>(d));
                    }
                } else throw ArgumentError("unknown config key " + full);
            } else if (section == "selection") {
                if (key == "thresholds") c.thresholds = to_numbers(full, v);
                else if (key == "shifts") c.shifts = ShiftConfig::from_seconds(to_numbers(full, v));
                else if (key == "bins") c.bins = static_cast<int>(integer());
                else throw ArgumentError("unknown config key " + full);
            } else if (section == "model") {
                auto& m = c.model;
                if (key == "hidden_sizes") {
                    m.hidden_sizes.clear();
                    for (double d : to_numbers(full, v)) {
                        m.hidden_sizes.push_back(static_cast<int>(d));
                    }
                } else if (key == "learning_rate") m.learning_rate = number();
                else if (key == "momentum") m.momentum = number();
                else if (key == "input_noise_sd") m.input_noise_sd = number();
                else if (key == "max_epochs") m.max_epochs = static_cast<int>(integer());
                else if (key == "patience_epochs") m.patience_epochs = static_cast<int>(integer());
                else if (key == "seed") m.seed = std::stoull(v);
                else if (key == "init_range") m.init_range = number();
                else if (key == "forget_bias") m.forget_bias = number();
                else throw ArgumentError("unknown config key " + full);
            } else if (section == "run") {
                if (key == "threads") c.threads = static_cast<unsigned>(integer());
                else if (key == "feature_set") c.feature_set = v;
                else throw ArgumentError("unknown config key " + full);
            } else {
                throw ArgumentError("unknown config section [" + section + "]");
            }
        }
    }
    c.validate();
}

void apply_ini_file(PipelineConfig& config, const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ArgumentError("cannot open config file " + path);
    }
    apply_ini(config, in);
}

void write_ini(std::ostream& out, const PipelineConfig& c) {
    const auto& m = c.columns;
    out << "[corpus]\n"
        << "dimension = " << to_string(c.dimension) << "\n"
        << "frame = " << m.frame << "\n"
        << "frame_base = " << m.frame_base << "\n"
        << "timestamp = " << m.timestamp << "\n"
        << "confidence = " << m.confidence << "\n"
        << "gaze_x = " << m.gaze_x << "\n"
        << "gaze_y = " << m.gaze_y << "\n"
        << "blink_intensity = " << m.blink_intensity << "\n"
        << "pupil_diameter = " << m.pupil_diameter << "\n"
        << "direct_gaze = " << m.direct_gaze << "\n"
        << "landmark_x_prefix = " << m.landmark_x_prefix << "\n"
        << "landmark_y_prefix = " << m.landmark_y_prefix << "\n"
        << "landmark_z_prefix = " << m.landmark_z_prefix << "\n\n";
    out << "[lld]\n"
        << "closure_threshold = " << csv::format_double(c.lld.closure_threshold) << "\n"
        << "fixation_threshold = " << csv::format_double(c.lld.fixation_threshold) << "\n"
        << "approach_epsilon = " << csv::format_double(c.lld.approach_epsilon) << "\n"
        << "pupil_delta = " << csv::format_double(c.lld.pupil_delta) << "\n"
        << "direct_gaze_angle = " << csv::format_double(c.lld.direct_gaze_angle) << "\n"
        << "pupil_ring = " << join(c.pupil_ring) << "\n\n";
    out << "[selection]\n"
        << "thresholds = " << join(c.thresholds) << "\n"
        << "shifts = " << join(c.shifts.seconds()) << "\n"
        << "bins = " << c.bins << "\n\n";
    out << "[model]\n"
        << "hidden_sizes = " << join(c.model.hidden_sizes) << "\n"
        << "learning_rate = " << csv::format_double(c.model.learning_rate) << "\n"
        << "momentum = " << csv::format_double(c.model.momentum) << "\n"
        << "input_noise_sd = " << csv::format_double(c.model.input_noise_sd) << "\n"
        << "max_epochs = " << c.model.max_epochs << "\n"
        << "patience_epochs = " << c.model.patience_epochs << "\n"
        << "seed = " << c.model.seed << "\n"
        << "init_range = " << csv::format_double(c.model.init_range) << "\n"
        << "forget_bias = " << csv::format_double(c.model.forget_bias) << "\n\n";
    out << "[run]\n"
        << "threads = " << c.threads << "\n"
        << "feature_set = " << c.feature_set << "\n";
}

json config_json(const PipelineConfig& c) {
    json j;
    j["dimension"] = to_string(c.dimension);
    j["columns"] = {{"frame", c.columns.frame},
                    {"frame_base", c.columns.frame_base},
                    {"timestamp", c.columns.timestamp},
                    {"confidence", c.columns.confidence},
                    {"gaze_x", c.columns.gaze_x},
                    {"gaze_y", c.columns.gaze_y},
                    {"blink_intensity", c.columns.blink_intensity},
                    {"pupil_diameter", c.columns.pupil_diameter},
                    {"direct_gaze", c.columns.direct_gaze},
                    {"landmark_prefixes",
                     {c.columns.landmark_x_prefix, c.columns.landmark_y_prefix, c.columns.landmark_z_prefix}}};
    j["lld"] = {{"closure_threshold", c.lld.closure_threshold},
                {"fixation_threshold", c.lld.fixation_threshold},
                {"approach_epsilon", c.lld.approach_epsilon},
                {"pupil_delta", c.lld.pupil_delta},
                {"direct_gaze_angle", c.lld.direct_gaze_angle},
                {"pupil_ring", c.pupil_ring}};
    j["selection"] = {{"thresholds", c.thresholds}, {"shift_frames", c.shifts.frames}, {"bins", c.bins},
                      {"estimator", "equal-frequency plug-in, nats"}};
    j["model"] = {{"hidden_sizes", c.model.hidden_sizes},     {"learning_rate", c.model.learning_rate},
                  {"momentum", c.model.momentum},             {"input_noise_sd", c.model.input_noise_sd},
                  {"max_epochs", c.model.max_epochs},         {"patience_epochs", c.model.patience_epochs},
                  {"seed", c.model.seed},                     {"init_range", c.model.init_range},
                  {"forget_bias", c.model.forget_bias}};
    j["features"] = {{"window_frames", kWindowFrames},
                     {"quantiles", "linear interpolation"},
                     {"moments", "population"},
                     {"wavelet", "db10, periodization, 7 levels"}};
    j["feature_set"] = c.feature_set;
    return j;
}

// ---------------------------------------------------------------- descriptors

void write_descriptor_csv(std::ostream& out, const DescriptorSeries& s, std::int64_t first_frame) {
    if (!s.has_binary()) {
        throw ArgumentError("descriptor series has no binary channels");
    }
    out << kDescriptorHeader << '\n';
    std::string line;
    for (std::size_t t = 0; t < s.size(); ++t) {
        line = std::to_string(first_frame + static_cast<std::int64_t>(t));
        for (const auto* ch : {&s.gaze_x, &s.gaze_y, &s.d_gaze_x, &s.d_gaze_y, &s.pupil_diam, &s.d_pupil_diam,
                               &s.blink_intensity}) {
            line += ',';
            line += csv::format_double((*ch)[t]);
        }
        for (const auto* ch : {&s.direct_gaze, &s.gaze_approach, &s.eyes_fixated, &s.eye_closure, &s.pupil_dilation,
                               &s.pupil_constriction}) {
            line += (*ch)[t] ? ",1" : ",0";
        }
        out << line << '\n';
    }
}

DescriptorSeries read_descriptor_csv(std::istream& in, std::int64_t* first_frame) {
    const csv::Table t = csv::read(in, ',');
    std::string header;
    for (std::size_t i = 0; i < t.header.size(); ++i) {
        header += (i ? "," : "") + t.header[i];
    }
    if (header != kDescriptorHeader) {
        throw DataError(std::string("descriptor csv header must be ") + kDescriptorHeader);
    }
    DescriptorSeries s;
    std::vector<double>* numeric[] = {&s.gaze_x, &s.gaze_y, &s.d_gaze_x, &s.d_gaze_y,
                                      &s.pupil_diam, &s.d_pupil_diam, &s.blink_intensity};
    std::vector<unsigned char>* binary[] = {&s.direct_gaze, &s.gaze_approach, &s.eyes_fixated,
                                            &s.eye_closure, &s.pupil_dilation, &s.pupil_constriction};
    std::int64_t first = 0;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        const auto frame = static_cast<std::int64_t>(csv::parse_double(row[0], r + 1, "frame"));
        if (r == 0) {
            first = frame;
        } else if (frame != first + static_cast<std::int64_t>(r)) {
            throw DataError("descriptor csv row " + std::to_string(r + 1) + ": frames must be contiguous");
        }
        for (std::size_t k = 0; k < 7; ++k) {
            numeric[k]->push_back(csv::parse_double(row[1 + k], r + 1, t.header[1 + k]));
        }
        for (std::size_t k = 0; k < 6; ++k) {
            const std::string& cell = row[8 + k];
            if (cell != "0" && cell != "1") {
                throw DataError("descriptor csv row " + std::to_string(r + 1) + ", column " + t.header[8 + k] +
                                ": expected 0 or 1");
            }
            binary[k]->push_back(cell == "1" ? 1 : 0);
        }
    }
    if (first_frame != nullptr) {
        *first_frame = first;
    }
    return s;
}

// --------------------------------------------------------------------- fusion

ExternalFeatures read_external_csv(std::istream& in) {
    const csv::Table t = csv::read(in);
    if (t.header.empty() || t.header.front() != "frame") {
        throw DataError("external feature csv must start with a 'frame' column");
    }
    ExternalFeatures e;
    e.names.assign(t.header.begin() + 1, t.header.end());
    std::set<std::string> seen;
    for (const auto& n : e.names) {
        if (!seen.insert(n).second) {
            throw DataError("external feature csv repeats column '" + n + "'");
        }
    }
    e.rows.resize(static_cast<Eigen::Index>(t.rows.size()), static_cast<Eigen::Index>(e.names.size()));
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const double frame = csv::parse_double(t.rows[r][0], r + 1, "frame");
        if (frame != std::floor(frame) || frame < 0.0) {
            throw DataError("external feature csv row " + std::to_string(r + 1) + ": frame must be a whole number");
        }
        e.frames.push_back(static_cast<std::int64_t>(frame));
        for (std::size_t c = 0; c < e.names.size(); ++c) {
            e.rows(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                csv::parse_double(t.rows[r][c + 1], r + 1, e.names[c]);
        }
    }
    return e;
}

FeatureMatrix fuse(const FeatureMatrix& eye, const ExternalFeatures& external) {
    if (static_cast<std::size_t>(external.rows.rows()) != external.frames.size() ||
        static_cast<std::size_t>(external.rows.cols()) != external.names.size()) {
        throw ArgumentError("external feature table is inconsistent");
    }
    std::map<std::int64_t, Eigen::Index> by_frame;
    for (std::size_t r = 0; r < external.frames.size(); ++r) {
        if (!by_frame.emplace(external.frames[r], static_cast<Eigen::Index>(r)).second) {
            throw DataError("external features repeat frame " + std::to_string(external.frames[r]));
        }
    }
    std::vector<std::int64_t> missing;
    const std::int64_t first = eye.frame_offset;
    const std::int64_t last = eye.frame_offset + static_cast<std::int64_t>(eye.frames()) - 1;
    for (std::int64_t f = first; f <= last; ++f) {
        if (!by_frame.contains(f)) {
            missing.push_back(f);
        }
    }
    std::vector<std::int64_t> extra;
    for (const auto& [f, r] : by_frame) {
        if (f < first || f > last) {
            extra.push_back(f);
        }
    }
    if (!missing.empty() || !extra.empty()) {
        std::string msg = "frame misalignment between eye features (frames " + std::to_string(first) + "-" +
                          std::to_string(last) + ") and external features:";
        if (!missing.empty()) {
            msg += " missing from external: " + ranges_text(missing) + ";";
        }
        if (!extra.empty()) {
            msg += " only in external: " + ranges_text(extra) + ";";
        }
        msg.pop_back();
        throw DataError(msg);
    }

    std::vector<FeatureEntry> entries = eye.catalog.entries();
    for (const auto& n : external.names) {
        entries.push_back({"ext." + n, FeatureGroup::external, FeatureKind::external});
    }
    FeatureMatrix out;
    out.catalog = FeatureCatalog(std::move(entries));
    out.frame_offset = eye.frame_offset;
    out.rows.resize(eye.rows.rows(), eye.rows.cols() + external.rows.cols());
    out.rows.leftCols(eye.rows.cols()) = eye.rows;
    for (Eigen::Index r = 0; r < eye.rows.rows(); ++r) {
        out.rows.row(r).tail(external.rows.cols()) = external.rows.row(by_frame.at(first + r));
    }
    return out;
}

// --------------------------------------------------------------------- layout

fs::path CorpusLayout::frames(const std::string& id) const {
    return root / "frames" / (id + ".csv");
}

fs::path CorpusLayout::annotations(Dimension d, const std::string& id) const {
    return root / "annotations" / to_string(d) / (id + ".csv");
}

fs::path CorpusLayout::partition() const {
    return root / "partition.ini";
}

Partition CorpusLayout::load_partition() const {
    if (fs::exists(partition())) {
        return parse_partition_file(partition().string());
    }
    return default_partition();
}

void write_corpus(const SynthCorpus& corpus, const fs::path& dir, const SynthOptions& options) {
    const CorpusLayout layout{dir};
    for (const auto& s : corpus.subjects) {
        std::ostringstream frames;
        serialize_frames(frames, s.frames);
        write_text(layout.frames(s.id), frames.str());
        std::ostringstream ann;
        serialize_annotations(ann, s.traces, ';');
        write_text(layout.annotations(Dimension::arousal, s.id), ann.str());
    }
    std::ostringstream part;
    serialize_partition(part, corpus.partition);
    write_text(layout.partition(), part.str());
    json truth;
    truth["seed"] = options.seed;
    truth["subjects"] = options.n_subjects;
    truth["duration_s"] = options.duration_s;
    truth["lag_s"] = options.lag_s;
    truth["annotators"] = options.n_annotators;
    truth["driver_channel"] = corpus.driver_channel;
    truth["noise_channels"] = corpus.noise_channels;
    write_text(dir / "truth.json", truth.dump(2) + "\n");
}

void Workspace::require(const std::string& stage, const fs::path& path, const std::string& producer) const {
    if (!fs::exists(path)) {
        throw DataError(stage + ": missing " + path.string() + "; run `" + producer + "` first");
    }
}

std::vector<SubjectData> load_subjects(const Workspace& ws, const std::string& split, const std::string& feature_set) {
    const Partition part = workspace_partition(ws, "load");
    return load_split(ws, feature_set, split_ids(part, split), "load", split);
}

std::optional<fs::path> cache_dir() {
    const char* env = std::getenv("EYEAFFECT_CACHE_DIR");
    if (env == nullptr || *env == '\0') {
        return std::nullopt;
    }
    return fs::path(env);
}

// --------------------------------------------------------------------- stages

StageSummary run_synth(const fs::path& out_dir, const SynthOptions& options) {
    const SynthCorpus corpus = synth_corpus(options);
    write_corpus(corpus, out_dir, options);
    Manifest m("synth", nullptr);
    m.extra()["seed"] = options.seed;
    m.extra()["synth"] = {{"subjects", options.n_subjects}, {"duration_s", options.duration_s},
                          {"lag_s", options.lag_s},         {"annotators", options.n_annotators},
                          {"train", corpus.partition.train.size()},
                          {"validation", corpus.partition.validation.size()},
                          {"test", corpus.partition.test.size()}};
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(out_dir)) {
        if (entry.is_regular_file() && entry.path().filename() != "manifest.json") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
        m.emit(out_dir, fs::relative(f, out_dir).generic_string(), read_text(f));
    }
    return m.finish(out_dir, std::to_string(corpus.subjects.size()) + " subjects written to " + out_dir.string());
}

StageSummary run_ingest(const Workspace& ws, const fs::path& corpus_dir, const PipelineConfig& config) {
    config.validate();
    const CorpusLayout layout{corpus_dir};
    if (!fs::is_directory(corpus_dir)) {
        throw DataError("ingest: corpus directory " + corpus_dir.string() + " does not exist");
    }
    Partition part = layout.load_partition();
    part.check_disjoint();
    const fs::path dir = ws.stage_dir(kIngest);
    Manifest m(kIngest, &config);
    if (fs::exists(layout.partition())) {
        m.input_file("partition.ini", layout.partition());
    } else {
        warn("ingest: no partition.ini in " + corpus_dir.string() + "; using the reference split");
    }

    json sources = json::object();
    std::size_t labelled = 0;
    for (const auto& id : part.all()) {
        const fs::path fpath = layout.frames(id);
        if (!fs::exists(fpath)) {
            throw DataError("ingest: missing frame file " + fpath.string());
        }
        const std::string frame_bytes = read_text(fpath);
        m.input(fs::relative(fpath, corpus_dir).generic_string(), frame_bytes);
        std::istringstream fin(frame_bytes);
        std::vector<FrameRecord> frames;
        try {
            frames = parse_frames(fin, config.columns);
        } catch (const DataError& e) {
            throw DataError(fpath.string() + ": " + e.what());
        }
        if (frames.empty()) {
            throw DataError("ingest: " + fpath.string() + " has no frames");
        }
        DescriptorSeries series = derive_llds(frames, config.lld, config.pupil_ring);
        const std::int64_t first = frames.front().frame_index;
        sources[id] = series.direct_gaze_heuristic ? "heuristic" : "coder";

        const fs::path apath = layout.annotations(config.dimension, id);
        if (fs::exists(apath)) {
            const std::string ann_bytes = read_text(apath);
            m.input(fs::relative(apath, corpus_dir).generic_string(), ann_bytes);
            std::istringstream ain(ann_bytes);
            std::vector<AnnotationTrace> traces;
            try {
                traces = parse_annotations(ain, config.dimension);
            } catch (const DataError& e) {
                throw DataError(apath.string() + ": " + e.what());
            }
            std::vector<double> gold = gold_standard(traces);
            const auto frame_end = first + static_cast<std::int64_t>(series.size());
            const auto gold_end = static_cast<std::int64_t>(gold.size());
            if (frame_end != gold_end) {
                warn("ingest: subject " + id + " has frames up to " + std::to_string(frame_end) +
                     " but annotations up to " + std::to_string(gold_end) + "; truncating to the common length");
            }
            const std::int64_t end = std::min(frame_end, gold_end);
            if (end - first < kWindowFrames) {
                throw DataError("ingest: subject " + id + " has fewer than " + std::to_string(kWindowFrames) +
                                " frames covered by both video and annotations");
            }
            truncate(series, static_cast<std::size_t>(end - first));
            gold.resize(static_cast<std::size_t>(end));
            std::string text = "frame,target\n";
            for (std::size_t t = 0; t < gold.size(); ++t) {
                text += std::to_string(t) + "," + csv::format_double(gold[t]) + "\n";
            }
            m.emit(dir, "targets/" + id + ".csv", text);
            ++labelled;
        } else if (std::find(part.test.begin(), part.test.end(), id) != part.test.end()) {
            warn("ingest: test subject " + id + " has no " + to_string(config.dimension) + " annotations");
        } else {
            throw DataError("ingest: missing annotation file " + apath.string());
        }
        std::ostringstream lld;
        write_descriptor_csv(lld, series, first);
        m.emit(dir, "llds/" + id + ".csv", lld.str());
    }
    std::ostringstream part_text;
    serialize_partition(part_text, part);
    m.emit(dir, "partition.ini", part_text.str());
    m.extra()["direct_gaze_source"] = sources;
    return m.finish(dir, std::to_string(part.all().size()) + " subjects ingested, " + std::to_string(labelled) +
                             " with " + to_string(config.dimension) + " targets");
}

StageSummary run_features(const Workspace& ws, const PipelineConfig& config,
                          std::optional<std::int64_t> dump_wavelet_frame) {
    const Partition part = workspace_partition(ws, kFeatures);
    const fs::path dir = ws.stage_dir(kFeatures);
    const auto cache = cache_dir();
    Manifest m(kFeatures, &config);

    const std::vector<std::string> ids = part.all();
    std::vector<std::string> lld_bytes(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const fs::path p = ws.stage_dir(kIngest) / "llds" / (ids[i] + ".csv");
        ws.require(kFeatures, p, "ingest");
        lld_bytes[i] = read_text(p);
        m.input("ingest/llds/" + ids[i] + ".csv", lld_bytes[i]);
    }

    std::vector<std::string> csv_text(ids.size());
    std::vector<std::string> dumps(ids.size());
    std::vector<char> from_cache(ids.size(), 0);
    parallel_for(ids.size(), config.threads, [&](std::size_t i) {
        const std::string key = std::string("features-") + kVersion + "-" + to_hex(fnv1a64(lld_bytes[i]));
        std::istringstream in(lld_bytes[i]);
        std::int64_t first = 0;
        const DescriptorSeries series = read_descriptor_csv(in, &first);
        if (cache && !dump_wavelet_frame) {
            const fs::path hit = *cache / (key + ".csv");
            if (fs::exists(hit)) {
                csv_text[i] = read_text(hit);
                from_cache[i] = 1;
                return;
            }
        }
        FeatureMatrix fm = compute_features(series);
        fm.frame_offset += first;
        fm.check_finite();
        std::ostringstream out;
        write_feature_csv(out, fm);
        csv_text[i] = out.str();
        if (cache) {
            fs::create_directories(*cache);
            const fs::path tmp = *cache / (key + ".tmp" + std::to_string(i));
            write_text(tmp, csv_text[i]);
            fs::rename(tmp, *cache / (key + ".csv"));
        }
        if (dump_wavelet_frame) {
            const std::int64_t end = *dump_wavelet_frame - first;
            if (end < kWindowFrames - 1 || end >= static_cast<std::int64_t>(series.size())) {
                throw ArgumentError("features: --dump-wavelet frame " + std::to_string(*dump_wavelet_frame) +
                                    " does not end a full window for subject " + ids[i]);
            }
            const std::span<const double> window(series.pupil_diam.data() + end - (kWindowFrames - 1),
                                                 kWindowFrames);
            std::ostringstream d;
            write_coefficient_dump(d, dwt_db10(window, 7));
            dumps[i] = d.str();
        }
    });

    std::size_t hits = 0;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        m.emit(dir, "subjects/" + ids[i] + ".csv", csv_text[i]);
        if (dump_wavelet_frame) {
            m.emit(dir, "wavelet/" + ids[i] + "-" + std::to_string(*dump_wavelet_frame) + ".csv", dumps[i]);
        }
        hits += static_cast<std::size_t>(from_cache[i]);
    }
    m.extra()["catalog_hash"] = to_hex(eye_catalog().hash());
    m.extra()["columns"] = eye_catalog().size();
    std::string msg = std::to_string(ids.size()) + " subjects x " + std::to_string(eye_catalog().size()) + " features";
    if (cache) {
        msg += " (" + std::to_string(hits) + " from cache)";
    }
    return m.finish(dir, msg);
}

StageSummary run_fuse(const Workspace& ws, const fs::path& external_dir, const PipelineConfig& config) {
    const Partition part = workspace_partition(ws, kFuse);
    const fs::path dir = ws.stage_dir(kFuse);
    Manifest m(kFuse, &config);
    std::size_t width = 0;
    for (const auto& id : part.all()) {
        const fs::path eye_path = ws.stage_dir(kFeatures) / "subjects" / (id + ".csv");
        ws.require(kFuse, eye_path, "features");
        const fs::path ext_path = external_dir / (id + ".csv");
        if (!fs::exists(ext_path)) {
            throw DataError("fuse: missing external features " + ext_path.string());
        }
        const std::string ext_bytes = read_text(ext_path);
        m.input("external/" + id + ".csv", ext_bytes);
        std::istringstream ext_in(ext_bytes);
        const ExternalFeatures ext = read_external_csv(ext_in);
        FeatureMatrix fused;
        try {
            fused = fuse(read_feature_csv_file(eye_path.string()), ext);
        } catch (const DataError& e) {
            throw DataError("fuse: subject " + id + ": " + e.what());
        }
        if (width != 0 && fused.width() != width) {
            throw DataError("fuse: subject " + id + " has a different external column set");
        }
        width = fused.width();
        std::ostringstream out;
        write_feature_csv(out, fused);
        m.emit(dir, "subjects/" + id + ".csv", out.str());
    }
    m.extra()["columns"] = width;
    return m.finish(dir, std::to_string(part.all().size()) + " subjects fused to " + std::to_string(width) +
                             " columns");
}

StageSummary run_select(const Workspace& ws, const PipelineConfig& config, const std::string& protocol) {
    config.validate();
    if (protocol != "all") {
        parse_protocol(protocol);
    }
    const Partition part = workspace_partition(ws, kSelect);
    std::vector<SubjectData> train = load_split(ws, config.feature_set, part.train, kSelect, "train");
    std::vector<SubjectData> val = load_split(ws, config.feature_set, part.validation, kSelect, "validation");
    const FeatureCatalog catalog = train.front().features.catalog;

    SelectionSweep sweep(std::move(train), std::move(val), sweep_options(config));
    std::vector<SelectionReport> reports;
    if (protocol == "all") {
        reports = sweep.run_full();
    } else if (protocol == "during") {
        reports = sweep.run_during({config.thresholds.begin(), config.thresholds.end()});
    } else {
        reports = sweep.run(parse_protocol(protocol));
    }
    const int best = best_report(reports);
    if (best < 0) {
        throw NumericError("select: every sweep cell failed");
    }
    const SelectionReport& chosen = reports[static_cast<std::size_t>(best)];

    const fs::path dir = ws.stage_dir(kSelect);
    Manifest m(kSelect, &config);
    m.extra()["protocol"] = protocol;
    std::ostringstream sweep_csv;
    write_sweep_csv(sweep_csv, reports);
    m.emit(dir, "sweep.csv", sweep_csv.str());
    std::ostringstream svg;
    write_sweep_svg(svg, reports);
    m.emit(dir, "sweep.svg", svg.str());

    json sel = report_json(chosen, catalog);
    sel["feature_set"] = config.feature_set;
    sel["sweep_protocol"] = protocol;
    m.emit(dir, "selection.json", sel.dump(2) + "\n");

    std::string scores = "feature,mi,retained\n";
    for (std::size_t i = 0; i < catalog.size(); ++i) {
        scores += catalog[i].name + "," + csv::format_double(chosen.mi_scores[i]) + "," +
                  (chosen.retained[i] ? "1" : "0") + "\n";
    }
    m.emit(dir, "mi_scores.csv", scores);

    std::size_t failed = 0;
    for (const auto& r : reports) {
        failed += r.failed ? 1 : 0;
    }
    char buf[200];
    std::snprintf(buf, sizeof(buf), "%zu cells (%zu failed); best: %s threshold %s, shift %.2f s, %zu features, CCC %.4f",
                  reports.size(), failed, to_string(chosen.protocol).c_str(), threshold_text(chosen.threshold).c_str(),
                  chosen.shift_seconds(), chosen.n_features, chosen.val_ccc);
    return m.finish(dir, buf);
}

StageSummary run_train(const Workspace& ws, const PipelineConfig& config, const TrainOverrides& overrides) {
    config.validate();
    const Partition part = workspace_partition(ws, kTrain);
    std::int64_t shift = 0;
    std::optional<double> threshold;
    std::string source = "defaults";
    const fs::path sel_path = ws.stage_dir(kSelect) / "selection.json";
    if (!overrides.ignore_selection && fs::exists(sel_path)) {
        const json sel = json::parse(read_text(sel_path));
        shift = sel.at("shift_frames").get<std::int64_t>();
        if (!sel.at("threshold").is_null()) {
            threshold = sel.at("threshold").get<double>();
        }
        source = "select/selection.json";
    }
    if (overrides.shift_seconds) {
        shift = seconds_to_frames(*overrides.shift_seconds);
        source = "flags";
    }
    if (overrides.threshold) {
        threshold = *overrides.threshold;
        source = "flags";
    }

    std::vector<SubjectData> train = load_split(ws, config.feature_set, part.train, kTrain, "train");
    std::vector<SubjectData> val = load_split(ws, config.feature_set, part.validation, kTrain, "validation");
    const FeatureCatalog catalog = train.front().features.catalog;
    SweepOptions opts = sweep_options(config);
    opts.shifts.frames = {shift};
    SelectionSweep sweep(train, val, opts);
    std::vector<bool> mask(catalog.size(), true);
    if (threshold) {
        mask = mi_filter(sweep.scores_for(shift), *threshold).retained;
    }
    if (std::none_of(mask.begin(), mask.end(), [](bool b) { return b; })) {
        throw DataError("train: MI threshold " + threshold_text(threshold) + " removes every feature");
    }
    const CellOutcome cell = evaluate_cell(train, val, mask, shift, config.model);

    const fs::path dir = ws.stage_dir(kTrain);
    Manifest m(kTrain, &config);
    if (source == "select/selection.json") {
        m.input_file(source, sel_path);
    }
    std::ostringstream ckpt;
    save_checkpoint(ckpt, cell.model);
    m.emit(dir, "model.json", ckpt.str());
    std::string hist = "epoch,train_sse,val_sse\n";
    for (const auto& h : cell.model.history) {
        hist += std::to_string(h.epoch) + "," + csv::format_double(h.train_sse) + "," + csv::format_double(h.val_sse) +
                "\n";
    }
    m.emit(dir, "history.csv", hist);
    json info;
    info["feature_set"] = config.feature_set;
    info["shift_frames"] = shift;
    info["shift_s"] = frames_to_seconds(shift);
    info["threshold"] = threshold ? json(*threshold) : json(nullptr);
    info["selection_source"] = source;
    info["n_features"] = cell.n_features;
    info["best_epoch"] = cell.model.best_epoch;
    info["val_ccc"] = cell.val_ccc;
    info["val_sse"] = cell.val_sse;
    m.emit(dir, "train.json", info.dump(2) + "\n");

    char buf[200];
    std::snprintf(buf, sizeof(buf), "%zu features, shift %.2f s, best epoch %d of %zu, validation CCC %.4f",
                  cell.n_features, frames_to_seconds(shift), cell.model.best_epoch, cell.model.history.size(),
                  cell.val_ccc);
    return m.finish(dir, buf);
}

StageSummary run_eval(const Workspace& ws, const PipelineConfig& config, const std::string& split) {
    const fs::path model_path = ws.stage_dir(kTrain) / "model.json";
    const fs::path info_path = ws.stage_dir(kTrain) / "train.json";
    if (!fs::exists(model_path) || !fs::exists(info_path)) {
        throw DataError("eval: no trained model in " + ws.stage_dir(kTrain).string() + "; run `train` first");
    }
    const Partition part = workspace_partition(ws, kEval);
    const std::vector<std::string>& ids = split_ids(part, split);
    const json info = json::parse(read_text(info_path));
    const std::string feature_set = info.at("feature_set").get<std::string>();
    const std::int64_t shift = info.at("shift_frames").get<std::int64_t>();
    const TrainedModel model = load_checkpoint_file(model_path.string());

    const fs::path dir = ws.stage_dir(kEval);
    Manifest m(kEval, &config);
    m.input_file("train/model.json", model_path);
    m.extra()["split"] = split;

    std::vector<double> pred_all;
    std::vector<double> target_all;
    std::vector<double> zpred_all;
    std::vector<double> ztarget_all;
    std::size_t scored = 0;
    for (const auto& id : ids) {
        const fs::path fpath = feature_dir(ws, feature_set) / (id + ".csv");
        ws.require(kEval, fpath, feature_set == "eye" ? "features" : "fuse");
        const FeatureMatrix full = read_feature_csv_file(fpath.string());
        std::vector<bool> mask(full.width(), false);
        for (const auto& name : model.input_names) {
            const int c = full.catalog.find(name);
            if (c < 0) {
                throw DataError("eval: subject " + id + " lacks model input column '" + name + "'");
            }
            mask[static_cast<std::size_t>(c)] = true;
        }
        SubjectData s;
        s.id = id;
        s.features = select_columns(full, mask);
        if (s.features.catalog.names() != model.input_names) {
            throw DataError("eval: subject " + id + " orders the model input columns differently");
        }
        const fs::path tpath = ws.stage_dir(kIngest) / "targets" / (id + ".csv");
        std::string text = "frame,prediction,target\n";
        if (fs::exists(tpath)) {
            s.target = read_target_csv(tpath);
            const AlignedSubject a = align(s, shift);
            const Eigen::VectorXd pred = predict(model, a.features);
            const Eigen::VectorXd zp = model.target_standardizer.apply_series(pred);
            const Eigen::VectorXd zt = model.target_standardizer.apply_series(a.target);
            for (Eigen::Index r = 0; r < pred.size(); ++r) {
                text += std::to_string(s.features.frame_offset + r) + "," + csv::format_double(pred(r)) + "," +
                        csv::format_double(a.target(r)) + "\n";
            }
            pred_all.insert(pred_all.end(), pred.data(), pred.data() + pred.size());
            target_all.insert(target_all.end(), a.target.data(), a.target.data() + a.target.size());
            zpred_all.insert(zpred_all.end(), zp.data(), zp.data() + zp.size());
            ztarget_all.insert(ztarget_all.end(), zt.data(), zt.data() + zt.size());
            ++scored;
        } else {
            const Eigen::VectorXd pred = predict(model, s.features.rows);
            for (Eigen::Index r = 0; r < pred.size(); ++r) {
                text += std::to_string(s.features.frame_offset + r) + "," + csv::format_double(pred(r)) + ",\n";
            }
        }
        m.emit(dir, "predictions/" + id + ".csv", text);
    }
    std::string msg = std::to_string(ids.size()) + " " + split + " subjects predicted";
    if (scored > 0) {
        const EvalReport r = evaluate(feature_set, config.dimension, split, pred_all, target_all, zpred_all,
                                      ztarget_all);
        std::ostringstream out;
        write_eval_csv(out, {r});
        m.emit(dir, "eval.csv", out.str());
        char buf[160];
        std::snprintf(buf, sizeof(buf), "; CCC %.4f, PCC %.4f, SSE %.4f over %zu frames", r.ccc, r.pcc, r.sse,
                      r.n_frames);
        msg += buf;
    }
    return m.finish(dir, msg);
}

StageSummary run_baseline(const Workspace& ws, const fs::path& corpus_dir, const PipelineConfig& config,
                          const std::string& split) {
    const CorpusLayout layout{corpus_dir};
    const Partition part = layout.load_partition();
    const std::vector<std::string>& ids = split_ids(part, split);
    if (ids.empty()) {
        throw DataError("baseline-humans: the partition has no " + split + " subjects");
    }
    const fs::path dir = ws.stage_dir(kBaseline);
    Manifest m(kBaseline, &config);
    m.extra()["split"] = split;
    std::string text = "subject,annotators,ccc\n";
    double total = 0.0;
    for (const auto& id : ids) {
        const fs::path apath = layout.annotations(config.dimension, id);
        if (!fs::exists(apath)) {
            throw DataError("baseline-humans: missing annotation file " + apath.string());
        }
        const std::string bytes = read_text(apath);
        m.input(fs::relative(apath, corpus_dir).generic_string(), bytes);
        std::istringstream in(bytes);
        const auto traces = parse_annotations(in, config.dimension);
        const double v = human_baseline(traces);
        total += v;
        text += id + "," + std::to_string(traces.size()) + "," + csv::format_double(v) + "\n";
    }
    const double mean = total / static_cast<double>(ids.size());
    text += "mean,," + csv::format_double(mean) + "\n";
    m.emit(dir, "baseline.csv", text);
    char buf[120];
    std::snprintf(buf, sizeof(buf), "mean pairwise annotator CCC over %zu %s subjects: %.4f", ids.size(),
                  split.c_str(), mean);
    return m.finish(dir, buf);
}

StageSummary run_report(const Workspace& ws, const PipelineConfig& config, bool svg) {
    const fs::path sweep_path = ws.stage_dir(kSelect) / "sweep.csv";
    ws.require(kReport, sweep_path, "select");
    std::ifstream in(sweep_path);
    const std::vector<SelectionReport> rows = read_sweep_csv(in);
    const fs::path dir = ws.stage_dir(kReport);
    Manifest m(kReport, &config);
    m.input_file("select/sweep.csv", sweep_path);

    std::ostringstream sweep_csv;
    write_sweep_csv(sweep_csv, rows);
    m.emit(dir, "sweep.csv", sweep_csv.str());
    if (svg) {
        std::ostringstream out;
        write_sweep_svg(out, rows);
        m.emit(dir, "sweep.svg", out.str());
    }

    std::vector<SelectionReport> table_rows;
    std::ostringstream md;
    md << "# Feature selection results\n";
    char buf[200];
    for (Protocol p : {Protocol::before, Protocol::after}) {
        std::vector<SelectionReport> sub;
        std::copy_if(rows.begin(), rows.end(), std::back_inserter(sub),
                     [&](const SelectionReport& r) { return r.protocol == p; });
        if (sub.empty()) {
            continue;
        }
        std::snprintf(buf, sizeof(buf), "\n## %s shifting (shift %.2f s)\n\n", to_string(p).c_str(),
                      sub.front().shift_seconds());
        md << buf << "| MI threshold | features | validation SSE | validation CCC |\n|---|---|---|---|\n";
        for (const auto& r : sub) {
            if (r.failed) {
                std::snprintf(buf, sizeof(buf), "| %s | %zu | failed | failed |\n", threshold_text(r.threshold).c_str(),
                              r.n_features);
            } else {
                std::snprintf(buf, sizeof(buf), "| %s | %zu | %.4f | %.4f |\n", threshold_text(r.threshold).c_str(),
                              r.n_features, r.val_sse, r.val_ccc);
            }
            md << buf;
        }
        table_rows.insert(table_rows.end(), sub.begin(), sub.end());
    }
    std::map<std::string, std::vector<SelectionReport>> curves;
    for (const auto& r : rows) {
        if (r.protocol == Protocol::during || r.protocol == Protocol::none) {
            curves[to_string(r.protocol) + " " + threshold_text(r.threshold)].push_back(r);
        }
    }
    if (!curves.empty()) {
        md << "\n## Best shift per sweep\n\n| protocol | MI threshold | best shift (s) | features | validation CCC |\n"
              "|---|---|---|---|---|\n";
        for (const auto& [name, sub] : curves) {
            const int b = best_report(sub);
            if (b < 0) {
                continue;
            }
            const auto& r = sub[static_cast<std::size_t>(b)];
            std::snprintf(buf, sizeof(buf), "| %s | %s | %.2f | %zu | %.4f |\n", to_string(r.protocol).c_str(),
                          threshold_text(r.threshold).c_str(), r.shift_seconds(), r.n_features, r.val_ccc);
            md << buf;
        }
    }
    const fs::path eval_path = ws.stage_dir(kEval) / "eval.csv";
    if (fs::exists(eval_path)) {
        m.input_file("eval/eval.csv", eval_path);
        std::ifstream ein(eval_path);
        md << "\n## Evaluation\n\n| system | dimension | split | SSE | CCC | PCC |\n|---|---|---|---|---|---|\n";
        for (const auto& r : read_eval_csv(ein)) {
            std::snprintf(buf, sizeof(buf), "| %s | %s | %s | %.4f | %.4f | %.4f |\n", r.system.c_str(),
                          to_string(r.dimension).c_str(), r.split.c_str(), r.sse, r.ccc, r.pcc);
            md << buf;
        }
    }
    const fs::path base_path = ws.stage_dir(kBaseline) / "baseline.csv";
    if (fs::exists(base_path)) {
        m.input_file("baseline/baseline.csv", base_path);
        const csv::Table t = csv::read_file(base_path.string(), ',');
        if (!t.rows.empty() && t.rows.back().front() == "mean") {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.4f", std::stod(t.rows.back().back()));
            md << "\nGroup-of-humans baseline (mean pairwise annotator CCC): " << buf << "\n";
        }
    }
    std::ostringstream tables;
    write_sweep_csv(tables, table_rows);
    m.emit(dir, "tables.csv", tables.str());
    m.emit(dir, "tables.md", md.str());
    return m.finish(dir, std::to_string(rows.size()) + " sweep rows reported");
}

}  // namespace eyeaffect
