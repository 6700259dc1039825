// Python bindings for the eyeaffect core.

#include "eyeaffect/common.hpp"
#include "eyeaffect/corpus.hpp"
#include "eyeaffect/error.hpp"
#include "eyeaffect/eval.hpp"
#include "eyeaffect/features.hpp"
#include "eyeaffect/lld.hpp"
#include "eyeaffect/model.hpp"
#include "eyeaffect/pipeline.hpp"
#include "eyeaffect/selection.hpp"
#include "eyeaffect/wavelet.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

namespace py = pybind11;
using namespace eyeaffect;

namespace {

py::dict summary_dict(const StageSummary& s) {
    py::dict d;
    d["stage"] = s.stage;
    d["outputs"] = s.outputs;
    d["message"] = s.message;
    return d;
}

PipelineConfig config_from_ini(const std::string& text) {
    PipelineConfig c;
    std::istringstream in(text);
    apply_ini(c, in);
    c.validate();
    return c;
}

std::string config_to_ini(const PipelineConfig& c) {
    std::ostringstream out;
    write_ini(out, c);
    return out.str();
}

py::tuple features_tuple(const FeatureMatrix& m) {
    return py::make_tuple(RowMatrix(m.rows), m.catalog.names(), m.frame_offset);
}

// Features x frames layout for training; callers hand over frames x features.
std::vector<Sequence> to_sequences(const std::vector<std::pair<Eigen::MatrixXd, Eigen::VectorXd>>& data) {
    std::vector<Sequence> out;
    out.reserve(data.size());
    for (const auto& [x, y] : data) {
        if (x.rows() != y.size()) {
            throw ArgumentError("sequence has " + std::to_string(x.rows()) + " frames but " +
                                std::to_string(y.size()) + " targets");
        }
        out.push_back({x.transpose(), y});
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Eye-feature continuous affect prediction";
    m.attr("__version__") = kVersion;

    static py::exception<DataError> data_error(m, "DataError", PyExc_RuntimeError);
    static py::exception<NumericError> numeric_error(m, "NumericError", PyExc_ArithmeticError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ArgumentError& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        } catch (const DataError& e) {
            py::set_error(data_error, e.what());
        } catch (const NumericError& e) {
            py::set_error(numeric_error, e.what());
        }
    });

    // metrics
    m.def("ccc", [](const std::vector<double>& x, const std::vector<double>& y) { return ccc(x, y); },
          py::arg("x"), py::arg("y"), "Concordance correlation coefficient (population moments).");
    m.def("pcc", [](const std::vector<double>& x, const std::vector<double>& y) { return pcc(x, y); },
          py::arg("x"), py::arg("y"));
    m.def("sse", [](const std::vector<double>& x, const std::vector<double>& y) { return sse(x, y); },
          py::arg("x"), py::arg("y"), "Mean squared difference per frame.");
    m.def(
        "human_baseline",
        [](const std::vector<std::vector<double>>& traces) {
            std::vector<AnnotationTrace> t;
            for (std::size_t i = 0; i < traces.size(); ++i) {
                t.push_back({Dimension::arousal, "A" + std::to_string(i + 1), traces[i]});
            }
            return human_baseline(t);
        },
        py::arg("traces"), "Mean pairwise CCC between annotator traces.");
    m.def(
        "wilcoxon_rank_sum",
        [](const std::vector<double>& a, const std::vector<double>& b) {
            const auto r = wilcoxon_rank_sum(a, b);
            return py::make_tuple(r.w, r.p_value, r.exact);
        },
        py::arg("a"), py::arg("b"), "Returns (W, two-sided p, exact).");

    // wavelet
    m.def(
        "dwt_db10",
        [](const std::vector<double>& signal, int levels) {
            const auto d = dwt_db10(signal, levels);
            return py::make_tuple(d.detail, d.approximation);
        },
        py::arg("signal"), py::arg("levels") = 7,
        "Periodized db10 decomposition; returns (details, approximations) per level.");
    m.def(
        "idwt_db10",
        [](const std::vector<double>& a, const std::vector<double>& d) { return idwt_db10(a, d); },
        py::arg("approximation"), py::arg("detail"));

    // selection
    m.def(
        "mutual_information",
        [](const std::vector<double>& x, const std::vector<double>& y, int bins) {
            const auto r = mutual_information(x, y, bins);
            return py::make_tuple(r.nats, r.degenerate);
        },
        py::arg("x"), py::arg("y"), py::arg("bins") = 32, "Returns (nats, degenerate).");
    m.def(
        "mi_filter",
        [](std::vector<double> scores, double threshold) { return mi_filter(std::move(scores), threshold).retained; },
        py::arg("scores"), py::arg("threshold"), "Mask of features whose MI exceeds the threshold.");
    m.def(
        "shift_labels",
        [](const std::vector<double>& values, std::int64_t frames) { return shift_labels(values, frames); },
        py::arg("values"), py::arg("shift_frames"));

    // corpus and features
    m.def("feature_names", [] { return eye_catalog().names(); }, "The 292 eye feature names in column order.");
    m.def(
        "gold_standard",
        [](const std::string& path, const std::string& dimension) {
            return gold_standard(parse_annotations_file(path, parse_dimension(dimension)));
        },
        py::arg("path"), py::arg("dimension") = "arousal", "Annotator mean of an annotation file.");
    m.def(
        "compute_features",
        [](const std::string& frames_csv) {
            const auto frames = parse_frames_file(frames_csv);
            return features_tuple(compute_features(derive_llds(frames, ThresholdConfig{})));
        },
        py::arg("frames_csv"),
        "Features of one frame CSV; returns (matrix frames x 292, names, first frame index).");

    // model
    py::class_<TrainedModel>(m, "Model")
        .def("predict", [](const TrainedModel& t, const Eigen::MatrixXd& x) { return predict(t, x); },
             py::arg("frames_by_features"))
        .def_readonly("best_epoch", &TrainedModel::best_epoch)
        .def_property_readonly("history",
                               [](const TrainedModel& t) {
                                   std::vector<std::tuple<int, double, double>> h;
                                   for (const auto& r : t.history) h.emplace_back(r.epoch, r.train_sse, r.val_sse);
                                   return h;
                               })
        .def_property_readonly("parameter_count", [](const TrainedModel& t) { return t.network.parameter_count(); })
        .def("save", [](const TrainedModel& t, const std::string& path) { save_checkpoint_file(path, t); },
             py::arg("path"));
    m.def("load_model", [](const std::string& path) { return load_checkpoint_file(path); }, py::arg("path"));
    m.def(
        "train_blstm",
        [](const std::vector<std::pair<Eigen::MatrixXd, Eigen::VectorXd>>& train,
           const std::vector<std::pair<Eigen::MatrixXd, Eigen::VectorXd>>& validation, std::vector<int> hidden,
           double learning_rate, int max_epochs, int patience, double input_noise_sd, std::uint64_t seed) {
            ModelConfig cfg;
            cfg.hidden_sizes = std::move(hidden);
            cfg.learning_rate = learning_rate;
            cfg.max_epochs = max_epochs;
            cfg.patience_epochs = patience;
            cfg.input_noise_sd = input_noise_sd;
            cfg.seed = seed;
            const auto tr = to_sequences(train);
            const auto va = to_sequences(validation);
            py::gil_scoped_release release;
            return train_blstm(tr, va, cfg);
        },
        py::arg("train"), py::arg("validation") = std::vector<std::pair<Eigen::MatrixXd, Eigen::VectorXd>>{},
        py::arg("hidden") = std::vector<int>{40, 30}, py::arg("learning_rate") = 1e-5, py::arg("max_epochs") = 100,
        py::arg("patience") = 10, py::arg("input_noise_sd") = 0.1, py::arg("seed") = 1787452436ULL,
        "Train on (frames x features, targets) pairs that are already standardized.");

    // pipeline
    py::class_<PipelineConfig>(m, "Config")
        .def(py::init<>())
        .def_static("from_ini", &config_from_ini, py::arg("text"))
        .def("to_ini", &config_to_ini)
        .def_property(
            "dimension", [](const PipelineConfig& c) { return to_string(c.dimension); },
            [](PipelineConfig& c, const std::string& d) { c.dimension = parse_dimension(d); })
        .def_readwrite("thresholds", &PipelineConfig::thresholds)
        .def_property(
            "shifts", [](const PipelineConfig& c) { return c.shifts.seconds(); },
            [](PipelineConfig& c, const std::vector<double>& s) { c.shifts = ShiftConfig::from_seconds(s); })
        .def_readwrite("bins", &PipelineConfig::bins)
        .def_readwrite("threads", &PipelineConfig::threads)
        .def_readwrite("feature_set", &PipelineConfig::feature_set)
        .def_property(
            "hidden", [](const PipelineConfig& c) { return c.model.hidden_sizes; },
            [](PipelineConfig& c, const std::vector<int>& h) { c.model.hidden_sizes = h; })
        .def_property(
            "learning_rate", [](const PipelineConfig& c) { return c.model.learning_rate; },
            [](PipelineConfig& c, double v) { c.model.learning_rate = v; })
        .def_property(
            "max_epochs", [](const PipelineConfig& c) { return c.model.max_epochs; },
            [](PipelineConfig& c, int v) { c.model.max_epochs = v; })
        .def_property(
            "patience", [](const PipelineConfig& c) { return c.model.patience_epochs; },
            [](PipelineConfig& c, int v) { c.model.patience_epochs = v; })
        .def_property(
            "seed", [](const PipelineConfig& c) { return c.model.seed; },
            [](PipelineConfig& c, std::uint64_t v) { c.model.seed = v; })
        .def("validate", &PipelineConfig::validate);

    m.def(
        "synth",
        [](const std::string& out, int subjects, double minutes, double lag, int annotators, int train, int test,
           std::uint64_t seed) {
            SynthOptions o;
            o.n_subjects = subjects;
            o.duration_s = minutes * 60.0;
            o.lag_s = lag;
            o.n_annotators = annotators;
            o.n_train = train;
            o.n_test = test;
            o.seed = seed;
            return summary_dict(run_synth(out, o));
        },
        py::arg("out"), py::arg("subjects") = 12, py::arg("minutes") = 2.0, py::arg("lag") = 2.0,
        py::arg("annotators") = 3, py::arg("train") = -1, py::arg("test") = 0, py::arg("seed") = 1787452436ULL,
        "Write a synthetic corpus with a planted annotation lag.");

    const auto cfg_arg = py::arg("config") = PipelineConfig{};
    m.def(
        "ingest",
        [](const std::string& work, const std::string& corpus, const PipelineConfig& c) {
            return summary_dict(run_ingest(Workspace(work), corpus, c));
        },
        py::arg("work"), py::arg("corpus"), cfg_arg);
    m.def(
        "features",
        [](const std::string& work, const PipelineConfig& c) { return summary_dict(run_features(Workspace(work), c)); },
        py::arg("work"), cfg_arg);
    m.def(
        "fuse",
        [](const std::string& work, const std::string& external, const PipelineConfig& c) {
            return summary_dict(run_fuse(Workspace(work), external, c));
        },
        py::arg("work"), py::arg("external"), cfg_arg);
    m.def(
        "select",
        [](const std::string& work, const std::string& protocol, const PipelineConfig& c) {
            StageSummary r;
            {
                py::gil_scoped_release release;
                r = run_select(Workspace(work), c, protocol);
            }
            return summary_dict(r);
        },
        py::arg("work"), py::arg("protocol") = "during", cfg_arg);
    m.def(
        "train",
        [](const std::string& work, const PipelineConfig& c, std::optional<double> shift) {
            TrainOverrides o;
            o.shift_seconds = shift;
            StageSummary r;
            {
                py::gil_scoped_release release;
                r = run_train(Workspace(work), c, o);
            }
            return summary_dict(r);
        },
        py::arg("work"), cfg_arg, py::arg("shift") = py::none());
    m.def(
        "evaluate",
        [](const std::string& work, const std::string& split, const PipelineConfig& c) {
            return summary_dict(run_eval(Workspace(work), c, split));
        },
        py::arg("work"), py::arg("split") = "validation", cfg_arg);
    m.def(
        "baseline_humans",
        [](const std::string& work, const std::string& corpus, const std::string& split, const PipelineConfig& c) {
            return summary_dict(run_baseline(Workspace(work), corpus, c, split));
        },
        py::arg("work"), py::arg("corpus"), py::arg("split") = "validation", cfg_arg);
    m.def(
        "report",
        [](const std::string& work, bool svg, const PipelineConfig& c) {
            return summary_dict(run_report(Workspace(work), c, svg));
        },
        py::arg("work"), py::arg("svg") = true, cfg_arg);
}
