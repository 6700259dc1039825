#include "eyeaffect/error.hpp"
#include "eyeaffect/pipeline.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace eyeaffect;
namespace fs = std::filesystem;

namespace {

FeatureMatrix eye_matrix(std::size_t frames, std::int64_t offset) {
    FeatureMatrix m;
    m.catalog = eye_catalog();
    m.frame_offset = offset;
    m.rows = RowMatrix::Constant(static_cast<Eigen::Index>(frames), 292, 0.5);
    return m;
}

ExternalFeatures external(std::int64_t first, std::size_t frames, std::size_t width) {
    ExternalFeatures e;
    for (std::size_t i = 0; i < frames; ++i) e.frames.push_back(first + static_cast<std::int64_t>(i));
    for (std::size_t j = 0; j < width; ++j) e.names.push_back("egemaps_" + std::to_string(j));
    e.rows = RowMatrix::Constant(static_cast<Eigen::Index>(frames), static_cast<Eigen::Index>(width), 1.0);
    return e;
}

fs::path temp_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("eyeaffect-unit-" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("fusion concatenates columns") {
    const auto f = fuse(eye_matrix(20, 199), external(199, 20, 88));
    CHECK(f.width() == 380);
    CHECK(f.frames() == 20);
    CHECK(f.catalog[292].name == "ext.egemaps_0");
    CHECK(f.catalog.count(FeatureGroup::external) == 88);
    CHECK(f.rows(3, 300) == 1.0);
    CHECK(f.rows(3, 10) == 0.5);
}

TEST_CASE("fusion namespaces colliding names") {
    auto e = external(199, 5, 2);
    e.names = {"gaze.x.max", "pupil.diam.mean"};
    const auto f = fuse(eye_matrix(5, 199), e);
    CHECK(f.width() == 294);
    CHECK(f.catalog.find("ext.gaze.x.max") == 292);
    CHECK(f.catalog.find("gaze.x.max") >= 0);
    CHECK(f.catalog.find("gaze.x.max") < 292);
}

TEST_CASE("fusion rejects misaligned frames") {
    CHECK_THROWS_AS(fuse(eye_matrix(20, 199), external(199, 18, 4)), DataError);
    try {
        fuse(eye_matrix(20, 199), external(205, 20, 4));
        FAIL("expected alignment error");
    } catch (const DataError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("199-204") != std::string::npos);
        CHECK(msg.find("219-224") != std::string::npos);
    }
}

TEST_CASE("external CSV parsing") {
    std::istringstream in("frame,f0,f1\n10,0.5,1\n12,0.25,2\n");
    const auto e = read_external_csv(in);
    CHECK(e.frames == std::vector<std::int64_t>{10, 12});
    CHECK(e.names == std::vector<std::string>{"f0", "f1"});
    CHECK(e.rows(1, 0) == 0.25);
}

TEST_CASE("configuration INI round-trip") {
    PipelineConfig c;
    c.thresholds = {0.05, 0.3};
    c.shifts = ShiftConfig::from_seconds({0.0, 1.2});
    c.model.hidden_sizes = {8, 4};
    c.model.learning_rate = 2.5e-4;
    c.lld.pupil_delta = 0.02;
    c.dimension = Dimension::valence;
    std::ostringstream out;
    write_ini(out, c);
    PipelineConfig d;
    std::istringstream in(out.str());
    apply_ini(d, in);
    std::ostringstream again;
    write_ini(again, d);
    CHECK(again.str() == out.str());
    CHECK(config_json(c) == config_json(d));

    std::istringstream bad("[model]\nlearning_rat = 1\n");
    CHECK_THROWS_AS(apply_ini(d, bad), ArgumentError);
}

TEST_CASE("default configuration carries the reference hyperparameters") {
    const PipelineConfig c;
    CHECK(c.model.hidden_sizes == std::vector<int>{40, 30});
    CHECK(c.model.learning_rate == 1e-5);
    CHECK(c.model.input_noise_sd == 0.1);
    CHECK(c.model.max_epochs == 100);
    CHECK(c.model.patience_epochs == 10);
    CHECK(c.model.seed == 1787452436ULL);
    CHECK(c.thresholds == std::vector<double>{0.1, 0.15, 0.2});
    CHECK(c.shifts.frames.size() == 23);
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("descriptor CSV round-trip") {
    SynthOptions o;
    o.n_subjects = 1;
    o.duration_s = 16.0;
    const auto corpus = synth_corpus(o);
    const auto series = derive_llds(corpus.subjects[0].frames, ThresholdConfig{});
    std::ostringstream out;
    write_descriptor_csv(out, series, 0);
    std::istringstream in(out.str());
    std::int64_t first = -1;
    const auto back = read_descriptor_csv(in, &first);
    CHECK(first == 0);
    CHECK(back.size() == series.size());
    CHECK(back.pupil_diam == series.pupil_diam);
    CHECK(back.eye_closure == series.eye_closure);
    CHECK(back.direct_gaze == series.direct_gaze);
}

TEST_CASE("stages name missing prerequisites") {
    const Workspace ws(temp_dir("prereq"));
    try {
        run_eval(ws, PipelineConfig{});
        FAIL("expected a stage error");
    } catch (const DataError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("eval") != std::string::npos);
        CHECK(msg.find("train") != std::string::npos);
    }
    CHECK_THROWS_AS(run_features(ws, PipelineConfig{}), DataError);
}

TEST_CASE("pipeline stages on a tiny synthetic corpus") {
    const fs::path root = temp_dir("stages");
    SynthOptions o;
    o.seed = 7;
    o.n_subjects = 4;
    o.n_train = 2;
    o.duration_s = 16.0;
    o.lag_s = 0.4;
    run_synth(root / "corpus", o);
    CHECK(fs::exists(root / "corpus" / "partition.ini"));
    CHECK(fs::exists(root / "corpus" / "manifest.json"));

    PipelineConfig c;
    c.shifts = ShiftConfig::from_seconds({0.0, 0.4});
    c.model.hidden_sizes = {3, 2};
    c.model.max_epochs = 2;
    c.model.patience_epochs = 1;
    c.threads = 1;
    const Workspace ws(root / "run");
    run_ingest(ws, root / "corpus", c);
    run_features(ws, c);
    const auto sel = run_select(ws, c, "during");
    std::ifstream sweep(ws.stage_dir("select") / "sweep.csv");
    std::string line;
    int rows = -1;
    while (std::getline(sweep, line)) ++rows;
    CHECK(rows == 3 * 2);
    run_train(ws, c);
    run_eval(ws, c, "validation");
    run_report(ws, c, true);
    for (const char* p : {"ingest/manifest.json", "features/manifest.json", "select/selection.json",
                          "train/model.json", "eval/eval.csv", "report/tables.md", "report/sweep.svg"}) {
        CHECK_MESSAGE(fs::exists(ws.root() / p), p);
    }
}

}  // TEST_SUITE
