// eyeaffect: command-line driver for the eye-feature affect pipeline.

#include "eyeaffect/common.hpp"
#include "eyeaffect/error.hpp"
#include "eyeaffect/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace eyeaffect;

enum Exit { kOk = 0, kUsage = 2, kData = 3, kNumeric = 4 };

struct Flags {
    std::string config_file;
    bool show_config = false;
    std::string work = "run";
    std::optional<unsigned> threads;
    std::optional<std::string> dimension;
    std::optional<std::string> feature_set;

    // model
    std::optional<std::uint64_t> seed;
    std::optional<double> learning_rate;
    std::optional<double> momentum;
    std::optional<int> max_epochs;
    std::optional<int> patience;
    std::vector<int> hidden;

    // selection
    std::vector<double> thresholds;
    std::vector<double> shifts;
    std::optional<int> bins;
};

PipelineConfig build_config(const Flags& f) {
    PipelineConfig c;
    if (!f.config_file.empty()) {
        apply_ini_file(c, f.config_file);
    }
    if (f.threads) c.threads = *f.threads;
    if (f.dimension) c.dimension = parse_dimension(*f.dimension);
    if (f.feature_set) c.feature_set = *f.feature_set;
    if (f.seed) c.model.seed = *f.seed;
    if (f.learning_rate) c.model.learning_rate = *f.learning_rate;
    if (f.momentum) c.model.momentum = *f.momentum;
    if (f.max_epochs) c.model.max_epochs = *f.max_epochs;
    if (f.patience) c.model.patience_epochs = *f.patience;
    if (!f.hidden.empty()) c.model.hidden_sizes = f.hidden;
    if (!f.thresholds.empty()) c.thresholds = f.thresholds;
    if (!f.shifts.empty()) c.shifts = ShiftConfig::from_seconds(f.shifts);
    if (f.bins) c.bins = *f.bins;
    c.validate();
    return c;
}

void print(const StageSummary& s) {
    std::cout << s.stage << ": " << s.message << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Eye-based continuous affect prediction pipeline"};
    app.set_version_flag("--version", std::string("eyeaffect ") + kVersion);
    app.require_subcommand(0, 1);
    app.fallthrough();

    Flags f;
    app.add_option("--config", f.config_file, "INI configuration file (flags take precedence)")->check(CLI::ExistingFile);
    app.add_flag("--show-config", f.show_config, "Print the effective configuration and exit");
    app.add_option("-w,--work", f.work, "Run directory holding the stage outputs")->capture_default_str();
    app.add_option("--threads", f.threads, "Worker threads (0: all cores)");
    app.add_option("--dimension", f.dimension, "Affect dimension")->check(CLI::IsMember({"arousal", "valence"}));
    app.add_option("--feature-set", f.feature_set, "Feature set for select/train")->check(CLI::IsMember({"eye", "fused"}));
    app.add_option("--seed", f.seed, "Training seed");
    app.add_option("--learning-rate", f.learning_rate, "Gradient-descent step size");
    app.add_option("--momentum", f.momentum, "Momentum (0: plain gradient descent)");
    app.add_option("--max-epochs", f.max_epochs, "Epoch limit");
    app.add_option("--patience", f.patience, "Early-stopping patience in epochs");
    app.add_option("--hidden", f.hidden, "Cells per direction for each BLSTM layer")->delimiter(',');
    app.add_option("--thresholds", f.thresholds, "MI thresholds in nats")->delimiter(',');
    app.add_option("--shifts", f.shifts, "Ground-truth shifts in seconds")->delimiter(',');
    app.add_option("--bins", f.bins, "Quantile bins for MI");

    // synth
    SynthOptions synth;
    synth.seed = 1787452436ULL;
    double minutes = 2.0;
    std::string synth_out = "corpus";
    auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic corpus with a planted annotation lag");
    synth_cmd->add_option("--subjects", synth.n_subjects, "Subject count")->capture_default_str();
    synth_cmd->add_option("--minutes", minutes, "Recording length per subject")->capture_default_str();
    synth_cmd->add_option("--lag", synth.lag_s, "Planted annotation lag in seconds")->capture_default_str();
    synth_cmd->add_option("--annotators", synth.n_annotators, "Annotators per subject")->capture_default_str();
    synth_cmd->add_option("--train", synth.n_train, "Training subjects (-1: two thirds)")->capture_default_str();
    synth_cmd->add_option("--test", synth.n_test, "Test subjects")->capture_default_str();
    synth_cmd->add_option("-o,--out", synth_out, "Corpus directory")->capture_default_str();

    std::string corpus;
    auto* ingest_cmd = app.add_subcommand("ingest", "Parse a corpus into descriptor series and gold-standard targets");
    ingest_cmd->add_option("--corpus", corpus, "Corpus directory")->required();

    std::optional<std::int64_t> dump_frame;
    auto* features_cmd = app.add_subcommand("features", "Compute the 292 windowed eye features");
    features_cmd->add_option("--dump-wavelet", dump_frame, "Also dump db10 coefficients of the window ending at FRAME");

    std::string external;
    auto* fuse_cmd = app.add_subcommand("fuse", "Append external per-frame features (early fusion)");
    fuse_cmd->add_option("--external", external, "Directory of <subject>.csv external features")->required();

    std::string protocol = "during";
    auto* select_cmd = app.add_subcommand("select", "Run the MI selection / ground-truth shift sweep");
    select_cmd->add_option("--protocol", protocol, "before, during, after, none or all")
        ->check(CLI::IsMember({"before", "during", "after", "none", "all"}))
        ->capture_default_str();

    TrainOverrides overrides;
    std::optional<double> shift_flag;
    std::optional<std::string> threshold_flag;
    auto* train_cmd = app.add_subcommand("train", "Train the BLSTM on the selected features and shift");
    train_cmd->add_option("--shift", shift_flag, "Ground-truth shift in seconds (overrides the selection)");
    train_cmd->add_option("--threshold", threshold_flag, "MI threshold or 'none' (overrides the selection)");
    train_cmd->add_flag("--no-selection", overrides.ignore_selection, "Ignore select/selection.json");

    std::string split = "validation";
    auto* eval_cmd = app.add_subcommand("eval", "Score the trained model on a split");
    eval_cmd->add_option("--split", split, "train, validation or test")
        ->check(CLI::IsMember({"train", "validation", "test"}))
        ->capture_default_str();

    std::string baseline_split = "validation";
    auto* baseline_cmd = app.add_subcommand("baseline-humans", "Mean pairwise annotator CCC");
    baseline_cmd->add_option("--corpus", corpus, "Corpus directory")->required();
    baseline_cmd->add_option("--split", baseline_split, "train, validation or test")
        ->check(CLI::IsMember({"train", "validation", "test"}))
        ->capture_default_str();

    bool no_svg = false;
    auto* report_cmd = app.add_subcommand("report", "Write sweep tables and the CCC-vs-shift chart");
    report_cmd->add_flag("--no-svg", no_svg, "Skip the SVG chart");

    std::string run_protocol = "all";
    auto* run_cmd = app.add_subcommand("run", "ingest, features, select, train, eval, baseline-humans and report");
    run_cmd->add_option("--corpus", corpus, "Corpus directory")->required();
    run_cmd->add_option("--protocol", run_protocol, "Selection protocol")
        ->check(CLI::IsMember({"before", "during", "after", "none", "all"}))
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    std::string stage = "config";
    try {
        const PipelineConfig config = build_config(f);
        if (f.show_config) {
            write_ini(std::cout, config);
            return kOk;
        }
        if (app.get_subcommands().empty()) {
            std::cerr << app.help();
            return kUsage;
        }
        const Workspace ws(f.work);
        const auto* cmd = app.get_subcommands().front();
        stage = cmd->get_name();
        if (cmd == synth_cmd) {
            synth.duration_s = minutes * 60.0;
            if (f.seed) synth.seed = *f.seed;
            print(run_synth(synth_out, synth));
        } else if (cmd == ingest_cmd) {
            print(run_ingest(ws, corpus, config));
        } else if (cmd == features_cmd) {
            print(run_features(ws, config, dump_frame));
        } else if (cmd == fuse_cmd) {
            print(run_fuse(ws, external, config));
        } else if (cmd == select_cmd) {
            print(run_select(ws, config, protocol));
        } else if (cmd == train_cmd) {
            overrides.shift_seconds = shift_flag;
            if (threshold_flag) {
                overrides.threshold = *threshold_flag == "none"
                                          ? std::optional<double>{}
                                          : std::optional<double>{std::stod(*threshold_flag)};
            }
            print(run_train(ws, config, overrides));
        } else if (cmd == eval_cmd) {
            print(run_eval(ws, config, split));
        } else if (cmd == baseline_cmd) {
            print(run_baseline(ws, corpus, config, baseline_split));
        } else if (cmd == report_cmd) {
            print(run_report(ws, config, !no_svg));
        } else if (cmd == run_cmd) {
            stage = "ingest";
            print(run_ingest(ws, corpus, config));
            stage = "features";
            print(run_features(ws, config));
            stage = "select";
            print(run_select(ws, config, run_protocol));
            stage = "train";
            print(run_train(ws, config));
            stage = "eval";
            print(run_eval(ws, config, "validation"));
            stage = "baseline-humans";
            print(run_baseline(ws, corpus, config, "validation"));
            stage = "report";
            print(run_report(ws, config, true));
        }
    } catch (const ArgumentError& e) {
        std::cerr << "eyeaffect " << stage << ": error: " << e.what() << "\n";
        return kUsage;
    } catch (const NumericError& e) {
        std::cerr << "eyeaffect " << stage << ": numeric failure: " << e.what() << "\n";
        return kNumeric;
    } catch (const DataError& e) {
        std::cerr << "eyeaffect " << stage << ": error: " << e.what() << "\n";
        return kData;
    } catch (const std::invalid_argument& e) {
        std::cerr << "eyeaffect " << stage << ": error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "eyeaffect " << stage << ": error: " << e.what() << "\n";
        return kData;
    }
    return kOk;
}
