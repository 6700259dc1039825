#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace eyeaffect {

/// Parameter and gradient storage. A fixed base alignment keeps Eigen's
/// vectorized kernels on the same code path in every run.
using ParamVector = std::vector<double, Eigen::aligned_allocator<double>>;

/// Training recipe. Defaults reproduce the reference protocol: two BLSTM
/// layers of 40 and 30 cells per direction, learning rate 1e-5, input noise
/// SD 0.1, at most 100 epochs with 10 epochs of patience.
struct ModelConfig {
    std::vector<int> hidden_sizes{40, 30};
    double learning_rate = 1e-5;
    double momentum = 0.0;
    double input_noise_sd = 0.1;
    int max_epochs = 100;
    int patience_epochs = 10;
    std::uint64_t seed = 1787452436ULL;
    double init_range = 0.1;
    double forget_bias = 1.0;

    /// Throws ArgumentError for non-positive sizes/rates or patience > max_epochs.
    void validate() const;
};

/// One subject's sequence: inputs are features x frames (one column per
/// frame), targets one value per frame.
struct Sequence {
    Eigen::MatrixXd inputs;
    Eigen::VectorXd targets;
};

/// Per-column z-scoring fitted on training data. Columns whose SD is zero
/// get SD 1 and are flagged, so they standardize to 0.
struct Standardizer {
    Eigen::VectorXd mean;
    Eigen::VectorXd sd;
    std::vector<bool> flagged;

    /// Fit on the pooled columns of `blocks` (each rows = frames).
    static Standardizer fit(const std::vector<Eigen::MatrixXd>& blocks);
    /// Fit a single series (targets).
    static Standardizer fit_series(const std::vector<Eigen::VectorXd>& series);

    std::size_t width() const { return static_cast<std::size_t>(mean.size()); }

    /// Rows are frames, columns features.
    Eigen::MatrixXd apply(const Eigen::MatrixXd& frames_by_features) const;
    Eigen::MatrixXd invert(const Eigen::MatrixXd& frames_by_features) const;
    Eigen::VectorXd apply_series(const Eigen::VectorXd& v) const;
    Eigen::VectorXd invert_series(const Eigen::VectorXd& v) const;
};

/// Adds independent N(0, sd^2) noise to every cell.
Eigen::MatrixXd add_noise(const Eigen::MatrixXd& m, double sd, std::mt19937_64& rng);

/// Stacked bidirectional LSTM with a linear scalar output per frame.
/// Gates are ordered input, forget, output, cell; each direction of each
/// layer owns Wx (4H x I), Wh (4H x H) and b (4H). Parameters live in one
/// flat vector so they can be perturbed, saved and updated uniformly.
class Blstm {
public:
    Blstm() = default;
    Blstm(int input_size, std::vector<int> hidden_sizes);

    int input_size() const { return input_size_; }
    const std::vector<int>& hidden_sizes() const { return hidden_; }
    std::size_t parameter_count() const { return params_.size(); }
    std::span<double> parameters() { return params_; }
    std::span<const double> parameters() const { return params_; }

    /// Uniform weights in [-range, range]; forget-gate biases set to `forget_bias`.
    void initialize(std::mt19937_64& rng, double range, double forget_bias);

    /// Per-frame outputs for inputs of shape input_size x T.
    Eigen::VectorXd forward(const Eigen::MatrixXd& inputs) const;

    /// Sum of squared frame errors; adds d(loss)/d(params) into `gradient`.
    double loss_and_gradient(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets,
                             std::span<double> gradient) const;

    /// Sum of squared frame errors without gradients.
    double loss(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets) const;

    /// Offset of the scalar output bias inside parameters().
    std::size_t output_bias_index() const { return params_.size() - 1; }

private:
    struct DirectionLayout {
        std::size_t wx, wh, b;
        int inputs, hidden;
    };
    struct DirectionCache;

    void forward_direction(const DirectionLayout& d, const Eigen::MatrixXd& x, bool reverse,
                           DirectionCache& cache) const;
    void backward_direction(const DirectionLayout& d, const Eigen::MatrixXd& x, bool reverse,
                            const DirectionCache& cache, const Eigen::MatrixXd& d_out, std::span<double> grad,
                            Eigen::MatrixXd* d_input) const;

    int input_size_ = 0;
    std::vector<int> hidden_;
    std::vector<DirectionLayout> layout_;  // layer-major, forward then backward
    std::size_t out_w_ = 0;
    ParamVector params_;
};

/// Analytic gradient of the summed SSE over `batch`; an empty batch gives zeros.
ParamVector model_gradients(const Blstm& model, const std::vector<Sequence>& batch);

/// Patience-based stopping on a loss where lower is better. Epochs count
/// from 1.
class EarlyStopping {
public:
    explicit EarlyStopping(int patience) : patience_(patience) {}

    /// Records an epoch's score; returns true when it is a new best.
    bool update(double score);
    bool should_stop() const { return wait_ >= patience_; }
    int best_epoch() const { return best_epoch_; }
    double best_score() const { return best_; }
    int epochs_seen() const { return epoch_; }

private:
    int patience_;
    int epoch_ = 0;
    int wait_ = 0;
    int best_epoch_ = 0;
    double best_ = 0.0;
};

struct EpochRecord {
    int epoch = 0;
    double train_sse = 0.0;  // mean squared frame error, standardized scale
    double val_sse = 0.0;
};

struct TrainedModel {
    ModelConfig config;
    Blstm network;
    Standardizer input_standardizer;
    Standardizer target_standardizer;
    std::vector<std::string> input_names;
    std::uint64_t catalog_hash = 0;
    std::vector<EpochRecord> history;
    int best_epoch = 0;
};

/// Trains on standardized sequences: one plain gradient step per training
/// sequence in the given order, fresh input noise each epoch, validation
/// SSE after each epoch, parameters restored from the best epoch. With no
/// validation sequences the training SSE drives early stopping. The returned
/// standardizers are identities; callers that scale their data replace them.
/// Throws ArgumentError for an empty training set and NumericError when the
/// loss stops being finite.
TrainedModel train_blstm(const std::vector<Sequence>& train, const std::vector<Sequence>& validation,
                         const ModelConfig& config);

/// De-standardized per-frame predictions for raw (unstandardized) features
/// laid out frames x features. Throws DataError on a width mismatch.
Eigen::VectorXd predict(const TrainedModel& model, const Eigen::MatrixXd& frames_by_features);

/// Versioned JSON checkpoint: config, input names, catalog hash,
/// standardizers, parameters and training history.
void save_checkpoint(std::ostream& out, const TrainedModel& model);
void save_checkpoint_file(const std::string& path, const TrainedModel& model);
/// Throws DataError when the stored catalog hash differs from
/// `expected_catalog_hash` (pass 0 to skip the check).
TrainedModel load_checkpoint(std::istream& in, std::uint64_t expected_catalog_hash = 0);
TrainedModel load_checkpoint_file(const std::string& path, std::uint64_t expected_catalog_hash = 0);

}  // namespace eyeaffect
