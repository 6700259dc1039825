#include "eyeaffect/model.hpp"

#include "eyeaffect/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <nlohmann/json.hpp>

namespace eyeaffect {

namespace {

using MapMat = Eigen::Map<Eigen::MatrixXd>;
using ConstMapMat = Eigen::Map<const Eigen::MatrixXd>;
using MapVec = Eigen::Map<Eigen::VectorXd>;
using ConstMapVec = Eigen::Map<const Eigen::VectorXd>;

constexpr const char* kCheckpointFormat = "eyeaffect-blstm";
constexpr int kCheckpointVersion = 1;

// Eigen only vectorizes tanh for float; this form rides on the vectorized exp.
template <typename Derived>
auto fast_tanh(const Eigen::ArrayBase<Derived>& x) {
    return 1.0 - 2.0 / ((2.0 * x).exp() + 1.0);
}

}  // namespace

void ModelConfig::validate() const {
    if (hidden_sizes.empty()) {
        throw ArgumentError("model needs at least one hidden layer");
    }
    for (int h : hidden_sizes) {
        if (h <= 0) {
            throw ArgumentError("hidden layer sizes must be positive");
        }
    }
    if (!(learning_rate > 0.0)) {
        throw ArgumentError("learning rate must be positive");
    }
    if (momentum < 0.0 || momentum >= 1.0) {
        throw ArgumentError("momentum must lie in [0, 1)");
    }
    if (input_noise_sd < 0.0) {
        throw ArgumentError("input noise SD must be non-negative");
    }
    if (max_epochs <= 0 || patience_epochs <= 0) {
        throw ArgumentError("max_epochs and patience_epochs must be positive");
    }
    if (patience_epochs > max_epochs) {
        throw ArgumentError("patience_epochs cannot exceed max_epochs");
    }
}

// ---------------------------------------------------------------- Standardizer

Standardizer Standardizer::fit(const std::vector<Eigen::MatrixXd>& blocks) {
    if (blocks.empty()) {
        throw ArgumentError("standardizer needs training rows");
    }
    const Eigen::Index width = blocks.front().cols();
    Eigen::Index rows = 0;
    Standardizer s;
    s.mean = Eigen::VectorXd::Zero(width);
    for (const auto& b : blocks) {
        if (b.cols() != width) {
            throw DataError("standardizer blocks differ in width");
        }
        s.mean += b.colwise().sum().transpose();
        rows += b.rows();
    }
    if (rows == 0) {
        throw ArgumentError("standardizer needs training rows");
    }
    s.mean /= static_cast<double>(rows);
    Eigen::VectorXd var = Eigen::VectorXd::Zero(width);
    for (const auto& b : blocks) {
        var += (b.rowwise() - s.mean.transpose()).array().square().colwise().sum().matrix().transpose();
    }
    var /= static_cast<double>(rows);
    s.sd = var.array().sqrt();
    s.flagged.assign(static_cast<std::size_t>(width), false);
    for (Eigen::Index c = 0; c < width; ++c) {
        if (!(s.sd(c) > 0.0)) {
            s.sd(c) = 1.0;
            s.flagged[static_cast<std::size_t>(c)] = true;
        }
    }
    return s;
}

Standardizer Standardizer::fit_series(const std::vector<Eigen::VectorXd>& series) {
    std::vector<Eigen::MatrixXd> blocks;
    blocks.reserve(series.size());
    for (const auto& v : series) {
        blocks.emplace_back(v);
    }
    return fit(blocks);
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& m) const {
    if (static_cast<std::size_t>(m.cols()) != width()) {
        throw DataError("standardizer width " + std::to_string(width()) + " does not match " +
                        std::to_string(m.cols()) + " columns");
    }
    return ((m.rowwise() - mean.transpose()).array().rowwise() / sd.transpose().array()).matrix();
}

Eigen::MatrixXd Standardizer::invert(const Eigen::MatrixXd& m) const {
    if (static_cast<std::size_t>(m.cols()) != width()) {
        throw DataError("standardizer width " + std::to_string(width()) + " does not match " +
                        std::to_string(m.cols()) + " columns");
    }
    return ((m.array().rowwise() * sd.transpose().array()).matrix().rowwise() + mean.transpose());
}

Eigen::VectorXd Standardizer::apply_series(const Eigen::VectorXd& v) const {
    return apply(Eigen::MatrixXd(v)).col(0);
}

Eigen::VectorXd Standardizer::invert_series(const Eigen::VectorXd& v) const {
    return invert(Eigen::MatrixXd(v)).col(0);
}

Eigen::MatrixXd add_noise(const Eigen::MatrixXd& m, double sd, std::mt19937_64& rng) {
    if (sd == 0.0) {
        return m;
    }
    std::normal_distribution<double> normal(0.0, sd);
    Eigen::MatrixXd out = m;
    double* data = out.data();
    for (Eigen::Index i = 0; i < out.size(); ++i) {
        data[i] += normal(rng);
    }
    return out;
}

// ----------------------------------------------------------------------- Blstm

struct Blstm::DirectionCache {
    Eigen::MatrixXd gates;   // 4H x T, activated: i, f, o, g
    Eigen::MatrixXd cell;    // H x T
    Eigen::MatrixXd tanh_c;  // H x T
    Eigen::MatrixXd hidden;  // H x T
};

Blstm::Blstm(int input_size, std::vector<int> hidden_sizes) : input_size_(input_size), hidden_(std::move(hidden_sizes)) {
    if (input_size_ <= 0 || hidden_.empty()) {
        throw ArgumentError("Blstm needs a positive input size and at least one layer");
    }
    std::size_t offset = 0;
    int inputs = input_size_;
    for (int h : hidden_) {
        if (h <= 0) {
            throw ArgumentError("Blstm hidden sizes must be positive");
        }
        for (int dir = 0; dir < 2; ++dir) {
            DirectionLayout d{};
            d.inputs = inputs;
            d.hidden = h;
            d.wx = offset;
            offset += static_cast<std::size_t>(4 * h) * static_cast<std::size_t>(inputs);
            d.wh = offset;
            offset += static_cast<std::size_t>(4 * h) * static_cast<std::size_t>(h);
            d.b = offset;
            offset += static_cast<std::size_t>(4 * h);
            layout_.push_back(d);
        }
        inputs = 2 * h;
    }
    out_w_ = offset;
    offset += static_cast<std::size_t>(inputs) + 1;
    params_.assign(offset, 0.0);
}

void Blstm::initialize(std::mt19937_64& rng, double range, double forget_bias) {
    std::uniform_real_distribution<double> uniform(-range, range);
    for (double& p : params_) {
        p = uniform(rng);
    }
    for (const auto& d : layout_) {
        for (int k = 0; k < d.hidden; ++k) {
            params_[d.b + static_cast<std::size_t>(d.hidden + k)] = forget_bias;
        }
    }
}

void Blstm::forward_direction(const DirectionLayout& d, const Eigen::MatrixXd& x, bool reverse,
                              DirectionCache& cache) const {
    const int h = d.hidden;
    const Eigen::Index steps = x.cols();
    const ConstMapMat wx(params_.data() + d.wx, 4 * h, d.inputs);
    const ConstMapMat wh(params_.data() + d.wh, 4 * h, h);
    const ConstMapVec b(params_.data() + d.b, 4 * h);

    cache.gates.noalias() = wx * x;
    cache.gates.colwise() += b;
    cache.cell.resize(h, steps);
    cache.tanh_c.resize(h, steps);
    cache.hidden.resize(h, steps);

    Eigen::VectorXd h_prev = Eigen::VectorXd::Zero(h);
    Eigen::VectorXd c_prev = Eigen::VectorXd::Zero(h);
    for (Eigen::Index s = 0; s < steps; ++s) {
        const Eigen::Index t = reverse ? steps - 1 - s : s;
        auto z = cache.gates.col(t);
        z.noalias() += wh * h_prev;
        z.head(3 * h) = z.head(3 * h).array().logistic().matrix();
        z.tail(h) = fast_tanh(z.tail(h).array()).matrix();
        auto c = cache.cell.col(t);
        c = z.segment(h, h).cwiseProduct(c_prev) + z.head(h).cwiseProduct(z.tail(h));
        cache.tanh_c.col(t) = fast_tanh(c.array()).matrix();
        cache.hidden.col(t) = z.segment(2 * h, h).cwiseProduct(cache.tanh_c.col(t));
        h_prev = cache.hidden.col(t);
        c_prev = c;
    }
}

void Blstm::backward_direction(const DirectionLayout& d, const Eigen::MatrixXd& x, bool reverse,
                               const DirectionCache& cache, const Eigen::MatrixXd& d_out, std::span<double> grad,
                               Eigen::MatrixXd* d_input) const {
    const int h = d.hidden;
    const Eigen::Index steps = x.cols();
    const ConstMapMat wx(params_.data() + d.wx, 4 * h, d.inputs);
    const ConstMapMat wh(params_.data() + d.wh, 4 * h, h);
    MapMat g_wx(grad.data() + d.wx, 4 * h, d.inputs);
    MapMat g_wh(grad.data() + d.wh, 4 * h, h);
    MapVec g_b(grad.data() + d.b, 4 * h);

    Eigen::MatrixXd dz(4 * h, steps);
    Eigen::MatrixXd h_prev_all = Eigen::MatrixXd::Zero(h, steps);
    Eigen::VectorXd dh_next = Eigen::VectorXd::Zero(h);
    Eigen::ArrayXd dc_next = Eigen::ArrayXd::Zero(h);
    Eigen::ArrayXd c_prev(h);
    Eigen::ArrayXd dh(h);
    Eigen::ArrayXd dc(h);

    for (Eigen::Index s = steps - 1; s >= 0; --s) {
        const Eigen::Index t = reverse ? steps - 1 - s : s;
        const bool first = s == 0;
        const Eigen::Index t_prev = reverse ? t + 1 : t - 1;
        const auto gates = cache.gates.col(t);
        const auto i = gates.head(h).array();
        const auto f = gates.segment(h, h).array();
        const auto o = gates.segment(2 * h, h).array();
        const auto g = gates.tail(h).array();
        const auto tc = cache.tanh_c.col(t).array();
        if (first) {
            c_prev.setZero();
        } else {
            c_prev = cache.cell.col(t_prev).array();
            h_prev_all.col(t) = cache.hidden.col(t_prev);
        }

        dh = d_out.col(t).array() + dh_next.array();
        dc = dh * o * (1.0 - tc * tc) + dc_next;
        auto dzt = dz.col(t);
        dzt.head(h) = (dc * g * i * (1.0 - i)).matrix();
        dzt.segment(h, h) = (dc * c_prev * f * (1.0 - f)).matrix();
        dzt.segment(2 * h, h) = (dh * tc * o * (1.0 - o)).matrix();
        dzt.tail(h) = (dc * i * (1.0 - g * g)).matrix();

        dh_next.noalias() = wh.transpose() * dzt;
        dc_next = dc * f;
    }

    g_wx.noalias() += dz * x.transpose();
    g_wh.noalias() += dz * h_prev_all.transpose();
    g_b += dz.rowwise().sum();
    if (d_input != nullptr) {
        d_input->noalias() += wx.transpose() * dz;
    }
}

Eigen::VectorXd Blstm::forward(const Eigen::MatrixXd& inputs) const {
    if (inputs.rows() != input_size_) {
        throw DataError("network expects " + std::to_string(input_size_) + " inputs per frame, got " +
                        std::to_string(inputs.rows()));
    }
    Eigen::MatrixXd layer_in = inputs;
    DirectionCache fwd;
    DirectionCache bwd;
    for (std::size_t l = 0; l < hidden_.size(); ++l) {
        forward_direction(layout_[2 * l], layer_in, false, fwd);
        forward_direction(layout_[2 * l + 1], layer_in, true, bwd);
        Eigen::MatrixXd out(2 * hidden_[l], inputs.cols());
        out.topRows(hidden_[l]) = fwd.hidden;
        out.bottomRows(hidden_[l]) = bwd.hidden;
        layer_in = std::move(out);
    }
    const ConstMapVec w(params_.data() + out_w_, layer_in.rows());
    Eigen::VectorXd pred = layer_in.transpose() * w;
    pred.array() += params_.back();
    return pred;
}

double Blstm::loss(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets) const {
    return (forward(inputs) - targets).squaredNorm();
}

double Blstm::loss_and_gradient(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets,
                                std::span<double> gradient) const {
    if (inputs.rows() != input_size_) {
        throw DataError("network expects " + std::to_string(input_size_) + " inputs per frame, got " +
                        std::to_string(inputs.rows()));
    }
    if (targets.size() != inputs.cols()) {
        throw DataError("sequence has " + std::to_string(inputs.cols()) + " frames but " +
                        std::to_string(targets.size()) + " targets");
    }
    if (gradient.size() != params_.size()) {
        throw ArgumentError("gradient buffer size does not match parameter count");
    }
    const std::size_t layers = hidden_.size();
    std::vector<Eigen::MatrixXd> layer_inputs(layers + 1);
    std::vector<DirectionCache> caches(2 * layers);
    layer_inputs[0] = inputs;
    for (std::size_t l = 0; l < layers; ++l) {
        forward_direction(layout_[2 * l], layer_inputs[l], false, caches[2 * l]);
        forward_direction(layout_[2 * l + 1], layer_inputs[l], true, caches[2 * l + 1]);
        Eigen::MatrixXd out(2 * hidden_[l], inputs.cols());
        out.topRows(hidden_[l]) = caches[2 * l].hidden;
        out.bottomRows(hidden_[l]) = caches[2 * l + 1].hidden;
        layer_inputs[l + 1] = std::move(out);
    }
    const Eigen::MatrixXd& top = layer_inputs[layers];
    const ConstMapVec w(params_.data() + out_w_, top.rows());
    Eigen::VectorXd pred = top.transpose() * w;
    pred.array() += params_.back();
    const Eigen::VectorXd err = pred - targets;
    const double loss = err.squaredNorm();

    const Eigen::VectorXd d_pred = 2.0 * err;
    MapVec g_w(gradient.data() + out_w_, top.rows());
    g_w.noalias() += top * d_pred;
    gradient.back() += d_pred.sum();

    Eigen::MatrixXd d_top = w * d_pred.transpose();
    for (std::size_t l = layers; l-- > 0;) {
        const int h = hidden_[l];
        Eigen::MatrixXd d_in;
        Eigen::MatrixXd* d_in_ptr = nullptr;
        if (l > 0) {
            d_in = Eigen::MatrixXd::Zero(layer_inputs[l].rows(), layer_inputs[l].cols());
            d_in_ptr = &d_in;
        }
        const Eigen::MatrixXd d_fwd = d_top.topRows(h);
        const Eigen::MatrixXd d_bwd = d_top.bottomRows(h);
        backward_direction(layout_[2 * l], layer_inputs[l], false, caches[2 * l], d_fwd, gradient, d_in_ptr);
        backward_direction(layout_[2 * l + 1], layer_inputs[l], true, caches[2 * l + 1], d_bwd, gradient, d_in_ptr);
        d_top = std::move(d_in);
    }
    return loss;
}

ParamVector model_gradients(const Blstm& model, const std::vector<Sequence>& batch) {
    ParamVector grad(model.parameter_count(), 0.0);
    for (const auto& s : batch) {
        model.loss_and_gradient(s.inputs, s.targets, grad);
    }
    return grad;
}

// --------------------------------------------------------------- EarlyStopping

bool EarlyStopping::update(double score) {
    ++epoch_;
    if (epoch_ == 1 || score < best_) {
        best_ = score;
        best_epoch_ = epoch_;
        wait_ = 0;
        return true;
    }
    ++wait_;
    return false;
}

// -------------------------------------------------------------------- training

namespace {

double mean_sse(const Blstm& net, const std::vector<Sequence>& seqs) {
    double total = 0.0;
    Eigen::Index frames = 0;
    for (const auto& s : seqs) {
        total += net.loss(s.inputs, s.targets);
        frames += s.targets.size();
    }
    return frames > 0 ? total / static_cast<double>(frames) : 0.0;
}

}  // namespace

TrainedModel train_blstm(const std::vector<Sequence>& train, const std::vector<Sequence>& validation,
                         const ModelConfig& config) {
    config.validate();
    if (train.empty()) {
        throw ArgumentError("train_blstm needs at least one training sequence");
    }
    const auto width = static_cast<int>(train.front().inputs.rows());
    for (const auto* set : {&train, &validation}) {
        for (const auto& s : *set) {
            if (s.inputs.rows() != width) {
                throw DataError("training sequences differ in feature width");
            }
            if (s.inputs.cols() != s.targets.size()) {
                throw DataError("sequence frame count differs from its target count");
            }
        }
    }

    std::mt19937_64 rng(config.seed);
    TrainedModel model;
    model.config = config;
    model.network = Blstm(width, config.hidden_sizes);
    model.network.initialize(rng, config.init_range, config.forget_bias);
    // Identity scaling until the caller installs fitted standardizers.
    model.input_standardizer.mean = Eigen::VectorXd::Zero(width);
    model.input_standardizer.sd = Eigen::VectorXd::Ones(width);
    model.input_standardizer.flagged.assign(static_cast<std::size_t>(width), false);
    model.target_standardizer.mean = Eigen::VectorXd::Zero(1);
    model.target_standardizer.sd = Eigen::VectorXd::Ones(1);
    model.target_standardizer.flagged.assign(1, false);

    ParamVector best_params(model.network.parameters().begin(), model.network.parameters().end());
    ParamVector grad(model.network.parameter_count());
    ParamVector velocity(model.network.parameter_count(), 0.0);
    EarlyStopping stopper(config.patience_epochs);
    Eigen::Index train_frames = 0;
    for (const auto& s : train) {
        train_frames += s.targets.size();
    }

    for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
        double train_loss = 0.0;
        for (const auto& s : train) {
            std::fill(grad.begin(), grad.end(), 0.0);
            const Eigen::MatrixXd noisy = add_noise(s.inputs, config.input_noise_sd, rng);
            train_loss += model.network.loss_and_gradient(noisy, s.targets, grad);
            if (!std::isfinite(train_loss)) {
                throw NumericError("training diverged in epoch " + std::to_string(epoch) + " (loss is not finite)");
            }
            auto params = model.network.parameters();
            if (config.momentum > 0.0) {
                for (std::size_t k = 0; k < params.size(); ++k) {
                    velocity[k] = config.momentum * velocity[k] - config.learning_rate * grad[k];
                    params[k] += velocity[k];
                }
            } else {
                for (std::size_t k = 0; k < params.size(); ++k) {
                    params[k] -= config.learning_rate * grad[k];
                }
            }
        }
        EpochRecord rec;
        rec.epoch = epoch;
        rec.train_sse = train_frames > 0 ? train_loss / static_cast<double>(train_frames) : 0.0;
        rec.val_sse = validation.empty() ? mean_sse(model.network, train) : mean_sse(model.network, validation);
        if (!std::isfinite(rec.val_sse)) {
            throw NumericError("training diverged in epoch " + std::to_string(epoch) + " (validation SSE is not finite)");
        }
        model.history.push_back(rec);
        if (stopper.update(rec.val_sse)) {
            const auto p = model.network.parameters();
            best_params.assign(p.begin(), p.end());
        }
        if (stopper.should_stop()) {
            break;
        }
    }
    std::copy(best_params.begin(), best_params.end(), model.network.parameters().begin());
    model.best_epoch = stopper.best_epoch();
    return model;
}

Eigen::VectorXd predict(const TrainedModel& model, const Eigen::MatrixXd& frames_by_features) {
    if (frames_by_features.cols() != model.network.input_size()) {
        throw DataError("model expects " + std::to_string(model.network.input_size()) + " features, got " +
                        std::to_string(frames_by_features.cols()));
    }
    const Eigen::MatrixXd z = model.input_standardizer.apply(frames_by_features);
    const Eigen::VectorXd out = model.network.forward(z.transpose());
    return model.target_standardizer.invert_series(out);
}

// ----------------------------------------------------------------- checkpoints

namespace {

nlohmann::json standardizer_json(const Standardizer& s) {
    nlohmann::json j;
    j["mean"] = std::vector<double>(s.mean.data(), s.mean.data() + s.mean.size());
    j["sd"] = std::vector<double>(s.sd.data(), s.sd.data() + s.sd.size());
    j["flagged"] = s.flagged;
    return j;
}

Standardizer standardizer_from(const nlohmann::json& j) {
    Standardizer s;
    const auto mean = j.at("mean").get<std::vector<double>>();
    const auto sd = j.at("sd").get<std::vector<double>>();
    if (mean.size() != sd.size()) {
        throw DataError("checkpoint standardizer mean/sd lengths differ");
    }
    s.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(), static_cast<Eigen::Index>(mean.size()));
    s.sd = Eigen::Map<const Eigen::VectorXd>(sd.data(), static_cast<Eigen::Index>(sd.size()));
    s.flagged = j.at("flagged").get<std::vector<bool>>();
    return s;
}

}  // namespace

void save_checkpoint(std::ostream& out, const TrainedModel& model) {
    nlohmann::json j;
    j["format"] = kCheckpointFormat;
    j["version"] = kCheckpointVersion;
    const auto& c = model.config;
    j["config"] = {
        {"hidden_sizes", c.hidden_sizes},   {"learning_rate", c.learning_rate},
        {"momentum", c.momentum},           {"input_noise_sd", c.input_noise_sd},
        {"max_epochs", c.max_epochs},       {"patience_epochs", c.patience_epochs},
        {"seed", c.seed},                   {"init_range", c.init_range},
        {"forget_bias", c.forget_bias},
    };
    j["catalog_hash"] = model.catalog_hash;
    j["input_names"] = model.input_names;
    j["input_standardizer"] = standardizer_json(model.input_standardizer);
    j["target_standardizer"] = standardizer_json(model.target_standardizer);
    j["input_size"] = model.network.input_size();
    j["best_epoch"] = model.best_epoch;
    nlohmann::json hist = nlohmann::json::array();
    for (const auto& h : model.history) {
        hist.push_back({{"epoch", h.epoch}, {"train_sse", h.train_sse}, {"val_sse", h.val_sse}});
    }
    j["history"] = std::move(hist);
    const auto p = model.network.parameters();
    j["parameters"] = std::vector<double>(p.begin(), p.end());
    out << j.dump(1) << '\n';
}

void save_checkpoint_file(const std::string& path, const TrainedModel& model) {
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot write " + path);
    }
    save_checkpoint(out, model);
}

TrainedModel load_checkpoint(std::istream& in, std::uint64_t expected_catalog_hash) {
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("checkpoint is not valid JSON: ") + e.what());
    }
    try {
        if (j.at("format") != kCheckpointFormat) {
            throw DataError("not an eyeaffect checkpoint");
        }
        if (j.at("version").get<int>() != kCheckpointVersion) {
            throw DataError("unsupported checkpoint version " + j.at("version").dump());
        }
        TrainedModel m;
        m.catalog_hash = j.at("catalog_hash").get<std::uint64_t>();
        if (expected_catalog_hash != 0 && m.catalog_hash != expected_catalog_hash) {
            throw DataError("checkpoint was trained on a different feature catalog (hash mismatch)");
        }
        const auto& c = j.at("config");
        m.config.hidden_sizes = c.at("hidden_sizes").get<std::vector<int>>();
        m.config.learning_rate = c.at("learning_rate").get<double>();
        m.config.momentum = c.at("momentum").get<double>();
        m.config.input_noise_sd = c.at("input_noise_sd").get<double>();
        m.config.max_epochs = c.at("max_epochs").get<int>();
        m.config.patience_epochs = c.at("patience_epochs").get<int>();
        m.config.seed = c.at("seed").get<std::uint64_t>();
        m.config.init_range = c.at("init_range").get<double>();
        m.config.forget_bias = c.at("forget_bias").get<double>();
        m.input_names = j.at("input_names").get<std::vector<std::string>>();
        m.input_standardizer = standardizer_from(j.at("input_standardizer"));
        m.target_standardizer = standardizer_from(j.at("target_standardizer"));
        m.best_epoch = j.at("best_epoch").get<int>();
        for (const auto& h : j.at("history")) {
            m.history.push_back({h.at("epoch").get<int>(), h.at("train_sse").get<double>(), h.at("val_sse").get<double>()});
        }
        m.network = Blstm(j.at("input_size").get<int>(), m.config.hidden_sizes);
        const auto params = j.at("parameters").get<std::vector<double>>();
        if (params.size() != m.network.parameter_count()) {
            throw DataError("checkpoint parameter count does not match its architecture");
        }
        std::copy(params.begin(), params.end(), m.network.parameters().begin());
        if (m.input_standardizer.width() != static_cast<std::size_t>(m.network.input_size()) ||
            m.input_names.size() != m.input_standardizer.width()) {
            throw DataError("checkpoint input width is inconsistent");
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed checkpoint: ") + e.what());
    }
}

TrainedModel load_checkpoint_file(const std::string& path, std::uint64_t expected_catalog_hash) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open " + path);
    }
    return load_checkpoint(in, expected_catalog_hash);
}

}  // namespace eyeaffect
