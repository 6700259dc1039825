#include "eyeaffect/error.hpp"
#include "eyeaffect/model.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace eyeaffect;

namespace {

Sequence random_sequence(std::mt19937_64& rng, int inputs, int frames) {
    std::normal_distribution<double> nd(0.0, 1.0);
    Sequence s;
    s.inputs.resize(inputs, frames);
    s.targets.resize(frames);
    for (int t = 0; t < frames; ++t) {
        for (int i = 0; i < inputs; ++i) s.inputs(i, t) = nd(rng);
        s.targets(t) = nd(rng);
    }
    return s;
}

// Summed in extended precision so rounding of the total does not swamp
// small finite differences.
long double loss_of(const Blstm& m, const std::vector<Sequence>& batch) {
    long double l = 0;
    for (const auto& s : batch) {
        const Eigen::VectorXd y = m.forward(s.inputs);
        for (Eigen::Index t = 0; t < y.size(); ++t) {
            const long double r = static_cast<long double>(y(t)) - static_cast<long double>(s.targets(t));
            l += r * r;
        }
    }
    return l;
}

// Central finite differences on `samples` random parameters; returns the
// worst relative error against the analytic gradient.
double gradient_check(Blstm& m, const std::vector<Sequence>& batch, int samples, std::uint64_t seed) {
    const auto grad = model_gradients(m, batch);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, m.parameter_count() - 1);
    const double h = 1e-5;
    double worst = 0;
    auto params = m.parameters();
    for (int k = 0; k < samples; ++k) {
        const std::size_t i = pick(rng);
        const double orig = params[i];
        params[i] = orig + h;
        const long double up = loss_of(m, batch);
        params[i] = orig - h;
        const long double down = loss_of(m, batch);
        params[i] = orig;
        const auto fd = static_cast<double>((up - down) / (2.0L * h));
        const double denom = std::max({std::abs(fd), std::abs(grad[i]), 1e-6});
        worst = std::max(worst, std::abs(fd - grad[i]) / denom);
    }
    return worst;
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("standardizer fit, apply and invert") {
    Eigen::MatrixXd col(3, 2);
    col << 1, 5, 2, 5, 3, 5;
    const auto s = Standardizer::fit({col});
    CHECK(s.mean(0) == doctest::Approx(2.0));
    CHECK(s.sd(0) == doctest::Approx(std::sqrt(2.0 / 3.0)));
    CHECK_FALSE(s.flagged[0]);
    CHECK(s.flagged[1]);
    const auto z = s.apply(col);
    CHECK(z(1, 0) == doctest::Approx(0.0));
    for (int r = 0; r < 3; ++r) CHECK(z(r, 1) == 0.0);
    Eigen::MatrixXd other(2, 2);
    other << -4.5, 1.25, 7.0, 3.0;
    CHECK((s.invert(s.apply(other)) - other).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("input noise") {
    std::mt19937_64 rng(1);
    const Eigen::MatrixXd m = Eigen::MatrixXd::Random(40, 30);
    CHECK(add_noise(m, 0.0, rng) == m);
    std::mt19937_64 r1(5), r2(5);
    CHECK(add_noise(m, 0.1, r1) == add_noise(m, 0.1, r2));

    const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(1000, 1000);
    const Eigen::MatrixXd noisy = add_noise(zero, 0.1, rng);
    const double mean = noisy.mean();
    const double sd = std::sqrt((noisy.array() - mean).square().sum() / static_cast<double>(noisy.size()));
    CHECK(sd >= 0.099);
    CHECK(sd <= 0.101);
}

TEST_CASE("gradient check at init and after ten steps") {
    std::mt19937_64 rng(42);
    Blstm m(6, {5, 4});
    REQUIRE(m.parameter_count() >= 200);
    m.initialize(rng, 0.1, 1.0);
    std::vector<Sequence> batch{random_sequence(rng, 6, 12), random_sequence(rng, 6, 9)};
    CHECK(gradient_check(m, batch, 250, 1) < 1e-4);

    for (int step = 0; step < 10; ++step) {
        const auto g = model_gradients(m, batch);
        auto p = m.parameters();
        for (std::size_t i = 0; i < p.size(); ++i) p[i] -= 1e-3 * g[i];
    }
    CHECK(gradient_check(m, batch, 250, 2) < 1e-4);
}

TEST_CASE("empty batch gives zero gradients") {
    std::mt19937_64 rng(3);
    Blstm m(3, {4, 2});
    m.initialize(rng, 0.1, 1.0);
    const auto g = model_gradients(m, {});
    REQUIRE(g.size() == m.parameter_count());
    for (double x : g) CHECK(x == 0.0);
}

TEST_CASE("output bias gradient is twice the summed residual") {
    std::mt19937_64 rng(9);
    Blstm m(4, {3, 3});
    m.initialize(rng, 0.1, 1.0);
    std::vector<Sequence> batch{random_sequence(rng, 4, 20), random_sequence(rng, 4, 7)};
    double residual = 0;
    for (const auto& s : batch) residual += (m.forward(s.inputs) - s.targets).sum();
    const auto g = model_gradients(m, batch);
    CHECK(g[m.output_bias_index()] == doctest::Approx(2 * residual).epsilon(1e-12));
}

TEST_CASE("early stopping on a worsening validation loss") {
    const int patience = 4;
    EarlyStopping stop(patience);
    int epoch = 0;
    while (!stop.should_stop()) {
        ++epoch;
        stop.update(1.0 + epoch);
    }
    CHECK(epoch == 1 + patience);
    CHECK(stop.best_epoch() == 1);
    CHECK(stop.best_score() == 2.0);
}

TEST_CASE("training restores the best epoch") {
    std::mt19937_64 rng(4);
    std::vector<Sequence> train{random_sequence(rng, 3, 30)}, val{random_sequence(rng, 3, 30)};
    ModelConfig cfg;
    cfg.hidden_sizes = {4, 3};
    cfg.learning_rate = 0.05;
    cfg.max_epochs = 30;
    cfg.patience_epochs = 3;
    const auto model = train_blstm(train, val, cfg);
    double best = 1e300;
    for (const auto& h : model.history) best = std::min(best, h.val_sse);
    REQUIRE(model.best_epoch >= 1);
    CHECK(model.history[static_cast<std::size_t>(model.best_epoch - 1)].val_sse == best);
    const double restored = model.network.loss(val[0].inputs, val[0].targets) / 30.0;
    CHECK(restored == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("overfits a single short sequence") {
    std::mt19937_64 rng(12);
    std::normal_distribution<double> nd(0.0, 1.0);
    Sequence s;
    s.inputs.resize(3, 50);
    s.targets.resize(50);
    for (int t = 0; t < 50; ++t) {
        for (int i = 0; i < 3; ++i) s.inputs(i, t) = nd(rng);
    }
    s.targets = 0.8 * s.inputs.row(1).transpose();
    ModelConfig cfg;
    cfg.learning_rate = 1e-2;
    cfg.input_noise_sd = 0.0;
    cfg.max_epochs = 500;
    cfg.patience_epochs = 500;
    const auto model = train_blstm({s}, {}, cfg);
    CHECK(model.history[static_cast<std::size_t>(model.best_epoch - 1)].train_sse < 0.01);

    Eigen::MatrixXd frames = s.inputs.transpose();
    const Eigen::VectorXd pred = predict(model, frames);
    const Eigen::VectorXd target = s.targets;
    const double pm = pred.mean(), tm = target.mean();
    const double r = ((pred.array() - pm) * (target.array() - tm)).sum() /
                     std::sqrt((pred.array() - pm).square().sum() * (target.array() - tm).square().sum());
    CHECK(r > 0.99);
    CHECK(predict(model, frames) == pred);
}

TEST_CASE("training is deterministic and checkpoints round-trip") {
    std::mt19937_64 rng(6);
    std::vector<Sequence> train{random_sequence(rng, 4, 40), random_sequence(rng, 4, 35)};
    std::vector<Sequence> val{random_sequence(rng, 4, 25)};
    ModelConfig cfg;
    cfg.hidden_sizes = {5, 3};
    cfg.learning_rate = 1e-3;
    cfg.max_epochs = 5;
    cfg.patience_epochs = 5;
    auto a = train_blstm(train, val, cfg);
    auto b = train_blstm(train, val, cfg);
    CHECK(std::equal(a.network.parameters().begin(), a.network.parameters().end(), b.network.parameters().begin()));
    a.catalog_hash = b.catalog_hash = 77;
    a.input_names = b.input_names = {"f0", "f1", "f2", "f3"};
    std::ostringstream sa, sb;
    save_checkpoint(sa, a);
    save_checkpoint(sb, b);
    CHECK(sa.str() == sb.str());

    std::istringstream in(sa.str());
    const auto loaded = load_checkpoint(in, 77);
    std::ostringstream again;
    save_checkpoint(again, loaded);
    CHECK(again.str() == sa.str());
    std::istringstream bad(sa.str());
    CHECK_THROWS_AS(load_checkpoint(bad, 78), DataError);
}

TEST_CASE("argument and shape errors") {
    ModelConfig cfg;
    cfg.patience_epochs = 200;
    CHECK_THROWS_AS(cfg.validate(), ArgumentError);
    CHECK_THROWS_AS(train_blstm({}, {}, ModelConfig{}), ArgumentError);

    std::mt19937_64 rng(2);
    ModelConfig small;
    small.hidden_sizes = {2, 2};
    small.max_epochs = 1;
    small.patience_epochs = 1;
    const auto model = train_blstm({random_sequence(rng, 3, 10)}, {}, small);
    CHECK_THROWS_AS(predict(model, Eigen::MatrixXd::Zero(10, 4)), DataError);
}

TEST_CASE("divergence is reported") {
    std::mt19937_64 rng(2);
    auto s = random_sequence(rng, 3, 20);
    s.targets *= 1e200;
    ModelConfig cfg;
    cfg.hidden_sizes = {2, 2};
    cfg.learning_rate = 1.0;
    cfg.max_epochs = 5;
    cfg.patience_epochs = 5;
    CHECK_THROWS_AS(train_blstm({s}, {}, cfg), NumericError);
}

}  // TEST_SUITE
