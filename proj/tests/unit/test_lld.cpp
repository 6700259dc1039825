#include "eyeaffect/error.hpp"
#include "eyeaffect/lld.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace eyeaffect;

namespace {

std::vector<FrameRecord> frames_from(const std::vector<double>& gx, double pupil = 3.0) {
    std::vector<FrameRecord> out(gx.size());
    for (std::size_t i = 0; i < gx.size(); ++i) {
        out[i].frame_index = static_cast<std::int64_t>(i);
        out[i].timestamp = static_cast<double>(i) / 25.0;
        out[i].gaze_x = gx[i];
        out[i].pupil_diameter = pupil;
    }
    return out;
}

DescriptorSeries numeric_series(std::size_t n) {
    DescriptorSeries s;
    s.gaze_x.assign(n, 0.0);
    s.gaze_y.assign(n, 0.0);
    s.d_gaze_x.assign(n, 0.0);
    s.d_gaze_y.assign(n, 0.0);
    s.pupil_diam.assign(n, 3.0);
    s.d_pupil_diam.assign(n, 0.0);
    s.blink_intensity.assign(n, 0.0);
    return s;
}

using Bits = std::vector<unsigned char>;

}  // namespace

TEST_SUITE("lld") {

TEST_CASE("first differences of gaze") {
    const auto s = derive_numeric_llds(frames_from({0.1, 0.3}));
    REQUIRE(s.d_gaze_x.size() == 2);
    CHECK(s.d_gaze_x[0] == 0.0);
    CHECK(s.d_gaze_x[1] == doctest::Approx(0.2));
}

TEST_CASE("constant pupil gives zero pupil deltas") {
    const auto s = derive_numeric_llds(frames_from(std::vector<double>(10, 0.0), 3.7));
    for (double d : s.d_pupil_diam) {
        CHECK(d == 0.0);
    }
}

TEST_CASE("single frame yields zero deltas") {
    const auto s = derive_numeric_llds(frames_from({0.4}));
    CHECK(s.d_gaze_x == std::vector<double>{0.0});
    CHECK(s.d_gaze_y == std::vector<double>{0.0});
    CHECK(s.d_pupil_diam == std::vector<double>{0.0});
}

TEST_CASE("missing pupil source and frame gaps are rejected") {
    auto f = frames_from({0.0, 0.0});
    f[1].pupil_diameter.reset();
    CHECK_THROWS_AS(derive_numeric_llds(f), DataError);
    auto g = frames_from({0.0, 0.0});
    g[1].frame_index = 5;
    CHECK_THROWS_AS(derive_numeric_llds(g), DataError);
}

TEST_CASE("pupil diameter of a circular ring") {
    std::vector<Point3> pts;
    for (int k = 0; k < 8; ++k) {
        const double a = 2.0 * std::numbers::pi * k / 8.0;
        pts.push_back({10.0 + 1.5 * std::cos(a), -4.0 + 1.5 * std::sin(a), 50.0});
    }
    const std::vector<int> ring{0, 1, 2, 3, 4, 5, 6, 7};
    CHECK(pupil_diameter_from_landmarks(pts, ring) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("coincident ring points give zero") {
    const std::vector<Point3> pts(8, Point3{1.0, 2.0, 3.0});
    const std::vector<int> ring{0, 1, 2, 3, 4, 5, 6, 7};
    CHECK(pupil_diameter_from_landmarks(pts, ring) == doctest::Approx(0.0));
}

TEST_CASE("pupil diameter of an elliptical ring matches direct computation") {
    std::vector<Point3> pts;
    for (int k = 0; k < 8; ++k) {
        const double a = 2.0 * std::numbers::pi * k / 8.0;
        pts.push_back({1.0 * std::cos(a), 2.0 * std::sin(a), 0.0});
    }
    // Symmetric ring: centroid at the origin, so the oracle is 2 * mean radius.
    double sum = 0.0;
    for (const auto& p : pts) {
        sum += std::hypot(p.x, p.y);
    }
    const double expected = 2.0 * sum / 8.0;
    const std::vector<int> ring{0, 1, 2, 3, 4, 5, 6, 7};
    CHECK(pupil_diameter_from_landmarks(pts, ring) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("ring needs three valid points") {
    const std::vector<Point3> pts(8);
    CHECK_THROWS_AS(pupil_diameter_from_landmarks(pts, std::vector<int>{0, 1}), DataError);
    CHECK_THROWS_AS(pupil_diameter_from_landmarks(pts, std::vector<int>{0, 1, 9}), DataError);
}

TEST_CASE("landmark ring is used when no pupil column exists") {
    auto f = frames_from({0.0, 0.0});
    for (auto& r : f) {
        r.pupil_diameter.reset();
        for (int k = 0; k < 8; ++k) {
            const double a = 2.0 * std::numbers::pi * k / 8.0;
            r.eye_landmarks.push_back({2.0 * std::cos(a), 2.0 * std::sin(a), 0.0});
        }
    }
    const auto s = derive_numeric_llds(f);
    CHECK(s.pupil_diam[1] == doctest::Approx(4.0));
}

TEST_CASE("eye closure threshold") {
    auto s = numeric_series(3);
    s.blink_intensity = {0.0, 2.0, 0.0};
    derive_binary_llds(s, ThresholdConfig{});
    CHECK(s.eye_closure == Bits{0, 1, 0});
}

TEST_CASE("pupil dilation and constriction") {
    auto s = numeric_series(3);
    s.d_pupil_diam = {0.0, 0.05, -0.05};
    derive_binary_llds(s, ThresholdConfig{});
    CHECK(s.pupil_dilation == Bits{0, 1, 0});
    CHECK(s.pupil_constriction == Bits{0, 0, 1});
}

TEST_CASE("gaze approach compares successive norms") {
    auto s = numeric_series(3);
    s.gaze_x = {0.3, 0.2, 0.25};
    ThresholdConfig cfg;
    cfg.approach_epsilon = 0.0;
    derive_binary_llds(s, cfg);
    CHECK(s.gaze_approach == Bits{0, 1, 0});
}

TEST_CASE("direct gaze copies coder input or falls back to the angle heuristic") {
    auto s = numeric_series(3);
    s.gaze_x = {0.0, 0.5, 0.01};
    derive_binary_llds(s, ThresholdConfig{}, Bits{1, 1, 0});
    CHECK(s.direct_gaze == Bits{1, 1, 0});
    CHECK_FALSE(s.direct_gaze_heuristic);
    derive_binary_llds(s, ThresholdConfig{});
    CHECK(s.direct_gaze == Bits{1, 0, 1});
    CHECK(s.direct_gaze_heuristic);
    CHECK_THROWS(derive_binary_llds(s, ThresholdConfig{}, Bits{1}));
}

TEST_CASE("dilation and constriction are mutually exclusive") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> nd(0.0, 0.05);
    auto s = numeric_series(2000);
    for (auto& d : s.d_pupil_diam) {
        d = nd(rng);
    }
    for (double delta : {0.0, 0.005, 0.02, 0.1}) {
        ThresholdConfig cfg;
        cfg.pupil_delta = delta;
        derive_binary_llds(s, cfg);
        for (std::size_t t = 0; t < s.size(); ++t) {
            CHECK_FALSE((s.pupil_dilation[t] && s.pupil_constriction[t]));
        }
    }
}

TEST_CASE("fixation is homogeneous under gaze scaling") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> nd(0.0, 0.004);
    auto s = numeric_series(1000);
    for (std::size_t t = 0; t < s.size(); ++t) {
        s.d_gaze_x[t] = nd(rng);
        s.d_gaze_y[t] = nd(rng);
    }
    ThresholdConfig cfg;
    derive_binary_llds(s, cfg);
    const Bits base = s.eyes_fixated;
    for (double k : {0.5, 3.0, 10.0}) {
        auto scaled = s;
        for (std::size_t t = 0; t < s.size(); ++t) {
            scaled.d_gaze_x[t] *= k;
            scaled.d_gaze_y[t] *= k;
        }
        ThresholdConfig c2 = cfg;
        c2.fixation_threshold *= k;
        derive_binary_llds(scaled, c2);
        CHECK(scaled.eyes_fixated == base);
    }
}

TEST_CASE("binary derivation is idempotent") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd(0.0, 0.1);
    auto s = numeric_series(500);
    for (std::size_t t = 0; t < s.size(); ++t) {
        s.gaze_x[t] = nd(rng);
        s.gaze_y[t] = nd(rng);
        s.d_gaze_x[t] = nd(rng) * 0.05;
        s.d_pupil_diam[t] = nd(rng) * 0.1;
        s.blink_intensity[t] = std::abs(nd(rng)) * 10.0;
    }
    derive_binary_llds(s, ThresholdConfig{});
    const auto once = s;
    derive_binary_llds(s, ThresholdConfig{});
    CHECK(s.eye_closure == once.eye_closure);
    CHECK(s.gaze_approach == once.gaze_approach);
    CHECK(s.eyes_fixated == once.eyes_fixated);
    CHECK(s.direct_gaze == once.direct_gaze);
    CHECK(s.pupil_dilation == once.pupil_dilation);
    CHECK(s.pupil_constriction == once.pupil_constriction);
}

TEST_CASE("truncate shortens every channel") {
    auto s = derive_llds(frames_from({0.1, 0.2, 0.3, 0.4}), ThresholdConfig{});
    truncate(s, 2);
    CHECK(s.size() == 2);
    CHECK(s.pupil_constriction.size() == 2);
    CHECK(s.d_pupil_diam.size() == 2);
}

}  // TEST_SUITE
