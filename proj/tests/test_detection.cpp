#include <cmath>

#include "doctest.h"
#include "snloc/detection.hpp"
#include "snloc/random.hpp"

using namespace snloc;

namespace {

Trace make_trace(std::vector<double> samples, double rate = 10.0) {
    Trace t;
    t.node = {1, 1};
    t.samples = std::move(samples);
    t.sample_rate = rate;
    return t;
}

// First p samples alternate 0 and 0.2 (mean 0.1), then hold 0.2: the
// offset-removed signal has g^2 = 0.01 at every sample from the start.
Trace alternating_step_trace(std::size_t n, int p = 50) {
    std::vector<double> s(n, 0.2);
    for (int k = 0; k < p; k += 2) s[k] = 0.0;
    return make_trace(std::move(s));
}

} // namespace

TEST_CASE("offset: mean of the first p samples") {
    const Trace t = make_trace(std::vector<double>(100, 0.37));
    CHECK(estimate_offset(t, 50) == doctest::Approx(0.37).epsilon(1e-15));
    std::vector<double> alt(60);
    for (std::size_t k = 0; k < alt.size(); ++k) alt[k] = k % 2 == 0 ? 0.0 : 0.2;
    CHECK(estimate_offset(make_trace(std::move(alt)), 50) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK_THROWS_AS(estimate_offset(t, 101), std::invalid_argument);
    CHECK_THROWS_AS(estimate_offset(t, 0), std::invalid_argument);
}

TEST_CASE("moving average: constants and identity window") {
    const std::vector<double> c(20, 1.5);
    CHECK(moving_average(c, 7) == c);
    std::vector<double> x = {1.0, -2.0, 3.0, 0.5};
    CHECK(moving_average(x, 1) == x);
    CHECK_THROWS_AS(moving_average(x, 0), std::invalid_argument);
}

TEST_CASE("moving average: unit step ramps over exactly L samples") {
    std::vector<double> x(20, 0.0);
    for (std::size_t k = 5; k < x.size(); ++k) x[k] = 1.0;
    const auto y = moving_average(x, 7);
    CHECK(y[4] == doctest::Approx(0.0));
    for (int k = 0; k < 7; ++k)
        CHECK(y[5 + k] == doctest::Approx((k + 1) / 7.0).epsilon(1e-12));
    CHECK(y[12] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("amplitude detection: flat trace never crosses") {
    DetectionConfig cfg;
    cfg.scheme = DetectionScheme::amplitude;
    const auto res = amplitude_detect(make_trace(std::vector<double>(200, 0.1)), cfg);
    CHECK_FALSE(res.detected);
    CHECK(res.rho_o == doctest::Approx(0.1));
}

TEST_CASE("amplitude detection: step crossing with and without smoothing") {
    std::vector<double> s(200, 0.1);
    for (std::size_t k = 99; k < s.size(); ++k) s[k] = 0.2; // step at t = 10.0 s
    DetectionConfig cfg;
    cfg.scheme = DetectionScheme::amplitude;
    cfg.amplitude_threshold = 0.05;

    cfg.window = 1;
    auto res = amplitude_detect(make_trace(s), cfg);
    CHECK(res.detected);
    CHECK(res.t == doctest::Approx(10.0));
    CHECK(res.gamma == doctest::Approx(0.15));
    CHECK(res.rho_o == doctest::Approx(0.1));

    // L = 7 smoothing delays the crossing: mean reaches 0.15 once 4 of the 7
    // window samples sit on the step, i.e. 3 samples later
    cfg.window = 7;
    res = amplitude_detect(make_trace(s), cfg);
    CHECK(res.detected);
    CHECK(res.t == doctest::Approx(10.3));
}

TEST_CASE("amplitude detection: zero threshold fires immediately on a flat trace") {
    DetectionConfig cfg;
    cfg.scheme = DetectionScheme::amplitude;
    cfg.amplitude_threshold = 0.0;
    const auto res = amplitude_detect(make_trace(std::vector<double>(100, 0.1)), cfg);
    CHECK(res.detected);
    CHECK(res.t == doctest::Approx(0.1)); // first sample, 1-based time convention
}

TEST_CASE("energy detection: offset-only trace accumulates nothing") {
    DetectionConfig cfg;
    const auto res = energy_detect(make_trace(std::vector<double>(500, 0.1)), cfg);
    CHECK_FALSE(res.detected);
}

TEST_CASE("energy detection: 1 uJ per sample reaches 4.3 mJ at exactly 430 s") {
    // g = +/-0.1 V into 1 kOhm at 10 Hz -> dt * g^2 / R = 1e-6 J per sample
    const Trace t = alternating_step_trace(5000);
    DetectionConfig cfg; // defaults: lambda = 4.3e-3 J, R_l = 1 kOhm
    const auto res = energy_detect(t, cfg);
    CHECK(res.detected);
    CHECK(res.t == doctest::Approx(430.0).epsilon(1e-12));
    CHECK(res.gamma == doctest::Approx(0.2));
    CHECK(res.rho_o == doctest::Approx(0.1));
}

TEST_CASE("energy detection: threshold scales the crossing sample linearly") {
    const Trace t = alternating_step_trace(5000);
    DetectionConfig cfg;
    for (double lambda : {1e-6, 1e-4, 2.5e-3}) {
        cfg.energy_threshold = lambda;
        const auto res = energy_detect(t, cfg);
        CHECK(res.detected);
        CHECK(res.t == doctest::Approx(std::ceil(lambda / 1e-6) / 10.0).epsilon(1e-12));
    }
}

TEST_CASE("energy detection: higher threshold never detects earlier") {
    Rng rng(321);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> s(400);
        double level = 0.1;
        for (double& v : s) {
            level += 0.002 * rng.normal();
            v = std::max(0.0, level + 0.01 * rng.normal());
        }
        const Trace t = make_trace(std::move(s));
        DetectionConfig cfg;
        double prev_t = 0.0;
        bool prev_detected = true;
        for (int k = 0; k <= 15; ++k) {
            cfg.energy_threshold = 1e-6 * k;
            const auto res = energy_detect(t, cfg);
            if (prev_detected) {
                if (res.detected) CHECK(res.t >= prev_t);
            } else {
                CHECK_FALSE(res.detected); // once lost, larger thresholds stay lost
            }
            prev_t = res.t;
            prev_detected = res.detected;
        }
    }
}

TEST_CASE("amplitude detection: higher threshold never detects earlier") {
    Rng rng(654);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> s(400);
        for (std::size_t k = 0; k < s.size(); ++k)
            s[k] = 0.1 + (k > 100 ? 0.002 * (k - 100) : 0.0) + 0.005 * rng.normal();
        const Trace t = make_trace(std::move(s));
        DetectionConfig cfg;
        cfg.scheme = DetectionScheme::amplitude;
        double prev_t = 0.0;
        bool prev_detected = true;
        for (int k = 0; k <= 15; ++k) {
            cfg.amplitude_threshold = 0.01 * k;
            const auto res = amplitude_detect(t, cfg);
            if (prev_detected && res.detected) CHECK(res.t >= prev_t);
            if (!prev_detected) CHECK_FALSE(res.detected);
            prev_t = res.t;
            prev_detected = res.detected;
        }
    }
}

TEST_CASE("detection: invariant under a constant baseline shift") {
    std::vector<double> s(300, 0.1);
    for (std::size_t k = 120; k < 180; ++k) s[k] = 0.1 + 0.3 * std::sin((k - 120) * 0.05);
    const Trace t0 = make_trace(s);
    for (double& v : s) v += 0.8;
    const Trace t1 = make_trace(s);

    DetectionConfig cfg;
    auto e0 = energy_detect(t0, cfg);
    auto e1 = energy_detect(t1, cfg);
    CHECK(e0.detected == e1.detected);
    CHECK(e0.t == doctest::Approx(e1.t));
    CHECK(e1.rho_o == doctest::Approx(e0.rho_o + 0.8));

    cfg.scheme = DetectionScheme::amplitude;
    auto a0 = amplitude_detect(t0, cfg);
    auto a1 = amplitude_detect(t1, cfg);
    CHECK(a0.detected == a1.detected);
    CHECK(a0.t == doctest::Approx(a1.t));
    CHECK(a1.gamma == doctest::Approx(a0.gamma + 0.8));
}

TEST_CASE("detect: dispatches on the configured scheme") {
    const Trace t = alternating_step_trace(5000);
    DetectionConfig cfg;
    cfg.scheme = DetectionScheme::energy;
    CHECK(detect(t, cfg).t == doctest::Approx(430.0));
    cfg.scheme = DetectionScheme::amplitude;
    cfg.window = 1;
    CHECK(detect(t, cfg).t == doctest::Approx(0.2)); // first 0.2 V sample is index 1
}
