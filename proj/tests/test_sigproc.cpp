#include <cmath>
#include <numbers>
#include <numeric>

#include "doctest.h"
#include "snloc/distfit.hpp"
#include "snloc/fir.hpp"
#include "snloc/random.hpp"
#include "snloc/sigproc.hpp"

using namespace snloc;

namespace {

double variance(const std::vector<double>& v) {
    const double m = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / v.size();
}

} // namespace

TEST_CASE("filter spec: validation") {
    FilterSpec s;
    CHECK_NOTHROW(s.validate());
    s.order = 241;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s.order = 242;
    s.stopband_edge = 0.03; // below passband
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s.stopband_edge = 6.0; // above Nyquist
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("filter: order zero is the identity") {
    FilterSpec s;
    s.order = 0;
    const FirFilter f = design_fir(s);
    CHECK(f.taps == std::vector<double>{1.0});
    const std::vector<double> x = {1.0, 2.0, 3.0};
    CHECK(apply_fir(f, x) == x);
}

TEST_CASE("filter: moderate-order design meets its own ripple bound") {
    FilterSpec s;
    s.passband_edge = 1.0;
    s.stopband_edge = 1.5;
    s.order = 40;
    const FirFilter f = design_fir(s);
    REQUIRE(f.taps.size() == 41);
    for (int k = 0; k <= 40; ++k) CHECK(f.taps[k] == f.taps[40 - k]);
    CHECK(f.ripple > 0.0);
    CHECK(f.ripple < 0.2);
    for (int k = 0; k <= 400; ++k) {
        const double fr = 0.5 * k / 400.0;
        const double a = f.amplitude(fr);
        if (fr <= 0.1) CHECK(std::fabs(a - 1.0) <= f.ripple * 1.01);
        if (fr >= 0.15) CHECK(std::fabs(a) <= f.ripple * 1.01);
    }
}

TEST_CASE("filter: the 242-tap narrowband design is equiripple") {
    const FirFilter f = design_fir(FilterSpec{}); // 0.04 / 0.09 Hz at 10 Hz
    REQUIRE(f.taps.size() == 243);
    for (int k = 0; k <= 242; ++k) CHECK(f.taps[k] == f.taps[242 - k]);
    CHECK(std::fabs(f.amplitude(0.0) - 1.0) <= f.ripple * 1.01);

    // dense sweep of both bands against the returned deviation
    const double fp = 0.004, fs = 0.009;
    double worst_pass = 0.0, worst_stop = 0.0;
    for (int k = 0; k < 4096; ++k) {
        const double fr = 0.5 * k / 4095.0;
        const double a = f.amplitude(fr);
        if (fr <= fp) worst_pass = std::max(worst_pass, std::fabs(a - 1.0));
        if (fr >= fs) worst_stop = std::max(worst_stop, std::fabs(a));
    }
    CHECK(worst_pass <= f.ripple * 1.01);
    CHECK(worst_stop <= f.ripple * 1.01);
    CHECK(worst_stop > f.ripple * 0.9); // the bound is tight, not slack
}

TEST_CASE("filter: order predictor is consistent with the achieved ripple") {
    const FirFilter f = design_fir(FilterSpec{});
    const int predicted = estimate_fir_order(0.04, 0.09, 10.0, f.ripple, f.ripple);
    CHECK(predicted > 180);
    CHECK(predicted < 300);
    CHECK(predicted % 2 == 0);
    CHECK_THROWS_AS(estimate_fir_order(0.09, 0.04, 10.0, 0.01, 0.01), std::invalid_argument);
}

TEST_CASE("apply: group delay is compensated for in-band content") {
    const FirFilter f = design_fir(FilterSpec{});
    const int n = 4096;
    std::vector<double> x(n);
    // 0.01 Hz at 10 Hz sampling sits deep in the passband
    for (int k = 0; k < n; ++k) x[k] = std::sin(2.0 * std::numbers::pi * 0.001 * k);
    const auto y = apply_fir(f, x);
    for (int k = 500; k < n - 500; ++k) // skip edge transients
        CHECK(y[k] == doctest::Approx(x[k]).epsilon(0.1).scale(1.0));
}

TEST_CASE("apply: stopband sinusoid is attenuated to the ripple floor") {
    const FirFilter f = design_fir(FilterSpec{});
    const int n = 4096;
    std::vector<double> x(n);
    for (int k = 0; k < n; ++k) x[k] = std::sin(2.0 * std::numbers::pi * 0.05 * k); // 0.5 Hz
    const auto y = apply_fir(f, x);
    double in = 0.0, out = 0.0;
    for (int k = 300; k < n - 300; ++k) {
        in += x[k] * x[k];
        out += y[k] * y[k];
    }
    CHECK(std::sqrt(out / in) <= f.ripple * 1.5);
}

TEST_CASE("extract: g = x_f + w holds exactly") {
    Rng rng(17);
    Trace tr;
    tr.node = {1, 2};
    tr.sample_rate = 10.0;
    tr.samples.resize(3000);
    for (std::size_t k = 0; k < tr.samples.size(); ++k)
        tr.samples[k] = 0.1 + 0.01 * rng.normal();
    const FirFilter f = design_fir(FilterSpec{});
    const NoiseExtraction ex = extract_noise(tr, 50, f);
    REQUIRE(ex.noise.size() == tr.samples.size());
    for (std::size_t k = 0; k < tr.samples.size(); ++k) {
        CHECK(ex.non_offset[k] == doctest::Approx(tr.samples[k] - ex.rho_o).epsilon(1e-15));
        CHECK(ex.filtered[k] + ex.noise[k] == doctest::Approx(ex.non_offset[k]).epsilon(1e-12));
    }
}

TEST_CASE("extract: constant trace yields zero noise") {
    Trace tr;
    tr.sample_rate = 10.0;
    tr.samples.assign(2000, 0.1);
    const FirFilter f = design_fir(FilterSpec{});
    const NoiseExtraction ex = extract_noise(tr, 50, f);
    // offset removal zeroes the signal; edges included
    for (double w : ex.noise) CHECK(std::fabs(w) < 1e-12);
    Trace tiny;
    tiny.samples.assign(100, 0.1);
    CHECK_THROWS_AS(extract_noise(tiny, 50, f), std::invalid_argument);
}

TEST_CASE("extract: recovers the variance of injected wideband noise") {
    // Student's t with finite variance on top of a slow in-band drift: the
    // 0.04 Hz low-pass keeps the drift in x_f and pushes the noise into w.
    const auto noise = sample_student_t(5.0, 0.01, 6000, 23);
    Trace tr;
    tr.sample_rate = 10.0;
    tr.samples.resize(noise.size());
    for (std::size_t k = 0; k < noise.size(); ++k) {
        const double t = (k + 1) / 10.0;
        tr.samples[k] = 0.1 + 0.05 * std::sin(2.0 * std::numbers::pi * 0.005 * t) + noise[k];
    }
    const FirFilter f = design_fir(FilterSpec{});
    const NoiseExtraction ex = extract_noise(tr, 50, f);
    std::vector<double> mid(ex.noise.begin() + 300, ex.noise.end() - 300);
    std::vector<double> injected(noise.begin() + 300, noise.end() - 300);
    CHECK(variance(mid) == doctest::Approx(variance(injected)).epsilon(0.10));
}

TEST_CASE("window: first half of a long trace") {
    Trace tr;
    tr.sample_rate = 10.0;
    tr.samples.resize(1800);
    std::iota(tr.samples.begin(), tr.samples.end(), 0.0);
    const Trace half = first_half_window(tr);
    REQUIRE(half.samples.size() == 900);
    CHECK(half.samples.front() == 0.0);
    CHECK(half.samples.back() == 899.0);
    Trace exact;
    exact.sample_rate = 10.0;
    exact.samples.resize(900);
    CHECK(first_half_window(exact).samples.size() == 900);
    Trace small;
    small.sample_rate = 10.0;
    small.samples.resize(899);
    CHECK_THROWS_AS(first_half_window(small), std::invalid_argument);
}

TEST_CASE("pdf: reference values and normalization") {
    // nu = 1 scaled t is the Cauchy density
    CHECK(pdf_student_t(0.0, 1.0, 1.0) == doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-12));
    CHECK(pdf_student_t(0.0, 1.0, 2.0) ==
          doctest::Approx(0.5 / std::numbers::pi).epsilon(1e-12));
    // log-normal mode value at x = exp(mu)
    CHECK(pdf_log_normal(1.0, 0.0, 1.0) ==
          doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-12));
    CHECK(pdf_log_normal(-1.0, 0.0, 1.0) == 0.0);
    // shape-1 Weibull is the exponential
    CHECK(pdf_weibull(0.0, 1.0, 2.0) == doctest::Approx(0.5));
    CHECK(pdf_weibull(2.0, 1.0, 2.0) == doctest::Approx(0.5 * std::exp(-1.0)).epsilon(1e-12));
    // inverse Gaussian integrates to one
    double integral = 0.0;
    const double dx = 1e-3;
    for (double x = dx / 2; x < 40.0; x += dx) integral += pdf_inverse_gaussian(x, 1.0, 2.0) * dx;
    CHECK(integral == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("histogram: density over the trimmed support") {
    const auto samples = sample_student_t(1.43, 0.005, 50000, 31);
    const Histogram h = build_histogram(samples);
    REQUIRE(h.centers.size() >= 10);
    double integral = 0.0;
    for (double v : h.heights) integral += v * h.bin_width;
    CHECK(integral > 0.95); // trimming drops only the extreme tails
    CHECK(integral <= 1.0 + 1e-9);
    CHECK_THROWS_AS(build_histogram(std::vector<double>(50, 1.0)), std::invalid_argument);
    CHECK_THROWS_AS(build_histogram(samples, 5), std::invalid_argument);
    CHECK_THROWS_AS(build_histogram(std::vector<double>(200, 1.0)), std::invalid_argument);
}

TEST_CASE("fit: recovers heavy-tailed t parameters from samples") {
    const auto samples = sample_student_t(1.43, 0.005, 100000, 41);
    const DistributionFit fit = fit_distribution(samples, DistFamily::student_t);
    CHECK(fit.params[0] == doctest::Approx(1.43).epsilon(0.10));
    CHECK(fit.params[1] == doctest::Approx(0.005).epsilon(0.10));
}

TEST_CASE("fit: recovers log-normal parameters from samples") {
    const auto samples = sample_lognormal(-3.0554, 2.0888, 100000, 42);
    const DistributionFit fit = fit_distribution(samples, DistFamily::log_normal);
    CHECK(fit.params[0] == doctest::Approx(-3.0554).epsilon(0.05));
    CHECK(fit.params[1] == doctest::Approx(2.0888).epsilon(0.05));
}

TEST_CASE("fit: the generating family wins the MSE comparison") {
    const auto samples = sample_lognormal(-3.0554, 2.0888, 100000, 43);
    const double mse_ln = fit_distribution(samples, DistFamily::log_normal).mse;
    const double mse_wb = fit_distribution(samples, DistFamily::weibull).mse;
    const double mse_ig = fit_distribution(samples, DistFamily::inverse_gaussian).mse;
    CHECK(mse_ln < mse_wb);
    CHECK(mse_ln < mse_ig);
}
