#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "myosynth/signal.hpp"

#include "test_util.hpp"

#include <cmath>

using namespace myo;
using test::random_matrix;

namespace {

SampledSignal make_signal(const Matrix& samples, double rate_hz) {
    SampledSignal s;
    s.samples = samples;
    s.rate_hz = rate_hz;
    return s;
}

// Straightforward re-statement of the envelope definition: for each output
// time, take the RMS of every input sample whose timestamp lies inside the
// centered window, truncated at the signal edges.
SampledSignal rms_envelope_oracle(const SampledSignal& in, double window_ms, double out_rate) {
    const double w = window_ms / 1000.0;
    const int n_out = static_cast<int>(std::floor(in.duration_s() * out_rate + 1e-9)) + 1;
    SampledSignal out;
    out.rate_hz = out_rate;
    out.samples.resize(n_out, in.channels());
    for (int j = 0; j < n_out; ++j) {
        const double tc = j / out_rate;
        for (int c = 0; c < in.channels(); ++c) {
            double ss = 0.0;
            int count = 0;
            for (int i = 0; i < in.length(); ++i) {
                const double pos = i - tc * in.rate_hz;  // samples from window center
                if (pos >= -w / 2.0 * in.rate_hz - 1e-9 && pos <= w / 2.0 * in.rate_hz + 1e-9) {
                    ss += in.samples(i, c) * in.samples(i, c);
                    ++count;
                }
            }
            REQUIRE(count > 0);
            out.samples(j, c) = std::sqrt(ss / count);
        }
    }
    return out;
}

}  // namespace

TEST_CASE("baseline correction removes the rest-window mean per channel") {
    Rng rng(1);
    SampledSignal s = make_signal(random_matrix(rng, 100, 3, -2.0, 5.0), 100.0);
    std::vector<bool> mask(100, false);
    for (int i = 0; i < 30; ++i) mask[i] = true;

    SampledSignal out = baseline_correct(s, mask);
    for (int c = 0; c < 3; ++c) {
        double rest_mean = 0.0;
        for (int i = 0; i < 30; ++i) rest_mean += out.samples(i, c);
        CHECK(std::abs(rest_mean / 30.0) < 1e-12);
        // Shift only: sample-to-sample differences are untouched.
        CHECK(std::abs((out.samples(50, c) - out.samples(10, c)) -
                       (s.samples(50, c) - s.samples(10, c))) < 1e-12);
    }
    CHECK_THROWS_AS(baseline_correct(s, std::vector<bool>(100, false)), ValidationError);
    CHECK_THROWS_AS(baseline_correct(s, std::vector<bool>(99, true)), ValidationError);
}

TEST_CASE("outlier removal replaces spikes and leaves clean samples alone") {
    const int n = 300;
    Matrix m(n, 2);
    for (int i = 0; i < n; ++i) {
        m(i, 0) = std::sin(0.05 * i);
        m(i, 1) = 0.3 * std::cos(0.11 * i);
    }
    const double true_val = m(50, 0);
    m(50, 0) = 500.0;  // far beyond 6 sigma
    SampledSignal s = make_signal(m, 200.0);

    SampledSignal out = remove_outliers(s, 6.0);
    CHECK(std::abs(out.samples(50, 0) - true_val) < 0.05);
    for (int i = 0; i < n; ++i) {
        if (i != 50) CHECK(out.samples(i, 0) == m(i, 0));
        CHECK(out.samples(i, 1) == m(i, 1));
    }
}

TEST_CASE("outlier removal interpolates a run through its clean neighbours") {
    // The run must stay under ~2.7% of the samples, or it inflates the standard
    // deviation enough to hide itself from a 6-sigma threshold.
    const int n = 300;
    Matrix m(n, 1);
    for (int i = 0; i < n; ++i) m(i, 0) = 0.001 * i;  // line: cubic fit is exact
    for (int i = 40; i <= 43; ++i) m(i, 0) = 1000.0;
    SampledSignal out = remove_outliers(make_signal(m, 100.0), 6.0);
    for (int i = 40; i <= 43; ++i) CHECK(std::abs(out.samples(i, 0) - 0.001 * i) < 1e-9);
}

TEST_CASE("a mostly-outlier channel is rejected as unusable") {
    Rng rng(7);
    // With a tiny threshold most samples are flagged, tripping the 50% cap.
    SampledSignal s = make_signal(random_matrix(rng, 64, 1), 100.0);
    CHECK_THROWS_WITH_AS(remove_outliers(s, 0.1), "channel unusable", ValidationError);
}

TEST_CASE("RMS envelope matches the brute-force definition") {
    Rng rng(2);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 300 + static_cast<int>(rng.index(400));
        SampledSignal s = make_signal(random_matrix(rng, n, 2, -3.0, 3.0), 2222.0);
        SampledSignal fast = rms_envelope(s, 200.0, 60.0);
        SampledSignal slow = rms_envelope_oracle(s, 200.0, 60.0);
        REQUIRE(fast.length() == slow.length());
        CHECK(test::max_abs_diff(fast.samples, slow.samples) < 1e-12);
        CHECK(fast.rate_hz == 60.0);
    }
}

TEST_CASE("RMS envelope of a constant signal is its magnitude") {
    Matrix m = Matrix::Constant(2222, 1, -0.75);
    SampledSignal out = rms_envelope(make_signal(m, 2222.0), 200.0, 60.0);
    // duration_s = (2222 - 1) / 2222 s, just under a second -> 60 grid points.
    CHECK(out.length() == 60);
    for (int i = 0; i < out.length(); ++i) CHECK(std::abs(out.samples(i, 0) - 0.75) < 1e-12);
}

TEST_CASE("RMS envelope argument validation") {
    Rng rng(3);
    SampledSignal s = make_signal(random_matrix(rng, 100, 1), 100.0);
    CHECK_THROWS_AS(rms_envelope(s, 200.0, 200.0), ValidationError);  // upsampling
    CHECK_THROWS_AS(rms_envelope(s, 1.0, 60.0), ValidationError);     // sub-sample window
}

TEST_CASE("Savitzky-Golay smoothing reproduces cubics exactly, edges included") {
    const int n = 120;
    Matrix m(n, 1);
    for (int i = 0; i < n; ++i) {
        const double x = i * 0.05;
        m(i, 0) = 1.0 - 2.0 * x + 0.3 * x * x - 0.01 * x * x * x;
    }
    SampledSignal out = savgol_smooth(make_signal(m, 60.0), 3, 31);
    CHECK(test::max_abs_diff(out.samples, m) < 1e-8);
}

TEST_CASE("Savitzky-Golay smoothing attenuates noise around a slow trend") {
    Rng rng(4);
    const int n = 600;
    Matrix clean(n, 1), noisy(n, 1);
    for (int i = 0; i < n; ++i) {
        clean(i, 0) = std::sin(0.01 * i);
        noisy(i, 0) = clean(i, 0) + 0.2 * rng.normal();
    }
    SampledSignal out = savgol_smooth(make_signal(noisy, 60.0), 3, 31);
    const double err_before = (noisy - clean).squaredNorm();
    const double err_after = (out.samples - clean).squaredNorm();
    CHECK(err_after < 0.3 * err_before);
}

TEST_CASE("forward difference of a ramp is constant, with the last value repeated") {
    Matrix m(10, 1);
    for (int i = 0; i < 10; ++i) m(i, 0) = 3.0 * i;
    SampledSignal out = forward_difference(make_signal(m, 60.0));
    REQUIRE(out.length() == 10);
    for (int i = 0; i < 10; ++i) CHECK(out.samples(i, 0) == 3.0);
}

TEST_CASE("normalization maps the fitted range onto the target interval") {
    Rng rng(5);
    Matrix a = random_matrix(rng, 50, 3, -4.0, 2.0);
    Matrix b = random_matrix(rng, 70, 3, -1.0, 6.0);
    NormalizationParams p = fit_normalization(std::vector<Matrix>{a, b}, -1.0, 1.0);

    Matrix na = apply_normalization(a, p);
    Matrix nb = apply_normalization(b, p);
    for (int c = 0; c < 3; ++c) {
        const double lo = std::min(na.col(c).minCoeff(), nb.col(c).minCoeff());
        const double hi = std::max(na.col(c).maxCoeff(), nb.col(c).maxCoeff());
        CHECK(lo == doctest::Approx(-1.0).epsilon(1e-12));
        CHECK(hi == doctest::Approx(1.0).epsilon(1e-12));
    }

    // Round trip inside the fitted range.
    CHECK(test::max_abs_diff(invert_normalization(na, p), a) < 1e-12);
}

TEST_CASE("normalization clamps unseen values into the closed target interval") {
    Matrix fit(2, 1);
    fit << 0.0, 1.0;
    NormalizationParams p = fit_normalization(std::vector<Matrix>{fit}, 0.0, 1.0);
    Matrix q(3, 1);
    q << -5.0, 0.5, 9.0;
    Matrix out = apply_normalization(q, p);
    CHECK(out(0, 0) == 0.0);
    CHECK(out(1, 0) == 0.5);
    CHECK(out(2, 0) == 1.0);
}

TEST_CASE("a constant channel normalizes to the midpoint of the target range") {
    Matrix fit = Matrix::Constant(10, 1, 4.2);
    NormalizationParams p = fit_normalization(std::vector<Matrix>{fit}, -1.0, 1.0);
    Matrix out = apply_normalization(fit, p);
    for (int i = 0; i < 10; ++i) CHECK(out(i, 0) == 0.0);
}

TEST_CASE("input config widths and name round trips") {
    CHECK(InputConfig{InputVariant::ALL}.feature_width() == 18);
    CHECK(InputConfig{InputVariant::ANG}.feature_width() == 6);
    CHECK(InputConfig{InputVariant::VEL}.feature_width() == 6);
    CHECK(InputConfig{InputVariant::ACC}.feature_width() == 6);
    CHECK(InputConfig{InputVariant::EEF}.feature_width() == 7);
    CHECK(InputConfig{InputVariant::EEF_PLUS}.feature_width() == 21);
    for (const char* name : {"all", "ang", "vel", "acc", "eef", "eefplus"})
        CHECK(InputConfig::parse(name).name() == name);
    CHECK(InputConfig::parse("eef+").name() == "eefplus");
    CHECK_THROWS_AS(InputConfig::parse("bogus"), ValidationError);
}

TEST_CASE("trial validation enforces channel counts") {
    Rng rng(6);
    TrialRecording t;
    t.subject_id = "s01";
    t.motion_id = "m01";
    t.repetition = 1;
    t.emg = make_signal(random_matrix(rng, 50, 8), 60.0);
    t.joints = make_signal(random_matrix(rng, 50, 6), 60.0);
    t.eef = make_signal(random_matrix(rng, 50, 7), 60.0);
    CHECK_NOTHROW(t.validate());

    TrialRecording bad = t;
    bad.emg = make_signal(random_matrix(rng, 50, 7), 60.0);
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = t;
    bad.repetition = 0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
}
