#pragma once

#include "myosynth/common.hpp"

#include <optional>
#include <string>
#include <vector>

namespace myo {

/// A uniformly sampled multichannel signal. Rows are samples, columns channels.
struct SampledSignal {
    Matrix samples;
    double rate_hz = 0.0;
    std::vector<std::string> channel_names;

    int length() const { return static_cast<int>(samples.rows()); }
    int channels() const { return static_cast<int>(samples.cols()); }
    double duration_s() const { return length() > 0 ? (length() - 1) / rate_hz : 0.0; }

    void validate(const std::string& where) const;
};

/// One repetition of one motion by one subject.
struct TrialRecording {
    std::string subject_id;
    std::string motion_id;
    int repetition = 0;        // 1-based
    double rest_duration_s = 1.0;  // rest lead-in used as the baseline window
    SampledSignal emg;         // 8 channels
    SampledSignal joints;      // 6 joint angles, 60 Hz, degrees
    SampledSignal eef;         // hand position (3) + orientation quaternion (4), 60 Hz

    void validate() const;
};

/// Per-channel affine normalization fitted on one subject's data.
struct NormalizationParams {
    Vector mins;
    Vector maxs;
    double lo = 0.0;  // target range
    double hi = 1.0;

    int channels() const { return static_cast<int>(mins.size()); }
};

enum class InputVariant { ALL, ANG, VEL, ACC, EEF, EEF_PLUS };

struct InputConfig {
    InputVariant variant = InputVariant::ALL;

    int feature_width() const;
    std::string name() const;
    static InputConfig parse(const std::string& name);
};

// ---- pipeline operations (pure functions) ----

/// Subtracts, per channel, the mean over the rest-mask samples.
SampledSignal baseline_correct(const SampledSignal& signal, const std::vector<bool>& rest_mask);

/// Replaces samples beyond k_sigma standard deviations (per channel) with a
/// cubic-spline interpolation over the nearest clean neighbours of each
/// contiguous outlier run.
SampledSignal remove_outliers(const SampledSignal& signal, double k_sigma = 6.0);

/// RMS envelope over centered windows, simultaneously resampled to out_rate_hz.
SampledSignal rms_envelope(const SampledSignal& signal, double window_ms = 200.0,
                           double out_rate_hz = 60.0);

/// Savitzky-Golay smoothing; one-sided truncated windows at the edges.
SampledSignal savgol_smooth(const SampledSignal& signal, int poly_order = 3, int window_len = 31);

/// Delta f: n -> f(n+1) - f(n), last value repeated to keep the length.
SampledSignal forward_difference(const SampledSignal& signal);

NormalizationParams fit_normalization(const std::vector<SampledSignal>& signals, double lo,
                                      double hi);
NormalizationParams fit_normalization(const std::vector<Matrix>& data, double lo, double hi);
SampledSignal apply_normalization(const SampledSignal& signal, const NormalizationParams& params);
Matrix apply_normalization(const Matrix& data, const NormalizationParams& params);
SampledSignal invert_normalization(const SampledSignal& signal, const NormalizationParams& params);
Matrix invert_normalization(const Matrix& data, const NormalizationParams& params);

/// Assembles the unnormalized motion feature matrix for a config:
/// savgol on angles, then forward differences for the derivative channels.
/// Column order: ALL = 6 angles | 6 velocities | 6 accelerations;
/// EEF = pos3 | quat4; EEF_PLUS = EEF | delta | delta^2.
Matrix assemble_motion_features(const TrialRecording& trial, const InputConfig& config,
                                int savgol_window = 31);

/// assemble + normalize to [-1, 1] with subject-level params.
Matrix build_features(const TrialRecording& trial, const InputConfig& config,
                      const NormalizationParams& norm, int savgol_window = 31);

}  // namespace myo
