#pragma once

#include "myosynth/io.hpp"

#include <optional>

namespace myo {

enum class NormScope { TrainOnly, AllData };

struct PreprocessOptions {
    InputConfig config;
    NormScope norm_scope = NormScope::TrainOnly;
    std::uint64_t split_seed = 42;  // reproduces the split the trainer will use
    std::optional<std::string> held_out_motion;  // defaults to the designated one
    double rms_window_ms = 200.0;
    double out_rate_hz = 60.0;
    int savgol_window = 31;
    double outlier_sigma = 6.0;
};

/// EMG: baseline -> outliers -> RMS envelope -> [0,1] normalization.
/// Motion: savgol -> forward differences -> [-1,1] normalization.
/// Normalization is fitted per subject, by default on train-split trials only.
ProcessedDataset preprocess_dataset(const RawDataset& raw, const PreprocessOptions& opts);

}  // namespace myo
