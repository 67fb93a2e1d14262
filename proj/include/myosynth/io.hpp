#pragma once

#include "myosynth/signal.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <string>
#include <vector>

namespace myo {

using nlohmann::json;

struct TrialKey {
    std::string subject;
    std::string motion;
    int repetition = 0;

    std::string id() const;
    bool operator==(const TrialKey&) const = default;
    bool operator<(const TrialKey& o) const {
        return std::tie(subject, motion, repetition) <
               std::tie(o.subject, o.motion, o.repetition);
    }
};

// ---- CSV (column 0 = timestamp in seconds, header row = channel names) ----

void write_signal_csv(const std::string& path, const SampledSignal& signal);
SampledSignal read_signal_csv(const std::string& path);

void write_matrix_csv(const std::string& path, const Matrix& data,
                      const std::vector<std::string>& channel_names, double rate_hz);
Matrix read_matrix_csv(const std::string& path);

// ---- raw trial layout: <root>/<trial-id>/{emg,joints,eef}.csv + meta.json ----

struct RawDataset {
    std::string root;
    std::vector<TrialKey> trials;
    std::string designated_new_motion;
    std::string designated_held_out_subject;
};

void save_raw_trial(const std::string& root, const TrialRecording& trial);
void save_raw_manifest(const RawDataset& ds);
RawDataset load_raw_manifest(const std::string& root);
TrialRecording load_raw_trial(const std::string& root, const TrialKey& key);

// ---- processed dataset: per-trial feature/target CSV pair + manifest ----

struct ProcessedTrial {
    TrialKey key;
    Matrix features;
    Matrix targets;  // 8-channel normalized envelope
};

struct ProcessedDataset {
    InputConfig config;
    std::vector<ProcessedTrial> trials;
    std::map<std::string, NormalizationParams> feature_norm;  // per subject
    std::map<std::string, NormalizationParams> target_norm;
    std::string designated_new_motion;
    std::string designated_held_out_subject;

    const ProcessedTrial& find(const TrialKey& key) const;
    std::vector<std::string> subjects() const;
};

void save_processed_dataset(const std::string& root, const ProcessedDataset& ds);
ProcessedDataset load_processed_dataset(const std::string& root);

json normalization_to_json(const NormalizationParams& p);
NormalizationParams normalization_from_json(const json& j);

json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const json& j);  // atomic (tmp + rename)

}  // namespace myo
