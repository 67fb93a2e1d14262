#pragma once

#include "myosynth/nn/network.hpp"

#include <optional>
#include <string>
#include <vector>

namespace myo {

enum class ArchitectureId { RNN, RNNSEQ, FNN, FNNSEQ, CNN };

std::string arch_name(ArchitectureId id);
ArchitectureId arch_from_name(const std::string& name);

constexpr int kEmgChannels = 8;

/// Architecture description; layer overrides come from the tuner or config files.
struct ArchConfig {
    ArchitectureId arch = ArchitectureId::RNN;
    int feature_width = 18;
    double input_dropout = 0.1;
    int warmup_k = 5;            // RNNseq: warm-up lags 2^0 .. 2^k
    int rnnseq_units = 128;      // RNNseq LSTM width
    std::vector<int> lstm_units = {256, 128, 64};       // RNN
    std::vector<int> dense_units = {512, 256, 128};     // FNN / FNNseq hidden sizes
    std::vector<int> cnn_filters = {128, 128, 128, 128, 64};
    std::vector<int> cnn_kernels = {32, 8, 8, 4, 4};
    std::vector<int> lag_list = {1, 2, 4, 8};  // FNNseq prior-step lags

    nn::json to_json() const;
    static ArchConfig from_json(const nn::json& j);
};

nn::NetworkSpec build_rnn(const ArchConfig& cfg);
nn::NetworkSpec build_fnn(const ArchConfig& cfg);
nn::NetworkSpec build_cnn(const ArchConfig& cfg);
/// Training network (non-stateful, last-step output) and prediction network
/// (stateful, batch of one timestep) for the sub-sequence approach.
struct RnnseqPair {
    nn::NetworkSpec train_spec;
    nn::NetworkSpec predict_spec;
};
RnnseqPair build_rnnseq_pair(const ArchConfig& cfg);

/// Closed-form trainable parameter count for a spec chain.
long parameter_count(const nn::NetworkSpec& spec);

/// One sub-sequence: warm-up rows at lags 2^k..2,1 before t (ascending time),
/// then the row at t; the target is the 8-channel output at t.
struct SubSequence {
    Matrix inputs;  // [w_eff + 1, features]
    RowVector target;
};

std::vector<SubSequence> make_subsequences(const Matrix& features, const Matrix& targets,
                                           int max_lag_exponent);

/// Features at t concatenated with features at t - lag for each configured lag,
/// clamped to row 0 at the sequence start.
Matrix make_lagged_features(const Matrix& features, const std::vector<int>& lags = {1, 2, 4, 8});

/// A built architecture ready for training and sequence prediction. RNNseq
/// holds two networks sharing one parameter store.
class ArchSession {
public:
    ArchSession(const ArchConfig& cfg, std::uint64_t init_seed);
    ArchSession(const ArchConfig& cfg, nn::ParamStore params);

    const ArchConfig& config() const { return cfg_; }
    nn::ParamStore& params();
    const nn::NetworkSpec& train_spec() const { return train_net_->spec(); }

    /// [T x feature_width] -> [T x 8]. RNNseq runs its stateful per-step loop.
    Matrix predict(const Matrix& features);

    /// Turns (features, targets) sequence pairs into training items for fit.
    std::vector<nn::TrainItem> make_train_items(
        const std::vector<std::pair<Matrix, Matrix>>& sequences) const;

    nn::FitResult fit(const std::vector<std::pair<Matrix, Matrix>>& train,
                      const std::vector<std::pair<Matrix, Matrix>>& val,
                      const nn::TrainConfig& config, const nn::EpochCallback& on_epoch = nullptr);

    /// Architecture-appropriate defaults (batch size, shuffling).
    nn::TrainConfig default_train_config() const;

    nn::Network& train_network() { return *train_net_; }
    nn::Network& predict_network();

private:
    void build(nn::ParamStore params);

    ArchConfig cfg_;
    std::unique_ptr<nn::Network> train_net_;
    std::unique_ptr<nn::Network> predict_net_;  // RNNseq only; shares params
};

}  // namespace myo
