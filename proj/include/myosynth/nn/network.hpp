#pragma once

#include "myosynth/nn/layers.hpp"

#include <nlohmann/json.hpp>

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace myo::nn {

using json = nlohmann::json;

enum class LayerKind { Dense, TimeDistributedDense, Lstm, Conv1d, Dropout };

struct LayerSpec {
    LayerKind kind = LayerKind::Dense;
    int units = 0;        // Dense / TimeDistributedDense / Lstm
    int filters = 0;      // Conv1d
    int kernel_size = 0;  // Conv1d
    double rate = 0.0;    // Dropout
    Activation activation = Activation::Linear;
    bool stateful = false;
    bool return_sequences = false;

    json to_json() const;
    static LayerSpec from_json(const json& j);
};

struct NetworkSpec {
    int input_width = 0;
    std::vector<LayerSpec> layers;

    int output_width() const;
    json to_json() const;
    static NetworkSpec from_json(const json& j);
};

/// All trainable tensors of one network, in layer order. Shared between a
/// training and a prediction network when weights are tied.
struct ParamStore {
    std::vector<ParamPtr> params;

    std::size_t total_size() const;
    void zero_grads();
    std::vector<Matrix> snapshot_values() const;
    void restore_values(const std::vector<Matrix>& values);
};

/// Glorot-uniform kernels, zero biases, forget-gate bias 1; deterministic per seed.
ParamStore init_weights(const NetworkSpec& spec, std::uint64_t seed);

class Network {
public:
    Network() = default;
    Network(const NetworkSpec& spec, ParamStore store);

    Matrix forward(const Matrix& x, bool training = false, Rng* rng = nullptr);
    /// Backpropagates grad w.r.t. the network output, accumulating parameter grads.
    Matrix backward(const Matrix& grad_out);
    void reset_state();

    const NetworkSpec& spec() const { return spec_; }
    ParamStore& store() { return store_; }
    const ParamStore& store() const { return store_; }
    bool has_stateful_layer() const;
    const std::vector<std::unique_ptr<Layer>>& layers() const { return layers_; }

private:
    NetworkSpec spec_;
    ParamStore store_;
    std::vector<std::unique_ptr<Layer>> layers_;
};

// ---- loss ----

struct LossAndGrad {
    double loss;
    Matrix grad;  // d loss / d pred
};

double mse_loss(const Matrix& pred, const Matrix& target);
LossAndGrad mse_loss_grad(const Matrix& pred, const Matrix& target);

// ---- optimizer ----

struct AdamConfig {
    double learning_rate = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-7;
};

/// One Adam update with bias correction; t is the 1-based step count.
void adam_step(ParamStore& store, const AdamConfig& adam, long t);

// ---- training loop ----

struct TrainConfig {
    int batch_size = 32;
    int max_epochs = 100;
    int patience = 5;
    AdamConfig adam;
    std::uint64_t seed = 42;
    bool shuffle = true;

    json to_json() const;
    static TrainConfig from_json(const json& j);
};

/// One training sample: a sequence (or a single row for pointwise models).
/// `y` may have fewer rows than `x` (RNNseq sub-sequences target the last step).
struct TrainItem {
    Matrix x;
    Matrix y;
};

struct FitResult {
    std::vector<double> train_loss;  // per epoch
    std::vector<double> val_loss;    // per epoch
    int best_epoch = -1;             // 0-based epoch whose weights were kept
};

/// Called after each epoch with (0-based epoch, validation loss); returning
/// true stops training (used for pruning during hyperparameter search).
using EpochCallback = std::function<bool(int, double)>;

/// Minibatch Adam with early stopping (patience on validation loss, best
/// weights restored). Deterministic given the seed. Stateful networks are
/// reset at epoch boundaries and trained in dataset order (no shuffle).
FitResult fit(Network& net, const std::vector<TrainItem>& train,
              const std::vector<TrainItem>& val, const TrainConfig& config,
              const EpochCallback& on_epoch = nullptr);

/// Mean MSE over items, pooled over all elements; inference mode.
double evaluate_loss(Network& net, const std::vector<TrainItem>& items);

}  // namespace myo::nn
