#pragma once

#include "myosynth/common.hpp"
#include "myosynth/rng.hpp"

#include <memory>
#include <string>
#include <vector>

namespace myo::nn {

enum class Activation { Linear, ReLU };

Matrix relu(const Matrix& x);

/// A trainable tensor with its gradient and Adam moments.
struct Param {
    std::string name;
    Matrix value;
    Matrix grad;
    Matrix m;  // first moment
    Matrix v;  // second moment

    Param(std::string n, int rows, int cols)
        : name(std::move(n)),
          value(Matrix::Zero(rows, cols)),
          grad(Matrix::Zero(rows, cols)),
          m(Matrix::Zero(rows, cols)),
          v(Matrix::Zero(rows, cols)) {}

    void zero_grad() { grad.setZero(); }
};

using ParamPtr = std::shared_ptr<Param>;

/// Forward/backward over a [T x channels] block. Batching across sequences is
/// done by gradient accumulation in the training loop, so T is the only
/// in-layer batch dimension.
class Layer {
public:
    virtual ~Layer() = default;
    virtual Matrix forward(const Matrix& x, bool training, Rng* rng) = 0;
    virtual Matrix backward(const Matrix& grad_out) = 0;
    virtual std::vector<ParamPtr> params() const { return {}; }
    virtual void reset_state() {}
    virtual int output_width() const = 0;
};

class DenseLayer : public Layer {
public:
    // `time_distributed` only affects the serialized kind tag; the math is the
    // same because rows are already per-timestep.
    DenseLayer(ParamPtr w, ParamPtr b, Activation act, bool time_distributed = false)
        : w_(std::move(w)), b_(std::move(b)), act_(act), time_distributed_(time_distributed) {}

    Matrix forward(const Matrix& x, bool training, Rng* rng) override;
    Matrix backward(const Matrix& grad_out) override;
    std::vector<ParamPtr> params() const override { return {w_, b_}; }
    int output_width() const override { return static_cast<int>(w_->value.cols()); }
    bool time_distributed() const { return time_distributed_; }

private:
    ParamPtr w_;  // [in x out]
    ParamPtr b_;  // [1 x out]
    Activation act_;
    bool time_distributed_;
    Matrix x_, pre_;
};

class DropoutLayer : public Layer {
public:
    DropoutLayer(double rate, int width) : rate_(rate), width_(width) {
        require(rate >= 0.0 && rate < 1.0, "dropout rate must be in [0,1)");
    }

    Matrix forward(const Matrix& x, bool training, Rng* rng) override;
    Matrix backward(const Matrix& grad_out) override;
    int output_width() const override { return width_; }
    double rate() const { return rate_; }

private:
    double rate_;
    int width_;
    Matrix mask_;
};

/// Standard LSTM cell unrolled over the rows of the input. Gate blocks are
/// ordered [input, forget, candidate, output] inside the fused kernels.
class LstmLayer : public Layer {
public:
    LstmLayer(ParamPtr wx, ParamPtr wh, ParamPtr b, bool stateful, bool return_sequences);

    Matrix forward(const Matrix& x, bool training, Rng* rng) override;
    Matrix backward(const Matrix& grad_out) override;
    std::vector<ParamPtr> params() const override { return {wx_, wh_, b_}; }
    void reset_state() override;
    int output_width() const override { return units_; }

    const RowVector& hidden_state() const { return h_state_; }
    const RowVector& cell_state() const { return c_state_; }
    void set_state(const RowVector& h, const RowVector& c);
    bool stateful() const { return stateful_; }
    bool return_sequences() const { return return_sequences_; }

private:
    ParamPtr wx_;  // [in x 4u]
    ParamPtr wh_;  // [u x 4u]
    ParamPtr b_;   // [1 x 4u]
    int units_;
    bool stateful_;
    bool return_sequences_;

    RowVector h_state_, c_state_;  // carried state (stateful mode)

    // caches for backward
    Matrix x_, gates_i_, gates_f_, gates_g_, gates_o_, cells_, hiddens_;
    RowVector h0_, c0_;
};

/// 1-D convolution along time with same-zero-padding and ReLU.
class Conv1dLayer : public Layer {
public:
    Conv1dLayer(ParamPtr kernel, ParamPtr bias, int kernel_size, int in_channels, int filters);

    Matrix forward(const Matrix& x, bool training, Rng* rng) override;
    Matrix backward(const Matrix& grad_out) override;
    std::vector<ParamPtr> params() const override { return {kernel_, bias_}; }
    int output_width() const override { return filters_; }
    int kernel_size() const { return k_; }

private:
    ParamPtr kernel_;  // [k*in x filters], row blocks per tap
    ParamPtr bias_;    // [1 x filters]
    int k_, in_, filters_;
    Matrix padded_, pre_;
};

}  // namespace myo::nn
