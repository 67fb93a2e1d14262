#include "myosynth/nn/layers.hpp"

namespace myo::nn {

Matrix relu(const Matrix& x) { return x.cwiseMax(0.0); }

namespace {
inline Matrix sigmoid(const Matrix& z) {
    return (1.0 / (1.0 + (-z.array()).exp())).matrix();
}
}  // namespace

// ---- Dense ----

Matrix DenseLayer::forward(const Matrix& x, bool, Rng*) {
    require(x.cols() == w_->value.rows(), "dense: input width mismatch");
    x_ = x;
    pre_ = (x * w_->value).rowwise() + b_->value.row(0);
    return act_ == Activation::ReLU ? relu(pre_) : pre_;
}

Matrix DenseLayer::backward(const Matrix& grad_out) {
    Matrix dpre = grad_out;
    if (act_ == Activation::ReLU)
        dpre = dpre.cwiseProduct((pre_.array() > 0.0).cast<double>().matrix());
    w_->grad.noalias() += x_.transpose() * dpre;
    b_->grad.row(0) += dpre.colwise().sum();
    return dpre * w_->value.transpose();
}

// ---- Dropout ----

Matrix DropoutLayer::forward(const Matrix& x, bool training, Rng* rng) {
    if (!training || rate_ == 0.0) {
        mask_.resize(0, 0);
        return x;
    }
    if (rng == nullptr) throw InternalError("dropout: training forward requires an RNG");
    const double keep = 1.0 - rate_;
    mask_.resize(x.rows(), x.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index j = 0; j < x.cols(); ++j)
            mask_(i, j) = rng->uniform() < rate_ ? 0.0 : 1.0 / keep;
    return x.cwiseProduct(mask_);
}

Matrix DropoutLayer::backward(const Matrix& grad_out) {
    if (mask_.size() == 0) return grad_out;
    return grad_out.cwiseProduct(mask_);
}

// ---- LSTM ----

LstmLayer::LstmLayer(ParamPtr wx, ParamPtr wh, ParamPtr b, bool stateful, bool return_sequences)
    : wx_(std::move(wx)),
      wh_(std::move(wh)),
      b_(std::move(b)),
      units_(static_cast<int>(wh_->value.rows())),
      stateful_(stateful),
      return_sequences_(return_sequences) {
    require(wx_->value.cols() == 4 * units_ && wh_->value.cols() == 4 * units_ &&
                b_->value.cols() == 4 * units_,
            "lstm: parameter shapes inconsistent");
    reset_state();
}

void LstmLayer::reset_state() {
    h_state_ = RowVector::Zero(units_);
    c_state_ = RowVector::Zero(units_);
}

void LstmLayer::set_state(const RowVector& h, const RowVector& c) {
    require(h.size() == units_ && c.size() == units_, "lstm: state size mismatch");
    h_state_ = h;
    c_state_ = c;
}

Matrix LstmLayer::forward(const Matrix& x, bool, Rng*) {
    require(x.cols() == wx_->value.rows(), "lstm: input width mismatch");
    const int t_len = static_cast<int>(x.rows());
    const int u = units_;

    x_ = x;
    h0_ = stateful_ ? h_state_ : RowVector::Zero(u);
    c0_ = stateful_ ? c_state_ : RowVector::Zero(u);

    gates_i_.resize(t_len, u);
    gates_f_.resize(t_len, u);
    gates_g_.resize(t_len, u);
    gates_o_.resize(t_len, u);
    cells_.resize(t_len, u);
    hiddens_.resize(t_len, u);

    RowVector h = h0_, c = c0_;
    for (int t = 0; t < t_len; ++t) {
        RowVector z = x.row(t) * wx_->value + h * wh_->value + b_->value.row(0);
        RowVector gi = (1.0 / (1.0 + (-z.segment(0, u).array()).exp())).matrix();
        RowVector gf = (1.0 / (1.0 + (-z.segment(u, u).array()).exp())).matrix();
        RowVector gg = z.segment(2 * u, u).array().tanh().matrix();
        RowVector go = (1.0 / (1.0 + (-z.segment(3 * u, u).array()).exp())).matrix();
        c = gf.cwiseProduct(c) + gi.cwiseProduct(gg);
        h = go.cwiseProduct(c.array().tanh().matrix());
        gates_i_.row(t) = gi;
        gates_f_.row(t) = gf;
        gates_g_.row(t) = gg;
        gates_o_.row(t) = go;
        cells_.row(t) = c;
        hiddens_.row(t) = h;
    }
    if (stateful_) {
        h_state_ = h;
        c_state_ = c;
    }
    if (return_sequences_) return hiddens_;
    return hiddens_.row(t_len - 1);
}

Matrix LstmLayer::backward(const Matrix& grad_out) {
    const int t_len = static_cast<int>(x_.rows());
    const int u = units_;

    Matrix dh_seq = Matrix::Zero(t_len, u);
    if (return_sequences_) {
        require(grad_out.rows() == t_len && grad_out.cols() == u, "lstm: grad shape mismatch");
        dh_seq = grad_out;
    } else {
        require(grad_out.rows() == 1 && grad_out.cols() == u, "lstm: grad shape mismatch");
        dh_seq.row(t_len - 1) = grad_out.row(0);
    }

    Matrix dx(t_len, x_.cols());
    RowVector dh_next = RowVector::Zero(u);
    RowVector dc_next = RowVector::Zero(u);

    for (int t = t_len - 1; t >= 0; --t) {
        const RowVector gi = gates_i_.row(t), gf = gates_f_.row(t), gg = gates_g_.row(t),
                        go = gates_o_.row(t);
        const RowVector c_t = cells_.row(t);
        const RowVector c_prev = t > 0 ? RowVector(cells_.row(t - 1)) : c0_;
        const RowVector h_prev = t > 0 ? RowVector(hiddens_.row(t - 1)) : h0_;
        const RowVector tanh_c = c_t.array().tanh().matrix();

        RowVector dh = dh_seq.row(t) + dh_next;
        RowVector dc = dc_next +
                       (dh.array() * go.array() * (1.0 - tanh_c.array().square())).matrix();
        RowVector d_go = dh.cwiseProduct(tanh_c);
        RowVector d_gi = dc.cwiseProduct(gg);
        RowVector d_gf = dc.cwiseProduct(c_prev);
        RowVector d_gg = dc.cwiseProduct(gi);

        RowVector dz(4 * u);
        dz.segment(0, u) = (d_gi.array() * gi.array() * (1.0 - gi.array())).matrix();
        dz.segment(u, u) = (d_gf.array() * gf.array() * (1.0 - gf.array())).matrix();
        dz.segment(2 * u, u) = (d_gg.array() * (1.0 - gg.array().square())).matrix();
        dz.segment(3 * u, u) = (d_go.array() * go.array() * (1.0 - go.array())).matrix();

        wx_->grad.noalias() += x_.row(t).transpose() * dz;
        wh_->grad.noalias() += h_prev.transpose() * dz;
        b_->grad.row(0) += dz;

        dx.row(t) = dz * wx_->value.transpose();
        dh_next = dz * wh_->value.transpose();
        dc_next = dc.cwiseProduct(gf);
    }
    // Gradient is truncated at the sequence boundary (stateful carry included).
    return dx;
}

// ---- Conv1D ----

Conv1dLayer::Conv1dLayer(ParamPtr kernel, ParamPtr bias, int kernel_size, int in_channels,
                         int filters)
    : kernel_(std::move(kernel)),
      bias_(std::move(bias)),
      k_(kernel_size),
      in_(in_channels),
      filters_(filters) {
    require(k_ >= 1, "conv1d: kernel size must be >= 1");
    require(kernel_->value.rows() == k_ * in_ && kernel_->value.cols() == filters_,
            "conv1d: kernel shape mismatch");
}

Matrix Conv1dLayer::forward(const Matrix& x, bool, Rng*) {
    const int t_len = static_cast<int>(x.rows());
    require(x.cols() == in_, "conv1d: input width mismatch");
    require(k_ <= t_len, "conv1d: kernel longer than sequence");

    // im2col with same-zero-padding; pad_left matches the centered window.
    const int pad_left = (k_ - 1) / 2;
    padded_.setZero(t_len + k_ - 1, in_);
    padded_.middleRows(pad_left, t_len) = x;

    Matrix cols(t_len, k_ * in_);
    for (int tap = 0; tap < k_; ++tap)
        cols.middleCols(tap * in_, in_) = padded_.middleRows(tap, t_len);

    pre_ = (cols * kernel_->value).rowwise() + bias_->value.row(0);
    return relu(pre_);
}

Matrix Conv1dLayer::backward(const Matrix& grad_out) {
    const int t_len = static_cast<int>(pre_.rows());
    const int pad_left = (k_ - 1) / 2;
    Matrix dpre = grad_out.cwiseProduct((pre_.array() > 0.0).cast<double>().matrix());

    Matrix cols(t_len, k_ * in_);
    for (int tap = 0; tap < k_; ++tap)
        cols.middleCols(tap * in_, in_) = padded_.middleRows(tap, t_len);

    kernel_->grad.noalias() += cols.transpose() * dpre;
    bias_->grad.row(0) += dpre.colwise().sum();

    Matrix dcols = dpre * kernel_->value.transpose();  // [T x k*in]
    Matrix dpadded = Matrix::Zero(t_len + k_ - 1, in_);
    for (int tap = 0; tap < k_; ++tap)
        dpadded.middleRows(tap, t_len) += dcols.middleCols(tap * in_, in_);
    return dpadded.middleRows(pad_left, t_len);
}

}  // namespace myo::nn
