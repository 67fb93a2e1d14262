#include "myosynth/nn/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace myo::nn {

namespace {

std::string kind_name(LayerKind k) {
    switch (k) {
        case LayerKind::Dense: return "Dense";
        case LayerKind::TimeDistributedDense: return "TimeDistributedDense";
        case LayerKind::Lstm: return "LSTM";
        case LayerKind::Conv1d: return "Conv1D";
        case LayerKind::Dropout: return "Dropout";
    }
    throw InternalError("unknown layer kind");
}

LayerKind kind_from_name(const std::string& s) {
    if (s == "Dense") return LayerKind::Dense;
    if (s == "TimeDistributedDense") return LayerKind::TimeDistributedDense;
    if (s == "LSTM") return LayerKind::Lstm;
    if (s == "Conv1D") return LayerKind::Conv1d;
    if (s == "Dropout") return LayerKind::Dropout;
    throw ValidationError("unknown layer kind: " + s);
}

}  // namespace

json LayerSpec::to_json() const {
    json j;
    j["kind"] = kind_name(kind);
    switch (kind) {
        case LayerKind::Dense:
        case LayerKind::TimeDistributedDense:
            j["units"] = units;
            j["activation"] = activation == Activation::ReLU ? "relu" : "linear";
            break;
        case LayerKind::Lstm:
            j["units"] = units;
            j["stateful"] = stateful;
            j["return_sequences"] = return_sequences;
            break;
        case LayerKind::Conv1d:
            j["filters"] = filters;
            j["kernel_size"] = kernel_size;
            break;
        case LayerKind::Dropout:
            j["rate"] = rate;
            break;
    }
    return j;
}

LayerSpec LayerSpec::from_json(const json& j) {
    LayerSpec s;
    s.kind = kind_from_name(j.at("kind").get<std::string>());
    switch (s.kind) {
        case LayerKind::Dense:
        case LayerKind::TimeDistributedDense:
            s.units = j.at("units").get<int>();
            s.activation =
                j.value("activation", "linear") == std::string("relu") ? Activation::ReLU
                                                                       : Activation::Linear;
            break;
        case LayerKind::Lstm:
            s.units = j.at("units").get<int>();
            s.stateful = j.value("stateful", false);
            s.return_sequences = j.value("return_sequences", false);
            break;
        case LayerKind::Conv1d:
            s.filters = j.at("filters").get<int>();
            s.kernel_size = j.at("kernel_size").get<int>();
            break;
        case LayerKind::Dropout:
            s.rate = j.at("rate").get<double>();
            break;
    }
    return s;
}

int NetworkSpec::output_width() const {
    int w = input_width;
    for (const auto& l : layers) {
        switch (l.kind) {
            case LayerKind::Dense:
            case LayerKind::TimeDistributedDense:
            case LayerKind::Lstm:
                w = l.units;
                break;
            case LayerKind::Conv1d:
                w = l.filters;
                break;
            case LayerKind::Dropout:
                break;
        }
    }
    return w;
}

json NetworkSpec::to_json() const {
    json j;
    j["input_width"] = input_width;
    j["layers"] = json::array();
    for (const auto& l : layers) j["layers"].push_back(l.to_json());
    return j;
}

NetworkSpec NetworkSpec::from_json(const json& j) {
    NetworkSpec s;
    s.input_width = j.at("input_width").get<int>();
    for (const auto& lj : j.at("layers")) s.layers.push_back(LayerSpec::from_json(lj));
    return s;
}

std::size_t ParamStore::total_size() const {
    std::size_t n = 0;
    for (const auto& p : params) n += static_cast<std::size_t>(p->value.size());
    return n;
}

void ParamStore::zero_grads() {
    for (auto& p : params) p->zero_grad();
}

std::vector<Matrix> ParamStore::snapshot_values() const {
    std::vector<Matrix> out;
    out.reserve(params.size());
    for (const auto& p : params) out.push_back(p->value);
    return out;
}

void ParamStore::restore_values(const std::vector<Matrix>& values) {
    require(values.size() == params.size(), "param snapshot size mismatch");
    for (std::size_t i = 0; i < params.size(); ++i) params[i]->value = values[i];
}

namespace {

Matrix glorot_uniform(int rows, int cols, int fan_in, int fan_out, Rng& rng) {
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = rng.uniform(-limit, limit);
    return m;
}

}  // namespace

ParamStore init_weights(const NetworkSpec& spec, std::uint64_t seed) {
    Rng rng(seed);
    ParamStore store;
    int in = spec.input_width;
    int idx = 0;
    for (const auto& l : spec.layers) {
        const std::string tag = "layer" + std::to_string(idx++);
        switch (l.kind) {
            case LayerKind::Dense:
            case LayerKind::TimeDistributedDense: {
                auto w = std::make_shared<Param>(tag + ".w", in, l.units);
                auto b = std::make_shared<Param>(tag + ".b", 1, l.units);
                w->value = glorot_uniform(in, l.units, in, l.units, rng);
                store.params.push_back(w);
                store.params.push_back(b);
                in = l.units;
                break;
            }
            case LayerKind::Lstm: {
                const int u = l.units;
                auto wx = std::make_shared<Param>(tag + ".wx", in, 4 * u);
                auto wh = std::make_shared<Param>(tag + ".wh", u, 4 * u);
                auto b = std::make_shared<Param>(tag + ".b", 1, 4 * u);
                wx->value = glorot_uniform(in, 4 * u, in, 4 * u, rng);
                wh->value = glorot_uniform(u, 4 * u, u, 4 * u, rng);
                b->value.row(0).segment(u, u).setOnes();  // forget-gate bias
                store.params.push_back(wx);
                store.params.push_back(wh);
                store.params.push_back(b);
                in = u;
                break;
            }
            case LayerKind::Conv1d: {
                auto k = std::make_shared<Param>(tag + ".kernel", l.kernel_size * in, l.filters);
                auto b = std::make_shared<Param>(tag + ".b", 1, l.filters);
                k->value =
                    glorot_uniform(l.kernel_size * in, l.filters, l.kernel_size * in, l.filters,
                                   rng);
                store.params.push_back(k);
                store.params.push_back(b);
                in = l.filters;
                break;
            }
            case LayerKind::Dropout:
                break;
        }
    }
    return store;
}

Network::Network(const NetworkSpec& spec, ParamStore store)
    : spec_(spec), store_(std::move(store)) {
    int in = spec.input_width;
    std::size_t pi = 0;
    auto take = [&]() -> ParamPtr {
        require(pi < store_.params.size(), "network: parameter store too small for spec");
        return store_.params[pi++];
    };
    for (const auto& l : spec.layers) {
        switch (l.kind) {
            case LayerKind::Dense:
            case LayerKind::TimeDistributedDense: {
                auto w = take();
                auto b = take();
                require(w->value.rows() == in && w->value.cols() == l.units,
                        "network: dense weight shape mismatch");
                layers_.push_back(std::make_unique<DenseLayer>(
                    w, b, l.activation, l.kind == LayerKind::TimeDistributedDense));
                in = l.units;
                break;
            }
            case LayerKind::Lstm: {
                auto wx = take();
                auto wh = take();
                auto b = take();
                require(wx->value.rows() == in && wh->value.rows() == l.units,
                        "network: lstm weight shape mismatch");
                layers_.push_back(
                    std::make_unique<LstmLayer>(wx, wh, b, l.stateful, l.return_sequences));
                in = l.units;
                break;
            }
            case LayerKind::Conv1d: {
                auto k = take();
                auto b = take();
                layers_.push_back(
                    std::make_unique<Conv1dLayer>(k, b, l.kernel_size, in, l.filters));
                in = l.filters;
                break;
            }
            case LayerKind::Dropout:
                layers_.push_back(std::make_unique<DropoutLayer>(l.rate, in));
                break;
        }
    }
    require(pi == store_.params.size(), "network: unused parameters in store");
}

Matrix Network::forward(const Matrix& x, bool training, Rng* rng) {
    Matrix h = x;
    for (auto& layer : layers_) h = layer->forward(h, training, rng);
    return h;
}

Matrix Network::backward(const Matrix& grad_out) {
    Matrix g = grad_out;
    for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) g = (*it)->backward(g);
    return g;
}

void Network::reset_state() {
    for (auto& layer : layers_) layer->reset_state();
}

bool Network::has_stateful_layer() const {
    for (const auto& l : spec_.layers)
        if (l.kind == LayerKind::Lstm && l.stateful) return true;
    return false;
}

double mse_loss(const Matrix& pred, const Matrix& target) {
    require(pred.rows() == target.rows() && pred.cols() == target.cols(),
            "mse_loss: shape mismatch");
    return (pred - target).squaredNorm() / static_cast<double>(pred.size());
}

LossAndGrad mse_loss_grad(const Matrix& pred, const Matrix& target) {
    require(pred.rows() == target.rows() && pred.cols() == target.cols(),
            "mse_loss: shape mismatch");
    const double n = static_cast<double>(pred.size());
    Matrix diff = pred - target;
    return {diff.squaredNorm() / n, (2.0 / n) * diff};
}

void adam_step(ParamStore& store, const AdamConfig& adam, long t) {
    require(t >= 1, "adam_step: t must be >= 1");
    const double bc1 = 1.0 - std::pow(adam.beta1, static_cast<double>(t));
    const double bc2 = 1.0 - std::pow(adam.beta2, static_cast<double>(t));
    for (auto& p : store.params) {
        p->m = adam.beta1 * p->m + (1.0 - adam.beta1) * p->grad;
        p->v = adam.beta2 * p->v + (1.0 - adam.beta2) * p->grad.cwiseProduct(p->grad);
        p->value.array() -= adam.learning_rate * (p->m.array() / bc1) /
                            ((p->v.array() / bc2).sqrt() + adam.epsilon);
    }
}

json TrainConfig::to_json() const {
    return json{{"batch_size", batch_size},
                {"max_epochs", max_epochs},
                {"patience", patience},
                {"learning_rate", adam.learning_rate},
                {"beta1", adam.beta1},
                {"beta2", adam.beta2},
                {"epsilon", adam.epsilon},
                {"seed", seed},
                {"shuffle", shuffle}};
}

TrainConfig TrainConfig::from_json(const json& j) {
    TrainConfig c;
    c.batch_size = j.value("batch_size", c.batch_size);
    c.max_epochs = j.value("max_epochs", c.max_epochs);
    c.patience = j.value("patience", c.patience);
    c.adam.learning_rate = j.value("learning_rate", c.adam.learning_rate);
    c.adam.beta1 = j.value("beta1", c.adam.beta1);
    c.adam.beta2 = j.value("beta2", c.adam.beta2);
    c.adam.epsilon = j.value("epsilon", c.adam.epsilon);
    c.seed = j.value("seed", c.seed);
    c.shuffle = j.value("shuffle", c.shuffle);
    require(c.patience >= 1, "train config: patience must be >= 1");
    require(c.adam.learning_rate > 0, "train config: learning_rate must be positive");
    return c;
}

double evaluate_loss(Network& net, const std::vector<TrainItem>& items) {
    const bool stateful = net.has_stateful_layer();
    double sse = 0.0;
    double count = 0.0;
    for (const auto& item : items) {
        if (stateful) net.reset_state();
        Matrix pred = net.forward(item.x, false, nullptr);
        require(pred.rows() == item.y.rows() && pred.cols() == item.y.cols(),
                "evaluate_loss: prediction/target shape mismatch");
        sse += (pred - item.y).squaredNorm();
        count += static_cast<double>(item.y.size());
    }
    return count > 0 ? sse / count : 0.0;
}

FitResult fit(Network& net, const std::vector<TrainItem>& train,
              const std::vector<TrainItem>& val, const TrainConfig& config,
              const EpochCallback& on_epoch) {
    require(!train.empty(), "fit: empty training data");
    require(!val.empty(), "fit: empty validation data");
    require(config.max_epochs >= 1, "fit: max_epochs must be >= 1");
    require(config.batch_size >= 1, "fit: batch_size must be >= 1");

    Rng rng(config.seed);
    const bool stateful = net.has_stateful_layer();
    const bool do_shuffle = config.shuffle && !stateful;

    // Rows-only datasets are stacked into minibatch matrices.
    bool all_rows = true;
    for (const auto& item : train)
        if (item.x.rows() != 1 || item.y.rows() != 1) {
            all_rows = false;
            break;
        }

    std::vector<std::size_t> order(train.size());
    std::iota(order.begin(), order.end(), 0);

    FitResult result;
    double best_val = std::numeric_limits<double>::infinity();
    std::vector<Matrix> best_values = net.store().snapshot_values();
    int epochs_since_best = 0;
    long step = 0;

    for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
        if (stateful) net.reset_state();
        if (do_shuffle) rng.shuffle(order);

        double epoch_sse = 0.0, epoch_count = 0.0;
        if (all_rows) {
            const int in_w = static_cast<int>(train.front().x.cols());
            const int out_w = static_cast<int>(train.front().y.cols());
            for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
                const int bsz =
                    static_cast<int>(std::min<std::size_t>(config.batch_size,
                                                           order.size() - start));
                Matrix xb(bsz, in_w), yb(bsz, out_w);
                for (int r = 0; r < bsz; ++r) {
                    xb.row(r) = train[order[start + r]].x.row(0);
                    yb.row(r) = train[order[start + r]].y.row(0);
                }
                net.store().zero_grads();
                Matrix pred = net.forward(xb, true, &rng);
                auto [loss, grad] = mse_loss_grad(pred, yb);
                net.backward(grad);
                adam_step(net.store(), config.adam, ++step);
                epoch_sse += loss * static_cast<double>(yb.size());
                epoch_count += static_cast<double>(yb.size());
            }
        } else {
            std::size_t i = 0;
            while (i < order.size()) {
                const std::size_t batch_end =
                    std::min(order.size(), i + static_cast<std::size_t>(config.batch_size));
                const double bsz = static_cast<double>(batch_end - i);
                net.store().zero_grads();
                for (; i < batch_end; ++i) {
                    const TrainItem& item = train[order[i]];
                    Matrix pred = net.forward(item.x, true, &rng);
                    require(pred.rows() == item.y.rows() && pred.cols() == item.y.cols(),
                            "fit: prediction/target shape mismatch");
                    auto [loss, grad] = mse_loss_grad(pred, item.y);
                    net.backward((1.0 / bsz) * grad);
                    epoch_sse += loss * static_cast<double>(item.y.size());
                    epoch_count += static_cast<double>(item.y.size());
                }
                adam_step(net.store(), config.adam, ++step);
            }
        }
        result.train_loss.push_back(epoch_count > 0 ? epoch_sse / epoch_count : 0.0);

        const double vloss = evaluate_loss(net, val);
        result.val_loss.push_back(vloss);

        if (vloss < best_val) {
            best_val = vloss;
            best_values = net.store().snapshot_values();
            result.best_epoch = epoch;
            epochs_since_best = 0;
        } else {
            ++epochs_since_best;
            if (epochs_since_best >= config.patience) break;
        }
        if (on_epoch && on_epoch(epoch, vloss)) break;
    }

    net.store().restore_values(best_values);
    if (stateful) net.reset_state();
    return result;
}

}  // namespace myo::nn
