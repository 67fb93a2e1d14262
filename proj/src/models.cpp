#include "myosynth/models.hpp"

#include <algorithm>

namespace myo {

using nn::Activation;
using nn::LayerKind;
using nn::LayerSpec;
using nn::NetworkSpec;

std::string arch_name(ArchitectureId id) {
    switch (id) {
        case ArchitectureId::RNN: return "rnn";
        case ArchitectureId::RNNSEQ: return "rnnseq";
        case ArchitectureId::FNN: return "fnn";
        case ArchitectureId::FNNSEQ: return "fnnseq";
        case ArchitectureId::CNN: return "cnn";
    }
    throw InternalError("unknown architecture id");
}

ArchitectureId arch_from_name(const std::string& name) {
    if (name == "rnn") return ArchitectureId::RNN;
    if (name == "rnnseq") return ArchitectureId::RNNSEQ;
    if (name == "fnn") return ArchitectureId::FNN;
    if (name == "fnnseq") return ArchitectureId::FNNSEQ;
    if (name == "cnn") return ArchitectureId::CNN;
    throw ValidationError("unknown architecture: " + name);
}

nn::json ArchConfig::to_json() const {
    return nn::json{{"arch", arch_name(arch)},
                    {"feature_width", feature_width},
                    {"input_dropout", input_dropout},
                    {"warmup_k", warmup_k},
                    {"rnnseq_units", rnnseq_units},
                    {"lstm_units", lstm_units},
                    {"dense_units", dense_units},
                    {"cnn_filters", cnn_filters},
                    {"cnn_kernels", cnn_kernels},
                    {"lag_list", lag_list}};
}

ArchConfig ArchConfig::from_json(const nn::json& j) {
    ArchConfig c;
    c.arch = arch_from_name(j.at("arch").get<std::string>());
    c.feature_width = j.at("feature_width").get<int>();
    c.input_dropout = j.value("input_dropout", c.input_dropout);
    c.warmup_k = j.value("warmup_k", c.warmup_k);
    c.rnnseq_units = j.value("rnnseq_units", c.rnnseq_units);
    c.lstm_units = j.value("lstm_units", c.lstm_units);
    c.dense_units = j.value("dense_units", c.dense_units);
    c.cnn_filters = j.value("cnn_filters", c.cnn_filters);
    c.cnn_kernels = j.value("cnn_kernels", c.cnn_kernels);
    c.lag_list = j.value("lag_list", c.lag_list);
    return c;
}

NetworkSpec build_rnn(const ArchConfig& cfg) {
    require(!cfg.lstm_units.empty(), "rnn: needs at least one LSTM layer");
    NetworkSpec spec;
    spec.input_width = cfg.feature_width;
    spec.layers.push_back({.kind = LayerKind::Dropout, .rate = cfg.input_dropout});
    for (int units : cfg.lstm_units) {
        LayerSpec l;
        l.kind = LayerKind::Lstm;
        l.units = units;
        l.stateful = true;
        l.return_sequences = true;
        spec.layers.push_back(l);
    }
    LayerSpec out;
    out.kind = LayerKind::TimeDistributedDense;
    out.units = kEmgChannels;
    out.activation = Activation::Linear;
    spec.layers.push_back(out);
    return spec;
}

RnnseqPair build_rnnseq_pair(const ArchConfig& cfg) {
    RnnseqPair pair;
    for (bool predict : {false, true}) {
        NetworkSpec spec;
        spec.input_width = cfg.feature_width;
        spec.layers.push_back({.kind = LayerKind::Dropout, .rate = cfg.input_dropout});
        LayerSpec lstm;
        lstm.kind = LayerKind::Lstm;
        lstm.units = cfg.rnnseq_units;
        lstm.stateful = predict;
        lstm.return_sequences = predict;  // fed one timestep at a time
        spec.layers.push_back(lstm);
        LayerSpec out;
        out.kind = LayerKind::Dense;
        out.units = kEmgChannels;
        out.activation = Activation::Linear;
        spec.layers.push_back(out);
        (predict ? pair.predict_spec : pair.train_spec) = spec;
    }
    return pair;
}

NetworkSpec build_fnn(const ArchConfig& cfg) {
    NetworkSpec spec;
    spec.input_width = cfg.feature_width;
    spec.layers.push_back({.kind = LayerKind::Dropout, .rate = cfg.input_dropout});
    for (int units : cfg.dense_units) {
        LayerSpec l;
        l.kind = LayerKind::Dense;
        l.units = units;
        l.activation = Activation::ReLU;
        spec.layers.push_back(l);
    }
    LayerSpec out;
    out.kind = LayerKind::Dense;
    out.units = kEmgChannels;
    out.activation = Activation::Linear;
    spec.layers.push_back(out);
    return spec;
}

NetworkSpec build_cnn(const ArchConfig& cfg) {
    require(cfg.cnn_filters.size() == cfg.cnn_kernels.size(),
            "cnn: filters and kernels must have equal length");
    NetworkSpec spec;
    spec.input_width = cfg.feature_width;
    spec.layers.push_back({.kind = LayerKind::Dropout, .rate = cfg.input_dropout});
    for (std::size_t i = 0; i < cfg.cnn_filters.size(); ++i) {
        LayerSpec l;
        l.kind = LayerKind::Conv1d;
        l.filters = cfg.cnn_filters[i];
        l.kernel_size = cfg.cnn_kernels[i];
        spec.layers.push_back(l);
    }
    LayerSpec out;
    out.kind = LayerKind::TimeDistributedDense;
    out.units = kEmgChannels;
    out.activation = Activation::Linear;
    spec.layers.push_back(out);
    return spec;
}

long parameter_count(const NetworkSpec& spec) {
    long total = 0;
    long in = spec.input_width;
    for (const auto& l : spec.layers) {
        switch (l.kind) {
            case LayerKind::Dense:
            case LayerKind::TimeDistributedDense:
                total += (in + 1) * l.units;
                in = l.units;
                break;
            case LayerKind::Lstm:
                total += 4L * l.units * (in + l.units + 1);
                in = l.units;
                break;
            case LayerKind::Conv1d:
                total += static_cast<long>(l.kernel_size) * in * l.filters + l.filters;
                in = l.filters;
                break;
            case LayerKind::Dropout:
                break;
        }
    }
    return total;
}

std::vector<SubSequence> make_subsequences(const Matrix& features, const Matrix& targets,
                                           int max_lag_exponent) {
    const int t_len = static_cast<int>(features.rows());
    require(t_len >= 1, "make_subsequences: empty sequence");
    require(targets.rows() == t_len, "make_subsequences: feature/target length mismatch");
    require(max_lag_exponent >= 0, "make_subsequences: max_lag_exponent must be >= 0");

    std::vector<SubSequence> out;
    out.reserve(t_len);
    for (int t = 0; t < t_len; ++t) {
        std::vector<int> rows;
        for (int e = max_lag_exponent; e >= 0; --e) {
            const int lag = 1 << e;
            if (t - lag >= 0) rows.push_back(t - lag);
        }
        rows.push_back(t);
        SubSequence s;
        s.inputs.resize(static_cast<int>(rows.size()), features.cols());
        for (std::size_t r = 0; r < rows.size(); ++r) s.inputs.row(r) = features.row(rows[r]);
        s.target = targets.row(t);
        out.push_back(std::move(s));
    }
    return out;
}

Matrix make_lagged_features(const Matrix& features, const std::vector<int>& lags) {
    const int t_len = static_cast<int>(features.rows());
    const int f = static_cast<int>(features.cols());
    Matrix out(t_len, f * static_cast<int>(lags.size() + 1));
    for (int t = 0; t < t_len; ++t) {
        out.block(t, 0, 1, f) = features.row(t);
        for (std::size_t i = 0; i < lags.size(); ++i) {
            const int src = std::max(0, t - lags[i]);
            out.block(t, f * static_cast<int>(i + 1), 1, f) = features.row(src);
        }
    }
    return out;
}

// ---- ArchSession ----

namespace {

NetworkSpec training_spec_for(const ArchConfig& cfg) {
    switch (cfg.arch) {
        case ArchitectureId::RNN: return build_rnn(cfg);
        case ArchitectureId::RNNSEQ: return build_rnnseq_pair(cfg).train_spec;
        case ArchitectureId::FNN: return build_fnn(cfg);
        case ArchitectureId::FNNSEQ: {
            ArchConfig widened = cfg;
            widened.feature_width =
                cfg.feature_width * static_cast<int>(cfg.lag_list.size() + 1);
            return build_fnn(widened);
        }
        case ArchitectureId::CNN: return build_cnn(cfg);
    }
    throw InternalError("unknown architecture id");
}

}  // namespace

ArchSession::ArchSession(const ArchConfig& cfg, std::uint64_t init_seed) : cfg_(cfg) {
    build(nn::init_weights(training_spec_for(cfg), init_seed));
}

ArchSession::ArchSession(const ArchConfig& cfg, nn::ParamStore params) : cfg_(cfg) {
    build(std::move(params));
}

void ArchSession::build(nn::ParamStore params) {
    const NetworkSpec tspec = training_spec_for(cfg_);
    train_net_ = std::make_unique<nn::Network>(tspec, params);
    if (cfg_.arch == ArchitectureId::RNNSEQ) {
        // Prediction twin shares the very same Param objects.
        predict_net_ = std::make_unique<nn::Network>(build_rnnseq_pair(cfg_).predict_spec,
                                                     train_net_->store());
    }
}

nn::ParamStore& ArchSession::params() { return train_net_->store(); }

nn::Network& ArchSession::predict_network() {
    if (!predict_net_) throw InternalError("only RNNseq has a separate prediction network");
    return *predict_net_;
}

Matrix ArchSession::predict(const Matrix& features) {
    require(features.cols() == cfg_.feature_width, "predict: feature width mismatch");
    const int t_len = static_cast<int>(features.rows());
    switch (cfg_.arch) {
        case ArchitectureId::RNN: {
            train_net_->reset_state();
            Matrix out = train_net_->forward(features, false, nullptr);
            train_net_->reset_state();
            return out;
        }
        case ArchitectureId::RNNSEQ: {
            predict_net_->reset_state();
            Matrix out(t_len, kEmgChannels);
            for (int t = 0; t < t_len; ++t)
                out.row(t) = predict_net_->forward(features.row(t), false, nullptr).row(0);
            predict_net_->reset_state();
            return out;
        }
        case ArchitectureId::FNN:
            return train_net_->forward(features, false, nullptr);
        case ArchitectureId::FNNSEQ:
            return train_net_->forward(make_lagged_features(features, cfg_.lag_list), false,
                                       nullptr);
        case ArchitectureId::CNN: {
            int max_kernel = 0;
            for (int k : cfg_.cnn_kernels) max_kernel = std::max(max_kernel, k);
            if (t_len < max_kernel) throw ValidationError("sequence too short for CNN");
            return train_net_->forward(features, false, nullptr);
        }
    }
    throw InternalError("unknown architecture id");
}

std::vector<nn::TrainItem> ArchSession::make_train_items(
    const std::vector<std::pair<Matrix, Matrix>>& sequences) const {
    std::vector<nn::TrainItem> items;
    switch (cfg_.arch) {
        case ArchitectureId::RNN:
        case ArchitectureId::CNN:
            for (const auto& [x, y] : sequences) items.push_back({x, y});
            break;
        case ArchitectureId::RNNSEQ:
            for (const auto& [x, y] : sequences) {
                for (auto& s : make_subsequences(x, y, cfg_.warmup_k)) {
                    Matrix target(1, s.target.size());
                    target.row(0) = s.target;
                    items.push_back({std::move(s.inputs), std::move(target)});
                }
            }
            break;
        case ArchitectureId::FNN:
            for (const auto& [x, y] : sequences)
                for (int t = 0; t < x.rows(); ++t) items.push_back({x.row(t), y.row(t)});
            break;
        case ArchitectureId::FNNSEQ:
            for (const auto& [x, y] : sequences) {
                Matrix lagged = make_lagged_features(x, cfg_.lag_list);
                for (int t = 0; t < lagged.rows(); ++t)
                    items.push_back({lagged.row(t), y.row(t)});
            }
            break;
    }
    return items;
}

nn::TrainConfig ArchSession::default_train_config() const {
    nn::TrainConfig c;
    switch (cfg_.arch) {
        case ArchitectureId::RNN:
            c.batch_size = 1;
            c.shuffle = false;  // stateful carry follows dataset order
            break;
        case ArchitectureId::RNNSEQ:
            c.batch_size = 64;
            break;
        case ArchitectureId::FNN:
        case ArchitectureId::FNNSEQ:
            c.batch_size = 128;
            break;
        case ArchitectureId::CNN:
            c.batch_size = 4;
            break;
    }
    return c;
}

nn::FitResult ArchSession::fit(const std::vector<std::pair<Matrix, Matrix>>& train,
                               const std::vector<std::pair<Matrix, Matrix>>& val,
                               const nn::TrainConfig& config,
                               const nn::EpochCallback& on_epoch) {
    return nn::fit(*train_net_, make_train_items(train), make_train_items(val), config,
                   on_epoch);
}

}  // namespace myo
