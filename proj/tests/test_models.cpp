#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "myosynth/models.hpp"

#include "test_util.hpp"

using namespace myo;
using test::random_matrix;

namespace {

ArchConfig small_config(ArchitectureId arch) {
    ArchConfig cfg;
    cfg.arch = arch;
    cfg.feature_width = 6;
    cfg.input_dropout = 0.0;
    cfg.warmup_k = 3;
    cfg.rnnseq_units = 8;
    cfg.lstm_units = {8, 6};
    cfg.dense_units = {16, 8};
    cfg.cnn_filters = {6, 4};
    cfg.cnn_kernels = {4, 4};
    return cfg;
}

}  // namespace

TEST_CASE("architecture names round trip") {
    for (auto id : {ArchitectureId::RNN, ArchitectureId::RNNSEQ, ArchitectureId::FNN,
                    ArchitectureId::FNNSEQ, ArchitectureId::CNN})
        CHECK(arch_from_name(arch_name(id)) == id);
    CHECK_THROWS_AS(arch_from_name("mlp"), ValidationError);
}

TEST_CASE("parameter counts match hand-computed formulas") {
    ArchConfig cfg;  // full-scale defaults, 18 input features
    cfg.feature_width = 18;

    // RNN: LSTM 256/128/64 + TD dense 8.
    long rnn = 4L * 256 * (18 + 256 + 1) + 4L * 128 * (256 + 128 + 1) +
               4L * 64 * (128 + 64 + 1) + (64 + 1) * 8;
    CHECK(parameter_count(build_rnn(cfg)) == rnn);

    // FNN: 512/256/128 ReLU + dense 8.
    long fnn = (18 + 1) * 512L + (512 + 1) * 256L + (256 + 1) * 128L + (128 + 1) * 8L;
    CHECK(parameter_count(build_fnn(cfg)) == fnn);

    // CNN: conv stack + TD dense 8.
    long cnn = 32L * 18 * 128 + 128 + 8L * 128 * 128 + 128 + 8L * 128 * 128 + 128 +
               4L * 128 * 128 + 128 + 4L * 128 * 64 + 64 + (64 + 1) * 8;
    CHECK(parameter_count(build_cnn(cfg)) == cnn);

    // RNNseq: single LSTM 128 + dense 8; train and predict twins are equal in size.
    long rnnseq = 4L * 128 * (18 + 128 + 1) + (128 + 1) * 8;
    RnnseqPair pair = build_rnnseq_pair(cfg);
    CHECK(parameter_count(pair.train_spec) == rnnseq);
    CHECK(parameter_count(pair.predict_spec) == rnnseq);
}

TEST_CASE("rnnseq twins differ only in statefulness") {
    ArchConfig cfg = small_config(ArchitectureId::RNNSEQ);
    RnnseqPair pair = build_rnnseq_pair(cfg);
    CHECK(!pair.train_spec.layers[1].stateful);
    CHECK(!pair.train_spec.layers[1].return_sequences);
    CHECK(pair.predict_spec.layers[1].stateful);
    CHECK(pair.predict_spec.layers[1].return_sequences);
}

TEST_CASE("subsequences pick power-of-two warm-up lags in time order") {
    Rng rng(1);
    Matrix x = random_matrix(rng, 12, 3);
    Matrix y = random_matrix(rng, 12, 8);
    auto subs = make_subsequences(x, y, 3);  // lags 8, 4, 2, 1
    REQUIRE(subs.size() == 12);

    // t = 10: rows 2, 6, 8, 9, then 10 itself.
    const auto& s10 = subs[10];
    REQUIRE(s10.inputs.rows() == 5);
    for (std::size_t i = 0; i < 5; ++i) {
        const int expect[] = {2, 6, 8, 9, 10};
        CHECK(test::max_abs_diff(s10.inputs.row(i), x.row(expect[i])) == 0.0);
    }
    CHECK(test::max_abs_diff(Matrix(s10.target), Matrix(RowVector(y.row(10)))) == 0.0);

    // t = 0 has no valid lags: just the row itself.
    CHECK(subs[0].inputs.rows() == 1);
    CHECK(test::max_abs_diff(subs[0].inputs.row(0), x.row(0)) == 0.0);

    // t = 5: lags 4, 2, 1 fit; 8 does not.
    const auto& s5 = subs[5];
    REQUIRE(s5.inputs.rows() == 4);
    const int expect5[] = {1, 3, 4, 5};
    for (std::size_t i = 0; i < 4; ++i)
        CHECK(test::max_abs_diff(s5.inputs.row(i), x.row(expect5[i])) == 0.0);
}

TEST_CASE("lagged features clamp to the sequence start") {
    Rng rng(2);
    Matrix x = random_matrix(rng, 10, 2);
    Matrix lagged = make_lagged_features(x, {1, 2, 4, 8});
    REQUIRE(lagged.cols() == 10);

    // t = 9 pulls rows 8, 7, 5, 1.
    const int src9[] = {9, 8, 7, 5, 1};
    for (int i = 0; i < 5; ++i)
        CHECK(test::max_abs_diff(lagged.block(9, 2 * i, 1, 2), x.row(src9[i])) == 0.0);

    // t = 0: everything clamps to row 0.
    for (int i = 0; i < 5; ++i)
        CHECK(test::max_abs_diff(lagged.block(0, 2 * i, 1, 2), x.row(0)) == 0.0);

    // t = 3: lags 4 and 8 clamp.
    const int src3[] = {3, 2, 1, 0, 0};
    for (int i = 0; i < 5; ++i)
        CHECK(test::max_abs_diff(lagged.block(3, 2 * i, 1, 2), x.row(src3[i])) == 0.0);
}

TEST_CASE("rnnseq stateful prediction equals the stateless net run on each prefix") {
    ArchConfig cfg = small_config(ArchitectureId::RNNSEQ);
    ArchSession session(cfg, 7);
    Rng rng(8);
    const int t_len = 25;
    Matrix x = random_matrix(rng, t_len, cfg.feature_width);

    Matrix online = session.predict(x);
    REQUIRE(online.rows() == t_len);
    REQUIRE(online.cols() == 8);

    // The training twin shares the parameters: running it fresh on the prefix
    // 0..t reproduces the streamed output at t.
    for (int t = 0; t < t_len; ++t) {
        session.train_network().reset_state();
        Matrix offline = session.train_network().forward(x.topRows(t + 1), false, nullptr);
        REQUIRE(offline.rows() == 1);
        CHECK(test::max_abs_diff(offline.row(0), online.row(t)) < 1e-12);
    }
}

TEST_CASE("prediction is repeatable and shape-correct for every architecture") {
    Rng rng(9);
    for (auto arch : {ArchitectureId::RNN, ArchitectureId::RNNSEQ, ArchitectureId::FNN,
                      ArchitectureId::FNNSEQ, ArchitectureId::CNN}) {
        ArchConfig cfg = small_config(arch);
        ArchSession session(cfg, 10);
        Matrix x = random_matrix(rng, 30, cfg.feature_width);
        Matrix a = session.predict(x);
        Matrix b = session.predict(x);
        CHECK(a.rows() == 30);
        CHECK(a.cols() == 8);
        CHECK(test::max_abs_diff(a, b) == 0.0);
    }
}

TEST_CASE("pointwise architectures commute with row permutations") {
    Rng rng(11);
    ArchConfig cfg = small_config(ArchitectureId::FNN);
    ArchSession session(cfg, 12);
    Matrix x = random_matrix(rng, 20, cfg.feature_width);
    Matrix y = session.predict(x);
    Matrix rev = x.colwise().reverse();
    Matrix yrev = session.predict(rev);
    CHECK(test::max_abs_diff(yrev.colwise().reverse(), y) < 1e-12);
}

TEST_CASE("cnn outputs depend only on the receptive field") {
    ArchConfig cfg = small_config(ArchitectureId::CNN);  // kernels 4, 4
    ArchSession session(cfg, 13);
    Rng rng(14);
    Matrix x = random_matrix(rng, 40, cfg.feature_width);
    Matrix base = session.predict(x);

    Matrix xp = x;
    const int t0 = 20;
    xp.row(t0).array() += 0.5;
    Matrix pert = session.predict(xp);

    // Two kernel-4 layers: same-padding left reach 1 each, right reach 2 each,
    // so input t0 can touch outputs in [t0 - 4, t0 + 2] only.
    for (int t = 0; t < 40; ++t) {
        const double d = (pert.row(t) - base.row(t)).cwiseAbs().maxCoeff();
        if (t < t0 - 4 || t > t0 + 2) CHECK(d == 0.0);
    }
    CHECK((pert.row(t0) - base.row(t0)).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("cnn rejects sequences shorter than its largest kernel") {
    ArchConfig cfg = small_config(ArchitectureId::CNN);
    ArchSession session(cfg, 15);
    Rng rng(16);
    CHECK_THROWS_AS(session.predict(random_matrix(rng, 3, cfg.feature_width)),
                    ValidationError);
}

TEST_CASE("train item construction per architecture") {
    Rng rng(17);
    Matrix x = random_matrix(rng, 10, 6);
    Matrix y = random_matrix(rng, 10, 8);
    std::vector<std::pair<Matrix, Matrix>> seqs = {{x, y}};

    auto items_for = [&](ArchitectureId arch) {
        return ArchSession(small_config(arch), 18).make_train_items(seqs);
    };
    CHECK(items_for(ArchitectureId::RNN).size() == 1);
    CHECK(items_for(ArchitectureId::CNN).size() == 1);
    CHECK(items_for(ArchitectureId::FNN).size() == 10);
    CHECK(items_for(ArchitectureId::FNNSEQ).size() == 10);
    CHECK(items_for(ArchitectureId::FNNSEQ)[0].x.cols() == 30);  // 5 x feature width
    auto rs = items_for(ArchitectureId::RNNSEQ);
    CHECK(rs.size() == 10);  // one subsequence per timestep
    CHECK(rs[9].x.rows() == 5);  // warm-up 8,4,2,1 + the step itself
    CHECK(rs[9].y.rows() == 1);
}

TEST_CASE("arch config JSON round trip") {
    ArchConfig cfg = small_config(ArchitectureId::FNNSEQ);
    cfg.lag_list = {1, 3, 9};
    ArchConfig back = ArchConfig::from_json(cfg.to_json());
    CHECK(back.to_json() == cfg.to_json());
    CHECK(back.arch == ArchitectureId::FNNSEQ);
    CHECK(back.lag_list == std::vector<int>{1, 3, 9});
}

TEST_CASE("default training configs follow the architecture") {
    CHECK(ArchSession(small_config(ArchitectureId::RNN), 1).default_train_config().batch_size == 1);
    CHECK(!ArchSession(small_config(ArchitectureId::RNN), 1).default_train_config().shuffle);
    CHECK(ArchSession(small_config(ArchitectureId::RNNSEQ), 1).default_train_config().batch_size ==
          64);
    CHECK(ArchSession(small_config(ArchitectureId::FNN), 1).default_train_config().batch_size ==
          128);
    CHECK(ArchSession(small_config(ArchitectureId::CNN), 1).default_train_config().batch_size == 4);
}
