// Acceptance suite: one criterion (or criterion group) per invocation,
// selected by argv[1]; prints a PASS/FAIL line per criterion and exits
// non-zero if any selected criterion fails.

#include "myosynth/evaluation.hpp"
#include "myosynth/io.hpp"
#include "myosynth/models.hpp"
#include "myosynth/nn/serialize.hpp"
#include "myosynth/preprocess.hpp"
#include "myosynth/regimes.hpp"
#include "myosynth/synth.hpp"

#include "test_util.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace myo;
using test::random_matrix;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

using Criterion = std::function<Outcome()>;

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double x) {
    std::ostringstream ss;
    ss.precision(4);
    ss << x;
    return ss.str();
}

// ---------------------------------------------------------------- criterion 1

double gradient_check(const nn::NetworkSpec& spec, int t_len, std::uint64_t seed) {
    Rng rng(seed);
    nn::Network net(spec, nn::init_weights(spec, seed));
    for (auto& p : net.store().params)
        for (int r = 0; r < p->value.rows(); ++r)
            for (int c = 0; c < p->value.cols(); ++c) p->value(r, c) += 0.05 * rng.normal();

    const Matrix x = random_matrix(rng, t_len, spec.input_width);
    const Matrix y = random_matrix(rng, t_len, spec.output_width());

    auto loss_of = [&]() {
        net.reset_state();
        return nn::mse_loss(net.forward(x, true, nullptr), y);
    };
    net.reset_state();
    net.store().zero_grads();
    auto [loss, dpred] = nn::mse_loss_grad(net.forward(x, true, nullptr), y);
    (void)loss;
    net.backward(dpred);

    const double h = 1e-5;
    double worst = 0.0;
    for (auto& p : net.store().params) {
        for (int r = 0; r < p->value.rows(); ++r) {
            for (int c = 0; c < p->value.cols(); ++c) {
                const double orig = p->value(r, c);
                p->value(r, c) = orig + h;
                const double lp = loss_of();
                p->value(r, c) = orig - h;
                const double lm = loss_of();
                p->value(r, c) = orig;
                const double numeric = (lp - lm) / (2.0 * h);
                const double denom = std::max(1.0, std::abs(p->grad(r, c)) + std::abs(numeric));
                worst = std::max(worst, std::abs(p->grad(r, c) - numeric) / denom);
            }
        }
    }
    return worst;
}

Outcome criterion_1() {
    const auto t0 = std::chrono::steady_clock::now();
    using nn::Activation;
    using nn::LayerKind;
    using nn::LayerSpec;

    auto dense = [](int units, Activation act, bool td = false) {
        LayerSpec l;
        l.kind = td ? LayerKind::TimeDistributedDense : LayerKind::Dense;
        l.units = units;
        l.activation = act;
        return l;
    };
    auto lstm = [](int units, bool stateful) {
        LayerSpec l;
        l.kind = LayerKind::Lstm;
        l.units = units;
        l.stateful = stateful;
        l.return_sequences = true;
        return l;
    };
    auto conv = [](int filters, int kernel) {
        LayerSpec l;
        l.kind = LayerKind::Conv1d;
        l.filters = filters;
        l.kernel_size = kernel;
        return l;
    };

    // Shapes stay at or below [timesteps x in x units] = [2..5 x <=8 x <=6].
    double worst = 0.0;
    {
        nn::NetworkSpec spec;
        spec.input_width = 8;
        spec.layers = {dense(6, Activation::ReLU), dense(3, Activation::Linear)};
        worst = std::max(worst, gradient_check(spec, 2, 101));
    }
    {
        nn::NetworkSpec spec;
        spec.input_width = 7;
        spec.layers = {dense(5, Activation::ReLU), dense(2, Activation::Linear, true)};
        worst = std::max(worst, gradient_check(spec, 4, 102));
    }
    {
        // LSTM unrolled over 5 steps, both stateful and not.
        nn::NetworkSpec spec;
        spec.input_width = 8;
        spec.layers = {lstm(6, false), dense(2, Activation::Linear, true)};
        worst = std::max(worst, gradient_check(spec, 5, 103));
        spec.layers = {lstm(5, true), lstm(4, true), dense(2, Activation::Linear, true)};
        worst = std::max(worst, gradient_check(spec, 5, 104));
    }
    {
        nn::NetworkSpec spec;
        spec.input_width = 6;
        spec.layers = {conv(5, 4), conv(4, 3), dense(2, Activation::Linear, true)};
        worst = std::max(worst, gradient_check(spec, 5, 105));
    }

    const double elapsed = seconds_since(t0);
    Outcome o;
    o.pass = worst <= 1e-4 && elapsed < 10.0;
    o.detail = "worst relative error " + fmt(worst) + ", " + fmt(elapsed) + " s";
    return o;
}

// ---------------------------------------------------------------- criterion 2

Outcome criterion_2() {
    Rng rng(2);
    Outcome o;
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        Matrix target = random_matrix(rng, 40 + static_cast<int>(rng.index(60)), 8, 0.05, 1.0);

        auto z_exact = z_score(target, target);
        for (const auto& c : z_exact.per_channel)
            if (!c.has_value() || *c != 100.0) o.pass = false;

        auto z_zero = z_score(Matrix::Zero(target.rows(), 8), target);
        for (const auto& c : z_zero.per_channel)
            if (!c.has_value() || *c != 0.0) o.pass = false;

        for (double k : {0.0, 1.0, 2.0, 3.0}) {
            auto z = z_score(k * target, target);
            const double expect = 100.0 * (1.0 - (k - 1.0) * (k - 1.0));
            for (const auto& c : z.per_channel) {
                if (!c.has_value()) o.pass = false;
                worst = std::max(worst, std::abs(*c - expect));
            }
        }
    }
    if (worst > 1e-9) o.pass = false;
    o.detail = "pred=target and pred=0 exact; scaled-target worst deviation " + fmt(worst);
    return o;
}

// ---------------------------------------------------------------- criterion 3

Outcome criterion_3() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(3);
    Outcome o;
    double worst_rms = 0.0, worst_savgol = 0.0, worst_diff = 0.0, worst_norm = 0.0;

    for (int trial = 0; trial < 100; ++trial) {
        const int n = 150 + static_cast<int>(rng.index(150));
        const double rate = 500.0 + 100.0 * rng.uniform();
        SampledSignal s;
        s.rate_hz = rate;
        s.samples = random_matrix(rng, n, 2, -2.0, 2.0);

        // RMS envelope vs direct evaluation of the definition.
        SampledSignal env = rms_envelope(s, 200.0, 60.0);
        const double w = 0.2;
        for (int j = 0; j < env.length(); ++j) {
            const double tc = j / 60.0;
            for (int c = 0; c < 2; ++c) {
                double ss = 0.0;
                int count = 0;
                for (int i = 0; i < n; ++i) {
                    if (i >= (tc - w / 2) * rate - 1e-9 && i <= (tc + w / 2) * rate + 1e-9) {
                        ss += s.samples(i, c) * s.samples(i, c);
                        ++count;
                    }
                }
                worst_rms = std::max(
                    worst_rms, std::abs(env.samples(j, c) - std::sqrt(ss / count)));
            }
        }

        // Savitzky-Golay: exact on polynomials of degree <= 3.
        Matrix poly(n, 1);
        const double a = rng.uniform(-1, 1), b = rng.uniform(-1, 1);
        const double c2 = rng.uniform(-1, 1), c3 = rng.uniform(-1, 1);
        for (int i = 0; i < n; ++i) {
            const double x = i * 0.01;
            poly(i, 0) = a + b * x + c2 * x * x + c3 * x * x * x;
        }
        SampledSignal ps;
        ps.rate_hz = 60.0;
        ps.samples = poly;
        SampledSignal smooth = savgol_smooth(ps, 3, 31);
        worst_savgol =
            std::max(worst_savgol, (smooth.samples - poly).cwiseAbs().maxCoeff());

        // Forward difference against its definition.
        SampledSignal d = forward_difference(s);
        for (int i = 0; i < n - 1; ++i)
            for (int c = 0; c < 2; ++c)
                worst_diff = std::max(worst_diff, std::abs(d.samples(i, c) -
                                                           (s.samples(i + 1, c) -
                                                            s.samples(i, c))));
        worst_diff = std::max(
            worst_diff, (d.samples.row(n - 1) - d.samples.row(n - 2)).cwiseAbs().maxCoeff());

        // Normalization round trip inside the fitted range.
        NormalizationParams p = fit_normalization(std::vector<Matrix>{s.samples}, -1.0, 1.0);
        Matrix back = invert_normalization(apply_normalization(s.samples, p), p);
        worst_norm = std::max(worst_norm, (back - s.samples).cwiseAbs().maxCoeff());
    }

    const double elapsed = seconds_since(t0);
    o.pass = worst_rms < 1e-12 && worst_savgol <= 1e-9 && worst_diff == 0.0 &&
             worst_norm < 1e-12 && elapsed < 10.0;
    o.detail = "rms " + fmt(worst_rms) + ", savgol " + fmt(worst_savgol) + ", diff " +
               fmt(worst_diff) + ", norm " + fmt(worst_norm) + ", " + fmt(elapsed) + " s";
    return o;
}

// ---------------------------------------------------------------- criterion 4

Outcome criterion_4() {
    Outcome o;
    Rng rng(4);

    // Arbitrary sequence splits with carried state.
    nn::NetworkSpec spec;
    spec.input_width = 6;
    {
        nn::LayerSpec l1, l2, out;
        l1.kind = nn::LayerKind::Lstm;
        l1.units = 12;
        l1.stateful = true;
        l1.return_sequences = true;
        l2 = l1;
        l2.units = 8;
        out.kind = nn::LayerKind::TimeDistributedDense;
        out.units = 3;
        spec.layers = {l1, l2, out};
    }
    nn::Network net(spec, nn::init_weights(spec, 44));
    double worst_split = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const int t_len = 30 + static_cast<int>(rng.index(50));
        Matrix x = random_matrix(rng, t_len, 6);
        net.reset_state();
        Matrix whole = net.forward(x, false, nullptr);

        net.reset_state();
        Matrix stitched(t_len, 3);
        int pos = 0;
        while (pos < t_len) {
            const int chunk =
                std::min<int>(t_len - pos, 1 + static_cast<int>(rng.index(12)));
            stitched.middleRows(pos, chunk) =
                net.forward(x.middleRows(pos, chunk), false, nullptr);
            pos += chunk;
        }
        worst_split = std::max(worst_split, (whole - stitched).cwiseAbs().maxCoeff());
    }

    // RNNseq: offline whole-sequence prediction vs online streaming, both
    // round-tripped through CSV.
    test::TempDir tmp("acceptance_c4");
    ArchConfig cfg;
    cfg.arch = ArchitectureId::RNNSEQ;
    cfg.feature_width = 6;
    cfg.input_dropout = 0.0;
    cfg.rnnseq_units = 16;
    ArchSession session(cfg, 45);
    Matrix x = random_matrix(rng, 200, 6);

    Matrix offline = session.predict(x);
    nn::Network& twin = session.predict_network();
    twin.reset_state();
    Matrix online(200, 8);
    for (int t = 0; t < 200; ++t)
        online.row(t) = twin.forward(x.row(t), false, nullptr).row(0);
    twin.reset_state();

    std::vector<std::string> names;
    for (int i = 1; i <= 8; ++i) names.push_back("emg" + std::to_string(i));
    write_matrix_csv(tmp.sub("offline.csv"), offline, names, 60.0);
    write_matrix_csv(tmp.sub("online.csv"), online, names, 60.0);
    const double worst_csv = (read_matrix_csv(tmp.sub("offline.csv")) -
                              read_matrix_csv(tmp.sub("online.csv")))
                                 .cwiseAbs()
                                 .maxCoeff();

    o.pass = worst_split <= 1e-12 && worst_csv <= 1e-9;
    o.detail = "split carry " + fmt(worst_split) + ", online/offline CSV " + fmt(worst_csv);
    return o;
}

// ---------------------------------------------------------------- criterion 5

/// One synthetic trial with a near-memoryless forward model, preprocessed the
/// same way the pipeline would.
std::pair<Matrix, Matrix> capacity_trial() {
    GenConfig cfg;
    cfg.noise_sigma = 0.0;
    auto templates = make_default_templates(4);
    ForwardEmgModel model = make_default_emg_model(Rng::derive(cfg.seed, 100));
    model.tau_ms = 1.0;  // keep the feature-to-envelope map essentially pointwise
    TrialRecording trial =
        gen_trial(cfg, templates[1], model, identity_transform(), "s01", 1);

    Matrix features = assemble_motion_features(trial, InputConfig::parse("all"));
    NormalizationParams fn = fit_normalization(std::vector<Matrix>{features}, -1.0, 1.0);
    NormalizationParams tn =
        fit_normalization(std::vector<Matrix>{trial.emg.samples}, 0.0, 1.0);
    return {apply_normalization(features, fn),
            apply_normalization(trial.emg.samples, tn)};
}

Outcome criterion_5() {
    auto [features, targets] = capacity_trial();
    const int t_len = static_cast<int>(features.rows());

    Outcome o;
    std::ostringstream detail;
    for (auto arch : {ArchitectureId::RNN, ArchitectureId::RNNSEQ, ArchitectureId::FNN,
                      ArchitectureId::FNNSEQ, ArchitectureId::CNN}) {
        const auto t0 = std::chrono::steady_clock::now();
        ArchConfig cfg;
        cfg.arch = arch;
        cfg.feature_width = 18;
        cfg.input_dropout = 0.0;  // overfitting on purpose
        cfg.lstm_units = {64, 32};
        // The sub-sequence scheme trains on short lagged windows but predicts
        // by streaming the full trial; a small LSTM with a hot learning rate
        // converges to the input-driven solution both distributions share.
        cfg.rnnseq_units = 8;
        cfg.warmup_k = 7;
        cfg.dense_units = {128, 64};
        cfg.cnn_filters = {64, 64, 32};
        cfg.cnn_kernels = {16, 8, 4};

        ArchSession session(cfg, 55);
        nn::TrainConfig tc = session.default_train_config();
        tc.seed = 55;
        tc.patience = 500;
        double lr = 0.005;
        if (arch == ArchitectureId::FNN || arch == ArchitectureId::FNNSEQ) lr = 0.002;
        if (arch == ArchitectureId::RNNSEQ) lr = 0.03;
        tc.adam.learning_rate = lr;

        std::vector<std::pair<Matrix, Matrix>> seqs = {{features, targets}};
        double z = -1e9;
        int epochs = 0;
        while (epochs < 500) {
            tc.max_epochs = 25;
            session.fit(seqs, seqs, tc);
            epochs += 25;
            z = z_score(session.predict(features), targets).average;
            if (z >= 99.0) break;
        }
        const double elapsed = seconds_since(t0);
        const bool ok = z >= 99.0 && elapsed < 300.0;
        if (!ok) o.pass = false;
        detail << arch_name(arch) << " Z=" << fmt(z) << " (" << epochs << " ep, "
               << fmt(elapsed) << " s) ";
        (void)t_len;
    }
    o.detail = detail.str();
    return o;
}

// ------------------------------------------------------------ criteria 6 & 7

struct TransferSetup {
    ProcessedDataset ds;
    SplitPlan general_plan;
    SplitPlan subject_plan;  // the held-out subject's own split
    ArchConfig arch;
    nn::TrainConfig tc;
};

TransferSetup transfer_setup(const std::string& root) {
    GenConfig gen;
    gen.n_subjects = 5;
    gen.n_motions = 5;
    gen.n_reps = 18;

    // Hand-rolled corpus: the held-out subject gets a strong channel rotation
    // (an electrode-shift analogue) on top of the usual gain/offset/gamma
    // variation, so a model trained on the other subjects misassigns channels.
    auto templates = make_default_templates(gen.n_motions);
    ForwardEmgModel model = make_default_emg_model(Rng::derive(gen.seed, 100));
    RawDataset raw;
    raw.root = root;
    raw.designated_new_motion = templates.back().motion_id;
    raw.designated_held_out_subject = "s05";
    for (int i = 0; i < gen.n_subjects; ++i) {
        Rng srng(Rng::derive(gen.seed, 200, i));
        const bool held_out = i == gen.n_subjects - 1;
        SubjectTransform tr = random_transform(srng, held_out ? 1.0 : 0.25);
        if (held_out) {
            Matrix rot = Matrix::Zero(8, 8);
            for (int r = 0; r < 8; ++r) rot(r, (r + 3) % 8) = 1.0;
            tr.mixing = 0.2 * Matrix::Identity(8, 8) + 0.8 * rot;
        }
        tr.noise_sigma = gen.noise_sigma;
        const std::string subject = "s0" + std::to_string(i + 1);
        for (const auto& tmpl : templates)
            for (int rep = 1; rep <= gen.n_reps; ++rep) {
                TrialRecording t = gen_trial(gen, tmpl, model, tr, subject, rep);
                save_raw_trial(root, t);
                raw.trials.push_back({subject, tmpl.motion_id, rep});
            }
    }
    save_raw_manifest(raw);

    PreprocessOptions opts;
    opts.config = InputConfig::parse("all");
    TransferSetup s;
    s.ds = preprocess_dataset(raw, opts);

    std::vector<TrialKey> all_keys, held_keys;
    for (const auto& t : s.ds.trials) {
        all_keys.push_back(t.key);
        if (t.key.subject == s.ds.designated_held_out_subject) held_keys.push_back(t.key);
    }
    s.general_plan = make_split(all_keys, s.ds.designated_held_out_subject,
                                s.ds.designated_new_motion, 42);
    s.subject_plan =
        make_split(held_keys, std::nullopt, s.ds.designated_new_motion, 42);
    s.general_plan.audit();
    s.subject_plan.audit();

    s.arch.arch = ArchitectureId::RNN;
    s.arch.feature_width = 18;
    s.arch.lstm_units = {64, 32};  // reduced scale
    s.arch.input_dropout = 0.1;

    s.tc.batch_size = 1;
    s.tc.shuffle = false;
    s.tc.max_epochs = 30;
    s.tc.patience = 8;
    s.tc.adam.learning_rate = 0.003;
    s.tc.seed = 42;
    return s;
}

double z_on(const ProcessedDataset& ds, const ArchConfig& arch, const nn::ParamStore& params,
            const std::vector<TrialKey>& keys) {
    ArchSession session(arch, clone_params(params));
    std::vector<std::pair<Matrix, Matrix>> pairs;
    for (const auto& key : keys) {
        const ProcessedTrial& t = ds.find(key);
        pairs.push_back({session.predict(t.features), t.targets});
    }
    return evaluate_pairs(pairs).average_z;
}

Outcome criteria_6_7(bool& pass7, std::string& detail7) {
    test::TempDir tmp("acceptance_c67");
    TransferSetup s = transfer_setup(tmp.path());

    RegimeResult general = train_general(s.ds, s.general_plan, s.arch, s.tc);
    RegimeResult subject = train_subject_specific(s.ds, s.subject_plan, s.arch, s.tc);
    nn::TrainConfig ftc = s.tc;
    ftc.max_epochs = 40;
    RegimeResult pretrain = finetune(general.params, s.arch, s.ds, s.subject_plan, ftc);

    // Subject-transfer phenomenon: held-out subject's test split.
    const double z_general = z_on(s.ds, s.arch, general.params, s.subject_plan.test);
    const double z_subject = z_on(s.ds, s.arch, subject.params, s.subject_plan.test);
    const double z_pretrain = z_on(s.ds, s.arch, pretrain.params, s.subject_plan.test);

    Outcome o6;
    o6.pass = z_general <= z_subject - 10.0 && z_pretrain >= z_subject;
    o6.detail = "held-out subject Z: general " + fmt(z_general) + ", subject " +
                fmt(z_subject) + ", pretrain " + fmt(z_pretrain);

    // New-motion phenomenon: every regime scores lower on the held-out motion
    // than on the motions it trained on (the general model's trained-motion
    // reference is its own test split), and pretraining keeps a clear edge
    // over the general model on the new motion.
    const double z_general_own = z_on(s.ds, s.arch, general.params, s.general_plan.test);
    const double zn_general = z_on(s.ds, s.arch, general.params, s.subject_plan.new_motion);
    const double zn_subject = z_on(s.ds, s.arch, subject.params, s.subject_plan.new_motion);
    const double zn_pretrain = z_on(s.ds, s.arch, pretrain.params, s.subject_plan.new_motion);

    pass7 = zn_general < z_general_own && zn_subject < z_subject &&
            zn_pretrain < z_pretrain && zn_pretrain >= zn_general + 10.0;
    detail7 = "new-motion Z: general " + fmt(zn_general) + " (<" + fmt(z_general_own) +
              "), subject " + fmt(zn_subject) + " (<" + fmt(z_subject) + "), pretrain " +
              fmt(zn_pretrain) + " (<" + fmt(z_pretrain) + ")";
    return o6;
}

// ---------------------------------------------------------------- criterion 8

Outcome criterion_8() {
    test::TempDir tmp("acceptance_c8");
    GenConfig gen;
    gen.n_subjects = 1;
    gen.n_motions = 3;
    gen.n_reps = 18;
    gen_dataset(gen, tmp.path());
    RawDataset raw = load_raw_manifest(tmp.path());

    std::map<std::string, double> z_by_input;
    for (const char* input : {"all", "ang", "vel", "acc"}) {
        PreprocessOptions opts;
        opts.config = InputConfig::parse(input);
        ProcessedDataset ds = preprocess_dataset(raw, opts);

        std::vector<TrialKey> keys;
        for (const auto& t : ds.trials) keys.push_back(t.key);
        SplitPlan plan = make_split(keys, std::nullopt, ds.designated_new_motion, 42);

        ArchConfig arch;
        arch.arch = ArchitectureId::FNN;
        arch.feature_width = ds.config.feature_width();
        arch.dense_units = {128, 64};
        arch.input_dropout = 0.1;

        nn::TrainConfig tc;
        tc.batch_size = 128;
        tc.max_epochs = 40;
        tc.patience = 10;
        tc.seed = 42;
        RegimeResult r = train_general(ds, plan, arch, tc);
        z_by_input[input] = z_on(ds, arch, r.params, plan.new_motion);
    }

    Outcome o;
    o.pass = z_by_input["all"] >= z_by_input["ang"] &&
             z_by_input["all"] >= z_by_input["vel"] &&
             z_by_input["all"] >= z_by_input["acc"];
    o.detail = "new-motion Z: all " + fmt(z_by_input["all"]) + ", ang " +
               fmt(z_by_input["ang"]) + ", vel " + fmt(z_by_input["vel"]) + ", acc " +
               fmt(z_by_input["acc"]);
    return o;
}

// ---------------------------------------------------------------- criterion 9

Outcome criterion_9() {
    std::vector<TrialKey> keys;
    for (int s = 1; s <= 5; ++s)
        for (int m = 1; m <= 20; ++m)
            for (int r = 1; r <= 18; ++r) {
                char sb[8], mb[8];
                std::snprintf(sb, sizeof(sb), "s%02d", s);
                std::snprintf(mb, sizeof(mb), "m%02d", m);
                keys.push_back({sb, mb, r});
            }
    SplitPlan plan = make_split(keys, "s05", "m20", 42);
    plan.audit();

    Outcome o;
    // 15/2/1 per trainable group; 4 subjects x 19 motions.
    std::map<std::pair<std::string, std::string>, int> train_n, val_n, test_n;
    for (const auto& k : plan.train) ++train_n[{k.subject, k.motion}];
    for (const auto& k : plan.val) ++val_n[{k.subject, k.motion}];
    for (const auto& k : plan.test) ++test_n[{k.subject, k.motion}];
    if (train_n.size() != 4 * 19) o.pass = false;
    for (const auto& [g, n] : train_n)
        if (n != 15 || val_n[g] != 1 || test_n[g] != 2) o.pass = false;

    // Held-out subject and motion never appear in the trainable parts.
    for (const auto* part : {&plan.train, &plan.val, &plan.test})
        for (const auto& k : *part)
            if (k.subject == "s05" || k.motion == "m20") o.pass = false;

    // Trainable parts are pairwise disjoint and disjoint from the reserved
    // sets; the union covers the whole corpus. (The held-out subject's reps of
    // the held-out motion sit in both reserved sets by design.)
    std::set<TrialKey> trainable;
    for (const auto* part : {&plan.train, &plan.val, &plan.test})
        for (const auto& k : *part)
            if (!trainable.insert(k).second) o.pass = false;
    std::set<TrialKey> all = trainable;
    for (const auto* part : {&plan.new_motion, &plan.held_out_trials})
        for (const auto& k : *part) {
            if (trainable.count(k)) o.pass = false;
            all.insert(k);
        }
    if (all.size() != keys.size()) o.pass = false;

    // Tampered plans are rejected.
    SplitPlan bad = plan;
    bad.train.push_back(bad.held_out_trials.front());
    bool caught = false;
    try {
        bad.audit();
    } catch (const InternalError&) {
        caught = true;
    }
    if (!caught) o.pass = false;

    o.detail = "1440 reserved + " + std::to_string(plan.train.size()) + "/" +
               std::to_string(plan.val.size()) + "/" + std::to_string(plan.test.size()) +
               " train/val/test, audit enforces integrity";
    return o;
}

// --------------------------------------------------------------- criterion 10

Outcome criterion_10() {
    test::TempDir tmp("acceptance_c10");
    Rng rng(10);

    // Tiny but non-trivial training problem.
    ProcessedDataset ds;
    ds.config = InputConfig::parse("ang");
    ds.designated_new_motion = "m02";
    Matrix w = random_matrix(rng, 6, 8, 0.0, 0.4);
    for (const char* motion : {"m01", "m02"})
        for (int rep = 1; rep <= 18; ++rep) {
            ProcessedTrial t;
            t.key = {"s01", motion, rep};
            t.features = random_matrix(rng, 30, 6);
            t.targets = t.features * w;
            ds.trials.push_back(std::move(t));
        }
    std::vector<TrialKey> keys;
    for (const auto& t : ds.trials) keys.push_back(t.key);
    SplitPlan plan = make_split(keys, std::nullopt, "m02", 42);

    ArchConfig arch;
    arch.arch = ArchitectureId::FNN;
    arch.feature_width = 6;
    arch.input_dropout = 0.1;
    arch.dense_units = {16, 8};
    nn::TrainConfig tc;
    tc.batch_size = 32;
    tc.max_epochs = 8;
    tc.patience = 8;
    tc.seed = 42;

    auto run_and_save = [&](const std::string& path) {
        RegimeResult r = train_general(ds, plan, arch, tc);
        ArchSession session(arch, r.params);
        nn::WeightFile wf;
        wf.spec = session.train_spec();
        wf.store = clone_params(r.params);
        wf.seed = tc.seed;
        wf.metadata = {{"arch_config", arch.to_json()}};
        nn::save_weights(path, wf);
    };
    run_and_save(tmp.sub("a.json"));
    run_and_save(tmp.sub("b.json"));

    std::ifstream fa(tmp.sub("a.json"), std::ios::binary);
    std::ifstream fb(tmp.sub("b.json"), std::ios::binary);
    std::stringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    const bool identical = sa.str() == sb.str() && !sa.str().empty();

    // Serialization round trip preserves predictions bit-exactly.
    nn::WeightFile wf = nn::load_weights(tmp.sub("a.json"));
    ArchSession loaded(ArchConfig::from_json(wf.metadata.at("arch_config")), wf.store);
    nn::WeightFile wf2 = nn::load_weights(tmp.sub("b.json"));
    ArchSession orig(ArchConfig::from_json(wf2.metadata.at("arch_config")), wf2.store);
    Matrix x = random_matrix(rng, 50, 6);
    const double diff = (loaded.predict(x) - orig.predict(x)).cwiseAbs().maxCoeff();

    Outcome o;
    o.pass = identical && diff == 0.0;
    o.detail = std::string("weight files byte-identical: ") + (identical ? "yes" : "no") +
               ", prediction round-trip diff " + fmt(diff);
    return o;
}

// --------------------------------------------------------------- criterion 11

Outcome criterion_11() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(11);

    // Planted task: targets are a noisy linear map, so wider nets and the
    // right learning rate genuinely help.
    ProcessedDataset ds;
    ds.config = InputConfig::parse("ang");
    ds.designated_new_motion = "m02";
    Matrix w = random_matrix(rng, 6, 8, -0.3, 0.3);
    for (const char* motion : {"m01", "m02"})
        for (int rep = 1; rep <= 18; ++rep) {
            ProcessedTrial t;
            t.key = {"s01", motion, rep};
            t.features = random_matrix(rng, 40, 6);
            t.targets = t.features * w;
            for (int i = 0; i < t.targets.size(); ++i)
                t.targets.data()[i] += 0.01 * rng.normal();
            ds.trials.push_back(std::move(t));
        }
    std::vector<TrialKey> keys;
    for (const auto& t : ds.trials) keys.push_back(t.key);
    SplitPlan plan = make_split(keys, std::nullopt, "m02", 42);

    ArchConfig arch;
    arch.arch = ArchitectureId::FNN;
    arch.feature_width = 6;
    arch.input_dropout = 0.0;
    arch.dense_units = {16};
    nn::TrainConfig tc;
    tc.batch_size = 64;
    tc.seed = 42;

    SearchSpace space;
    space.fields = {
        {"units", {json(4), json(8), json(16), json(32)}},
        {"learning_rate", {json(0.0003), json(0.003), json(0.03)}},
        {"batch_size", {json(32), json(128)}},
    };
    const int max_epochs = 8;
    TuneEvaluator eval = make_arch_evaluator(ds, plan, arch, tc, max_epochs);

    // Exhaustive oracle over the whole 24-configuration space, no pruning.
    double exhaustive_best = std::numeric_limits<double>::infinity();
    auto no_stop = [](int, double) { return false; };
    for (const auto& u : space.fields[0].second)
        for (const auto& lr : space.fields[1].second)
            for (const auto& bs : space.fields[2].second) {
                Candidate c{{"units", u}, {"learning_rate", lr}, {"batch_size", bs}};
                auto losses = eval(c, no_stop);
                exhaustive_best = std::min(
                    exhaustive_best, *std::min_element(losses.begin(), losses.end()));
            }

    TuneOptions opts;
    opts.budget = 20;
    opts.max_epochs = max_epochs;
    TuneResult r = tune(space, opts, eval);

    // Pruning never discards the incumbent best: the returned winner matches
    // the minimum over every trial in the log, pruned or not.
    bool incumbent_safe = !r.log.empty();
    double log_min = std::numeric_limits<double>::infinity();
    for (const auto& trial : r.log) log_min = std::min(log_min, trial.final_score);
    if (r.best_score != log_min) incumbent_safe = false;
    bool winner_logged = false;
    for (const auto& trial : r.log)
        if (trial.config == r.best && trial.final_score == r.best_score) winner_logged = true;
    if (!winner_logged) incumbent_safe = false;

    const double elapsed = seconds_since(t0);
    Outcome o;
    o.pass = incumbent_safe && r.best_score <= 1.1 * exhaustive_best && elapsed < 1200.0;
    o.detail = "tuned " + fmt(r.best_score) + " vs exhaustive " + fmt(exhaustive_best) +
               ", incumbent " + (incumbent_safe ? "preserved" : "LOST") + ", " +
               fmt(elapsed) + " s";
    return o;
}

int report(const std::string& id, const Outcome& o) {
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << o.detail
              << std::endl;
    return o.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: acceptance <1|2|3|4|5|6_7|8|9|10|11>\n";
        return 2;
    }
    const std::string which = argv[1];
    try {
        if (which == "1") return report("1", criterion_1());
        if (which == "2") return report("2", criterion_2());
        if (which == "3") return report("3", criterion_3());
        if (which == "4") return report("4", criterion_4());
        if (which == "5") return report("5", criterion_5());
        if (which == "6_7") {
            bool pass7 = false;
            std::string detail7;
            Outcome o6 = criteria_6_7(pass7, detail7);
            int rc = report("6", o6);
            Outcome o7{pass7, detail7};
            rc |= report("7", o7);
            return rc;
        }
        if (which == "8") return report("8", criterion_8());
        if (which == "9") return report("9", criterion_9());
        if (which == "10") return report("10", criterion_10());
        if (which == "11") return report("11", criterion_11());
        std::cerr << "unknown criterion: " << which << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cout << "FAIL criterion " << which << ": exception: " << e.what() << std::endl;
        return 1;
    }
}
