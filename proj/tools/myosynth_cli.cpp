// myosynth: synthetic surface-EMG generation from arm motion.
// One binary with subcommands covering the whole workflow: data synthesis,
// preprocessing, training, transfer, evaluation, prediction, tuning, and
// plot-data export.

#include "myosynth/evaluation.hpp"
#include "myosynth/io.hpp"
#include "myosynth/models.hpp"
#include "myosynth/nn/serialize.hpp"
#include "myosynth/preprocess.hpp"
#include "myosynth/regimes.hpp"
#include "myosynth/synth.hpp"

#include <CLI11.hpp>
#include <Eigen/Core>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using myo::json;

namespace {

constexpr const char* kVersion = "0.1.0";

int g_threads = 1;

json load_config_or_empty(const std::string& path) {
    if (path.empty()) return json::object();
    return myo::load_json_file(path);
}

/// Records everything needed to reproduce a run; written atomically when the
/// command finishes.
class ManifestWriter {
public:
    ManifestWriter(std::string command, std::uint64_t seed)
        : start_(std::chrono::steady_clock::now()) {
        j_["command"] = std::move(command);
        j_["seed"] = seed;
        j_["version"] = kVersion;
        j_["threads"] = g_threads;
    }

    json& data() { return j_; }

    void write(const std::string& out_dir) {
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        j_["duration_s"] = elapsed;
        fs::create_directories(out_dir);
        myo::save_json_file((fs::path(out_dir) / "run_manifest.json").string(), j_);
    }

private:
    json j_;
    std::chrono::steady_clock::time_point start_;
};

myo::nn::TrainConfig train_config_from(const json& cfg, std::uint64_t seed) {
    myo::nn::TrainConfig tc;
    if (cfg.contains("train")) tc = myo::nn::TrainConfig::from_json(cfg.at("train"));
    tc.seed = seed;
    return tc;
}

myo::ArchConfig arch_config_from(const json& cfg, const std::string& arch_name,
                                 int feature_width) {
    myo::ArchConfig ac;
    if (cfg.contains("arch_config")) ac = myo::ArchConfig::from_json(cfg.at("arch_config"));
    ac.arch = myo::arch_from_name(arch_name);
    ac.feature_width = feature_width;
    return ac;
}

std::vector<myo::TrialKey> dataset_keys(const myo::ProcessedDataset& ds) {
    std::vector<myo::TrialKey> keys;
    for (const auto& t : ds.trials) keys.push_back(t.key);
    return keys;
}

std::vector<myo::TrialKey> subject_keys(const myo::ProcessedDataset& ds,
                                        const std::string& subject) {
    std::vector<myo::TrialKey> keys;
    for (const auto& t : ds.trials)
        if (t.key.subject == subject) keys.push_back(t.key);
    myo::require(!keys.empty(), "no trials for subject " + subject);
    return keys;
}

std::optional<std::string> optional_of(const std::string& s) {
    return s.empty() ? std::nullopt : std::optional<std::string>(s);
}

void write_loss_history(const std::string& path, const myo::nn::FitResult& fr) {
    std::ofstream out(path);
    out << "epoch,train_loss,val_loss\n";
    out.precision(17);
    for (std::size_t e = 0; e < fr.train_loss.size(); ++e)
        out << e << "," << fr.train_loss[e] << "," << fr.val_loss[e] << "\n";
}

void save_model(const std::string& path, const myo::ArchSession& session,
                myo::nn::ParamStore params, std::uint64_t seed, json metadata) {
    myo::nn::WeightFile wf;
    wf.spec = session.train_spec();
    wf.store = std::move(params);
    wf.seed = seed;
    metadata["arch_config"] = session.config().to_json();
    wf.metadata = std::move(metadata);
    myo::nn::save_weights(path, wf);
}

/// Rebuilds an ArchSession from a weight file's spec + metadata.
myo::ArchSession session_from_weights(const myo::nn::WeightFile& wf) {
    myo::require(wf.metadata.contains("arch_config"),
                 "weight file lacks an arch_config metadata entry");
    return {myo::ArchConfig::from_json(wf.metadata.at("arch_config")), wf.store};
}

// ---- subcommand implementations ----

int cmd_synth(const std::string& config_path, std::uint64_t seed, const std::string& out) {
    json cfg = load_config_or_empty(config_path);
    myo::GenConfig gen = myo::GenConfig::from_json(cfg);
    gen.seed = seed;
    ManifestWriter manifest("synth", seed);
    manifest.data()["config"] = gen.to_json();
    manifest.data()["out"] = out;

    myo::RawDataset ds = myo::gen_dataset(gen, out);
    manifest.data()["n_trials"] = ds.trials.size();
    manifest.write(out);
    std::cout << "wrote " << ds.trials.size() << " trials to " << out << "\n";
    return 0;
}

int cmd_preprocess(const std::string& raw_dir, const std::string& input,
                   const std::string& config_path, std::uint64_t seed,
                   const std::string& out) {
    json cfg = load_config_or_empty(config_path);
    myo::PreprocessOptions opts;
    opts.config = myo::InputConfig::parse(input);
    opts.split_seed = seed;
    if (cfg.contains("norm_scope")) {
        const std::string scope = cfg.at("norm_scope").get<std::string>();
        if (scope == "train_only")
            opts.norm_scope = myo::NormScope::TrainOnly;
        else if (scope == "all_data")
            opts.norm_scope = myo::NormScope::AllData;
        else
            throw myo::ValidationError("unknown norm_scope: " + scope);
    }
    opts.rms_window_ms = cfg.value("rms_window_ms", opts.rms_window_ms);
    opts.out_rate_hz = cfg.value("out_rate_hz", opts.out_rate_hz);
    opts.savgol_window = cfg.value("savgol_window", opts.savgol_window);
    opts.outlier_sigma = cfg.value("outlier_sigma", opts.outlier_sigma);
    if (cfg.contains("held_out_motion"))
        opts.held_out_motion = cfg.at("held_out_motion").get<std::string>();

    ManifestWriter manifest("preprocess", seed);
    manifest.data()["raw"] = raw_dir;
    manifest.data()["input"] = input;
    manifest.data()["out"] = out;

    myo::RawDataset raw = myo::load_raw_manifest(raw_dir);
    myo::ProcessedDataset ds = myo::preprocess_dataset(raw, opts);
    myo::save_processed_dataset(out, ds);
    manifest.data()["n_trials"] = ds.trials.size();
    manifest.write(out);
    std::cout << "processed " << ds.trials.size() << " trials (" << input << ") into " << out
              << "\n";
    return 0;
}

int cmd_train(const std::string& data_dir, const std::string& arch, const std::string& regime,
              const std::string& subject, const std::string& config_path, std::uint64_t seed,
              const std::string& out) {
    json cfg = load_config_or_empty(config_path);
    myo::ProcessedDataset ds = myo::load_processed_dataset(data_dir);
    myo::ArchConfig ac = arch_config_from(cfg, arch, ds.config.feature_width());
    myo::nn::TrainConfig tc = train_config_from(cfg, seed);
    {
        myo::ArchSession defaults(ac, seed);
        myo::nn::TrainConfig d = defaults.default_train_config();
        if (!cfg.contains("train")) {
            tc.batch_size = d.batch_size;
            tc.shuffle = d.shuffle;
        }
    }

    const myo::RegimeId rid = myo::regime_from_name(regime);
    myo::require(rid != myo::RegimeId::Pretrain,
                 "the pretrain regime continues from general weights; use `finetune`");

    ManifestWriter manifest("train", seed);
    manifest.data()["data"] = data_dir;
    manifest.data()["arch"] = arch;
    manifest.data()["regime"] = regime;
    manifest.data()["arch_config"] = ac.to_json();
    manifest.data()["train_config"] = tc.to_json();
    manifest.data()["out"] = out;

    myo::SplitPlan plan;
    myo::RegimeResult result;
    if (rid == myo::RegimeId::General) {
        plan = myo::make_split(dataset_keys(ds), optional_of(ds.designated_held_out_subject),
                               optional_of(ds.designated_new_motion), seed);
        result = myo::train_general(ds, plan, ac, tc);
    } else {
        myo::require(!subject.empty(), "subject-specific training needs --subject");
        plan = myo::make_split(subject_keys(ds, subject), std::nullopt,
                               optional_of(ds.designated_new_motion), seed);
        result = myo::train_subject_specific(ds, plan, ac, tc);
        manifest.data()["subject"] = subject;
    }
    plan.audit();

    fs::create_directories(out);
    json meta = {{"regime", regime},
                 {"input", ds.config.name()},
                 {"split_seed", seed},
                 {"subject", subject}};
    myo::ArchSession session(ac, result.params);
    save_model((fs::path(out) / "weights.json").string(), session,
               myo::clone_params(result.params), seed, meta);
    write_loss_history((fs::path(out) / "loss_history.csv").string(), result.history);
    myo::save_json_file((fs::path(out) / "split.json").string(), plan.to_json());
    myo::save_json_file((fs::path(out) / "config.json").string(),
                        json{{"arch_config", ac.to_json()}, {"train", tc.to_json()}});
    manifest.write(out);
    std::cout << "trained " << arch << " (" << regime << "), best val loss "
              << (result.history.best_epoch >= 0
                      ? result.history.val_loss[result.history.best_epoch]
                      : -1.0)
              << "\n";
    return 0;
}

int cmd_finetune(const std::string& weights_path, const std::string& data_dir,
                 const std::string& subject, const std::string& config_path,
                 std::uint64_t seed, const std::string& out) {
    json cfg = load_config_or_empty(config_path);
    myo::nn::WeightFile wf = myo::nn::load_weights(weights_path);
    myo::ProcessedDataset ds = myo::load_processed_dataset(data_dir);
    myo::require(!subject.empty(), "finetune needs --subject");

    myo::ArchConfig ac = myo::ArchConfig::from_json(wf.metadata.at("arch_config"));
    myo::nn::TrainConfig tc = train_config_from(cfg, seed);
    if (!cfg.contains("train")) {
        myo::ArchSession defaults(ac, seed);
        tc.batch_size = defaults.default_train_config().batch_size;
        tc.shuffle = defaults.default_train_config().shuffle;
    }
    const double lr_scale = cfg.value("lr_scale", 0.1);

    ManifestWriter manifest("finetune", seed);
    manifest.data()["weights"] = weights_path;
    manifest.data()["data"] = data_dir;
    manifest.data()["subject"] = subject;
    manifest.data()["lr_scale"] = lr_scale;
    manifest.data()["out"] = out;

    myo::SplitPlan plan = myo::make_split(subject_keys(ds, subject), std::nullopt,
                                          optional_of(ds.designated_new_motion), seed);
    myo::RegimeResult result = myo::finetune(wf.store, ac, ds, plan, tc, lr_scale);

    fs::create_directories(out);
    json meta = {{"regime", "pretrain"},
                 {"input", ds.config.name()},
                 {"split_seed", seed},
                 {"subject", subject},
                 {"base_weights", weights_path}};
    myo::ArchSession session(ac, result.params);
    save_model((fs::path(out) / "weights.json").string(), session,
               myo::clone_params(result.params), seed, meta);
    write_loss_history((fs::path(out) / "loss_history.csv").string(), result.history);
    myo::save_json_file((fs::path(out) / "split.json").string(), plan.to_json());
    manifest.write(out);
    std::cout << "finetuned on " << subject << "\n";
    return 0;
}

int cmd_evaluate(const std::string& weights_path, const std::string& data_dir,
                 const std::string& role, const std::string& subject,
                 const std::string& layout_name, std::uint64_t seed, const std::string& out) {
    myo::nn::WeightFile wf = myo::nn::load_weights(weights_path);
    myo::ProcessedDataset ds = myo::load_processed_dataset(data_dir);
    myo::ArchSession session = session_from_weights(wf);

    myo::SplitPlan plan;
    if (subject.empty()) {
        plan = myo::make_split(dataset_keys(ds), optional_of(ds.designated_held_out_subject),
                               optional_of(ds.designated_new_motion), seed);
    } else {
        plan = myo::make_split(subject_keys(ds, subject), std::nullopt,
                               optional_of(ds.designated_new_motion), seed);
    }

    const std::vector<myo::TrialKey>* keys = nullptr;
    if (role == "train")
        keys = &plan.train;
    else if (role == "val")
        keys = &plan.val;
    else if (role == "test")
        keys = &plan.test;
    else if (role == "new_motion")
        keys = &plan.new_motion;
    else if (role == "held_out")
        keys = &plan.held_out_trials;
    else
        throw myo::ValidationError("unknown split role: " + role);
    myo::require(!keys->empty(), "split role '" + role + "' selects no trials");

    myo::TableLayout layout = myo::TableLayout::ArchByChannel;
    if (layout_name == "regimes")
        layout = myo::TableLayout::RegimeColumns;
    else if (layout_name == "inputs")
        layout = myo::TableLayout::InputVariants;
    else
        myo::require(layout_name == "channels", "unknown table layout: " + layout_name);

    ManifestWriter manifest("evaluate", seed);
    manifest.data()["weights"] = weights_path;
    manifest.data()["data"] = data_dir;
    manifest.data()["role"] = role;
    manifest.data()["out"] = out;

    std::vector<std::pair<myo::Matrix, myo::Matrix>> pairs;
    for (const auto& key : *keys) {
        const myo::ProcessedTrial& trial = ds.find(key);
        pairs.push_back({session.predict(trial.features), trial.targets});
    }
    myo::EvaluationReport report = myo::evaluate_pairs(pairs);
    report.arch = myo::arch_name(session.config().arch);
    report.regime = wf.metadata.value("regime", "");
    report.input_config = ds.config.name();
    report.split_role = role;
    report.row_label = report.arch;

    fs::create_directories(out);
    myo::save_json_file((fs::path(out) / "report.json").string(), report.to_json());
    std::ofstream((fs::path(out) / "table.txt").string())
        << myo::render_table_text({report}, layout);
    std::ofstream((fs::path(out) / "table.csv").string())
        << myo::render_table_csv({report}, layout);
    manifest.data()["average_z"] = report.average_z;
    manifest.write(out);
    std::cout << myo::render_table_text({report}, layout);
    std::cout << "average Z: " << report.average_z << "\n";
    return 0;
}

int cmd_predict(const std::string& weights_path, const std::string& features_path, bool online,
                std::uint64_t seed, const std::string& out_csv) {
    myo::nn::WeightFile wf = myo::nn::load_weights(weights_path);
    myo::ArchSession session = session_from_weights(wf);
    myo::SampledSignal features = myo::read_signal_csv(features_path);

    myo::Matrix pred;
    if (online) {
        myo::require(session.config().arch == myo::ArchitectureId::RNNSEQ,
                     "--online requires rnnseq weights");
        // Step-by-step streaming through the stateful twin.
        myo::nn::Network& net = session.predict_network();
        net.reset_state();
        pred.resize(features.length(), myo::kEmgChannels);
        for (int t = 0; t < features.length(); ++t)
            pred.row(t) = net.forward(features.samples.row(t), false, nullptr).row(0);
        net.reset_state();
    } else {
        pred = session.predict(features.samples);
    }

    ManifestWriter manifest("predict", seed);
    manifest.data()["weights"] = weights_path;
    manifest.data()["features"] = features_path;
    manifest.data()["online"] = online;
    manifest.data()["out"] = out_csv;

    std::vector<std::string> names;
    for (int c = 1; c <= myo::kEmgChannels; ++c) names.push_back("emg" + std::to_string(c));
    myo::write_matrix_csv(out_csv, pred, names, features.rate_hz);
    const fs::path dir = fs::path(out_csv).parent_path();
    manifest.write(dir.empty() ? "." : dir.string());
    std::cout << "predicted " << pred.rows() << " steps -> " << out_csv << "\n";
    return 0;
}

int cmd_tune(const std::string& data_dir, const std::string& arch,
             const std::string& config_path, int budget, std::uint64_t seed,
             const std::string& out) {
    json cfg = load_config_or_empty(config_path);
    myo::ProcessedDataset ds = myo::load_processed_dataset(data_dir);
    myo::ArchConfig ac = arch_config_from(cfg, arch, ds.config.feature_width());

    myo::SearchSpace space;
    myo::require(cfg.contains("search_space"), "tune needs a search_space in --config");
    for (const auto& [name, values] : cfg.at("search_space").items()) {
        myo::require(values.is_array() && !values.empty(),
                     "search_space." + name + " must be a non-empty array");
        space.fields.push_back({name, std::vector<json>(values.begin(), values.end())});
    }

    myo::TuneOptions opts;
    opts.budget = budget;
    opts.seed = seed;
    opts.population = cfg.value("population", opts.population);
    opts.max_epochs = cfg.value("max_epochs", opts.max_epochs);

    myo::nn::TrainConfig tc = train_config_from(cfg, seed);
    if (!cfg.contains("train")) {
        myo::ArchSession defaults(ac, seed);
        tc.batch_size = defaults.default_train_config().batch_size;
        tc.shuffle = defaults.default_train_config().shuffle;
    }
    myo::SplitPlan plan =
        myo::make_split(dataset_keys(ds), optional_of(ds.designated_held_out_subject),
                        optional_of(ds.designated_new_motion), seed);

    ManifestWriter manifest("tune", seed);
    manifest.data()["data"] = data_dir;
    manifest.data()["arch"] = arch;
    manifest.data()["budget"] = budget;
    manifest.data()["out"] = out;

    myo::TuneResult result =
        myo::tune(space, opts, myo::make_arch_evaluator(ds, plan, ac, tc, opts.max_epochs));

    fs::create_directories(out);
    myo::save_json_file((fs::path(out) / "best.json").string(),
                        json{{"config", result.best}, {"val_loss", result.best_score}});
    std::ofstream log((fs::path(out) / "trials.csv").string());
    log << "trial,config,epochs_run,best_val_loss,pruned\n";
    log.precision(17);
    for (std::size_t i = 0; i < result.log.size(); ++i) {
        const auto& t = result.log[i];
        log << i << ",\"" << json(t.config).dump() << "\"," << t.val_losses.size() << ","
            << t.final_score << "," << (t.pruned ? 1 : 0) << "\n";
    }
    manifest.data()["best_val_loss"] = result.best_score;
    manifest.write(out);
    std::cout << "best config: " << json(result.best).dump() << " (val loss "
              << result.best_score << ")\n";
    return 0;
}

int cmd_plotdata(const std::string& original_path, const std::string& predicted_path,
                 std::uint64_t seed, const std::string& out_csv) {
    myo::SampledSignal original = myo::read_signal_csv(original_path);
    myo::SampledSignal predicted = myo::read_signal_csv(predicted_path);
    myo::require(original.channels() == predicted.channels(),
                 "plotdata: channel count mismatch");
    const int t_len = std::min(original.length(), predicted.length());

    ManifestWriter manifest("plotdata", seed);
    manifest.data()["original"] = original_path;
    manifest.data()["predicted"] = predicted_path;
    manifest.data()["out"] = out_csv;

    std::ofstream out(out_csv);
    myo::require(out.good(), "plotdata: cannot open " + out_csv);
    out << "time,channel,original,predicted\n";
    out.precision(17);
    for (int t = 0; t < t_len; ++t)
        for (int c = 0; c < original.channels(); ++c)
            out << (t / original.rate_hz) << "," << (c + 1) << "," << original.samples(t, c)
                << "," << predicted.samples(t, c) << "\n";
    const fs::path dir = fs::path(out_csv).parent_path();
    manifest.write(dir.empty() ? "." : dir.string());
    std::cout << "wrote long-format overlay data to " << out_csv << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    if (const char* env = std::getenv("MYOSYNTH_THREADS")) {
        g_threads = std::max(1, std::atoi(env));
    }
    Eigen::setNbThreads(g_threads);

    CLI::App app{"myosynth: synthetic surface EMG from arm motion"};
    app.require_subcommand(1);

    std::string config_path, out, arch = "rnn", regime = "general", input = "all";
    std::string data_dir, raw_dir, weights_path, features_path, subject, role = "test";
    std::string layout = "channels", original_path, predicted_path;
    std::uint64_t seed = 42;
    bool online = false;
    int budget = 20;

    auto* synth = app.add_subcommand("synth", "generate a synthetic raw dataset");
    synth->add_option("--config", config_path, "generation config JSON");
    synth->add_option("--seed", seed, "master seed");
    synth->add_option("--out", out, "output directory")->required();

    auto* preprocess = app.add_subcommand("preprocess", "raw dataset -> features/targets");
    preprocess->add_option("--raw", raw_dir, "raw dataset directory")->required();
    preprocess->add_option("--input", input, "input variant (all|ang|vel|acc|eef|eefplus)");
    preprocess->add_option("--config", config_path, "preprocessing config JSON");
    preprocess->add_option("--seed", seed, "split seed for train-only normalization");
    preprocess->add_option("--out", out, "output directory")->required();

    auto* train = app.add_subcommand("train", "train one architecture under a regime");
    train->add_option("--data", data_dir, "processed dataset directory")->required();
    train->add_option("--arch", arch, "rnn|rnnseq|fnn|fnnseq|cnn");
    train->add_option("--regime", regime, "general|subject");
    train->add_option("--subject", subject, "subject id (subject regime)");
    train->add_option("--config", config_path, "arch/train config JSON");
    train->add_option("--seed", seed, "init/split/shuffle seed");
    train->add_option("--out", out, "output directory")->required();

    auto* finetune = app.add_subcommand("finetune", "continue from general weights on one subject");
    finetune->add_option("--weights", weights_path, "general weights file")->required();
    finetune->add_option("--data", data_dir, "processed dataset directory")->required();
    finetune->add_option("--subject", subject, "target subject id")->required();
    finetune->add_option("--config", config_path, "train config JSON");
    finetune->add_option("--seed", seed, "split/shuffle seed");
    finetune->add_option("--out", out, "output directory")->required();

    auto* evaluate = app.add_subcommand("evaluate", "score weights on a split role");
    evaluate->add_option("--weights", weights_path, "weights file")->required();
    evaluate->add_option("--data", data_dir, "processed dataset directory")->required();
    evaluate->add_option("--role", role, "train|val|test|new_motion|held_out");
    evaluate->add_option("--subject", subject, "restrict to one subject's split");
    evaluate->add_option("--layout", layout, "channels|regimes|inputs");
    evaluate->add_option("--seed", seed, "split seed");
    evaluate->add_option("--out", out, "output directory")->required();

    auto* predict = app.add_subcommand("predict", "features CSV -> predicted EMG CSV");
    predict->add_option("--weights", weights_path, "weights file")->required();
    predict->add_option("--features", features_path, "feature CSV")->required();
    predict->add_flag("--online", online, "stream step by step (rnnseq)");
    predict->add_option("--seed", seed, "recorded seed");
    predict->add_option("--out", out, "output CSV path")->required();

    auto* tune = app.add_subcommand("tune", "evolutionary hyperparameter search");
    tune->add_option("--data", data_dir, "processed dataset directory")->required();
    tune->add_option("--arch", arch, "architecture to tune");
    tune->add_option("--config", config_path, "search space / tuning config JSON")->required();
    tune->add_option("--budget", budget, "evaluation budget");
    tune->add_option("--seed", seed, "search seed");
    tune->add_option("--out", out, "output directory")->required();

    auto* plotdata = app.add_subcommand("plotdata", "overlay CSV for external plotting");
    plotdata->add_option("--original", original_path, "measured envelope CSV")->required();
    plotdata->add_option("--predicted", predicted_path, "predicted envelope CSV")->required();
    plotdata->add_option("--seed", seed, "recorded seed");
    plotdata->add_option("--out", out, "output CSV path")->required();

    try {
        app.parse(argc, argv);
        if (synth->parsed()) return cmd_synth(config_path, seed, out);
        if (preprocess->parsed()) return cmd_preprocess(raw_dir, input, config_path, seed, out);
        if (train->parsed())
            return cmd_train(data_dir, arch, regime, subject, config_path, seed, out);
        if (finetune->parsed())
            return cmd_finetune(weights_path, data_dir, subject, config_path, seed, out);
        if (evaluate->parsed())
            return cmd_evaluate(weights_path, data_dir, role, subject, layout, seed, out);
        if (predict->parsed())
            return cmd_predict(weights_path, features_path, online, seed, out);
        if (tune->parsed()) return cmd_tune(data_dir, arch, config_path, budget, seed, out);
        if (plotdata->parsed()) return cmd_plotdata(original_path, predicted_path, seed, out);
        return 1;
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    } catch (const myo::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const myo::MissingArtifact& e) {
        std::cerr << "missing artifact: " << e.what() << "\n";
        return 2;
    } catch (const myo::InternalError& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
}
