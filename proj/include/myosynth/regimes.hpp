#pragma once

#include "myosynth/io.hpp"
#include "myosynth/models.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace myo {

enum class RegimeId { General, Pretrain, SubjectSpecific };

std::string regime_name(RegimeId id);
RegimeId regime_from_name(const std::string& name);

/// Disjoint 15/2/1 repetition split; held-out subject and motion reserved.
struct SplitPlan {
    std::vector<TrialKey> train;
    std::vector<TrialKey> val;
    std::vector<TrialKey> test;
    std::vector<TrialKey> new_motion;      // all reps of the held-out motion
    std::vector<TrialKey> held_out_trials; // everything from the held-out subject
    std::optional<std::string> held_out_subject;
    std::optional<std::string> held_out_motion;

    /// Throws InternalError on any disjointness / reservation violation.
    void audit() const;

    json to_json() const;
    static SplitPlan from_json(const json& j);
};

SplitPlan make_split(const std::vector<TrialKey>& trials,
                     const std::optional<std::string>& held_out_subject,
                     const std::optional<std::string>& held_out_motion, std::uint64_t seed);

/// Sequence pairs for a list of trial keys.
std::vector<std::pair<Matrix, Matrix>> collect_sequences(const ProcessedDataset& ds,
                                                         const std::vector<TrialKey>& keys);

nn::ParamStore clone_params(const nn::ParamStore& store);

struct RegimeResult {
    nn::ParamStore params;
    nn::FitResult history;
};

RegimeResult train_general(const ProcessedDataset& ds, const SplitPlan& plan,
                           const ArchConfig& arch, const nn::TrainConfig& config);

/// Continues training from general weights on the target subject only; all
/// layers trainable; learning rate scaled by lr_scale (transfer default 0.1).
RegimeResult finetune(const nn::ParamStore& general_params, const ArchConfig& arch,
                      const ProcessedDataset& ds, const SplitPlan& subject_plan,
                      nn::TrainConfig config, double lr_scale = 0.1);

RegimeResult train_subject_specific(const ProcessedDataset& ds, const SplitPlan& subject_plan,
                                    const ArchConfig& arch, const nn::TrainConfig& config);

// ---- hyperparameter search ----

struct SearchSpace {
    // Ordered fields, each with a discrete list of candidate values.
    std::vector<std::pair<std::string, std::vector<json>>> fields;

    bool empty() const { return fields.empty(); }
    long cardinality() const;
};

using Candidate = std::map<std::string, json>;

struct TuneTrialResult {
    Candidate config;
    std::vector<double> val_losses;  // per epoch actually run
    double final_score = 0.0;        // best validation loss reached
    bool pruned = false;
};

struct TuneResult {
    Candidate best;
    double best_score = 0.0;
    std::vector<TuneTrialResult> log;
};

struct TuneOptions {
    int budget = 20;
    int population = 8;
    double mutation_prob = 0.3;
    std::vector<int> prune_epochs = {2, 4, 8};  // 1-based epoch checkpoints
    int max_epochs = 8;
    std::uint64_t seed = 42;
};

/// Evaluates one candidate; must honor should_stop (called after each epoch
/// with the 1-based epoch and its val loss) and return per-epoch val losses.
using TuneEvaluator = std::function<std::vector<double>(
    const Candidate&, const std::function<bool(int, double)>& should_stop)>;

/// Evolutionary search with median pruning at the configured checkpoints.
/// Deterministic per seed; the incumbent best is never discarded.
TuneResult tune(const SearchSpace& space, const TuneOptions& opts, const TuneEvaluator& eval);

/// Evaluator that trains `arch` (with candidate overrides applied) on the
/// plan's train/val split for opts.max_epochs epochs.
TuneEvaluator make_arch_evaluator(const ProcessedDataset& ds, const SplitPlan& plan,
                                  ArchConfig arch, nn::TrainConfig base_config, int max_epochs);

/// Candidate overrides understood by make_arch_evaluator:
/// batch_size, learning_rate, dropout, n_layers, units, rnnseq_units,
/// cnn_filters, cnn_kernel.
ArchConfig apply_candidate(const ArchConfig& base, const Candidate& c);

}  // namespace myo
