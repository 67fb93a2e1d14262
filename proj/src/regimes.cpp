#include "myosynth/regimes.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <sstream>

namespace myo {

std::string regime_name(RegimeId id) {
    switch (id) {
        case RegimeId::General: return "general";
        case RegimeId::Pretrain: return "pretrain";
        case RegimeId::SubjectSpecific: return "subject";
    }
    throw InternalError("unknown regime id");
}

RegimeId regime_from_name(const std::string& name) {
    if (name == "general") return RegimeId::General;
    if (name == "pretrain") return RegimeId::Pretrain;
    if (name == "subject" || name == "subject-specific") return RegimeId::SubjectSpecific;
    throw ValidationError("unknown regime: " + name);
}

namespace {

json keys_to_json(const std::vector<TrialKey>& keys) {
    json out = json::array();
    for (const auto& k : keys)
        out.push_back({{"subject", k.subject}, {"motion", k.motion}, {"repetition", k.repetition}});
    return out;
}

std::vector<TrialKey> keys_from_json(const json& j) {
    std::vector<TrialKey> out;
    for (const auto& kj : j)
        out.push_back({kj.at("subject").get<std::string>(), kj.at("motion").get<std::string>(),
                       kj.at("repetition").get<int>()});
    return out;
}

}  // namespace

json SplitPlan::to_json() const {
    json j;
    j["train"] = keys_to_json(train);
    j["val"] = keys_to_json(val);
    j["test"] = keys_to_json(test);
    j["new_motion"] = keys_to_json(new_motion);
    j["held_out_trials"] = keys_to_json(held_out_trials);
    j["held_out_subject"] = held_out_subject ? json(*held_out_subject) : json(nullptr);
    j["held_out_motion"] = held_out_motion ? json(*held_out_motion) : json(nullptr);
    return j;
}

SplitPlan SplitPlan::from_json(const json& j) {
    SplitPlan p;
    p.train = keys_from_json(j.at("train"));
    p.val = keys_from_json(j.at("val"));
    p.test = keys_from_json(j.at("test"));
    p.new_motion = keys_from_json(j.at("new_motion"));
    p.held_out_trials = keys_from_json(j.at("held_out_trials"));
    if (!j.at("held_out_subject").is_null())
        p.held_out_subject = j.at("held_out_subject").get<std::string>();
    if (!j.at("held_out_motion").is_null())
        p.held_out_motion = j.at("held_out_motion").get<std::string>();
    return p;
}

void SplitPlan::audit() const {
    std::set<TrialKey> seen;
    auto check_disjoint = [&](const std::vector<TrialKey>& keys, const std::string& role) {
        for (const auto& k : keys) {
            if (!seen.insert(k).second)
                throw InternalError("split audit: trial " + k.id() + " appears twice (" + role +
                                    ")");
        }
    };
    check_disjoint(train, "train");
    check_disjoint(val, "val");
    check_disjoint(test, "test");

    auto check_reserved = [&](const std::vector<TrialKey>& keys, const std::string& role) {
        for (const auto& k : keys) {
            if (held_out_subject && k.subject == *held_out_subject)
                throw InternalError("split audit: held-out subject trial in " + role);
            if (held_out_motion && k.motion == *held_out_motion)
                throw InternalError("split audit: held-out motion trial in " + role);
        }
    };
    check_reserved(train, "train");
    check_reserved(val, "val");
    check_reserved(test, "test");

    // Every trainable (subject, motion) group must keep the 15/2/1 cut.
    std::map<std::pair<std::string, std::string>, std::array<int, 3>> counts;
    for (const auto& k : train) ++counts[{k.subject, k.motion}][0];
    for (const auto& k : test) ++counts[{k.subject, k.motion}][1];
    for (const auto& k : val) ++counts[{k.subject, k.motion}][2];
    for (const auto& [group, n] : counts) {
        if (n[0] != 15 || n[1] != 2 || n[2] != 1)
            throw InternalError("split audit: group " + group.first + "/" + group.second +
                                " has " + std::to_string(n[0]) + "/" + std::to_string(n[1]) +
                                "/" + std::to_string(n[2]) +
                                " train/test/val repetitions, expected 15/2/1");
    }
}

SplitPlan make_split(const std::vector<TrialKey>& trials,
                     const std::optional<std::string>& held_out_subject,
                     const std::optional<std::string>& held_out_motion, std::uint64_t seed) {
    require(!trials.empty(), "make_split: no trials");

    SplitPlan plan;
    plan.held_out_subject = held_out_subject;
    plan.held_out_motion = held_out_motion;

    std::map<std::pair<std::string, std::string>, std::vector<int>> groups;
    for (const auto& k : trials) groups[{k.subject, k.motion}].push_back(k.repetition);

    std::ostringstream gaps;
    for (auto& [group, reps] : groups) {
        if (reps.size() != 18) {
            gaps << " " << group.first << "/" << group.second << " has " << reps.size()
                 << " repetitions";
        }
    }
    if (gaps.tellp() > 0)
        throw ValidationError("make_split: expected 18 repetitions per (subject, motion):" +
                              gaps.str());

    for (auto& [group, reps] : groups) {
        const auto& [subject, motion] = group;
        std::sort(reps.begin(), reps.end());

        if (held_out_motion && motion == *held_out_motion) {
            for (int r : reps) plan.new_motion.push_back({subject, motion, r});
        }
        if (held_out_subject && subject == *held_out_subject) {
            for (int r : reps) plan.held_out_trials.push_back({subject, motion, r});
        }
        if ((held_out_motion && motion == *held_out_motion) ||
            (held_out_subject && subject == *held_out_subject))
            continue;

        Rng rng(Rng::derive(seed, std::hash<std::string>{}(subject),
                            std::hash<std::string>{}(motion)));
        std::vector<int> shuffled = reps;
        rng.shuffle(shuffled);
        for (int i = 0; i < 15; ++i) plan.train.push_back({subject, motion, shuffled[i]});
        for (int i = 15; i < 17; ++i) plan.test.push_back({subject, motion, shuffled[i]});
        plan.val.push_back({subject, motion, shuffled[17]});
    }

    auto by_key = [](std::vector<TrialKey>& v) { std::sort(v.begin(), v.end()); };
    by_key(plan.train);
    by_key(plan.val);
    by_key(plan.test);
    by_key(plan.new_motion);
    by_key(plan.held_out_trials);
    plan.audit();
    return plan;
}

std::vector<std::pair<Matrix, Matrix>> collect_sequences(const ProcessedDataset& ds,
                                                         const std::vector<TrialKey>& keys) {
    std::vector<std::pair<Matrix, Matrix>> out;
    out.reserve(keys.size());
    for (const auto& k : keys) {
        const ProcessedTrial& t = ds.find(k);
        out.push_back({t.features, t.targets});
    }
    return out;
}

nn::ParamStore clone_params(const nn::ParamStore& store) {
    nn::ParamStore out;
    for (const auto& p : store.params) {
        auto q = std::make_shared<nn::Param>(p->name, static_cast<int>(p->value.rows()),
                                             static_cast<int>(p->value.cols()));
        q->value = p->value;
        out.params.push_back(q);
    }
    return out;
}

RegimeResult train_general(const ProcessedDataset& ds, const SplitPlan& plan,
                           const ArchConfig& arch, const nn::TrainConfig& config) {
    plan.audit();
    ArchSession session(arch, config.seed);
    RegimeResult result;
    result.history = session.fit(collect_sequences(ds, plan.train),
                                 collect_sequences(ds, plan.val), config);
    result.params = clone_params(session.params());
    return result;
}

RegimeResult finetune(const nn::ParamStore& general_params, const ArchConfig& arch,
                      const ProcessedDataset& ds, const SplitPlan& subject_plan,
                      nn::TrainConfig config, double lr_scale) {
    RegimeResult result;
    result.params = clone_params(general_params);
    if (config.max_epochs == 0) return result;  // no-op fine-tune keeps general weights

    config.adam.learning_rate *= lr_scale;
    ArchSession session(arch, std::move(result.params));  // throws on shape mismatch
    result.history = session.fit(collect_sequences(ds, subject_plan.train),
                                 collect_sequences(ds, subject_plan.val), config);
    result.params = clone_params(session.params());
    return result;
}

RegimeResult train_subject_specific(const ProcessedDataset& ds, const SplitPlan& subject_plan,
                                    const ArchConfig& arch, const nn::TrainConfig& config) {
    ArchSession session(arch, config.seed);
    RegimeResult result;
    result.history = session.fit(collect_sequences(ds, subject_plan.train),
                                 collect_sequences(ds, subject_plan.val), config);
    result.params = clone_params(session.params());
    return result;
}

// ---- hyperparameter search ----

long SearchSpace::cardinality() const {
    long n = 1;
    for (const auto& [name, values] : fields) n *= static_cast<long>(values.size());
    return n;
}

namespace {

std::string candidate_id(const Candidate& c) {
    std::string out;
    for (const auto& [k, v] : c) out += k + "=" + v.dump() + ";";
    return out;
}

Candidate random_candidate(const SearchSpace& space, Rng& rng) {
    Candidate c;
    for (const auto& [name, values] : space.fields)
        c[name] = values[rng.index(values.size())];
    return c;
}

Candidate mutate(const SearchSpace& space, Candidate c, double prob, Rng& rng) {
    for (const auto& [name, values] : space.fields)
        if (rng.uniform() < prob) c[name] = values[rng.index(values.size())];
    return c;
}

Candidate crossover(const SearchSpace& space, const Candidate& a, const Candidate& b, Rng& rng) {
    Candidate c;
    for (const auto& [name, values] : space.fields)
        c[name] = rng.uniform() < 0.5 ? a.at(name) : b.at(name);
    return c;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

TuneResult tune(const SearchSpace& space, const TuneOptions& opts, const TuneEvaluator& eval) {
    require(!space.empty(), "tune: empty search space");
    require(opts.budget >= opts.population && opts.population >= 1,
            "tune: budget must be >= population size");

    Rng rng(opts.seed);
    TuneResult result;
    result.best_score = std::numeric_limits<double>::infinity();

    // Losses observed at each pruning checkpoint across all evaluations.
    std::map<int, std::vector<double>> checkpoint_losses;
    std::map<std::string, double> cache;
    int evals = 0;

    auto run_candidate = [&](const Candidate& c) -> double {
        const std::string id = candidate_id(c);
        if (auto it = cache.find(id); it != cache.end()) return it->second;
        if (evals >= opts.budget) return std::numeric_limits<double>::infinity();
        ++evals;

        TuneTrialResult trial;
        trial.config = c;
        auto should_stop = [&](int epoch, double loss) {
            if (std::find(opts.prune_epochs.begin(), opts.prune_epochs.end(), epoch) ==
                opts.prune_epochs.end())
                return false;
            auto& seen = checkpoint_losses[epoch];
            const bool prune = seen.size() >= 2 && loss > median(seen);
            seen.push_back(loss);
            if (prune) trial.pruned = true;
            return prune;
        };
        trial.val_losses = eval(c, should_stop);
        require(!trial.val_losses.empty(), "tune: evaluator returned no losses");
        trial.final_score = *std::min_element(trial.val_losses.begin(), trial.val_losses.end());

        if (trial.final_score < result.best_score) {
            result.best_score = trial.final_score;
            result.best = c;
        }
        cache[id] = trial.final_score;
        result.log.push_back(std::move(trial));
        return cache[id];
    };

    // Initial population.
    std::vector<std::pair<Candidate, double>> population;
    for (int i = 0; i < opts.population && evals < opts.budget; ++i) {
        Candidate c = random_candidate(space, rng);
        // Avoid spending budget on duplicates when the space allows it.
        for (int tries = 0; tries < 10 && cache.count(candidate_id(c)); ++tries)
            c = random_candidate(space, rng);
        population.push_back({c, run_candidate(c)});
    }

    // A budget larger than the space can never be spent: cached duplicates are
    // free, so stop once every configuration has been evaluated.
    while (evals < opts.budget && static_cast<long>(cache.size()) < space.cardinality()) {
        std::sort(population.begin(), population.end(),
                  [](const auto& a, const auto& b) { return a.second < b.second; });
        const std::size_t survivors = std::max<std::size_t>(1, population.size() / 2);

        std::vector<std::pair<Candidate, double>> next;
        next.push_back(population.front());  // elitism: the incumbent best survives
        while (next.size() < population.size() && evals < opts.budget) {
            const Candidate& a = population[rng.index(survivors)].first;
            const Candidate& b = population[rng.index(survivors)].first;
            Candidate child = mutate(space, crossover(space, a, b, rng), opts.mutation_prob, rng);
            for (int tries = 0; tries < 10 && cache.count(candidate_id(child)); ++tries)
                child = mutate(space, child, 1.0, rng);
            if (cache.count(candidate_id(child))) {
                next.push_back({child, cache[candidate_id(child)]});
                continue;
            }
            next.push_back({child, run_candidate(child)});
        }
        population = std::move(next);
    }

    require(!result.log.empty(), "tune: no evaluations performed");
    return result;
}

ArchConfig apply_candidate(const ArchConfig& base, const Candidate& c) {
    ArchConfig out = base;
    for (const auto& [key, value] : c) {
        if (key == "dropout") {
            out.input_dropout = value.get<double>();
        } else if (key == "n_layers") {
            const int n = value.get<int>();
            require(n >= 1, "candidate: n_layers must be >= 1");
            auto resize_chain = [&](std::vector<int>& chain) {
                const int first = chain.empty() ? 64 : chain.front();
                chain.resize(n);
                for (int i = 0; i < n; ++i)
                    chain[i] = std::max(4, first >> i);  // halving pyramid
            };
            resize_chain(out.lstm_units);
            resize_chain(out.dense_units);
        } else if (key == "units") {
            const int u = value.get<int>();
            for (std::size_t i = 0; i < out.lstm_units.size(); ++i)
                out.lstm_units[i] = std::max(4, u >> i);
            for (std::size_t i = 0; i < out.dense_units.size(); ++i)
                out.dense_units[i] = std::max(4, u >> i);
            out.rnnseq_units = u;
        } else if (key == "rnnseq_units") {
            out.rnnseq_units = value.get<int>();
        } else if (key == "cnn_filters") {
            const int f = value.get<int>();
            for (auto& v : out.cnn_filters) v = f;
        } else if (key == "cnn_kernel") {
            const int k = value.get<int>();
            for (std::size_t i = 1; i < out.cnn_kernels.size(); ++i)
                out.cnn_kernels[i] = std::max(2, k / 2);
            if (!out.cnn_kernels.empty()) out.cnn_kernels[0] = k;
        } else if (key == "batch_size" || key == "learning_rate") {
            // handled by the train-config side
        } else {
            throw ValidationError("unknown search field: " + key);
        }
    }
    return out;
}

TuneEvaluator make_arch_evaluator(const ProcessedDataset& ds, const SplitPlan& plan,
                                  ArchConfig arch, nn::TrainConfig base_config, int max_epochs) {
    auto train_seqs = collect_sequences(ds, plan.train);
    auto val_seqs = collect_sequences(ds, plan.val);
    return [=](const Candidate& c,
               const std::function<bool(int, double)>& should_stop) -> std::vector<double> {
        ArchConfig cfg = apply_candidate(arch, c);
        nn::TrainConfig tc = base_config;
        tc.max_epochs = max_epochs;
        tc.patience = max_epochs;  // pruning, not patience, ends tuning runs early
        if (auto it = c.find("batch_size"); it != c.end()) tc.batch_size = it->second.get<int>();
        if (auto it = c.find("learning_rate"); it != c.end())
            tc.adam.learning_rate = it->second.get<double>();

        ArchSession session(cfg, tc.seed);
        auto cb = [&](int epoch0, double loss) { return should_stop(epoch0 + 1, loss); };
        nn::FitResult fr = session.fit(train_seqs, val_seqs, tc, cb);
        return fr.val_loss;
    };
}

}  // namespace myo
