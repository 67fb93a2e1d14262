#include "myosynth/preprocess.hpp"

#include "myosynth/regimes.hpp"

#include <map>
#include <set>

namespace myo {

ProcessedDataset preprocess_dataset(const RawDataset& raw, const PreprocessOptions& opts) {
    require(!raw.trials.empty(), "preprocess: empty dataset");

    std::optional<std::string> held_motion = opts.held_out_motion;
    if (!held_motion && !raw.designated_new_motion.empty())
        held_motion = raw.designated_new_motion;

    // Which trials feed each subject's normalization fit.
    std::set<TrialKey> norm_keys;
    if (opts.norm_scope == NormScope::TrainOnly) {
        // Per-subject split (no held-out subject here: each subject's own
        // train repetitions define that subject's normalization).
        const SplitPlan plan = make_split(raw.trials, std::nullopt, held_motion,
                                          opts.split_seed);
        norm_keys.insert(plan.train.begin(), plan.train.end());
    } else {
        norm_keys.insert(raw.trials.begin(), raw.trials.end());
    }

    ProcessedDataset out;
    out.config = opts.config;
    out.designated_new_motion = raw.designated_new_motion;
    out.designated_held_out_subject = raw.designated_held_out_subject;

    struct Stage {
        TrialKey key;
        Matrix features;   // unnormalized
        Matrix envelope;   // unnormalized 8-channel envelope
    };
    std::map<std::string, std::vector<std::size_t>> by_subject;
    std::vector<Stage> staged;

    for (const auto& key : raw.trials) {
        TrialRecording trial = load_raw_trial(raw.root, key);

        // EMG branch: baseline -> outliers -> RMS envelope at 60 Hz.
        std::vector<bool> rest(trial.emg.length(), false);
        const int rest_samples = std::max(
            1, static_cast<int>(trial.rest_duration_s * trial.emg.rate_hz));
        for (int i = 0; i < std::min(rest_samples, trial.emg.length()); ++i) rest[i] = true;
        SampledSignal emg = baseline_correct(trial.emg, rest);
        emg = remove_outliers(emg, opts.outlier_sigma);
        emg = rms_envelope(emg, opts.rms_window_ms, opts.out_rate_hz);

        // Motion branch: savgol + forward differences happen inside assembly.
        Matrix features = assemble_motion_features(trial, opts.config, opts.savgol_window);

        // The envelope and the motion stream can disagree by a sample or two
        // after resampling; align on the shorter length.
        const int t_len = std::min<int>(emg.length(), static_cast<int>(features.rows()));
        Stage s;
        s.key = key;
        s.features = features.topRows(t_len);
        s.envelope = emg.samples.topRows(t_len);
        by_subject[key.subject].push_back(staged.size());
        staged.push_back(std::move(s));
    }

    for (const auto& [subject, indices] : by_subject) {
        std::vector<Matrix> feat_fit, targ_fit;
        for (std::size_t i : indices) {
            const bool in_fit = opts.norm_scope == NormScope::AllData ||
                                norm_keys.count(staged[i].key) > 0;
            if (in_fit) {
                feat_fit.push_back(staged[i].features);
                targ_fit.push_back(staged[i].envelope);
            }
        }
        // A subject whose every trial is reserved (held-out motion only, or
        // norm scope excludes them) falls back to all of that subject's data.
        if (feat_fit.empty()) {
            for (std::size_t i : indices) {
                feat_fit.push_back(staged[i].features);
                targ_fit.push_back(staged[i].envelope);
            }
        }
        const NormalizationParams fnorm = fit_normalization(feat_fit, -1.0, 1.0);
        const NormalizationParams tnorm = fit_normalization(targ_fit, 0.0, 1.0);
        out.feature_norm[subject] = fnorm;
        out.target_norm[subject] = tnorm;

        for (std::size_t i : indices) {
            ProcessedTrial t;
            t.key = staged[i].key;
            t.features = apply_normalization(staged[i].features, fnorm);
            t.targets = apply_normalization(staged[i].envelope, tnorm);
            check_finite(t.features, "processed features " + t.key.id());
            check_finite(t.targets, "processed targets " + t.key.id());
            out.trials.push_back(std::move(t));
        }
    }
    return out;
}

}  // namespace myo
