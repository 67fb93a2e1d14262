#pragma once

#include "myosynth/io.hpp"
#include "myosynth/rng.hpp"

#include <string>
#include <vector>

namespace myo {

enum class MotionCategory { Simple, Combined, Complex };

/// Per-joint waypoint list (degrees, rest-relative timing); trajectories start
/// and end at the shared rest pose.
struct MotionTemplate {
    std::string motion_id;
    MotionCategory category = MotionCategory::Simple;
    double rest_lead_s = 1.0;
    // Waypoints after the rest lead-in: (time offset in s, 6 joint angles).
    std::vector<std::pair<double, Vector>> waypoints;
    double tail_rest_s = 0.5;
};

Vector rest_pose();  // 6 joint angles, degrees

/// The default template bank: simple single-joint, combined two-joint, and
/// complex multi-waypoint motions, cycling until n_motions is reached. The
/// last one is a three-point pointing analogue intended as the held-out
/// "new motion".
std::vector<MotionTemplate> make_default_templates(int n_motions);

/// Minimum-jerk interpolation with per-repetition amplitude and timing jitter
/// (both +/-5%), sampled at 60 Hz.
SampledSignal gen_trajectory(const MotionTemplate& tmpl, std::uint64_t jitter_seed,
                             double rate_hz = 60.0);

/// Synthetic inter-subject variation applied on top of the forward model.
struct SubjectTransform {
    Vector gain;          // > 0, per channel
    Vector offset;        // >= 0
    Matrix mixing;        // row-stochastic, near identity
    Vector gamma;         // power-law exponent near 1
    double noise_sigma = 0.0;
};

SubjectTransform identity_transform(int channels = 8);
/// strength 0 = identity; around 1 = clearly different subject.
SubjectTransform random_transform(Rng& rng, double strength, int channels = 8);

/// Maps |velocity|, |acceleration|, and direction-gated angle excursions of
/// the 6 joints onto 8 channels through a synergy matrix, then a first-order
/// low-pass with time constant tau.
struct ForwardEmgModel {
    Matrix synergy;       // [8 x 24]
    double tau_ms = 80.0;
};

ForwardEmgModel make_default_emg_model(std::uint64_t seed);

/// Drive matrix [T x 24] from a 60 Hz joint trajectory.
Matrix motion_drives(const SampledSignal& joints);

SampledSignal forward_emg(const SampledSignal& joints, const ForwardEmgModel& model,
                          const SubjectTransform& transform, std::uint64_t noise_seed);

/// Toy forward kinematics: hand position (3) + orientation quaternion (4).
SampledSignal eef_from_joints(const SampledSignal& joints);

struct GenConfig {
    int n_subjects = 5;
    int n_motions = 20;
    int n_reps = 18;
    std::uint64_t seed = 42;
    double noise_sigma = 0.01;
    double subject_strength = 0.25;        // transform strength, subjects 2..n-1
    double held_out_strength = 1.0;        // last subject is deliberately different
    double tau_ms = 80.0;
    bool raw_emg_mode = false;             // emit 2222 Hz amplitude-modulated carrier
    double raw_rate_hz = 2222.0;

    json to_json() const;
    static GenConfig from_json(const json& j);
};

/// Writes the raw dataset (per-trial CSVs + manifest) and returns its manifest.
RawDataset gen_dataset(const GenConfig& cfg, const std::string& out_root);

/// Single in-memory trial, e.g. for tests.
TrialRecording gen_trial(const GenConfig& cfg, const MotionTemplate& tmpl,
                         const ForwardEmgModel& model, const SubjectTransform& transform,
                         const std::string& subject_id, int repetition);

}  // namespace myo
