#include "myosynth/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

namespace myo {

namespace fs = std::filesystem;

Vector rest_pose() { return Vector::Zero(6); }

namespace {

constexpr double kPi = 3.14159265358979323846;

MotionTemplate simple_motion(int index, const std::string& id) {
    MotionTemplate t;
    t.motion_id = id;
    t.category = MotionCategory::Simple;
    const int joint = index % 6;
    const double amp = (30.0 + 5.0 * (index % 4)) * ((index / 6) % 2 == 0 ? 1.0 : -1.0);
    Vector up = rest_pose();
    up(joint) = amp;
    Vector half = rest_pose();
    half(joint) = 0.4 * amp;
    // Two out-and-back cycles.
    t.waypoints = {{0.8, up}, {1.5, half}, {2.2, up}, {3.0, rest_pose()}};
    return t;
}

MotionTemplate combined_motion(int index, const std::string& id) {
    MotionTemplate t;
    t.motion_id = id;
    t.category = MotionCategory::Combined;
    const int j1 = index % 6;
    const int j2 = (index + 2) % 6;
    Vector up = rest_pose();
    up(j1) = 40.0;
    up(j2) = 30.0;
    Vector mid = rest_pose();
    mid(j1) = 15.0;
    mid(j2) = 35.0;
    t.waypoints = {{0.9, up}, {1.7, mid}, {2.4, up}, {3.2, rest_pose()}};
    return t;
}

MotionTemplate complex_motion(int index, const std::string& id) {
    MotionTemplate t;
    t.motion_id = id;
    t.category = MotionCategory::Complex;
    Rng rng(Rng::derive(0x5eed5eedULL, static_cast<std::uint64_t>(index)));
    double time = 0.0;
    for (int w = 0; w < 4; ++w) {
        time += 0.7 + 0.2 * rng.uniform();
        Vector pose = rest_pose();
        for (int j = 0; j < 6; ++j)
            pose(j) = rng.uniform(-1.0, 1.0) * (20.0 + 25.0 * rng.uniform());
        t.waypoints.push_back({time, pose});
    }
    t.waypoints.push_back({time + 0.8, rest_pose()});
    return t;
}

MotionTemplate pointing_motion(const std::string& id) {
    // Three reach targets in space, analogous to "pointing into three points".
    MotionTemplate t;
    t.motion_id = id;
    t.category = MotionCategory::Complex;
    Vector p1 = rest_pose(), p2 = rest_pose(), p3 = rest_pose();
    p1(0) = 45.0;
    p1(1) = 25.0;
    p1(2) = 35.0;
    p2(0) = -20.0;
    p2(1) = 50.0;
    p2(2) = 20.0;
    p2(4) = 15.0;
    p3(0) = 25.0;
    p3(1) = -15.0;
    p3(2) = 55.0;
    p3(5) = -20.0;
    t.waypoints = {{0.7, p1}, {1.4, rest_pose()}, {2.1, p2},
                   {2.8, rest_pose()}, {3.5, p3}, {4.2, rest_pose()}};
    return t;
}

std::string motion_label(int i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "m%02d", i + 1);
    return buf;
}

}  // namespace

std::vector<MotionTemplate> make_default_templates(int n_motions) {
    require(n_motions >= 1, "need at least one motion");
    std::vector<MotionTemplate> out;
    for (int i = 0; i < n_motions - 1; ++i) {
        const std::string id = motion_label(i);
        if (i < 8)
            out.push_back(simple_motion(i, id));
        else if (i < 11)
            out.push_back(combined_motion(i, id));
        else
            out.push_back(complex_motion(i, id));
    }
    out.push_back(pointing_motion(motion_label(n_motions - 1)));
    return out;
}

SampledSignal gen_trajectory(const MotionTemplate& tmpl, std::uint64_t jitter_seed,
                             double rate_hz) {
    Rng rng(jitter_seed);
    const double amp_factor = 1.0 + rng.uniform(-0.05, 0.05);

    // Jittered waypoint schedule, anchored at the rest pose on both ends.
    std::vector<std::pair<double, Vector>> pts;
    pts.push_back({tmpl.rest_lead_s, rest_pose()});
    double prev_t = 0.0;
    for (const auto& [t_off, pose] : tmpl.waypoints) {
        const double seg = (t_off - prev_t) * (1.0 + rng.uniform(-0.05, 0.05));
        prev_t = t_off;
        pts.push_back({pts.back().first + std::max(seg, 0.1),
                       rest_pose() + amp_factor * (pose - rest_pose())});
    }
    const double motion_end = pts.back().first;
    const double duration = motion_end + tmpl.tail_rest_s;

    const int n = static_cast<int>(std::floor(duration * rate_hz)) + 1;
    SampledSignal out;
    out.rate_hz = rate_hz;
    out.channel_names = {"shoulder_abd", "shoulder_flex", "elbow_flex",
                         "elbow_rot",    "wrist_abd",     "wrist_flex"};
    out.samples.resize(n, 6);

    for (int i = 0; i < n; ++i) {
        const double t = i / rate_hz;
        Vector pose;
        if (t <= pts.front().first) {
            pose = rest_pose();
        } else if (t >= motion_end) {
            pose = rest_pose();
        } else {
            std::size_t seg = 0;
            while (seg + 1 < pts.size() && pts[seg + 1].first < t) ++seg;
            const double t0 = pts[seg].first, t1 = pts[seg + 1].first;
            const double u = (t - t0) / (t1 - t0);
            const double s = u * u * u * (10.0 - 15.0 * u + 6.0 * u * u);  // minimum jerk
            pose = pts[seg].second + s * (pts[seg + 1].second - pts[seg].second);
        }
        out.samples.row(i) = pose.transpose();
    }
    out.validate("gen_trajectory");
    return out;
}

SubjectTransform identity_transform(int channels) {
    SubjectTransform t;
    t.gain = Vector::Ones(channels);
    t.offset = Vector::Zero(channels);
    t.mixing = Matrix::Identity(channels, channels);
    t.gamma = Vector::Ones(channels);
    t.noise_sigma = 0.0;
    return t;
}

SubjectTransform random_transform(Rng& rng, double strength, int channels) {
    SubjectTransform t = identity_transform(channels);
    for (int c = 0; c < channels; ++c) {
        t.gain(c) = std::max(0.3, 1.0 + strength * rng.uniform(-0.35, 0.35));
        t.offset(c) = 0.02 + strength * rng.uniform(0.0, 0.05);
        t.gamma(c) = std::clamp(1.0 + strength * rng.uniform(-0.35, 0.35), 0.5, 1.6);
    }
    const double mix = std::min(0.45, 0.3 * strength);
    Matrix w(channels, channels);
    for (int r = 0; r < channels; ++r) {
        double sum = 0.0;
        for (int c = 0; c < channels; ++c) {
            w(r, c) = rng.uniform();
            sum += w(r, c);
        }
        w.row(r) /= sum;
    }
    t.mixing = (1.0 - mix) * Matrix::Identity(channels, channels) + mix * w;
    return t;
}

ForwardEmgModel make_default_emg_model(std::uint64_t seed) {
    Rng rng(seed);
    ForwardEmgModel model;
    model.synergy = Matrix::Zero(8, 24);
    // Drive layout: [0..5] pos+, [6..11] pos-, [12..17] |vel|, [18..23] |acc|.
    for (int c = 0; c < 8; ++c) {
        const int j = c % 6;
        model.synergy(c, (c % 2 == 0) ? j : j + 6) = 0.5 + 0.2 * rng.uniform();
        model.synergy(c, 12 + j) = 0.35 + 0.15 * rng.uniform();
        model.synergy(c, 18 + (j + 1) % 6) = 0.15 + 0.1 * rng.uniform();
        // Weak crosstalk keeps every channel responsive to several joints.
        for (int k = 0; k < 24; ++k)
            if (model.synergy(c, k) == 0.0 && rng.uniform() < 0.15)
                model.synergy(c, k) = 0.05 + 0.05 * rng.uniform();
    }
    return model;
}

Matrix motion_drives(const SampledSignal& joints) {
    const int t_len = joints.length();
    const Vector rest = rest_pose();
    const SampledSignal vel = forward_difference(joints);
    const SampledSignal acc = forward_difference(vel);
    const double rate = joints.rate_hz;

    Matrix drives(t_len, 24);
    for (int i = 0; i < t_len; ++i) {
        for (int j = 0; j < 6; ++j) {
            const double excursion = joints.samples(i, j) - rest(j);
            drives(i, j) = std::max(excursion, 0.0) / 30.0;
            drives(i, 6 + j) = std::max(-excursion, 0.0) / 30.0;
            drives(i, 12 + j) = std::abs(vel.samples(i, j)) * rate / 90.0;
            drives(i, 18 + j) = std::abs(acc.samples(i, j)) * rate * rate / 900.0;
        }
    }
    return drives;
}

SampledSignal forward_emg(const SampledSignal& joints, const ForwardEmgModel& model,
                          const SubjectTransform& transform, std::uint64_t noise_seed) {
    const int t_len = joints.length();
    Matrix activation = motion_drives(joints) * model.synergy.transpose();  // [T x 8]

    // First-order low-pass models activation dynamics.
    const double dt = 1.0 / joints.rate_hz;
    const double alpha = dt / (model.tau_ms / 1000.0 + dt);
    for (int c = 0; c < 8; ++c) {
        double y = 0.0;
        for (int i = 0; i < t_len; ++i) {
            y += alpha * (activation(i, c) - y);
            activation(i, c) = y;
        }
    }

    Matrix mixed = activation * transform.mixing.transpose();
    Rng rng(noise_seed);
    SampledSignal out;
    out.rate_hz = joints.rate_hz;
    out.channel_names = {"emg1", "emg2", "emg3", "emg4", "emg5", "emg6", "emg7", "emg8"};
    out.samples.resize(t_len, 8);
    for (int i = 0; i < t_len; ++i) {
        for (int c = 0; c < 8; ++c) {
            const double base = std::max(mixed(i, c), 0.0);
            double v = transform.gain(c) * std::pow(base, transform.gamma(c)) +
                       transform.offset(c);
            if (transform.noise_sigma > 0.0) v += transform.noise_sigma * rng.normal();
            out.samples(i, c) = std::max(v, 0.0);
        }
    }
    out.validate("forward_emg");
    return out;
}

SampledSignal eef_from_joints(const SampledSignal& joints) {
    const int t_len = joints.length();
    SampledSignal out;
    out.rate_hz = joints.rate_hz;
    out.channel_names = {"px", "py", "pz", "qw", "qx", "qy", "qz"};
    out.samples.resize(t_len, 7);

    const double upper = 0.30, fore = 0.25, hand = 0.08;
    for (int i = 0; i < t_len; ++i) {
        const double a0 = joints.samples(i, 0) * kPi / 180.0;  // shoulder abduction
        const double a1 = joints.samples(i, 1) * kPi / 180.0;  // shoulder flexion
        const double a2 = joints.samples(i, 2) * kPi / 180.0;  // elbow flexion
        const double a3 = joints.samples(i, 3) * kPi / 180.0;  // elbow rotation
        const double a4 = joints.samples(i, 4) * kPi / 180.0;  // wrist abduction
        const double a5 = joints.samples(i, 5) * kPi / 180.0;  // wrist flexion

        const Eigen::Vector3d elbow(upper * std::sin(a1) * std::cos(a0),
                                    upper * std::sin(a0),
                                    -upper * std::cos(a1) * std::cos(a0));
        const double fa = a1 + a2;
        const Eigen::Vector3d wrist =
            elbow + Eigen::Vector3d(fore * std::sin(fa) * std::cos(a0 + 0.3 * a3),
                                    fore * std::sin(a0 + 0.3 * a3),
                                    -fore * std::cos(fa) * std::cos(a0));
        const Eigen::Vector3d tip =
            wrist + hand * Eigen::Vector3d(std::sin(fa + a5), std::sin(a4), -std::cos(fa + a5));

        // Hand orientation from intrinsic z-y-x angles.
        const double yaw = a0 + 0.3 * a3, pitch = fa, roll = a4 + a5;
        const double cy = std::cos(yaw / 2), sy = std::sin(yaw / 2);
        const double cp = std::cos(pitch / 2), sp = std::sin(pitch / 2);
        const double cr = std::cos(roll / 2), sr = std::sin(roll / 2);
        Eigen::Vector4d q(cr * cp * cy + sr * sp * sy, sr * cp * cy - cr * sp * sy,
                          cr * sp * cy + sr * cp * sy, cr * cp * sy - sr * sp * cy);
        q.normalize();

        out.samples(i, 0) = tip.x();
        out.samples(i, 1) = tip.y();
        out.samples(i, 2) = tip.z();
        out.samples.row(i).segment(3, 4) = q.transpose();
    }
    out.validate("eef_from_joints");
    return out;
}

namespace {

// Amplitude-modulated zero-mean carrier whose local RMS equals the envelope.
SampledSignal modulate_raw(const SampledSignal& envelope, double raw_rate_hz,
                           std::uint64_t seed) {
    Rng rng(seed);
    const double duration = envelope.duration_s();
    const int n = static_cast<int>(std::floor(duration * raw_rate_hz)) + 1;
    SampledSignal out;
    out.rate_hz = raw_rate_hz;
    out.channel_names = envelope.channel_names;
    out.samples.resize(n, envelope.channels());
    for (int i = 0; i < n; ++i) {
        const double t = i / raw_rate_hz;
        const double idx = t * envelope.rate_hz;
        const int lo = std::min(static_cast<int>(idx), envelope.length() - 1);
        const int hi = std::min(lo + 1, envelope.length() - 1);
        const double frac = idx - lo;
        for (int c = 0; c < envelope.channels(); ++c) {
            const double env = (1.0 - frac) * envelope.samples(lo, c) +
                               frac * envelope.samples(hi, c);
            out.samples(i, c) = env * rng.normal();
        }
    }
    return out;
}

std::string subject_label(int i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "s%02d", i + 1);
    return buf;
}

}  // namespace

json GenConfig::to_json() const {
    return json{{"n_subjects", n_subjects},
                {"n_motions", n_motions},
                {"n_reps", n_reps},
                {"seed", seed},
                {"noise_sigma", noise_sigma},
                {"subject_strength", subject_strength},
                {"held_out_strength", held_out_strength},
                {"tau_ms", tau_ms},
                {"raw_emg_mode", raw_emg_mode},
                {"raw_rate_hz", raw_rate_hz}};
}

GenConfig GenConfig::from_json(const json& j) {
    GenConfig c;
    c.n_subjects = j.value("n_subjects", c.n_subjects);
    c.n_motions = j.value("n_motions", c.n_motions);
    c.n_reps = j.value("n_reps", c.n_reps);
    c.seed = j.value("seed", c.seed);
    c.noise_sigma = j.value("noise_sigma", c.noise_sigma);
    c.subject_strength = j.value("subject_strength", c.subject_strength);
    c.held_out_strength = j.value("held_out_strength", c.held_out_strength);
    c.tau_ms = j.value("tau_ms", c.tau_ms);
    c.raw_emg_mode = j.value("raw_emg_mode", c.raw_emg_mode);
    c.raw_rate_hz = j.value("raw_rate_hz", c.raw_rate_hz);
    return c;
}

TrialRecording gen_trial(const GenConfig& cfg, const MotionTemplate& tmpl,
                         const ForwardEmgModel& model, const SubjectTransform& transform,
                         const std::string& subject_id, int repetition) {
    const std::uint64_t trial_seed =
        Rng::derive(cfg.seed, std::hash<std::string>{}(subject_id),
                    std::hash<std::string>{}(tmpl.motion_id),
                    static_cast<std::uint64_t>(repetition));
    TrialRecording t;
    t.subject_id = subject_id;
    t.motion_id = tmpl.motion_id;
    t.repetition = repetition;
    t.rest_duration_s = tmpl.rest_lead_s;
    t.joints = gen_trajectory(tmpl, Rng::derive(trial_seed, 1));
    t.eef = eef_from_joints(t.joints);
    SampledSignal envelope = forward_emg(t.joints, model, transform, Rng::derive(trial_seed, 2));
    t.emg = cfg.raw_emg_mode
                ? modulate_raw(envelope, cfg.raw_rate_hz, Rng::derive(trial_seed, 3))
                : envelope;
    t.validate();
    return t;
}

RawDataset gen_dataset(const GenConfig& cfg, const std::string& out_root) {
    require(cfg.n_subjects >= 1 && cfg.n_motions >= 1 && cfg.n_reps >= 1,
            "gen_dataset: counts must be positive");
    fs::create_directories(out_root);

    auto templates = make_default_templates(cfg.n_motions);
    ForwardEmgModel model = make_default_emg_model(Rng::derive(cfg.seed, 100));
    model.tau_ms = cfg.tau_ms;

    RawDataset ds;
    ds.root = out_root;
    ds.designated_new_motion = templates.back().motion_id;
    ds.designated_held_out_subject = subject_label(cfg.n_subjects - 1);

    for (int s = 0; s < cfg.n_subjects; ++s) {
        Rng subject_rng(Rng::derive(cfg.seed, 200, static_cast<std::uint64_t>(s)));
        const double strength =
            (s == cfg.n_subjects - 1) ? cfg.held_out_strength : cfg.subject_strength;
        SubjectTransform transform = random_transform(subject_rng, strength);
        transform.noise_sigma = cfg.noise_sigma;
        const std::string subject = subject_label(s);
        for (const auto& tmpl : templates) {
            for (int rep = 1; rep <= cfg.n_reps; ++rep) {
                TrialRecording trial = gen_trial(cfg, tmpl, model, transform, subject, rep);
                save_raw_trial(out_root, trial);
                ds.trials.push_back({subject, tmpl.motion_id, rep});
            }
        }
    }
    save_raw_manifest(ds);
    save_json_file((fs::path(out_root) / "gen_config.json").string(), cfg.to_json());
    return ds;
}

}  // namespace myo
