#include "myosynth/signal.hpp"

#include <algorithm>
#include <cmath>

namespace myo {

void SampledSignal::validate(const std::string& where) const {
    if (rate_hz <= 0.0) throw ValidationError(where + ": rate_hz must be positive");
    if (!channel_names.empty() &&
        static_cast<int>(channel_names.size()) != channels())
        throw ValidationError(where + ": channel name count mismatch");
    check_finite(samples, where);
}

void TrialRecording::validate() const {
    emg.validate("emg");
    joints.validate("joints");
    eef.validate("eef");
    if (emg.channels() != 8) throw ValidationError("trial: emg must have 8 channels");
    if (joints.channels() != 6) throw ValidationError("trial: joints must have 6 channels");
    if (eef.channels() != 7) throw ValidationError("trial: eef must have 7 channels");
    if (repetition < 1) throw ValidationError("trial: repetition must be >= 1");
}

int InputConfig::feature_width() const {
    switch (variant) {
        case InputVariant::ALL: return 18;
        case InputVariant::ANG: return 6;
        case InputVariant::VEL: return 6;
        case InputVariant::ACC: return 6;
        case InputVariant::EEF: return 7;
        case InputVariant::EEF_PLUS: return 21;
    }
    throw InternalError("unknown input variant");
}

std::string InputConfig::name() const {
    switch (variant) {
        case InputVariant::ALL: return "all";
        case InputVariant::ANG: return "ang";
        case InputVariant::VEL: return "vel";
        case InputVariant::ACC: return "acc";
        case InputVariant::EEF: return "eef";
        case InputVariant::EEF_PLUS: return "eefplus";
    }
    throw InternalError("unknown input variant");
}

InputConfig InputConfig::parse(const std::string& name) {
    if (name == "all") return {InputVariant::ALL};
    if (name == "ang") return {InputVariant::ANG};
    if (name == "vel") return {InputVariant::VEL};
    if (name == "acc") return {InputVariant::ACC};
    if (name == "eef") return {InputVariant::EEF};
    if (name == "eefplus" || name == "eef+") return {InputVariant::EEF_PLUS};
    throw ValidationError("unknown input config: " + name);
}

SampledSignal baseline_correct(const SampledSignal& signal, const std::vector<bool>& rest_mask) {
    if (rest_mask.size() != static_cast<std::size_t>(signal.length()))
        throw ValidationError("baseline_correct: mask length mismatch");
    const long n_rest = std::count(rest_mask.begin(), rest_mask.end(), true);
    if (n_rest == 0) throw ValidationError("no rest baseline");

    SampledSignal out = signal;
    for (int c = 0; c < signal.channels(); ++c) {
        double mean = 0.0;
        for (int i = 0; i < signal.length(); ++i)
            if (rest_mask[i]) mean += signal.samples(i, c);
        mean /= static_cast<double>(n_rest);
        out.samples.col(c).array() -= mean;
    }
    out.validate("baseline_correct");
    return out;
}

namespace {

// Least-squares polynomial fit through (xs, ys), evaluated at xq.
// Degree is capped by the number of points.
double polyfit_eval(const std::vector<double>& xs, const std::vector<double>& ys, int degree,
                    double xq) {
    const int n = static_cast<int>(xs.size());
    const int deg = std::min(degree, n - 1);
    Matrix A(n, deg + 1);
    Vector b(n);
    for (int i = 0; i < n; ++i) {
        // Center on the query point for conditioning; evaluation is then A(0).
        double p = 1.0;
        for (int j = 0; j <= deg; ++j) {
            A(i, j) = p;
            p *= (xs[i] - xq);
        }
        b(i) = ys[i];
    }
    Vector coef = A.colPivHouseholderQr().solve(b);
    return coef(0);
}

}  // namespace

SampledSignal remove_outliers(const SampledSignal& signal, double k_sigma) {
    const int n = signal.length();
    if (n < 5) throw ValidationError("remove_outliers: signal length must be >= 5");

    SampledSignal out = signal;
    for (int c = 0; c < signal.channels(); ++c) {
        const auto col = signal.samples.col(c);
        const double mu = col.mean();
        const double sigma = std::sqrt((col.array() - mu).square().mean());

        std::vector<bool> flagged(n, false);
        int n_flagged = 0;
        if (sigma > 0.0) {
            for (int i = 0; i < n; ++i) {
                if (std::abs(col(i) - mu) > k_sigma * sigma) {
                    flagged[i] = true;
                    ++n_flagged;
                }
            }
        }
        if (n_flagged * 2 > n) throw ValidationError("channel unusable");
        if (n_flagged == 0) continue;

        // Replace each contiguous run with a spline through up to two clean
        // samples on each side.
        for (int i = 0; i < n;) {
            if (!flagged[i]) {
                ++i;
                continue;
            }
            int run_end = i;
            while (run_end + 1 < n && flagged[run_end + 1]) ++run_end;

            std::vector<double> xs, ys;
            for (int j = i - 1, taken = 0; j >= 0 && taken < 2; --j) {
                if (!flagged[j]) {
                    xs.push_back(j);
                    ys.push_back(col(j));
                    ++taken;
                }
            }
            std::reverse(xs.begin(), xs.end());
            std::reverse(ys.begin(), ys.end());
            for (int j = run_end + 1, taken = 0; j < n && taken < 2; ++j) {
                if (!flagged[j]) {
                    xs.push_back(j);
                    ys.push_back(col(j));
                    ++taken;
                }
            }
            if (xs.empty()) throw ValidationError("channel unusable");
            for (int j = i; j <= run_end; ++j)
                out.samples(j, c) = polyfit_eval(xs, ys, 3, j);
            i = run_end + 1;
        }
    }
    out.validate("remove_outliers");
    return out;
}

SampledSignal rms_envelope(const SampledSignal& signal, double window_ms, double out_rate_hz) {
    const double win_s = window_ms / 1000.0;
    require(win_s * signal.rate_hz >= 1.0, "rms_envelope: window shorter than one sample");
    require(out_rate_hz <= signal.rate_hz, "rms_envelope: out_rate_hz must be <= rate_hz");
    require(out_rate_hz > 0, "rms_envelope: out_rate_hz must be positive");
    const int n = signal.length();
    require(n >= 1, "rms_envelope: empty signal");

    const double duration = signal.duration_s();
    const int n_out = static_cast<int>(std::floor(duration * out_rate_hz + 1e-9)) + 1;

    SampledSignal out;
    out.rate_hz = out_rate_hz;
    out.channel_names = signal.channel_names;
    out.samples.resize(n_out, signal.channels());

    for (int j = 0; j < n_out; ++j) {
        const double tc = j / out_rate_hz;
        // Input samples with timestamps in [tc - w/2, tc + w/2], truncated at edges.
        int lo = static_cast<int>(std::ceil((tc - win_s / 2.0) * signal.rate_hz - 1e-9));
        int hi = static_cast<int>(std::floor((tc + win_s / 2.0) * signal.rate_hz + 1e-9));
        lo = std::max(lo, 0);
        hi = std::min(hi, n - 1);
        if (hi < lo) throw InternalError("rms_envelope: empty window");
        const int count = hi - lo + 1;
        for (int c = 0; c < signal.channels(); ++c) {
            const double ss = signal.samples.col(c).segment(lo, count).squaredNorm();
            out.samples(j, c) = std::sqrt(ss / count);
        }
    }
    out.validate("rms_envelope");
    return out;
}

SampledSignal savgol_smooth(const SampledSignal& signal, int poly_order, int window_len) {
    const int n = signal.length();
    require(window_len % 2 == 1, "savgol: window_len must be odd");
    require(window_len > poly_order, "savgol: window_len must exceed poly_order");
    require(window_len <= n, "savgol: window_len exceeds signal length");
    require(poly_order >= 0, "savgol: poly_order must be >= 0");

    const int half = window_len / 2;
    SampledSignal out = signal;
    for (int i = 0; i < n; ++i) {
        const int lo = std::max(0, i - half);
        const int hi = std::min(n - 1, i + half);
        const int count = hi - lo + 1;
        const int deg = std::min(poly_order, count - 1);
        Matrix A(count, deg + 1);
        for (int r = 0; r < count; ++r) {
            double p = 1.0;
            for (int j = 0; j <= deg; ++j) {
                A(r, j) = p;
                p *= (lo + r - i);
            }
        }
        const auto qr = A.colPivHouseholderQr();
        for (int c = 0; c < signal.channels(); ++c) {
            Vector b = signal.samples.col(c).segment(lo, count);
            Vector coef = qr.solve(b);
            out.samples(i, c) = coef(0);
        }
    }
    out.validate("savgol_smooth");
    return out;
}

SampledSignal forward_difference(const SampledSignal& signal) {
    const int n = signal.length();
    require(n >= 2, "forward_difference: length must be >= 2");
    SampledSignal out = signal;
    out.samples.topRows(n - 1) = signal.samples.bottomRows(n - 1) - signal.samples.topRows(n - 1);
    out.samples.row(n - 1) = out.samples.row(n - 2);
    out.validate("forward_difference");
    return out;
}

NormalizationParams fit_normalization(const std::vector<Matrix>& data, double lo, double hi) {
    require(!data.empty(), "fit_normalization: no data");
    const int channels = static_cast<int>(data.front().cols());
    NormalizationParams params;
    params.lo = lo;
    params.hi = hi;
    params.mins = Vector::Constant(channels, std::numeric_limits<double>::infinity());
    params.maxs = Vector::Constant(channels, -std::numeric_limits<double>::infinity());
    for (const Matrix& m : data) {
        require(static_cast<int>(m.cols()) == channels, "fit_normalization: channel mismatch");
        params.mins = params.mins.cwiseMin(m.colwise().minCoeff().transpose());
        params.maxs = params.maxs.cwiseMax(m.colwise().maxCoeff().transpose());
    }
    return params;
}

NormalizationParams fit_normalization(const std::vector<SampledSignal>& signals, double lo,
                                      double hi) {
    std::vector<Matrix> data;
    data.reserve(signals.size());
    for (const auto& s : signals) data.push_back(s.samples);
    return fit_normalization(data, lo, hi);
}

Matrix apply_normalization(const Matrix& data, const NormalizationParams& params) {
    require(static_cast<int>(data.cols()) == params.channels(),
            "apply_normalization: channel mismatch");
    Matrix out(data.rows(), data.cols());
    const double mid = 0.5 * (params.lo + params.hi);
    for (int c = 0; c < params.channels(); ++c) {
        const double span = params.maxs(c) - params.mins(c);
        if (span < 1e-9) {
            out.col(c).setConstant(mid);
        } else {
            out.col(c) = params.lo +
                         (data.col(c).array() - params.mins(c)) / span * (params.hi - params.lo);
            // Values outside the fitted range stay inside the target interval.
            out.col(c) = out.col(c).cwiseMax(params.lo).cwiseMin(params.hi);
        }
    }
    return out;
}

Matrix invert_normalization(const Matrix& data, const NormalizationParams& params) {
    require(static_cast<int>(data.cols()) == params.channels(),
            "invert_normalization: channel mismatch");
    Matrix out(data.rows(), data.cols());
    for (int c = 0; c < params.channels(); ++c) {
        const double span = params.maxs(c) - params.mins(c);
        if (span < 1e-9) {
            out.col(c).setConstant(params.mins(c));
        } else {
            out.col(c) = params.mins(c) +
                         (data.col(c).array() - params.lo) / (params.hi - params.lo) * span;
        }
    }
    return out;
}

SampledSignal apply_normalization(const SampledSignal& signal, const NormalizationParams& params) {
    SampledSignal out = signal;
    out.samples = apply_normalization(signal.samples, params);
    return out;
}

SampledSignal invert_normalization(const SampledSignal& signal, const NormalizationParams& params) {
    SampledSignal out = signal;
    out.samples = invert_normalization(signal.samples, params);
    return out;
}

Matrix assemble_motion_features(const TrialRecording& trial, const InputConfig& config,
                                int savgol_window) {
    const int t = trial.joints.length();
    require(trial.eef.length() == t, "trial streams must share one length at 60 Hz");

    switch (config.variant) {
        case InputVariant::ALL:
        case InputVariant::ANG:
        case InputVariant::VEL:
        case InputVariant::ACC: {
            const int win = std::min(savgol_window | 1, (t % 2 == 1) ? t : t - 1);
            SampledSignal ang = savgol_smooth(trial.joints, 3, win);
            if (config.variant == InputVariant::ANG) return ang.samples;
            SampledSignal vel = forward_difference(ang);
            if (config.variant == InputVariant::VEL) return vel.samples;
            SampledSignal acc = forward_difference(vel);
            if (config.variant == InputVariant::ACC) return acc.samples;
            Matrix all(t, 18);
            all << ang.samples, vel.samples, acc.samples;
            return all;
        }
        case InputVariant::EEF:
            return trial.eef.samples;
        case InputVariant::EEF_PLUS: {
            SampledSignal d1 = forward_difference(trial.eef);
            SampledSignal d2 = forward_difference(d1);
            Matrix out(t, 21);
            out << trial.eef.samples, d1.samples, d2.samples;
            return out;
        }
    }
    throw InternalError("unknown input variant");
}

Matrix build_features(const TrialRecording& trial, const InputConfig& config,
                      const NormalizationParams& norm, int savgol_window) {
    Matrix raw = assemble_motion_features(trial, config, savgol_window);
    require(static_cast<int>(raw.cols()) == config.feature_width(),
            "build_features: config/trial width mismatch");
    require(norm.channels() == config.feature_width(),
            "build_features: normalization params do not match config");
    return apply_normalization(raw, norm);
}

}  // namespace myo
