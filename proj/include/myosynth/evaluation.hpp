#pragma once

#include "myosynth/common.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace myo {

/// Per-channel metrics plus averages for one (arch, regime, input, split) cell.
struct EvaluationReport {
    std::vector<double> mse;   // per channel
    std::vector<double> mse0;  // per channel
    std::vector<std::optional<double>> z;  // unset when mse0 == 0 (unscorable)
    double average_z = 0.0;    // mean over scorable channels
    double average_mse = 0.0;  // mean over channels
    int unscorable_channels = 0;

    std::string arch;
    std::string regime;
    std::string input_config;
    std::string split_role;
    std::string row_label;  // label used by table rendering; defaults to arch

    nlohmann::json to_json() const;
    static EvaluationReport from_json(const nlohmann::json& j);
};

/// Per-channel metrics over [T x C] matrices.
std::vector<double> mse_per_channel(const Matrix& pred, const Matrix& target);
std::vector<double> mse_zero_per_channel(const Matrix& target);

struct ZScoreResult {
    std::vector<std::optional<double>> per_channel;
    double average = 0.0;  // over scorable channels
    int unscorable = 0;
};
ZScoreResult z_score(const Matrix& pred, const Matrix& target);

enum class ScoringMode {
    Concatenate,      // pool all trials into one n per channel (default)
    PerTrialAverage,  // score each trial, average the scores
};

/// Builds a report from per-trial (prediction, target) pairs.
EvaluationReport evaluate_pairs(const std::vector<std::pair<Matrix, Matrix>>& pairs,
                                ScoringMode mode = ScoringMode::Concatenate);

enum class TableLayout {
    ArchByChannel,   // one row block per report, per-channel columns
    RegimeColumns,   // rows = report labels, columns = regimes
    InputVariants,   // rows = input configs, columns = regimes
};

std::string render_table_text(const std::vector<EvaluationReport>& reports, TableLayout layout);
std::string render_table_csv(const std::vector<EvaluationReport>& reports, TableLayout layout);

}  // namespace myo
