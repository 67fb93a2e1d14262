#include "myosynth/evaluation.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace myo {

using nlohmann::json;

std::vector<double> mse_per_channel(const Matrix& pred, const Matrix& target) {
    require(pred.rows() == target.rows() && pred.cols() == target.cols(),
            "mse: shape mismatch");
    require(pred.rows() > 0, "mse: empty input");
    std::vector<double> out(pred.cols());
    for (int c = 0; c < pred.cols(); ++c)
        out[c] = (pred.col(c) - target.col(c)).squaredNorm() /
                 static_cast<double>(pred.rows());
    return out;
}

std::vector<double> mse_zero_per_channel(const Matrix& target) {
    require(target.rows() > 0, "mse_zero: empty input");
    std::vector<double> out(target.cols());
    for (int c = 0; c < target.cols(); ++c)
        out[c] = target.col(c).squaredNorm() / static_cast<double>(target.rows());
    return out;
}

ZScoreResult z_score(const Matrix& pred, const Matrix& target) {
    const auto mse = mse_per_channel(pred, target);
    const auto mse0 = mse_zero_per_channel(target);
    ZScoreResult r;
    r.per_channel.resize(mse.size());
    double sum = 0.0;
    int n = 0;
    for (std::size_t c = 0; c < mse.size(); ++c) {
        if (mse0[c] > 0.0) {
            r.per_channel[c] = 100.0 * (1.0 - mse[c] / mse0[c]);
            sum += *r.per_channel[c];
            ++n;
        } else {
            ++r.unscorable;
        }
    }
    r.average = n > 0 ? sum / n : 0.0;
    return r;
}

EvaluationReport evaluate_pairs(const std::vector<std::pair<Matrix, Matrix>>& pairs,
                                ScoringMode mode) {
    require(!pairs.empty(), "evaluate: no trials");
    const int channels = static_cast<int>(pairs.front().first.cols());

    EvaluationReport rep;
    if (mode == ScoringMode::Concatenate) {
        long total_rows = 0;
        for (const auto& [p, t] : pairs) {
            require(p.cols() == channels && t.cols() == channels,
                    "evaluate: channel count mismatch");
            require(p.rows() == t.rows(), "evaluate: prediction/target length mismatch");
            total_rows += p.rows();
        }
        Matrix pred(total_rows, channels), target(total_rows, channels);
        long row = 0;
        for (const auto& [p, t] : pairs) {
            pred.middleRows(row, p.rows()) = p;
            target.middleRows(row, t.rows()) = t;
            row += p.rows();
        }
        rep.mse = mse_per_channel(pred, target);
        rep.mse0 = mse_zero_per_channel(target);
        const auto zs = z_score(pred, target);
        rep.z = zs.per_channel;
        rep.average_z = zs.average;
        rep.unscorable_channels = zs.unscorable;
    } else {
        rep.mse.assign(channels, 0.0);
        rep.mse0.assign(channels, 0.0);
        std::vector<double> z_sum(channels, 0.0);
        std::vector<int> z_count(channels, 0);
        for (const auto& [p, t] : pairs) {
            const auto m = mse_per_channel(p, t);
            const auto m0 = mse_zero_per_channel(t);
            for (int c = 0; c < channels; ++c) {
                rep.mse[c] += m[c] / static_cast<double>(pairs.size());
                rep.mse0[c] += m0[c] / static_cast<double>(pairs.size());
                if (m0[c] > 0.0) {
                    z_sum[c] += 100.0 * (1.0 - m[c] / m0[c]);
                    ++z_count[c];
                }
            }
        }
        rep.z.resize(channels);
        double sum = 0.0;
        int n = 0;
        for (int c = 0; c < channels; ++c) {
            if (z_count[c] > 0) {
                rep.z[c] = z_sum[c] / z_count[c];
                sum += *rep.z[c];
                ++n;
            } else {
                ++rep.unscorable_channels;
            }
        }
        rep.average_z = n > 0 ? sum / n : 0.0;
    }
    rep.average_mse = 0.0;
    for (double m : rep.mse) rep.average_mse += m / static_cast<double>(channels);
    return rep;
}

json EvaluationReport::to_json() const {
    json jz = json::array();
    for (const auto& v : z) {
        if (v)
            jz.push_back(*v);
        else
            jz.push_back(nullptr);
    }
    return json{{"schema_version", 1},
                {"mse", mse},
                {"mse0", mse0},
                {"z", jz},
                {"average_z", average_z},
                {"average_mse", average_mse},
                {"unscorable_channels", unscorable_channels},
                {"arch", arch},
                {"regime", regime},
                {"input_config", input_config},
                {"split_role", split_role},
                {"row_label", row_label}};
}

EvaluationReport EvaluationReport::from_json(const json& j) {
    EvaluationReport r;
    r.mse = j.at("mse").get<std::vector<double>>();
    r.mse0 = j.at("mse0").get<std::vector<double>>();
    for (const auto& v : j.at("z")) {
        if (v.is_null())
            r.z.push_back(std::nullopt);
        else
            r.z.push_back(v.get<double>());
    }
    r.average_z = j.at("average_z").get<double>();
    r.average_mse = j.at("average_mse").get<double>();
    r.unscorable_channels = j.value("unscorable_channels", 0);
    r.arch = j.value("arch", "");
    r.regime = j.value("regime", "");
    r.input_config = j.value("input_config", "");
    r.split_role = j.value("split_role", "");
    r.row_label = j.value("row_label", "");
    return r;
}

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(5);
    os << v;
    return os.str();
}

std::string label_of(const EvaluationReport& r) {
    if (!r.row_label.empty()) return r.row_label;
    return r.arch.empty() ? "-" : r.arch;
}

// Collect the regime column order actually present, preferring the canonical one.
std::vector<std::string> regime_columns(const std::vector<EvaluationReport>& reports) {
    std::vector<std::string> cols;
    for (const char* want : {"general", "pretrain", "subject"}) {
        for (const auto& r : reports)
            if (r.regime == want) {
                cols.push_back(want);
                break;
            }
    }
    for (const auto& r : reports)
        if (std::find(cols.begin(), cols.end(), r.regime) == cols.end())
            cols.push_back(r.regime);
    return cols;
}

struct TableGrid {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

TableGrid build_grid(const std::vector<EvaluationReport>& reports, TableLayout layout) {
    TableGrid g;
    if (layout == TableLayout::ArchByChannel) {
        const std::size_t channels = reports.empty() ? 0 : reports.front().mse.size();
        g.header = {"", "metric"};
        for (std::size_t c = 1; c <= channels; ++c) g.header.push_back(std::to_string(c));
        g.header.push_back("average");
        for (const auto& r : reports) {
            std::vector<std::string> zrow = {label_of(r), "Zs"};
            std::vector<std::string> mrow = {"", "MSE"};
            for (std::size_t c = 0; c < channels; ++c) {
                zrow.push_back(r.z[c] ? fmt(*r.z[c]) : "n/a");
                mrow.push_back(fmt(r.mse[c]));
            }
            zrow.push_back(fmt(r.average_z));
            mrow.push_back(fmt(r.average_mse));
            g.rows.push_back(zrow);
            g.rows.push_back(mrow);
        }
    } else {
        const auto cols = regime_columns(reports);
        g.header = {"", "metric"};
        for (const auto& c : cols) g.header.push_back(c);
        std::vector<std::string> labels;
        for (const auto& r : reports) {
            const std::string l =
                layout == TableLayout::InputVariants ? r.input_config : label_of(r);
            if (std::find(labels.begin(), labels.end(), l) == labels.end())
                labels.push_back(l);
        }
        for (const auto& l : labels) {
            std::vector<std::string> zrow = {l, "Zs"};
            std::vector<std::string> mrow = {"", "MSE"};
            for (const auto& c : cols) {
                const EvaluationReport* found = nullptr;
                for (const auto& r : reports) {
                    const std::string rl =
                        layout == TableLayout::InputVariants ? r.input_config : label_of(r);
                    if (rl == l && r.regime == c) {
                        found = &r;
                        break;
                    }
                }
                zrow.push_back(found ? fmt(found->average_z) : "-");
                mrow.push_back(found ? fmt(found->average_mse) : "-");
            }
            g.rows.push_back(zrow);
            g.rows.push_back(mrow);
        }
    }
    return g;
}

}  // namespace

std::string render_table_text(const std::vector<EvaluationReport>& reports, TableLayout layout) {
    const TableGrid g = build_grid(reports, layout);
    std::vector<std::size_t> widths(g.header.size(), 0);
    auto widen = [&](const std::vector<std::string>& row) {
        for (std::size_t i = 0; i < row.size(); ++i)
            widths[i] = std::max(widths[i], row[i].size());
    };
    widen(g.header);
    for (const auto& r : g.rows) widen(r);

    std::ostringstream os;
    auto emit = [&](const std::vector<std::string>& row) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            os << row[i];
            if (i + 1 < row.size())
                os << std::string(widths[i] - row[i].size() + 2, ' ');
        }
        os << "\n";
    };
    emit(g.header);
    std::size_t total = 0;
    for (std::size_t w : widths) total += w + 2;
    os << std::string(total, '-') << "\n";
    for (const auto& r : g.rows) emit(r);
    return os.str();
}

std::string render_table_csv(const std::vector<EvaluationReport>& reports, TableLayout layout) {
    const TableGrid g = build_grid(reports, layout);
    std::ostringstream os;
    auto emit = [&](const std::vector<std::string>& row) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            os << row[i];
            if (i + 1 < row.size()) os << ",";
        }
        os << "\n";
    };
    emit(g.header);
    for (const auto& r : g.rows) emit(r);
    return os.str();
}

}  // namespace myo
