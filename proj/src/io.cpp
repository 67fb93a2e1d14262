#include "myosynth/io.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace myo {

namespace fs = std::filesystem;

std::string TrialKey::id() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "r%02d", repetition);
    return subject + "_" + motion + "_" + buf;
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MissingArtifact("file not found: " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ValidationError("JSON parse error in " + path + ": " + e.what());
    }
    return j;
}

void save_json_file(const std::string& path, const json& j) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw ValidationError("cannot write " + path);
        out << j.dump(2) << "\n";
    }
    fs::rename(tmp, path);
}

// ---- CSV ----

void write_matrix_csv(const std::string& path, const Matrix& data,
                      const std::vector<std::string>& channel_names, double rate_hz) {
    require(channel_names.empty() ||
                static_cast<Eigen::Index>(channel_names.size()) == data.cols(),
            "write_csv: channel name count mismatch");
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write " + path);
    out << "time";
    for (Eigen::Index c = 0; c < data.cols(); ++c) {
        out << ",";
        out << (channel_names.empty() ? "ch" + std::to_string(c + 1) : channel_names[c]);
    }
    out << "\n";
    out.precision(17);
    for (Eigen::Index r = 0; r < data.rows(); ++r) {
        out << static_cast<double>(r) / rate_hz;
        for (Eigen::Index c = 0; c < data.cols(); ++c) out << "," << data(r, c);
        out << "\n";
    }
}

void write_signal_csv(const std::string& path, const SampledSignal& signal) {
    write_matrix_csv(path, signal.samples, signal.channel_names, signal.rate_hz);
}

namespace {

struct CsvContent {
    std::vector<std::string> names;  // without the time column
    std::vector<double> times;
    Matrix data;
};

CsvContent read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MissingArtifact("file not found: " + path);

    CsvContent out;
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("empty CSV: " + path);
    {
        std::stringstream ss(line);
        std::string field;
        bool first = true;
        while (std::getline(ss, field, ',')) {
            if (first)
                first = false;
            else
                out.names.push_back(field);
        }
    }
    if (out.names.empty()) throw ValidationError("CSV has no data columns: " + path);

    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        std::vector<double> row;
        while (std::getline(ss, field, ',')) {
            try {
                row.push_back(std::stod(field));
            } catch (const std::exception&) {
                throw ValidationError("bad numeric field in " + path + ": " + field);
            }
        }
        if (row.size() != out.names.size() + 1)
            throw ValidationError("inconsistent column count in " + path);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ValidationError("CSV has no rows: " + path);

    out.times.reserve(rows.size());
    out.data.resize(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(out.names.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        out.times.push_back(rows[r][0]);
        for (std::size_t c = 0; c < out.names.size(); ++c)
            out.data(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                rows[r][c + 1];
    }
    return out;
}

}  // namespace

SampledSignal read_signal_csv(const std::string& path) {
    CsvContent c = read_csv(path);
    SampledSignal s;
    s.samples = std::move(c.data);
    s.channel_names = std::move(c.names);
    if (c.times.size() >= 2) {
        const double dt = (c.times.back() - c.times.front()) /
                          static_cast<double>(c.times.size() - 1);
        require(dt > 0, "CSV timestamps not increasing: " + path);
        s.rate_hz = 1.0 / dt;
    } else {
        s.rate_hz = 1.0;
    }
    s.validate(path);
    return s;
}

Matrix read_matrix_csv(const std::string& path) { return read_csv(path).data; }

// ---- raw trials ----

void save_raw_trial(const std::string& root, const TrialRecording& trial) {
    trial.validate();
    const fs::path dir = fs::path(root) / TrialKey{trial.subject_id, trial.motion_id,
                                                   trial.repetition}
                                              .id();
    fs::create_directories(dir);
    write_signal_csv((dir / "emg.csv").string(), trial.emg);
    write_signal_csv((dir / "joints.csv").string(), trial.joints);
    write_signal_csv((dir / "eef.csv").string(), trial.eef);
    save_json_file((dir / "meta.json").string(),
                   json{{"subject_id", trial.subject_id},
                        {"motion_id", trial.motion_id},
                        {"repetition", trial.repetition},
                        {"rest_duration_s", trial.rest_duration_s},
                        {"emg_rate_hz", trial.emg.rate_hz},
                        {"motion_rate_hz", trial.joints.rate_hz}});
}

void save_raw_manifest(const RawDataset& ds) {
    json trials = json::array();
    for (const auto& k : ds.trials)
        trials.push_back({{"subject", k.subject},
                          {"motion", k.motion},
                          {"repetition", k.repetition},
                          {"dir", k.id()}});
    save_json_file((fs::path(ds.root) / "manifest.json").string(),
                   json{{"type", "raw"},
                        {"trials", trials},
                        {"designated_new_motion", ds.designated_new_motion},
                        {"designated_held_out_subject", ds.designated_held_out_subject}});
}

RawDataset load_raw_manifest(const std::string& root) {
    const json j = load_json_file((fs::path(root) / "manifest.json").string());
    require(j.value("type", "") == "raw", "not a raw dataset manifest: " + root);
    RawDataset ds;
    ds.root = root;
    for (const auto& tj : j.at("trials"))
        ds.trials.push_back({tj.at("subject").get<std::string>(),
                             tj.at("motion").get<std::string>(),
                             tj.at("repetition").get<int>()});
    ds.designated_new_motion = j.value("designated_new_motion", "");
    ds.designated_held_out_subject = j.value("designated_held_out_subject", "");
    return ds;
}

TrialRecording load_raw_trial(const std::string& root, const TrialKey& key) {
    const fs::path dir = fs::path(root) / key.id();
    const json meta = load_json_file((dir / "meta.json").string());
    TrialRecording t;
    t.subject_id = meta.at("subject_id").get<std::string>();
    t.motion_id = meta.at("motion_id").get<std::string>();
    t.repetition = meta.at("repetition").get<int>();
    t.rest_duration_s = meta.value("rest_duration_s", 1.0);
    t.emg = read_signal_csv((dir / "emg.csv").string());
    t.joints = read_signal_csv((dir / "joints.csv").string());
    t.eef = read_signal_csv((dir / "eef.csv").string());
    // Rates from metadata are authoritative; CSV timestamps can carry rounding.
    t.emg.rate_hz = meta.value("emg_rate_hz", t.emg.rate_hz);
    t.joints.rate_hz = meta.value("motion_rate_hz", t.joints.rate_hz);
    t.eef.rate_hz = t.joints.rate_hz;
    t.validate();
    return t;
}

// ---- processed dataset ----

json normalization_to_json(const NormalizationParams& p) {
    std::vector<double> mins(p.mins.data(), p.mins.data() + p.mins.size());
    std::vector<double> maxs(p.maxs.data(), p.maxs.data() + p.maxs.size());
    return json{{"mins", mins}, {"maxs", maxs}, {"lo", p.lo}, {"hi", p.hi}};
}

NormalizationParams normalization_from_json(const json& j) {
    NormalizationParams p;
    const auto mins = j.at("mins").get<std::vector<double>>();
    const auto maxs = j.at("maxs").get<std::vector<double>>();
    p.mins = Eigen::Map<const Vector>(mins.data(), static_cast<Eigen::Index>(mins.size()));
    p.maxs = Eigen::Map<const Vector>(maxs.data(), static_cast<Eigen::Index>(maxs.size()));
    p.lo = j.at("lo").get<double>();
    p.hi = j.at("hi").get<double>();
    return p;
}

const ProcessedTrial& ProcessedDataset::find(const TrialKey& key) const {
    for (const auto& t : trials)
        if (t.key == key) return t;
    throw MissingArtifact("trial not in processed dataset: " + key.id());
}

std::vector<std::string> ProcessedDataset::subjects() const {
    std::vector<std::string> out;
    for (const auto& t : trials)
        if (std::find(out.begin(), out.end(), t.key.subject) == out.end())
            out.push_back(t.key.subject);
    return out;
}

void save_processed_dataset(const std::string& root, const ProcessedDataset& ds) {
    fs::create_directories(root);
    json trials = json::array();
    for (const auto& t : ds.trials) {
        const std::string base = t.key.id();
        write_matrix_csv((fs::path(root) / (base + "_features.csv")).string(), t.features, {},
                         60.0);
        write_matrix_csv((fs::path(root) / (base + "_targets.csv")).string(), t.targets, {},
                         60.0);
        trials.push_back({{"subject", t.key.subject},
                          {"motion", t.key.motion},
                          {"repetition", t.key.repetition},
                          {"features", base + "_features.csv"},
                          {"targets", base + "_targets.csv"}});
    }
    json norm = json::object();
    for (const auto& [subject, p] : ds.feature_norm)
        norm[subject] = json{{"features", normalization_to_json(p)},
                             {"targets", normalization_to_json(ds.target_norm.at(subject))}};
    save_json_file((fs::path(root) / "manifest.json").string(),
                   json{{"type", "processed"},
                        {"input_config", ds.config.name()},
                        {"trials", trials},
                        {"normalization", norm},
                        {"designated_new_motion", ds.designated_new_motion},
                        {"designated_held_out_subject", ds.designated_held_out_subject}});
}

ProcessedDataset load_processed_dataset(const std::string& root) {
    const json j = load_json_file((fs::path(root) / "manifest.json").string());
    require(j.value("type", "") == "processed", "not a processed dataset manifest: " + root);
    ProcessedDataset ds;
    ds.config = InputConfig::parse(j.at("input_config").get<std::string>());
    ds.designated_new_motion = j.value("designated_new_motion", "");
    ds.designated_held_out_subject = j.value("designated_held_out_subject", "");
    for (const auto& tj : j.at("trials")) {
        ProcessedTrial t;
        t.key = {tj.at("subject").get<std::string>(), tj.at("motion").get<std::string>(),
                 tj.at("repetition").get<int>()};
        t.features =
            read_matrix_csv((fs::path(root) / tj.at("features").get<std::string>()).string());
        t.targets =
            read_matrix_csv((fs::path(root) / tj.at("targets").get<std::string>()).string());
        ds.trials.push_back(std::move(t));
    }
    for (const auto& [subject, nj] : j.at("normalization").items()) {
        ds.feature_norm[subject] = normalization_from_json(nj.at("features"));
        ds.target_norm[subject] = normalization_from_json(nj.at("targets"));
    }
    return ds;
}

}  // namespace myo
