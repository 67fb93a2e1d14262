#include "myosynth/nn/serialize.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>

namespace myo::nn {

namespace {
constexpr char kAlphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
constexpr int kFormatVersion = 1;
}  // namespace

std::string base64_encode(const unsigned char* data, std::size_t len) {
    std::string out;
    out.reserve((len + 2) / 3 * 4);
    for (std::size_t i = 0; i < len; i += 3) {
        unsigned int v = data[i] << 16;
        if (i + 1 < len) v |= data[i + 1] << 8;
        if (i + 2 < len) v |= data[i + 2];
        out.push_back(kAlphabet[(v >> 18) & 63]);
        out.push_back(kAlphabet[(v >> 12) & 63]);
        out.push_back(i + 1 < len ? kAlphabet[(v >> 6) & 63] : '=');
        out.push_back(i + 2 < len ? kAlphabet[v & 63] : '=');
    }
    return out;
}

std::vector<unsigned char> base64_decode(const std::string& text) {
    static int rev[256];
    static bool init = [] {
        std::fill(std::begin(rev), std::end(rev), -1);
        for (int i = 0; i < 64; ++i) rev[static_cast<unsigned char>(kAlphabet[i])] = i;
        return true;
    }();
    (void)init;

    std::vector<unsigned char> out;
    out.reserve(text.size() / 4 * 3);
    unsigned int v = 0;
    int bits = 0;
    for (char ch : text) {
        if (ch == '=' || ch == '\n' || ch == '\r') continue;
        const int d = rev[static_cast<unsigned char>(ch)];
        if (d < 0) throw ValidationError("base64: invalid character");
        v = (v << 6) | static_cast<unsigned int>(d);
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            out.push_back(static_cast<unsigned char>((v >> bits) & 0xff));
        }
    }
    return out;
}

void save_weights(const std::string& path, const WeightFile& wf) {
    std::vector<unsigned char> payload;
    payload.reserve(wf.store.total_size() * sizeof(double));
    json shapes = json::array();
    for (const auto& p : wf.store.params) {
        shapes.push_back({{"name", p->name},
                          {"rows", p->value.rows()},
                          {"cols", p->value.cols()}});
        for (Eigen::Index r = 0; r < p->value.rows(); ++r) {
            for (Eigen::Index c = 0; c < p->value.cols(); ++c) {
                const double d = p->value(r, c);
                unsigned char buf[sizeof(double)];
                std::memcpy(buf, &d, sizeof(double));
                payload.insert(payload.end(), buf, buf + sizeof(double));
            }
        }
    }

    json j;
    j["format"] = "myosynth-weights";
    j["version"] = kFormatVersion;
    j["seed"] = wf.seed;
    j["spec"] = wf.spec.to_json();
    j["tensors"] = shapes;
    j["metadata"] = wf.metadata.is_null() ? json::object() : wf.metadata;
    j["payload_base64"] = base64_encode(payload.data(), payload.size());

    const std::filesystem::path target(path);
    const std::filesystem::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw ValidationError("cannot write weights file: " + path);
        out << j.dump(2) << "\n";
    }
    std::filesystem::rename(tmp, target);
}

WeightFile load_weights(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MissingArtifact("weights file not found: " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ValidationError("weights file parse error: " + std::string(e.what()));
    }
    if (j.value("format", "") != "myosynth-weights")
        throw ValidationError("not a myosynth weights file: " + path);
    if (j.value("version", 0) != kFormatVersion)
        throw ValidationError("unsupported weights file version");

    WeightFile wf;
    wf.spec = NetworkSpec::from_json(j.at("spec"));
    wf.seed = j.value("seed", std::uint64_t{0});
    wf.metadata = j.value("metadata", json::object());

    const std::vector<unsigned char> payload =
        base64_decode(j.at("payload_base64").get<std::string>());
    std::size_t offset = 0;
    for (const auto& tj : j.at("tensors")) {
        const auto rows = tj.at("rows").get<Eigen::Index>();
        const auto cols = tj.at("cols").get<Eigen::Index>();
        auto p = std::make_shared<Param>(tj.at("name").get<std::string>(),
                                         static_cast<int>(rows), static_cast<int>(cols));
        for (Eigen::Index r = 0; r < rows; ++r) {
            for (Eigen::Index c = 0; c < cols; ++c) {
                if (offset + sizeof(double) > payload.size())
                    throw ValidationError("weights payload truncated");
                double d;
                std::memcpy(&d, payload.data() + offset, sizeof(double));
                offset += sizeof(double);
                p->value(r, c) = d;
            }
        }
        wf.store.params.push_back(p);
    }
    if (offset != payload.size()) throw ValidationError("weights payload has trailing bytes");
    return wf;
}

}  // namespace myo::nn
