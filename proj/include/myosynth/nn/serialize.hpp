#pragma once

#include "myosynth/nn/network.hpp"

#include <string>

namespace myo::nn {

/// Versioned weight container: JSON header (layer spec chain, seed, free-form
/// metadata) plus a base64 payload of the tensors in declared order, row-major
/// little-endian doubles.
struct WeightFile {
    NetworkSpec spec;
    ParamStore store;
    std::uint64_t seed = 0;
    json metadata;  // normalization reference, arch id, provenance
};

void save_weights(const std::string& path, const WeightFile& wf);
WeightFile load_weights(const std::string& path);

std::string base64_encode(const unsigned char* data, std::size_t len);
std::vector<unsigned char> base64_decode(const std::string& text);

}  // namespace myo::nn
