#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace myo {

using Matrix = Eigen::MatrixXd;  // rows = time steps (or samples), cols = channels
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

// Exit-code mapping: ValidationError -> 1, MissingArtifact -> 2, InternalError -> 3.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};
struct MissingArtifact : std::runtime_error {
    explicit MissingArtifact(const std::string& msg) : std::runtime_error(msg) {}
};
struct InternalError : std::runtime_error {
    explicit InternalError(const std::string& msg) : std::runtime_error(msg) {}
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw ValidationError(msg);
}

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

inline void check_finite(const Matrix& m, const std::string& where) {
    if (!m.allFinite()) throw InternalError("non-finite values in " + where);
}

}  // namespace myo
