// SPDX-License-Identifier: Apache-2.0
//
// ncofdm: N-continuous OFDM link-level simulation library
// ------------------------------------------------------------------------

#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ncofdm {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using Samples = std::vector<cplx>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr cplx kJ{0.0, 1.0};

// Error taxonomy. Everything derives from std::runtime_error so callers that
// don't care can catch one type.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConfigError : Error {
    using Error::Error;
};
struct DimensionError : Error {
    using Error::Error;
};
struct SizeError : Error {
    using Error::Error;
};
struct RankError : Error {
    using Error::Error;
};
struct ParameterError : Error {
    using Error::Error;
};
struct EstimationError : Error {
    using Error::Error;
};

/// Raised when a small dense system is too ill-conditioned to solve reliably.
struct ConditioningError : Error {
    ConditioningError(const std::string& what, double cond)
        : Error(what + " (condition estimate " + std::to_string(cond) + ")"), condition(cond) {}
    double condition;
};

} // namespace ncofdm
