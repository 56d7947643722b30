#pragma once

#include "cli/config.hpp"
#include "cli/output.hpp"

namespace mesospec::cli {

/// Tolerance bands reported in the summaries and enforced by `check = true`.
inline constexpr double kDensityRelativeTolerance = 0.05;
inline constexpr double kCovarianceAbsoluteFloor = 0.03;
inline constexpr double kCovarianceSigmas = 3.0;
inline constexpr double kMomentSigmas = 3.0;
inline constexpr double kSlopeTolerance = 0.3;
inline constexpr double kOracleBudget = 1e-9;  // scaled by 1/eta

/// Columns: lambda, R_mean, R_stderr, analytic_pi_rho, abs_error, rel_error.
CommandResult cmd_density(const RunConfig& config);

/// Tables `covariance` (flattened k x k report) and `gaussianity`.
CommandResult cmd_fluct(const RunConfig& config);

/// Columns: N, variance, fitted_slope, slope_stderr, reference_slope.
CommandResult cmd_scaling(const RunConfig& config);

/// Smoothed density against Im Tr G / N by direct elimination on random
/// matrices and random bulk points; a breach sets failure_exit_code = 2.
CommandResult cmd_oracle_check(const RunConfig& config);

/// Analytic density, covariance kernel and asymptote tables.
CommandResult cmd_laws(const RunConfig& config);

CommandResult run_command(const RunConfig& config);

}  // namespace mesospec::cli
