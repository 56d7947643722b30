#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "mesospec/eigensolve.hpp"
#include "mesospec/ensembles.hpp"

namespace mesospec {

/// Row-major real matrix used for batches of per-realization statistics.
class RealMatrix {
 public:
  RealMatrix() = default;
  RealMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<const double> data() const noexcept { return data_; }

  friend bool operator==(const RealMatrix&, const RealMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Evaluation points lambda0 + tau_i N^{-alpha}, all sharing the resolution
/// eta = N^{-alpha}.
struct MesoGrid {
  double lambda0 = 0.0;
  double alpha = 0.5;
  std::vector<double> offsets{0.0};
  std::size_t N = 1;

  double eta() const noexcept;
  std::vector<double> points() const;
};

/// Throws ValidationError unless 0 < alpha < 1, N >= 1, offsets non-empty and
/// everything finite.
void validate(const MesoGrid& grid);

inline double resolution(std::size_t n, double alpha) {
  return std::pow(static_cast<double>(n), -alpha);
}

/// (1/N) sum_j eta / ((lambda - lambda_j)^2 + eta^2), the Cauchy-smoothed
/// empirical density; equals Im Tr (A - lambda - i eta)^{-1} / N.
double smoothed_density_at_resolution(std::span<const double> eigenvalues, double lambda,
                                      double eta);

/// As above with eta = N^{-alpha}.
double smoothed_density(const SpectrumSample& sample, double lambda, double alpha);

/// #{lambda_j <= lambda} / N.
double empirical_cdf(const SpectrumSample& sample, double lambda);

/// 0 selects std::thread::hardware_concurrency().
unsigned resolve_workers(unsigned requested) noexcept;

/// Reduces one realization's spectrum to a fixed-width row of statistics.
using SpectrumReducer = std::function<void(const SpectrumSample&, std::span<double>)>;

/// Generates M realizations of `ensemble` (realization r uses stream
/// ensemble.seed.stream_id + r), diagonalizes each, and stores
/// reduce(spectrum) in row r. Matrices are dropped as soon as they are
/// reduced. The output is independent of `workers`. A NumericalError is
/// rethrown tagged with the lowest failing stream id.
RealMatrix map_realizations(const EnsembleSpec& ensemble, std::size_t M, std::size_t width,
                            const SpectrumReducer& reduce, unsigned workers = 0);

struct FluctuationBatch {
  RealMatrix values;  // M x k, smoothed density per realization and grid point
  MesoGrid grid;
  EnsembleSpec ensemble;
  std::size_t M = 0;
};

FluctuationBatch run_batch(const EnsembleSpec& ensemble, const MesoGrid& grid, std::size_t M,
                           unsigned workers = 0);

/// gamma = N^{1-alpha} (R - column mean). Centering subtracts the mean of
/// differences from the first row, so a constant column maps to exact zeros.
RealMatrix fluctuations(const FluctuationBatch& batch);

struct CovarianceReport {
  RealMatrix estimate;         // unbiased sample covariance, divisor M - 1
  RealMatrix standard_errors;  // sqrt((C_ii C_jj + C_ij^2) / (M - 1))
  RealMatrix predicted;        // covariance_kernel(tau_i, tau_j)
  std::vector<double> skewness;
  std::vector<double> excess_kurtosis;
  std::vector<double> offsets;
  std::size_t M = 0;

  double skewness_stderr() const;  // sqrt(6/M)
  double kurtosis_stderr() const;  // sqrt(24/M)
};

inline constexpr std::size_t kDefaultMinRealizations = 30;

/// Throws ValidationError if gamma has fewer than `min_realizations` rows or
/// its width differs from the grid's offset count.
CovarianceReport covariance_report(const RealMatrix& gamma, const MesoGrid& grid,
                                   std::size_t min_realizations = kDefaultMinRealizations);

struct DensityPoint {
  double lambda = 0.0;
  double mean = 0.0;
  double stderr_of_mean = 0.0;
};

/// Mean and standard error of R at each absolute point, over M realizations.
std::vector<DensityPoint> density_profile(const EnsembleSpec& ensemble,
                                          std::span<const double> points, double alpha,
                                          std::size_t M, unsigned workers = 0);

struct ScalingStudy {
  double alpha = 0.0;
  double lambda = 0.0;
  std::vector<std::size_t> N;
  std::vector<double> variance;  // Var[R_N(lambda)] over M realizations
  double slope = 0.0;            // least squares, log Var vs log N
  double slope_stderr = 0.0;     // from Var(log s^2) ~ 2/(M-1)
  double reference_slope = 0.0;  // 2 alpha - 2
};

inline double reference_slope(double alpha) noexcept { return 2.0 * alpha - 2.0; }

/// Fits the decay of Var[R] with N. `family` supplies everything except N.
ScalingStudy variance_scaling_study(const EnsembleSpec& family, double alpha, double lambda,
                                    std::span<const std::size_t> n_list, std::size_t M,
                                    unsigned workers = 0);

/// Several alphas from the same realizations; one study per alpha.
std::vector<ScalingStudy> variance_scaling_study(const EnsembleSpec& family,
                                                 std::span<const double> alphas, double lambda,
                                                 std::span<const std::size_t> n_list,
                                                 std::size_t M, unsigned workers = 0);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

LineFit least_squares_line(std::span<const double> x, std::span<const double> y);

}  // namespace mesospec
