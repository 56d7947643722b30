#include "mesospec/meso.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <limits>
#include <numeric>
#include <string>
#include <thread>

#include "mesospec/errors.hpp"
#include "mesospec/laws.hpp"

namespace mesospec {

double MesoGrid::eta() const noexcept { return resolution(N, alpha); }

std::vector<double> MesoGrid::points() const {
  const double h = eta();
  std::vector<double> out;
  out.reserve(offsets.size());
  for (double tau : offsets) out.push_back(lambda0 + tau * h);
  return out;
}

void validate(const MesoGrid& grid) {
  if (!(grid.alpha > 0.0 && grid.alpha < 1.0)) {
    throw ValidationError("must lie in the open interval (0, 1)", "alpha");
  }
  if (grid.N == 0) throw ValidationError("matrix dimension must be positive", "N");
  if (!std::isfinite(grid.lambda0)) throw ValidationError("must be finite", "lambda");
  if (grid.offsets.empty()) throw ValidationError("at least one offset required", "offsets");
  for (double tau : grid.offsets) {
    if (!std::isfinite(tau)) throw ValidationError("offsets must be finite", "offsets");
  }
}

double smoothed_density_at_resolution(std::span<const double> eigenvalues, double lambda,
                                      double eta) {
  double sum = 0.0;
  for (double x : eigenvalues) {
    const double d = lambda - x;
    sum += eta / (d * d + eta * eta);
  }
  return sum / static_cast<double>(eigenvalues.size());
}

double smoothed_density(const SpectrumSample& sample, double lambda, double alpha) {
  if (sample.eigenvalues.empty()) throw ValidationError("empty spectrum", "sample");
  if (!(alpha > 0.0)) throw ValidationError("must be positive", "alpha");
  return smoothed_density_at_resolution(sample.eigenvalues, lambda,
                                        resolution(sample.size(), alpha));
}

double empirical_cdf(const SpectrumSample& sample, double lambda) {
  if (sample.eigenvalues.empty()) throw ValidationError("empty spectrum", "sample");
  const auto it = std::upper_bound(sample.eigenvalues.begin(), sample.eigenvalues.end(), lambda);
  return static_cast<double>(it - sample.eigenvalues.begin()) /
         static_cast<double>(sample.size());
}

unsigned resolve_workers(unsigned requested) noexcept {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

RealMatrix map_realizations(const EnsembleSpec& ensemble, std::size_t M, std::size_t width,
                            const SpectrumReducer& reduce, unsigned workers) {
  validate(ensemble);
  if (M == 0) throw ValidationError("at least one realization required", "M");

  RealMatrix out(M, width);
  std::vector<std::exception_ptr> errors(M);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};

  auto work = [&] {
    for (;;) {
      if (failed.load(std::memory_order_relaxed)) return;
      const std::size_t r = next.fetch_add(1);
      if (r >= M) return;
      try {
        EnsembleSpec spec = ensemble;
        spec.seed.stream_id = ensemble.seed.stream_id + r;
        const auto a = generate(spec);
        const auto s = spectrum(a, spec);
        reduce(s, out.row(r));
      } catch (...) {
        errors[r] = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
      }
    }
  };

  const unsigned n_workers =
      static_cast<unsigned>(std::min<std::size_t>(resolve_workers(workers), M));
  if (n_workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_workers);
    for (unsigned t = 0; t < n_workers; ++t) pool.emplace_back(work);
  }

  // Realizations are claimed in index order, so every index below a failing
  // one has finished: the lowest failure is the same for any worker count.
  for (std::size_t r = 0; r < M; ++r) {
    if (!errors[r]) continue;
    try {
      std::rethrow_exception(errors[r]);
    } catch (const NumericalError& e) {
      throw NumericalError(e.what(), ensemble.seed.stream_id + r);
    }
  }
  return out;
}

FluctuationBatch run_batch(const EnsembleSpec& ensemble, const MesoGrid& grid, std::size_t M,
                           unsigned workers) {
  validate(grid);
  if (grid.N != ensemble.N) {
    throw ValidationError("grid N (" + std::to_string(grid.N) + ") differs from ensemble N (" +
                              std::to_string(ensemble.N) + ")",
                          "N");
  }
  const auto points = grid.points();
  const double eta = grid.eta();
  auto values = map_realizations(
      ensemble, M, points.size(),
      [&](const SpectrumSample& s, std::span<double> row) {
        for (std::size_t i = 0; i < points.size(); ++i) {
          row[i] = smoothed_density_at_resolution(s.eigenvalues, points[i], eta);
        }
      },
      workers);
  return {std::move(values), grid, ensemble, M};
}

RealMatrix fluctuations(const FluctuationBatch& batch) {
  const auto& v = batch.values;
  const std::size_t M = v.rows();
  if (M < 2) throw ValidationError("at least two realizations required", "M");
  const double scale = std::pow(static_cast<double>(batch.grid.N), 1.0 - batch.grid.alpha);

  RealMatrix gamma(M, v.cols());
  for (std::size_t j = 0; j < v.cols(); ++j) {
    const double anchor = v(0, j);
    double shift = 0.0;
    for (std::size_t r = 0; r < M; ++r) shift += v(r, j) - anchor;
    shift /= static_cast<double>(M);
    for (std::size_t r = 0; r < M; ++r) gamma(r, j) = ((v(r, j) - anchor) - shift) * scale;
    // Second pass removes the rounding residue of the first.
    double residue = 0.0;
    for (std::size_t r = 0; r < M; ++r) residue += gamma(r, j);
    residue /= static_cast<double>(M);
    if (residue != 0.0) {
      for (std::size_t r = 0; r < M; ++r) gamma(r, j) -= residue;
    }
  }
  return gamma;
}

double CovarianceReport::skewness_stderr() const {
  return std::sqrt(6.0 / static_cast<double>(M));
}

double CovarianceReport::kurtosis_stderr() const {
  return std::sqrt(24.0 / static_cast<double>(M));
}

CovarianceReport covariance_report(const RealMatrix& gamma, const MesoGrid& grid,
                                   std::size_t min_realizations) {
  const std::size_t M = gamma.rows();
  const std::size_t k = gamma.cols();
  if (M < std::max<std::size_t>(min_realizations, 2)) {
    throw ValidationError("need at least " + std::to_string(min_realizations) +
                              " realizations, got " + std::to_string(M),
                          "M");
  }
  if (k != grid.offsets.size()) {
    throw ValidationError("gamma has " + std::to_string(k) + " columns but grid has " +
                              std::to_string(grid.offsets.size()) + " offsets",
                          "offsets");
  }

  std::vector<double> mean(k, 0.0);
  for (std::size_t r = 0; r < M; ++r) {
    for (std::size_t j = 0; j < k; ++j) mean[j] += gamma(r, j);
  }
  for (double& m : mean) m /= static_cast<double>(M);

  CovarianceReport rep;
  rep.M = M;
  rep.offsets = grid.offsets;
  rep.estimate = RealMatrix(k, k);
  rep.standard_errors = RealMatrix(k, k);
  rep.predicted = RealMatrix(k, k);

  std::vector<double> m2(k, 0.0), m3(k, 0.0), m4(k, 0.0), centered(k);
  for (std::size_t r = 0; r < M; ++r) {
    for (std::size_t j = 0; j < k; ++j) centered[j] = gamma(r, j) - mean[j];
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j <= i; ++j) rep.estimate(i, j) += centered[i] * centered[j];
      const double c2 = centered[i] * centered[i];
      m2[i] += c2;
      m3[i] += c2 * centered[i];
      m4[i] += c2 * c2;
    }
  }
  const double dof = static_cast<double>(M - 1);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double c = rep.estimate(i, j) / dof;
      rep.estimate(i, j) = c;
      rep.estimate(j, i) = c;
    }
  }
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const double cij = rep.estimate(i, j);
      rep.standard_errors(i, j) =
          std::sqrt((rep.estimate(i, i) * rep.estimate(j, j) + cij * cij) / dof);
      rep.predicted(i, j) = covariance_kernel(grid.offsets[i], grid.offsets[j]);
    }
  }

  const double n = static_cast<double>(M);
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < k; ++i) {
    const double var = m2[i] / n;
    if (var > 0.0) {
      rep.skewness.push_back((m3[i] / n) / std::pow(var, 1.5));
      rep.excess_kurtosis.push_back((m4[i] / n) / (var * var) - 3.0);
    } else {
      rep.skewness.push_back(nan);
      rep.excess_kurtosis.push_back(nan);
    }
  }
  return rep;
}

std::vector<DensityPoint> density_profile(const EnsembleSpec& ensemble,
                                          std::span<const double> points, double alpha,
                                          std::size_t M, unsigned workers) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ValidationError("must lie in the open interval (0, 1)", "alpha");
  }
  if (points.empty()) throw ValidationError("at least one grid point required", "points");
  const double eta = resolution(ensemble.N, alpha);
  const auto values = map_realizations(
      ensemble, M, points.size(),
      [&](const SpectrumSample& s, std::span<double> row) {
        for (std::size_t i = 0; i < points.size(); ++i) {
          row[i] = smoothed_density_at_resolution(s.eigenvalues, points[i], eta);
        }
      },
      workers);

  std::vector<DensityPoint> out;
  out.reserve(points.size());
  const double n = static_cast<double>(M);
  for (std::size_t j = 0; j < points.size(); ++j) {
    double mean = 0.0;
    for (std::size_t r = 0; r < M; ++r) mean += values(r, j);
    mean /= n;
    double ss = 0.0;
    for (std::size_t r = 0; r < M; ++r) ss += (values(r, j) - mean) * (values(r, j) - mean);
    const double se = M > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
    out.push_back({points[j], mean, se});
  }
  return out;
}

LineFit least_squares_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw ValidationError("need at least two paired points", "points");
  }
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw ValidationError("abscissae must not all coincide", "points");
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

std::vector<ScalingStudy> variance_scaling_study(const EnsembleSpec& family,
                                                 std::span<const double> alphas, double lambda,
                                                 std::span<const std::size_t> n_list,
                                                 std::size_t M, unsigned workers) {
  std::vector<std::size_t> sizes(n_list.begin(), n_list.end());
  std::sort(sizes.begin(), sizes.end());
  if (std::unique(sizes.begin(), sizes.end()) - sizes.begin() < 3) {
    throw ValidationError("need at least three distinct matrix sizes", "N_list");
  }
  if (alphas.empty()) throw ValidationError("at least one alpha required", "alpha");
  for (double a : alphas) {
    if (!(a > 0.0 && a < 1.0)) {
      throw ValidationError("must lie in the open interval (0, 1)", "alpha");
    }
  }
  if (M < 2) throw ValidationError("at least two realizations required", "M");

  std::vector<ScalingStudy> studies(alphas.size());
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    studies[a].alpha = alphas[a];
    studies[a].lambda = lambda;
    studies[a].reference_slope = reference_slope(alphas[a]);
  }

  for (std::size_t n : n_list) {
    EnsembleSpec spec = family;
    spec.N = n;
    std::vector<double> etas;
    for (double a : alphas) etas.push_back(resolution(n, a));
    const auto values = map_realizations(
        spec, M, alphas.size(),
        [&](const SpectrumSample& s, std::span<double> row) {
          for (std::size_t a = 0; a < etas.size(); ++a) {
            row[a] = smoothed_density_at_resolution(s.eigenvalues, lambda, etas[a]);
          }
        },
        workers);
    for (std::size_t a = 0; a < alphas.size(); ++a) {
      double mean = 0.0;
      for (std::size_t r = 0; r < M; ++r) mean += values(r, a);
      mean /= static_cast<double>(M);
      double ss = 0.0;
      for (std::size_t r = 0; r < M; ++r) ss += (values(r, a) - mean) * (values(r, a) - mean);
      studies[a].N.push_back(n);
      studies[a].variance.push_back(ss / static_cast<double>(M - 1));
    }
  }

  for (auto& study : studies) {
    std::vector<double> x, y;
    for (std::size_t i = 0; i < study.N.size(); ++i) {
      x.push_back(std::log(static_cast<double>(study.N[i])));
      y.push_back(std::log(study.variance[i]));
    }
    study.slope = least_squares_line(x, y).slope;
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    double sxx = 0.0;
    for (double xi : x) sxx += (xi - mx) * (xi - mx);
    study.slope_stderr = std::sqrt(2.0 / static_cast<double>(M - 1) / sxx);
  }
  return studies;
}

ScalingStudy variance_scaling_study(const EnsembleSpec& family, double alpha, double lambda,
                                    std::span<const std::size_t> n_list, std::size_t M,
                                    unsigned workers) {
  const double alphas[] = {alpha};
  return variance_scaling_study(family, std::span<const double>(alphas), lambda, n_list, M,
                                workers)
      .front();
}

}  // namespace mesospec
