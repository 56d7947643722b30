#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mesospec/rng.hpp"

namespace mesospec {

enum class EnsembleKind { wigner, sample_covariance };

/// Full description of one random-matrix ensemble realization.
///
/// wigner            : W(x,y) = w(x,y)/sqrt(N), w i.i.d. from `entry` for x <= y
///                     (diagonal drawn from the same law).
/// sample_covariance : H(x,y) = (1/N) sum_{mu<m} xi_mu(x) xi_mu(y), xi Gaussian
///                     with standard deviation entry.scale and m = round(c N).
struct EnsembleSpec {
  EnsembleKind kind = EnsembleKind::wigner;
  std::size_t N = 1;
  EntryDistribution entry{};
  double c = 1.0;  // sample_covariance only
  SeedSpec seed{};

  /// Number of Gaussian vectors, round(c N). Meaningful for sample_covariance.
  std::size_t m() const noexcept;
  /// Realized ratio m/N.
  double realized_ratio() const noexcept;

  friend bool operator==(const EnsembleSpec&, const EnsembleSpec&) = default;
};

/// Real symmetric N x N matrix stored as a full row-major array. Only the
/// generators and tests construct these; both triangles are always written.
class DenseSymmetricMatrix {
 public:
  DenseSymmetricMatrix() = default;
  explicit DenseSymmetricMatrix(std::size_t n) : n_(n), entries_(n * n, 0.0) {}

  /// Builds from a full row-major array; throws ValidationError unless the
  /// array is square and bitwise symmetric.
  static DenseSymmetricMatrix from_row_major(std::size_t n, std::vector<double> entries);
  static DenseSymmetricMatrix identity(std::size_t n);

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t row, std::size_t col) const noexcept {
    return entries_[row * n_ + col];
  }
  /// Writes (row, col) and its mirror.
  void set(std::size_t row, std::size_t col, double value) noexcept {
    entries_[row * n_ + col] = value;
    entries_[col * n_ + row] = value;
  }

  std::span<const double> row(std::size_t r) const noexcept {
    return {entries_.data() + r * n_, n_};
  }
  std::span<const double> entries() const noexcept { return entries_; }
  std::span<double> mutable_entries() noexcept { return entries_; }

  double trace() const noexcept;
  double frobenius_norm_squared() const noexcept;
  double max_abs() const noexcept;
  bool is_symmetric() const noexcept;

 private:
  std::size_t n_ = 0;
  std::vector<double> entries_;
};

/// How the sample-covariance Gram sum is formed. Both strategies consume
/// xi_mu(x) in order mu = 0..m-1, x = 0..N-1 and add the products for every
/// entry in the same order (fma chains over fixed chunks of mu), so they
/// agree bit for bit.
enum class GramStrategy {
  factor,    // draw all m vectors (m N doubles), then a blocked Gram product
  rank_one,  // one vector at a time; memory independent of m
};

/// Throws ValidationError for N = 0, non-Gaussian sample_covariance, c <= 0,
/// or c N rounding to zero vectors.
void validate(const EnsembleSpec& spec);

DenseSymmetricMatrix generate(const EnsembleSpec& spec,
                              GramStrategy strategy = GramStrategy::factor);

/// E[Tr A / N]: 0 for wigner, c u^2 for sample_covariance.
double expected_trace(const EnsembleSpec& spec);

const char* to_string(EnsembleKind kind) noexcept;
EnsembleKind parse_ensemble_kind(const std::string& text);

}  // namespace mesospec
