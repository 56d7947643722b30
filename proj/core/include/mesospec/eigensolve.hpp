#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "mesospec/ensembles.hpp"

namespace mesospec {

/// Symmetric tridiagonal matrix: `diagonal` has N entries, `offdiagonal` N-1.
struct Tridiagonal {
  std::vector<double> diagonal;
  std::vector<double> offdiagonal;
};

/// Sorted eigenvalues of one realization plus where they came from.
struct SpectrumSample {
  std::vector<double> eigenvalues;  // ascending
  std::optional<EnsembleSpec> source_spec;
  int solver_iterations = 0;

  std::size_t size() const noexcept { return eigenvalues.size(); }
};

/// Householder reduction to tridiagonal form (lower-triangle variant).
/// The result is orthogonally similar to `a`.
Tridiagonal tridiagonalize(const DenseSymmetricMatrix& a);

inline constexpr int kDefaultMaxSweeps = 30;

struct TridiagonalEigenvalues {
  std::vector<double> values;  // ascending
  int iterations = 0;
};

/// Implicit-shift QL with Wilkinson shifts. An off-diagonal e_i is treated as
/// zero once |e_i| <= eps (|d_i| + |d_{i+1}|). Throws NumericalError when the
/// eigenvalues need more than `max_sweeps` sweeps each, pooled over the matrix.
TridiagonalEigenvalues eigenvalues_tridiagonal(std::span<const double> diagonal,
                                               std::span<const double> offdiagonal,
                                               int max_sweeps = kDefaultMaxSweeps);

/// Full spectrum of `a`. Verifies the trace and Frobenius identities against
/// the relative budget below and throws NumericalError on a breach.
SpectrumSample spectrum(const DenseSymmetricMatrix& a,
                        std::optional<EnsembleSpec> source = std::nullopt,
                        int max_sweeps = kDefaultMaxSweeps);

/// Budget for |sum(lambda) - Tr A| and |sum(lambda^2) - ||A||_F^2|, relative
/// to N max|A| (squared scale for the Frobenius identity).
inline constexpr double kSpectrumIdentityTolerance = 1e-10;

struct IdentityResiduals {
  double trace = 0.0;      // |sum lambda - Tr A| / (N max|A|)
  double frobenius = 0.0;  // |sum lambda^2 - ||A||_F^2| / (N max|A|^2)
};

IdentityResiduals identity_residuals(const DenseSymmetricMatrix& a,
                                     std::span<const double> eigenvalues);

inline constexpr std::size_t kDefaultOracleCap = 128;

/// Tr[(A - z)^{-1}] / N by complex Gaussian elimination with partial
/// pivoting, independent of the eigensolver. Requires Im z > 0 and
/// N <= `cap`; the O(N^3) cost per z makes this a validation tool only.
std::complex<double> resolvent_trace_oracle(const DenseSymmetricMatrix& a,
                                            std::complex<double> z,
                                            std::size_t cap = kDefaultOracleCap);

/// (1/N) sum_j 1/(lambda_j - z) from a computed spectrum.
std::complex<double> resolvent_trace_from_spectrum(std::span<const double> eigenvalues,
                                                   std::complex<double> z);

}  // namespace mesospec
