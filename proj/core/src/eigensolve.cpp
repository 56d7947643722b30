#include "mesospec/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mesospec/errors.hpp"

namespace mesospec {

Tridiagonal tridiagonalize(const DenseSymmetricMatrix& a) {
  const std::size_t n = a.size();
  Tridiagonal t;
  t.diagonal.resize(n);
  t.offdiagonal.resize(n > 0 ? n - 1 : 0);
  if (n == 0) return t;

  // Working copy; only the lower triangle (row i, columns 0..i) is referenced.
  std::vector<double> w(a.entries().begin(), a.entries().end());
  std::vector<double> v(n), p(n);
  auto at = [&](std::size_t i, std::size_t j) -> double& { return w[i * n + j]; };

  for (std::size_t k = 0; k + 1 < n; ++k) {
    t.diagonal[k] = at(k, k);
    const std::size_t first = k + 1;

    // Reflector H = I - tau v v^T with v[first] = 1 mapping column k below
    // the diagonal onto beta e_first.
    const double alpha = at(first, k);
    double tail = 0.0;
    for (std::size_t i = first + 1; i < n; ++i) tail += at(i, k) * at(i, k);
    if (tail == 0.0) {
      t.offdiagonal[k] = alpha;
      continue;
    }
    const double beta = -std::copysign(std::sqrt(alpha * alpha + tail), alpha);
    const double tau = (beta - alpha) / beta;
    const double inv = 1.0 / (alpha - beta);
    v[first] = 1.0;
    for (std::size_t i = first + 1; i < n; ++i) v[i] = at(i, k) * inv;
    t.offdiagonal[k] = beta;

    // p = tau * A22 v using the lower triangle only.
    std::fill(p.begin() + first, p.end(), 0.0);
    for (std::size_t i = first; i < n; ++i) {
      const double* row = &at(i, 0);
      const double vi = v[i];
      double acc = 0.0;
      for (std::size_t j = first; j < i; ++j) {
        acc += row[j] * v[j];
        p[j] += row[j] * vi;
      }
      p[i] += acc + row[i] * vi;
    }
    double pv = 0.0;
    for (std::size_t i = first; i < n; ++i) {
      p[i] *= tau;
      pv += p[i] * v[i];
    }
    // w = p - (tau/2)(p.v) v, stored back into p.
    const double shift = 0.5 * tau * pv;
    for (std::size_t i = first; i < n; ++i) p[i] -= shift * v[i];

    // A22 -= v w^T + w v^T (lower triangle).
    for (std::size_t i = first; i < n; ++i) {
      double* row = &at(i, 0);
      const double vi = v[i];
      const double wi = p[i];
      for (std::size_t j = first; j <= i; ++j) row[j] -= vi * p[j] + wi * v[j];
    }
  }
  t.diagonal[n - 1] = at(n - 1, n - 1);
  return t;
}

TridiagonalEigenvalues eigenvalues_tridiagonal(std::span<const double> diagonal,
                                               std::span<const double> offdiagonal,
                                               int max_sweeps) {
  const std::size_t n = diagonal.size();
  if (n == 0) throw ValidationError("empty diagonal", "diagonal");
  if (offdiagonal.size() + 1 != n) {
    throw ValidationError("expected " + std::to_string(n - 1) + " entries", "offdiagonal");
  }
  if (max_sweeps < 1) throw ValidationError("must be at least 1", "max_sweeps");

  std::vector<double> d(diagonal.begin(), diagonal.end());
  std::vector<double> e(n, 0.0);
  std::copy(offdiagonal.begin(), offdiagonal.end(), e.begin());
  constexpr double eps = std::numeric_limits<double>::epsilon();

  // The sweep budget is pooled across eigenvalues: a cluster at roundoff
  // level under a much larger block can need well over max_sweeps for its
  // first member and then deflate the rest almost for free.
  const long budget = static_cast<long>(max_sweeps) * static_cast<long>(n);
  int total_iterations = 0;
  for (std::size_t l = 0; l < n; ++l) {
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        if (std::abs(e[m]) <= eps * (std::abs(d[m]) + std::abs(d[m + 1]))) break;
      }
      if (m == l) break;
      if (total_iterations == budget) {
        throw NumericalError("tridiagonal QL failed to deflate eigenvalue " + std::to_string(l) +
                             " within " + std::to_string(max_sweeps) + " sweeps per eigenvalue");
      }
      ++total_iterations;

      // Wilkinson shift from the leading 2x2 block of the unreduced segment.
      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = std::hypot(g, 1.0);
      g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
      double s = 1.0, c = 1.0, p = 0.0;
      bool underflow = false;
      for (std::size_t i = m; i-- > l;) {
        const double f = s * e[i];
        const double b = c * e[i];
        r = std::hypot(f, g);
        e[i + 1] = r;
        if (r == 0.0) {
          d[i + 1] -= p;
          e[m] = 0.0;
          underflow = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + 2.0 * c * b;
        p = s * r;
        d[i + 1] = g + p;
        g = c * r - b;
      }
      if (underflow) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    } while (m != l);
  }
  std::sort(d.begin(), d.end());
  return {std::move(d), total_iterations};
}

IdentityResiduals identity_residuals(const DenseSymmetricMatrix& a,
                                     std::span<const double> eigenvalues) {
  const auto n = static_cast<double>(a.size());
  const double scale = a.max_abs();
  double sum = 0.0, sum_sq = 0.0;
  for (double x : eigenvalues) {
    sum += x;
    sum_sq += x * x;
  }
  IdentityResiduals r;
  if (scale == 0.0) {
    r.trace = std::abs(sum) > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    r.frobenius = std::abs(sum_sq) > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    return r;
  }
  r.trace = std::abs(sum - a.trace()) / (n * scale);
  r.frobenius = std::abs(sum_sq - a.frobenius_norm_squared()) / (n * scale * scale);
  return r;
}

SpectrumSample spectrum(const DenseSymmetricMatrix& a, std::optional<EnsembleSpec> source,
                        int max_sweeps) {
  if (a.size() == 0) throw ValidationError("empty matrix", "N");
  const Tridiagonal t = tridiagonalize(a);
  auto eig = eigenvalues_tridiagonal(t.diagonal, t.offdiagonal, max_sweeps);

  const auto residuals = identity_residuals(a, eig.values);
  if (!(residuals.trace <= kSpectrumIdentityTolerance) ||
      !(residuals.frobenius <= kSpectrumIdentityTolerance)) {
    throw NumericalError("spectrum failed trace/Frobenius identity (relative residuals " +
                         std::to_string(residuals.trace) + ", " +
                         std::to_string(residuals.frobenius) + ")");
  }
  return {std::move(eig.values), std::move(source), eig.iterations};
}

std::complex<double> resolvent_trace_oracle(const DenseSymmetricMatrix& a,
                                            std::complex<double> z, std::size_t cap) {
  using cplx = std::complex<double>;
  const std::size_t n = a.size();
  if (n == 0) throw ValidationError("empty matrix", "N");
  if (!(z.imag() > 0.0)) throw ValidationError("Im z must be positive", "z");
  if (n > cap) {
    throw ValidationError("N = " + std::to_string(n) + " exceeds oracle cap " + std::to_string(cap),
                          "N");
  }

  // LU factorization with partial pivoting of B = A - z I, in place.
  std::vector<cplx> lu(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) lu[i * n + j] = a(i, j);
    lu[i * n + i] -= z;
  }
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot = k;
    double best = std::abs(lu[k * n + k]);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double mag = std::abs(lu[i * n + k]);
      if (mag > best) {
        best = mag;
        pivot = i;
      }
    }
    if (best == 0.0) throw NumericalError("singular pivot in resolvent oracle");
    if (pivot != k) {
      std::swap_ranges(lu.begin() + k * n, lu.begin() + (k + 1) * n, lu.begin() + pivot * n);
      std::swap(perm[k], perm[pivot]);
    }
    const cplx inv_pivot = 1.0 / lu[k * n + k];
    for (std::size_t i = k + 1; i < n; ++i) {
      cplx& factor = lu[i * n + k];
      factor *= inv_pivot;
      for (std::size_t j = k + 1; j < n; ++j) lu[i * n + j] -= factor * lu[k * n + j];
    }
  }

  // Diagonal of B^{-1}: solve B x = e_j for each j and keep x_j.
  // P B = L U, so B x = e_j becomes L U x = P e_j.
  cplx trace = 0.0;
  std::vector<cplx> x(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) x[i] = perm[i] == j ? 1.0 : 0.0;
    for (std::size_t i = 1; i < n; ++i) {
      cplx acc = x[i];
      for (std::size_t k = 0; k < i; ++k) acc -= lu[i * n + k] * x[k];
      x[i] = acc;
    }
    for (std::size_t i = n; i-- > 0;) {
      cplx acc = x[i];
      for (std::size_t k = i + 1; k < n; ++k) acc -= lu[i * n + k] * x[k];
      x[i] = acc / lu[i * n + i];
    }
    trace += x[j];
  }
  return trace / static_cast<double>(n);
}

std::complex<double> resolvent_trace_from_spectrum(std::span<const double> eigenvalues,
                                                   std::complex<double> z) {
  std::complex<double> sum = 0.0;
  for (double lambda : eigenvalues) sum += 1.0 / (lambda - z);
  return sum / static_cast<double>(eigenvalues.size());
}

}  // namespace mesospec
