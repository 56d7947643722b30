#include "mesospec/ensembles.hpp"

#include <algorithm>
#include <cmath>

#if defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>
#endif

#include "mesospec/errors.hpp"

namespace mesospec {

std::size_t EnsembleSpec::m() const noexcept {
  return static_cast<std::size_t>(std::llround(c * static_cast<double>(N)));
}

double EnsembleSpec::realized_ratio() const noexcept {
  return N == 0 ? 0.0 : static_cast<double>(m()) / static_cast<double>(N);
}

DenseSymmetricMatrix DenseSymmetricMatrix::from_row_major(std::size_t n,
                                                          std::vector<double> entries) {
  if (entries.size() != n * n) {
    throw ValidationError("expected " + std::to_string(n * n) + " entries", "entries");
  }
  DenseSymmetricMatrix a;
  a.n_ = n;
  a.entries_ = std::move(entries);
  if (!a.is_symmetric()) throw ValidationError("matrix is not symmetric", "entries");
  return a;
}

DenseSymmetricMatrix DenseSymmetricMatrix::identity(std::size_t n) {
  DenseSymmetricMatrix a(n);
  for (std::size_t i = 0; i < n; ++i) a.entries_[i * n + i] = 1.0;
  return a;
}

double DenseSymmetricMatrix::trace() const noexcept {
  double t = 0.0;
  for (std::size_t i = 0; i < n_; ++i) t += entries_[i * n_ + i];
  return t;
}

double DenseSymmetricMatrix::frobenius_norm_squared() const noexcept {
  double s = 0.0;
  for (double v : entries_) s += v * v;
  return s;
}

double DenseSymmetricMatrix::max_abs() const noexcept {
  double m = 0.0;
  for (double v : entries_) m = std::max(m, std::abs(v));
  return m;
}

bool DenseSymmetricMatrix::is_symmetric() const noexcept {
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (entries_[i * n_ + j] != entries_[j * n_ + i]) return false;
    }
  }
  return true;
}

void validate(const EnsembleSpec& spec) {
  if (spec.N == 0) throw ValidationError("matrix dimension must be positive", "N");
  validate(spec.entry);
  if (spec.kind == EnsembleKind::sample_covariance) {
    if (spec.entry.kind != EntryKind::gaussian) {
      throw ValidationError("sample_covariance requires gaussian entries", "entry");
    }
    if (!(spec.c > 0.0) || !std::isfinite(spec.c)) {
      throw ValidationError("must be a positive finite real", "c");
    }
    if (spec.m() == 0) throw ValidationError("round(c*N) must be at least 1", "c");
  }
}

namespace {

DenseSymmetricMatrix generate_wigner(const EnsembleSpec& spec) {
  const std::size_t n = spec.N;
  const double norm = 1.0 / std::sqrt(static_cast<double>(n));
  Stream stream(spec.seed);
  DenseSymmetricMatrix a(n);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = x; y < n; ++y) {
      a.set(x, y, sample(spec.entry, stream) * norm);
    }
  }
  return a;
}

void mirror_upper(DenseSymmetricMatrix& a) {
  const std::size_t n = a.size();
  auto e = a.mutable_entries();
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = x + 1; y < n; ++y) e[y * n + x] = e[x * n + y];
  }
}

// Both Gram strategies accumulate the unscaled sum chunk by chunk: within a
// chunk of kGramChunk vectors each entry is a sequential fma chain starting
// from zero, and the chunk total is then added to the running entry. Sharing
// this order is what makes the two strategies agree bitwise.
constexpr std::size_t kGramChunk = 256;

void finish_gram(DenseSymmetricMatrix& a, std::size_t n) {
  const double inv_n = 1.0 / static_cast<double>(n);
  auto e = a.mutable_entries();
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = x; y < n; ++y) e[x * n + y] *= inv_n;
  }
  mirror_upper(a);
}

// out(x, y) += sum_{mu in [mu0, mu1)} xi(mu, x) xi(mu, y) on the 4 x 8 block at
// (x0, y0), accumulated in registers.
#if defined(__AVX2__) && defined(__FMA__)
inline void gram_micro_kernel(const double* xi, std::size_t n, std::size_t mu0, std::size_t mu1,
                              std::size_t x0, std::size_t y0, double* out) {
  __m256d acc[4][2];
  for (auto& row : acc) row[0] = row[1] = _mm256_setzero_pd();
  for (std::size_t mu = mu0; mu < mu1; ++mu) {
    const double* v = xi + mu * n;
    const __m256d lo = _mm256_loadu_pd(v + y0);
    const __m256d hi = _mm256_loadu_pd(v + y0 + 4);
    for (int i = 0; i < 4; ++i) {
      const __m256d vx = _mm256_broadcast_sd(v + x0 + i);
      acc[i][0] = _mm256_fmadd_pd(vx, lo, acc[i][0]);
      acc[i][1] = _mm256_fmadd_pd(vx, hi, acc[i][1]);
    }
  }
  for (int i = 0; i < 4; ++i) {
    double* dst = out + (x0 + i) * n + y0;
    _mm256_storeu_pd(dst, _mm256_add_pd(_mm256_loadu_pd(dst), acc[i][0]));
    _mm256_storeu_pd(dst + 4, _mm256_add_pd(_mm256_loadu_pd(dst + 4), acc[i][1]));
  }
}
#else
inline void gram_micro_kernel(const double* xi, std::size_t n, std::size_t mu0, std::size_t mu1,
                              std::size_t x0, std::size_t y0, double* out) {
  double acc[4][8] = {};
  for (std::size_t mu = mu0; mu < mu1; ++mu) {
    const double* v = xi + mu * n;
    for (int i = 0; i < 4; ++i) {
      const double vx = v[x0 + i];
      for (int j = 0; j < 8; ++j) acc[i][j] = std::fma(vx, v[y0 + j], acc[i][j]);
    }
  }
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 8; ++j) out[(x0 + i) * n + y0 + j] += acc[i][j];
  }
}
#endif

inline void gram_scalar_entry(const double* xi, std::size_t n, std::size_t mu0, std::size_t mu1,
                              std::size_t x, std::size_t y, double* out) {
  double acc = 0.0;
  for (std::size_t mu = mu0; mu < mu1; ++mu) acc = std::fma(xi[mu * n + x], xi[mu * n + y], acc);
  out[x * n + y] += acc;
}

DenseSymmetricMatrix generate_gram_factor(const EnsembleSpec& spec) {
  const std::size_t n = spec.N;
  const std::size_t m = spec.m();
  Stream stream(spec.seed);
  std::vector<double> factor(m * n);
  for (double& v : factor) v = spec.entry.scale * stream.normal();
  const double* xi = factor.data();

  DenseSymmetricMatrix a(n);
  double* out = a.mutable_entries().data();
  constexpr std::size_t kRowBlock = 64;
  constexpr std::size_t kColBlock = 256;
  const std::size_t n4 = n - n % 4;
  const std::size_t n8 = n - n % 8;

  for (std::size_t mu0 = 0; mu0 < m; mu0 += kGramChunk) {
    const std::size_t mu1 = std::min(m, mu0 + kGramChunk);
    for (std::size_t xb = 0; xb < n4; xb += kRowBlock) {
      const std::size_t xe = std::min(n4, xb + kRowBlock);
      for (std::size_t yb = xb - xb % 8; yb < n8; yb += kColBlock) {
        const std::size_t ye = std::min(n8, yb + kColBlock);
        for (std::size_t x0 = xb; x0 < xe; x0 += 4) {
          for (std::size_t y0 = std::max(yb, x0 - x0 % 8); y0 < ye; y0 += 8) {
            gram_micro_kernel(xi, n, mu0, mu1, x0, y0, out);
          }
        }
      }
    }
    // Ragged edges: columns past n8 for every row, rows past n4.
    for (std::size_t x = 0; x < n; ++x) {
      const std::size_t y_begin = x < n4 ? std::max(x, n8) : x;
      for (std::size_t y = y_begin; y < n; ++y) gram_scalar_entry(xi, n, mu0, mu1, x, y, out);
    }
  }
  // The micro kernel also touched a few entries below the diagonal; the
  // upper triangle is authoritative.
  finish_gram(a, n);
  return a;
}

DenseSymmetricMatrix generate_gram_rank_one(const EnsembleSpec& spec) {
  const std::size_t n = spec.N;
  const std::size_t m = spec.m();
  Stream stream(spec.seed);
  std::vector<double> v(n);
  std::vector<double> partial(n * n, 0.0);
  DenseSymmetricMatrix a(n);
  auto e = a.mutable_entries();
  for (std::size_t mu = 0; mu < m; ++mu) {
    for (double& x : v) x = spec.entry.scale * stream.normal();
    for (std::size_t x = 0; x < n; ++x) {
      const double vx = v[x];
      double* row = partial.data() + x * n;
      for (std::size_t y = x; y < n; ++y) row[y] = std::fma(vx, v[y], row[y]);
    }
    if ((mu + 1) % kGramChunk == 0 || mu + 1 == m) {
      for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = x; y < n; ++y) {
          e[x * n + y] += partial[x * n + y];
          partial[x * n + y] = 0.0;
        }
      }
    }
  }
  finish_gram(a, n);
  return a;
}

}  // namespace

DenseSymmetricMatrix generate(const EnsembleSpec& spec, GramStrategy strategy) {
  validate(spec);
  if (spec.kind == EnsembleKind::wigner) return generate_wigner(spec);
  return strategy == GramStrategy::factor ? generate_gram_factor(spec)
                                          : generate_gram_rank_one(spec);
}

double expected_trace(const EnsembleSpec& spec) {
  if (spec.kind == EnsembleKind::wigner) return 0.0;
  return spec.c * spec.entry.scale * spec.entry.scale;
}

const char* to_string(EnsembleKind kind) noexcept {
  return kind == EnsembleKind::wigner ? "wigner" : "sample_covariance";
}

EnsembleKind parse_ensemble_kind(const std::string& text) {
  if (text == "wigner") return EnsembleKind::wigner;
  if (text == "sample_covariance") return EnsembleKind::sample_covariance;
  throw ValidationError("expected wigner|sample_covariance, got '" + text + "'", "ensemble");
}

}  // namespace mesospec
