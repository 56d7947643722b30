#pragma once

#include <complex>
#include <string>

#include "mesospec/ensembles.hpp"

namespace mesospec {

enum class LawKind { marchenko_pastur, semicircle };

/// Limiting eigenvalue law of an ensemble.
///
/// marchenko_pastur(c, u): a.c. part on (u^2(1-sqrt c)^2, u^2(1+sqrt c)^2)
///   with mass min(1, c), plus an atom of mass 1-c at zero when c < 1.
/// semicircle(v): density on [-2v, 2v], mass 1.
struct LimitingLaw {
  LawKind kind = LawKind::semicircle;
  double c = 1.0;
  double u = 1.0;
  double v = 1.0;

  static LimitingLaw marchenko_pastur(double c, double u);
  static LimitingLaw semicircle(double v);
  /// The law of `spec`; sample_covariance uses the nominal c, not m/N.
  static LimitingLaw of(const EnsembleSpec& spec);
};

struct SupportAndMass {
  double lower = 0.0;
  double upper = 0.0;
  double ac_mass = 0.0;
  double atom_at_zero = 0.0;
};

/// rho_c(lambda) = sqrt(4 c u^4 - [lambda - u^2 (1+c)]^2) / (2 pi lambda u^2)
/// inside the support, 0 elsewhere (absolutely continuous part only).
double mp_density(double lambda, double c, double u);

/// sqrt(4 v^2 - lambda^2) / (2 pi v^2) for |lambda| <= 2v, 0 elsewhere.
double semicircle_density(double lambda, double v);

double density(const LimitingLaw& law, double lambda);

SupportAndMass support_and_mass(const LimitingLaw& law);

/// Bulk center used as the default evaluation point: u^2 (1+c) or 0.
double bulk_center(const LimitingLaw& law);

/// Second moment of the full law (atom included): u^4 c (1+c) or v^2.
double second_moment(const LimitingLaw& law);

/// g(z) = integral (lambda - z)^{-1} dsigma(lambda), atom included. The
/// closed-form quadratic has two roots; the one with Im g > 0 is returned.
/// Throws ValidationError unless Im z > 0.
std::complex<double> stieltjes(const LimitingLaw& law, std::complex<double> z);

/// C(t1, t2) = (4 - d^2) / (4 + d^2)^2 with d = t1 - t2.
double covariance_kernel(double tau1, double tau2) noexcept;

/// C(0, delta) delta^2 + 1, which tends to 0 as |delta| grows. Throws
/// ValidationError for delta = 0.
double kernel_asymptote_check(double delta);

const char* to_string(LawKind kind) noexcept;

}  // namespace mesospec
