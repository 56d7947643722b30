#include "mesospec/laws.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mesospec/errors.hpp"

namespace mesospec {

namespace {

void require_positive(double value, const char* field) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ValidationError("must be a positive finite real", field);
  }
}

// Of the two roots of a z^2 + b z + c = 0 (in g), the one in the upper half plane.
std::complex<double> herglotz_root(std::complex<double> a, std::complex<double> b,
                                   std::complex<double> c) {
  const std::complex<double> disc = std::sqrt(b * b - 4.0 * a * c);
  // Avoid cancellation: q = -(b + sign * disc)/2, roots q/a and c/q.
  const double sign = std::real(std::conj(b) * disc) >= 0.0 ? 1.0 : -1.0;
  const std::complex<double> q = -0.5 * (b + sign * disc);
  const std::complex<double> r1 = q / a;
  const std::complex<double> r2 = c / q;
  return r1.imag() >= r2.imag() ? r1 : r2;
}

}  // namespace

LimitingLaw LimitingLaw::marchenko_pastur(double c, double u) {
  require_positive(c, "c");
  require_positive(u, "u");
  LimitingLaw law;
  law.kind = LawKind::marchenko_pastur;
  law.c = c;
  law.u = u;
  return law;
}

LimitingLaw LimitingLaw::semicircle(double v) {
  require_positive(v, "v");
  LimitingLaw law;
  law.kind = LawKind::semicircle;
  law.v = v;
  return law;
}

LimitingLaw LimitingLaw::of(const EnsembleSpec& spec) {
  return spec.kind == EnsembleKind::wigner ? semicircle(spec.entry.scale)
                                           : marchenko_pastur(spec.c, spec.entry.scale);
}

double mp_density(double lambda, double c, double u) {
  const double u2 = u * u;
  const double lower = u2 * (1.0 - std::sqrt(c)) * (1.0 - std::sqrt(c));
  const double upper = u2 * (1.0 + std::sqrt(c)) * (1.0 + std::sqrt(c));
  if (!(lambda > lower && lambda < upper) || lambda <= 0.0) return 0.0;
  const double shifted = lambda - u2 * (1.0 + c);
  const double disc = 4.0 * c * u2 * u2 - shifted * shifted;
  if (disc <= 0.0) return 0.0;
  return std::sqrt(disc) / (2.0 * std::numbers::pi * lambda * u2);
}

double semicircle_density(double lambda, double v) {
  const double disc = 4.0 * v * v - lambda * lambda;
  if (disc <= 0.0) return 0.0;
  return std::sqrt(disc) / (2.0 * std::numbers::pi * v * v);
}

double density(const LimitingLaw& law, double lambda) {
  return law.kind == LawKind::semicircle ? semicircle_density(lambda, law.v)
                                         : mp_density(lambda, law.c, law.u);
}

SupportAndMass support_and_mass(const LimitingLaw& law) {
  if (law.kind == LawKind::semicircle) return {-2.0 * law.v, 2.0 * law.v, 1.0, 0.0};
  const double u2 = law.u * law.u;
  const double root = std::sqrt(law.c);
  return {u2 * (1.0 - root) * (1.0 - root), u2 * (1.0 + root) * (1.0 + root),
          std::min(1.0, law.c), std::max(0.0, 1.0 - law.c)};
}

double bulk_center(const LimitingLaw& law) {
  return law.kind == LawKind::semicircle ? 0.0 : law.u * law.u * (1.0 + law.c);
}

double second_moment(const LimitingLaw& law) {
  if (law.kind == LawKind::semicircle) return law.v * law.v;
  const double u2 = law.u * law.u;
  return u2 * u2 * law.c * (1.0 + law.c);
}

std::complex<double> stieltjes(const LimitingLaw& law, std::complex<double> z) {
  if (!(z.imag() > 0.0)) throw ValidationError("Im z must be positive", "z");
  if (law.kind == LawKind::semicircle) {
    // v^2 g^2 + z g + 1 = 0
    return herglotz_root(law.v * law.v, z, 1.0);
  }
  // With w = z/u^2 and h(w) = u^2 g(z): w h^2 + (w - c + 1) h + 1 = 0.
  const double u2 = law.u * law.u;
  const std::complex<double> w = z / u2;
  return herglotz_root(w, w - law.c + 1.0, 1.0) / u2;
}

double covariance_kernel(double tau1, double tau2) noexcept {
  const double d2 = (tau1 - tau2) * (tau1 - tau2);
  const double denom = 4.0 + d2;
  return (4.0 - d2) / (denom * denom);
}

double kernel_asymptote_check(double delta) {
  if (delta == 0.0 || !std::isfinite(delta)) {
    throw ValidationError("must be a nonzero finite real", "delta");
  }
  return covariance_kernel(0.0, delta) * delta * delta + 1.0;
}

const char* to_string(LawKind kind) noexcept {
  return kind == LawKind::semicircle ? "semicircle" : "marchenko_pastur";
}

}  // namespace mesospec
