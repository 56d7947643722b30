#include "mesospec/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/sinh_sinh.hpp>
#include <cmath>
#include <numbers>

#include "mesospec/errors.hpp"

namespace mesospec::quadrature {

namespace {
// Deeper than this only chases roundoff and can take exponential time.
constexpr unsigned kMaxDepth = 15;
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  double error = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, kMaxDepth, tol,
                                                                        &error);
}

double integrate_real_line(const std::function<double(double)>& f, double tol) {
  boost::math::quadrature::sinh_sinh<double> integrator;
  return integrator.integrate(f, tol);
}

double integrate_against_density(const LimitingLaw& law, const std::function<double(double)>& f,
                                 double tol) {
  const auto s = support_and_mass(law);
  const double width = s.upper - s.lower;
  auto integrand = [&](double theta) {
    const double lambda = s.lower + 0.5 * width * (1.0 - std::cos(theta));
    return f(lambda) * density(law, lambda) * 0.5 * width * std::sin(theta);
  };
  // Split at the midpoint so the bulk peak does not starve the edges.
  const double half = 0.5 * std::numbers::pi;
  return integrate(integrand, 0.0, half, tol / 2) +
         integrate(integrand, half, std::numbers::pi, tol / 2);
}

double density_mass(const LimitingLaw& law, double tol) {
  return integrate_against_density(law, [](double) { return 1.0; }, tol);
}

std::complex<double> stieltjes_by_quadrature(const LimitingLaw& law, std::complex<double> z,
                                             double tol) {
  if (!(z.imag() > 0.0)) throw ValidationError("Im z must be positive", "z");
  const double re = integrate_against_density(
      law, [&](double lambda) { return std::real(1.0 / (lambda - z)); }, tol);
  const double im = integrate_against_density(
      law, [&](double lambda) { return std::imag(1.0 / (lambda - z)); }, tol);
  std::complex<double> g(re, im);
  const double atom = support_and_mass(law).atom_at_zero;
  if (atom > 0.0) g += atom / (0.0 - z);
  return g;
}

}  // namespace mesospec::quadrature
