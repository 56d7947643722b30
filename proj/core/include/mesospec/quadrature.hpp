#pragma once

#include <complex>
#include <functional>

#include "mesospec/laws.hpp"

namespace mesospec::quadrature {

/// Adaptive Gauss-Kronrod (15-point) on [a, b] to absolute tolerance `tol`.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-9);

/// Integral over the whole real line (sinh-sinh substitution).
double integrate_real_line(const std::function<double(double)>& f, double tol = 1e-9);

/// Integral of `f(lambda) rho(lambda)` over the support of the law's
/// absolutely continuous part. The substitution
/// lambda = a + (b-a)(1 - cos theta)/2 removes the square-root edges.
double integrate_against_density(const LimitingLaw& law,
                                 const std::function<double(double)>& f, double tol = 1e-9);

/// Mass of the absolutely continuous part by quadrature.
double density_mass(const LimitingLaw& law, double tol = 1e-9);

/// Stieltjes transform by quadrature of the density plus the exact atom term.
std::complex<double> stieltjes_by_quadrature(const LimitingLaw& law, std::complex<double> z,
                                             double tol = 1e-9);

}  // namespace mesospec::quadrature
