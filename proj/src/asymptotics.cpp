#include "qzrp/asymptotics.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace qzrp {

namespace {

constexpr double kUpper = 10.0;

}  // namespace

double crossover_F(double g, double quad_tol) {
  if (!(g > 0)) throw DomainError("crossover_F needs g > 0");
  const double s = std::sqrt(g / 32.0);
  // y^2 / tanh(s y) -> y / s as y -> 0, so the integrand extends to 0 at y = 0.
  auto integrand = [s](double y) {
    if (y == 0.0) return 0.0;
    const double sy = s * y;
    const double ratio = sy < 1e-8 ? y / s : y * y / std::tanh(sy);
    return ratio * std::exp(-y * y);
  };
  double error = 0.0;
  const double body = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      integrand, 0.0, kUpper, 12, quad_tol, &error);

  // Beyond y = 10: 1/tanh(s y) <= 1 + 1/(s y), and int_10^inf (y^2 + y/s) e^{-y^2}
  // is below (10/2 + 1 + 1/(2s)) e^{-100}; scaled by the prefactor this is
  // far under any requested tolerance, so the tail is dropped with that bound.
  const double prefactor = std::sqrt(g) / (2.0 * std::sqrt(2.0));
  const double tail_bound = prefactor * (6.0 + 0.5 / s) * std::exp(-kUpper * kUpper);
  if (prefactor * error + tail_bound > quad_tol * std::max(1.0, prefactor * body) * 10.0) {
    throw SolverError("crossover_F: quadrature error estimate above tolerance");
  }
  return prefactor * body;
}

CrossoverData crossover_prediction(double rho, double alpha, double quad_tol) {
  if (!(rho > 0)) throw DomainError("density must be positive");
  const double g = 8.0 * rho * alpha * alpha;
  // alpha = 0 is the q = 1 point, where F(0, inf) = 1.
  const double Fg = g == 0.0 ? 1.0 : crossover_F(g, quad_tol);
  return CrossoverData{alpha, rho, g, rho, 0.5, Fg, rho * Fg};
}

}  // namespace qzrp
