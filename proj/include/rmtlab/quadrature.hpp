#pragma once

#include <functional>
#include <vector>

namespace rmt {

/// Gauss-Legendre nodes and weights mapped to [a, b].
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  int order = 0;
  double a = -1.0;
  double b = 1.0;
};

QuadratureRule gauss_legendre(int order, double a = -1.0, double b = 1.0);

double integrate(const std::function<double(double)>& f, const QuadratureRule& rule);

/// Composite Gauss-Legendre: `panels` equal panels of `order` nodes each.
double integrate_composite(const std::function<double(double)>& f, double a, double b, int panels, int order = 20);

}  // namespace rmt
