#include "msde/optimize.hpp"

#include <cmath>
#include <stdexcept>

namespace msde {

ScalarMaximum golden_section_maximize(const std::function<double(double)>& f, double lo, double hi,
                                      double tol) {
  if (!(lo < hi)) throw std::invalid_argument("golden section needs lo < hi");
  if (!(tol > 0.0)) throw std::invalid_argument("golden section needs tol > 0");
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;

  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  ScalarMaximum m;
  m.x = 0.5 * (a + b);
  m.value = f(m.x);
  const double margin = 5.0 * tol;
  m.at_lower = (m.x - lo) <= margin;
  m.at_upper = (hi - m.x) <= margin;
  return m;
}

}  // namespace msde
