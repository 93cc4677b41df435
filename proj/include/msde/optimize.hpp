#pragma once

#include <functional>

namespace msde {

struct ScalarMaximum {
  double x = 0.0;
  double value = 0.0;
  bool at_lower = false;  // maximizer pinned to the lower end of the interval
  bool at_upper = false;
};

/// Golden-section maximization of a unimodal function on [lo, hi].
/// Invariant under positive rescaling of f (only orderings are used).
/// Ties land on the lower end of the bracket.
ScalarMaximum golden_section_maximize(const std::function<double(double)>& f, double lo, double hi,
                                      double tol = 1e-6);

}  // namespace msde
