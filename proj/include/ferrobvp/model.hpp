#pragma once

#include <stdexcept>
#include <string>

namespace ferrobvp {

/// Dimensionless constants of the ferronematic energy.
///
/// `l1` and `l2` weight the nematic and magnetic elastic terms, `c` is the
/// nemato-magnetic coupling and `xi` the relative strength of the magnetic
/// energy. Construct through `make()` to get the domain checks.
struct ModelParams {
  double l1 = 1.0;
  double l2 = 1.0;
  double c = 0.0;
  double xi = 1.0;

  static ModelParams make(double l1, double l2, double c, double xi = 1.0) {
    ModelParams p{l1, l2, c, xi};
    p.validate();
    return p;
  }

  /// Equal elastic constants, the setting used by every experiment here.
  static ModelParams equal_elastic(double l, double c, double xi = 1.0) {
    return make(l, l, c, xi);
  }

  void validate() const {
    if (!(l1 > 0.0)) throw std::invalid_argument("l1 must be positive, got " + std::to_string(l1));
    if (!(l2 > 0.0)) throw std::invalid_argument("l2 must be positive, got " + std::to_string(l2));
    if (!(xi > 0.0)) throw std::invalid_argument("xi must be positive, got " + std::to_string(xi));
    if (!(c >= 0.0)) throw std::invalid_argument("c must be non-negative, got " + std::to_string(c));
  }

  ModelParams with_l(double l) const { return make(l, l, c, xi); }
};

}  // namespace ferrobvp
