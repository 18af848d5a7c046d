// Liouville rescaling experiments: for an entire-solution surrogate u with
// quadratic growth, the family u_R(y) = (u(Ry) - R^2)/R^2 keeps the Hessian
// invariant, so the sublevel-set Hessian bound must be uniform across R.
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hessianlab/types.hpp"

namespace hessianlab::pde {

struct Surrogate {
  int n = 3;
  int k = 2;
  std::string name;
  double growth_c = 0.0;  // declared: u(x) >= growth_c |x|^2 - growth_b ...
  double growth_b = 0.0;  // ... for |x| >= growth_r0
  double growth_r0 = 1.0;
  std::function<double(const VectorXd&)> value;
  std::function<MatrixXd(const VectorXd&)> hessian;
};

// u = a |x|^2 / 2 with a = C(n,k)^{-1/k}; sigma_k(D^2 u) = 1 identically
Surrogate quadratic_surrogate(int n, int k);

// quadratic + eps sin(x_1); admissible for eps < a, growth constants unchanged
Surrogate bump_surrogate(int n, int k, double eps);

// radial |x|^{3/2} profile: admissible away from the origin but fails every
// quadratic lower bound
Surrogate growth_violating_surrogate(int n, int k);

struct GrowthCertificate {
  VectorXd x;
  double u_value;
  double quadratic_bound;  // growth_c |x|^2 - growth_b at the witness
};

struct RescaleEntry {
  double R = 1.0;
  double sup_hess = 0.0;        // sup over {u_R < -1/2} of |D^2 u_R| (spectral)
  double hess_invariance = 0.0; // max |FD_y(u_R)(y) - (D^2 u)(Ry)| over probes
  double pogorelov = 0.0;       // sup over {u_R < 0} of (-u_R)^alpha |D^2 u_R|
};

struct RescaleReport {
  double alpha = 0.0;
  std::vector<RescaleEntry> entries;
  double spread = 0.0;       // max - min of sup_hess across R
  double pogorelov_C = 0.0;  // max of the per-R Pogorelov sups
  double bound = 0.0;        // 2^alpha * pogorelov_C; sup_hess must stay below
  std::optional<GrowthCertificate> rejection;  // set when the growth check fails
};

// Verifies the declared quadratic growth (rejecting with a certificate on
// failure), then for each R evaluates the rescaled family on a probe grid.
RescaleReport rescale_family(const Surrogate& u, const std::vector<double>& radii,
                             double alpha, int pts_per_axis = 33);

}  // namespace hessianlab::pde
