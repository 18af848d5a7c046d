// Radial Dirichlet solver for sigma_k(D^2 u) = f(r) on the ball of radius R.
// For a radial function the Hessian eigenvalues are (u'', u'/r with
// multiplicity n-1), which collapses the operator to the flux form
//   sigma_k(D^2 u) = (C(n-1,k-1)/k) r^{1-n} d/dr [ r^{n-k} (u')^k ],
// so the solve is a pair of quadratures.
#pragma once

#include <functional>

#include "hessianlab/spectrum.hpp"
#include "hessianlab/types.hpp"

namespace hessianlab::pde {

struct RadialProfile {
  int n = 0;
  int k = 0;
  double R = 1.0;
  VectorXd r;    // uniform nodes on [0, R]
  VectorXd u;    // u(R) = 0 exactly, u <= 0
  VectorXd du;   // u'(0) = 0 exactly
  VectorXd d2u;  // u''; at r = 0 equal to the u'/r limit
};

using RadialF = std::function<double(double)>;

// the quadratic solution of sigma_k(D^2 u) = 1: u = a (r^2 - R^2)/2 with
// a = C(n,k)^{-1/k}
RadialProfile radial_closed_form(int n, int k, double R, int nodes);

// quadrature solve for general positive f; throws if f <= 0 anywhere sampled
RadialProfile radial_solve(int n, int k, double R, const RadialF& f, int nodes);

// eigenvalue spectrum (u'', u'/r x (n-1)) at node i
Spectrum radial_spectrum(const RadialProfile& p, int i);

// admissibility: the eigenvalue pair lies in Gamma_k at every node
bool radial_admissible(const RadialProfile& p);

// max over nodes (r > 0 handled directly, r = 0 by the limit) of the
// relative defect |sigma_k(u'', u'/r) - f| / max(1, |f|)
double radial_residual(const RadialProfile& p, const RadialF& f);

// same defect but with u'' and u' recomputed from the nodal u values by
// central differences (Richardson), an independent route through the data
double radial_fd_residual(const RadialProfile& p, const RadialF& f);

struct PogorelovDiagnostic {
  double alpha = 0.0;
  double value = 0.0;  // sup over interior of (-u)^alpha lambda_max(D^2 u)
  int node = 0;
};

PogorelovDiagnostic pogorelov_diagnostic(const RadialProfile& p, double alpha);

}  // namespace hessianlab::pde
