// Damped-Newton Dirichlet solver for sigma_k(lambda(D^2_h u)) = f on uniform
// square/cube grids (n = 2 or 3), with central second differences, exact
// matrix derivatives of sigma_k for the Jacobian and an admissibility-
// preserving line search.
#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "hessianlab/pde/linalg.hpp"
#include "hessianlab/types.hpp"

namespace hessianlab::pde {

using FieldF = std::function<double(const VectorXd&)>;

struct GridField {
  int n = 2;  // spatial dimension, 2 or 3
  int k = 2;
  int N = 0;       // nodes per axis
  double h = 0.0;  // spacing
  double lo = 0.0; // domain corner coordinate (cube [lo, lo + (N-1) h]^n)
  VectorXd u;                 // nodal values, lexicographic
  std::vector<std::uint8_t> mask;  // 0 = interior unknown, 1 = Dirichlet

  long size() const { return long(u.size()); }
  long index(int i, int j, int m = 0) const {
    return n == 2 ? long(i) * N + j : (long(i) * N + j) * N + m;
  }
  VectorXd coord(long node) const;
  bool interior(long node) const { return mask[size_t(node)] == 0; }
};

// square/cube [-half, half]^n with u = 0 pinned on the outer boundary layer
GridField make_cube(int n, int k, double half, int N);

// cube grid with a ball mask: nodes with |x| < ball_r are unknowns, all
// others carry Dirichlet data g(x)
GridField make_ball_in_cube(int n, int k, double half, int N, double ball_r,
                            const FieldF& g);

// central-difference Hessian at an interior node
MatrixXd discrete_hessian(const GridField& field, long node);

// sigma_k of the discrete Hessian eigenvalues at an interior node
double sigma_k_at(const GridField& field, long node);

// lambda(D^2_h u) in Gamma_k at every interior node (exact predicate)
bool grid_admissible(const GridField& field);

struct SolveOptions {
  double tol_rel = 1e-6;  // converged when max residual < tol_rel * |f|_inf
  int max_newton = 60;
  int max_halvings = 30;
};

struct SolveStats {
  bool converged = false;
  int newton_iters = 0;
  double residual = 0.0;  // final max interior residual
  double f_inf = 0.0;
  std::string failure;
};

// comparison barrier w = a |x|^2 - b calibrated so sigma_k(D^2 w) = sup f and
// w <= 0 on the boundary: a = (sup_f / C(n,k))^{1/k} / 2, b = a * max |x|^2
struct Barrier {
  double a = 0.0;
  double b = 0.0;
  double operator()(const VectorXd& x) const { return a * x.squaredNorm() - b; }
};

Barrier comparison_barrier(int n, int k, double sup_f, double boundary_sup_sq);

// damped Newton on the nodal residual sigma_k(lambda(D^2_h u)) - f; the line
// search rejects any step that leaves Gamma_k at an interior node
SolveStats grid_solve(GridField& field, const FieldF& f, const SolveOptions& opts = {});

// Zero-boundary solve via a boundary homotopy.  No smooth function vanishing
// on the whole boundary of a square has an admissible discrete Hessian near
// the corners, so no one-shot initial guess exists there.  Instead the
// boundary data starts at the barrier's trace (where the barrier itself is
// the exact admissible solution) and walks adaptively to zero, re-solving
// from the previous admissible solution at each step.
SolveStats grid_solve_homotopy(GridField& field, const FieldF& f, const Barrier& w,
                               const SolveOptions& opts = {});

// nodewise w <= u <= 0 (exact comparisons, interior nodes)
bool barrier_sandwich_holds(const GridField& field, const Barrier& w);

struct GridPogorelov {
  double alpha = 0.0;
  double value = 0.0;
  long node = 0;
};

GridPogorelov pogorelov_diagnostic(const GridField& field, double alpha);

}  // namespace hessianlab::pde
