#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hessianlab/cone.hpp"
#include "hessianlab/pde/grid.hpp"
#include "hessianlab/pde/radial.hpp"

using namespace hessianlab;
using namespace hessianlab::pde;

namespace {

// radial solution extended past R by its quadratic Taylor continuation, for
// Dirichlet data on mask nodes that sit outside the ball
FieldF radial_trace(const RadialProfile& rad, double R) {
  return [rad, R](const VectorXd& x) {
    double r = x.norm();
    if (r >= R) {
      double dr = r - R;
      int last = int(rad.r.size()) - 1;
      return rad.du[last] * dr + 0.5 * rad.d2u[last] * dr * dr;
    }
    double pos = r / R * double(rad.r.size() - 1);
    int i = std::min(int(rad.r.size()) - 2, int(pos));
    double w = pos - i;
    return (1.0 - w) * rad.u[i] + w * rad.u[i + 1];
  };
}

}  // namespace

TEST_CASE("monge-ampere on the square: converges, sandwiched, admissible") {
  GridField field = make_cube(2, 2, 1.0, 33);
  Barrier w = comparison_barrier(2, 2, 1.0, 2.0);
  SolveStats stats = grid_solve_homotopy(field, [](const VectorXd&) { return 1.0; }, w);
  CHECK(stats.converged);
  CHECK(stats.residual < 1e-6);
  CHECK(grid_admissible(field));
  CHECK(barrier_sandwich_holds(field, w));
  // boundary values land on exact zeros
  for (long node = 0; node < field.size(); ++node)
    if (!field.interior(node)) CHECK(field.u[node] == 0.0);
}

TEST_CASE("exact quadratic data: Newton stops immediately") {
  // ball mask whose Dirichlet data is the quadratic's own trace: the
  // quadratic interior values solve the discrete equation exactly
  int n = 2, k = 2;
  double a = std::pow(binom(n, k), -1.0 / k);
  auto quad = [a](const VectorXd& x) { return 0.5 * a * (x.squaredNorm() - 0.64); };
  GridField field = make_ball_in_cube(n, k, 1.0, 41, 0.8, quad);
  for (long node = 0; node < field.size(); ++node)
    if (field.interior(node)) field.u[node] = quad(field.coord(node));
  SolveOptions opts;
  SolveStats stats = grid_solve(field, [](const VectorXd&) { return 1.0; }, opts);
  CHECK(stats.converged);
  CHECK(stats.newton_iters <= 2);
}

TEST_CASE("square with zero data refines at first order (corner degeneracy)") {
  // det D^2 u = 1 with u = 0 on a square admits no C^2-up-to-the-corner
  // solution (both edge directions force u_tt = 0 there, so det <= 0 at the
  // corner).  The Hessian blows up at the corners and the sup-norm
  // difference between refinements halves instead of quartering.
  std::vector<int> Ns = {17, 33, 65};
  std::vector<GridField> sols;
  Barrier w = comparison_barrier(2, 2, 1.0, 2.0);
  for (int N : Ns) {
    GridField f = make_cube(2, 2, 1.0, N);
    SolveStats st = grid_solve_homotopy(f, [](const VectorXd&) { return 1.0; }, w);
    REQUIRE(st.converged);
    sols.push_back(std::move(f));
  }
  auto sup_diff = [](const GridField& coarse, const GridField& fine) {
    double d = 0.0;
    for (long node = 0; node < coarse.size(); ++node) {
      if (!coarse.interior(node)) continue;
      int i = int(node / coarse.N), j = int(node % coarse.N);
      d = std::max(d, std::abs(coarse.u[node] - fine.u[fine.index(2 * i, 2 * j)]));
    }
    return d;
  };
  double d01 = sup_diff(sols[0], sols[1]);
  double d12 = sup_diff(sols[1], sols[2]);
  CHECK(d01 / d12 >= 1.8);
  CHECK(d01 / d12 <= 2.2);
}

TEST_CASE("smooth compatible problem refines at second order") {
  // ball mask with data from the radial solve of f = 1 + r^2: the solution
  // is smooth up to the boundary, and the h -> h/2 error ratio against the
  // radial oracle sits in the O(h^2) band [3, 5]
  int n = 2, k = 2;
  double R = 0.7;
  auto fr = [](double r) { return 1.0 + r * r; };
  RadialProfile rad = radial_solve(n, k, R, fr, 8001);
  FieldF g = radial_trace(rad, R);
  auto f2 = [](const VectorXd& x) { return 1.0 + x.squaredNorm(); };

  auto err_at = [&](int N) {
    GridField f = make_ball_in_cube(n, k, 1.0, N, R, g);
    for (long node = 0; node < f.size(); ++node)
      if (f.interior(node)) f.u[node] = g(f.coord(node));
    SolveOptions opts;
    opts.tol_rel = 1e-9;
    SolveStats st = grid_solve(f, f2, opts);
    REQUIRE(st.converged);
    double err = 0.0;
    for (long node = 0; node < f.size(); ++node)
      if (f.interior(node)) err = std::max(err, std::abs(f.u[node] - g(f.coord(node))));
    return err;
  };
  double e17 = err_at(17);
  double e33 = err_at(33);
  double e65 = err_at(65);
  CHECK(e17 / e33 >= 3.0);
  CHECK(e17 / e33 <= 5.0);
  CHECK(e33 / e65 >= 3.0);
  CHECK(e33 / e65 <= 5.0);
}

TEST_CASE("3d ball: interior matches the radial solution to second order") {
  int n = 3, k = 2;
  double ball_r = 0.7;
  RadialProfile rad = radial_solve(n, k, ball_r, [](double) { return 1.0; }, 4001);
  FieldF g = radial_trace(rad, ball_r);

  auto solve_at = [&](int N) {
    GridField f = make_ball_in_cube(n, k, 1.0, N, ball_r, g);
    for (long node = 0; node < f.size(); ++node)
      if (f.interior(node)) f.u[node] = g(f.coord(node));
    SolveStats st = grid_solve(f, [](const VectorXd&) { return 1.0; });
    REQUIRE(st.converged);
    double err = 0.0;
    for (long node = 0; node < f.size(); ++node)
      if (f.interior(node))
        err = std::max(err, std::abs(f.u[node] - g(f.coord(node))));
    return err;
  };
  double e_coarse = solve_at(11);
  double e_fine = solve_at(21);
  CHECK(e_fine <= 5e-3);
  // for f = 1 the radial solution is the exact quadratic, so the discrete
  // error is pure rounding/interpolation noise at both resolutions
  CHECK(e_coarse <= 5e-3);
}

TEST_CASE("3d ball with non-constant data converges and is admissible") {
  // boundary data from a perturbed quadratic; exercises the full 3d Newton
  int n = 3, k = 2;
  auto g = [](const VectorXd& x) {
    return 0.3 * (x.squaredNorm() - 0.49) + 0.01 * x[0];
  };
  GridField f = make_ball_in_cube(n, k, 1.0, 15, 0.7, g);
  for (long node = 0; node < f.size(); ++node)
    if (f.interior(node)) f.u[node] = g(f.coord(node));
  SolveStats st = grid_solve(f, [](const VectorXd&) { return 1.3; });
  CHECK(st.converged);
  CHECK(grid_admissible(f));
}

TEST_CASE("boundary mask consistency is enforced") {
  GridField f = make_cube(2, 2, 1.0, 9);
  f.mask[0] = 0;  // corner node marked interior: stencil leaves the grid
  CHECK_THROWS_AS(grid_solve(f, [](const VectorXd&) { return 1.0; }), Error);
}

TEST_CASE("non-admissible initial iterate is refused") {
  GridField f = make_cube(2, 2, 1.0, 17);
  for (long node = 0; node < f.size(); ++node)
    if (f.interior(node)) f.u[node] = 0.0;  // zero Hessian: not in Gamma_2
  SolveStats st = grid_solve(f, [](const VectorXd&) { return 1.0; });
  CHECK(!st.converged);
  CHECK(st.failure == "initial iterate not admissible");
}

TEST_CASE("pogorelov diagnostic on the 2d solution") {
  GridField field = make_cube(2, 2, 1.0, 33);
  Barrier w = comparison_barrier(2, 2, 1.0, 2.0);
  SolveStats st = grid_solve_homotopy(field, [](const VectorXd&) { return 1.0; }, w);
  REQUIRE(st.converged);
  GridPogorelov d = pogorelov_diagnostic(field, 1.0);
  CHECK(d.value > 0.0);
  CHECK(field.interior(d.node));
}
