#include "hessianlab/pde/grid.hpp"

#include <cmath>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "hessianlab/cone.hpp"
#include "hessianlab/symfun.hpp"

namespace hessianlab::pde {

namespace {

// derivative of sigma_k with respect to the (symmetric) Hessian matrix
MatrixXd sigma_k_matrix_derivative(const MatrixXd& H, int k) {
  const int n = int(H.rows());
  if (k == 1) return MatrixXd::Identity(n, n);
  if (k == 2) return H.trace() * MatrixXd::Identity(n, n) - H;
  if (k == 3 && n == 3) {
    // adjugate of a symmetric 3x3
    MatrixXd adj(3, 3);
    adj(0, 0) = H(1, 1) * H(2, 2) - H(1, 2) * H(2, 1);
    adj(1, 1) = H(0, 0) * H(2, 2) - H(0, 2) * H(2, 0);
    adj(2, 2) = H(0, 0) * H(1, 1) - H(0, 1) * H(1, 0);
    adj(0, 1) = H(1, 2) * H(2, 0) - H(1, 0) * H(2, 2);
    adj(0, 2) = H(1, 0) * H(2, 1) - H(1, 1) * H(2, 0);
    adj(1, 2) = H(0, 1) * H(2, 0) - H(0, 0) * H(2, 1);
    adj(1, 0) = adj(0, 1);
    adj(2, 0) = adj(0, 2);
    adj(2, 1) = adj(1, 2);
    return adj;
  }
  throw Error("sigma_k_matrix_derivative: unsupported (n,k)");
}

double sigma_k_of_matrix(const MatrixXd& H, int k) {
  const int n = int(H.rows());
  if (k == 1) return H.trace();
  if (k == 2) {
    double tr = H.trace();
    return 0.5 * (tr * tr - H.squaredNorm());
  }
  if (k == 3 && n == 3) return H.determinant();
  throw Error("sigma_k_of_matrix: unsupported (n,k)");
}

struct Offsets {
  // axis unit offsets in node index space
  long step[3];
};

Offsets axis_steps(const GridField& f) {
  if (f.n == 2) return {{f.N, 1, 0}};
  return {{long(f.N) * f.N, f.N, 1}};
}

}  // namespace

VectorXd GridField::coord(long node) const {
  VectorXd x(n);
  if (n == 2) {
    x[0] = lo + double(node / N) * h;
    x[1] = lo + double(node % N) * h;
  } else {
    x[0] = lo + double(node / (long(N) * N)) * h;
    x[1] = lo + double((node / N) % N) * h;
    x[2] = lo + double(node % N) * h;
  }
  return x;
}

GridField make_cube(int n, int k, double half, int N) {
  if (n != 2 && n != 3) throw Error("make_cube: n must be 2 or 3");
  if (N < 3) throw Error("make_cube: need N >= 3");
  GridField f;
  f.n = n;
  f.k = k;
  f.N = N;
  f.h = 2.0 * half / double(N - 1);
  f.lo = -half;
  long total = n == 2 ? long(N) * N : long(N) * N * N;
  f.u = VectorXd::Zero(total);
  f.mask.assign(size_t(total), 0);
  for (long node = 0; node < total; ++node) {
    int i = n == 2 ? int(node / N) : int(node / (long(N) * N));
    int j = n == 2 ? int(node % N) : int((node / N) % N);
    int m = n == 2 ? 1 : int(node % N);
    bool bdry = i == 0 || i == N - 1 || j == 0 || j == N - 1;
    if (n == 3) bdry = bdry || m == 0 || m == N - 1;
    if (bdry) f.mask[size_t(node)] = 1;
  }
  return f;
}

GridField make_ball_in_cube(int n, int k, double half, int N, double ball_r,
                            const FieldF& g) {
  GridField f = make_cube(n, k, half, N);
  if (ball_r + f.h >= half)
    throw Error("make_ball_in_cube: ball must clear the cube by one layer");
  long total = f.size();
  for (long node = 0; node < total; ++node) {
    VectorXd x = f.coord(node);
    if (x.norm() >= ball_r) f.mask[size_t(node)] = 1;
  }
  for (long node = 0; node < total; ++node)
    if (f.mask[size_t(node)] == 1) f.u[node] = g(f.coord(node));
  return f;
}

MatrixXd discrete_hessian(const GridField& f, long node) {
  const double h2 = f.h * f.h;
  Offsets st = axis_steps(f);
  MatrixXd H(f.n, f.n);
  for (int a = 0; a < f.n; ++a) {
    H(a, a) =
        (f.u[node + st.step[a]] - 2.0 * f.u[node] + f.u[node - st.step[a]]) / h2;
    for (int b = a + 1; b < f.n; ++b) {
      double cross = (f.u[node + st.step[a] + st.step[b]] -
                      f.u[node + st.step[a] - st.step[b]] -
                      f.u[node - st.step[a] + st.step[b]] +
                      f.u[node - st.step[a] - st.step[b]]) /
                     (4.0 * h2);
      H(a, b) = cross;
      H(b, a) = cross;
    }
  }
  return H;
}

double sigma_k_at(const GridField& f, long node) {
  return sigma_k_of_matrix(discrete_hessian(f, node), f.k);
}

bool grid_admissible(const GridField& f) {
  for (long node = 0; node < f.size(); ++node) {
    if (!f.interior(node)) continue;
    VectorXd ev = symmetric_eigenvalues(discrete_hessian(f, node));
    VectorXd table = sym_table(ev);
    if (first_cone_failure(table, f.k) != 0) return false;
  }
  return true;
}

SolveStats grid_solve(GridField& field, const FieldF& f, const SolveOptions& opts) {
  SolveStats stats;
  const long total = field.size();
  Offsets st = axis_steps(field);

  // stencil sanity: every interior node must see grid-resident neighbors
  std::vector<long> unknowns;
  std::vector<long> slot(size_t(total), -1);
  for (long node = 0; node < total; ++node)
    if (field.interior(node)) {
      // reject interior nodes on the outer layer (their stencil leaves the grid)
      VectorXd x = field.coord(node);
      for (int a = 0; a < field.n; ++a) {
        double rel = (x[a] - field.lo) / field.h;
        if (rel < 0.5 || rel > double(field.N - 1) - 0.5)
          throw Error("grid_solve: boundary mask inconsistent (interior node on rim)");
      }
      slot[size_t(node)] = long(unknowns.size());
      unknowns.push_back(node);
    }
  const long m = long(unknowns.size());
  if (m == 0) throw Error("grid_solve: no interior unknowns");

  VectorXd fvals(m);
  for (long s = 0; s < m; ++s) fvals[s] = f(field.coord(unknowns[s]));
  stats.f_inf = fvals.cwiseAbs().maxCoeff();
  const double tol = opts.tol_rel * stats.f_inf;

  auto residual = [&](const GridField& g) {
    VectorXd r(m);
    for (long s = 0; s < m; ++s)
      r[s] = sigma_k_of_matrix(discrete_hessian(g, unknowns[s]), g.k) - fvals[s];
    return r;
  };
  auto admissible_all = [&](const GridField& g) {
    for (long s = 0; s < m; ++s) {
      VectorXd ev = symmetric_eigenvalues(discrete_hessian(g, unknowns[s]));
      VectorXd table = sym_table_raw<double>(ev);
      if (first_cone_failure(table, g.k) != 0) return false;
    }
    return true;
  };

  if (!admissible_all(field)) {
    stats.failure = "initial iterate not admissible";
    return stats;
  }

  VectorXd res = residual(field);
  double res_inf = res.cwiseAbs().maxCoeff();

  Eigen::SparseMatrix<double> J(m, m);
  std::vector<Eigen::Triplet<double>> trips;
  const double h2 = field.h * field.h;

  for (int it = 0; it < opts.max_newton; ++it) {
    stats.newton_iters = it;
    stats.residual = res_inf;
    if (res_inf < tol) {
      stats.converged = true;
      return stats;
    }

    trips.clear();
    for (long s = 0; s < m; ++s) {
      long node = unknowns[s];
      MatrixXd G = sigma_k_matrix_derivative(discrete_hessian(field, node), field.k);
      double center = 0.0;
      for (int a = 0; a < field.n; ++a) {
        center += -2.0 * G(a, a) / h2;
        for (int sgn : {-1, +1}) {
          long nb = node + sgn * st.step[a];
          if (slot[size_t(nb)] >= 0)
            trips.emplace_back(int(s), int(slot[size_t(nb)]), G(a, a) / h2);
        }
        for (int b = a + 1; b < field.n; ++b) {
          double w = 2.0 * G(a, b) / (4.0 * h2);
          for (int sa : {-1, +1})
            for (int sb : {-1, +1}) {
              long nb = node + sa * st.step[a] + sb * st.step[b];
              if (slot[size_t(nb)] >= 0)
                trips.emplace_back(int(s), int(slot[size_t(nb)]),
                                   double(sa * sb) * w);
            }
        }
      }
      trips.emplace_back(int(s), int(s), center);
    }
    J.setFromTriplets(trips.begin(), trips.end());

    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(J);
    if (lu.info() != Eigen::Success) {
      stats.failure = "Newton Jacobian factorization failed";
      return stats;
    }
    VectorXd d = lu.solve(-res);

    double alpha = 1.0;
    bool accepted = false;
    for (int half = 0; half <= opts.max_halvings; ++half) {
      GridField trial = field;
      for (long s = 0; s < m; ++s) trial.u[unknowns[s]] += alpha * d[s];
      if (admissible_all(trial)) {
        VectorXd tres = residual(trial);
        double t_inf = tres.cwiseAbs().maxCoeff();
        if (t_inf < res_inf) {
          field = std::move(trial);
          res = std::move(tres);
          res_inf = t_inf;
          accepted = true;
          break;
        }
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      stats.failure = "admissibility line search stalled";
      stats.residual = res_inf;
      return stats;
    }
  }
  stats.residual = res_inf;
  stats.converged = res_inf < tol;
  if (!stats.converged) stats.failure = "Newton iteration budget exhausted";
  return stats;
}

Barrier comparison_barrier(int n, int k, double sup_f, double boundary_sup_sq) {
  Barrier w;
  w.a = 0.5 * std::pow(sup_f / binom(n, k), 1.0 / double(k));
  w.b = w.a * boundary_sup_sq;
  return w;
}

SolveStats grid_solve_homotopy(GridField& field, const FieldF& f, const Barrier& w,
                               const SolveOptions& opts) {
  for (long node = 0; node < field.size(); ++node) field.u[node] = w(field.coord(node));
  SolveStats stats;
  double t = 1.0;    // boundary data = t * w; t walks from 1 to 0
  double step = 0.25;
  while (t > 0.0) {
    double tn = std::max(0.0, t - step);
    GridField trial = field;
    for (long node = 0; node < trial.size(); ++node)
      if (!trial.interior(node)) trial.u[node] = tn * w(trial.coord(node));
    SolveStats st = grid_solve(trial, f, opts);
    if (st.converged) {
      field = std::move(trial);
      t = tn;
      step = std::min(2.0 * step, 0.5);
      stats = st;
    } else {
      step *= 0.5;
      if (step < 1e-3) {
        st.failure = "homotopy stalled at boundary factor " + std::to_string(t) +
                     (st.failure.empty() ? "" : ": " + st.failure);
        return st;
      }
    }
  }
  return stats;
}

bool barrier_sandwich_holds(const GridField& field, const Barrier& w) {
  for (long node = 0; node < field.size(); ++node) {
    if (!field.interior(node)) continue;
    double wv = w(field.coord(node));
    if (!(wv <= field.u[node] && field.u[node] <= 0.0)) return false;
  }
  return true;
}

GridPogorelov pogorelov_diagnostic(const GridField& field, double alpha) {
  GridPogorelov d;
  d.alpha = alpha;
  for (long node = 0; node < field.size(); ++node) {
    if (!field.interior(node)) continue;
    VectorXd ev = symmetric_eigenvalues(discrete_hessian(field, node));
    double v = std::pow(std::max(0.0, -field.u[node]), alpha) * ev[0];
    if (v > d.value) {
      d.value = v;
      d.node = node;
    }
  }
  return d;
}

}  // namespace hessianlab::pde
