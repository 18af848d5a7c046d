#include "hessianlab/pde/rescale.hpp"

#include <cmath>

#include "hessianlab/cone.hpp"
#include "hessianlab/pde/linalg.hpp"

namespace hessianlab::pde {

Surrogate quadratic_surrogate(int n, int k) {
  Surrogate s;
  s.n = n;
  s.k = k;
  s.name = "quadratic";
  const double a = std::pow(binom(n, k), -1.0 / double(k));
  s.growth_c = 0.25 * a;  // comfortably below the true coefficient a/2
  s.growth_b = 1.0;
  s.growth_r0 = 1.0;
  s.value = [a](const VectorXd& x) { return 0.5 * a * x.squaredNorm(); };
  s.hessian = [a, n](const VectorXd&) {
    return MatrixXd(a * MatrixXd::Identity(n, n));
  };
  return s;
}

Surrogate bump_surrogate(int n, int k, double eps) {
  Surrogate s = quadratic_surrogate(n, k);
  const double a = std::pow(binom(n, k), -1.0 / double(k));
  if (!(eps < a)) throw Error("bump_surrogate: eps must stay below the quadratic coefficient");
  s.name = "bump(eps=" + std::to_string(eps) + ")";
  s.value = [a, eps](const VectorXd& x) {
    return 0.5 * a * x.squaredNorm() + eps * std::sin(x[0]);
  };
  s.hessian = [a, eps, n](const VectorXd& x) {
    MatrixXd H = a * MatrixXd::Identity(n, n);
    H(0, 0) -= eps * std::sin(x[0]);
    return H;
  };
  return s;
}

Surrogate growth_violating_surrogate(int n, int k) {
  Surrogate s;
  s.n = n;
  s.k = k;
  s.name = "growth-violating(|x|^{3/2})";
  s.growth_c = 0.05;
  s.growth_b = 1.0;
  s.growth_r0 = 1.0;
  s.value = [](const VectorXd& x) { return std::pow(x.norm(), 1.5); };
  s.hessian = [n](const VectorXd& x) {
    double r = std::max(x.norm(), 1e-8);
    VectorXd e = x / r;
    // radial profile phi(r) = r^{3/2}: phi'' along e, phi'/r transversally
    double d2 = 0.75 * std::pow(r, -0.5);
    double dr = 1.5 * std::pow(r, 0.5) / r;
    return MatrixXd(dr * MatrixXd::Identity(n, n) + (d2 - dr) * e * e.transpose());
  };
  return s;
}

namespace {

// axes, diagonal and a fixed skew direction: cheap cover of the sphere for
// the growth probe
std::vector<VectorXd> probe_directions(int n) {
  std::vector<VectorXd> dirs;
  for (int i = 0; i < n; ++i) dirs.push_back(VectorXd::Unit(n, i));
  dirs.push_back(VectorXd::Ones(n).normalized());
  VectorXd skew(n);
  for (int i = 0; i < n; ++i) skew[i] = 1.0 + 0.37 * double(i);
  dirs.push_back(skew.normalized());
  return dirs;
}

MatrixXd fd_hessian_of_rescaled(const Surrogate& u, double R, const VectorXd& y,
                                double h) {
  const int n = u.n;
  auto uR = [&](const VectorXd& z) { return (u.value(R * z) - R * R) / (R * R); };
  MatrixXd H(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) {
      double v;
      if (a == b) {
        VectorXd p = y, m = y;
        p[a] += h;
        m[a] -= h;
        v = (uR(p) - 2.0 * uR(y) + uR(m)) / (h * h);
      } else {
        VectorXd pp = y, pm = y, mp = y, mm = y;
        pp[a] += h; pp[b] += h;
        pm[a] += h; pm[b] -= h;
        mp[a] -= h; mp[b] += h;
        mm[a] -= h; mm[b] -= h;
        v = (uR(pp) - uR(pm) - uR(mp) + uR(mm)) / (4.0 * h * h);
      }
      H(a, b) = v;
      H(b, a) = v;
    }
  return H;
}

}  // namespace

RescaleReport rescale_family(const Surrogate& u, const std::vector<double>& radii,
                             double alpha, int pts_per_axis) {
  if (radii.empty()) throw Error("rescale_family: empty R list");
  if (u.n < 2 || u.n > 3) throw Error("rescale_family: surrogate dimension must be 2 or 3");
  RescaleReport rep;
  rep.alpha = alpha;

  // growth hypothesis: u(x) >= c|x|^2 - b for |x| >= r0, probed over four
  // decades of radius; a violation is the rejection certificate
  for (const VectorXd& dir : probe_directions(u.n)) {
    for (double r = u.growth_r0; r <= 1e4 * u.growth_r0; r *= 1.25) {
      VectorXd x = r * dir;
      double val = u.value(x);
      double bound = u.growth_c * r * r - u.growth_b;
      if (val < bound) {
        rep.rejection = GrowthCertificate{x, val, bound};
        return rep;
      }
    }
  }

  // sublevel sets are contained in |y| <= sqrt((1 + b)/c) for R >= 1
  const double rho = 1.05 * std::sqrt((1.0 + u.growth_b) / u.growth_c);

  for (double R : radii) {
    RescaleEntry e;
    e.R = R;
    auto uR = [&](const VectorXd& y) { return (u.value(R * y) - R * R) / (R * R); };

    // probe grid over the bounding cube
    const int P = pts_per_axis;
    const double step = 2.0 * rho / double(P - 1);
    VectorXd y(u.n);
    std::vector<int> idx(u.n, 0);
    bool done = false;
    while (!done) {
      for (int a = 0; a < u.n; ++a) y[a] = -rho + idx[a] * step;
      double v = uR(y);
      if (v < 0.0) {
        MatrixXd H = u.hessian(R * y);
        double nrm = spectral_norm_sym(H);
        double pog = std::pow(-v, alpha) * nrm;
        e.pogorelov = std::max(e.pogorelov, pog);
        if (v < -0.5) e.sup_hess = std::max(e.sup_hess, nrm);
      }
      int a = 0;
      while (a < u.n && ++idx[a] == P) idx[a++] = 0;
      done = (a == u.n);
    }

    // Hessian invariance at a handful of probes: the finite-difference
    // Hessian of u_R against the analytic D^2 u at the mapped point
    for (const VectorXd& dir : probe_directions(u.n)) {
      VectorXd yy = 0.5 * rho * dir;
      MatrixXd fd = fd_hessian_of_rescaled(u, R, yy, 1e-3);
      MatrixXd exact = u.hessian(R * yy);
      e.hess_invariance =
          std::max(e.hess_invariance, (fd - exact).cwiseAbs().maxCoeff());
    }
    rep.entries.push_back(e);
  }

  double mx = rep.entries[0].sup_hess, mn = rep.entries[0].sup_hess;
  for (const RescaleEntry& e : rep.entries) {
    mx = std::max(mx, e.sup_hess);
    mn = std::min(mn, e.sup_hess);
    rep.pogorelov_C = std::max(rep.pogorelov_C, e.pogorelov);
  }
  rep.spread = mx - mn;
  rep.bound = std::pow(2.0, alpha) * rep.pogorelov_C;
  return rep;
}

}  // namespace hessianlab::pde
