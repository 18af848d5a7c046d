// Finite-difference derivative helpers.  The Richardson variants combine
// two central-difference step sizes, killing the h^2 truncation term; the
// double-double variants evaluate the stencil in extended precision so the
// cancellation floor sits far below the identity tolerances they back.
#pragma once

#include <algorithm>
#include <cmath>

#include "hessianlab/ddouble.hpp"
#include "hessianlab/types.hpp"

namespace hessianlab {

// central second difference along a direction, Richardson over h and h/2
template <class F>
double fd_dir2_richardson(F&& f, const VectorXd& x, const VectorXd& dir, double h) {
  auto second = [&](double hh) {
    return (f(x + hh * dir) - 2.0 * f(x) + f(x - hh * dir)) / (hh * hh);
  };
  double d1 = second(h);
  double d2 = second(0.5 * h);
  return (4.0 * d2 - d1) / 3.0;
}

// same stencil evaluated in double-double; f maps VecX<DDouble> -> DDouble
template <class F>
double fd_dir2_richardson_dd(F&& f, const VectorXd& x, const VectorXd& dir, double h) {
  VecX<DDouble> xd(x.size()), dd(dir.size());
  for (int i = 0; i < int(x.size()); ++i) {
    xd[i] = DDouble(x[i]);
    dd[i] = DDouble(dir[i]);
  }
  auto second = [&](double hh) {
    DDouble hs(hh);
    VecX<DDouble> xp = xd, xm = xd;
    for (int i = 0; i < int(x.size()); ++i) {
      xp[i] += hs * dd[i];
      xm[i] -= hs * dd[i];
    }
    DDouble num = f(xp) - DDouble(2.0) * f(xd) + f(xm);
    return num / (hs * hs);
  };
  DDouble d1 = second(h);
  DDouble d2 = second(0.5 * h);
  return to_double((DDouble(4.0) * d2 - d1) / DDouble(3.0));
}

// Full Hessian by central differences with per-coordinate steps
// h_i = hrel * max(|x_i|, 0.001 * scale), Richardson over two step sizes,
// stencil evaluated in double-double.  Anisotropic steps keep the truncation
// error controlled when the spectrum spans several decades.
template <class F>
MatrixXd fd_hessian_richardson_dd(F&& f, const VectorXd& x, double hrel = 1e-4) {
  const int n = int(x.size());
  const double scale = std::max(1.0, x.cwiseAbs().maxCoeff());
  VectorXd hs(n);
  for (int i = 0; i < n; ++i) hs[i] = hrel * std::max(std::abs(x[i]), 1e-3 * scale);

  VecX<DDouble> xd(n);
  for (int i = 0; i < n; ++i) xd[i] = DDouble(x[i]);

  auto eval_pq = [&](int p, int q, double c) -> DDouble {
    DDouble hp(hs[p] * c), hq(hs[q] * c);
    if (p == q) {
      VecX<DDouble> xp = xd, xm = xd;
      xp[p] += hp;
      xm[p] -= hp;
      return (f(xp) - DDouble(2.0) * f(xd) + f(xm)) / (hp * hp);
    }
    VecX<DDouble> a = xd, b = xd, cc = xd, d = xd;
    a[p] += hp;
    a[q] += hq;
    b[p] += hp;
    b[q] -= hq;
    cc[p] -= hp;
    cc[q] += hq;
    d[p] -= hp;
    d[q] -= hq;
    return (f(a) - f(b) - f(cc) + f(d)) / (DDouble(4.0) * hp * hq);
  };

  MatrixXd out(n, n);
  for (int p = 0; p < n; ++p)
    for (int q = p; q < n; ++q) {
      DDouble d1 = eval_pq(p, q, 1.0);
      DDouble d2 = eval_pq(p, q, 0.5);
      double v = to_double((DDouble(4.0) * d2 - d1) / DDouble(3.0));
      out(p, q) = v;
      out(q, p) = v;
    }
  return out;
}

// plain double-precision gradient / Hessian with the module-default uniform
// step h = max(1, |lambda|_inf) * 1e-5; adequate for the polynomial sigma_k
template <class F>
VectorXd fd_gradient(F&& f, const VectorXd& x, double h) {
  const int n = int(x.size());
  VectorXd g(n);
  for (int i = 0; i < n; ++i) {
    VectorXd xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    g[i] = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

template <class F>
MatrixXd fd_hessian(F&& f, const VectorXd& x, double h) {
  const int n = int(x.size());
  MatrixXd out(n, n);
  for (int p = 0; p < n; ++p)
    for (int q = p; q < n; ++q) {
      double v;
      if (p == q) {
        VectorXd xp = x, xm = x;
        xp[p] += h;
        xm[p] -= h;
        v = (f(xp) - 2.0 * f(x) + f(xm)) / (h * h);
      } else {
        VectorXd a = x, b = x, c = x, d = x;
        a[p] += h;
        a[q] += h;
        b[p] += h;
        b[q] -= h;
        c[p] -= h;
        c[q] += h;
        d[p] -= h;
        d[q] -= h;
        v = (f(a) - f(b) - f(c) + f(d)) / (4.0 * h * h);
      }
      out(p, q) = v;
      out(q, p) = v;
    }
  return out;
}

// uniform-step central-difference Hessian with the stencil evaluated in
// double-double; removes the rounding floor that dominates the plain-double
// version on wide spectra
template <class F>
MatrixXd fd_hessian_dd(F&& f, const VectorXd& x, double h) {
  const int n = int(x.size());
  VecX<DDouble> xd(n);
  for (int i = 0; i < n; ++i) xd[i] = DDouble(x[i]);
  DDouble hd(h);
  MatrixXd out(n, n);
  for (int p = 0; p < n; ++p)
    for (int q = p; q < n; ++q) {
      DDouble v;
      if (p == q) {
        VecX<DDouble> a = xd, b = xd;
        a[p] += hd;
        b[p] -= hd;
        v = (f(a) - DDouble(2.0) * f(xd) + f(b)) / (hd * hd);
      } else {
        VecX<DDouble> pp = xd, pm = xd, mp = xd, mm = xd;
        pp[p] += hd;
        pp[q] += hd;
        pm[p] += hd;
        pm[q] -= hd;
        mp[p] -= hd;
        mp[q] += hd;
        mm[p] -= hd;
        mm[q] -= hd;
        v = (f(pp) - f(pm) - f(mp) + f(mm)) / (DDouble(4.0) * hd * hd);
      }
      out(p, q) = to_double(v);
      out(q, p) = out(p, q);
    }
  return out;
}

inline double fd_default_step(const VectorXd& lam) {
  return std::max(1.0, lam.cwiseAbs().maxCoeff()) * 1e-5;
}

}  // namespace hessianlab
