#include "hessianlab/pde/radial.hpp"

#include <cmath>

#include "hessianlab/cone.hpp"
#include "hessianlab/symfun.hpp"

namespace hessianlab::pde {

namespace {

// 5-point Gauss-Legendre on [a, b]
template <class F>
double gauss5(F&& f, double a, double b) {
  static const double xs[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                               0.5384693101056831, 0.9061798459386640};
  static const double ws[5] = {0.2369268850561891, 0.4786286704993665,
                               0.5688888888888889, 0.4786286704993665,
                               0.2369268850561891};
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double acc = 0.0;
  for (int i = 0; i < 5; ++i) acc += ws[i] * f(mid + half * xs[i]);
  return acc * half;
}

struct MomentIntegral {
  // cumulative nodal values of I(r) = int_0^r s^{n-1} f(s) ds plus local
  // completion, so I can be evaluated at arbitrary points
  VectorXd nodes;
  VectorXd at_node;
  int n;
  const RadialF* f;

  double operator()(double r) const {
    const int m = int(nodes.size());
    const double h = nodes[1] - nodes[0];
    int i = std::min(m - 1, std::max(0, int(std::floor(r / h))));
    auto g = [&](double s) { return std::pow(s, n - 1) * (*f)(s); };
    return at_node[i] + gauss5(g, nodes[i], r);
  }
};

}  // namespace

RadialProfile radial_closed_form(int n, int k, double R, int nodes) {
  if (n < 2 || k < 1 || k > n) throw Error("radial_closed_form: bad (n,k)");
  if (nodes < 2 || R <= 0.0) throw Error("radial_closed_form: bad grid");
  const double a = std::pow(binom(n, k), -1.0 / double(k));
  RadialProfile p;
  p.n = n;
  p.k = k;
  p.R = R;
  p.r.setLinSpaced(nodes, 0.0, R);
  p.u.resize(nodes);
  p.du.resize(nodes);
  p.d2u.resize(nodes);
  for (int i = 0; i < nodes; ++i) {
    p.u[i] = 0.5 * a * (p.r[i] * p.r[i] - R * R);
    p.du[i] = a * p.r[i];
    p.d2u[i] = a;
  }
  p.u[nodes - 1] = 0.0;  // exact boundary value
  return p;
}

RadialProfile radial_solve(int n, int k, double R, const RadialF& f, int nodes) {
  if (n < 2 || k < 1 || k > n) throw Error("radial_solve: bad (n,k)");
  if (nodes < 3 || R <= 0.0) throw Error("radial_solve: bad grid");

  RadialProfile p;
  p.n = n;
  p.k = k;
  p.R = R;
  p.r.setLinSpaced(nodes, 0.0, R);

  auto fchecked = [&](double s) {
    double v = f(s);
    if (!(v > 0.0))
      throw Error("radial_solve: f <= 0 at r=" + std::to_string(s) +
                  ", ellipticity lost");
    return v;
  };

  MomentIntegral I;
  I.n = n;
  I.f = &f;
  I.nodes = p.r;
  I.at_node.resize(nodes);
  I.at_node[0] = 0.0;
  auto g = [&](double s) { return std::pow(s, n - 1) * fchecked(s); };
  for (int i = 1; i < nodes; ++i)
    I.at_node[i] = I.at_node[i - 1] + gauss5(g, p.r[i - 1], p.r[i]);

  const double cnk1 = binom(n - 1, k - 1);
  auto du_at = [&](double r) {
    if (r <= 0.0) return 0.0;
    double val = double(k) / cnk1 * std::pow(r, double(k - n)) * I(r);
    return std::pow(std::max(val, 0.0), 1.0 / double(k));
  };

  p.du.resize(nodes);
  for (int i = 0; i < nodes; ++i) p.du[i] = du_at(p.r[i]);
  p.du[0] = 0.0;

  // integrate u inward from u(R) = 0
  p.u.resize(nodes);
  p.u[nodes - 1] = 0.0;
  for (int i = nodes - 2; i >= 0; --i)
    p.u[i] = p.u[i + 1] - gauss5(du_at, p.r[i], p.r[i + 1]);

  // u'' from the equation; removable singularity at the origin
  const double cnk = binom(n - 1, k);
  p.d2u.resize(nodes);
  p.d2u[0] = std::pow(fchecked(0.0) / binom(n, k), 1.0 / double(k));
  for (int i = 1; i < nodes; ++i) {
    double q = p.du[i] / p.r[i];
    double denom = cnk1 * std::pow(q, double(k - 1));
    p.d2u[i] = (fchecked(p.r[i]) - cnk * std::pow(q, double(k))) / denom;
  }
  return p;
}

Spectrum radial_spectrum(const RadialProfile& p, int i) {
  VectorXd lam(p.n);
  double ratio = (i == 0) ? p.d2u[0] : p.du[i] / p.r[i];
  lam[0] = p.d2u[i];
  for (int j = 1; j < p.n; ++j) lam[j] = ratio;
  return Spectrum(lam);
}

bool radial_admissible(const RadialProfile& p) {
  for (int i = 0; i < int(p.r.size()); ++i)
    if (!in_cone(radial_spectrum(p, i), p.k).inside) return false;
  return true;
}

double radial_residual(const RadialProfile& p, const RadialF& f) {
  double worst = 0.0;
  for (int i = 0; i < int(p.r.size()); ++i) {
    VectorXd table = sym_table(radial_spectrum(p, i).values());
    double fv = f(p.r[i]);
    worst = std::max(worst, std::abs(table[p.k] - fv) / std::max(1.0, std::abs(fv)));
  }
  return worst;
}

double radial_fd_residual(const RadialProfile& p, const RadialF& f) {
  const int m = int(p.r.size());
  const double h = p.r[1] - p.r[0];
  double worst = 0.0;
  // Richardson second/first differences on the nodal u away from the ends
  for (int i = 2; i + 2 < m; ++i) {
    double d2_h = (p.u[i + 1] - 2.0 * p.u[i] + p.u[i - 1]) / (h * h);
    double d2_2h = (p.u[i + 2] - 2.0 * p.u[i] + p.u[i - 2]) / (4.0 * h * h);
    double d2 = (4.0 * d2_h - d2_2h) / 3.0;
    double d1_h = (p.u[i + 1] - p.u[i - 1]) / (2.0 * h);
    double d1_2h = (p.u[i + 2] - p.u[i - 2]) / (4.0 * h);
    double d1 = (4.0 * d1_h - d1_2h) / 3.0;
    VectorXd lam(p.n);
    lam[0] = d2;
    for (int j = 1; j < p.n; ++j) lam[j] = d1 / p.r[i];
    VectorXd table = sym_table(lam);
    double fv = f(p.r[i]);
    worst = std::max(worst, std::abs(table[p.k] - fv) / std::max(1.0, std::abs(fv)));
  }
  return worst;
}

PogorelovDiagnostic pogorelov_diagnostic(const RadialProfile& p, double alpha) {
  PogorelovDiagnostic d;
  d.alpha = alpha;
  for (int i = 0; i + 1 < int(p.r.size()); ++i) {  // interior: u(R)=0 contributes 0
    double ratio = (i == 0) ? p.d2u[0] : p.du[i] / p.r[i];
    double lam_max = std::max(p.d2u[i], ratio);
    double v = std::pow(std::max(0.0, -p.u[i]), alpha) * lam_max;
    if (v > d.value) {
      d.value = v;
      d.node = i;
    }
  }
  return d;
}

}  // namespace hessianlab::pde
