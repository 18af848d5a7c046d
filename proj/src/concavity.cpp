#include "hessianlab/concavity.hpp"

#include <algorithm>
#include <cmath>

#include "hessianlab/ddouble.hpp"
#include "hessianlab/fd.hpp"

namespace hessianlab {

std::string ineq_name(Ineq id) {
  switch (id) {
    case Ineq::main: return "main";
    case Ineq::weak: return "weak";
    case Ineq::lu: return "lu";
    case Ineq::rw: return "rw";
    case Ineq::conjecture15: return "conjecture15";
  }
  return "?";
}

Ineq ineq_from_name(const std::string& name) {
  if (name == "main") return Ineq::main;
  if (name == "weak") return Ineq::weak;
  if (name == "lu") return Ineq::lu;
  if (name == "rw") return Ineq::rw;
  if (name == "conjecture15") return Ineq::conjecture15;
  throw Error("unknown inequality id: " + name);
}

double gap_core_compensated(Ineq id, const VectorXd& lam_desc, const VectorXd& xi,
                            int k, const IneqParams& p) {
  VecX<DDouble> lam(lam_desc.size()), x(xi.size());
  for (int i = 0; i < int(lam_desc.size()); ++i) lam[i] = DDouble(lam_desc[i]);
  for (int i = 0; i < int(xi.size()); ++i) x[i] = DDouble(xi[i]);
  return to_double(gap_core<DDouble>(id, lam, x, k, p).gap);
}

namespace {

void require_sizes(const Spectrum& lambda, const VectorXd& xi) {
  if (xi.size() != lambda.n()) throw Error("gap: xi dimension mismatch");
  for (int i = 0; i < int(xi.size()); ++i)
    if (!std::isfinite(xi[i])) throw Error("gap: non-finite xi");
}

}  // namespace

GapReport evaluate_gap(Ineq id, const Spectrum& lambda, const VectorXd& xi, int k,
                       const IneqParams& p) {
  require_sizes(lambda, xi);
  const int n = lambda.n();
  if (k < 2 || k > n) throw Error("gap: k out of range");
  VectorXd table = sym_table(lambda.values());
  require_in_cone(table, k, "gap");

  GapReport rep;
  rep.inequality_id = ineq_name(id);
  rep.lambda = lambda;
  rep.xi = xi;
  rep.params = {{"K", p.K},         {"A", p.A},     {"delta0", p.delta0},
                {"epsilon", p.epsilon}, {"delta", p.delta},
                {"delta_prime", p.delta_prime},     {"l", double(p.l)},
                {"i", double(p.i)}, {"k", double(k)}};

  switch (id) {
    case Ineq::main:
    case Ineq::weak:
      if (lambda[0] <= 0.0) throw Error("gap: lambda_1 must be positive");
      if (lambda[n - 1] < -p.A) throw Error("gap: lambda_n below the -A floor");
      break;
    case Ineq::lu:
      if (p.l < 1 || p.l >= k) throw Error("lu_gap: need 1 <= l < k");
      if (lambda[0] <= 0.0) throw Error("gap: lambda_1 must be positive");
      rep.hypothesis_met = lambda[p.l - 1] >= p.delta * lambda[0] &&
                           lambda[p.l] <= p.delta_prime * lambda[0];
      if (!rep.hypothesis_met) rep.note = "hypothesis unmet";
      break;
    case Ineq::rw:
      if (p.i < 1 || p.i > n) throw Error("rw_gap: index i out of range");
      rep.hypothesis_met = lambda[p.i - 1] >= p.delta * lambda[0];
      if (!rep.hypothesis_met) rep.note = "hypothesis unmet";
      break;
    case Ineq::conjecture15:
      if (2 * k <= n) throw Error("conjecture15_gap: needs 2k > n");
      break;
  }

  SGap<double> v = gap_core<double>(id, lambda.values(), xi, k, p);
  rep.gap = v.gap;
  rep.scale = v.scale;
  return rep;
}

GapReport main_gap(const Spectrum& lambda, const VectorXd& xi, int k, double K,
                   double A, double delta0) {
  IneqParams p;
  p.K = K;
  p.A = A;
  p.delta0 = delta0;
  return evaluate_gap(Ineq::main, lambda, xi, k, p);
}

GapReport weak_gap(const Spectrum& lambda, const VectorXd& xi, int k, double K,
                   double A, double delta0) {
  IneqParams p;
  p.K = K;
  p.A = A;
  p.delta0 = delta0;
  return evaluate_gap(Ineq::weak, lambda, xi, k, p);
}

GapReport lu_gap(const Spectrum& lambda, const VectorXd& xi, int k, int l,
                 double epsilon, double delta, double delta_prime, double delta0) {
  IneqParams p;
  p.l = l;
  p.epsilon = epsilon;
  p.delta = delta;
  p.delta_prime = delta_prime;
  p.delta0 = delta0;
  return evaluate_gap(Ineq::lu, lambda, xi, k, p);
}

GapReport rw_gap(const Spectrum& kappa, const VectorXd& xi, int k, int i, double K,
                 double epsilon, double delta) {
  IneqParams p;
  p.i = i;
  p.K = K;
  p.epsilon = epsilon;
  p.delta = delta;
  return evaluate_gap(Ineq::rw, kappa, xi, k, p);
}

GapReport conjecture15_gap(const Spectrum& kappa, const VectorXd& xi, int k, double K) {
  IneqParams p;
  p.K = K;
  return evaluate_gap(Ineq::conjecture15, kappa, xi, k, p);
}

DefaultConstants default_constants(int k) {
  if (k < 2) throw Error("default_constants: k must be >= 2");
  double eps = 1.0 / double((k + 1) * (k + 1));
  return {1.0 / eps, std::min(1.0 / 15.0, 1.0 / double((k + 1) * (k + 3))), eps};
}

namespace {

// q_m of a sub-spectrum in double-double, used as the FD target
struct QuotientOnSub {
  int m;
  DDouble operator()(const VecX<DDouble>& sub) const {
    VecX<DDouble> t = sym_table_raw<DDouble>(sub);
    return t[m] / t[m - 1];
  }
};

VectorXd drop_indices(const VectorXd& v, std::span<const int> removed) {
  VectorXd out(v.size() - long(removed.size()));
  int idx = 0;
  for (int i = 0; i < int(v.size()); ++i) {
    bool skip = false;
    for (int j : removed)
      if (j == i) skip = true;
    if (!skip) out[idx++] = v[i];
  }
  return out;
}

double fd_quotient_dir2(const VectorXd& sub_lam, const VectorXd& sub_dir, int m) {
  // anisotropy handled by the direction itself; step relative to spectrum scale
  double h = 1e-4 * std::max(1.0, sub_lam.cwiseAbs().maxCoeff());
  double dn = sub_dir.norm();
  if (dn < 1e-300) return 0.0;
  VectorXd unit = sub_dir / dn;
  QuotientOnSub q{m};
  double val = fd_dir2_richardson_dd(q, sub_lam, unit, h);
  return val * dn * dn;
}

}  // namespace

IdentityResidual hs_q2_residual(const Spectrum& lambda, const VectorXd& xi,
                                std::span<const int> removed) {
  require_sizes(lambda, xi);
  const int n = lambda.n();
  if (int(removed.size()) > n - 2) throw Error("hs_q2_residual: sub-spectrum too small");
  VectorXd sub = drop_indices(lambda.values(), removed);
  VectorXd sxi = drop_indices(xi, removed);
  double s1 = sub.sum();
  if (s1 <= 0.0) throw Error("hs_q2_residual: degenerate sub-spectrum, sigma_1 <= 0");

  double lhs = -fd_quotient_dir2(sub, sxi, 2);
  double s1xi = sxi.sum();
  double rhs = 0.0;
  for (int i = 0; i < int(sub.size()); ++i) {
    double d = sxi[i] - sub[i] * s1xi / s1;
    rhs += d * d;
  }
  rhs /= s1;
  double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
  return {std::abs(lhs - rhs), lhs, rhs, scale};
}

ChainGap hs_qq2_gap(const Spectrum& lambda, const VectorXd& xi, int k) {
  require_sizes(lambda, xi);
  const int n = lambda.n();
  if (k < 2 || k > n - 1) throw Error("hs_qq2_gap: needs 2 <= k <= n-1");
  VectorXd table = sym_table(lambda.values());
  require_in_cone(table, k + 1, "hs_qq2_gap");

  double lhs = fd_quotient_dir2(lambda.values(), xi, k + 1);
  double rhs = 0.0;
  for (int i = 0; i < n; ++i) {
    const int rem[1] = {i};
    VectorXd sub = drop_indices(lambda.values(), std::span<const int>(rem, 1));
    VectorXd sxi = drop_indices(xi, std::span<const int>(rem, 1));
    // q_{k;i} + lambda_i = sigma_k / sigma_{k-1}(lambda|i)
    double denom = table[k] / deleted_sym(lambda, {i}, k - 1);
    if (std::abs(denom) < 1e-300)
      throw Error("hs_qq2_gap: vanishing q_{k;i} + lambda_i");
    double d2 = fd_quotient_dir2(sub, sxi, k);
    rhs += lambda[i] * lambda[i] * d2 / (double(k + 1) * denom * denom);
  }
  double scale = std::max(std::abs(lhs) + std::abs(rhs), 1e-300);
  return {rhs - lhs, lhs, rhs, scale};
}

double quotient_chain_rhs(const Spectrum& lambda, const VectorXd& gamma, int k) {
  const int n = lambda.n();
  double total = 0.0;
  for (int j = 1; j <= k - 1; ++j) {
    std::vector<int> removed;
    double coeff = 1.0;
    for (int i = 1; i <= k - 1; ++i) {
      if (i == j) continue;
      removed.push_back(i - 1);
      coeff *= lambda[i - 1];
    }
    VectorXd gsub = drop_indices(gamma, removed);
    VectorXd lsub = drop_indices(lambda.values(), removed);
    double l2 = lsub.squaredNorm();
    VectorXd perp = gsub - (gsub.dot(lsub) / l2) * lsub;
    total += coeff * perp.squaredNorm();
  }
  (void)n;
  return total;
}

ChainGap quotient_chain_gap(const Spectrum& lambda, const VectorXd& gamma, int k,
                            double C_fit) {
  require_sizes(lambda, gamma);
  if (k < 2 || k > lambda.n()) throw Error("quotient_chain_gap: k out of range");
  VectorXd table = sym_table(lambda.values());
  require_in_cone(table, k, "quotient_chain_gap");

  QuotientDerivatives qd = quotient_derivatives(lambda, k);
  double lhs = -table[k - 1] * gamma.dot(qd.hessian * gamma);
  double rhs = C_fit * quotient_chain_rhs(lambda, gamma, k);
  double scale = std::max(std::abs(lhs) + std::abs(rhs), 1e-300);
  return {lhs - rhs, lhs, rhs, scale};
}

VectorXd decomposition_project(const Spectrum& lambda, const VectorXd& gamma, int k) {
  const int n = lambda.n();
  VectorXd g = gamma;
  g[0] = 0.0;
  VectorXd ltail = lambda.values().tail(n - k + 1);
  double l2 = ltail.squaredNorm();
  if (l2 > 0.0) {
    VectorXd gtail = g.tail(n - k + 1);
    g.tail(n - k + 1) = gtail - (gtail.dot(ltail) / l2) * ltail;
  }
  return g;
}

double decomposition_rhs(const Spectrum& lambda, const VectorXd& g, int k) {
  const int n = lambda.n();
  double head_prod = 1.0;
  for (int i = 1; i <= k - 1; ++i) head_prod *= lambda[i - 1];
  double lk = lambda[k - 1];
  double sum1 = 0.0;
  for (int j = 1; j <= k - 1; ++j)
    sum1 += head_prod * lk * lk * g[j - 1] * g[j - 1] /
            (lambda[j - 1] * lambda[j - 1] * lambda[j - 1]);
  double prod2 = 1.0;
  for (int i = 1; i <= k - 2; ++i) prod2 *= lambda[i - 1];
  double sum2 = 0.0;
  for (int pidx = k; pidx <= n; ++pidx) sum2 += g[pidx - 1] * g[pidx - 1];
  return sum1 + prod2 * sum2;
}

ChainGap decomposition_gap(const Spectrum& lambda, const VectorXd& gamma, int k,
                           double A, double C_fit) {
  require_sizes(lambda, gamma);
  if (k < 2 || k > lambda.n()) throw Error("decomposition_gap: k out of range");
  VectorXd table = sym_table(lambda.values());
  require_in_cone(table, k, "decomposition_gap");
  (void)A;  // recorded by callers; the constant absorbs the A-dependence

  VectorXd g = decomposition_project(lambda, gamma, k);
  ChainGap out;
  if (g.norm() < 1e-14 * std::max(1.0, gamma.norm())) {
    out.vacuous = true;
    out.gap = out.lhs = out.rhs = 0.0;
    out.scale = 1e-300;
    return out;
  }
  QuotientDerivatives qd = quotient_derivatives(lambda, k);
  out.lhs = -table[k - 1] * g.dot(qd.hessian * g);
  out.rhs = C_fit * decomposition_rhs(lambda, g, k);
  out.gap = out.lhs - out.rhs;
  out.scale = std::max(std::abs(out.lhs) + std::abs(out.rhs), 1e-300);
  return out;
}

}  // namespace hessianlab
