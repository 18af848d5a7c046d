// Signed gaps (LHS - RHS) of the concavity inequalities and identities:
// the semiconvex main inequality, its weak variant, Lu's inequality, the
// Ren-Wang form, the 2k > n conjecture, the Huisken-Sinestrari quotient
// identities and the quotient-chain decompositions.
//
// Every gap is homogeneous of degree 2 in the direction, and at fixed
// spectrum each is a quadratic form in xi.  The cores are templated on the
// scalar so that reported counterexamples can be re-verified in
// double-double arithmetic.
#pragma once

#include <map>
#include <string>

#include "hessianlab/spectrum.hpp"
#include "hessianlab/symfun.hpp"
#include "hessianlab/types.hpp"

namespace hessianlab {

enum class Ineq { main, weak, lu, rw, conjecture15 };

std::string ineq_name(Ineq id);
Ineq ineq_from_name(const std::string& name);

struct IneqParams {
  double K = 0.0;
  double A = 0.0;
  double delta0 = 0.0;
  double epsilon = 0.0;
  double delta = 0.0;
  double delta_prime = 0.0;
  int l = 1;  // Lu split index, 1 <= l < k
  int i = 1;  // Ren-Wang distinguished index, 1-based
};

struct GapReport {
  std::string inequality_id;
  Spectrum lambda = Spectrum(VectorXd::Zero(2));
  VectorXd xi;
  std::map<std::string, double> params;
  double gap = 0.0;
  double scale = 1.0;           // magnitude used to normalize tolerances
  bool hypothesis_met = true;   // lu / rw stratum predicate (recorded, not enforced)
  std::string note;
};

template <class S>
struct SGap {
  S gap;
  S scale;
};

// ---- templated core -------------------------------------------------------
// lam must be sorted descending.  No feasibility checks happen here; the
// report-building wrappers enforce the preconditions.
template <class S>
SGap<S> gap_core(Ineq id, const VecX<S>& lam, const VecX<S>& xi, int k,
                 const IneqParams& p) {
  const int n = int(lam.size());
  VecX<S> table = sym_table_raw<S>(lam);
  VecX<S> g = grad_sigma_raw<S>(lam, k);
  MatX<S> h = hess_sigma_raw<S>(lam, k);
  const S sk = table[k];

  S quad(0.0);  // sum_{p != q} sigma_k^{pp,qq} xi_p xi_q
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) quad += h(a, b) * xi[a] * xi[b];
  S contr(0.0);  // sum_i sigma_k^{ii} xi_i
  for (int a = 0; a < n; ++a) contr += g[a] * xi[a];

  auto abs_ = [](S v) { return v < S(0.0) ? -v : v; };
  SGap<S> out{S(0.0), S(0.0)};

  switch (id) {
    case Ineq::main:
    case Ineq::weak: {
      S t1 = -quad / sk;
      S t2 = S(p.K) * contr * contr / (sk * sk);
      S t3(0.0);
      for (int a = 1; a < n; ++a) t3 += g[a] * xi[a] * xi[a];
      t3 = S(2.0) * t3 / ((lam[0] + S(p.A) + S(1.0)) * sk);
      S rhs = (id == Ineq::main)
                  ? S(1.0 + p.delta0) * g[0] * xi[0] * xi[0] / (lam[0] * sk)
                  : S(1.0 + p.delta0) * xi[0] * xi[0] / (lam[0] * lam[0]);
      out.gap = t1 + t2 + t3 - rhs;
      out.scale = abs_(t1) + abs_(t2) + abs_(t3) + abs_(rhs);
      break;
    }
    case Ineq::lu: {
      S t1 = -quad / sk;
      S t2 = contr * contr / (sk * sk);
      S r1 = S(1.0 - p.epsilon) * xi[0] * xi[0] / (lam[0] * lam[0]);
      S r2(0.0);
      for (int a = p.l; a < n; ++a) r2 += g[a] * xi[a] * xi[a];
      r2 = S(p.delta0) * r2 / (lam[0] * sk);
      out.gap = t1 + t2 - (r1 - r2);
      out.scale = abs_(t1) + abs_(t2) + abs_(r1) + abs_(r2);
      break;
    }
    case Ineq::rw: {
      const int i = p.i - 1;
      S t1 = lam[i] * (S(p.K) * contr * contr - quad);
      S t2 = g[i] * xi[i] * xi[i];
      S t3(0.0);
      for (int a = 0; a < n; ++a)
        if (a != i) t3 += g[a] * xi[a] * xi[a];
      t3 = S(1.0 + p.epsilon) * t3;
      out.gap = t1 - t2 + t3;
      out.scale = abs_(t1) + abs_(t2) + abs_(t3);
      break;
    }
    case Ineq::conjecture15: {
      S t1 = lam[0] * (S(p.K) * contr * contr - quad);
      S t2 = g[0] * xi[0] * xi[0];
      S t3(0.0);
      for (int a = 0; a < n; ++a) {
        S coeff = g[a] + (lam[0] + lam[a]) * h(0, a);
        t3 += coeff * xi[a] * xi[a];
      }
      out.gap = t1 - t2 + t3;
      out.scale = abs_(t1) + abs_(t2) + abs_(t3);
      break;
    }
  }
  if (out.scale < S(1e-300)) out.scale = S(1e-300);
  return out;
}

// re-evaluates the same core in double-double and returns the rounded gap
double gap_core_compensated(Ineq id, const VectorXd& lam_desc, const VectorXd& xi,
                            int k, const IneqParams& p);

// ---- report-building wrappers (preconditions enforced) --------------------

GapReport evaluate_gap(Ineq id, const Spectrum& lambda, const VectorXd& xi, int k,
                       const IneqParams& p);

GapReport main_gap(const Spectrum& lambda, const VectorXd& xi, int k, double K,
                   double A, double delta0);
GapReport weak_gap(const Spectrum& lambda, const VectorXd& xi, int k, double K,
                   double A, double delta0);
GapReport lu_gap(const Spectrum& lambda, const VectorXd& xi, int k, int l,
                 double epsilon, double delta, double delta_prime, double delta0);
GapReport rw_gap(const Spectrum& kappa, const VectorXd& xi, int k, int i, double K,
                 double epsilon, double delta);
GapReport conjecture15_gap(const Spectrum& kappa, const VectorXd& xi, int k, double K);

struct DefaultConstants {
  double K;
  double delta0;
  double epsilon;
};

// the proof's explicit choices: eps = 1/(k+1)^2, K = 1/eps,
// delta0 = min(1/15, 1/((k+1)(k+3)))
DefaultConstants default_constants(int k);

// ---- quotient identities and chains ----------------------------------------

struct IdentityResidual {
  double residual;  // |lhs - rhs|
  double lhs;
  double rhs;
  double scale;  // max(|lhs|, |rhs|, 1e-300)
};

// Huisken-Sinestrari exact identity for q_2 on a deleted sub-spectrum: the
// finite-difference Hessian of q_2 against the explicit sum of squares.
IdentityResidual hs_q2_residual(const Spectrum& lambda, const VectorXd& xi,
                                std::span<const int> removed);

struct ChainGap {
  double gap;
  double lhs;
  double rhs;    // already includes the fitted constant where applicable
  double scale;  // |lhs| + |rhs|
  bool vacuous = false;
};

// recursion step (qq2): RHS - LHS of
//   d^2_xi q_{k+1} <= sum_i lambda_i^2 d^2_xi q_{k;i} / ((k+1)(q_{k;i}+lambda_i)^2)
ChainGap hs_qq2_gap(const Spectrum& lambda, const VectorXd& xi, int k);

// -sigma_{k-1} d^2_gamma q_k >= C sum_j lambda_1...^lambda_j...lambda_{k-1}
//                                 |[gamma]perp_{1..j^..k-1}|^2
ChainGap quotient_chain_gap(const Spectrum& lambda, const VectorXd& gamma, int k,
                            double C_fit);

// raw RHS sum of the quotient chain (C = 1), exposed for constant fitting
double quotient_chain_rhs(const Spectrum& lambda, const VectorXd& gamma, int k);

// head/tail decomposition bound: gamma_1 = 0 and the tail projected perpendicular
// to (lambda_k..lambda_n) before evaluation
ChainGap decomposition_gap(const Spectrum& lambda, const VectorXd& gamma, int k,
                           double A, double C_fit);
double decomposition_rhs(const Spectrum& lambda, const VectorXd& gamma_projected,
                         int k);
// applies the gamma_1 = 0 and tail-perpendicularity normalization
VectorXd decomposition_project(const Spectrum& lambda, const VectorXd& gamma, int k);

}  // namespace hessianlab
