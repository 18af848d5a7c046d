// Elementary symmetric polynomials on eigenvalue spectra: full tables,
// deleted variants, first/second eigenvalue derivatives and the quotients
// q_k = sigma_k / sigma_{k-1} with closed-form gradient and Hessian.
#pragma once

#include <span>
#include <vector>

#include "hessianlab/ddouble.hpp"
#include "hessianlab/spectrum.hpp"
#include "hessianlab/types.hpp"

namespace hessianlab {

// sigma_0..sigma_n as the coefficients of prod_i (t + lambda_i), built by the
// O(n^2) coefficient recurrence.  Exact for integer inputs at desk scale.
template <class Scalar>
VecX<Scalar> sym_table_raw(const VecX<Scalar>& lam) {
  const int n = int(lam.size());
  VecX<Scalar> e = VecX<Scalar>::Zero(n + 1);
  e[0] = Scalar(1);
  for (int i = 0; i < n; ++i)
    for (int m = std::min(i + 1, n); m >= 1; --m) e[m] += lam[i] * e[m - 1];
  return e;
}

namespace detail {

inline VecX<DDouble> to_dd(const VectorXd& v) {
  VecX<DDouble> out(v.size());
  for (int i = 0; i < int(v.size()); ++i) out[i] = DDouble(v[i]);
  return out;
}

}  // namespace detail

// Double-precision table with a cancellation guard: whenever mixed signs
// leave |sigma_m| below 1e-12 * (sum |lambda_i|)^m the whole table is
// recomputed in double-double and rounded back.
inline VectorXd sym_table(const VectorXd& lam) {
  const int n = int(lam.size());
  VectorXd e = sym_table_raw<double>(lam);
  const double amax = lam.cwiseAbs().sum();
  double pw = 1.0;
  for (int m = 1; m <= n; ++m) {
    pw *= amax;
    if (!std::isfinite(e[m]))
      throw Error("sym_table: overflow at m=" + std::to_string(m));
    if (std::abs(e[m]) < 1e-12 * pw) {
      VecX<DDouble> ed = sym_table_raw<DDouble>(detail::to_dd(lam));
      for (int j = 0; j <= n; ++j) e[j] = to_double(ed[j]);
      break;
    }
  }
  return e;
}

struct SymTable {
  VectorXd sigma;   // sigma_0..sigma_n
  Spectrum source;  // the canonicalized spectrum evaluated
};

inline SymTable elem_sym_all(const Spectrum& lambda) {
  return {sym_table(lambda.values()), lambda};
}

// smallest j in 1..k with sigma_j <= 0, or 0 if lambda is in Gamma_k
inline int first_cone_failure(const VectorXd& sigma_table, int k) {
  for (int j = 1; j <= k; ++j)
    if (sigma_table[j] <= 0.0) return j;
  return 0;
}

inline void require_in_cone(const VectorXd& sigma_table, int k, const char* who) {
  int j = first_cone_failure(sigma_table, k);
  if (j != 0)
    throw ConeViolation(j, std::string(who) + ": spectrum outside Gamma_" +
                               std::to_string(k) + ", first failing sigma_j at j=" +
                               std::to_string(j));
}

// sigma_m of the spectrum with the listed indices removed.
// sigma_m(lambda|i) = d(sigma_{m+1})/d(lambda_i).
template <class Scalar>
Scalar deleted_sym_raw(const VecX<Scalar>& lam, std::span<const int> removed, int m) {
  const int n = int(lam.size());
  const int r = int(removed.size());
  if (m < 0 || m > n - r) return Scalar(0);
  VecX<Scalar> sub(n - r);
  int idx = 0;
  for (int i = 0; i < n; ++i) {
    bool skip = false;
    for (int j : removed)
      if (j == i) {
        skip = true;
        break;
      }
    if (!skip) sub[idx++] = lam[i];
  }
  return sym_table_raw<Scalar>(sub)[m];
}

inline double deleted_sym(const Spectrum& lambda, std::span<const int> removed, int m) {
  const int n = lambda.n();
  if (int(removed.size()) > n - 1) throw Error("deleted_sym: too many removed indices");
  for (int j : removed)
    if (j < 0 || j >= n) throw Error("deleted_sym: index out of range");
  if (m < 0 || m > n - int(removed.size()))
    throw Error("deleted_sym: order m out of range");
  VectorXd sub(n - int(removed.size()));
  int idx = 0;
  for (int i = 0; i < n; ++i) {
    bool skip = false;
    for (int j : removed)
      if (j == i) skip = true;
    if (!skip) sub[idx++] = lambda[i];
  }
  return sym_table(sub)[m];
}

inline double deleted_sym(const Spectrum& lambda, std::initializer_list<int> removed, int m) {
  return deleted_sym(lambda, std::span<const int>(removed.begin(), removed.size()), m);
}

// gradient of sigma_k: component i equals sigma_{k-1}(lambda|i)
template <class Scalar>
VecX<Scalar> grad_sigma_raw(const VecX<Scalar>& lam, int k) {
  const int n = int(lam.size());
  VecX<Scalar> g(n);
  for (int i = 0; i < n; ++i) {
    const int rem[1] = {i};
    g[i] = deleted_sym_raw<Scalar>(lam, rem, k - 1);
  }
  return g;
}

inline VectorXd grad_sigma(const Spectrum& lambda, int k) {
  if (k < 1 || k > lambda.n()) throw Error("grad_sigma: k out of range");
  const int n = lambda.n();
  VectorXd g(n);
  for (int i = 0; i < n; ++i) g[i] = deleted_sym(lambda, {i}, k - 1);
  return g;
}

// Hessian of sigma_k: off-diagonal (p,q) entry sigma_{k-2}(lambda|p,q),
// diagonal exactly zero.
template <class Scalar>
MatX<Scalar> hess_sigma_raw(const VecX<Scalar>& lam, int k) {
  const int n = int(lam.size());
  MatX<Scalar> h = MatX<Scalar>::Zero(n, n);
  for (int p = 0; p < n; ++p)
    for (int q = p + 1; q < n; ++q) {
      const int rem[2] = {p, q};
      Scalar v = deleted_sym_raw<Scalar>(lam, rem, k - 2);
      h(p, q) = v;
      h(q, p) = v;
    }
  return h;
}

inline MatrixXd hess_sigma(const Spectrum& lambda, int k) {
  if (k < 1 || k > lambda.n()) throw Error("hess_sigma: k out of range");
  const int n = lambda.n();
  MatrixXd h = MatrixXd::Zero(n, n);
  for (int p = 0; p < n; ++p)
    for (int q = p + 1; q < n; ++q) {
      double v = deleted_sym(lambda, {p, q}, k - 2);
      h(p, q) = v;
      h(q, p) = v;
    }
  return h;
}

template <class Scalar>
Scalar quotient_raw(const VecX<Scalar>& lam, int k) {
  VecX<Scalar> t = sym_table_raw<Scalar>(lam);
  return t[k] / t[k - 1];
}

struct QuotientDerivatives {
  double value;       // q_k = sigma_k / sigma_{k-1}
  VectorXd gradient;  // dq_k / dlambda_p
  MatrixXd hessian;   // d^2 q_k / dlambda_p dlambda_q, symmetric, NSD on Gamma_k
};

// Closed-form first and second derivatives of q_k.  The Hessian entry is
//   q_k * [ s"_k/s_k - (s'_k s'_{k-1} + sym)/(s_k s_{k-1})
//           - s"_{k-1}/s_{k-1} + 2 s'_{k-1} s'_{k-1}/s_{k-1}^2 ].
inline QuotientDerivatives quotient_derivatives(const Spectrum& lambda, int k) {
  if (k < 1 || k > lambda.n()) throw Error("quotient_derivatives: k out of range");
  const int n = lambda.n();
  VectorXd table = sym_table(lambda.values());
  require_in_cone(table, k, "quotient_derivatives");
  const double sk = table[k], sk1 = table[k - 1];

  VectorXd gk = grad_sigma(lambda, k);
  VectorXd gk1 = (k >= 2) ? grad_sigma(lambda, k - 1) : VectorXd::Zero(n);  // sigma_0 = 1
  MatrixXd hk = (k >= 2) ? hess_sigma(lambda, k) : MatrixXd::Zero(n, n);
  MatrixXd hk1 = (k >= 3) ? hess_sigma(lambda, k - 1) : MatrixXd::Zero(n, n);

  QuotientDerivatives out;
  out.value = sk / sk1;
  out.gradient = (gk * sk1 - sk * gk1) / (sk1 * sk1);
  out.hessian.resize(n, n);
  const double q = out.value;
  for (int p = 0; p < n; ++p)
    for (int r = p; r < n; ++r) {
      double v = q * (hk(p, r) / sk - gk[p] * gk1[r] / (sk * sk1) -
                      gk[r] * gk1[p] / (sk * sk1) - hk1(p, r) / sk1 +
                      2.0 * gk1[p] * gk1[r] / (sk1 * sk1));
      out.hessian(p, r) = v;
      out.hessian(r, p) = v;
    }
  return out;
}

struct LogSigmaForm {
  double quad_form;   // -d^2_xi log sigma_k, assembled by telescoping over q_i
  double grad_bound;  // sum_i (d_xi log q_i)^2, the chain's lower bound
};

// log sigma_k = log q_k + ... + log q_2 + log sigma_1, so the negative
// second derivative telescopes into per-quotient contributions.
inline LogSigmaForm log_sigma_k_quadratic_form(const Spectrum& lambda, int k,
                                               const VectorXd& xi) {
  if (k < 1 || k > lambda.n()) throw Error("log_sigma_k_quadratic_form: k out of range");
  if (xi.size() != lambda.n()) throw Error("log_sigma_k_quadratic_form: xi size");
  VectorXd table = sym_table(lambda.values());
  require_in_cone(table, k, "log_sigma_k_quadratic_form");

  LogSigmaForm out{0.0, 0.0};
  // i = 1 term: q_1 = sigma_1, second derivative vanishes
  const double dlog1 = xi.sum() / table[1];
  out.quad_form += dlog1 * dlog1;
  out.grad_bound += dlog1 * dlog1;
  for (int i = 2; i <= k; ++i) {
    QuotientDerivatives qd = quotient_derivatives(lambda, i);
    const double dq = qd.gradient.dot(xi) / qd.value;
    const double d2q = xi.dot(qd.hessian * xi) / qd.value;
    out.quad_form += -d2q + dq * dq;
    out.grad_bound += dq * dq;
  }
  return out;
}

}  // namespace hessianlab
