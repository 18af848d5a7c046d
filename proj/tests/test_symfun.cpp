#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "hessianlab/cone.hpp"
#include "hessianlab/fd.hpp"
#include "hessianlab/pde/linalg.hpp"
#include "hessianlab/symfun.hpp"

using namespace hessianlab;

namespace {

Spectrum spec(std::initializer_list<double> values) {
  VectorXd v(long(values.size()));
  int i = 0;
  for (double x : values) v[i++] = x;
  return Spectrum(v);
}

// independent oracle: direct subset-sum expansion, O(2^n), n <= 10
double sigma_bruteforce(const VectorXd& lam, int m) {
  const int n = int(lam.size());
  if (m == 0) return 1.0;
  double total = 0.0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (__builtin_popcount(mask) != m) continue;
    double prod = 1.0;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) prod *= lam[i];
    total += prod;
  }
  return total;
}

Spectrum random_cone_sample(int n, int k, Rng& rng) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    VectorXd lam(n);
    lam[0] = rng.log_uniform(1.0, 100.0);
    for (int i = 1; i < n; ++i) lam[i] = rng.uniform(-2.0, lam[0]);
    Spectrum s(lam);
    VectorXd t = sym_table(s.values());
    if (first_cone_failure(t, k) == 0) return s;
  }
  throw Error("random_cone_sample starved");
}

}  // namespace

TEST_CASE("sigma table matches hand values and brute force") {
  // identity spectrum: binomials
  VectorXd t = sym_table(spec({1, 1, 1}).values());
  CHECK(t[0] == 1.0);
  CHECK(t[1] == 3.0);
  CHECK(t[2] == 3.0);
  CHECK(t[3] == 1.0);

  // direct expansion for (3,2,1)
  VectorXd t2 = sym_table(spec({3, 2, 1}).values());
  CHECK(t2[2] == doctest::Approx(11.0).epsilon(1e-14));
  CHECK(t2[3] == doctest::Approx(6.0).epsilon(1e-14));

  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    int n = rng.uniform_int(3, 8);
    VectorXd lam(n);
    for (int i = 0; i < n; ++i) lam[i] = rng.uniform(-3.0, 3.0);
    Spectrum s(lam);
    VectorXd table = sym_table(s.values());
    for (int m = 0; m <= n; ++m) {
      double ref = sigma_bruteforce(s.values(), m);
      double scale = std::max(1.0, std::abs(ref));
      CHECK(std::abs(table[m] - ref) <= 1e-12 * scale);
    }
  }
}

TEST_CASE("all-equal spectrum gives binomial scaling") {
  Rng rng(3);
  for (double t : {0.25, 1.0, 7.5}) {
    int n = 6;
    Spectrum s(VectorXd::Constant(n, t));
    VectorXd table = sym_table(s.values());
    for (int m = 1; m <= n; ++m)
      CHECK(table[m] ==
            doctest::Approx(binom(n, m) * std::pow(t, m)).epsilon(1e-13));
  }
}

TEST_CASE("spectrum validation") {
  VectorXd bad(2);
  bad << 1.0, std::nan("");
  CHECK_THROWS_AS(Spectrum{bad}, Error);
  VectorXd one(1);
  one << 1.0;
  CHECK_THROWS_AS(Spectrum{one}, Error);
}

TEST_CASE("canonical order is descending with stable ties") {
  VectorXd v(4);
  v << 1.0, 3.0, -2.0, 3.0;
  Spectrum s(v);
  CHECK(s[0] == 3.0);
  CHECK(s[1] == 3.0);
  CHECK(s[2] == 1.0);
  CHECK(s[3] == -2.0);
  // stable: the first 3.0 in input order comes first
  CHECK(s.sort_permutation()[0] == 1);
  CHECK(s.sort_permutation()[1] == 3);
}

TEST_CASE("deleted_sym hand cases") {
  CHECK(deleted_sym(spec({3, 2, 1}), {0}, 1) == doctest::Approx(3.0));
  Spectrum s = spec({1, 1, 1, 1});
  CHECK(deleted_sym(s, {0, 1}, 2) == doctest::Approx(1.0));
  // empty deletion equals the table entry
  VectorXd t = sym_table(s.values());
  CHECK(deleted_sym(s, {}, 3) == doctest::Approx(t[3]));
  CHECK_THROWS_AS(deleted_sym(s, {9}, 1), Error);
  CHECK_THROWS_AS(deleted_sym(s, {0}, 4), Error);
}

TEST_CASE("deletion recurrence is an exact identity") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    int n = rng.uniform_int(3, 8);
    VectorXd lam(n);
    for (int i = 0; i < n; ++i) lam[i] = rng.uniform(-4.0, 4.0);
    Spectrum s(lam);
    VectorXd table = sym_table(s.values());
    for (int i = 0; i < n; ++i)
      for (int m = 1; m <= n - 1; ++m) {
        double lhs = table[m];
        double rhs = deleted_sym(s, {i}, m) + s[i] * deleted_sym(s, {i}, m - 1);
        double mass = std::abs(deleted_sym(s, {i}, m)) +
                      std::abs(s[i] * deleted_sym(s, {i}, m - 1)) + std::abs(lhs);
        CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(mass, 1e-300));
      }
  }
}

TEST_CASE("grad_sigma: hand values, FD, and the Gamma_k ordering") {
  VectorXd g1 = grad_sigma(spec({1, 1, 1}), 2);
  CHECK(g1[0] == doctest::Approx(2.0));
  CHECK(g1[1] == doctest::Approx(2.0));
  CHECK(g1[2] == doctest::Approx(2.0));
  VectorXd g2 = grad_sigma(spec({3, 2, 1}), 2);
  CHECK(g2[0] == doctest::Approx(3.0));
  CHECK(g2[1] == doctest::Approx(4.0));
  CHECK(g2[2] == doctest::Approx(5.0));

  Rng rng(13);
  for (int trial = 0; trial < 60; ++trial) {
    int n = rng.uniform_int(3, 8);
    int k = rng.uniform_int(2, n);
    Spectrum s = random_cone_sample(n, k, rng);
    VectorXd g = grad_sigma(s, k);
    double h = fd_default_step(s.values());
    auto sig = [&](const VectorXd& x) { return sym_table_raw<double>(x)[k]; };
    VectorXd gfd = fd_gradient(sig, s.values(), h);
    double scale = std::max(g.cwiseAbs().maxCoeff(), 1e-300);
    CHECK((g - gfd).cwiseAbs().maxCoeff() <= 1e-7 * scale);
    // gradient nondecreasing along descending lambda, strictly positive
    for (int p = 0; p + 1 < n; ++p) CHECK(g[p] <= g[p + 1] + 1e-12 * scale);
    CHECK(g[0] > 0.0);
  }
}

TEST_CASE("hess_sigma: structure, hand value, FD match") {
  Spectrum s = spec({3, 2, 1});
  MatrixXd h2 = hess_sigma(s, 2);
  for (int p = 0; p < 3; ++p) CHECK(h2(p, p) == 0.0);
  CHECK(h2(0, 1) == doctest::Approx(1.0));  // sigma_0 = 1
  MatrixXd h3 = hess_sigma(s, 3);
  CHECK(h3(0, 1) == doctest::Approx(1.0));  // sigma_1(lambda|1,2) = lambda_3

  Rng rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    int n = rng.uniform_int(3, 8);
    int k = rng.uniform_int(2, n);
    Spectrum sr = random_cone_sample(n, k, rng);
    MatrixXd h = hess_sigma(sr, k);
    CHECK((h - h.transpose()).cwiseAbs().maxCoeff() == 0.0);
    double step = fd_default_step(sr.values());
    struct SigmaDD {
      int k;
      DDouble operator()(const VecX<DDouble>& x) const {
        return sym_table_raw<DDouble>(x)[k];
      }
    };
    MatrixXd hfd = fd_hessian_dd(SigmaDD{k}, sr.values(), step);
    double scale = std::max(h.cwiseAbs().maxCoeff(), 1e-300);
    CHECK((h - hfd).cwiseAbs().maxCoeff() <= 1e-6 * scale);
  }
}

TEST_CASE("quotient derivatives: value, gradient, closed-form Hessian vs FD") {
  // q_2 at the identity spectrum: value 1, gradient (1/3, 1/3, 1/3)
  QuotientDerivatives qd = quotient_derivatives(spec({1, 1, 1}), 2);
  CHECK(qd.value == doctest::Approx(1.0));
  for (int i = 0; i < 3; ++i) CHECK(qd.gradient[i] == doctest::Approx(1.0 / 3.0));

  CHECK_THROWS_AS(quotient_derivatives(spec({1, 1, -1}), 2), ConeViolation);

  struct QuotientDD {
    int m;
    DDouble operator()(const VecX<DDouble>& x) const {
      VecX<DDouble> t = sym_table_raw<DDouble>(x);
      return t[m] / t[m - 1];
    }
  };
  Rng rng(19);
  for (int trial = 0; trial < 40; ++trial) {
    int n = rng.uniform_int(3, 8);
    int k = rng.uniform_int(2, n);
    Spectrum s = random_cone_sample(n, k, rng);
    QuotientDerivatives q = quotient_derivatives(s, k);
    CHECK((q.hessian - q.hessian.transpose()).cwiseAbs().maxCoeff() == 0.0);
    MatrixXd fd = fd_hessian_richardson_dd(QuotientDD{k}, s.values(), 1e-4);
    double scale = std::max(q.hessian.cwiseAbs().maxCoeff(), 1e-300);
    CHECK((q.hessian - fd).cwiseAbs().maxCoeff() <= 1e-6 * scale);
    // quotient concavity: NSD on the cone
    VectorXd ev = pde::symmetric_eigenvalues(q.hessian);
    CHECK(ev[0] <= 1e-8 * std::max(std::abs(ev[0]), std::abs(ev[n - 1])));
  }
}

TEST_CASE("log sigma_k quadratic form: homogeneity direction and chain bound") {
  Rng rng(23);
  for (int trial = 0; trial < 60; ++trial) {
    int n = rng.uniform_int(3, 7);
    int k = rng.uniform_int(2, n);
    Spectrum s = random_cone_sample(n, k, rng);

    // xi = 0 gives 0
    LogSigmaForm z = log_sigma_k_quadratic_form(s, k, VectorXd::Zero(n));
    CHECK(z.quad_form == 0.0);

    // xi = lambda: -d^2/dt^2 log sigma_k((1+t) lambda) = k
    LogSigmaForm a = log_sigma_k_quadratic_form(s, k, s.values());
    CHECK(a.quad_form == doctest::Approx(double(k)).epsilon(1e-9));

    // chain bound and agreement with the direct second derivative
    VectorXd xi = rng.unit_vec(n);
    LogSigmaForm f = log_sigma_k_quadratic_form(s, k, xi);
    CHECK(f.quad_form >= f.grad_bound - 1e-9 * (std::abs(f.quad_form) + f.grad_bound));
    VectorXd table = sym_table(s.values());
    VectorXd g = grad_sigma(s, k);
    MatrixXd h = hess_sigma(s, k);
    double direct = -xi.dot(h * xi) / table[k];
    double contr = g.dot(xi) / table[k];
    direct += contr * contr;
    double scale = std::abs(xi.dot(h * xi) / table[k]) + contr * contr +
                   std::abs(f.quad_form) + 1e-300;
    CHECK(std::abs(direct - f.quad_form) <= 1e-8 * scale);
  }
}

TEST_CASE("homogeneity and permutation invariance") {
  Rng rng(29);
  for (int trial = 0; trial < 60; ++trial) {
    int n = rng.uniform_int(3, 8);
    VectorXd lam(n);
    for (int i = 0; i < n; ++i) lam[i] = rng.uniform(-3.0, 3.0);
    Spectrum s(lam);
    VectorXd table = sym_table(s.values());
    double mass1 = s.values().cwiseAbs().sum();
    for (double t : {1e-3, 1.0, 1e3}) {
      VectorXd ts = sym_table(VectorXd(t * s.values()));
      double tp = 1.0, mp = 1.0;
      for (int m = 1; m <= n; ++m) {
        tp *= t;
        mp *= mass1;
        CHECK(std::abs(ts[m] - tp * table[m]) <= 1e-12 * std::max(tp * mp, 1e-300));
      }
    }
    // permutation: canonicalization makes the table bit-stable
    VectorXd shuffled = lam;
    for (int i = n - 1; i > 0; --i) {
      int j = rng.uniform_int(0, i);
      std::swap(shuffled[i], shuffled[j]);
    }
    VectorXd t2 = sym_table(Spectrum(shuffled).values());
    for (int m = 0; m <= n; ++m) CHECK(t2[m] == table[m]);
  }
}

TEST_CASE("properties (1), (2), (4), (6) on cone samples") {
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    int n = rng.uniform_int(3, 8);
    int k = rng.uniform_int(2, n);
    Spectrum s = random_cone_sample(n, k, rng);
    VectorXd table = sym_table(s.values());
    VectorXd g = grad_sigma(s, k);

    double lhs1 = 0.0, mass1 = 0.0;
    for (int p = 0; p < n; ++p) {
      lhs1 += g[p] * s[p] * s[p];
      mass1 += std::abs(g[p] * s[p] * s[p]);
    }
    double skp1 = (k + 1 <= n) ? table[k + 1] : 0.0;
    double rhs1 = table[1] * table[k] - double(k + 1) * skp1;
    mass1 += std::abs(table[1] * table[k]) + std::abs(double(k + 1) * skp1);
    CHECK(std::abs(lhs1 - rhs1) <= 1e-10 * std::max(mass1, 1e-300));

    double lhs2 = g.sum();
    double rhs2 = double(n - k + 1) * table[k - 1];
    CHECK(std::abs(lhs2 - rhs2) <=
          1e-10 * std::max(g.cwiseAbs().sum() + std::abs(rhs2), 1e-300));

    double p4 = g[0] * s[0] - double(k) / double(n) * table[k];
    CHECK(p4 >= -1e-10 * std::max(std::abs(g[0] * s[0]), 1.0));

    for (int sx = 1; sx < k; ++sx) {
      double prod = 1.0;
      for (int i = 0; i < sx; ++i) prod *= s[i];
      CHECK(table[sx] - prod > -1e-12 * std::max(std::abs(table[sx]), 1e-300));
    }
  }
}

TEST_CASE("cancellation guard: near-cancelling spectra stay accurate") {
  // sigma_2((t, -t + d, e)) with tiny residual exercises the double-double path
  VectorXd lam(3);
  lam << 1e8, -1e8 + 1.0, 0.5;
  VectorXd table = sym_table(lam);
  // exact: sigma_1 = 1.5, sigma_2 = 1e8*(-1e8+1) + 1e8*0.5 + (-1e8+1)*0.5
  double s2 = -1e16 + 1e8 + 5e7 + (-5e7 + 0.5);
  CHECK(table[1] == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(table[2] == doctest::Approx(s2).epsilon(1e-12));
  double s3 = 1e8 * (-1e8 + 1.0) * 0.5;
  CHECK(table[3] == doctest::Approx(s3).epsilon(1e-12));
}

TEST_CASE("overflow is reported") {
  VectorXd lam(4);
  lam << 1e200, 1e200, 1e200, 1e200;
  CHECK_THROWS_AS(sym_table(lam), Error);
}
