#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hessianlab/concavity.hpp"
#include "hessianlab/cone.hpp"
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

// Every gap is a quadratic form in xi at fixed lambda.  Assembling that
// matrix gives an independent oracle: its minimum eigenvalue on the unit
// sphere bounds every evaluated gap from below.
MatrixXd gap_form_matrix(Ineq id, const Spectrum& lam, int k, const IneqParams& p) {
  const int n = lam.n();
  MatrixXd G(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) {
      VectorXd ea = VectorXd::Unit(n, a), eb = VectorXd::Unit(n, b);
      double faa = gap_core<double>(id, lam.values(), ea, k, p).gap;
      double fbb = gap_core<double>(id, lam.values(), eb, k, p).gap;
      double fab = gap_core<double>(id, lam.values(), VectorXd(ea + eb), k, p).gap;
      G(a, b) = 0.5 * (fab - faa - fbb);
      G(b, a) = G(a, b);
      if (a == b) G(a, a) = faa;
    }
  return G;
}

}  // namespace

TEST_CASE("default constants follow the proof's choices") {
  DefaultConstants c3 = default_constants(3);
  CHECK(c3.epsilon == doctest::Approx(1.0 / 16.0));
  CHECK(c3.K == doctest::Approx(16.0));
  CHECK(c3.delta0 == doctest::Approx(1.0 / 24.0));
  DefaultConstants c2 = default_constants(2);
  CHECK(c2.delta0 == doctest::Approx(1.0 / 15.0));
  DefaultConstants c13 = default_constants(13);
  CHECK(c13.delta0 == doctest::Approx(1.0 / 224.0));
}

TEST_CASE("zero direction gives zero gap for every inequality") {
  Spectrum lam = spec({3, 1.5, 1, 0.2, -0.1});
  VectorXd zero = VectorXd::Zero(5);
  CHECK(main_gap(lam, zero, 3, 16.0, 1.0, 1.0 / 24).gap == 0.0);
  CHECK(weak_gap(lam, zero, 3, 16.0, 1.0, 1.0 / 24).gap == 0.0);
  CHECK(lu_gap(lam, zero, 3, 1, 0.1, 0.5, 0.1, 0.1).gap == 0.0);
  CHECK(rw_gap(lam, zero, 3, 1, 16.0, 0.1, 0.5).gap == 0.0);
  CHECK(conjecture15_gap(lam, zero, 3, 16.0).gap == 0.0);
}

TEST_CASE("main gap with xi = e_2: RHS vanishes and the LHS is nonnegative") {
  ConeContext ctx{5, 3, 1.0, 0.9, 1.1};
  SampleBatch batch = sample(ctx, {}, 60, 13);
  for (const Spectrum& s : batch.spectra) {
    GapReport r = main_gap(s, VectorXd::Unit(5, 1), 3, 16.0, 1.0, 1.0 / 24.0);
    CHECK(r.gap >= -1e-12 * r.scale);
  }
}

TEST_CASE("gaps are homogeneous of degree 2 in xi") {
  Spectrum lam = spec({4, 2, 1, 0.5, -0.2});
  Rng rng(5);
  VectorXd xi = rng.unit_vec(5);
  IneqParams p;
  p.K = 16.0;
  p.A = 1.0;
  p.delta0 = 1.0 / 24.0;
  p.epsilon = 0.1;
  p.delta = 0.5;
  p.delta_prime = 0.2;
  for (Ineq id : {Ineq::main, Ineq::weak, Ineq::lu, Ineq::rw, Ineq::conjecture15}) {
    double g1 = gap_core<double>(id, lam.values(), xi, 3, p).gap;
    for (double t : {0.5, 2.0, 7.0}) {
      double gt = gap_core<double>(id, lam.values(), VectorXd(t * xi), 3, p).gap;
      CHECK(gt == doctest::Approx(t * t * g1).epsilon(1e-12));
    }
  }
}

TEST_CASE("main gap is monotone in K") {
  Spectrum lam = spec({6, 1, 0.8, 0.1});
  Rng rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    VectorXd xi = rng.unit_vec(4);
    GapReport lo = main_gap(lam, xi, 3, 16.0, 1.0, 1.0 / 24.0);
    GapReport hi = main_gap(lam, xi, 3, 64.0, 1.0, 1.0 / 24.0);
    CHECK(hi.gap >= lo.gap - 1e-14 * (std::abs(lo.gap) + lo.scale));
  }
}

TEST_CASE("RHS-vanishing directions keep the main gap nonnegative") {
  // xi_1 = 0: the LHS is the log-concavity form plus nonnegative terms
  ConeContext ctx{5, 3, 1.0, 0.9, 1.1};
  SampleBatch batch = sample(ctx, {}, 80, 19);
  Rng rng(23);
  for (const Spectrum& s : batch.spectra) {
    VectorXd xi = rng.unit_vec(5);
    xi[0] = 0.0;
    GapReport r = main_gap(s, xi, 3, 16.0, 1.0, 1.0 / 24.0);
    CHECK(r.gap >= -1e-10 * r.scale);
  }
}

TEST_CASE("permutation covariance: shuffled (lambda, xi) gives the identical gap") {
  Rng rng(29);
  IneqParams p;
  p.K = 16.0;
  p.A = 2.0;
  p.delta0 = 1.0 / 24.0;
  p.epsilon = 0.1;
  p.delta = 0.5;
  p.delta_prime = 0.2;
  for (int trial = 0; trial < 40; ++trial) {
    VectorXd lam(5);
    lam << 4.0 + rng.next_double(), 2.0, 1.0, 0.5, -0.2 * rng.next_double();
    VectorXd xi = rng.unit_vec(5);
    Spectrum s(lam);
    double base = gap_core<double>(Ineq::main, s.values(), xi, 3, p).gap;

    // random permutation applied jointly
    std::vector<int> perm = {0, 1, 2, 3, 4};
    for (int i = 4; i > 0; --i) std::swap(perm[i], perm[rng.uniform_int(0, i)]);
    VectorXd lam2(5), xi2(5);
    for (int i = 0; i < 5; ++i) {
      lam2[i] = lam[perm[i]];
      xi2[i] = xi[perm[i]];
    }
    Spectrum s2(lam2);
    VectorXd xi2_sorted = s2.permute_like(xi2);
    double perm_gap = gap_core<double>(Ineq::main, s2.values(), xi2_sorted, 3, p).gap;
    CHECK(perm_gap == base);  // bitwise: entries are distinct, same sorted data
  }
}

TEST_CASE("conjecture15 at the symmetric point matches the hand expansion") {
  Spectrum kappa = spec({1, 1, 1});
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    VectorXd xi = rng.unit_vec(3);
    double K = 4.0 + double(trial);
    GapReport r = conjecture15_gap(kappa, xi, 2, K);
    double sum = xi.sum();
    // kappa_1 [K (2 sum)^2 - (sum^2 - |xi|^2)] - 2 xi_1^2
    //   + sum_j (2 + 2 * hess_{1j}) xi_j^2 with hess_{11} = 0, hess_{1j} = 1
    double expect = K * 4.0 * sum * sum - (sum * sum - 1.0) - 2.0 * xi[0] * xi[0] +
                    2.0 * xi[0] * xi[0] + 4.0 * (xi[1] * xi[1] + xi[2] * xi[2]);
    CHECK(r.gap == doctest::Approx(expect).epsilon(1e-12));
  }
  // parity violation rejected
  CHECK_THROWS_AS(conjecture15_gap(spec({1, 1, 1, 1, 1}), VectorXd::Zero(5), 2, 4.0),
                  Error);
}

TEST_CASE("rw gap at the all-equal spectrum: negative for k < n-1, positive at k = n-1") {
  // sigma_3 = 1 normalization of the all-equal 5-spectrum
  double c = std::pow(10.0, -1.0 / 3.0);
  Spectrum kappa(VectorXd::Constant(5, c));
  // the witness direction: sum xi = 0, concentrated on xi_1
  VectorXd xi(5);
  xi << std::sqrt(0.8), -std::sqrt(0.05), -std::sqrt(0.05), -std::sqrt(0.05),
      -std::sqrt(0.05);
  GapReport r = rw_gap(kappa, xi, 3, 1, 100.0, 0.1, 0.5);
  CHECK(r.gap < -0.05);
  // hand value: (9.6 - 12.6 * 0.8) c^2 = -0.48 c^2 at exactly sum xi = 0;
  // the sqrt-rounded direction sits within 1e-8 of it
  CHECK(r.gap == doctest::Approx(-0.48 * c * c).epsilon(1e-6));

  // k = n-1 = 4 at its all-equal spectrum (sigma_4 = 1): nonnegative
  double c4 = std::pow(5.0, -1.0 / 4.0);
  Spectrum kappa4(VectorXd::Constant(5, c4));
  MatrixXd G = gap_form_matrix(Ineq::rw, kappa4, 4, [] {
    IneqParams p;
    p.i = 1;
    p.K = 100.0;
    p.epsilon = 0.1;
    p.delta = 0.5;
    return p;
  }());
  VectorXd ev = pde::symmetric_eigenvalues(G);
  CHECK(ev[ev.size() - 1] >= -1e-10);
}

TEST_CASE("quadratic-form oracle agrees with direct evaluation") {
  ConeContext ctx{5, 3, 1.0, 0.9, 1.1};
  SampleBatch batch = sample(ctx, {}, 20, 37);
  Rng rng(41);
  IneqParams p;
  p.K = 16.0;
  p.A = 1.0;
  p.delta0 = 1.0 / 24.0;
  p.epsilon = 0.1;
  p.delta = 0.5;
  p.delta_prime = 0.2;
  for (const Spectrum& s : batch.spectra) {
    for (Ineq id : {Ineq::main, Ineq::weak, Ineq::lu, Ineq::rw}) {
      MatrixXd G = gap_form_matrix(id, s, 3, p);
      VectorXd xi = rng.unit_vec(5);
      double direct = gap_core<double>(id, s.values(), xi, 3, p).gap;
      double form = xi.dot(G * xi);
      CHECK(direct == doctest::Approx(form).epsilon(1e-10));
    }
  }
}

TEST_CASE("hs_q2 identity: hand value, aligned direction, random residuals") {
  // lambda = (2,1,1), xi = e_1: identity value 0.09375
  IdentityResidual r = hs_q2_residual(spec({2, 1, 1}), VectorXd::Unit(3, 0), {});
  CHECK(r.rhs == doctest::Approx(0.09375).epsilon(1e-12));
  CHECK(r.residual <= 1e-8 * r.scale);

  // xi = lambda: the RHS vanishes (perfectly aligned direction)
  Spectrum s = spec({3, 2, 0.5});
  IdentityResidual r2 = hs_q2_residual(s, s.values(), {});
  CHECK(r2.rhs <= 1e-12);

  Rng rng(43);
  ConeContext ctx{5, 2, 2.0, 0.5, 2.0};
  SampleBatch batch = sample(ctx, {}, 40, 47);
  for (const Spectrum& sm : batch.spectra) {
    VectorXd xi = rng.unit_vec(5);
    int rm = rng.uniform_int(0, 4);
    const int rem[1] = {rm};
    IdentityResidual rr = hs_q2_residual(sm, xi, std::span<const int>(rem, 1));
    CHECK(rr.residual <= 1e-6 * rr.scale);
  }

  CHECK_THROWS_AS(hs_q2_residual(spec({-1, -2, -3}), VectorXd::Unit(3, 0), {}), Error);
}

TEST_CASE("hs_qq2 recursion: symmetric point, aligned direction, random batch") {
  // symmetric spectrum: both sides computable, gap must be >= 0
  Spectrum s(VectorXd::Constant(5, 1.0));
  ChainGap g = hs_qq2_gap(s, VectorXd::Unit(5, 0), 2);
  CHECK(g.gap >= -1e-6 * g.scale);

  // xi = lambda: q_{k+1} is 1-homogeneous so its Hessian annihilates lambda
  ChainGap g2 = hs_qq2_gap(s, s.values(), 2);
  CHECK(std::abs(g2.lhs) <= 1e-8);
  CHECK(g2.rhs >= -1e-12);

  ConeContext ctx{5, 4, 1.0, 0.5, 2.0};  // Gamma_4 = Gamma_{k+1} for k = 3
  SampleBatch batch = sample(ctx, {}, 30, 53);
  Rng rng(59);
  for (const Spectrum& sm : batch.spectra) {
    VectorXd xi = rng.unit_vec(5);
    ChainGap gg = hs_qq2_gap(sm, xi, 3);
    CHECK(gg.gap >= -1e-6 * gg.scale);
  }
}

TEST_CASE("quotient chain bound: homogeneity direction, k = 2 reduction, fit") {
  // gamma = lambda: both sides vanish
  Spectrum s = spec({4, 2, 1, 0.5});
  ChainGap g = quotient_chain_gap(s, s.values(), 3, 1.0);
  CHECK(std::abs(g.lhs) <= 1e-10 * std::max(1.0, std::abs(g.rhs)));
  CHECK(std::abs(g.rhs) <= 1e-20);

  // k = 2: the bound reduces to the q_2 sum-of-squares identity with the
  // projection inequality, so C = 1 must already make the gap nonnegative
  ConeContext ctx{4, 2, 2.0, 0.5, 2.0};
  SampleBatch batch = sample(ctx, {}, 50, 61);
  Rng rng(67);
  for (const Spectrum& sm : batch.spectra) {
    VectorXd gamma = rng.unit_vec(4);
    ChainGap gg = quotient_chain_gap(sm, gamma, 2, 1.0);
    CHECK(gg.gap >= -1e-9 * gg.scale);
  }
}

TEST_CASE("decomposition bound: zero gamma is vacuous, head-only direction works") {
  Spectrum s = spec({8, 3, 1, 0.5, -0.2});
  ChainGap z = decomposition_gap(s, VectorXd::Zero(5), 3, 1.0, 0.5);
  CHECK(z.vacuous);

  // head-only gamma = e_2: tail-zero reduces the RHS to the first sum
  VectorXd g = VectorXd::Unit(5, 1);
  ChainGap r = decomposition_gap(s, g, 3, 1.0, 1e-3);
  CHECK(!r.vacuous);
  CHECK(r.gap >= 0.0);

  // the projection makes the tail orthogonal to (lambda_k..lambda_n)
  VectorXd raw = VectorXd::Ones(5);
  VectorXd proj = decomposition_project(s, raw, 3);
  CHECK(proj[0] == 0.0);
  double dot = 0.0;
  for (int i = 2; i < 5; ++i) dot += proj[i] * s[i];
  CHECK(std::abs(dot) <= 1e-12 * s.values().tail(3).norm());
}

TEST_CASE("compensated re-evaluation agrees with the double gap") {
  Spectrum lam = spec({5, 2, 1, 0.3, -0.1});
  Rng rng(71);
  IneqParams p;
  p.K = 16.0;
  p.A = 1.0;
  p.delta0 = 1.0 / 24.0;
  for (int trial = 0; trial < 20; ++trial) {
    VectorXd xi = rng.unit_vec(5);
    double d = gap_core<double>(Ineq::main, lam.values(), xi, 3, p).gap;
    double dd = gap_core_compensated(Ineq::main, lam.values(), xi, 3, p);
    CHECK(std::abs(d - dd) <=
          1e-12 * std::max({std::abs(d), std::abs(dd), 1e-12}));
  }
}

TEST_CASE("hypothesis bookkeeping for lu and rw") {
  Spectrum s = spec({4, 4, 1, 0.5});  // lambda_2 = lambda_1 violates l=1 split
  GapReport r = lu_gap(s, VectorXd::Unit(4, 0), 3, 1, 0.1, 0.5, 0.2, 0.1);
  CHECK(!r.hypothesis_met);
  CHECK(r.note == "hypothesis unmet");
  // still computed
  CHECK(std::isfinite(r.gap));

  GapReport r2 = rw_gap(s, VectorXd::Unit(4, 0), 3, 4, 16.0, 0.1, 0.5);
  CHECK(!r2.hypothesis_met);  // kappa_4 = 0.5 < 0.5 * 4
}

TEST_CASE("main gap along the (t,1,..,1,-1/2) family: threshold exists") {
  // sweep t over four decades with the family scaled onto sigma_3 = 1 and
  // xi = e_1; record the smallest t with nonnegative gap
  const int n = 5, k = 3;
  DefaultConstants d = default_constants(k);
  double first_nonneg = -1.0;
  bool stays_nonneg = true;
  for (double t = 1.0; t <= 1e4; t *= 1.5) {
    VectorXd lam(n);
    lam << t, 1.0, 1.0, 1.0, -0.5;
    Spectrum s(lam);
    VectorXd table = sym_table(s.values());
    if (first_cone_failure(table, k) != 0) continue;
    double scale_t = std::pow(1.0 / table[k], 1.0 / k);
    Spectrum scaled(VectorXd(scale_t * s.values()));
    double A = std::max(0.0, -scaled[n - 1]) + 1e-12;
    GapReport r = main_gap(scaled, VectorXd::Unit(n, 0), k, d.K, A, d.delta0);
    if (r.gap >= 0.0 && first_nonneg < 0.0) first_nonneg = t;
    if (first_nonneg > 0.0 && r.gap < -1e-9 * r.scale) stays_nonneg = false;
  }
  CHECK(first_nonneg > 0.0);
  CHECK(stays_nonneg);
}

TEST_CASE("weak minus main equals the closed-form RHS difference") {
  // weak_gap - main_gap = (1+delta0) (sigma'_k^{11}/(lambda_1 sigma_k)
  //                                   - 1/lambda_1^2) xi_1^2
  ConeContext ctx{5, 3, 2.0, 0.9, 1.1};
  SampleBatch batch = sample(ctx, {}, 40, 73);
  Rng rng(79);
  double d0 = 1.0 / 24.0;
  for (const Spectrum& s : batch.spectra) {
    VectorXd xi = rng.unit_vec(5);
    GapReport m = main_gap(s, xi, 3, 16.0, 2.0, d0);
    GapReport w = weak_gap(s, xi, 3, 16.0, 2.0, d0);
    VectorXd table = sym_table(s.values());
    VectorXd g = grad_sigma(s, 3);
    double expect = (1.0 + d0) *
                    (g[0] / (s[0] * table[3]) - 1.0 / (s[0] * s[0])) * xi[0] * xi[0];
    double scale = std::abs(m.gap) + std::abs(w.gap) + std::abs(expect) + 1e-300;
    CHECK(std::abs((w.gap - m.gap) - expect) <= 1e-10 * scale);
  }
}

TEST_CASE("cone and floor violations are rejected") {
  CHECK_THROWS_AS(main_gap(spec({1, 1, -1}), VectorXd::Unit(3, 0), 2, 15, 1, 0.05),
                  ConeViolation);
  // floor: lambda_n = -2 below A = 1
  CHECK_THROWS_AS(main_gap(spec({5, 4, -2}), VectorXd::Unit(3, 0), 2, 15, 1, 0.05),
                  Error);
}
