#include "hessianlab/identities.hpp"

#include <cmath>
#include <mutex>
#include <sstream>

#include "hessianlab/cone.hpp"
#include "hessianlab/concavity.hpp"
#include "hessianlab/fd.hpp"
#include "hessianlab/parallel.hpp"
#include "hessianlab/pde/linalg.hpp"
#include "hessianlab/symfun.hpp"

namespace hessianlab {

namespace {

struct Accumulator {
  std::string name;
  double tol;
  double max_res = 0.0;
  long samples = 0;
  std::string worst;

  void feed(double res, const Spectrum& s) {
    ++samples;
    if (res > max_res) {
      max_res = res;
      std::ostringstream os;
      os.precision(17);
      for (int i = 0; i < s.n(); ++i) os << (i ? "," : "") << s[i];
      worst = os.str();
    }
  }
};

// one interior draw against a fixed window; deterministic per rng stream
std::optional<Spectrum> draw(int n, int k, Rng& rng) {
  VectorXd lam(n);
  lam[0] = rng.log_uniform(1.0, 1e3);
  for (int i = 1; i < n; ++i) lam[i] = rng.uniform(-3.0, lam[0]);
  Spectrum s(lam);
  VectorXd table = sym_table(s.values());
  if (first_cone_failure(table, k) != 0) return std::nullopt;
  double target = rng.uniform(0.5, 2.0);
  double t = std::pow(target / table[k], 1.0 / double(k));
  return Spectrum(VectorXd(t * s.values()));
}

struct PairResults {
  std::vector<double> max_res;  // per identity
  std::vector<std::string> worst;
  long samples = 0;
};

struct QuotientDD {
  int m;
  DDouble operator()(const VecX<DDouble>& x) const {
    VecX<DDouble> t = sym_table_raw<DDouble>(x);
    return t[m] / t[m - 1];
  }
};

}  // namespace

std::vector<IdentityResult> run_identity_suite(const IdentitySuiteConfig& cfg) {
  struct Spec {
    const char* name;
    double tol;
  };
  const std::vector<Spec> specs = {
      {"sigma_grad_second_moment", 1e-10},          {"sigma_grad_sum", 1e-10},
      {"sigma_grad_ordering", 1e-12}, {"sigma_top_slot_share", 1e-10},
      {"sigma_leading_product", 1e-12},          {"deletion_recurrence", 1e-12},
      {"homogeneity", 1e-12},        {"permutation_bitstable", 0.0},
      {"quotient_hessian_fd", 1e-8},  {"q2_sum_of_squares", 1e-8},
      {"quotient_hessian_nsd", 1e-8},       {"log_chain_bound", 1e-9},
      {"log_chain_direct", 1e-8},    {"maclaurin_chain", 1e-12},
      {"newton_inequality", 1e-12},  {"grad_sigma_fd", 1e-7},
      {"hess_sigma_fd", 1e-6}};
  const int NI = int(specs.size());
  auto id_of = [&](const std::string& nm) {
    for (int i = 0; i < NI; ++i)
      if (specs[i].name == nm) return i;
    return -1;
  };
  const int fault_idx = cfg.fault.empty() ? -1 : id_of(cfg.fault);
  if (!cfg.fault.empty() && fault_idx < 0)
    throw Error("run_identity_suite: unknown fault target " + cfg.fault);

  // (n, k) pair list
  std::vector<std::pair<int, int>> pairs;
  for (int n = cfg.n_min; n <= cfg.n_max; ++n)
    for (int k = 2; k <= n; ++k) pairs.emplace_back(n, k);

  std::vector<PairResults> per_pair = parallel_map<PairResults>(
      int(pairs.size()), cfg.workers, [&](int pi) {
        const auto [n, k] = pairs[pi];
        PairResults pr;
        pr.max_res.assign(NI, 0.0);
        pr.worst.assign(NI, "");
        std::vector<Accumulator> acc(NI);
        for (int i = 0; i < NI; ++i) acc[i] = {specs[i].name, specs[i].tol};

        long accepted = 0;
        for (long trial = 0; accepted < cfg.samples_per_pair; ++trial) {
          if (trial > 400L * cfg.samples_per_pair)
            throw Error("identity suite: sampler starved");
          Rng rng = Rng::stream(cfg.seed + std::uint64_t(pi) * 0x5851f42dULL,
                                std::uint64_t(trial) + 1);
          auto s_opt = draw(n, k, rng);
          if (!s_opt) continue;
          ++accepted;
          const Spectrum& s = *s_opt;
          VectorXd table = sym_table(s.values());
          VectorXd g = grad_sigma(s, k);
          const double sk = table[k], sk1 = table[k - 1];

          {  // weighted second moment of the gradient
            double lhs = 0.0, mass = 0.0;
            for (int p = 0; p < n; ++p) {
              lhs += g[p] * s[p] * s[p];
              mass += std::abs(g[p] * s[p] * s[p]);
            }
            double skp1 = (k + 1 <= n) ? table[k + 1] : 0.0;
            double rhs = table[1] * sk - double(k + 1) * skp1;
            mass += std::abs(table[1] * sk) + std::abs(double(k + 1) * skp1);
            acc[0].feed(std::abs(lhs - rhs) / std::max(mass, 1e-300), s);
          }
          {  // gradient sum
            double lhs = g.sum();
            double rhs = double(n - k + 1) * sk1;
            double mass = g.cwiseAbs().sum() + std::abs(rhs);
            acc[1].feed(std::abs(lhs - rhs) / std::max(mass, 1e-300), s);
          }
          {  // gradient nondecreasing along descending lambda
            double worst = 0.0;
            double scale = std::max(1e-300, g.cwiseAbs().maxCoeff());
            for (int p = 0; p + 1 < n; ++p)
              worst = std::max(worst, (g[p] - g[p + 1]) / scale);
            if (g[0] <= 0.0) worst = std::max(worst, 1.0);  // positivity
            acc[2].feed(std::max(0.0, worst), s);
          }
          {  // top-slot share of sigma_k
            double lhs = g[0] * s[0];
            double rhs = double(k) / double(n) * sk;
            double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
            acc[3].feed(std::max(0.0, (rhs - lhs) / scale), s);
          }
          {  // sigma_s dominates the leading product for s < k
            double worst = 0.0;
            for (int sdx = 1; sdx < k; ++sdx) {
              double prod = 1.0;
              for (int i = 0; i < sdx; ++i) prod *= s[i];
              double scale = std::max({std::abs(table[sdx]), std::abs(prod), 1e-300});
              worst = std::max(worst, (prod - table[sdx]) / scale);
            }
            acc[4].feed(std::max(0.0, worst), s);
          }
          {  // deletion recurrence, all i and m
            double worst = 0.0;
            for (int i = 0; i < n; ++i) {
              VectorXd sub(n - 1);
              int idx = 0;
              for (int j = 0; j < n; ++j)
                if (j != i) sub[idx++] = s[j];
              VectorXd st = sym_table(sub);
              for (int m = 1; m <= n - 1; ++m) {
                double lhs = table[m];
                double rhs = st[m] + s[i] * st[m - 1];
                double mass = std::abs(st[m]) + std::abs(s[i] * st[m - 1]) +
                              std::abs(lhs);
                worst = std::max(worst, std::abs(lhs - rhs) / std::max(mass, 1e-300));
              }
            }
            acc[5].feed(worst, s);
          }
          {  // homogeneity at t = 1e-3 and t = 1e3
            double worst = 0.0;
            double mass1 = s.values().cwiseAbs().sum();
            for (double t : {1e-3, 1e3}) {
              VectorXd st = sym_table(VectorXd(t * s.values()));
              double tp = 1.0, massp = 1.0;
              for (int m = 1; m <= n; ++m) {
                tp *= t;
                massp *= mass1;
                worst = std::max(worst, std::abs(st[m] - tp * table[m]) /
                                            std::max(tp * massp, 1e-300));
              }
            }
            acc[6].feed(worst, s);
          }
          {  // permutation bit-stability through canonicalization
            Rng prng = Rng::stream(cfg.seed ^ 0xabcdef, accepted);
            VectorXd shuffled = s.values();
            for (int i = n - 1; i > 0; --i) {
              int j = prng.uniform_int(0, i);
              std::swap(shuffled[i], shuffled[j]);
            }
            VectorXd t2 = sym_table(Spectrum(shuffled).values());
            bool same = true;
            for (int m = 0; m <= n; ++m)
              if (t2[m] != table[m]) same = false;
            acc[7].feed(same ? 0.0 : 1.0, s);
          }
          {  // closed-form quotient Hessian vs double-double Richardson differences
            QuotientDerivatives qd = quotient_derivatives(s, k);
            MatrixXd fd = fd_hessian_richardson_dd(QuotientDD{k}, s.values(), 1e-4);
            double scale = std::max(qd.hessian.cwiseAbs().maxCoeff(), 1e-300);
            acc[8].feed((qd.hessian - fd).cwiseAbs().maxCoeff() / scale, s);
          }
          {  // q_2 sum-of-squares identity on the full spectrum and on a random deletion
            Rng drng = Rng::stream(cfg.seed ^ 0x77aa, accepted);
            VectorXd xi = drng.unit_vec(n);
            IdentityResidual r0 = hs_q2_residual(s, xi, {});
            double worst = r0.residual / r0.scale;
            if (n >= 4) {
              int rm = drng.uniform_int(0, n - 1);
              const int rem[1] = {rm};
              VectorXd sub = s.values();
              // guard: deleted sigma_1 must stay positive
              double s1 = sub.sum() - sub[rm];
              if (s1 > 1e-9) {
                IdentityResidual r1 =
                    hs_q2_residual(s, xi, std::span<const int>(rem, 1));
                worst = std::max(worst, r1.residual / r1.scale);
              }
            }
            acc[9].feed(worst, s);
          }
          {  // q_k Hessian NSD on the cone
            QuotientDerivatives qd = quotient_derivatives(s, k);
            VectorXd ev = pde::symmetric_eigenvalues(qd.hessian);
            double nrm = std::max(std::abs(ev[0]), std::abs(ev[n - 1]));
            acc[10].feed(std::max(0.0, ev[0] / std::max(nrm, 1e-300)), s);
          }
          {  // log sigma_k telescoping: chain bound and direct cross-check
            Rng drng = Rng::stream(cfg.seed ^ 0x3311, accepted);
            VectorXd xi = drng.unit_vec(n);
            LogSigmaForm form = log_sigma_k_quadratic_form(s, k, xi);
            double scale = std::max(std::abs(form.quad_form) + form.grad_bound, 1e-300);
            acc[11].feed(std::max(0.0, (form.grad_bound - form.quad_form) / scale), s);
            MatrixXd hk = hess_sigma(s, k);
            double direct = -xi.dot(hk * xi) / sk;
            double contr = g.dot(xi) / sk;
            direct += contr * contr;
            double dscale = std::abs(xi.dot(hk * xi) / sk) + contr * contr +
                            std::abs(form.quad_form);
            acc[12].feed(std::abs(direct - form.quad_form) / std::max(dscale, 1e-300),
                         s);
          }
          {  // Maclaurin chain nonincreasing over j = 1..k
            double worst = 0.0;
            double prev = maclaurin_mean(table, n, 1);
            for (int j = 2; j <= k; ++j) {
              double cur = maclaurin_mean(table, n, j);
              worst = std::max(worst, (cur - prev) / std::max(prev, 1e-300));
              prev = cur;
            }
            acc[13].feed(std::max(0.0, worst), s);
          }
          {  // Newton inequality with the classical coefficient
            if (k >= 2) {
              double c = newton_inequality_coeff(n, k);
              double lhs = sk1 * sk1;
              double rhs = c * sk * ((k - 2 >= 0) ? table[k - 2] : 0.0);
              double scale = std::max({lhs, std::abs(rhs), 1e-300});
              acc[14].feed(std::max(0.0, (rhs - lhs) / scale), s);
            } else {
              acc[14].feed(0.0, s);
            }
          }
          {  // gradient and Hessian of sigma_k against central differences at
            // the default step; the Hessian stencil runs in double-double
            // because mixed signs push the entries below the plain rounding floor
            double h = fd_default_step(s.values());
            auto sig = [&](const VectorXd& x) { return sym_table_raw<double>(x)[k]; };
            VectorXd gfd = fd_gradient(sig, s.values(), h);
            double gscale = std::max(g.cwiseAbs().maxCoeff(), 1e-300);
            acc[15].feed((g - gfd).cwiseAbs().maxCoeff() / gscale, s);
            MatrixXd hk = hess_sigma(s, k);
            struct SigmaDD {
              int k;
              DDouble operator()(const VecX<DDouble>& x) const {
                return sym_table_raw<DDouble>(x)[k];
              }
            };
            MatrixXd hfd = fd_hessian_dd(SigmaDD{k}, s.values(), h);
            double hscale = std::max(hk.cwiseAbs().maxCoeff(), 1e-300);
            acc[16].feed((hk - hfd).cwiseAbs().maxCoeff() / hscale, s);
          }
        }
        pr.samples = accepted;
        for (int i = 0; i < NI; ++i) {
          pr.max_res[i] = acc[i].max_res;
          pr.worst[i] = acc[i].worst;
        }
        return pr;
      });

  std::vector<IdentityResult> out(NI);
  for (int i = 0; i < NI; ++i) {
    out[i].name = specs[i].name;
    out[i].tolerance = specs[i].tol * cfg.tolerance_scale;
    for (const PairResults& pr : per_pair) {
      out[i].samples += pr.samples;
      if (pr.max_res[i] > out[i].max_residual) {
        out[i].max_residual = pr.max_res[i];
        out[i].worst_witness = pr.worst[i];
      }
    }
    if (i == fault_idx) out[i].max_residual += 10.0 * std::max(out[i].tolerance, 1e-9);
    out[i].pass = specs[i].tol == 0.0 ? out[i].max_residual == 0.0
                                      : out[i].max_residual <= out[i].tolerance;
  }
  return out;
}

std::optional<std::string> first_failure(const std::vector<IdentityResult>& results) {
  for (const IdentityResult& r : results)
    if (!r.pass) return r.name;
  return std::nullopt;
}

}  // namespace hessianlab
