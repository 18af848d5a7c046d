#include "hessianlab/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hessianlab/parallel.hpp"

namespace hessianlab {

namespace {

constexpr double kPenaltyWeight = 1e8;
constexpr double kInfeasible = std::numeric_limits<double>::infinity();

struct Decoded {
  VectorXd lambda_raw;  // lambda_1 slot + tail, pre-sort
  Spectrum lambda;      // canonical
  VectorXd xi;          // unit direction in the sorted frame
  bool xi_ok = true;
};

// z layout: [mu_lambda1 (absent in fixed mode)] [tail: n-1] [xi: n]
struct Param {
  const SearchConfig& cfg;
  int n;

  int dim() const { return (cfg.fix_lambda1 ? 0 : 1) + (n - 1) + n; }

  Decoded decode(const VectorXd& z) const {
    Decoded d{VectorXd(n), Spectrum(VectorXd::Ones(2)), VectorXd(n)};
    double l1;
    int off = 0;
    if (cfg.fix_lambda1) {
      l1 = cfg.lambda1_threshold;
    } else {
      double mu = z[0];
      l1 = cfg.lambda1_threshold + mu * mu;
      off = 1;
    }
    d.lambda_raw[0] = l1;
    for (int i = 0; i < n - 1; ++i) d.lambda_raw[i + 1] = z[off + i];
    d.lambda = Spectrum(d.lambda_raw);
    VectorXd xi_raw(n);
    for (int i = 0; i < n; ++i) xi_raw[i] = z[off + n - 1 + i];
    // ties the direction to the sorted frame so the objective stays
    // continuous across sorting boundaries
    VectorXd xi_sorted = d.lambda.permute_like(xi_raw);
    double nrm = xi_sorted.norm();
    if (nrm < 1e-12) {
      d.xi_ok = false;
      d.xi = VectorXd::Unit(n, 0);
    } else {
      d.xi = xi_sorted / nrm;
    }
    return d;
  }

  VectorXd encode(const Spectrum& lam, const VectorXd& xi_sorted) const {
    VectorXd z(dim());
    int off = 0;
    if (!cfg.fix_lambda1) {
      z[0] = std::sqrt(std::max(0.0, lam[0] - cfg.lambda1_threshold));
      off = 1;
    }
    for (int i = 0; i < n - 1; ++i) z[off + i] = lam[i + 1];
    // the sorted order is the identity permutation for a canonical spectrum
    for (int i = 0; i < n; ++i) z[off + n - 1 + i] = xi_sorted[i];
    return z;
  }
};

double hypothesis_penalty(const SearchConfig& cfg, const Spectrum& s) {
  if (!cfg.enforce_hypothesis) return 0.0;
  const IneqParams& p = cfg.params;
  double pen = 0.0;
  if (cfg.inequality == Ineq::lu) {
    pen += std::pow(std::max(0.0, p.delta * s[0] - s[p.l - 1]), 2);
    pen += std::pow(std::max(0.0, s[p.l] - p.delta_prime * s[0]), 2);
  } else if (cfg.inequality == Ineq::rw) {
    pen += std::pow(std::max(0.0, p.delta * s[0] - s[p.i - 1]), 2);
  }
  return pen;
}

bool hypothesis_holds(const SearchConfig& cfg, const Spectrum& s) {
  if (!cfg.enforce_hypothesis) return true;
  const IneqParams& p = cfg.params;
  if (cfg.inequality == Ineq::lu)
    return s[p.l - 1] >= p.delta * s[0] && s[p.l] <= p.delta_prime * s[0];
  if (cfg.inequality == Ineq::rw) return s[p.i - 1] >= p.delta * s[0];
  return true;
}

struct Objective {
  const SearchConfig& cfg;
  const Param& par;

  // best strictly feasible point seen, tracked across evaluations
  mutable double best_feasible = kInfeasible;
  mutable VectorXd best_lambda;
  mutable VectorXd best_xi;

  double operator()(const VectorXd& z) const {
    Decoded d = par.decode(z);
    if (!d.xi_ok) return 1e12;
    const ConeContext& ctx = cfg.ctx;
    const Spectrum& s = d.lambda;
    VectorXd table = sym_table(s.values());

    double pen = 0.0;
    for (int j = 1; j <= ctx.k; ++j) pen += std::pow(std::max(0.0, -table[j]), 2);
    pen += std::pow(std::max(0.0, -ctx.A - s[ctx.n - 1]), 2);
    pen += std::pow(std::max(0.0, table[ctx.k] - ctx.sigma_max), 2);
    pen += std::pow(std::max(0.0, ctx.sigma_min - table[ctx.k]), 2);
    // the lambda_1 slot must stay the largest entry
    pen += std::pow(std::max(0.0, s[0] - d.lambda_raw[0]), 2);
    pen += hypothesis_penalty(cfg, s);

    bool cone_ok = first_cone_failure(table, ctx.k) == 0;
    if (!cone_ok) return kPenaltyWeight * (pen + 1e-12);

    IneqParams params = cfg.params;
    if (cfg.tight_floor) params.A = std::max(0.0, -s[ctx.n - 1]);
    SGap<double> v = gap_core<double>(cfg.inequality, s.values(), d.xi, ctx.k,
                                      params);
    double obj = cfg.normalize_objective ? v.gap / v.scale : v.gap;
    double total = obj + kPenaltyWeight * pen;

    if (pen == 0.0 && table[ctx.k] >= ctx.sigma_min && table[ctx.k] <= ctx.sigma_max &&
        s[ctx.n - 1] >= -ctx.A && s[0] <= d.lambda_raw[0] && hypothesis_holds(cfg, s)) {
      if (obj < best_feasible) {
        best_feasible = obj;
        best_lambda = s.values();
        best_xi = d.xi;
      }
    }
    return total;
  }
};

// standard Nelder-Mead (reflection 1, expansion 2, contraction 1/2,
// shrink 1/2); deterministic for a fixed start
void nelder_mead(const Objective& f, VectorXd z0, int max_iters) {
  const int d = int(z0.size());
  std::vector<VectorXd> simplex(d + 1);
  std::vector<double> fv(d + 1);
  simplex[0] = z0;
  fv[0] = f(z0);
  for (int i = 0; i < d; ++i) {
    VectorXd z = z0;
    z[i] += 0.25 * std::max(std::abs(z[i]), 0.1);
    simplex[i + 1] = z;
    fv[i + 1] = f(z);
  }
  std::vector<int> order(d + 1);
  for (int it = 0; it < max_iters; ++it) {
    for (int i = 0; i <= d; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return fv[a] < fv[b]; });
    std::vector<VectorXd> sx(d + 1);
    std::vector<double> sf(d + 1);
    for (int i = 0; i <= d; ++i) {
      sx[i] = simplex[order[i]];
      sf[i] = fv[order[i]];
    }
    simplex.swap(sx);
    fv.swap(sf);

    VectorXd centroid = VectorXd::Zero(d);
    for (int i = 0; i < d; ++i) centroid += simplex[i];
    centroid /= double(d);

    VectorXd xr = centroid + (centroid - simplex[d]);
    double fr = f(xr);
    if (fr < fv[0]) {
      VectorXd xe = centroid + 2.0 * (centroid - simplex[d]);
      double fe = f(xe);
      if (fe < fr) {
        simplex[d] = xe;
        fv[d] = fe;
      } else {
        simplex[d] = xr;
        fv[d] = fr;
      }
    } else if (fr < fv[d - 1]) {
      simplex[d] = xr;
      fv[d] = fr;
    } else {
      VectorXd xc = centroid + 0.5 * (simplex[d] - centroid);
      double fc = f(xc);
      if (fc < fv[d]) {
        simplex[d] = xc;
        fv[d] = fc;
      } else {
        for (int i = 1; i <= d; ++i) {
          simplex[i] = simplex[0] + 0.5 * (simplex[i] - simplex[0]);
          fv[i] = f(simplex[i]);
        }
      }
    }
  }
}

// Free-lambda_1 start: draws a full spectrum shape (spread tails or a
// near-equal cluster) and scales the whole draw into the sigma_k window,
// which preserves the shape exactly.  Cluster shapes matter: several of the
// inequalities fail only where all entries are comparable.
std::optional<Spectrum> free_start(const SearchConfig& cfg, Rng& rng) {
  const ConeContext& ctx = cfg.ctx;
  const int n = ctx.n;
  for (int attempt = 0; attempt < 400; ++attempt) {
    double lo = std::max(cfg.lambda1_threshold, 1e-6);
    double t0 = rng.log_uniform(std::max(lo, 1e-3), std::max(cfg.lambda1_max, 2.0 * lo));
    bool cluster = rng.next_double() < 0.5;
    VectorXd lam(n);
    lam[0] = t0;
    for (int i = 1; i < n; ++i) {
      if (cluster) {
        lam[i] = t0 * rng.uniform(0.25, 1.0);
      } else {
        double mag = std::exp(rng.uniform(std::log(1e-6), 0.0));
        lam[i] = rng.uniform(-ctx.A, t0) * mag;
      }
    }
    Spectrum s(lam);
    VectorXd table = sym_table(s.values());
    if (first_cone_failure(table, ctx.k) != 0) continue;
    double margin = 1e-6 * (ctx.sigma_max - ctx.sigma_min);
    double target = rng.uniform(ctx.sigma_min + margin, ctx.sigma_max - margin);
    double t = std::pow(target / table[ctx.k], 1.0 / double(ctx.k));
    Spectrum scaled(VectorXd(t * s.values()));
    if (!witness_feasible(cfg, scaled)) continue;
    return scaled;
  }
  return std::nullopt;
}

// feasible start for one restart; respects the hypothesis stratum if enforced
std::optional<Spectrum> restart_start(const SearchConfig& cfg, Rng& rng) {
  const ConeContext& ctx = cfg.ctx;
  double lo_feasible =
      1.02 * std::pow(ctx.sigma_min / binom(ctx.n, ctx.k), 1.0 / double(ctx.k));
  double t0;
  if (cfg.fix_lambda1) {
    t0 = cfg.lambda1_threshold;
  } else {
    double lo = std::max(cfg.lambda1_threshold, lo_feasible);
    t0 = rng.log_uniform(std::max(lo, 1e-6), std::max(cfg.lambda1_max, 2.0 * lo));
  }

  if (cfg.enforce_hypothesis &&
      (cfg.inequality == Ineq::lu || cfg.inequality == Ineq::rw)) {
    const IneqParams& p = cfg.params;
    int head_len = (cfg.inequality == Ineq::lu) ? p.l : p.i;
    double tail_cap = (cfg.inequality == Ineq::lu) ? p.delta_prime * t0 * 0.99
                                                   : p.delta * t0 * 0.99;
    for (int attempt = 0; attempt < 200; ++attempt) {
      VectorXd head(head_len);
      head[0] = t0;
      for (int i = 1; i < head_len; ++i)
        head[i] = rng.uniform(p.delta * t0 * 1.01, t0);
      std::sort(head.data(), head.data() + head_len, std::greater<double>());
      VectorXd tail(ctx.n - head_len);
      for (int i = 0; i < ctx.n - head_len; ++i)
        tail[i] = rng.uniform(std::max(-ctx.A, -tail_cap), tail_cap);
      double margin = 1e-6 * (ctx.sigma_max - ctx.sigma_min);
      double target = rng.uniform(ctx.sigma_min + margin, ctx.sigma_max - margin);
      auto s = scale_tail_to_sigma(ctx, head, tail, target);
      if (s && witness_feasible(cfg, *s) && std::abs((*s)[0] - t0) < 1e-9 * t0)
        return s;
    }
    return std::nullopt;
  }
  if (!cfg.fix_lambda1) return free_start(cfg, rng);
  return sample_with_lambda1(ctx, t0, rng);
}

struct RestartOutcome {
  double best = kInfeasible;  // normalized feasible minimum
  VectorXd lambda;
  VectorXd xi;
};

}  // namespace

void SearchConfig::validate() const {
  ctx.validate();
  if (restarts < 1) throw Error("SearchConfig: restarts must be >= 1");
  if (max_iters < 1) throw Error("SearchConfig: max_iters must be >= 1");
  if (lambda1_threshold < 0.0) throw Error("SearchConfig: negative threshold");
  if (fix_lambda1 && lambda1_threshold <= 0.0)
    throw Error("SearchConfig: fixed lambda_1 must be positive");
}

bool witness_feasible(const SearchConfig& cfg, const Spectrum& lambda) {
  const ConeContext& ctx = cfg.ctx;
  if (lambda.n() != ctx.n) return false;
  VectorXd table = sym_table(lambda.values());
  if (first_cone_failure(table, ctx.k) != 0) return false;
  if (lambda[ctx.n - 1] < -ctx.A) return false;
  if (table[ctx.k] < ctx.sigma_min || table[ctx.k] > ctx.sigma_max) return false;
  if (cfg.fix_lambda1) {
    if (std::abs(lambda[0] - cfg.lambda1_threshold) > 1e-9 * cfg.lambda1_threshold)
      return false;
  } else if (lambda[0] < cfg.lambda1_threshold * (1.0 - 1e-12)) {
    return false;
  }
  if (!hypothesis_holds(cfg, lambda)) return false;
  return true;
}

SearchResult minimize_gap(const SearchConfig& cfg) {
  cfg.validate();
  const int n = cfg.ctx.n;
  Param par{cfg, n};

  std::vector<RestartOutcome> outcomes = parallel_map<RestartOutcome>(
      cfg.restarts, cfg.workers, [&](int r) {
        RestartOutcome out;
        Rng rng = Rng::stream(cfg.seed, std::uint64_t(r) + 1);
        auto start = restart_start(cfg, rng);
        if (!start) return out;
        VectorXd xi0 = rng.unit_vec(n);
        Objective obj{cfg, par};
        VectorXd z0 = par.encode(*start, xi0);
        nelder_mead(obj, z0, cfg.max_iters);
        if (obj.best_feasible < kInfeasible) {
          out.best = obj.best_feasible;
          out.lambda = obj.best_lambda;
          out.xi = obj.best_xi;
        }
        return out;
      });

  SearchResult result;
  result.trace.reserve(cfg.restarts);
  int best_idx = -1;
  for (int r = 0; r < cfg.restarts; ++r) {
    result.trace.push_back(outcomes[r].best);
    if (outcomes[r].best < kInfeasible &&
        (best_idx < 0 || outcomes[r].best < outcomes[best_idx].best))
      best_idx = r;
  }
  if (best_idx < 0) {
    result.converged = false;
    return result;
  }

  // rebuild the report from scratch at the winning witness
  Spectrum lam(outcomes[best_idx].lambda);
  IneqParams final_params = cfg.params;
  if (cfg.tight_floor) final_params.A = std::max(0.0, -lam[cfg.ctx.n - 1]);
  GapReport rep = evaluate_gap(cfg.inequality, lam, outcomes[best_idx].xi, cfg.ctx.k,
                               final_params);
  if (rep.gap < 0.0) {
    // counterexamples are re-evaluated in compensated arithmetic
    double dd = gap_core_compensated(cfg.inequality, lam.values(),
                                     outcomes[best_idx].xi, cfg.ctx.k, final_params);
    if (dd >= 0.0) rep.note = "compensated re-check overturned the sign";
    else rep.note = "verified in compensated arithmetic";
    rep.params["gap_compensated"] = dd;
  }
  result.best = rep;
  result.converged = true;
  return result;
}

ThresholdScanResult threshold_scan(const SearchConfig& cfg,
                                   const std::vector<double>& lambda1_grid,
                                   double tolerance_rel) {
  if (lambda1_grid.empty()) throw Error("threshold_scan: empty grid");
  for (size_t i = 1; i < lambda1_grid.size(); ++i)
    if (lambda1_grid[i] <= lambda1_grid[i - 1])
      throw Error("threshold_scan: grid must be ascending");

  ThresholdScanResult out;
  out.tolerance_rel = tolerance_rel;
  for (double t : lambda1_grid) {
    SearchConfig point = cfg;
    point.fix_lambda1 = true;
    point.lambda1_threshold = t;
    FrontierPoint fp;
    fp.lambda1 = t;
    SearchResult r = minimize_gap(point);
    if (r.best) {
      fp.feasible = true;
      fp.min_gap = r.best->gap;
      fp.scale = r.best->scale;
    }
    out.curve.push_back(fp);
  }

  auto nonneg = [&](const FrontierPoint& fp) {
    return fp.feasible && fp.min_gap >= -tolerance_rel * fp.scale;
  };
  // smallest t from which every feasible minimum stays nonnegative
  int m = int(out.curve.size());
  for (int i = 0; i < m; ++i) {
    if (!out.curve[i].feasible) continue;
    bool all_ok = true;
    for (int j = i; j < m; ++j)
      if (out.curve[j].feasible && !nonneg(out.curve[j])) all_ok = false;
    if (all_ok && nonneg(out.curve[i])) {
      out.threshold = out.curve[i].lambda1;
      break;
    }
  }
  // flag sign patterns other than neg* pos*
  bool seen_pos = false;
  for (const FrontierPoint& fp : out.curve) {
    if (!fp.feasible) continue;
    if (nonneg(fp)) seen_pos = true;
    else if (seen_pos) out.monotone = false;
  }
  return out;
}

double fit_rw_constant(const SearchConfig& cfg, double K0, int max_doublings,
                       double tolerance_rel) {
  double K = K0;
  for (int j = 0; j < max_doublings; ++j) {
    SearchConfig probe = cfg;
    probe.params.K = K;
    SearchResult r = minimize_gap(probe);
    if (r.best && r.best->gap >= -tolerance_rel * r.best->scale) return K;
    if (!r.best) throw Error("fit_rw_constant: no feasible witness found");
    K *= 2.0;
  }
  throw Error("fit_rw_constant: no K found within the doubling budget");
}

FitResult fit_constant(FitQuantity q, const SampleBatch& batch, int k,
                       std::uint64_t gamma_seed) {
  if (batch.spectra.empty()) throw Error("fit_constant: empty batch");
  FitResult out;
  out.is_sup = (q == FitQuantity::kappa_k_bound);
  bool first = true;
  for (size_t idx = 0; idx < batch.spectra.size(); ++idx) {
    const Spectrum& s = batch.spectra[idx];
    const int n = s.n();
    VectorXd table = sym_table(s.values());
    double ratio;
    switch (q) {
      case FitQuantity::kappa_k_bound: {
        double denom = 2.0 * std::abs(s[n - 1]);
        if (denom < 1e-12 * std::max(1.0, s[0])) {
          ++out.excluded;
          continue;
        }
        double excess = s[k - 1] - 2.0 * std::pow(table[k] / s[0], 1.0 / double(k - 1));
        ratio = std::max(0.0, excess) / denom;
        break;
      }
      case FitQuantity::sigma_km1_lower: {
        double denom = std::pow(table[1], 1.0 / double(k - 1)) *
                       std::pow(table[k], double(k - 2) / double(k - 1));
        if (denom < 1e-300) {
          ++out.excluded;
          continue;
        }
        ratio = table[k - 1] / denom;
        break;
      }
      case FitQuantity::quotient_chain: {
        Rng rng = Rng::stream(gamma_seed, idx + 1);
        VectorXd gamma = rng.unit_vec(n);
        double rhs = quotient_chain_rhs(s, gamma, k);
        if (rhs < 1e-14) {
          ++out.excluded;
          continue;
        }
        QuotientDerivatives qd = quotient_derivatives(s, k);
        double lhs = -table[k - 1] * gamma.dot(qd.hessian * gamma);
        ratio = lhs / rhs;
        break;
      }
      case FitQuantity::decomposition: {
        Rng rng = Rng::stream(gamma_seed, idx + 1);
        VectorXd gamma = decomposition_project(s, rng.unit_vec(n), k);
        double rhs = decomposition_rhs(s, gamma, k);
        if (rhs < 1e-14 || gamma.norm() < 1e-12) {
          ++out.excluded;
          continue;
        }
        QuotientDerivatives qd = quotient_derivatives(s, k);
        double lhs = -table[k - 1] * gamma.dot(qd.hessian * gamma);
        ratio = lhs / rhs;
        break;
      }
      default:
        throw Error("fit_constant: unknown quantity");
    }
    bool better = first || (out.is_sup ? ratio > out.extremal_ratio
                                       : ratio < out.extremal_ratio);
    if (better) {
      out.extremal_ratio = ratio;
      out.witness = s;
    }
    first = false;
  }
  if (first) throw Error("fit_constant: every sample was excluded");
  out.fitted = out.is_sup ? 1.05 * out.extremal_ratio : 0.95 * out.extremal_ratio;
  return out;
}

}  // namespace hessianlab
