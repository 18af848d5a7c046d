#include "hessianlab/cone.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

namespace hessianlab {

using nlohmann::json;

double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * double(n - k + i) / double(i);
  return r;
}

ConeCheck in_cone(const Spectrum& lambda, int k) {
  VectorXd t = sym_table(lambda.values());
  int j = first_cone_failure(t, k);
  return {j == 0, j};
}

void ConeContext::validate() const {
  if (n < 2 || k < 2 || k > n) throw Error("ConeContext: need 2 <= k <= n");
  if (A < 0.0) throw Error("ConeContext: A must be >= 0");
  if (!(sigma_min > 0.0) || sigma_min > sigma_max)
    throw Error("ConeContext: need 0 < sigma_min <= sigma_max");
}

std::string StratumSpec::name() const {
  switch (kind) {
    case Stratum::interior:
      return "interior";
    case Stratum::near_boundary:
      return "near-boundary";
    case Stratum::claim_regime:
      return "claim-regime(l=" + std::to_string(l) + ",M=" + std::to_string(M) + ")";
  }
  return "?";
}

namespace {

bool sigma_in_window(const VectorXd& table, const ConeContext& ctx) {
  return table[ctx.k] >= ctx.sigma_min && table[ctx.k] <= ctx.sigma_max;
}

bool stratum_ok(const Spectrum& s, const ConeContext& ctx, const StratumSpec& st) {
  VectorXd table = sym_table(s.values());
  if (first_cone_failure(table, ctx.k) != 0) return false;
  if (s[ctx.n - 1] < -ctx.A) return false;
  if (!sigma_in_window(table, ctx)) return false;
  if (st.kind == Stratum::near_boundary) {
    if (table[ctx.k] > 1.05 * ctx.sigma_min) return false;
  } else if (st.kind == Stratum::claim_regime) {
    if (!(s[st.l - 1] > st.M && st.M >= s[st.l])) return false;
  }
  return true;
}

std::optional<Spectrum> draw_interior(const ConeContext& ctx, const StratumSpec& st,
                                      Rng& rng, double lambda1_max) {
  const int n = ctx.n;
  VectorXd lam(n);
  lam[0] = rng.log_uniform(1.0, lambda1_max);
  for (int i = 1; i < n; ++i) lam[i] = rng.uniform(-ctx.A, lam[0]);
  Spectrum s(lam);
  VectorXd table = sym_table(s.values());
  if (first_cone_failure(table, ctx.k) != 0) return std::nullopt;

  double lo = ctx.sigma_min, hi = ctx.sigma_max;
  if (st.kind == Stratum::near_boundary) hi = std::min(hi, 1.05 * ctx.sigma_min);
  // stay a hair inside the window so the post-scaling exact re-check is
  // immune to the k-th-root rounding
  double margin = 1e-6 * (hi - lo);
  double target = rng.uniform(lo + margin, hi - margin);
  double t = std::pow(target / table[ctx.k], 1.0 / double(ctx.k));
  Spectrum scaled(VectorXd(t * s.values()));
  if (!stratum_ok(scaled, ctx, st)) return std::nullopt;
  return scaled;
}

std::optional<Spectrum> draw_claim(const ConeContext& ctx, const StratumSpec& st,
                                   Rng& rng, double lambda1_max) {
  const int n = ctx.n;
  if (st.l < 1 || st.l >= ctx.k) throw Error("sample: claim-regime needs 1 <= l < k");
  if (2.0 * st.M >= lambda1_max) return std::nullopt;  // split cannot fit under the cap
  VectorXd head(st.l);
  head[0] = rng.log_uniform(std::max(1.0, 2.0 * st.M), lambda1_max);
  for (int i = 1; i < st.l; ++i)
    head[i] = rng.uniform(st.M * (1.0 + 1e-9), head[0]);
  std::sort(head.data(), head.data() + st.l, std::greater<double>());
  VectorXd tail(n - st.l);
  for (int i = 0; i < n - st.l; ++i) tail[i] = rng.uniform(-ctx.A, st.M * (1.0 - 1e-9));
  std::sort(tail.data(), tail.data() + tail.size(), std::greater<double>());
  double margin = 1e-6 * (ctx.sigma_max - ctx.sigma_min);
  double target = rng.uniform(ctx.sigma_min + margin, ctx.sigma_max - margin);
  auto s = scale_tail_to_sigma(ctx, head, tail, target);
  if (s && stratum_ok(*s, ctx, st)) return s;
  return std::nullopt;
}

}  // namespace

std::optional<Spectrum> scale_tail_to_sigma(const ConeContext& ctx,
                                            const VectorXd& head,
                                            const VectorXd& tail_shape,
                                            double target) {
  const int n = ctx.n;
  const int hl = int(head.size());
  if (hl < 1 || hl >= n) throw Error("scale_tail_to_sigma: bad head size");
  auto assemble = [&](double c) {
    VectorXd lam(n);
    lam.head(hl) = head;
    lam.tail(n - hl) = c * tail_shape;
    return Spectrum(lam);
  };
  auto sigma_k_of = [&](double c) { return sym_table(assemble(c).values())[ctx.k]; };
  double flo = sigma_k_of(0.0) - target;
  double fhi = sigma_k_of(1.0) - target;
  if (flo * fhi >= 0.0) return std::nullopt;
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if ((sigma_k_of(mid) - target) * flo > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  Spectrum s = assemble(0.5 * (lo + hi));
  VectorXd table = sym_table(s.values());
  if (first_cone_failure(table, ctx.k) != 0) return std::nullopt;
  if (table[ctx.k] < ctx.sigma_min || table[ctx.k] > ctx.sigma_max) return std::nullopt;
  if (s[n - 1] < -ctx.A) return std::nullopt;
  return s;
}

SampleBatch sample(const ConeContext& ctx, const StratumSpec& stratum, int count,
                   std::uint64_t seed, double lambda1_max) {
  ctx.validate();
  if (count < 1) throw Error("sample: count must be >= 1");
  SampleBatch batch;
  batch.seed = seed;
  batch.stratum = stratum;
  batch.spectra.reserve(count);
  const long budget = std::max(200000L, 20000L * long(count));
  long tried = 0;
  Rng rng = Rng::stream(seed, 0);
  while (int(batch.spectra.size()) < count && tried < budget) {
    ++tried;
    std::optional<Spectrum> s =
        (stratum.kind == Stratum::claim_regime)
            ? draw_claim(ctx, stratum, rng, lambda1_max)
            : draw_interior(ctx, stratum, rng, lambda1_max);
    if (s) batch.spectra.push_back(*s);
  }
  batch.acceptance_rate = double(batch.spectra.size()) / double(tried);
  if (int(batch.spectra.size()) < count) {
    std::ostringstream os;
    os << "sample: rejection budget exhausted for stratum " << stratum.name()
       << " (accepted " << batch.spectra.size() << "/" << count
       << ", acceptance rate " << batch.acceptance_rate << ")";
    throw Error(os.str());
  }
  return batch;
}

std::optional<Spectrum> sample_with_lambda1(const ConeContext& ctx, double lambda1,
                                            Rng& rng) {
  ctx.validate();
  const int n = ctx.n;
  for (int attempt = 0; attempt < 400; ++attempt) {
    VectorXd head(1);
    head[0] = lambda1;
    VectorXd tail(n - 1);
    for (int i = 0; i < n - 1; ++i) {
      double mag = std::exp(rng.uniform(std::log(1e-6), 0.0));
      tail[i] = rng.uniform(-ctx.A, lambda1 * (1.0 - 1e-9)) * mag;
    }
    std::sort(tail.data(), tail.data() + tail.size(), std::greater<double>());
    double margin = 1e-6 * (ctx.sigma_max - ctx.sigma_min);
    double target = rng.uniform(ctx.sigma_min + margin, ctx.sigma_max - margin);
    auto s = scale_tail_to_sigma(ctx, head, tail, target);
    if (s && std::abs((*s)[0] - lambda1) <= 1e-12 * lambda1) return s;
  }
  return std::nullopt;
}

LemmaOrderingResult check_lemma_ordering(const Spectrum& lambda, int k) {
  const int n = lambda.n();
  VectorXd table = sym_table(lambda.values());
  require_in_cone(table, k, "check_lemma_ordering");
  double lk = lambda[k - 1];
  double res = double(n - k) * lk - std::abs(lambda[n - 1]);
  double scale = std::max(1.0, std::abs(lk));
  return {lk, res, std::abs(res) <= 1e-12 * scale};
}

SemiconvexBoundResult empirical_semiconvex_bound(int n, int k, double sigma_min,
                                                 double sigma_max, double A,
                                                 int samples, std::uint64_t seed) {
  if (k > n - 1) throw Error("empirical_semiconvex_bound: needs k <= n-1");
  // wide floor: the lemma itself is what bounds lambda_n, so sampling must
  // not clip it; the sigma_{k+1} > -A filter is applied afterwards
  ConeContext wide{n, k, 10.0 * (1.0 + A), sigma_min, sigma_max};
  SemiconvexBoundResult out{0.0, {}, 0};
  Rng rng = Rng::stream(seed, 1);
  const long budget = std::max(200000L, 20000L * long(samples));
  long tried = 0;
  while (int(out.accepted.size()) < samples && tried < budget) {
    ++tried;
    VectorXd lam(n);
    lam[0] = rng.log_uniform(1.0, 1e4);
    for (int i = 1; i < n; ++i) lam[i] = rng.uniform(-wide.A, lam[0]);
    Spectrum cand(lam);
    VectorXd table = sym_table(cand.values());
    if (first_cone_failure(table, k) != 0) continue;
    double margin = 1e-6 * (sigma_max - sigma_min);
    double target = rng.uniform(sigma_min + margin, sigma_max - margin);
    double t = std::pow(target / table[k], 1.0 / double(k));
    Spectrum scaled(VectorXd(t * cand.values()));
    VectorXd ts = sym_table(scaled.values());
    if (first_cone_failure(ts, k) != 0) continue;
    if (ts[k] < sigma_min || ts[k] > sigma_max) continue;
    if (ts[k + 1] <= -A) continue;  // the sigma_{k+1} > -A hypothesis
    out.accepted.push_back(std::move(scaled));
  }
  out.tried = int(tried);
  if (out.accepted.empty())
    throw Error("empirical_semiconvex_bound: no sample satisfied the hypotheses");
  for (const Spectrum& s : out.accepted)
    out.bound = std::max(out.bound, std::abs(s[n - 1]));
  return out;
}

KappaBoundResult check_kappa_k_bound(const Spectrum& lambda, int k, double A,
                                     double C_fit) {
  const int n = lambda.n();
  VectorXd table = sym_table(lambda.values());
  require_in_cone(table, k, "check_kappa_k_bound");
  if (lambda[n - 1] < -A) throw Error("check_kappa_k_bound: lambda_n below -A");
  double rhs = 2.0 * std::pow(table[k] / lambda[0], 1.0 / double(k - 1)) +
               2.0 * C_fit * std::abs(lambda[n - 1]);
  int branch = (lambda[k - 2] > A) ? 0 : 1;
  return {rhs - lambda[k - 1], branch};
}

double check_sigma_km1_lower(const Spectrum& lambda, int k, double C_chain,
                             double sigma_k_lower) {
  VectorXd table = sym_table(lambda.values());
  require_in_cone(table, k, "check_sigma_km1_lower");
  double c_fit = C_chain * std::pow(sigma_k_lower, double(k - 2) / double(k - 1));
  return table[k - 1] - c_fit * std::pow(lambda[0], 1.0 / double(k - 1));
}

double newton_inequality_coeff(int n, int k) {
  return double(k) * double(n - k + 2) / (double(k - 1) * double(n - k + 1));
}

double maclaurin_mean(const VectorXd& sigma_table, int n, int j) {
  return std::pow(sigma_table[j] / binom(n, j), 1.0 / double(j));
}

std::string batch_to_jsonl(const SampleBatch& batch) {
  std::ostringstream os;
  for (const Spectrum& s : batch.spectra) {
    json line;
    line["lambda"] = std::vector<double>(s.values().data(),
                                         s.values().data() + s.n());
    line["seed"] = batch.seed;
    line["stratum"] = batch.stratum.name();
    os << line.dump() << "\n";
  }
  return os.str();
}

SampleBatch batch_from_jsonl(const std::string& text) {
  SampleBatch batch;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    std::vector<double> v = j.at("lambda").get<std::vector<double>>();
    batch.seed = j.value("seed", std::uint64_t(0));
    batch.spectra.emplace_back(Eigen::Map<VectorXd>(v.data(), long(v.size())));
  }
  return batch;
}

}  // namespace hessianlab
