// Garding-cone membership, stratified rejection samplers over Gamma_k and
// the empirical checks for the section-2 bound lemmas.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hessianlab/spectrum.hpp"
#include "hessianlab/symfun.hpp"
#include "hessianlab/types.hpp"

namespace hessianlab {

double binom(int n, int k);

struct ConeCheck {
  bool inside;
  int failing_j;  // smallest j with sigma_j <= 0, 0 when inside
};

ConeCheck in_cone(const Spectrum& lambda, int k);

// Hypothesis set of the main inequality: dimension, operator order, the
// semiconvexity floor lambda_n >= -A and the admissible sigma_k window.
struct ConeContext {
  int n = 0;
  int k = 0;
  double A = 0.0;          // floor: lambda_n >= -A
  double sigma_min = 1.0;  // 0 < sigma_min <= sigma_max
  double sigma_max = 1.0;

  void validate() const;
};

enum class Stratum { interior, near_boundary, claim_regime };

struct StratumSpec {
  Stratum kind = Stratum::interior;
  int l = 1;        // claim split index (lambda_l > M >= lambda_{l+1}), l < k
  double M = 10.0;  // claim split threshold

  std::string name() const;
};

struct SampleBatch {
  std::vector<Spectrum> spectra;
  std::uint64_t seed = 0;
  StratumSpec stratum;
  double acceptance_rate = 0.0;
};

// Rejection sampler.  lambda_1 is drawn log-uniform over [1, lambda1_max]
// (four decades by default), the remaining entries uniform in [-A, lambda_1];
// the draw is scaled to land sigma_k inside the context window and every
// stratum predicate is re-checked exactly after scaling.
SampleBatch sample(const ConeContext& ctx, const StratumSpec& stratum, int count,
                   std::uint64_t seed, double lambda1_max = 1e4);

// Draws a spectrum with lambda_1 pinned to the given value: the tail shape is
// random and a tail multiplier is bisected so that sigma_k hits the window.
// Used by the threshold scans and as a feasible-start generator.
std::optional<Spectrum> sample_with_lambda1(const ConeContext& ctx, double lambda1,
                                            Rng& rng);

// Keeps the head entries fixed and bisects a multiplier c in (0,1] on the
// tail shape until sigma_k hits the target; returns a spectrum inside the
// cone with sigma_k in the context window, or nullopt if the target is
// unreachable.  Head predicates are preserved exactly.
std::optional<Spectrum> scale_tail_to_sigma(const ConeContext& ctx,
                                            const VectorXd& head,
                                            const VectorXd& tail_shape,
                                            double target);

struct LemmaOrderingResult {
  double lambda_k;   // must be > 0 on Gamma_k
  double residual;   // (n-k) lambda_k - |lambda_n|, must be > 0 (k < n)
  bool tight;        // equality-limit case (all-equal spectrum with n-k = 1)
};

LemmaOrderingResult check_lemma_ordering(const Spectrum& lambda, int k);

struct SemiconvexBoundResult {
  double bound;  // max |lambda_n| over accepted samples
  std::vector<Spectrum> accepted;
  int tried = 0;
};

// Empirical lower estimate of the semiconvexity constant: over sampled
// lambda in Gamma_k with sigma_k in range and sigma_{k+1} > -A, the largest
// observed |lambda_n|.
SemiconvexBoundResult empirical_semiconvex_bound(int n, int k, double sigma_min,
                                                 double sigma_max, double A,
                                                 int samples, std::uint64_t seed);

struct KappaBoundResult {
  double gap;  // RHS - lambda_k with RHS = 2 (sigma_k/lambda_1)^{1/(k-1)} + 2 C |lambda_n|
  int branch;  // 0: lambda_{k-1} > A (main branch), 1: lambda_k <= A (trivial)
};

KappaBoundResult check_kappa_k_bound(const Spectrum& lambda, int k, double A,
                                     double C_fit);

// sigma_{k-1} - C_fit * lambda_1^{1/(k-1)} with
// C_fit = C_chain * m^{(k-2)/(k-1)}, m the sigma_k lower bound
double check_sigma_km1_lower(const Spectrum& lambda, int k, double C_chain,
                             double sigma_k_lower);

// classical Newton-inequality coefficient: sigma_{k-1}^2 >= c sigma_k sigma_{k-2}
double newton_inequality_coeff(int n, int k);

// (sigma_j / C(n,j))^{1/j}; nonincreasing in j along the Maclaurin chain
double maclaurin_mean(const VectorXd& sigma_table, int n, int j);

// JSON-lines batch export/import: one {"lambda": [...], "seed": ..,
// "stratum": ".."} object per line
std::string batch_to_jsonl(const SampleBatch& batch);
SampleBatch batch_from_jsonl(const std::string& text);

}  // namespace hessianlab
