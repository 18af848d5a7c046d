// Adversarial minimization of inequality gaps over constrained (lambda, xi)
// space: multi-start Nelder-Mead in an unconstrained parameterization with
// feasibility penalties, exact re-validation of every reported witness,
// threshold estimation and extremal-ratio constant fitting.
#pragma once

#include <optional>
#include <vector>

#include "hessianlab/concavity.hpp"
#include "hessianlab/cone.hpp"
#include "hessianlab/types.hpp"

namespace hessianlab {

struct SearchConfig {
  Ineq inequality = Ineq::main;
  ConeContext ctx;          // n, k, floor A, sigma_k window
  IneqParams params;        // constants of the inequality under attack
  int restarts = 64;
  int max_iters = 400;
  std::uint64_t seed = 0;
  double lambda1_threshold = 0.0;  // 0 = free; else search restricted to lambda_1 >= T
  bool fix_lambda1 = false;        // pin lambda_1 = lambda1_threshold exactly
  double lambda1_max = 1e4;
  bool normalize_objective = true;  // minimize gap/scale instead of the raw gap
  bool enforce_hypothesis = false;  // lu / rw stratum becomes part of the constraint set
  bool tight_floor = false;         // main/weak take A = max(0, -lambda_n) per sample
  int workers = 0;                  // 0 = default parallelism

  void validate() const;
};

struct SearchResult {
  std::optional<GapReport> best;  // minimal-gap feasible witness (absent if none found)
  std::vector<double> trace;      // per-restart minimum (normalized), +inf when infeasible
  bool converged = false;
  std::optional<double> threshold_estimate;
};

SearchResult minimize_gap(const SearchConfig& cfg);

// strict feasibility of a witness against the config's constraint set
bool witness_feasible(const SearchConfig& cfg, const Spectrum& lambda);

struct FrontierPoint {
  double lambda1;
  double min_gap = 0.0;
  double scale = 1.0;
  bool feasible = false;
};

struct ThresholdScanResult {
  std::vector<FrontierPoint> curve;
  std::optional<double> threshold;  // smallest grid t with nonnegative tail of minima
  bool monotone = true;             // sign pattern is neg* pos*
  double tolerance_rel;
};

// runs minimize_gap with lambda_1 pinned at each grid value (ascending) and
// returns the smallest t from which every minimum stays above -tol*scale
ThresholdScanResult threshold_scan(const SearchConfig& cfg,
                                   const std::vector<double>& lambda1_grid,
                                   double tolerance_rel = 1e-9);

// smallest K of the form K0 * 2^j for which the rw search finds no gap below
// -tol*scale; used to pin the existential constant of the k = n-1 inequality
double fit_rw_constant(const SearchConfig& cfg, double K0 = 1.0,
                       int max_doublings = 24, double tolerance_rel = 1e-9);

enum class FitQuantity {
  kappa_k_bound,     // sup (lambda_k - 2 (sigma_k/lambda_1)^{1/(k-1)}) / (2 |lambda_n|)
  sigma_km1_lower,   // inf sigma_{k-1} / (sigma_1^{1/(k-1)} sigma_k^{(k-2)/(k-1)})
  quotient_chain,    // inf LHS/RHS of the quotient-chain bound, random gamma
  decomposition      // inf LHS/RHS of the Lemma-2.7 decomposition, projected gamma
};

struct FitResult {
  double extremal_ratio = 0.0;
  double fitted = 0.0;  // safety-margined constant (0.95x inf or 1.05x sup)
  std::optional<Spectrum> witness;
  int excluded = 0;  // samples dropped for undefined ratios
  bool is_sup = false;
};

FitResult fit_constant(FitQuantity q, const SampleBatch& batch, int k,
                       std::uint64_t gamma_seed = 0);

}  // namespace hessianlab
