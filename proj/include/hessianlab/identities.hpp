// The identity suite: every algebraic identity and pointwise inequality of
// the symmetric-function layer, checked over stratified Gamma_k samples with
// per-identity scales and tolerances.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hessianlab/spectrum.hpp"
#include "hessianlab/types.hpp"

namespace hessianlab {

struct IdentitySuiteConfig {
  int n_min = 3;
  int n_max = 6;
  int samples_per_pair = 2000;  // per (n, k)
  std::uint64_t seed = 20240001;
  int workers = 1;
  double tolerance_scale = 1.0;  // multiplies every identity tolerance
  std::string fault = "";       // test hook: name of an identity to corrupt
};

struct IdentityResult {
  std::string name;
  double max_residual = 0.0;  // worst relative residual over all samples
  double tolerance = 0.0;     // after tolerance_scale
  long samples = 0;
  bool pass = true;
  std::string worst_witness;  // lambda of the worst sample, compact text
};

std::vector<IdentityResult> run_identity_suite(const IdentitySuiteConfig& cfg);

// convenience: first failing identity, if any
std::optional<std::string> first_failure(const std::vector<IdentityResult>& results);

}  // namespace hessianlab
