#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "hessianlab/types.hpp"

namespace hessianlab {

// Eigenvalue vector stored sorted descending.  All symmetric-function
// operations take their input through this canonical form, which makes the
// results independent of the caller's ordering bit for bit.  Ties keep the
// original relative order.
class Spectrum {
 public:
  explicit Spectrum(VectorXd values) {
    const int n = int(values.size());
    if (n < 2) throw Error("Spectrum: dimension must be >= 2");
    for (int i = 0; i < n; ++i)
      if (!std::isfinite(values[i])) throw Error("Spectrum: non-finite entry");
    perm_.resize(n);
    std::iota(perm_.begin(), perm_.end(), 0);
    std::stable_sort(perm_.begin(), perm_.end(),
                     [&](int a, int b) { return values[a] > values[b]; });
    v_.resize(n);
    for (int i = 0; i < n; ++i) v_[i] = values[perm_[i]];
  }

  int n() const { return int(v_.size()); }
  const VectorXd& values() const { return v_; }
  double operator[](int i) const { return v_[i]; }

  // original index of the i-th sorted entry
  const std::vector<int>& sort_permutation() const { return perm_; }

  // applies the canonicalizing permutation to a companion vector (e.g. a
  // direction attached to the eigenvalues in the caller's ordering)
  VectorXd permute_like(const VectorXd& w) const {
    VectorXd out(w.size());
    for (int i = 0; i < int(perm_.size()); ++i) out[i] = w[perm_[i]];
    return out;
  }

 private:
  VectorXd v_;
  std::vector<int> perm_;
};

}  // namespace hessianlab
