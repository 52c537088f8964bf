#pragma once

#include <vector>

namespace dcs::detail {

// Advances `c` (sorted, size k, entries in [0, n)) to the next combination
// in lexicographic order; false after the last one.
inline bool NextCombination(std::vector<int>& c, int n) {
  const int k = static_cast<int>(c.size());
  int i = k - 1;
  while (i >= 0 && c[i] == n - k + i) --i;
  if (i < 0) return false;
  ++c[i];
  for (int j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
  return true;
}

inline std::vector<int> FirstCombination(int k) {
  std::vector<int> c(k);
  for (int i = 0; i < k; ++i) c[i] = i;
  return c;
}

// C(n, k) in floating point (exact for the magnitudes used as budgets).
inline double Binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace dcs::detail
