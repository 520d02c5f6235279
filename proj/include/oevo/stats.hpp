#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace oevo {

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

struct TwoProportionResult {
  double z = 0.0;
  double p_value = 1.0;  // one-sided, H1: p1 > p2
};

// Pooled two-proportion z-test. Degenerate pools (identical pooled rate of
// 0 or 1) carry no evidence either way and return p = 1 unless the counts
// actually differ, which cannot happen there.
inline TwoProportionResult two_proportion_test(std::size_t hits1, std::size_t n1,
                                               std::size_t hits2, std::size_t n2) {
  TwoProportionResult r;
  if (n1 == 0 || n2 == 0) return r;
  const double p1 = static_cast<double>(hits1) / static_cast<double>(n1);
  const double p2 = static_cast<double>(hits2) / static_cast<double>(n2);
  const double pooled = static_cast<double>(hits1 + hits2) / static_cast<double>(n1 + n2);
  const double se = std::sqrt(pooled * (1.0 - pooled) *
                              (1.0 / static_cast<double>(n1) + 1.0 / static_cast<double>(n2)));
  if (se == 0.0) return r;
  r.z = (p1 - p2) / se;
  r.p_value = 1.0 - normal_cdf(r.z);
  return r;
}

struct WilcoxonResult {
  double z = 0.0;
  double p_value = 1.0;  // one-sided, H1: median difference > 0
  std::size_t n_used = 0;
  double w_plus = 0.0;
};

// Signed-rank test with the normal approximation, average ranks for tied
// magnitudes, zero differences dropped, and a continuity correction.
inline WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& diffs) {
  WilcoxonResult r;
  std::vector<double> d;
  for (double v : diffs) {
    if (v != 0.0) d.push_back(v);
  }
  r.n_used = d.size();
  if (d.empty()) return r;
  std::vector<std::size_t> order(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::fabs(d[a]) < std::fabs(d[b]);
  });
  std::vector<double> rank(d.size(), 0.0);
  double tie_term = 0.0;
  std::size_t i = 0;
  while (i < d.size()) {
    std::size_t j = i;
    while (j + 1 < d.size() && std::fabs(d[order[j + 1]]) == std::fabs(d[order[i]])) ++j;
    const double shared = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = shared;
    const double t = static_cast<double>(j - i + 1);
    tie_term += t * t * t - t;
    i = j + 1;
  }
  for (std::size_t k = 0; k < d.size(); ++k) {
    if (d[k] > 0.0) r.w_plus += rank[k];
  }
  const double n = static_cast<double>(d.size());
  const double mean = n * (n + 1.0) / 4.0;
  const double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
  if (var <= 0.0) {
    r.p_value = r.w_plus > mean ? 0.0 : 1.0;
    return r;
  }
  r.z = (r.w_plus - mean - 0.5) / std::sqrt(var);
  r.p_value = 1.0 - normal_cdf(r.z);
  return r;
}

}  // namespace oevo
