#include "causim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace causim {

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double stddev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

double standard_error(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return stddev(v) / std::sqrt(static_cast<double>(v.size()));
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n % 2 == 1) return v[n / 2];
  return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double pearson_corr(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2)
    throw std::invalid_argument("pearson_corr: series must have equal length >= 2");
  const double ma = mean(a), mb = mean(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

double wilcoxon_signed_rank_p_greater(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("wilcoxon: series must have equal length");
  std::vector<double> diffs;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    if (d != 0.0) diffs.push_back(d);
  }
  const std::size_t n = diffs.size();
  if (n == 0) return 1.0;

  // Rank |d| with average ranks for ties; track ranks in half units so they
  // stay integral for the DP.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return std::fabs(diffs[i]) < std::fabs(diffs[j]); });

  std::vector<std::int64_t> half_rank(n, 0);  // 2 * rank
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && std::fabs(diffs[order[j + 1]]) == std::fabs(diffs[order[i]])) ++j;
    // positions i..j share ranks i+1..j+1; average rank in half units:
    const std::int64_t hr = static_cast<std::int64_t>(i + 1 + j + 1);  // 2 * avg
    for (std::size_t k = i; k <= j; ++k) half_rank[order[k]] = hr;
    i = j + 1;
  }

  std::int64_t w_plus2 = 0;  // 2 * W+
  std::int64_t total2 = 0;
  for (std::size_t k = 0; k < n; ++k) {
    total2 += half_rank[k];
    if (diffs[k] > 0.0) w_plus2 += half_rank[k];
  }

  // Exact null distribution of 2*W+ by DP: each rank joins the positive set
  // independently with probability 1/2.
  std::vector<double> dist(static_cast<std::size_t>(total2) + 1, 0.0);
  dist[0] = 1.0;
  std::int64_t upper = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const std::int64_t r = half_rank[k];
    upper += r;
    for (std::int64_t s = upper; s >= r; --s) dist[s] = 0.5 * (dist[s] + dist[s - r]);
    for (std::int64_t s = r - 1; s >= 0; --s) dist[s] = 0.5 * dist[s];
  }
  double p = 0.0;
  for (std::int64_t s = w_plus2; s <= total2; ++s) p += dist[s];
  return std::min(1.0, p);
}

}  // namespace causim
