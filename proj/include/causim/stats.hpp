#pragma once

#include <vector>

namespace causim {

double mean(const std::vector<double>& v);
double stddev(const std::vector<double>& v);  // sample (n-1); 0 for n < 2
double standard_error(const std::vector<double>& v);
double median(std::vector<double> v);
double pearson_corr(const std::vector<double>& a, const std::vector<double>& b);

// One-sided Wilcoxon signed-rank test of H1: median(a - b) > 0.
// Zero differences are dropped, ties get average ranks, and the p-value is
// exact: the null distribution of the rank sum is enumerated by dynamic
// programming over the observed (half-integer) ranks.
double wilcoxon_signed_rank_p_greater(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace causim
