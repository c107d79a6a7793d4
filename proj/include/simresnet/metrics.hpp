#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "simresnet/linalg.hpp"

namespace simresnet {

// Per-picture error sums eta_j with their corpus statistics. theta is the
// population variance (1/P), not the unbiased 1/(P-1) form.
struct ErrorReport {
  std::vector<std::pair<std::string, double>> per_picture;
  double eta_bar = 0.0;
  double theta = 0.0;
  std::size_t picture_count = 0;
};

struct Histogram {
  Vec edges;  // ascending, counts.size() + 1 entries
  std::vector<std::size_t> counts;
};

struct LognormalFit {
  double mu = 0.0;  // log-space mean
  double s = 0.0;   // log-space population standard deviation, > 0
};

// eta_j = sum_i ||x_i(T) - h_j * 1||_1 over the M measurement outputs.
double picture_error(const std::vector<Vec>& outputs, double target);

// (eta_bar, theta) with the printed 1/P normalization in both.
std::pair<double, double> aggregate_errors(const std::vector<double>& etas);

// Equal-width bins over [min, max]; right-open except the last bin. A
// constant sample collapses to one epsilon-expanded bin.
Histogram histogram(const std::vector<double>& values, std::size_t bin_count);

// Log-moment matching. Requires >= 2 strictly positive values and a
// nondegenerate spread.
LognormalFit fit_lognormal(const std::vector<double>& values);

}  // namespace simresnet
