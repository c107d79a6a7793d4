#include "simresnet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "simresnet/errors.hpp"

namespace simresnet {

double picture_error(const std::vector<Vec>& outputs, double target) {
  if (outputs.empty()) throw std::invalid_argument("picture_error: no outputs");
  if (!std::isfinite(target)) throw std::invalid_argument("picture_error: non-finite target");
  double eta = 0.0;
  for (const Vec& out : outputs)
    for (double component : out) eta += std::abs(component - target);
  return eta;
}

std::pair<double, double> aggregate_errors(const std::vector<double>& etas) {
  if (etas.empty()) throw std::invalid_argument("aggregate_errors: empty list");
  const double p = static_cast<double>(etas.size());
  double mean = 0.0;
  for (double e : etas) mean += e;
  mean /= p;
  double var = 0.0;
  for (double e : etas) var += (e - mean) * (e - mean);
  var /= p;
  return {mean, var};
}

Histogram histogram(const std::vector<double>& values, std::size_t bin_count) {
  if (values.empty()) throw std::invalid_argument("histogram: empty sample");
  if (bin_count == 0) throw std::invalid_argument("histogram: bin_count must be >= 1");

  auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  double lo = *lo_it, hi = *hi_it;

  Histogram h;
  if (lo == hi) {
    double eps = std::max(std::abs(lo), 1.0) * 1e-9;
    h.edges = {lo - eps, lo + eps};
    h.counts = {values.size()};
    return h;
  }

  h.edges.resize(bin_count + 1);
  for (std::size_t i = 0; i <= bin_count; ++i)
    h.edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bin_count);
  h.edges.front() = lo;
  h.edges.back() = hi;

  h.counts.assign(bin_count, 0);
  const double width = (hi - lo) / static_cast<double>(bin_count);
  for (double v : values) {
    auto bin = static_cast<std::size_t>((v - lo) / width);
    if (bin >= bin_count) bin = bin_count - 1;  // hi lands in the closed last bin
    ++h.counts[bin];
  }
  return h;
}

LognormalFit fit_lognormal(const std::vector<double>& values) {
  if (values.size() < 2) throw std::invalid_argument("fit_lognormal: need >= 2 samples");
  for (double v : values)
    if (!(v > 0.0)) throw std::domain_error("fit_lognormal: non-positive sample");

  double mu = 0.0;
  for (double v : values) mu += std::log(v);
  mu /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) {
    double r = std::log(v) - mu;
    var += r * r;
  }
  var /= static_cast<double>(values.size());
  double s = std::sqrt(var);
  if (!(s > 0.0)) throw DegenerateFitError("fit_lognormal: constant sample, s would be 0");
  return {mu, s};
}

}  // namespace simresnet
