#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace qrep {

struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;  // standard error of the mean
  std::size_t n = 0;
};

MeanStderr mean_stderr(const std::vector<double>& x);

// Wilson score interval for a binomial proportion (95% by default).
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double v) const { return lo <= v && v <= hi; }
};
Interval wilson_interval(std::size_t successes, std::size_t trials,
                         double z = 1.959963984540054);

// sqrt(p(1-p)/n) for a binomial proportion estimate.
double binomial_stderr(std::size_t successes, std::size_t trials);

// Percentile bootstrap CI of the mean; resampling is deterministic in
// (seed, resample index).
Interval bootstrap_mean_ci(const std::vector<std::uint32_t>& x,
                           std::size_t resamples, std::uint64_t seed,
                           double level = 0.95);

// Standard error of the mean of a correlated series via batch means.
double batch_means_stderr(const std::vector<double>& x, std::size_t n_batches);

// Jackknife (leave-one-batch-out) standard error of an arbitrary statistic
// evaluated on a set of per-batch accumulators.
double jackknife_stderr(
    std::size_t n_batches,
    const std::function<double(std::size_t /*excluded, n_batches==skip none*/)>&
        stat_excluding);

// One-sample Kolmogorov-Smirnov test: D statistic of samples against a CDF,
// and the asymptotic p-value Q_KS(sqrt(n) D).
struct KsResult {
  double d = 0.0;
  double p = 0.0;
};
KsResult ks_test(std::vector<double> samples,
                 const std::function<double(double)>& cdf);

// Survival function of the Kolmogorov distribution.
double kolmogorov_q(double lambda);

// Binary entropy with the 0 log 0 = 0 convention, in bits.
double binary_entropy(double p);

}  // namespace qrep
