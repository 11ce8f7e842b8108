#include "qrep/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qrep/rng.hpp"

namespace qrep {

MeanStderr mean_stderr(const std::vector<double>& x) {
  MeanStderr r;
  r.n = x.size();
  if (r.n == 0) return r;
  double s = 0.0;
  for (double v : x) s += v;
  r.mean = s / static_cast<double>(r.n);
  if (r.n < 2) return r;
  double ss = 0.0;
  for (double v : x) ss += (v - r.mean) * (v - r.mean);
  double var = ss / static_cast<double>(r.n - 1);
  r.stderr_ = std::sqrt(var / static_cast<double>(r.n));
  return r;
}

Interval wilson_interval(std::size_t successes, std::size_t trials, double z) {
  if (trials == 0) return {0.0, 1.0};
  double n = static_cast<double>(trials);
  double p = static_cast<double>(successes) / n;
  double z2 = z * z;
  double denom = 1.0 + z2 / n;
  double center = (p + z2 / (2.0 * n)) / denom;
  double half = z / denom * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

double binomial_stderr(std::size_t successes, std::size_t trials) {
  if (trials == 0) return 0.0;
  double n = static_cast<double>(trials);
  double p = static_cast<double>(successes) / n;
  return std::sqrt(p * (1.0 - p) / n);
}

Interval bootstrap_mean_ci(const std::vector<std::uint32_t>& x,
                           std::size_t resamples, std::uint64_t seed,
                           double level) {
  if (x.empty() || resamples == 0) return {0.0, 0.0};
  std::vector<double> means(resamples);
  std::size_t n = x.size();
  for (std::size_t b = 0; b < resamples; ++b) {
    Rng rng(seed, b);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[rng.below(n)];
    means[b] = s / static_cast<double>(n);
  }
  std::sort(means.begin(), means.end());
  double alpha = (1.0 - level) / 2.0;
  auto pick = [&](double q) {
    double pos = q * static_cast<double>(resamples - 1);
    std::size_t i = static_cast<std::size_t>(pos);
    double frac = pos - static_cast<double>(i);
    if (i + 1 >= resamples) return means.back();
    return means[i] * (1.0 - frac) + means[i + 1] * frac;
  };
  return {pick(alpha), pick(1.0 - alpha)};
}

double batch_means_stderr(const std::vector<double>& x, std::size_t n_batches) {
  if (x.size() < 2 * n_batches || n_batches < 2) {
    return mean_stderr(x).stderr_;
  }
  std::size_t per = x.size() / n_batches;
  std::vector<double> bm(n_batches, 0.0);
  for (std::size_t b = 0; b < n_batches; ++b) {
    double s = 0.0;
    for (std::size_t i = 0; i < per; ++i) s += x[b * per + i];
    bm[b] = s / static_cast<double>(per);
  }
  return mean_stderr(bm).stderr_;
}

double jackknife_stderr(
    std::size_t n_batches,
    const std::function<double(std::size_t)>& stat_excluding) {
  if (n_batches < 2) return 0.0;
  std::vector<double> leave(n_batches);
  for (std::size_t b = 0; b < n_batches; ++b) leave[b] = stat_excluding(b);
  double m = 0.0;
  for (double v : leave) m += v;
  m /= static_cast<double>(n_batches);
  double ss = 0.0;
  for (double v : leave) ss += (v - m) * (v - m);
  double nb = static_cast<double>(n_batches);
  return std::sqrt((nb - 1.0) / nb * ss);
}

double kolmogorov_q(double lambda) {
  if (lambda < 1e-8) return 1.0;
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += (j % 2 == 1 ? 1.0 : -1.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_test(std::vector<double> samples,
                 const std::function<double(double)>& cdf) {
  KsResult r;
  if (samples.empty()) return r;
  std::sort(samples.begin(), samples.end());
  double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    double f = cdf(samples[i]);
    double lo = static_cast<double>(i) / n;
    double hi = static_cast<double>(i + 1) / n;
    d = std::max(d, std::max(std::abs(f - lo), std::abs(hi - f)));
  }
  r.d = d;
  double sn = std::sqrt(n);
  // Stephens' small-sample correction keeps p usable at moderate n.
  r.p = kolmogorov_q((sn + 0.12 + 0.11 / sn) * d);
  return r;
}

double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

}  // namespace qrep
