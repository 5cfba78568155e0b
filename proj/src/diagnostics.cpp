// Apache License, Version 2.0, refer to LICENSE.txt

#include "dpmix/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/distributions/chi_squared.hpp>

#include "dpmix/error.hpp"

namespace dpmix {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

IatEstimate iat(std::span<const double> series) {
  const std::size_t N = series.size();
  if (N < 2) fail(ErrorCategory::invalid_argument, "IAT needs at least two values");
  double mean = 0.0;
  for (double x : series) {
    if (!std::isfinite(x)) fail(ErrorCategory::domain, "IAT series has a non-finite value");
    mean += x;
  }
  mean /= static_cast<double>(N);
  std::vector<double> c(N);
  double c0 = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    c[i] = series[i] - mean;
    c0 += c[i] * c[i];
  }
  if (c0 <= 0.0) fail(ErrorCategory::domain, "IAT of a constant series is undefined");

  IatEstimate out;
  double tau = 0.5;
  std::size_t l = 1;
  for (; l < N; ++l) {
    double cl = 0.0;
    const double* a = c.data();
    const double* b = c.data() + l;
    const std::size_t len = N - l;
    for (std::size_t i = 0; i < len; ++i) cl += a[i] * b[i];
    tau += cl / c0;
    if (static_cast<double>(l) >= 10.0 * tau) break;
  }
  if (l == N) {
    out.truncated = true;
    l = N - 1;
  }
  out.window = l;
  out.tau = std::max(tau, 0.0);
  return out;
}

double ess(std::span<const double> log_weights) {
  const std::size_t N = log_weights.size();
  if (N == 0) fail(ErrorCategory::invalid_argument, "ESS of an empty sample");
  double mx = kNegInf;
  for (double lw : log_weights) {
    if (std::isnan(lw) || lw == std::numeric_limits<double>::infinity())
      fail(ErrorCategory::domain, "log-weight is NaN or +inf");
    mx = std::max(mx, lw);
  }
  if (mx == kNegInf) fail(ErrorCategory::domain, "all importance weights are zero");
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double lw : log_weights) {
    const double w = std::exp(lw - mx);
    sum += w;
    sum_sq += w * w;
  }
  // With W^ = N W / sum W the mean of W^ is 1, so Var(W^) = N sum W^2 / (sum W)^2 - 1.
  const double n = static_cast<double>(N);
  const double var = n * sum_sq / (sum * sum) - 1.0;
  return n / (1.0 + std::max(var, 0.0));
}

double deviance(const Dataset& data, std::span<const int> sizes, std::span<const double> atoms,
                const ModelSpec& model) {
  if (sizes.size() != atoms.size())
    fail(ErrorCategory::invalid_argument, "cluster sizes and atoms differ in length");
  if (sizes.empty()) fail(ErrorCategory::invalid_argument, "deviance needs at least one cluster");
  long n = 0;
  for (std::size_t j = 0; j < sizes.size(); ++j) {
    if (sizes[j] < 0) fail(ErrorCategory::invalid_argument, "negative cluster size");
    if (sizes[j] > 0 && !(atoms[j] > 0.0 && atoms[j] < 1.0))
      fail(ErrorCategory::domain, "atom outside (0, 1)");
    n += sizes[j];
  }
  if (n == 0) fail(ErrorCategory::invalid_argument, "all clusters are empty");
  BetaBinomial family(model);
  const int J = model.trials;

  // Mixture density per possible count value, then weighted by occurrences.
  std::vector<double> log_mix(J + 1);
  std::vector<double> terms;
  for (int y = 0; y <= J; ++y) {
    terms.clear();
    for (std::size_t j = 0; j < sizes.size(); ++j) {
      if (sizes[j] == 0) continue;
      terms.push_back(std::log(static_cast<double>(sizes[j]) / static_cast<double>(n)) +
                      family.log_likelihood(y, atoms[j]));
    }
    const double mx = *std::max_element(terms.begin(), terms.end());
    double s = 0.0;
    for (double t : terms) s += std::exp(t - mx);
    log_mix[y] = mx + std::log(s);
  }
  double total = 0.0;
  for (int y : data.y) {
    if (y < 0 || y > J) fail(ErrorCategory::range, "observation outside [0, trials]");
    total += log_mix[y];
  }
  return -2.0 * total;
}

double deviance(const Dataset& data, const CollapsedState& state, const ModelSpec& model) {
  const std::size_t k = state.clusters.size();
  std::vector<int> sizes(k);
  std::vector<double> atoms(k);
  for (std::size_t i = 0; i < state.s.size(); ++i) {
    const std::size_t j = static_cast<std::size_t>(state.s[i]) - 1;
    atoms[j] = state.theta[i];
  }
  for (std::size_t j = 0; j < k; ++j) sizes[j] = state.clusters[j].count;
  return deviance(data, sizes, atoms, model);
}

double deviance(const Dataset& data, const AugmentedDraw& draw, const ModelSpec& model) {
  const std::vector<int> sizes = ooa_sizes(draw.s.values());
  std::vector<double> atoms(sizes.size());
  for (std::size_t i = 0; i < draw.s.size(); ++i)
    atoms[static_cast<std::size_t>(draw.s[i]) - 1] = draw.theta[i];
  return deviance(data, sizes, atoms, model);
}

Functionals extract_functionals(const AugmentedDraw& draw, const Dataset& data,
                                const ModelSpec& model) {
  Functionals f;
  f.K = draw.s.cluster_count();
  f.D = deviance(data, draw, model);
  f.r1 = draw.trans.r[0];
  const std::size_t h1 = static_cast<std::size_t>(f.r1) - 1;
  f.theta1 = draw.m[h1];
  f.w1 = draw.trans.w_prefix.weight(0);
  f.m1 = draw.m[0];
  f.w_r1 = draw.trans.w_prefix.weight(h1);
  return f;
}

Functionals extract_functionals(const SliceState& state, const Dataset& data,
                                const ModelSpec& model) {
  const std::size_t H = state.m.size();
  std::vector<int> sizes(H, 0);
  for (std::size_t i = 0; i < state.r.size(); ++i) ++sizes[static_cast<std::size_t>(state.r[i]) - 1];
  Functionals f;
  f.K = static_cast<int>(std::count_if(sizes.begin(), sizes.end(), [](int c) { return c > 0; }));
  f.D = deviance(data, sizes, state.m, model);
  f.r1 = state.r[0];
  const std::size_t h1 = static_cast<std::size_t>(f.r1) - 1;
  f.theta1 = state.m[h1];
  f.w1 = state.w.weight(0);
  f.m1 = state.m[0];
  f.w_r1 = state.w.weight(h1);
  return f;
}

double kolmogorov_q(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.2) return 1.0;  // the alternating series converges too slowly; Q is 1 to double precision
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += (j % 2 == 1) ? term : -term;
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

TestResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) fail(ErrorCategory::invalid_argument, "KS test needs two non-empty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = na * nb / (na + nb);
  const double sq = std::sqrt(ne);
  TestResult out;
  out.statistic = d;
  out.p_value = kolmogorov_q((sq + 0.12 + 0.11 / sq) * d);
  return out;
}

TestResult chi_square_two_sample(std::span<const double> counts_a, std::span<const double> counts_b) {
  if (counts_a.size() != counts_b.size())
    fail(ErrorCategory::invalid_argument, "count vectors differ in length");
  const double na = std::accumulate(counts_a.begin(), counts_a.end(), 0.0);
  const double nb = std::accumulate(counts_b.begin(), counts_b.end(), 0.0);
  if (na <= 0.0 || nb <= 0.0) fail(ErrorCategory::invalid_argument, "empty sample in chi-square test");
  const double total = na + nb;
  double stat = 0.0;
  int cells = 0;
  for (std::size_t c = 0; c < counts_a.size(); ++c) {
    const double row = counts_a[c] + counts_b[c];
    if (row <= 0.0) continue;
    ++cells;
    const double ea = row * na / total;
    const double eb = row * nb / total;
    stat += (counts_a[c] - ea) * (counts_a[c] - ea) / ea + (counts_b[c] - eb) * (counts_b[c] - eb) / eb;
  }
  TestResult out;
  out.statistic = stat;
  if (cells < 2) return out;
  boost::math::chi_squared dist(cells - 1);
  out.p_value = boost::math::cdf(boost::math::complement(dist, stat));
  return out;
}

}  // namespace dpmix
