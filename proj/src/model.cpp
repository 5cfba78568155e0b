// Apache License, Version 2.0, refer to LICENSE.txt

#include "dpmix/model.hpp"

#include <cmath>
#include <string>

#include "dpmix/error.hpp"

namespace dpmix {

namespace {

constexpr int kRisingProductTrials = 32;

}  // namespace

void ModelSpec::validate() const {
  if (!(alpha > 0.0)) fail(ErrorCategory::domain, "alpha must be positive");
  if (!(base_a > 0.0) || !(base_b > 0.0))
    fail(ErrorCategory::domain, "base measure shape parameters must be positive");
  if (trials < 1) fail(ErrorCategory::domain, "trials must be at least 1");
}

void Dataset::validate() const {
  if (trials < 1) fail(ErrorCategory::domain, "trials must be at least 1");
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] < 0 || y[i] > trials)
      fail(ErrorCategory::range, "observation " + std::to_string(i + 1) + " = " +
                                     std::to_string(y[i]) + " outside [0, " +
                                     std::to_string(trials) + "]");
  }
}

BetaBinomial::BetaBinomial(const ModelSpec& model, std::size_t max_count) : model_(model) {
  model_.validate();
  const std::size_t span = (max_count + 1) * static_cast<std::size_t>(model_.trials) + 1;
  lgamma_a_.resize(span);
  lgamma_b_.resize(span);
  lgamma_ab_.resize(span);
  for (std::size_t m = 0; m < span; ++m) {
    const double dm = static_cast<double>(m);
    lgamma_a_[m] = std::lgamma(model_.base_a + dm);
    lgamma_b_[m] = std::lgamma(model_.base_b + dm);
    lgamma_ab_[m] = std::lgamma(model_.base_a + model_.base_b + dm);
  }
  log_choose_.resize(model_.trials + 1);
  for (int y = 0; y <= model_.trials; ++y) {
    log_choose_[y] = std::lgamma(model_.trials + 1.0) - std::lgamma(y + 1.0) -
                     std::lgamma(model_.trials - y + 1.0);
  }
  log_beta_ab_ = lgamma_a_[0] + lgamma_b_[0] - lgamma_ab_[0];
}

double BetaBinomial::lgamma_a(long m) const {
  return static_cast<std::size_t>(m) < lgamma_a_.size()
             ? lgamma_a_[m]
             : std::lgamma(model_.base_a + static_cast<double>(m));
}

double BetaBinomial::lgamma_b(long m) const {
  return static_cast<std::size_t>(m) < lgamma_b_.size()
             ? lgamma_b_[m]
             : std::lgamma(model_.base_b + static_cast<double>(m));
}

double BetaBinomial::lgamma_ab(long m) const {
  return static_cast<std::size_t>(m) < lgamma_ab_.size()
             ? lgamma_ab_[m]
             : std::lgamma(model_.base_a + model_.base_b + static_cast<double>(m));
}

double BetaBinomial::log_predictive(int y, const ClusterSuffStats& stats) const {
  const int J = model_.trials;
  const long s = stats.success_sum;
  const long f = stats.failure_sum;
  if (J <= kRisingProductTrials) {
    // ratios of gamma functions at integer offsets are finite rising products
    const double as = model_.base_a + static_cast<double>(s);
    const double bf = model_.base_b + static_cast<double>(f);
    double num = 1.0;
    for (int i = 0; i < y; ++i) num *= as + i;
    for (int i = 0; i < J - y; ++i) num *= bf + i;
    double den = 1.0;
    for (int i = 0; i < J; ++i) den *= as + bf + i;
    return log_choose_[y] + std::log(num / den);
  }
  // log C(J,y) + log B(a+s+y, b+f+J-y) - log B(a+s, b+f)
  return log_choose_[y] + lgamma_a(s + y) + lgamma_b(f + J - y) - lgamma_ab(s + f + J) -
         lgamma_a(s) - lgamma_b(f) + lgamma_ab(s + f);
}

double BetaBinomial::predictive(int y, const ClusterSuffStats& stats) const {
  return std::exp(log_predictive(y, stats));
}

double BetaBinomial::log_marginal_likelihood(const ClusterSuffStats& stats,
                                             double log_binomial_coefficients) const {
  const long s = stats.success_sum;
  const long f = stats.failure_sum;
  return log_binomial_coefficients + lgamma_a(s) + lgamma_b(f) - lgamma_ab(s + f) -
         log_beta_ab_;
}

void BetaBinomial::add(ClusterSuffStats& stats, int y) const {
  ++stats.count;
  stats.success_sum += y;
  stats.failure_sum += model_.trials - y;
}

void BetaBinomial::remove(ClusterSuffStats& stats, int y) const {
  --stats.count;
  stats.success_sum -= y;
  stats.failure_sum -= model_.trials - y;
}

double BetaBinomial::draw_atom(const ClusterSuffStats& stats, RngStream& rng) const {
  return rng.beta(model_.base_a + static_cast<double>(stats.success_sum),
                  model_.base_b + static_cast<double>(stats.failure_sum));
}

double BetaBinomial::log_likelihood(int y, double atom) const {
  const int J = model_.trials;
  // 0^0 = 1 so that atoms at the boundary stay well defined for y = 0 or y = J.
  const double lp = y == 0 ? 0.0 : y * std::log(atom);
  const double lq = y == J ? 0.0 : (J - y) * std::log1p(-atom);
  return log_choose_[y] + lp + lq;
}

double BetaBinomial::log_prior_density(double atom) const {
  return (model_.base_a - 1.0) * std::log(atom) + (model_.base_b - 1.0) * std::log1p(-atom) -
         log_beta_ab_;
}

double BetaBinomial::log_binomial_coefficient(int y) const {
  return log_choose_[y];
}

ClusterSuffStats suff_stats(std::span<const int> y, int trials) {
  ClusterSuffStats st;
  for (int yi : y) {
    ++st.count;
    st.success_sum += yi;
    st.failure_sum += trials - yi;
  }
  return st;
}

double marginal_predictive(int y, const ClusterSuffStats& stats, const ModelSpec& model) {
  model.validate();
  if (y < 0 || y > model.trials) fail(ErrorCategory::range, "observation outside [0, trials]");
  if (!stats.consistent(model.trials))
    fail(ErrorCategory::invalid_argument, "inconsistent cluster sufficient statistics");
  return BetaBinomial(model).predictive(y, stats);
}

double sample_atom_posterior(const ClusterSuffStats& stats, const ModelSpec& model,
                             RngStream& rng) {
  model.validate();
  if (!stats.consistent(model.trials))
    fail(ErrorCategory::invalid_argument, "inconsistent cluster sufficient statistics");
  return rng.beta(model.base_a + static_cast<double>(stats.success_sum),
                  model.base_b + static_cast<double>(stats.failure_sum));
}

}  // namespace dpmix
