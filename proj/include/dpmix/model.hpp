// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <concepts>
#include <cstddef>
#include <span>
#include <vector>

#include "dpmix/rng.hpp"

namespace dpmix {

// DP precision plus the Beta(base_a, base_b) base measure of a binomial
// mixture with `trials` draws per observation.
struct ModelSpec {
  double alpha = 1.0;
  double base_a = 1.0;
  double base_b = 1.0;
  int trials = 1;

  void validate() const;
};

// Observed success counts, one per unit, all out of the same number of trials.
// Row order is significant for sequential importance sampling.
struct Dataset {
  int trials = 1;
  std::vector<int> y;

  std::size_t size() const noexcept { return y.size(); }
  void validate() const;
};

struct ClusterSuffStats {
  int count = 0;
  long success_sum = 0;
  long failure_sum = 0;

  bool empty() const noexcept { return count == 0; }
  bool consistent(int trials) const noexcept {
    return count >= 0 && success_sum >= 0 && failure_sum >= 0 &&
           success_sum + failure_sum == static_cast<long>(count) * trials;
  }
  friend bool operator==(const ClusterSuffStats&, const ClusterSuffStats&) = default;
};

// The interface a conjugate likelihood/base-measure pair has to offer to the
// samplers: prior/posterior predictive, incremental stats updates, posterior
// atom draws, and the likelihood and prior density at a fixed atom.
template <class F>
concept ConjugateFamily = requires(const F f, ClusterSuffStats& st,
                                   const ClusterSuffStats& cst, int y,
                                   double atom, RngStream& rng) {
  { f.log_predictive(y, cst) } -> std::convertible_to<double>;
  { f.add(st, y) };
  { f.remove(st, y) };
  { f.draw_atom(cst, rng) } -> std::convertible_to<double>;
  { f.log_likelihood(y, atom) } -> std::convertible_to<double>;
  { f.log_prior_density(atom) } -> std::convertible_to<double>;
};

// Binomial likelihood with a conjugate Beta base measure.
//
// Beta functions in the marginal likelihood are evaluated through log-gamma.
// Arguments are always base_a + m, base_b + m or base_a + base_b + m for a
// non-negative integer m, so log-gamma values are tabulated once up to
// `max_count` observations and computed on the fly beyond that. Predictives for
// small trial counts use the equivalent finite rising products, which avoid the
// cancellation between large log-gamma values.
class BetaBinomial {
 public:
  explicit BetaBinomial(const ModelSpec& model, std::size_t max_count = 0);

  const ModelSpec& model() const noexcept { return model_; }
  int trials() const noexcept { return model_.trials; }

  // log p(y | cluster data) with the atom integrated against its posterior.
  double log_predictive(int y, const ClusterSuffStats& stats) const;
  double predictive(int y, const ClusterSuffStats& stats) const;

  // log of the joint marginal likelihood of all observations in a cluster,
  // including the binomial coefficients of its members' counts.
  double log_marginal_likelihood(const ClusterSuffStats& stats,
                                 double log_binomial_coefficients) const;

  void add(ClusterSuffStats& stats, int y) const;
  void remove(ClusterSuffStats& stats, int y) const;

  // Draw from Beta(base_a + successes, base_b + failures).
  double draw_atom(const ClusterSuffStats& stats, RngStream& rng) const;

  double log_likelihood(int y, double atom) const;
  double log_prior_density(double atom) const;
  double log_binomial_coefficient(int y) const;

 private:
  double lgamma_a(long m) const;
  double lgamma_b(long m) const;
  double lgamma_ab(long m) const;

  ModelSpec model_;
  std::vector<double> lgamma_a_;
  std::vector<double> lgamma_b_;
  std::vector<double> lgamma_ab_;
  std::vector<double> log_choose_;
  double log_beta_ab_ = 0.0;
};

static_assert(ConjugateFamily<BetaBinomial>);

ClusterSuffStats suff_stats(std::span<const int> y, int trials);

double marginal_predictive(int y, const ClusterSuffStats& stats, const ModelSpec& model);

double sample_atom_posterior(const ClusterSuffStats& stats, const ModelSpec& model,
                             RngStream& rng);

}  // namespace dpmix
