// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dpmix/collapsed_gibbs.hpp"
#include "dpmix/model.hpp"
#include "dpmix/slice_sampler.hpp"
#include "dpmix/transcoding_sampler.hpp"

namespace dpmix {

struct IatEstimate {
  double tau = 0.5;
  std::size_t window = 0;  // lag M at which the sum was cut off
  bool truncated = false;  // the window rule never fired before lag N - 1
};

// Integrated autocorrelation time tau = 1/2 + sum_{l=1}^{M} rho_l with the
// self-consistent window M = min{l : l >= 10 tau(l)}. Autocovariances use the
// 1/N normalization. Negative estimates are reported as 0.
IatEstimate iat(std::span<const double> series);

// N / (1 + Var(W^)), W^_i = N W_i / sum W, from unnormalized log-weights.
double ess(std::span<const double> log_weights);

// D = -2 sum_i log sum_j (n_j / n) Binomial(y_i | J, theta_j) over occupied
// clusters j.
double deviance(const Dataset& data, std::span<const int> sizes, std::span<const double> atoms,
                const ModelSpec& model);
double deviance(const Dataset& data, const CollapsedState& state, const ModelSpec& model);
double deviance(const Dataset& data, const AugmentedDraw& draw, const ModelSpec& model);

struct Functionals {
  int K = 0;
  double D = 0.0;
  double theta1 = 0.0;
  int r1 = 0;
  double w1 = 0.0;
  double m1 = 0.0;
  double w_r1 = 0.0;
};

Functionals extract_functionals(const AugmentedDraw& draw, const Dataset& data,
                                const ModelSpec& model);
Functionals extract_functionals(const SliceState& state, const Dataset& data,
                                const ModelSpec& model);

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value.
TestResult ks_two_sample(std::vector<double> a, std::vector<double> b);
// Kolmogorov distribution tail Q(lambda) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2).
double kolmogorov_q(double lambda);

// Chi-square test of homogeneity for two count vectors over the same cells.
// Cells empty in both samples are dropped.
TestResult chi_square_two_sample(std::span<const double> counts_a, std::span<const double> counts_b);

}  // namespace dpmix
