// Apache License, Version 2.0, refer to LICENSE.txt
//
// Brute-force reference computations for tests. Nothing here calls the
// probability code under test; quantities are built from direct products,
// enumeration and numerical quadrature.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <vector>

namespace oracle {

// All set partitions of n items as restricted growth strings with labels from 1.
inline std::vector<std::vector<int>> set_partitions(int n) {
  std::vector<std::vector<int>> out;
  if (n == 0) return out;
  std::vector<int> a(n, 1);
  std::function<void(int, int)> rec = [&](int i, int mx) {
    if (i == n) {
      out.push_back(a);
      return;
    }
    for (int v = 1; v <= mx + 1; ++v) {
      a[i] = v;
      rec(i + 1, std::max(mx, v));
    }
  };
  a[0] = 1;
  rec(1, 1);
  return out;
}

// Block sizes indexed by label (labels 1..max).
inline std::vector<int> label_counts(const std::vector<int>& labels) {
  const int mx = *std::max_element(labels.begin(), labels.end());
  std::vector<int> n(mx, 0);
  for (int l : labels) ++n[l - 1];
  return n;
}

// Cluster sizes in order of first appearance.
inline std::vector<int> appearance_sizes(const std::vector<int>& labels) {
  std::vector<int> order;
  std::map<int, int> count;
  for (int l : labels) {
    if (count[l]++ == 0) order.push_back(l);
  }
  std::vector<int> out;
  for (int l : order) out.push_back(count[l]);
  return out;
}

inline double factorial(int m) {
  double f = 1.0;
  for (int i = 2; i <= m; ++i) f *= i;
  return f;
}

// alpha^k prod (n_j - 1)! / (alpha (alpha + 1) ... (alpha + n - 1)).
inline double eppf_direct(const std::vector<int>& sizes, double alpha) {
  int n = 0;
  double num = 1.0;
  for (int s : sizes) {
    num *= alpha * factorial(s - 1);
    n += s;
  }
  double den = 1.0;
  for (int i = 0; i < n; ++i) den *= alpha + i;
  return num / den;
}

// Probability of generating s label by label from the Polya urn.
inline double polya_path(const std::vector<int>& s, double alpha) {
  std::vector<int> n;
  double p = 1.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double denom = alpha + static_cast<double>(i);
    if (s[i] == static_cast<int>(n.size()) + 1) {
      p *= alpha / denom;
      n.push_back(1);
    } else {
      p *= n[s[i] - 1] / denom;
      ++n[s[i] - 1];
    }
  }
  return p;
}

// Composite Simpson rule with m (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int m = 4000) {
  const double h = (b - a) / m;
  double s = f(a) + f(b);
  for (int i = 1; i < m; ++i) s += f(a + i * h) * ((i % 2) ? 4.0 : 2.0);
  return s * h / 3.0;
}

inline double binomial_pmf(int y, int J, double p) {
  double c = 1.0;
  for (int i = 1; i <= y; ++i) c = c * (J - y + i) / i;
  return c * std::pow(p, y) * std::pow(1.0 - p, J - y);
}

// int prod_i Binomial(y_i | J, theta) Beta(theta | a, b) d theta, with a, b >= 1.
inline double marginal_likelihood(const std::vector<int>& ys, int J, double a, double b) {
  auto prior_kernel = [&](double t) { return std::pow(t, a - 1.0) * std::pow(1.0 - t, b - 1.0); };
  const double z = simpson(prior_kernel, 0.0, 1.0);
  auto f = [&](double t) {
    double l = prior_kernel(t);
    for (int y : ys) l *= binomial_pmf(y, J, t);
    return l;
  };
  return simpson(f, 0.0, 1.0) / z;
}

// Posterior predictive of y given the data already in a cluster.
inline double predictive(int y, const std::vector<int>& cluster, int J, double a, double b) {
  std::vector<int> with = cluster;
  with.push_back(y);
  return marginal_likelihood(with, J, a, b) / marginal_likelihood(cluster, J, a, b);
}

// Exact posterior over all set partitions of the data: EPPF x block marginal
// likelihoods, normalized. Keyed by restricted growth string.
inline std::map<std::vector<int>, double> partition_posterior(const std::vector<int>& y, int J,
                                                              double alpha, double a, double b) {
  std::map<std::vector<int>, double> post;
  double z = 0.0;
  for (const auto& s : set_partitions(static_cast<int>(y.size()))) {
    const std::vector<int> sizes = label_counts(s);
    double p = eppf_direct(sizes, alpha);
    for (int j = 1; j <= static_cast<int>(sizes.size()); ++j) {
      std::vector<int> block;
      for (std::size_t i = 0; i < y.size(); ++i)
        if (s[i] == j) block.push_back(y[i]);
      p *= marginal_likelihood(block, J, a, b);
    }
    post[s] = p;
    z += p;
  }
  for (auto& kv : post) kv.second /= z;
  return post;
}

// Stick-breaking prior probability of a label vector r:
// prod_h E[v_h^{n_h} (1 - v_h)^{sum_{l>h} n_l}], v_h ~ Beta(1, alpha).
inline double prior_r(const std::vector<int>& r, double alpha) {
  const std::vector<int> n = label_counts(r);
  double p = 1.0;
  for (std::size_t h = 0; h < n.size(); ++h) {
    int tail = 0;
    for (std::size_t l = h + 1; l < n.size(); ++l) tail += n[l];
    // alpha B(1 + n_h, alpha + tail)
    p *= alpha * std::exp(std::lgamma(1.0 + n[h]) + std::lgamma(alpha + tail) -
                          std::lgamma(1.0 + alpha + n[h] + tail));
  }
  return p;
}

// p(r | s) for r consistent with s.
inline double posterior_r_given_s(const std::vector<int>& r, const std::vector<int>& s,
                                  double alpha) {
  return prior_r(r, alpha) / eppf_direct(label_counts(s), alpha);
}

// All r consistent with s whose stick labels are at most hmax, with p(r | s).
inline std::map<std::vector<int>, double> r_given_s_table(const std::vector<int>& s, double alpha,
                                                          int hmax) {
  const int k = *std::max_element(s.begin(), s.end());
  std::map<std::vector<int>, double> out;
  std::vector<int> rstar(k);
  std::vector<char> used(hmax + 1, 0);
  std::function<void(int)> rec = [&](int j) {
    if (j == k) {
      std::vector<int> r(s.size());
      for (std::size_t i = 0; i < s.size(); ++i) r[i] = rstar[s[i] - 1];
      out[r] = posterior_r_given_s(r, s, alpha);
      return;
    }
    for (int h = 1; h <= hmax; ++h) {
      if (used[h]) continue;
      used[h] = 1;
      rstar[j] = h;
      rec(j + 1);
      used[h] = 0;
    }
  };
  rec(0);
  return out;
}

// Prior marginal of the first observation's stick: alpha^{h-1} / (alpha + 1)^h.
inline double prior_r1(int h, double alpha) {
  return std::pow(alpha, h - 1) / std::pow(alpha + 1.0, h);
}

// Total variation between two empirical count tables over the union of keys.
template <class Key>
double total_variation(const std::map<Key, double>& p, const std::map<Key, double>& q) {
  std::map<Key, double> diff;
  for (const auto& [k, v] : p) diff[k] += v;
  for (const auto& [k, v] : q) diff[k] -= v;
  double tv = 0.0;
  for (const auto& [k, v] : diff) tv += std::abs(v);
  return 0.5 * tv;
}

template <class Key>
std::map<Key, double> normalize(const std::map<Key, long>& counts) {
  double n = 0.0;
  for (const auto& [k, c] : counts) n += static_cast<double>(c);
  std::map<Key, double> out;
  for (const auto& [k, c] : counts) out[k] = static_cast<double>(c) / n;
  return out;
}

}  // namespace oracle
