#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "macjscc/errors.hpp"
#include "macjscc/rng.hpp"

namespace macjscc {

// Per-user power gain distribution, independent across users and time.
// Rates in this module follow the source material's fading-section
// convention: log2 with no 0.5 prefactor.
struct FadingModel {
  enum class Family { rayleigh_power, constant, discrete };

  Family family = Family::rayleigh_power;
  int m = 1;             // number of users
  double nu0 = 1.0;      // constant family gain
  std::vector<std::pair<double, double>> table;  // discrete (gain, prob)

  static FadingModel rayleigh(int m);
  static FadingModel constant(int m, double nu0);
  static FadingModel discrete(int m, std::vector<std::pair<double, double>> table);

  void validate() const;
  double mean_gain() const;
  double max_gain() const;            // finite families; +inf for rayleigh
  double draw(CounterRng& rng) const; // one gain sample
};

struct CsirResult {
  double rate = 0.0;        // per user, bits
  double se = 0.0;
  double upper_bound = 0.0; // per user, bits
  int64_t n = 0;
};

// Receiver-only channel knowledge: Monte Carlo estimate of the per-user sum
// rate (1/M) E[log2(1 + M P mean(nu) / sigma2)].  Constant fading is exact
// with zero standard error.
CsirResult csir_sum_rate(const FadingModel& model, double p, double sigma2,
                         int64_t n_mc, uint64_t seed);

// Per-subset-size rate bounds (1/k) E[log2(1 + P sum_{l<=k} nu_l / sigma2)]
// for k = 1..M; exposed for M <= 4.
std::vector<double> csir_subset_bounds(const FadingModel& model, double p, double sigma2,
                                       int64_t n_mc, uint64_t seed);

// Threshold of the best-user water-filling policy: solves
// (1/M) E[(1/lambda - 1/nu_max)+] = p_avg, with nu_max the maximum of the
// M user gains.  Residual below 1e-8 * p_avg.
double waterfill_lambda(const FadingModel& model, double p_avg);

// Transmitter and receiver channel knowledge under the best-user policy:
// (1/M) E[log2(1 + nu_max P(nu_max) / sigma2)], deterministic quadrature.
double csit_sum_rate(const FadingModel& model, double p_avg, double sigma2);

// Density of the maximum gain across M users (continuous families).
double max_gain_density(const FadingModel& model, double v);

}  // namespace macjscc
