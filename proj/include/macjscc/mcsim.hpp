#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "macjscc/errors.hpp"
#include "macjscc/gmac.hpp"
#include "macjscc/orthogonal.hpp"
#include "macjscc/rng.hpp"

namespace macjscc {

// One-pass mean and variance accumulator with an exact merge, so batches can
// be combined in a fixed order independent of execution schedule.
class RunningStat {
 public:
  void add(double x) {
    ++n_;
    double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
  }

  void merge(const RunningStat& other);

  int64_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const;  // sample variance (n - 1 denominator)
  double standard_error() const;

 private:
  int64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

struct SimConfig {
  uint64_t seed = 0;
  int64_t n_samples = 1000000;
  int64_t batch = 65536;
  // Worker count; 0 picks the hardware concurrency.  Results depend only on
  // (seed, n_samples, batch), never on the thread count.
  int threads = 0;

  void validate() const;
};

struct SimResult {
  double d1 = 0.0, d2 = 0.0;  // empirical mean squared errors
  double se1 = 0.0, se2 = 0.0;
  int64_t n = 0;
  double d1_closed = 0.0, d2_closed = 0.0;
  double z1 = 0.0, z2 = 0.0;  // (empirical - closed) / se
};

// Uncoded transmission over the adder channel: scaled source samples in,
// per-user linear decode from Y, empirical MSE against the closed form.
SimResult simulate_af_gmac(const GaussianSourcePair& s, const GmacSpec& g, const SimConfig& cfg);

// Uncoded transmission over per-user channels, optionally combining encoder
// side observations and optionally handing them to the decoder as well.
// Absent arguments mean no side observations / pure source transmission.
SimResult simulate_af_orth(const GaussianSourcePair& s, const OrthogonalSpec& spec,
                           const std::optional<SideInfoModel>& si,
                           const std::optional<LinearCombiner>& comb, bool decoder_si,
                           const SimConfig& cfg);

// -(1/n) sum log2 density(sample), with the standard error of the mean.
// Sampler draws a point from the distribution the density describes:
//   sample = sampler(rng); f = density(sample).
template <class Density, class Sampler>
std::pair<double, double> estimate_entropy_mc(Density&& density, Sampler&& sampler,
                                              const SimConfig& cfg) {
  cfg.validate();
  RunningStat stat;
  int64_t done = 0;
  uint64_t bidx = 0;
  while (done < cfg.n_samples) {
    int64_t count = std::min(cfg.batch, cfg.n_samples - done);
    CounterRng rng(cfg.seed, bidx);
    for (int64_t i = 0; i < count; ++i) {
      auto x = sampler(rng);
      double f = density(x);
      if (!(f > 0.0))
        throw numerical_error("estimate_entropy_mc: density not positive at sample " +
                              std::to_string(done + i));
      stat.add(-std::log2(f));
    }
    done += count;
    ++bidx;
  }
  return {stat.mean(), stat.standard_error()};
}

}  // namespace macjscc
