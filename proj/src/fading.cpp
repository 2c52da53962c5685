#include "macjscc/fading.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "macjscc/numeric.hpp"

namespace macjscc {

FadingModel FadingModel::rayleigh(int m) { return FadingModel{Family::rayleigh_power, m, 1.0, {}}; }

FadingModel FadingModel::constant(int m, double nu0) {
  return FadingModel{Family::constant, m, nu0, {}};
}

FadingModel FadingModel::discrete(int m, std::vector<std::pair<double, double>> table) {
  return FadingModel{Family::discrete, m, 1.0, std::move(table)};
}

void FadingModel::validate() const {
  if (m < 1) throw input_error("FadingModel: need at least one user");
  switch (family) {
    case Family::rayleigh_power:
      break;
    case Family::constant:
      if (!(nu0 > 0.0)) throw input_error("FadingModel: constant gain must be positive");
      break;
    case Family::discrete: {
      if (table.empty()) throw input_error("FadingModel: empty discrete table");
      double total = 0.0;
      for (auto& [v, p] : table) {
        if (!(v >= 0.0)) throw input_error("FadingModel: negative gain");
        if (!(p >= 0.0)) throw input_error("FadingModel: negative probability");
        total += p;
      }
      if (std::abs(total - 1.0) > 1e-9)
        throw input_error("FadingModel: discrete probabilities must sum to 1");
      if (!(mean_gain() > 0.0)) throw input_error("FadingModel: mean gain must be positive");
      break;
    }
  }
}

double FadingModel::mean_gain() const {
  switch (family) {
    case Family::rayleigh_power:
      return 1.0;
    case Family::constant:
      return nu0;
    case Family::discrete: {
      double s = 0.0;
      for (auto& [v, p] : table) s += v * p;
      return s;
    }
  }
  return 0.0;
}

double FadingModel::max_gain() const {
  switch (family) {
    case Family::rayleigh_power:
      return std::numeric_limits<double>::infinity();
    case Family::constant:
      return nu0;
    case Family::discrete: {
      double mx = 0.0;
      for (auto& [v, p] : table)
        if (p > 0.0) mx = std::max(mx, v);
      return mx;
    }
  }
  return 0.0;
}

double FadingModel::draw(CounterRng& rng) const {
  switch (family) {
    case Family::rayleigh_power:
      return -std::log1p(-rng.next_double());
    case Family::constant:
      return nu0;
    case Family::discrete: {
      double u = rng.next_double();
      double acc = 0.0;
      for (auto& [v, p] : table) {
        acc += p;
        if (u < acc) return v;
      }
      return table.back().first;
    }
  }
  return 0.0;
}

double max_gain_density(const FadingModel& model, double v) {
  if (model.family != FadingModel::Family::rayleigh_power)
    throw input_error("max_gain_density: continuous families only");
  if (v <= 0.0) return 0.0;
  double e = std::exp(-v);
  return model.m * e * std::pow(1.0 - e, model.m - 1);
}

CsirResult csir_sum_rate(const FadingModel& model, double p, double sigma2,
                         int64_t n_mc, uint64_t seed) {
  model.validate();
  if (!(p > 0.0) || !(sigma2 > 0.0))
    throw input_error("csir_sum_rate: power and noise must be positive");
  if (n_mc < 10000) throw input_error("csir_sum_rate: need at least 10^4 samples");

  CsirResult out;
  const double m = model.m;
  out.upper_bound = std::log2(1.0 + m * p * model.mean_gain() / sigma2) / m;
  if (model.family == FadingModel::Family::constant) {
    out.rate = std::log2(1.0 + m * p * model.nu0 / sigma2) / m;
    out.se = 0.0;
    out.n = 0;
    return out;
  }
  const int64_t batch = 65536;
  int64_t done = 0, bidx = 0;
  double mean = 0.0, m2 = 0.0;
  int64_t n = 0;
  while (done < n_mc) {
    int64_t count = std::min(batch, n_mc - done);
    CounterRng rng(seed, static_cast<uint64_t>(bidx));
    for (int64_t i = 0; i < count; ++i) {
      double sum = 0.0;
      for (int u = 0; u < model.m; ++u) sum += model.draw(rng);
      double val = std::log2(1.0 + p * sum / sigma2) / m;  // sum = M * mean(nu)
      ++n;
      double d = val - mean;
      mean += d / n;
      m2 += d * (val - mean);
    }
    done += count;
    ++bidx;
  }
  out.rate = mean;
  out.se = n > 1 ? std::sqrt(m2 / (n - 1) / n) : 0.0;
  out.n = n;
  return out;
}

std::vector<double> csir_subset_bounds(const FadingModel& model, double p, double sigma2,
                                       int64_t n_mc, uint64_t seed) {
  model.validate();
  if (model.m > 4) throw input_error("csir_subset_bounds: exposed for up to 4 users");
  std::vector<double> bounds;
  for (int k = 1; k <= model.m; ++k) {
    FadingModel sub = model;
    sub.m = k;
    bounds.push_back(csir_sum_rate(sub, p, sigma2, n_mc, seed).rate);
  }
  return bounds;
}

namespace {

// (1/M) E[(1/lambda - 1/nu_max)+] for the given threshold.  The quadrature
// tolerance must scale with the integrand, whose magnitude grows like
// 1/lambda; a fixed absolute tolerance below roundoff would make the
// adaptive refinement explode on small thresholds.
double policy_power(const FadingModel& model, double lam, double tol) {
  const double m = model.m;
  switch (model.family) {
    case FadingModel::Family::constant:
      return model.nu0 > lam ? (1.0 / lam - 1.0 / model.nu0) / m : 0.0;
    case FadingModel::Family::discrete: {
      // Max-gain pmf by differencing the M-th power of the CDF.
      std::vector<std::pair<double, double>> atoms = model.table;
      std::sort(atoms.begin(), atoms.end());
      double cdf_prev = 0.0, acc = 0.0, power = 0.0;
      for (auto& [v, prob] : atoms) {
        acc += prob;
        double pmax = std::pow(acc, m) - std::pow(cdf_prev, m);
        cdf_prev = acc;
        if (v > lam) power += pmax * (1.0 / lam - 1.0 / v);
      }
      return power / m;
    }
    case FadingModel::Family::rayleigh_power: {
      double hi = lam + 60.0 + 2.0 * std::log(model.m + 1.0);
      auto f = [&](double v) { return (1.0 / lam - 1.0 / v) * max_gain_density(model, v); };
      return adaptive_simpson(f, lam, hi, tol) / m;
    }
  }
  return 0.0;
}

}  // namespace

double waterfill_lambda(const FadingModel& model, double p_avg) {
  model.validate();
  if (!(p_avg > 0.0)) throw input_error("waterfill_lambda: average power must be positive");

  if (model.family == FadingModel::Family::constant)
    return 1.0 / (model.m * p_avg + 1.0 / model.nu0);

  // Keeps the quadrature several orders tighter than the residual contract
  // of 1e-8 * p_avg while staying clear of roundoff at any threshold.
  auto spent = [&](double l) {
    double tol = std::max(1e-12 * std::max(1.0, 1.0 / l), 1e-10 * p_avg);
    return policy_power(model, l, tol);
  };

  double lo = 1e-9;
  while (spent(lo) < p_avg) {
    lo *= 0.5;
    if (lo < 1e-300) throw numerical_error("waterfill_lambda: cannot bracket threshold");
  }
  double hi = std::max(1.0, 2.0 * lo);
  while (spent(hi) > p_avg) {
    hi *= 2.0;
    if (hi > 1e300) throw numerical_error("waterfill_lambda: cannot bracket threshold");
  }
  double lam = bisect([&](double l) { return spent(l) - p_avg; }, lo, hi, 0.0, 200);
  if (std::abs(spent(lam) - p_avg) > 1e-8 * p_avg)
    throw numerical_error("waterfill_lambda: residual above tolerance");
  return lam;
}

double csit_sum_rate(const FadingModel& model, double p_avg, double sigma2) {
  model.validate();
  if (!(sigma2 > 0.0)) throw input_error("csit_sum_rate: noise variance must be positive");
  double lam = waterfill_lambda(model, p_avg);
  const double m = model.m;
  switch (model.family) {
    case FadingModel::Family::constant:
      return model.nu0 > lam
                 ? std::log2(1.0 + (model.nu0 / lam - 1.0) / sigma2) / m
                 : 0.0;
    case FadingModel::Family::discrete: {
      std::vector<std::pair<double, double>> atoms = model.table;
      std::sort(atoms.begin(), atoms.end());
      double cdf_prev = 0.0, acc = 0.0, rate = 0.0;
      for (auto& [v, prob] : atoms) {
        acc += prob;
        double pmax = std::pow(acc, m) - std::pow(cdf_prev, m);
        cdf_prev = acc;
        if (v > lam) rate += pmax * std::log2(1.0 + (v / lam - 1.0) / sigma2);
      }
      return rate / m;
    }
    case FadingModel::Family::rayleigh_power: {
      double hi = lam + 60.0 + 2.0 * std::log(model.m + 1.0);
      auto f = [&](double v) {
        return std::log2(1.0 + (v / lam - 1.0) / sigma2) * max_gain_density(model, v);
      };
      double tol = 1e-12 * std::max(1.0, 1.0 / lam);
      return adaptive_simpson(f, lam, hi, tol) / m;
    }
  }
  return 0.0;
}

}  // namespace macjscc
