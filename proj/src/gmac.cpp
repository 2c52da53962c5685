#include "macjscc/gmac.hpp"

#include <algorithm>
#include <cmath>

#include "macjscc/numeric.hpp"

namespace macjscc {

void GmacSpec::validate() const {
  if (!(p1 > 0.0) || !(p2 > 0.0) || !(sigma_n2 > 0.0))
    throw input_error("GmacSpec: powers and noise variance must be positive");
}

void GaussianSourcePair::validate() const {
  if (!(sigma1_2 > 0.0) || !(sigma2_2 > 0.0))
    throw input_error("GaussianSourcePair: variances must be positive");
  if (!(std::abs(rho) <= 1.0))
    throw input_error("GaussianSourcePair: |rho| must be at most 1");
}

std::string scheme_name(SchemeId id) {
  switch (id) {
    case SchemeId::af: return "af";
    case SchemeId::sb: return "sb";
    case SchemeId::lt: return "lt";
    case SchemeId::nc: return "nc";
  }
  throw input_error("scheme_name: bad id");
}

SchemeId scheme_from_name(const std::string& name) {
  if (name == "af") return SchemeId::af;
  if (name == "sb") return SchemeId::sb;
  if (name == "lt") return SchemeId::lt;
  if (name == "nc") return SchemeId::nc;
  throw input_error("unknown scheme " + name);
}

TransmissionBounds relaxed_bounds(const GmacSpec& g, double rho) {
  g.validate();
  if (!(std::abs(rho) <= 1.0)) throw input_error("relaxed_bounds: |rho| must be at most 1");
  TransmissionBounds b;
  b.b1 = 0.5 * std::log2(1.0 + g.p1 * (1.0 - rho * rho) / g.sigma_n2);
  b.b2 = 0.5 * std::log2(1.0 + g.p2 * (1.0 - rho * rho) / g.sigma_n2);
  b.b12 = 0.5 * std::log2(1.0 + (g.p1 + g.p2 + 2.0 * rho * std::sqrt(g.p1 * g.p2)) / g.sigma_n2);
  return b;
}

RhoInterval rho_interval(const GmacSpec& g, double h1_given_2, double h2_given_1,
                         double h12, double i12) {
  g.validate();
  if (h1_given_2 < 0.0 || h2_given_1 < 0.0 || h12 < 0.0 || i12 < 0.0)
    throw input_error("rho_interval: information quantities must be nonnegative");

  // Per-user bound inverted for rho: H <= 0.5 log2(1 + P(1-rho^2)/sigma_n2).
  auto cap = [&](double h, double p) {
    double arg = 1.0 - g.sigma_n2 * (std::exp2(2.0 * h) - 1.0) / p;
    return arg >= 0.0 ? std::sqrt(arg) : -1.0;  // negative marks "unachievable"
  };
  RhoInterval r;
  double c1 = cap(h1_given_2, g.p1);
  double c2 = cap(h2_given_1, g.p2);
  r.lemma3_cap = std::sqrt(std::max(0.0, 1.0 - std::exp2(-2.0 * i12)));
  // Sum bound inverted: needed correlation so the sum rate fits.
  r.rho_min = std::max(
      0.0, (g.sigma_n2 * (std::exp2(2.0 * h12) - 1.0) - g.p1 - g.p2) /
               (2.0 * std::sqrt(g.p1 * g.p2)));
  if (c1 < 0.0 || c2 < 0.0) {
    r.rho_max = -1.0;
    r.feasible = false;
    return r;
  }
  r.rho_max = std::min(c1, c2);
  r.feasible = r.rho_min <= std::min(r.rho_max, r.lemma3_cap) && r.rho_min <= 1.0;
  return r;
}

DistortionPair af_distortion(const GaussianSourcePair& s, const GmacSpec& g) {
  s.validate();
  g.validate();
  double cross = 2.0 * s.rho * std::sqrt(g.p1 * g.p2);
  double total = g.p1 + g.p2 + cross + g.sigma_n2;
  double r2 = s.rho * s.rho;
  DistortionPair d;
  d.d1 = s.sigma1_2 * (g.p2 * (1.0 - r2) + g.sigma_n2) / total;
  d.d2 = s.sigma2_2 * (g.p1 * (1.0 - r2) + g.sigma_n2) / total;
  return d;
}

double sb_distortion_symmetric(double sigma2, double rho, double snr) {
  if (!(snr > 0.0)) throw input_error("sb_distortion_symmetric: snr must be positive");
  if (!(std::abs(rho) <= 1.0)) throw input_error("sb_distortion_symmetric: |rho| > 1");
  double rate = 0.25 * std::log2(1.0 + 2.0 * snr);
  double t2 = std::exp2(-4.0 * rate);  // 2^(-4R)
  return sigma2 * std::sqrt(t2 * (1.0 - rho * rho) + rho * rho * t2 * t2);
}

namespace {

// Sum-rate-tight symmetric rate as a function of the input correlation.
double lt_rate(double snr, double rho_tilde) {
  return 0.25 * std::log2((1.0 + 2.0 * snr * (1.0 + rho_tilde)) /
                          (1.0 - rho_tilde * rho_tilde));
}

}  // namespace

LtSymmetricSolution lt_optimize_symmetric(double sigma2, double rho, double snr) {
  if (!(snr > 0.0)) throw input_error("lt_optimize_symmetric: snr must be positive");
  if (rho < 0.0 || rho >= 1.0) throw input_error("lt_optimize_symmetric: rho must be in [0,1)");

  LtSymmetricSolution sol;
  auto gap = [&](double rt) { return rho * (1.0 - std::exp2(-2.0 * lt_rate(snr, rt))) - rt; };
  if (rho == 0.0 || gap(rho) >= 0.0) {
    // gap(rho) < 0 always holds for rho > 0, so this branch is the rho = 0
    // case plus a numerical safety net.
    sol.rho_tilde = rho == 0.0 ? 0.0 : rho;
    sol.fixed_point_found = rho == 0.0;
  } else {
    sol.rho_tilde = bisect(gap, 0.0, rho, 1e-12);
  }
  sol.rate = lt_rate(snr, sol.rho_tilde);
  double t = std::exp2(-2.0 * sol.rate);
  sol.distortion = sigma2 * t * (1.0 - rho * rho * (1.0 - t)) /
                   (1.0 - sol.rho_tilde * sol.rho_tilde);
  return sol;
}

LtPoint lt_distortion(const GaussianSourcePair& s, const GmacSpec& g, double r1, double r2) {
  s.validate();
  g.validate();
  if (r1 < 0.0 || r2 < 0.0) throw input_error("lt_distortion: rates must be nonnegative");
  double t1 = std::exp2(-2.0 * r1);
  double t2 = std::exp2(-2.0 * r2);
  LtPoint p;
  p.rho_tilde = s.rho * std::sqrt((1.0 - t1) * (1.0 - t2));
  double om = 1.0 - p.rho_tilde * p.rho_tilde;
  double rr = s.rho * s.rho;
  p.d1 = s.sigma1_2 * t1 * (1.0 - rr * (1.0 - t2)) / om;
  p.d2 = s.sigma2_2 * t2 * (1.0 - rr * (1.0 - t1)) / om;
  double cap1 = 0.5 * std::log2(g.p1 / g.sigma_n2 + 1.0 / om);
  double cap2 = 0.5 * std::log2(g.p2 / g.sigma_n2 + 1.0 / om);
  double cap12 = 0.5 * std::log2((g.sigma_n2 + g.p1 + g.p2 +
                                  2.0 * p.rho_tilde * std::sqrt(g.p1 * g.p2)) /
                                 (om * g.sigma_n2));
  const double slack = 1e-12;
  p.feasible = r1 <= cap1 + slack && r2 <= cap2 + slack && r1 + r2 <= cap12 + slack;
  return p;
}

double nc_bound_symmetric(double sigma2, double rho, double snr) {
  if (!(snr > 0.0)) throw input_error("nc_bound_symmetric: snr must be positive");
  double ar = std::abs(rho);
  if (!(ar <= 1.0)) throw input_error("nc_bound_symmetric: |rho| > 1");
  double r2 = rho * rho;
  if (ar < 1.0 && snr <= ar / (1.0 - r2)) {
    GaussianSourcePair s{sigma2, sigma2, ar};
    GmacSpec g{snr, snr, 1.0};
    return af_distortion(s, g).d1;
  }
  return sigma2 * std::sqrt((1.0 - r2) / (2.0 * snr * (1.0 + ar) + 1.0));
}

std::vector<SchemePoint> sweep(const std::vector<SchemeId>& schemes, double sigma2,
                               double rho, const std::vector<double>& snr_grid) {
  for (size_t i = 0; i < snr_grid.size(); ++i) {
    if (!(snr_grid[i] > 0.0)) throw input_error("sweep: snr grid must be positive");
    if (i > 0 && !(snr_grid[i] > snr_grid[i - 1]))
      throw input_error("sweep: snr grid must be strictly increasing");
  }
  std::vector<SchemePoint> out;
  out.reserve(schemes.size() * snr_grid.size());
  for (double s : snr_grid) {
    for (SchemeId id : schemes) {
      SchemePoint pt;
      pt.snr = s;
      pt.scheme = id;
      switch (id) {
        case SchemeId::af: {
          DistortionPair d = af_distortion({sigma2, sigma2, rho}, {s, s, 1.0});
          pt.d1 = d.d1;
          pt.d2 = d.d2;
          break;
        }
        case SchemeId::sb:
          pt.d1 = pt.d2 = sb_distortion_symmetric(sigma2, rho, s);
          pt.r1 = pt.r2 = 0.25 * std::log2(1.0 + 2.0 * s);
          break;
        case SchemeId::lt: {
          LtSymmetricSolution sol = lt_optimize_symmetric(sigma2, rho, s);
          pt.d1 = pt.d2 = sol.distortion;
          pt.r1 = pt.r2 = sol.rate;
          pt.rho_tilde = sol.rho_tilde;
          break;
        }
        case SchemeId::nc:
          pt.d1 = pt.d2 = nc_bound_symmetric(sigma2, rho, s);
          break;
      }
      out.push_back(pt);
    }
  }
  return out;
}

}  // namespace macjscc
