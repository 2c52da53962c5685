#pragma once

#include <optional>
#include <string>
#include <vector>

#include "macjscc/errors.hpp"

namespace macjscc {

// Additive white Gaussian noise adder channel Y = X1 + X2 + N with per-user
// average power limits.
struct GmacSpec {
  double p1 = 1.0;
  double p2 = 1.0;
  double sigma_n2 = 1.0;

  void validate() const;
};

// Zero-mean jointly Gaussian source pair.
struct GaussianSourcePair {
  double sigma1_2 = 1.0;
  double sigma2_2 = 1.0;
  double rho = 0.0;

  void validate() const;
};

enum class SchemeId { af, sb, lt, nc };

std::string scheme_name(SchemeId id);
SchemeId scheme_from_name(const std::string& name);

struct SchemePoint {
  double snr = 0.0;  // S = P / noise variance
  SchemeId scheme = SchemeId::af;
  double d1 = 0.0;
  double d2 = 0.0;
  std::optional<double> r1, r2, rho_tilde;
};

struct TransmissionBounds {
  double b1 = 0.0, b2 = 0.0, b12 = 0.0;  // bits
};

// Rate bounds achievable with channel input correlation rho:
// B1 = 0.5 log2(1 + P1 (1-rho^2)/sigma_n2), B2 analogous,
// B12 = 0.5 log2(1 + (P1 + P2 + 2 rho sqrt(P1 P2))/sigma_n2).
TransmissionBounds relaxed_bounds(const GmacSpec& g, double rho);

struct RhoInterval {
  double rho_min = 0.0;
  double rho_max = 0.0;    // from the two per-user bounds
  double lemma3_cap = 0.0; // sqrt(1 - 2^(-2 I12))
  bool feasible = false;
};

// Interval of channel input correlations that satisfies all three rate
// bounds for sources requiring (H1g2, H2g1, H12) bits, with the correlation
// additionally capped by the source mutual information I12.
RhoInterval rho_interval(const GmacSpec& g, double h1_given_2, double h2_given_1,
                         double h12, double i12);

struct DistortionPair {
  double d1 = 0.0, d2 = 0.0;
};

// Uncoded scaled transmission with the optimal linear decoder.
DistortionPair af_distortion(const GaussianSourcePair& s, const GmacSpec& g);

// Separate vector-quantize-and-bin scheme at the independent-input sum
// capacity rate R = 0.25 log2(1 + 2 S) per source (symmetric case).
double sb_distortion_symmetric(double sigma2, double rho, double snr);

struct LtSymmetricSolution {
  double rate = 0.0;
  double rho_tilde = 0.0;
  double distortion = 0.0;
  // False when no interior fixed point exists and the rho_tilde = 0
  // boundary solution is returned instead.
  bool fixed_point_found = true;
};

// Correlation-preserving vector quantization scheme, symmetric case: solves
// the fixed point where the sum rate bound is met with equality.
LtSymmetricSolution lt_optimize_symmetric(double sigma2, double rho, double snr);

struct LtPoint {
  double d1 = 0.0, d2 = 0.0;
  double rho_tilde = 0.0;
  bool feasible = false;
};

// Distortions of the correlation-preserving scheme at given coding rates,
// with feasibility of the three induced rate bounds.
LtPoint lt_distortion(const GaussianSourcePair& s, const GmacSpec& g, double r1, double r2);

// Lower bound on the symmetric achievable distortion; coincides with the
// uncoded scheme below the breakpoint S = rho/(1-rho^2).
double nc_bound_symmetric(double sigma2, double rho, double snr);

// Evaluates the requested schemes over an SNR grid (symmetric setup,
// P1 = P2 = S, sigma_n2 = 1).  Rows ordered by grid index, then by the
// order schemes were given.
std::vector<SchemePoint> sweep(const std::vector<SchemeId>& schemes, double sigma2,
                               double rho, const std::vector<double>& snr_grid);

}  // namespace macjscc
