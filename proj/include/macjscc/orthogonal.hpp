#pragma once

#include "macjscc/gaussian.hpp"
#include "macjscc/gmac.hpp"

namespace macjscc {

// Per-user independent AWGN channels Y_i = X_i + N_i.
struct OrthogonalSpec {
  double p1 = 1.0;
  double p2 = 1.0;
  double sigma_n1_2 = 1.0;
  double sigma_n2_2 = 1.0;

  void validate() const;
};

// Each encoder observes a noisy scaling of the other source:
// Z1 = s1 U2 + V1, Z2 = s2 U1 + V2 with unit-variance observation noise.
struct SideInfoModel {
  double s1 = 0.0;
  double s2 = 0.0;

  void validate() const;
};

// Transmit signal shape L_i = a_i U_i + b_i Z_i; the transmit scaling to the
// power limit is applied separately, so only the direction matters.
struct LinearCombiner {
  double a1 = 1.0, b1 = 0.0;
  double a2 = 1.0, b2 = 0.0;
};

// C_i = 0.5 log2(1 + P_i / noise_i); b12 = C1 + C2.
TransmissionBounds separation_bounds(const OrthogonalSpec& spec);

// Single shared channel time-split: user 1 gets fraction alpha.
TransmissionBounds tdma_bounds(const OrthogonalSpec& spec, double alpha);

// Uncoded transmission on both channels, joint linear decoding.
DistortionPair af_distortion_orth(const GaussianSourcePair& s, const OrthogonalSpec& spec);

// Separate source/channel coding, symmetric unit-variance case at snr per
// channel.
double sb_distortion_orth_symmetric(double rho, double snr);

// Uncoded transmission of n_users exchangeable unit-variance sources
// (pairwise correlation rho) over per-user channels; distortion of one source.
double af_multisource(int n_users, double rho, double p, double sigma_n2);

// Joint Gaussian of (U1,U2,Z1,Z2,Y1,Y2) under combined transmission, plus
// the linear map from six independent standard normals that realizes it.
struct OrthAfModel {
  GaussianVector joint;
  Eigen::MatrixXd transform;  // 6x6, rows in joint order
};

OrthAfModel orth_af_model(const GaussianSourcePair& s, const OrthogonalSpec& spec,
                          const SideInfoModel& si, const LinearCombiner& comb);

// Distortions when each encoder sends its combined signal and the decoder
// estimates from (Y1, Y2), also using (Z1, Z2) when decoder_si is set.
DistortionPair af_si_distortion(const GaussianSourcePair& s, const OrthogonalSpec& spec,
                                const SideInfoModel& si, const LinearCombiner& comb,
                                bool decoder_si);

enum class SiMode { none, enc, dec, both };

struct SiOptimum {
  LinearCombiner combiner;
  double avg_distortion = 0.0;  // (D1 + D2) / 2
};

// Best combiner for the selected side information usage, found by nested
// grid refinement of b_i/a_i down to steps below 1e-4 (plus the a_i = 0
// edge); deterministic.
SiOptimum af_si_optimize(const GaussianSourcePair& s, const OrthogonalSpec& spec,
                         const SideInfoModel& si, SiMode mode);

}  // namespace macjscc
