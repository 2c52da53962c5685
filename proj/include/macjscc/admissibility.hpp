#pragma once

#include <array>
#include <optional>
#include <vector>

#include "macjscc/discrete.hpp"

namespace macjscc {

// Per-source distortion function on matching source/reconstruction alphabets.
struct DistortionMeasure {
  enum class Kind { hamming, squared_error, custom };
  Kind kind = Kind::hamming;
  std::vector<std::vector<double>> table;  // custom only, table[u][uhat]

  static DistortionMeasure hamming() { return {Kind::hamming, {}}; }
  static DistortionMeasure squared_error() { return {Kind::squared_error, {}}; }
  static DistortionMeasure custom(std::vector<std::vector<double>> t);

  double operator()(int u, int uhat) const;
};

struct DistortionSpec {
  DistortionMeasure measure1, measure2;
  double limit1 = 0.0, limit2 = 0.0;
  // Optional cap on the sum of the two achieved distortions.
  std::optional<double> joint_limit;
};

// Two encoders observing (U1,Z1) and (U2,Z2), codewords W1, W2, channel
// inputs X1, X2 produced per user, decoder sees (Y, Z).  Variable names are
// canonical: U1,U2,Z1,Z2,Z,W1,W2,X1,X2,Y.
struct SideInfoSystem {
  Pmf source;            // joint over U1,U2,Z1,Z2,Z
  Kernel quantizer1;     // p(W1 | U1,Z1)
  Kernel quantizer2;     // p(W2 | U2,Z2)
  Kernel channel_map1;   // p(X1 | W1)
  Kernel channel_map2;   // p(X2 | W2)
  Kernel channel;        // p(Y | X1,X2)
  DistortionSpec distortion;

  // Joint over all ten variables, built by successive kernel application.
  Pmf build_joint() const;
};

struct CheckOptions {
  // Strict information inequalities pass when margin exceeds this.
  double margin_epsilon = 1e-9;
  // Achieved distortion may exceed its limit by this much.
  double distortion_slack = 1e-9;
};

struct AdmissibilityReport {
  std::array<double, 3> lhs{};      // bits
  std::array<double, 3> rhs{};      // bits
  std::array<double, 3> margins{};  // rhs - lhs
  double d1_achieved = 0.0;
  double d2_achieved = 0.0;
  bool admissible = false;
  int binding_constraint = 0;       // index of the smallest margin
};

// Deterministic reconstruction table indexed by (w1, w2, z).
struct DecoderTable {
  int n_w1 = 0, n_w2 = 0, n_z = 0;
  std::vector<int> uhat1, uhat2;
  double d1_achieved = 0.0;
  double d2_achieved = 0.0;

  std::pair<int, int> at(int w1, int w2, int z) const {
    auto i = static_cast<size_t>((w1 * n_w2 + w2) * n_z + z);
    return {uhat1[i], uhat2[i]};
  }
};

// Evaluates the three information constraints (single-user both ways plus the
// sum constraint) together with the distortion targets under the optimal
// decoder.
AdmissibilityReport check_theorem1(const SideInfoSystem& sys, const CheckOptions& opts = {});

// Minimum posterior expected distortion reconstruction per source for every
// (w1, w2, z) cell; ties broken toward the lowest symbol index.
DecoderTable optimal_decoder(const SideInfoSystem& sys);

// ---- general M-user version ----

struct MultisourceSystem {
  Pmf source;                        // joint over U1..UM, Z1..ZM, Z
  std::vector<Kernel> quantizers;    // p(Wi | Ui,Zi)
  std::vector<Kernel> channel_maps;  // p(Xi | Wi)
  Kernel channel;                    // p(Y | X1..XM)

  int num_users() const { return static_cast<int>(quantizers.size()); }
};

struct SubsetConstraint {
  unsigned mask = 0;  // bit i set when user i+1 is in the subset
  double lhs = 0.0, rhs = 0.0, margin = 0.0;
};

struct MultisourceReport {
  std::vector<SubsetConstraint> constraints;  // masks 1 .. 2^M - 1 in order
  bool admissible = false;
  unsigned binding_mask = 0;
};

// One information constraint per nonempty subset of users (at most 6 users).
MultisourceReport check_multisource(const MultisourceSystem& sys, const CheckOptions& opts = {});

// ---- special cases ----

struct LosslessReport {
  std::array<double, 3> lhs{}, rhs{}, margins{};
  bool achievable = false;
  int binding_constraint = 0;
};

// Lossless transmission conditions for two sources without side information;
// channel inputs must be produced from the own source only (each map kernel
// has the single input Ui).
LosslessReport lossless_conditions(const Pmf& source, const Kernel& channel,
                                   const Kernel& map1, const Kernel& map2,
                                   const CheckOptions& opts = {});

struct RateRegionCheck {
  std::array<double, 3> required{};  // per-user rates and sum rate, bits
  bool inside = false;
};

// Source-coding-only region of the system: required rates for W1, W2 given
// the decoder side information.
RateRegionCheck source_coding_region(const SideInfoSystem& sys, double r1, double r2,
                                     const CheckOptions& opts = {});

// Binary source observed through a BSC(p) at the decoder, reconstruction
// tested through a BSC(d): rate (1 - h(d)) - (1 - h(p*d)) in bits, with
// p*d the crossover of the cascade.
double wz_binary_rate(double side_crossover, double test_crossover);

// h(p) - h(d) for a biased bit under Hamming distortion d <= min(p, 1-p).
double hamming_rate_distortion(double source_bias, double d);

// Rate needed by a single active encoder whose observation and the decoder
// side information are both present: I(U1; W1 | Z1, Z).  Requires U2 and Z2
// degenerate (singleton alphabets).
double mixed_si_rate(const SideInfoSystem& sys);

}  // namespace macjscc
