#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "macjscc/discrete.hpp"
#include "macjscc/errors.hpp"
#include "macjscc/rng.hpp"

namespace macjscc {

struct MixtureComponent {
  double w = 1.0;
  double mean = 0.0;
  double var = 1.0;
};

// Per-user, per-source-symbol Gaussian mixtures describing unit-power channel
// input distributions f(x_u | U_u = s).  Transmit scaling by sqrt(P_u) is
// applied by the consumer, so the induced X_u has mean 0 and power 1.
struct MixtureCodebook {
  Pmf source;  // joint pmf over variables U1, U2
  // users[u][symbol] lists that symbol's components.
  std::array<std::vector<std::vector<MixtureComponent>>, 2> users;

  // Weight simplex within 1e-9 per symbol, variances >= 1e-4, induced
  // per-user mean 0 and power 1 within 1e-6.
  void validate() const;
};

struct FitProblem {
  double target_rho = 0.0;
  Pmf source;
  // Components per symbol; one entry per symbol of the matching user.
  std::vector<int> counts1, counts2;
  int starts = 20;
  int max_iterations = 300;  // inner quasi-Newton iterations per penalty stage
  double tolerance = 1e-10;  // relative objective convergence
  uint64_t seed = 0;

  void validate() const;
};

struct FitResult {
  MixtureCodebook codebook;
  double objective = 0.0;
  double normalized_distortion = 0.0;
  // mean1, power1 - 1, mean2, power2 - 1 of the returned codebook
  std::vector<double> constraint_residuals;
};

// Integral of the squared unit-variance bivariate normal density with
// correlation rho: 1/(4 pi sqrt(1 - rho^2)).
double squared_target_mass(double rho);

// L2 distance between the codebook-induced joint density of (X1, X2) and the
// unit-variance bivariate normal with correlation target_rho, evaluated in
// closed form (no quadrature).  Requires consistent shapes only; the moment
// constraints need not hold.
double fit_objective(const MixtureCodebook& cb, double target_rho);

// Derivatives of fit_objective in every component's (w, mean, var) slot,
// treating each slot as a free coordinate.
using MixtureGradient = std::array<std::vector<std::vector<MixtureComponent>>, 2>;
MixtureGradient fit_objective_gradient(const MixtureCodebook& cb, double target_rho);

// Multi-start constrained minimization of fit_objective subject to the
// per-user moment constraints; deterministic given problem.seed.  Throws
// numerical_error when no start reaches constraint residuals below 1e-6.
FitResult fit(const FitProblem& problem);

struct CodebookSample {
  int u1 = 0, u2 = 0;
  double x1 = 0.0, x2 = 0.0;
};

// Draws (U1, U2) from the source, then per user independently picks a
// component by weight and draws from it, so X1 and X2 are conditionally
// independent given the symbol pair.
CodebookSample sample_pair(const MixtureCodebook& cb, CounterRng& rng);

enum class MiQuantity { x1_given_x2_u2, x2_given_x1_u1, x1_given_x2, x2_given_x1 };

// Monte Carlo mutual information between one channel input and the adder
// channel output Y = sqrt(p1) X1 + sqrt(p2) X2 + N, conditioned on the other
// input (and optionally that user's source symbol).  The conditional output
// density is evaluated in closed form from the codebook; needs n >= 10^4.
// Returns (bits, standard error).
std::pair<double, double> mutual_info_mc(const MixtureCodebook& cb, double sigma_n2,
                                         MiQuantity quantity, int64_t n, uint64_t seed,
                                         double p1 = 1.0, double p2 = 1.0);

namespace detail {

// Dense view of a two-variable source pmf in (U1, U2) order.
struct SourceTable {
  int n1 = 0, n2 = 0;
  std::vector<double> joint;  // joint[s1 * n2 + s2]
  std::vector<double> pm1, pm2;
};

SourceTable source_table(const Pmf& source);

}  // namespace detail

}  // namespace macjscc
