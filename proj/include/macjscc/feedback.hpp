#pragma once

#include <vector>

#include "macjscc/errors.hpp"

namespace macjscc {

struct FeedbackRegionPoint {
  double rho = 0.0;
  double b1 = 0.0, b2 = 0.0, b12 = 0.0;  // bits
};

// Rate bounds of the feedback region member at input correlation rho:
// B_i = 0.5 log2(1 + P_i (1-rho^2)/sigma2),
// B12 = 0.5 log2(1 + (P1 + P2 + 2 rho sqrt(P1 P2))/sigma2).
FeedbackRegionPoint ozarow_bounds(double p1, double p2, double sigma2, double rho);

struct BoundaryVertex {
  double rho = 0.0;
  int corner = 0;  // 0..4, counterclockwise from the origin
  double r1 = 0.0, r2 = 0.0;
};

// Pentagon corner points for every correlation on the grid, ordered by grid
// index then corner index.  The region is the union over rho; consumers
// take pointwise maxima for the frontier.
std::vector<BoundaryVertex> ozarow_boundary(double p1, double p2, double sigma2,
                                            const std::vector<double>& rho_grid);

}  // namespace macjscc
