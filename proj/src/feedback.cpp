#include "macjscc/feedback.hpp"

#include <algorithm>
#include <cmath>

namespace macjscc {

FeedbackRegionPoint ozarow_bounds(double p1, double p2, double sigma2, double rho) {
  if (!(p1 > 0.0) || !(p2 > 0.0) || !(sigma2 > 0.0))
    throw input_error("ozarow_bounds: powers and noise variance must be positive");
  if (!(rho >= 0.0 && rho <= 1.0)) throw input_error("ozarow_bounds: rho must be in [0,1]");
  FeedbackRegionPoint pt;
  pt.rho = rho;
  pt.b1 = 0.5 * std::log2(1.0 + p1 * (1.0 - rho * rho) / sigma2);
  pt.b2 = 0.5 * std::log2(1.0 + p2 * (1.0 - rho * rho) / sigma2);
  pt.b12 = 0.5 * std::log2(1.0 + (p1 + p2 + 2.0 * rho * std::sqrt(p1 * p2)) / sigma2);
  return pt;
}

std::vector<BoundaryVertex> ozarow_boundary(double p1, double p2, double sigma2,
                                            const std::vector<double>& rho_grid) {
  std::vector<BoundaryVertex> out;
  out.reserve(rho_grid.size() * 5);
  for (double rho : rho_grid) {
    FeedbackRegionPoint b = ozarow_bounds(p1, p2, sigma2, rho);
    auto clamp0 = [](double x) { return std::max(0.0, x); };
    const double corners[5][2] = {
        {0.0, 0.0},
        {b.b1, 0.0},
        {b.b1, clamp0(std::min(b.b2, b.b12 - b.b1))},
        {clamp0(std::min(b.b1, b.b12 - b.b2)), b.b2},
        {0.0, b.b2},
    };
    for (int c = 0; c < 5; ++c)
      out.push_back(BoundaryVertex{rho, c, corners[c][0], corners[c][1]});
  }
  return out;
}

}  // namespace macjscc
