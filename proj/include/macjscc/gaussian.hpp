#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "macjscc/errors.hpp"

namespace macjscc {

// Jointly Gaussian vector with named components.  The mean defaults to zero;
// the covariance must be symmetric (within 1e-10) and positive semidefinite
// up to an eigenvalue slack of -1e-10.
struct GaussianVector {
  std::vector<std::string> names;
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;

  GaussianVector(std::vector<std::string> names, Eigen::MatrixXd cov);
  GaussianVector(std::vector<std::string> names, Eigen::VectorXd mean, Eigen::MatrixXd cov);

  int dim() const { return static_cast<int>(names.size()); }
  int index(const std::string& name) const;
  std::vector<int> indices(const std::vector<std::string>& names) const;
};

struct LmmseResult {
  // estimate = mean_t + coeff * (observed - mean_o)
  Eigen::MatrixXd coeff;
  // residual covariance of targets given observed (Schur complement)
  Eigen::MatrixXd error_cov;
  bool used_pseudo_inverse = false;
};

// Linear minimum mean square error estimate of `targets` from `observed`.
// The observation covariance must be invertible (smallest eigenvalue above
// 1e-12); otherwise a pseudo-inverse is used when allowed, and a
// numerical_error is raised when not.
LmmseResult lmmse(const GaussianVector& g, const std::vector<int>& targets,
                  const std::vector<int>& observed, bool allow_pseudo_inverse = false);

LmmseResult lmmse(const GaussianVector& g, const std::vector<std::string>& targets,
                  const std::vector<std::string>& observed, bool allow_pseudo_inverse = false);

}  // namespace macjscc
