#include "macjscc/gaussian.hpp"

#include <unordered_set>

namespace macjscc {

namespace {

void validate(const GaussianVector& g) {
  const auto n = static_cast<Eigen::Index>(g.names.size());
  std::unordered_set<std::string> seen;
  for (const std::string& s : g.names)
    if (s.empty() || !seen.insert(s).second)
      throw input_error("GaussianVector: empty or duplicate component name");
  if (g.mean.size() != n) throw input_error("GaussianVector: mean length mismatch");
  if (g.cov.rows() != n || g.cov.cols() != n)
    throw input_error("GaussianVector: covariance shape mismatch");
  if ((g.cov - g.cov.transpose()).cwiseAbs().maxCoeff() > 1e-10)
    throw input_error("GaussianVector: covariance not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (g.cov + g.cov.transpose()),
                                                    Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-10)
    throw input_error("GaussianVector: covariance not positive semidefinite");
}

}  // namespace

GaussianVector::GaussianVector(std::vector<std::string> nms, Eigen::MatrixXd c)
    : names(std::move(nms)), mean(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(names.size()))),
      cov(std::move(c)) {
  validate(*this);
}

GaussianVector::GaussianVector(std::vector<std::string> nms, Eigen::VectorXd m, Eigen::MatrixXd c)
    : names(std::move(nms)), mean(std::move(m)), cov(std::move(c)) {
  validate(*this);
}

int GaussianVector::index(const std::string& name) const {
  for (size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return static_cast<int>(i);
  throw input_error("GaussianVector: unknown component " + name);
}

std::vector<int> GaussianVector::indices(const std::vector<std::string>& nms) const {
  std::vector<int> out;
  out.reserve(nms.size());
  for (const std::string& s : nms) out.push_back(index(s));
  return out;
}

LmmseResult lmmse(const GaussianVector& g, const std::vector<int>& targets,
                  const std::vector<int>& observed, bool allow_pseudo_inverse) {
  const int nt = static_cast<int>(targets.size());
  const int no = static_cast<int>(observed.size());
  for (int i : targets)
    if (i < 0 || i >= g.dim()) throw input_error("lmmse: target index out of range");
  for (int i : observed)
    if (i < 0 || i >= g.dim()) throw input_error("lmmse: observed index out of range");

  Eigen::MatrixXd s_tt(nt, nt), s_to(nt, no), s_oo(no, no);
  for (int i = 0; i < nt; ++i)
    for (int j = 0; j < nt; ++j) s_tt(i, j) = g.cov(targets[i], targets[j]);
  for (int i = 0; i < nt; ++i)
    for (int j = 0; j < no; ++j) s_to(i, j) = g.cov(targets[i], observed[j]);
  for (int i = 0; i < no; ++i)
    for (int j = 0; j < no; ++j) s_oo(i, j) = g.cov(observed[i], observed[j]);

  LmmseResult r;
  if (no == 0) {
    r.coeff = Eigen::MatrixXd::Zero(nt, 0);
    r.error_cov = s_tt;
    return r;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (s_oo + s_oo.transpose()));
  const Eigen::VectorXd& ev = es.eigenvalues();
  if (ev.minCoeff() > 1e-12) {
    r.coeff = s_oo.ldlt().solve(s_to.transpose()).transpose();
  } else if (allow_pseudo_inverse) {
    // Moore-Penrose inverse from the eigendecomposition, small modes dropped.
    double cutoff = 1e-12 * std::max(1.0, ev.cwiseAbs().maxCoeff());
    Eigen::VectorXd inv = ev.unaryExpr([&](double v) { return v > cutoff ? 1.0 / v : 0.0; });
    Eigen::MatrixXd pinv =
        es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
    r.coeff = s_to * pinv;
    r.used_pseudo_inverse = true;
  } else {
    throw numerical_error("lmmse: observation covariance is singular");
  }
  Eigen::MatrixXd e = s_tt - r.coeff * s_to.transpose();
  r.error_cov = 0.5 * (e + e.transpose());
  return r;
}

LmmseResult lmmse(const GaussianVector& g, const std::vector<std::string>& targets,
                  const std::vector<std::string>& observed, bool allow_pseudo_inverse) {
  return lmmse(g, g.indices(targets), g.indices(observed), allow_pseudo_inverse);
}

}  // namespace macjscc
