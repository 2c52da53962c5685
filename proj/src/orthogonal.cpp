#include "macjscc/orthogonal.hpp"

#include <cmath>

namespace macjscc {

void OrthogonalSpec::validate() const {
  if (!(p1 > 0.0) || !(p2 > 0.0) || !(sigma_n1_2 > 0.0) || !(sigma_n2_2 > 0.0))
    throw input_error("OrthogonalSpec: powers and noise variances must be positive");
}

void SideInfoModel::validate() const {
  if (s1 < 0.0 || s2 < 0.0) throw input_error("SideInfoModel: gains must be nonnegative");
}

TransmissionBounds separation_bounds(const OrthogonalSpec& spec) {
  spec.validate();
  TransmissionBounds b;
  b.b1 = 0.5 * std::log2(1.0 + spec.p1 / spec.sigma_n1_2);
  b.b2 = 0.5 * std::log2(1.0 + spec.p2 / spec.sigma_n2_2);
  b.b12 = b.b1 + b.b2;
  return b;
}

TransmissionBounds tdma_bounds(const OrthogonalSpec& spec, double alpha) {
  spec.validate();
  if (!(alpha > 0.0) || !(alpha < 1.0)) throw input_error("tdma_bounds: alpha must be in (0,1)");
  TransmissionBounds b;
  b.b1 = 0.5 * alpha * std::log2(1.0 + spec.p1 / (alpha * spec.sigma_n1_2));
  b.b2 = 0.5 * (1.0 - alpha) * std::log2(1.0 + spec.p2 / ((1.0 - alpha) * spec.sigma_n2_2));
  b.b12 = b.b1 + b.b2;
  return b;
}

DistortionPair af_distortion_orth(const GaussianSourcePair& s, const OrthogonalSpec& spec) {
  s.validate();
  spec.validate();
  double r2 = s.rho * s.rho;
  double den = spec.p1 * spec.p2 * (1.0 - r2) + spec.p1 * spec.sigma_n2_2 +
               spec.p2 * spec.sigma_n1_2 + spec.sigma_n1_2 * spec.sigma_n2_2;
  DistortionPair d;
  d.d1 = s.sigma1_2 * spec.sigma_n1_2 * (spec.p2 * (1.0 - r2) + spec.sigma_n2_2) / den;
  d.d2 = s.sigma2_2 * spec.sigma_n2_2 * (spec.p1 * (1.0 - r2) + spec.sigma_n1_2) / den;
  return d;
}

double sb_distortion_orth_symmetric(double rho, double snr) {
  if (!(snr > 0.0)) throw input_error("sb_distortion_orth_symmetric: snr must be positive");
  if (!(std::abs(rho) <= 1.0)) throw input_error("sb_distortion_orth_symmetric: |rho| > 1");
  double g = 1.0 + snr;
  double r2 = rho * rho;
  return std::sqrt((1.0 - r2) / (g * g) + r2 / (g * g * g * g));
}

double af_multisource(int n_users, double rho, double p, double sigma_n2) {
  if (n_users < 1) throw input_error("af_multisource: need at least one user");
  if (!(p > 0.0) || !(sigma_n2 > 0.0))
    throw input_error("af_multisource: power and noise must be positive");
  if (n_users > 1 && !(rho > -1.0 / (n_users - 1) && rho < 1.0))
    throw input_error("af_multisource: correlation outside (-1/(N-1), 1)");

  const int n = n_users;
  Eigen::MatrixXd k = Eigen::MatrixXd::Constant(n, n, rho);
  k.diagonal().setOnes();
  Eigen::MatrixXd cov_y = p * k + sigma_n2 * Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd c = Eigen::VectorXd::Constant(n, std::sqrt(p) * rho);
  c(0) = std::sqrt(p);
  return 1.0 - c.dot(cov_y.ldlt().solve(c));
}

OrthAfModel orth_af_model(const GaussianSourcePair& s, const OrthogonalSpec& spec,
                          const SideInfoModel& si, const LinearCombiner& comb) {
  s.validate();
  spec.validate();
  si.validate();

  // Base variables, in order: G1,G2 (source pair factors), V1, V2, N1, N2.
  // U1 = sigma1 G1, U2 = sigma2 (rho G1 + sqrt(1-rho^2) G2).
  const double sd1 = std::sqrt(s.sigma1_2);
  const double sd2 = std::sqrt(s.sigma2_2);
  const double rho = s.rho;
  Eigen::MatrixXd base = Eigen::MatrixXd::Zero(6, 6);  // rows: U1,U2,Z1,Z2 partials
  Eigen::RowVectorXd u1_row(6), u2_row(6), z1_row(6), z2_row(6);
  u1_row << sd1, 0, 0, 0, 0, 0;
  u2_row << sd2 * rho, sd2 * std::sqrt(std::max(0.0, 1.0 - rho * rho)), 0, 0, 0, 0;
  z1_row = si.s1 * u2_row;
  z1_row(2) = 1.0;
  z2_row = si.s2 * u1_row;
  z2_row(3) = 1.0;

  Eigen::RowVectorXd l1_row = comb.a1 * u1_row + comb.b1 * z1_row;
  Eigen::RowVectorXd l2_row = comb.a2 * u2_row + comb.b2 * z2_row;
  double var_l1 = l1_row.squaredNorm();
  double var_l2 = l2_row.squaredNorm();
  if (!(var_l1 > 1e-12) || !(var_l2 > 1e-12))
    throw input_error("orth_af_model: combiner produces a degenerate transmit signal");

  Eigen::RowVectorXd y1_row = std::sqrt(spec.p1 / var_l1) * l1_row;
  y1_row(4) = std::sqrt(spec.sigma_n1_2);
  Eigen::RowVectorXd y2_row = std::sqrt(spec.p2 / var_l2) * l2_row;
  y2_row(5) = std::sqrt(spec.sigma_n2_2);

  base.row(0) = u1_row;
  base.row(1) = u2_row;
  base.row(2) = z1_row;
  base.row(3) = z2_row;
  base.row(4) = y1_row;
  base.row(5) = y2_row;

  OrthAfModel m{GaussianVector({"U1", "U2", "Z1", "Z2", "Y1", "Y2"}, base * base.transpose()),
                base};
  return m;
}

DistortionPair af_si_distortion(const GaussianSourcePair& s, const OrthogonalSpec& spec,
                                const SideInfoModel& si, const LinearCombiner& comb,
                                bool decoder_si) {
  OrthAfModel m = orth_af_model(s, spec, si, comb);
  std::vector<std::string> obs = {"Y1", "Y2"};
  if (decoder_si) {
    obs.push_back("Z1");
    obs.push_back("Z2");
  }
  LmmseResult r = lmmse(m.joint, {"U1", "U2"}, obs, true);
  return {r.error_cov(0, 0), r.error_cov(1, 1)};
}

namespace {

double si_objective(const GaussianSourcePair& s, const OrthogonalSpec& spec,
                    const SideInfoModel& si, const LinearCombiner& comb, bool decoder_si) {
  DistortionPair d = af_si_distortion(s, spec, si, comb, decoder_si);
  return 0.5 * (d.d1 + d.d2);
}

}  // namespace

SiOptimum af_si_optimize(const GaussianSourcePair& s, const OrthogonalSpec& spec,
                         const SideInfoModel& si, SiMode mode) {
  const bool dec_si = mode == SiMode::dec || mode == SiMode::both;
  if (mode == SiMode::none || mode == SiMode::dec) {
    LinearCombiner plain;
    return SiOptimum{plain, si_objective(s, spec, si, plain, dec_si)};
  }

  // Encoders may mix in their observation: search the slope b_i/a_i on
  // [-10, 10] for each user, plus the a_i = 0 edge, by nested grid descent.
  const double lo = -10.0, hi = 10.0;
  auto eval = [&](bool edge1, double r1, bool edge2, double r2) {
    LinearCombiner c;
    c.a1 = edge1 ? 0.0 : 1.0;
    c.b1 = edge1 ? 1.0 : r1;
    c.a2 = edge2 ? 0.0 : 1.0;
    c.b2 = edge2 ? 1.0 : r2;
    return std::pair<LinearCombiner, double>(c, si_objective(s, spec, si, c, dec_si));
  };

  SiOptimum best;
  bool have_best = false;
  auto consider = [&](const std::pair<LinearCombiner, double>& cand) {
    if (!have_best || cand.second < best.avg_distortion) {
      best = {cand.first, cand.second};
      have_best = true;
    }
  };

  // Smooth branch: both users active, 2-D refinement.
  {
    double c1 = 0.0, c2 = 0.0, step = 0.5;
    double b1 = 0.0, b2 = 0.0, bval = 0.0;
    bool first = true;
    for (int level = 0; level < 6; ++level) {
      double lo1 = std::max(lo, c1 - 20 * step), lo2 = std::max(lo, c2 - 20 * step);
      double hi1 = std::min(hi, c1 + 20 * step), hi2 = std::min(hi, c2 + 20 * step);
      for (double r1 = lo1; r1 <= hi1 + 0.5 * step; r1 += step)
        for (double r2 = lo2; r2 <= hi2 + 0.5 * step; r2 += step) {
          double v = eval(false, r1, false, r2).second;
          if (first || v < bval) {
            b1 = r1;
            b2 = r2;
            bval = v;
            first = false;
          }
        }
      c1 = b1;
      c2 = b2;
      step *= 0.1;
    }
    consider(eval(false, b1, false, b2));
  }
  // Edge branches: one or both encoders send pure observation.
  for (int edge_user = 0; edge_user < 2; ++edge_user) {
    double c = 0.0, step = 0.5, bst = 0.0, bval = 0.0;
    bool first = true;
    for (int level = 0; level < 6; ++level) {
      double l = std::max(lo, c - 20 * step), h = std::min(hi, c + 20 * step);
      for (double r = l; r <= h + 0.5 * step; r += step) {
        double v = edge_user == 0 ? eval(true, 0, false, r).second
                                  : eval(false, r, true, 0).second;
        if (first || v < bval) {
          bst = r;
          bval = v;
          first = false;
        }
      }
      c = bst;
      step *= 0.1;
    }
    consider(edge_user == 0 ? eval(true, 0, false, bst) : eval(false, bst, true, 0));
  }
  consider(eval(true, 0, true, 0));
  return best;
}

}  // namespace macjscc
