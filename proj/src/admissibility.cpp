#include "macjscc/admissibility.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "macjscc/numeric.hpp"

namespace macjscc {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw input_error(what);
}

void check_kernel_shape(const Kernel& k, const std::vector<std::string>& inputs,
                        const std::string& output, const char* ctx) {
  require(k.input_vars.size() == inputs.size(),
          std::string(ctx) + ": kernel must have inputs " + (inputs.empty() ? "" : inputs[0]));
  for (size_t i = 0; i < inputs.size(); ++i)
    require(k.input_vars[i].name == inputs[i],
            std::string(ctx) + ": kernel input " + std::to_string(i) + " must be " + inputs[i]);
  require(k.output_var.name == output, std::string(ctx) + ": kernel output must be " + output);
}

int smallest_margin(const std::array<double, 3>& margins) {
  int best = 0;
  for (int i = 1; i < 3; ++i)
    if (margins[i] < margins[best]) best = i;
  return best;
}

}  // namespace

DistortionMeasure DistortionMeasure::custom(std::vector<std::vector<double>> t) {
  for (const auto& row : t)
    for (double d : row)
      if (!(d >= 0.0)) throw input_error("DistortionMeasure: negative entry");
  return {Kind::custom, std::move(t)};
}

double DistortionMeasure::operator()(int u, int uhat) const {
  switch (kind) {
    case Kind::hamming:
      return u == uhat ? 0.0 : 1.0;
    case Kind::squared_error: {
      double d = static_cast<double>(u - uhat);
      return d * d;
    }
    case Kind::custom:
      if (u < 0 || u >= static_cast<int>(table.size()) || uhat < 0 ||
          uhat >= static_cast<int>(table[u].size()))
        throw input_error("DistortionMeasure: symbol outside custom table");
      return table[u][uhat];
  }
  throw input_error("DistortionMeasure: bad kind");
}

Pmf SideInfoSystem::build_joint() const {
  for (const char* n : {"U1", "U2", "Z1", "Z2", "Z"})
    require(source.has_var(n), std::string("SideInfoSystem: source missing variable ") + n);
  require(source.variables().size() == 5, "SideInfoSystem: source must have exactly 5 variables");
  check_kernel_shape(quantizer1, {"U1", "Z1"}, "W1", "quantizer1");
  check_kernel_shape(quantizer2, {"U2", "Z2"}, "W2", "quantizer2");
  check_kernel_shape(channel_map1, {"W1"}, "X1", "channel_map1");
  check_kernel_shape(channel_map2, {"W2"}, "X2", "channel_map2");
  check_kernel_shape(channel, {"X1", "X2"}, "Y", "channel");

  Pmf joint = push_through(source, quantizer1);
  joint = push_through(joint, quantizer2);
  joint = push_through(joint, channel_map1);
  joint = push_through(joint, channel_map2);
  joint = push_through(joint, channel);
  return joint;
}

DecoderTable optimal_decoder(const SideInfoSystem& sys) {
  Pmf joint = sys.source;
  joint = push_through(joint, sys.quantizer1);
  joint = push_through(joint, sys.quantizer2);
  Pmf cells = joint.marginal({"U1", "U2", "W1", "W2", "Z"});

  const int n_u1 = cells.variables()[0].size;
  const int n_u2 = cells.variables()[1].size;
  DecoderTable dec;
  dec.n_w1 = cells.variables()[2].size;
  dec.n_w2 = cells.variables()[3].size;
  dec.n_z = cells.variables()[4].size;
  const size_t n_cells = static_cast<size_t>(dec.n_w1) * dec.n_w2 * dec.n_z;
  dec.uhat1.assign(n_cells, 0);
  dec.uhat2.assign(n_cells, 0);

  std::vector<double> post1(n_u1), post2(n_u2);
  for (int w1 = 0; w1 < dec.n_w1; ++w1)
    for (int w2 = 0; w2 < dec.n_w2; ++w2)
      for (int z = 0; z < dec.n_z; ++z) {
        std::fill(post1.begin(), post1.end(), 0.0);
        std::fill(post2.begin(), post2.end(), 0.0);
        for (int u1 = 0; u1 < n_u1; ++u1)
          for (int u2 = 0; u2 < n_u2; ++u2) {
            double p = cells.probs()[cells.state_of({u1, u2, w1, w2, z})];
            post1[u1] += p;
            post2[u2] += p;
          }
        // Unnormalized posterior risk; normalization does not move the argmin
        // and zero-probability cells then contribute nothing to the average.
        auto pick = [](const std::vector<double>& post, const DistortionMeasure& d,
                       double* risk_out) {
          int best = 0;
          double best_risk = 0.0;
          for (int uhat = 0; uhat < static_cast<int>(post.size()); ++uhat) {
            double risk = 0.0;
            for (int u = 0; u < static_cast<int>(post.size()); ++u)
              risk += post[u] * d(u, uhat);
            if (uhat == 0 || risk < best_risk) {
              best = uhat;
              best_risk = risk;
            }
          }
          *risk_out = best_risk;
          return best;
        };
        double r1 = 0.0, r2 = 0.0;
        size_t cell = static_cast<size_t>((w1 * dec.n_w2 + w2) * dec.n_z + z);
        dec.uhat1[cell] = pick(post1, sys.distortion.measure1, &r1);
        dec.uhat2[cell] = pick(post2, sys.distortion.measure2, &r2);
        dec.d1_achieved += r1;
        dec.d2_achieved += r2;
      }
  return dec;
}

AdmissibilityReport check_theorem1(const SideInfoSystem& sys, const CheckOptions& opts) {
  Pmf joint = sys.build_joint();

  AdmissibilityReport rep;
  rep.lhs[0] = mutual_information(joint, {"U1", "Z1"}, {"W1"}, {"W2", "Z"});
  rep.rhs[0] = mutual_information(joint, {"X1"}, {"Y"}, {"X2", "W2", "Z"});
  rep.lhs[1] = mutual_information(joint, {"U2", "Z2"}, {"W2"}, {"W1", "Z"});
  rep.rhs[1] = mutual_information(joint, {"X2"}, {"Y"}, {"X1", "W1", "Z"});
  rep.lhs[2] = mutual_information(joint, {"U1", "U2", "Z1", "Z2"}, {"W1", "W2"}, {"Z"});
  rep.rhs[2] = mutual_information(joint, {"X1", "X2"}, {"Y"}, {"Z"});
  for (int i = 0; i < 3; ++i) rep.margins[i] = rep.rhs[i] - rep.lhs[i];
  rep.binding_constraint = smallest_margin(rep.margins);

  DecoderTable dec = optimal_decoder(sys);
  rep.d1_achieved = dec.d1_achieved;
  rep.d2_achieved = dec.d2_achieved;

  bool info_ok = true;
  for (double m : rep.margins) info_ok = info_ok && m > opts.margin_epsilon;
  bool dist_ok = rep.d1_achieved <= sys.distortion.limit1 + opts.distortion_slack &&
                 rep.d2_achieved <= sys.distortion.limit2 + opts.distortion_slack;
  if (sys.distortion.joint_limit)
    dist_ok = dist_ok && rep.d1_achieved + rep.d2_achieved <=
                             *sys.distortion.joint_limit + opts.distortion_slack;
  rep.admissible = info_ok && dist_ok;
  return rep;
}

MultisourceReport check_multisource(const MultisourceSystem& sys, const CheckOptions& opts) {
  const int m = sys.num_users();
  require(m >= 1 && m <= 6, "check_multisource: 1 to 6 users supported");
  require(static_cast<int>(sys.channel_maps.size()) == m,
          "check_multisource: one channel map per user");

  auto uname = [](int i) { return "U" + std::to_string(i + 1); };
  auto zname = [](int i) { return "Z" + std::to_string(i + 1); };
  auto wname = [](int i) { return "W" + std::to_string(i + 1); };
  auto xname = [](int i) { return "X" + std::to_string(i + 1); };

  for (int i = 0; i < m; ++i) {
    require(sys.source.has_var(uname(i)) && sys.source.has_var(zname(i)),
            "check_multisource: source missing " + uname(i) + " or " + zname(i));
    check_kernel_shape(sys.quantizers[i], {uname(i), zname(i)}, wname(i), "quantizer");
    check_kernel_shape(sys.channel_maps[i], {wname(i)}, xname(i), "channel_map");
  }
  require(sys.source.has_var("Z"), "check_multisource: source missing Z");
  {
    std::vector<std::string> ins;
    for (int i = 0; i < m; ++i) ins.push_back(xname(i));
    check_kernel_shape(sys.channel, ins, "Y", "channel");
  }

  Pmf joint = sys.source;
  for (int i = 0; i < m; ++i) joint = push_through(joint, sys.quantizers[i]);
  for (int i = 0; i < m; ++i) joint = push_through(joint, sys.channel_maps[i]);
  joint = push_through(joint, sys.channel);

  MultisourceReport rep;
  for (unsigned mask = 1; mask < (1u << m); ++mask) {
    std::vector<std::string> uz_in, w_in, w_out, x_in, x_out;
    for (int i = 0; i < m; ++i) {
      if (mask & (1u << i)) {
        uz_in.push_back(uname(i));
        uz_in.push_back(zname(i));
        w_in.push_back(wname(i));
        x_in.push_back(xname(i));
      } else {
        w_out.push_back(wname(i));
        x_out.push_back(xname(i));
      }
    }
    SubsetConstraint c;
    c.mask = mask;
    std::vector<std::string> lhs_cond = w_out;
    lhs_cond.push_back("Z");
    c.lhs = mutual_information(joint, uz_in, w_in, lhs_cond);
    std::vector<std::string> rhs_cond = x_out;
    rhs_cond.insert(rhs_cond.end(), w_out.begin(), w_out.end());
    rhs_cond.push_back("Z");
    c.rhs = mutual_information(joint, x_in, {"Y"}, rhs_cond);
    c.margin = c.rhs - c.lhs;
    rep.constraints.push_back(c);
  }
  rep.admissible = true;
  double worst = rep.constraints.front().margin;
  rep.binding_mask = rep.constraints.front().mask;
  for (const SubsetConstraint& c : rep.constraints) {
    rep.admissible = rep.admissible && c.margin > opts.margin_epsilon;
    if (c.margin < worst) {
      worst = c.margin;
      rep.binding_mask = c.mask;
    }
  }
  return rep;
}

LosslessReport lossless_conditions(const Pmf& source, const Kernel& channel,
                                   const Kernel& map1, const Kernel& map2,
                                   const CheckOptions& opts) {
  require(source.has_var("U1") && source.has_var("U2") && source.variables().size() == 2,
          "lossless_conditions: source must be a joint over U1,U2");
  check_kernel_shape(map1, {"U1"}, "X1", "map1");
  check_kernel_shape(map2, {"U2"}, "X2", "map2");
  check_kernel_shape(channel, {"X1", "X2"}, "Y", "channel");

  Pmf joint = push_through(source, map1);
  joint = push_through(joint, map2);
  joint = push_through(joint, channel);

  LosslessReport rep;
  rep.lhs[0] = conditional_entropy(joint, {"U1"}, {"U2"});
  rep.rhs[0] = mutual_information(joint, {"X1"}, {"Y"}, {"X2", "U2"});
  rep.lhs[1] = conditional_entropy(joint, {"U2"}, {"U1"});
  rep.rhs[1] = mutual_information(joint, {"X2"}, {"Y"}, {"X1", "U1"});
  rep.lhs[2] = entropy(joint, {"U1", "U2"});
  rep.rhs[2] = mutual_information(joint, {"X1", "X2"}, {"Y"});
  for (int i = 0; i < 3; ++i) rep.margins[i] = rep.rhs[i] - rep.lhs[i];
  rep.binding_constraint = smallest_margin(rep.margins);
  rep.achievable = true;
  for (double mgn : rep.margins) rep.achievable = rep.achievable && mgn > opts.margin_epsilon;
  return rep;
}

RateRegionCheck source_coding_region(const SideInfoSystem& sys, double r1, double r2,
                                     const CheckOptions& opts) {
  Pmf joint = sys.source;
  joint = push_through(joint, sys.quantizer1);
  joint = push_through(joint, sys.quantizer2);

  RateRegionCheck out;
  out.required[0] = mutual_information(joint, {"U1", "Z1"}, {"W1"}, {"W2", "Z"});
  out.required[1] = mutual_information(joint, {"U2", "Z2"}, {"W2"}, {"W1", "Z"});
  out.required[2] = mutual_information(joint, {"U1", "U2", "Z1", "Z2"}, {"W1", "W2"}, {"Z"});
  out.inside = r1 - out.required[0] > opts.margin_epsilon &&
               r2 - out.required[1] > opts.margin_epsilon &&
               (r1 + r2) - out.required[2] > opts.margin_epsilon;
  return out;
}

double wz_binary_rate(double side_crossover, double test_crossover) {
  if (side_crossover < 0.0 || side_crossover > 0.5 || test_crossover < 0.0 ||
      test_crossover > 0.5)
    throw input_error("wz_binary_rate: crossovers must lie in [0, 0.5]");
  double p = side_crossover, d = test_crossover;
  double cascade = p * (1.0 - d) + (1.0 - p) * d;
  return (1.0 - binary_entropy(d)) - (1.0 - binary_entropy(cascade));
}

double hamming_rate_distortion(double source_bias, double d) {
  if (source_bias < 0.0 || source_bias > 1.0)
    throw input_error("hamming_rate_distortion: bias outside [0,1]");
  double dmax = std::min(source_bias, 1.0 - source_bias);
  if (d < 0.0 || d > dmax)
    throw input_error("hamming_rate_distortion: d outside [0, min(p,1-p)]");
  return std::max(0.0, binary_entropy(source_bias) - binary_entropy(d));
}

double mixed_si_rate(const SideInfoSystem& sys) {
  require(sys.source.variables()[sys.source.var_index("U2")].size == 1 &&
              sys.source.variables()[sys.source.var_index("Z2")].size == 1,
          "mixed_si_rate: U2 and Z2 must be degenerate");
  Pmf joint = push_through(sys.source, sys.quantizer1);
  return mutual_information(joint, {"U1"}, {"W1"}, {"Z1", "Z"});
}

}  // namespace macjscc
