#include "macjscc/mixture.hpp"

#include <cmath>
#include <string>

#include "macjscc/mcsim.hpp"

namespace macjscc {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double normal_pdf(double x, double mean, double var) {
  double d = x - mean;
  return std::exp(-d * d / (2.0 * var)) / std::sqrt(kTwoPi * var);
}

// Zero-mean bivariate normal density with covariance [[v1, r], [r, v2]].
double bivar_pdf(double x1, double x2, double v1, double v2, double r) {
  double det = v1 * v2 - r * r;
  double q = (v2 * x1 * x1 - 2.0 * r * x1 * x2 + v1 * x2 * x2) / det;
  return std::exp(-0.5 * q) / (kTwoPi * std::sqrt(det));
}

void check_shapes(const MixtureCodebook& cb, const detail::SourceTable& st) {
  if (static_cast<int>(cb.users[0].size()) != st.n1 ||
      static_cast<int>(cb.users[1].size()) != st.n2)
    throw input_error("MixtureCodebook: component table does not match the source alphabet");
  for (const auto& user : cb.users)
    for (const auto& comps : user)
      if (comps.empty()) throw input_error("MixtureCodebook: empty component list");
}

// Sum_{k,l} w_k w_l' Integral N(x; a_k, c_k) N(x; a_l', c_l') dx.
double mixture_overlap(const std::vector<MixtureComponent>& a,
                       const std::vector<MixtureComponent>& b) {
  double s = 0.0;
  for (const auto& ca : a)
    for (const auto& cb : b) s += ca.w * cb.w * normal_pdf(ca.mean, cb.mean, ca.var + cb.var);
  return s;
}

using SymbolMatrix = std::vector<std::vector<double>>;

SymbolMatrix overlap_matrix(const std::vector<std::vector<MixtureComponent>>& user) {
  size_t n = user.size();
  SymbolMatrix g(n, std::vector<double>(n));
  for (size_t s = 0; s < n; ++s)
    for (size_t t = 0; t <= s; ++t) g[s][t] = g[t][s] = mixture_overlap(user[s], user[t]);
  return g;
}

// W(s, s') = sum_{t, t'} P(s, t) P(s', t') Gother(t, t'), pairing the other
// user's symbols through its mixture overlaps.
SymbolMatrix pair_weights(const detail::SourceTable& st, const SymbolMatrix& g_other,
                          bool for_user1) {
  int n = for_user1 ? st.n1 : st.n2;
  int m = for_user1 ? st.n2 : st.n1;
  auto p = [&](int s, int t) { return for_user1 ? st.joint[s * st.n2 + t] : st.joint[t * st.n2 + s]; };
  SymbolMatrix w(n, std::vector<double>(n, 0.0));
  for (int s = 0; s < n; ++s)
    for (int s2 = 0; s2 < n; ++s2) {
      double acc = 0.0;
      for (int t = 0; t < m; ++t)
        for (int t2 = 0; t2 < m; ++t2) acc += p(s, t) * p(s2, t2) * g_other[t][t2];
      w[s][s2] = acc;
    }
  return w;
}

}  // namespace

namespace detail {

SourceTable source_table(const Pmf& source) {
  if (source.variables().size() != 2 || !source.has_var("U1") || !source.has_var("U2"))
    throw input_error("expected a source pmf over exactly U1 and U2");
  int i1 = source.var_index("U1");
  int i2 = source.var_index("U2");
  SourceTable st;
  st.n1 = source.variables()[i1].size;
  st.n2 = source.variables()[i2].size;
  st.joint.assign(static_cast<size_t>(st.n1) * st.n2, 0.0);
  st.pm1.assign(st.n1, 0.0);
  st.pm2.assign(st.n2, 0.0);
  for (int s1 = 0; s1 < st.n1; ++s1)
    for (int s2 = 0; s2 < st.n2; ++s2) {
      double p = source.probs()[s1 * source.stride(i1) + s2 * source.stride(i2)];
      st.joint[s1 * st.n2 + s2] = p;
      st.pm1[s1] += p;
      st.pm2[s2] += p;
    }
  return st;
}

}  // namespace detail

void MixtureCodebook::validate() const {
  detail::SourceTable st = detail::source_table(source);
  check_shapes(*this, st);
  for (const auto& user : users)
    for (const auto& comps : user) {
      double total = 0.0;
      for (const auto& c : comps) {
        if (!(c.w >= 0.0)) throw input_error("MixtureCodebook: negative component weight");
        if (!(c.var >= 1e-4)) throw input_error("MixtureCodebook: component variance below 1e-4");
        total += c.w;
      }
      if (std::abs(total - 1.0) > 1e-9)
        throw input_error("MixtureCodebook: component weights must sum to 1");
    }
  for (int u = 0; u < 2; ++u) {
    const auto& pm = u == 0 ? st.pm1 : st.pm2;
    double mean = 0.0, power = 0.0;
    for (size_t s = 0; s < users[u].size(); ++s)
      for (const auto& c : users[u][s]) {
        mean += pm[s] * c.w * c.mean;
        power += pm[s] * c.w * (c.var + c.mean * c.mean);
      }
    if (std::abs(mean) > 1e-6)
      throw input_error("MixtureCodebook: user " + std::to_string(u + 1) + " mean is not 0");
    if (std::abs(power - 1.0) > 1e-6)
      throw input_error("MixtureCodebook: user " + std::to_string(u + 1) + " power is not 1");
  }
}

void FitProblem::validate() const {
  if (!(std::abs(target_rho) < 1.0)) throw input_error("FitProblem: |target_rho| must be < 1");
  detail::SourceTable st = detail::source_table(source);
  if (static_cast<int>(counts1.size()) != st.n1 || static_cast<int>(counts2.size()) != st.n2)
    throw input_error("FitProblem: component counts do not match the source alphabet");
  for (int c : counts1)
    if (c < 1) throw input_error("FitProblem: component counts must be >= 1");
  for (int c : counts2)
    if (c < 1) throw input_error("FitProblem: component counts must be >= 1");
  if (starts < 1) throw input_error("FitProblem: need at least one start");
  if (max_iterations < 1) throw input_error("FitProblem: need at least one iteration");
  if (!(tolerance > 0.0)) throw input_error("FitProblem: tolerance must be positive");
}

double squared_target_mass(double rho) {
  if (!(std::abs(rho) < 1.0)) throw input_error("squared_target_mass: need |rho| < 1");
  return 1.0 / (2.0 * kTwoPi * std::sqrt(1.0 - rho * rho));
}

double fit_objective(const MixtureCodebook& cb, double target_rho) {
  detail::SourceTable st = detail::source_table(cb.source);
  check_shapes(cb, st);
  SymbolMatrix g1 = overlap_matrix(cb.users[0]);
  SymbolMatrix g2 = overlap_matrix(cb.users[1]);

  double a_term = 0.0;
  for (int s1 = 0; s1 < st.n1; ++s1)
    for (int s2 = 0; s2 < st.n2; ++s2)
      for (int t1 = 0; t1 < st.n1; ++t1)
        for (int t2 = 0; t2 < st.n2; ++t2)
          a_term += st.joint[s1 * st.n2 + s2] * st.joint[t1 * st.n2 + t2] * g1[s1][t1] * g2[s2][t2];

  double b_term = 0.0;
  for (int s1 = 0; s1 < st.n1; ++s1)
    for (int s2 = 0; s2 < st.n2; ++s2) {
      double p = st.joint[s1 * st.n2 + s2];
      if (p == 0.0) continue;
      double cell = 0.0;
      for (const auto& c1 : cb.users[0][s1])
        for (const auto& c2 : cb.users[1][s2])
          cell += c1.w * c2.w *
                  bivar_pdf(c1.mean, c2.mean, 1.0 + c1.var, 1.0 + c2.var, target_rho);
      b_term += p * cell;
    }

  return a_term - 2.0 * b_term + squared_target_mass(target_rho);
}

MixtureGradient fit_objective_gradient(const MixtureCodebook& cb, double target_rho) {
  detail::SourceTable st = detail::source_table(cb.source);
  check_shapes(cb, st);
  SymbolMatrix g1 = overlap_matrix(cb.users[0]);
  SymbolMatrix g2 = overlap_matrix(cb.users[1]);
  SymbolMatrix w1 = pair_weights(st, g2, true);
  SymbolMatrix w2 = pair_weights(st, g1, false);

  MixtureGradient grad;
  for (int u = 0; u < 2; ++u) {
    grad[u].resize(cb.users[u].size());
    for (size_t s = 0; s < cb.users[u].size(); ++s)
      grad[u][s].assign(cb.users[u][s].size(), MixtureComponent{0.0, 0.0, 0.0});
  }

  // Squared-mixture part: the double sum over cells is symmetric, so each
  // slot picks up twice its one-sided derivative.
  for (int u = 0; u < 2; ++u) {
    const auto& user = cb.users[u];
    const SymbolMatrix& pw = u == 0 ? w1 : w2;
    for (size_t s = 0; s < user.size(); ++s)
      for (size_t k = 0; k < user[s].size(); ++k) {
        const auto& c = user[s][k];
        double gw = 0.0, ga = 0.0, gc = 0.0;
        for (size_t s2 = 0; s2 < user.size(); ++s2) {
          double weight = 2.0 * pw[s][s2];
          if (weight == 0.0) continue;
          for (const auto& o : user[s2]) {
            double v = c.var + o.var;
            double d = c.mean - o.mean;
            double n = normal_pdf(d, 0.0, v);
            gw += weight * o.w * n;
            ga += weight * c.w * o.w * n * (-d / v);
            gc += weight * c.w * o.w * n * (d * d / (2.0 * v * v) - 0.5 / v);
          }
        }
        grad[u][s][k].w += gw;
        grad[u][s][k].mean += ga;
        grad[u][s][k].var += gc;
      }
  }

  // Cross term with the target density, including the -2 factor.
  for (int s1 = 0; s1 < st.n1; ++s1)
    for (int s2 = 0; s2 < st.n2; ++s2) {
      double p = st.joint[s1 * st.n2 + s2];
      if (p == 0.0) continue;
      for (size_t k = 0; k < cb.users[0][s1].size(); ++k)
        for (size_t l = 0; l < cb.users[1][s2].size(); ++l) {
          const auto& c1 = cb.users[0][s1][k];
          const auto& c2 = cb.users[1][s2][l];
          double v1 = 1.0 + c1.var, v2 = 1.0 + c2.var;
          double det = v1 * v2 - target_rho * target_rho;
          double phi = bivar_pdf(c1.mean, c2.mean, v1, v2, target_rho);
          double im1 = (v2 * c1.mean - target_rho * c2.mean) / det;
          double im2 = (v1 * c2.mean - target_rho * c1.mean) / det;
          double base = -2.0 * p * phi;
          grad[0][s1][k].w += base * c2.w;
          grad[1][s2][l].w += base * c1.w;
          double both = base * c1.w * c2.w;
          grad[0][s1][k].mean += both * (-im1);
          grad[1][s2][l].mean += both * (-im2);
          grad[0][s1][k].var += both * 0.5 * (im1 * im1 - v2 / det);
          grad[1][s2][l].var += both * 0.5 * (im2 * im2 - v1 / det);
        }
    }

  return grad;
}

CodebookSample sample_pair(const MixtureCodebook& cb, CounterRng& rng) {
  const auto& probs = cb.source.probs();
  double target = rng.next_double();
  double acc = 0.0;
  int64_t state = cb.source.states() - 1;
  for (int64_t i = 0; i < cb.source.states(); ++i) {
    acc += probs[i];
    if (target < acc) {
      state = i;
      break;
    }
  }
  CodebookSample out;
  out.u1 = cb.source.digit(state, cb.source.var_index("U1"));
  out.u2 = cb.source.digit(state, cb.source.var_index("U2"));
  int syms[2] = {out.u1, out.u2};
  double* xs[2] = {&out.x1, &out.x2};
  for (int u = 0; u < 2; ++u) {
    const auto& comps = cb.users[u][syms[u]];
    double t = rng.next_double();
    double cum = 0.0;
    size_t pick = comps.size() - 1;
    for (size_t k = 0; k < comps.size(); ++k) {
      cum += comps[k].w;
      if (t < cum) {
        pick = k;
        break;
      }
    }
    *xs[u] = comps[pick].mean + std::sqrt(comps[pick].var) * rng.next_gaussian();
  }
  return out;
}

std::pair<double, double> mutual_info_mc(const MixtureCodebook& cb, double sigma_n2,
                                         MiQuantity quantity, int64_t n, uint64_t seed,
                                         double p1, double p2) {
  cb.validate();
  if (!(sigma_n2 > 0.0)) throw input_error("mutual_info_mc: noise variance must be positive");
  if (!(p1 > 0.0) || !(p2 > 0.0)) throw input_error("mutual_info_mc: powers must be positive");
  if (n < 10000) throw input_error("mutual_info_mc: need at least 10^4 samples");

  detail::SourceTable st = detail::source_table(cb.source);
  bool swapped = quantity == MiQuantity::x2_given_x1_u1 || quantity == MiQuantity::x2_given_x1;
  bool cond_symbol =
      quantity == MiQuantity::x1_given_x2_u2 || quantity == MiQuantity::x2_given_x1_u1;

  // Role A is the user whose input's information about Y is measured; role B
  // is the conditioned user.
  int na = swapped ? st.n2 : st.n1;
  int nb = swapped ? st.n1 : st.n2;
  double pa = swapped ? p2 : p1;
  double pb = swapped ? p1 : p2;
  const auto& mix_a = cb.users[swapped ? 1 : 0];
  const auto& mix_b = cb.users[swapped ? 0 : 1];
  auto joint_ab = [&](int sa, int sb) {
    return swapped ? st.joint[sb * st.n2 + sa] : st.joint[sa * st.n2 + sb];
  };
  const auto& pm_b = swapped ? st.pm1 : st.pm2;
  double ra = std::sqrt(pa), rb = std::sqrt(pb);

  // Density of X_A + noise given U_A = sa, at t.
  auto conv_a = [&](int sa, double t) {
    double f = 0.0;
    for (const auto& c : mix_a[sa]) f += c.w * normal_pdf(t, ra * c.mean, pa * c.var + sigma_n2);
    return f;
  };
  // Density of X_B given U_B = sb, at x.
  auto dens_b = [&](int sb, double x) {
    double f = 0.0;
    for (const auto& c : mix_b[sb]) f += c.w * normal_pdf(x, rb * c.mean, pb * c.var);
    return f;
  };

  struct Draw {
    int sa = 0, sb = 0;
    double xb = 0.0, y = 0.0;
  };
  double sn = std::sqrt(sigma_n2);
  auto sampler = [&](CounterRng& rng) {
    CodebookSample s = sample_pair(cb, rng);
    Draw d;
    d.sa = swapped ? s.u2 : s.u1;
    d.sb = swapped ? s.u1 : s.u2;
    double xa = ra * (swapped ? s.x2 : s.x1);
    d.xb = rb * (swapped ? s.x1 : s.x2);
    d.y = xa + d.xb + sn * rng.next_gaussian();
    return d;
  };
  auto density = [&](const Draw& d) {
    double t = d.y - d.xb;
    if (cond_symbol) {
      double f = 0.0;
      for (int sa = 0; sa < na; ++sa) f += joint_ab(sa, d.sb) * conv_a(sa, t);
      return f / pm_b[d.sb];
    }
    double num = 0.0, den = 0.0;
    for (int sb = 0; sb < nb; ++sb) {
      double fb = dens_b(sb, d.xb);
      den += pm_b[sb] * fb;
      double inner = 0.0;
      for (int sa = 0; sa < na; ++sa) inner += joint_ab(sa, sb) * conv_a(sa, t);
      num += fb * inner;
    }
    return num / den;
  };

  SimConfig cfg;
  cfg.seed = seed;
  cfg.n_samples = n;
  cfg.batch = 65536;
  auto [h, se] = estimate_entropy_mc(density, sampler, cfg);
  double h_noise = 0.5 * std::log2(kTwoPi * 2.7182818284590452354 * sigma_n2);
  return {h - h_noise, se};
}

}  // namespace macjscc
