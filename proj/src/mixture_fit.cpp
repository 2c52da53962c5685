#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <optional>
#include <vector>

#include "macjscc/mixture.hpp"

namespace macjscc {

namespace {

constexpr double kVarFloor = 1e-4;
constexpr double kMeanBox = 10.0;

// Raw parameters, three per component in (user, symbol, component) order:
// y with w = y^2 / sum_k y_k^2, the mean (boxed to [-10, 10]), and z with
// var = 1e-4 + z^2.  The transforms keep every raw vector feasible.

MixtureCodebook cook(const Pmf& source, const std::vector<std::vector<MixtureComponent>>* shape,
                     const std::vector<double>& raw) {
  MixtureCodebook cb{source, {}};
  size_t pos = 0;
  for (int u = 0; u < 2; ++u) {
    cb.users[u].resize(shape[u].size());
    for (size_t s = 0; s < shape[u].size(); ++s) {
      size_t m = shape[u][s].size();
      auto& comps = cb.users[u][s];
      comps.resize(m);
      double total = 0.0;
      for (size_t k = 0; k < m; ++k) total += raw[pos + 3 * k] * raw[pos + 3 * k];
      for (size_t k = 0; k < m; ++k) {
        double y = raw[pos + 3 * k];
        double a = raw[pos + 3 * k + 1];
        double z = raw[pos + 3 * k + 2];
        comps[k].w = total > 0.0 ? y * y / total : 1.0 / static_cast<double>(m);
        comps[k].mean = std::clamp(a, -kMeanBox, kMeanBox);
        comps[k].var = kVarFloor + z * z;
      }
      pos += 3 * m;
    }
  }
  return cb;
}

// mean_u, power_u - 1 for both users.
std::array<double, 4> moment_residuals(const MixtureCodebook& cb, const detail::SourceTable& st) {
  std::array<double, 4> h{};
  for (int u = 0; u < 2; ++u) {
    const auto& pm = u == 0 ? st.pm1 : st.pm2;
    double mean = 0.0, power = 0.0;
    for (size_t s = 0; s < cb.users[u].size(); ++s)
      for (const auto& c : cb.users[u][s]) {
        mean += pm[s] * c.w * c.mean;
        power += pm[s] * c.w * (c.var + c.mean * c.mean);
      }
    h[2 * u] = mean;
    h[2 * u + 1] = power - 1.0;
  }
  return h;
}

class AugmentedObjective {
 public:
  AugmentedObjective(const FitProblem& problem, const detail::SourceTable& st)
      : problem_(problem), st_(st) {
    for (int u = 0; u < 2; ++u) {
      const auto& counts = u == 0 ? problem.counts1 : problem.counts2;
      shape_[u].resize(counts.size());
      for (size_t s = 0; s < counts.size(); ++s) shape_[u][s].resize(counts[s]);
    }
  }

  const std::vector<std::vector<MixtureComponent>>* shape() const { return shape_.data(); }

  std::array<double, 4> lambda{};
  double mu = 10.0;

  // Augmented Lagrangian value; raw-space gradient when grad != nullptr.
  double operator()(const std::vector<double>& raw, std::vector<double>* grad) const {
    MixtureCodebook cb = cook(problem_.source, shape_.data(), raw);
    std::array<double, 4> h = moment_residuals(cb, st_);
    double f = fit_objective(cb, problem_.target_rho);
    for (int j = 0; j < 4; ++j) f += lambda[j] * h[j] + 0.5 * mu * h[j] * h[j];
    if (!grad) return f;

    MixtureGradient gj = fit_objective_gradient(cb, problem_.target_rho);
    // Fold the constraint terms into the cooked-slot gradient.
    for (int u = 0; u < 2; ++u) {
      const auto& pm = u == 0 ? st_.pm1 : st_.pm2;
      double lm = lambda[2 * u] + mu * h[2 * u];
      double lp = lambda[2 * u + 1] + mu * h[2 * u + 1];
      for (size_t s = 0; s < cb.users[u].size(); ++s)
        for (size_t k = 0; k < cb.users[u][s].size(); ++k) {
          const auto& c = cb.users[u][s][k];
          gj[u][s][k].w += pm[s] * (lm * c.mean + lp * (c.var + c.mean * c.mean));
          gj[u][s][k].mean += pm[s] * c.w * (lm + lp * 2.0 * c.mean);
          gj[u][s][k].var += pm[s] * c.w * lp;
        }
    }
    // Chain through the raw transforms.
    grad->assign(raw.size(), 0.0);
    size_t pos = 0;
    for (int u = 0; u < 2; ++u)
      for (size_t s = 0; s < cb.users[u].size(); ++s) {
        size_t m = cb.users[u][s].size();
        double total = 0.0, dot = 0.0;
        for (size_t k = 0; k < m; ++k) {
          total += raw[pos + 3 * k] * raw[pos + 3 * k];
          dot += cb.users[u][s][k].w * gj[u][s][k].w;
        }
        for (size_t k = 0; k < m; ++k) {
          double y = raw[pos + 3 * k];
          double a = raw[pos + 3 * k + 1];
          double z = raw[pos + 3 * k + 2];
          if (total > 0.0) (*grad)[pos + 3 * k] = 2.0 * y / total * (gj[u][s][k].w - dot);
          (*grad)[pos + 3 * k + 1] = std::abs(a) <= kMeanBox ? gj[u][s][k].mean : 0.0;
          (*grad)[pos + 3 * k + 2] = gj[u][s][k].var * 2.0 * z;
        }
        pos += 3 * m;
      }
    return f;
  }

 private:
  const FitProblem& problem_;
  const detail::SourceTable& st_;
  std::array<std::vector<std::vector<MixtureComponent>>, 2> shape_;
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double inf_norm(const std::vector<double>& a) {
  double s = 0.0;
  for (double v : a) s = std::max(s, std::abs(v));
  return s;
}

// Limited-memory quasi-Newton descent with Armijo backtracking; minimizes in
// place, returns the final value.
double lbfgs_minimize(const AugmentedObjective& fn, std::vector<double>& x, int max_iter,
                      double tol) {
  const size_t memory = 8;
  size_t n = x.size();
  std::deque<std::vector<double>> s_hist, y_hist;
  std::deque<double> rho_hist;
  std::vector<double> g(n), g_new(n), q(n), d(n), x_new(n);
  double f = fn(x, &g);

  for (int iter = 0; iter < max_iter; ++iter) {
    if (inf_norm(g) < 1e-13) break;

    q = g;
    std::vector<double> alpha(s_hist.size());
    for (size_t i = s_hist.size(); i-- > 0;) {
      alpha[i] = rho_hist[i] * dot(s_hist[i], q);
      for (size_t j = 0; j < n; ++j) q[j] -= alpha[i] * y_hist[i][j];
    }
    if (!s_hist.empty()) {
      double gamma = dot(s_hist.back(), y_hist.back()) / dot(y_hist.back(), y_hist.back());
      for (double& v : q) v *= gamma;
    }
    for (size_t i = 0; i < s_hist.size(); ++i) {
      double beta = rho_hist[i] * dot(y_hist[i], q);
      for (size_t j = 0; j < n; ++j) q[j] += (alpha[i] - beta) * s_hist[i][j];
    }
    for (size_t j = 0; j < n; ++j) d[j] = -q[j];
    double slope = dot(g, d);
    if (!(slope < 0.0)) {
      for (size_t j = 0; j < n; ++j) d[j] = -g[j];
      slope = dot(g, d);
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
    }

    double step = 1.0, f_new = f;
    bool moved = false;
    for (int ls = 0; ls < 50; ++ls) {
      for (size_t j = 0; j < n; ++j) x_new[j] = x[j] + step * d[j];
      f_new = fn(x_new, nullptr);
      if (f_new <= f + 1e-4 * step * slope) {
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;

    fn(x_new, &g_new);
    std::vector<double> s_vec(n), y_vec(n);
    for (size_t j = 0; j < n; ++j) {
      s_vec[j] = x_new[j] - x[j];
      y_vec[j] = g_new[j] - g[j];
    }
    double sy = dot(s_vec, y_vec);
    if (sy > 1e-12 * std::sqrt(dot(s_vec, s_vec)) * std::sqrt(dot(y_vec, y_vec))) {
      s_hist.push_back(std::move(s_vec));
      y_hist.push_back(std::move(y_vec));
      rho_hist.push_back(1.0 / sy);
      if (s_hist.size() > memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    x = x_new;
    g = g_new;
    bool converged = std::abs(f - f_new) <= tol * std::max(1.0, std::abs(f_new));
    f = f_new;
    if (converged) break;
  }
  return f;
}

std::vector<double> random_start(const FitProblem& problem, uint64_t index) {
  CounterRng rng(problem.seed, index);
  std::vector<double> raw;
  for (int u = 0; u < 2; ++u) {
    const auto& counts = u == 0 ? problem.counts1 : problem.counts2;
    for (int c : counts)
      for (int k = 0; k < c; ++k) {
        raw.push_back(0.5 + rng.next_double());
        raw.push_back(-1.5 + 3.0 * rng.next_double());
        double var = 0.2 + rng.next_double();
        raw.push_back(std::sqrt(var - kVarFloor));
      }
  }
  return raw;
}

}  // namespace

FitResult fit(const FitProblem& problem) {
  problem.validate();
  detail::SourceTable st = detail::source_table(problem.source);

  std::optional<FitResult> best;
  double best_bad_residual = std::numeric_limits<double>::infinity();
  std::array<double, 4> best_bad_h{};

  for (int start = 0; start < problem.starts; ++start) {
    AugmentedObjective fn(problem, st);
    std::vector<double> x = random_start(problem, static_cast<uint64_t>(start));

    std::array<double, 4> h{};
    for (int stage = 0; stage < 15; ++stage) {
      lbfgs_minimize(fn, x, problem.max_iterations, problem.tolerance);
      MixtureCodebook cb = cook(problem.source, fn.shape(), x);
      h = moment_residuals(cb, st);
      double worst = 0.0;
      for (double v : h) worst = std::max(worst, std::abs(v));
      if (worst < 1e-8) break;
      for (int j = 0; j < 4; ++j) fn.lambda[j] += fn.mu * h[j];
      fn.mu = std::min(fn.mu * 8.0, 1e12);
    }

    MixtureCodebook cb = cook(problem.source, fn.shape(), x);
    double objective = fit_objective(cb, problem.target_rho);
    double worst = 0.0;
    for (double v : h) worst = std::max(worst, std::abs(v));

    if (worst < 1e-6) {
      if (!best || objective < best->objective) {
        best = FitResult{std::move(cb), objective,
                         objective / squared_target_mass(problem.target_rho),
                         std::vector<double>(h.begin(), h.end())};
      }
    } else if (worst < best_bad_residual) {
      best_bad_residual = worst;
      best_bad_h = h;
    }
  }

  if (!best) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "fit: no start met the moment constraints; best residuals "
                  "%.3e %.3e %.3e %.3e",
                  best_bad_h[0], best_bad_h[1], best_bad_h[2], best_bad_h[3]);
    throw numerical_error(buf);
  }
  best->codebook.validate();
  return *best;
}

}  // namespace macjscc
