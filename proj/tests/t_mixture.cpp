#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <utility>
#include <vector>

#include "macjscc/fixtures.hpp"
#include "macjscc/mixture.hpp"
#include "macjscc/rng.hpp"

using namespace macjscc;

namespace {

constexpr double kPi = 3.14159265358979323846;

double npdf(double x, double mean, double var) {
  double d = x - mean;
  return std::exp(-d * d / (2.0 * var)) / std::sqrt(2.0 * kPi * var);
}

// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on the
// Legendre recurrence.
void gl_rule(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double p1 = 0.0, dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double a = 1.0;
      p1 = t;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * a) / k;
        a = p1;
        p1 = p2;
      }
      dp = n * (t * p1 - a) / (t * t - 1.0);
      double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    x[i] = t;
    w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
}

double mix_pdf(const std::vector<MixtureComponent>& comps, double x) {
  double f = 0.0;
  for (const auto& c : comps) f += c.w * npdf(x, c.mean, c.var);
  return f;
}

// Brute-force L2 distance between the codebook density and the correlated
// unit normal, by composite tensor quadrature over [-12, 12]^2.
double quad_objective(const MixtureCodebook& cb, double rho) {
  auto st = detail::source_table(cb.source);
  static std::vector<double> gx, gw;
  if (gx.empty()) gl_rule(20, gx, gw);

  std::vector<double> nodes, weights;
  for (int panel = -12; panel < 12; ++panel)
    for (size_t i = 0; i < gx.size(); ++i) {
      nodes.push_back(panel + 0.5 * (gx[i] + 1.0));
      weights.push_back(0.5 * gw[i]);
    }
  size_t m = nodes.size();

  // Per-axis mixture tables, one row per symbol.
  std::vector<std::vector<double>> f1(st.n1, std::vector<double>(m));
  std::vector<std::vector<double>> f2(st.n2, std::vector<double>(m));
  for (int s = 0; s < st.n1; ++s)
    for (size_t i = 0; i < m; ++i) f1[s][i] = mix_pdf(cb.users[0][s], nodes[i]);
  for (int s = 0; s < st.n2; ++s)
    for (size_t i = 0; i < m; ++i) f2[s][i] = mix_pdf(cb.users[1][s], nodes[i]);

  double det = 1.0 - rho * rho;
  double total = 0.0;
  for (size_t i = 0; i < m; ++i)
    for (size_t j = 0; j < m; ++j) {
      double fc = 0.0;
      for (int s1 = 0; s1 < st.n1; ++s1)
        for (int s2 = 0; s2 < st.n2; ++s2)
          fc += st.joint[s1 * st.n2 + s2] * f1[s1][i] * f2[s2][j];
      double x1 = nodes[i], x2 = nodes[j];
      double g = std::exp(-0.5 * (x1 * x1 - 2.0 * rho * x1 * x2 + x2 * x2) / det) /
                 (2.0 * kPi * std::sqrt(det));
      double d = fc - g;
      total += weights[i] * weights[j] * d * d;
    }
  return total;
}

MixtureCodebook random_codebook(const Pmf& source, uint64_t seed, bool normalized) {
  CounterRng rng(seed, 0);
  auto st = detail::source_table(source);
  MixtureCodebook cb{source, {}};
  for (int u = 0; u < 2; ++u) {
    int n = u == 0 ? st.n1 : st.n2;
    cb.users[u].resize(n);
    for (int s = 0; s < n; ++s) {
      int k = 1 + static_cast<int>(rng.next_double() * 3.0);
      double total = 0.0;
      for (int i = 0; i < k; ++i) {
        MixtureComponent c;
        c.w = 0.3 + rng.next_double();
        c.mean = -2.5 + 5.0 * rng.next_double();
        c.var = 0.15 + 1.4 * rng.next_double();
        total += c.w;
        cb.users[u][s].push_back(c);
      }
      if (normalized)
        for (auto& c : cb.users[u][s]) c.w /= total;
    }
  }
  return cb;
}

// Exact first and second moments induced by the codebook.
struct CodebookMoments {
  double mean1 = 0.0, mean2 = 0.0, power1 = 0.0, power2 = 0.0, cross = 0.0;
};

CodebookMoments codebook_moments(const MixtureCodebook& cb) {
  auto st = detail::source_table(cb.source);
  auto sym_mean = [&](int u, int s) {
    double m = 0.0;
    for (const auto& c : cb.users[u][s]) m += c.w * c.mean;
    return m;
  };
  CodebookMoments mo;
  for (int s = 0; s < st.n1; ++s)
    for (const auto& c : cb.users[0][s]) {
      mo.mean1 += st.pm1[s] * c.w * c.mean;
      mo.power1 += st.pm1[s] * c.w * (c.var + c.mean * c.mean);
    }
  for (int s = 0; s < st.n2; ++s)
    for (const auto& c : cb.users[1][s]) {
      mo.mean2 += st.pm2[s] * c.w * c.mean;
      mo.power2 += st.pm2[s] * c.w * (c.var + c.mean * c.mean);
    }
  for (int s1 = 0; s1 < st.n1; ++s1)
    for (int s2 = 0; s2 < st.n2; ++s2)
      mo.cross += st.joint[s1 * st.n2 + s2] * sym_mean(0, s1) * sym_mean(1, s2);
  return mo;
}

Pmf uniform_pair() {
  return make_pmf({{"U1", 2}, {"U2", 2}}, {1.0, 1.0, 1.0, 1.0});
}

// Symbol-antipodal single-component codebook with exact unit power.
MixtureCodebook bpsk_codebook() {
  double v = 1e-4;
  double m = std::sqrt(1.0 - v);
  MixtureCodebook cb{uniform_pair(), {}};
  for (int u = 0; u < 2; ++u)
    cb.users[u] = {{{1.0, -m, v}}, {{1.0, m, v}}};
  return cb;
}

}  // namespace

TEST_CASE("squared mass of the correlated normal target") {
  CHECK(squared_target_mass(0.0) == doctest::Approx(0.0795774715459).epsilon(1e-12));
  CHECK(squared_target_mass(0.3) == doctest::Approx(0.0834198567663).epsilon(1e-12));
  CHECK(squared_target_mass(-0.3) == squared_target_mass(0.3));
  CHECK(squared_target_mass(0.85) == doctest::Approx(0.1510631867992).epsilon(1e-12));
  CHECK_THROWS_AS(squared_target_mass(1.0), input_error);
  CHECK_THROWS_AS(squared_target_mass(-1.0), input_error);
}

TEST_CASE("dense source view") {
  auto st = detail::source_table(fixtures::gmac_discrete_pmf());
  REQUIRE(st.n1 == 2);
  REQUIRE(st.n2 == 2);
  CHECK(st.joint[1 * 2 + 0] == 0.0);
  CHECK(st.joint[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(st.pm1[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(st.pm1[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(st.pm2[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK_THROWS_AS(detail::source_table(make_pmf({{"A", 2}, {"U2", 2}}, {1, 1, 1, 1})),
                  input_error);
  CHECK_THROWS_AS(detail::source_table(make_pmf({{"U1", 2}, {"U2", 2}, {"U3", 2}},
                                                std::vector<double>(8, 1.0))),
                  input_error);
}

TEST_CASE("closed-form objective for a product codebook") {
  // Single standard normal per symbol collapses the codebook density to the
  // independent bivariate normal, giving a hand-checkable objective.
  MixtureCodebook cb{uniform_pair(), {}};
  for (int u = 0; u < 2; ++u) cb.users[u] = {{{1.0, 0.0, 1.0}}, {{1.0, 0.0, 1.0}}};
  CHECK(fit_objective(cb, 0.0) == doctest::Approx(0.0).epsilon(1e-12));
  for (double rho : {0.3, -0.6}) {
    double a = 1.0 / (4.0 * kPi);
    double b = 1.0 / (2.0 * kPi * std::sqrt(4.0 - rho * rho));
    double c = 1.0 / (4.0 * kPi * std::sqrt(1.0 - rho * rho));
    CHECK(fit_objective(cb, rho) == doctest::Approx(a - 2.0 * b + c).epsilon(1e-13));
  }
}

TEST_CASE("objective agrees with brute-force quadrature") {
  Pmf cover = fixtures::cover_pair();
  Pmf gmac = fixtures::gmac_discrete_pmf();
  const double rhos[] = {0.0, 0.3, -0.5, 0.85, 0.3, -0.2, 0.6, 0.0, 0.45, -0.7};
  for (uint64_t i = 0; i < 10; ++i) {
    const Pmf& src = i % 2 ? gmac : cover;
    // Two of the codebooks have weights that do not sum to one, checking
    // that no hidden renormalization happens.
    MixtureCodebook cb = random_codebook(src, 100 + i, i % 5 != 0);
    double rho = rhos[i];
    double got = fit_objective(cb, rho);
    double want = quad_objective(cb, rho);
    CHECK(got >= -1e-12);
    CHECK(std::abs(got - want) < 1e-6);
    CHECK(got == doctest::Approx(want).epsilon(1e-8));
  }
}

TEST_CASE("objective is invariant to component order") {
  MixtureCodebook cb = random_codebook(fixtures::cover_pair(), 42, true);
  REQUIRE(cb.users[0][0].size() >= 2);
  double before = fit_objective(cb, 0.35);
  MixtureGradient gb = fit_objective_gradient(cb, 0.35);
  std::swap(cb.users[0][0][0], cb.users[0][0][1]);
  double after = fit_objective(cb, 0.35);
  MixtureGradient ga = fit_objective_gradient(cb, 0.35);
  CHECK(before == doctest::Approx(after).epsilon(1e-12));
  CHECK(gb[0][0][0].mean == doctest::Approx(ga[0][0][1].mean).epsilon(1e-12));
  CHECK(gb[0][0][1].var == doctest::Approx(ga[0][0][0].var).epsilon(1e-12));
  CHECK(gb[1][1][0].w == doctest::Approx(ga[1][1][0].w).epsilon(1e-12));
}

TEST_CASE("analytic gradient matches central differences") {
  for (uint64_t cs = 0; cs < 3; ++cs) {
    const Pmf& src = cs == 1 ? fixtures::gmac_discrete_pmf() : fixtures::cover_pair();
    MixtureCodebook cb = random_codebook(src, 7000 + cs, true);
    double rho = cs == 0 ? 0.3 : (cs == 1 ? -0.55 : 0.0);
    MixtureGradient grad = fit_objective_gradient(cb, rho);
    for (int u = 0; u < 2; ++u)
      for (size_t s = 0; s < cb.users[u].size(); ++s)
        for (size_t k = 0; k < cb.users[u][s].size(); ++k)
          for (int slot = 0; slot < 3; ++slot) {
            auto field = [&](MixtureComponent& c) -> double& {
              return slot == 0 ? c.w : slot == 1 ? c.mean : c.var;
            };
            double x0 = field(cb.users[u][s][k]);
            double h = 1e-6 * std::max(1.0, std::abs(x0));
            field(cb.users[u][s][k]) = x0 + h;
            double fp = fit_objective(cb, rho);
            field(cb.users[u][s][k]) = x0 - h;
            double fm = fit_objective(cb, rho);
            field(cb.users[u][s][k]) = x0;
            double fd = (fp - fm) / (2.0 * h);
            double an = field(grad[u][s][k]);
            double denom = std::max({std::abs(an), std::abs(fd), 1e-3});
            CHECK(std::abs(an - fd) / denom < 1e-5);
          }
  }
}

TEST_CASE("shape mismatches are rejected") {
  MixtureCodebook cb = random_codebook(fixtures::cover_pair(), 1, true);
  cb.users[0].pop_back();
  CHECK_THROWS_AS(fit_objective(cb, 0.0), input_error);
  MixtureCodebook cb2 = random_codebook(fixtures::cover_pair(), 2, true);
  cb2.users[1][0].clear();
  CHECK_THROWS_AS(fit_objective_gradient(cb2, 0.0), input_error);
}

TEST_CASE("codebook validation enforces moments and floors") {
  MixtureCodebook cb = bpsk_codebook();
  CHECK_NOTHROW(cb.validate());

  MixtureCodebook bad = cb;
  bad.users[0][0][0].w = 0.9;
  CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("sum to 1"), input_error);

  bad = cb;
  bad.users[0][0][0].var = 5e-5;
  CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("variance below"), input_error);

  bad = cb;
  bad.users[1][0][0].mean += 0.5;
  CHECK_THROWS_AS(bad.validate(), input_error);

  bad = cb;
  bad.users[0][0][0].mean = -0.5;
  bad.users[0][1][0].mean = 0.5;
  CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("power"), input_error);
}

TEST_CASE("fit problem validation") {
  FitProblem p{.target_rho = 0.0,
               .source = fixtures::gmac_discrete_pmf(),
               .counts1 = {2, 2},
               .counts2 = {2, 2}};
  CHECK_NOTHROW(p.validate());
  p.target_rho = 1.0;
  CHECK_THROWS_AS(p.validate(), input_error);
  p.target_rho = 0.3;
  p.counts1 = {2};
  CHECK_THROWS_AS(p.validate(), input_error);
  p.counts1 = {2, 0};
  CHECK_THROWS_AS(p.validate(), input_error);
  p.counts1 = {2, 2};
  p.starts = 0;
  CHECK_THROWS_AS(p.validate(), input_error);
  p.starts = 4;
  p.tolerance = 0.0;
  CHECK_THROWS_AS(p.validate(), input_error);
}

TEST_CASE("independent target is matched essentially exactly") {
  FitProblem p{.target_rho = 0.0,
               .source = fixtures::cover_pair(),
               .counts1 = {1, 1},
               .counts2 = {1, 1},
               .starts = 6};
  FitResult res = fit(p);
  CHECK(res.objective < 1e-8);
  CHECK(res.normalized_distortion < 1e-7);
  REQUIRE(res.constraint_residuals.size() == 4);
  for (double r : res.constraint_residuals) CHECK(std::abs(r) < 1e-6);
  CHECK_NOTHROW(res.codebook.validate());
  // Deterministic: repeating the same problem reproduces the optimum.
  FitResult again = fit(p);
  CHECK(res.objective == again.objective);
}

TEST_CASE("moderate correlation target fits tightly, strong one cannot") {
  FitProblem p{.target_rho = 0.3,
               .source = fixtures::gmac_discrete_pmf(),
               .counts1 = {2, 2},
               .counts2 = {2, 2},
               .starts = 8};
  FitResult res = fit(p);
  CHECK(res.normalized_distortion < 0.005);
  CHECK_NOTHROW(res.codebook.validate());
  CodebookMoments mo = codebook_moments(res.codebook);
  CHECK(std::abs(mo.mean1) < 1e-6);
  CHECK(std::abs(mo.power1 - 1.0) < 1e-6);
  CHECK(std::abs(mo.power2 - 1.0) < 1e-6);
  // The least-squares optimum trades away most of the target correlation.
  CHECK(std::abs(mo.cross - 0.3) > 0.05);
  CHECK(std::abs(mo.cross) < 0.5);

  p.target_rho = 0.6;
  p.starts = 6;
  FitResult hard = fit(p);
  CHECK(hard.normalized_distortion > 0.02);
}

TEST_CASE("fit reports failure when the constraints are never met") {
  FitProblem p{.target_rho = 0.0,
               .source = fixtures::cover_pair(),
               .counts1 = {1, 1},
               .counts2 = {1, 1},
               .starts = 1,
               .max_iterations = 1,
               .tolerance = 1e300};  // inner solver declares convergence immediately
  CHECK_THROWS_WITH_AS(fit(p), doctest::Contains("moment constraints"), numerical_error);
}

TEST_CASE("pair sampler reproduces the codebook law") {
  MixtureCodebook cb = random_codebook(fixtures::gmac_discrete_pmf(), 33, true);
  CodebookMoments mo = codebook_moments(cb);
  auto st = detail::source_table(cb.source);

  CounterRng rng(99, 0);
  const int n = 200000;
  double s1 = 0.0, q1 = 0.0, s2 = 0.0, q2 = 0.0, cr = 0.0;
  std::vector<double> freq(4, 0.0);
  for (int i = 0; i < n; ++i) {
    CodebookSample s = sample_pair(cb, rng);
    REQUIRE(s.u1 >= 0);
    REQUIRE(s.u1 < 2);
    freq[s.u1 * 2 + s.u2] += 1.0;
    s1 += s.x1;
    q1 += s.x1 * s.x1;
    s2 += s.x2;
    q2 += s.x2 * s.x2;
    cr += s.x1 * s.x2;
  }
  for (int c = 0; c < 4; ++c) {
    double p = st.joint[c];
    CHECK(std::abs(freq[c] / n - p) < 4.0 * std::sqrt(p * (1.0 - p) / n) + 1e-9);
  }
  // Loose four-sigma bands around the analytic moments.
  CHECK(std::abs(s1 / n - mo.mean1) < 4.0 * std::sqrt(mo.power1 / n));
  CHECK(std::abs(s2 / n - mo.mean2) < 4.0 * std::sqrt(mo.power2 / n));
  CHECK(std::abs(q1 / n - mo.power1) < 4.0 * std::sqrt(3.0) * mo.power1 / std::sqrt(n));
  CHECK(std::abs(q2 / n - mo.power2) < 4.0 * std::sqrt(3.0) * mo.power2 / std::sqrt(n));
  CHECK(std::abs(cr / n - mo.cross) < 4.0 * std::sqrt(mo.power1 * mo.power2 / n));

  // Identical seeds replay the identical stream.
  CounterRng ra(5, 1), rb(5, 1);
  for (int i = 0; i < 32; ++i) {
    CodebookSample a = sample_pair(cb, ra);
    CodebookSample b = sample_pair(cb, rb);
    CHECK(a.x1 == b.x1);
    CHECK(a.x2 == b.x2);
    CHECK(a.u1 == b.u1);
  }
}

TEST_CASE("mutual information estimate matches a quadrature oracle") {
  MixtureCodebook cb = bpsk_codebook();
  // With independent symbols and sigma_n2 = 0.5 the conditional output
  // density is a two-spike mixture whose entropy integral gives 0.7214959.
  auto [mi, se] = mutual_info_mc(cb, 0.5, MiQuantity::x1_given_x2_u2, 50000, 11);
  CHECK(se > 0.0);
  CHECK(se < 0.02);
  CHECK(std::abs(mi - 0.7214958601) < 4.0 * se + 1e-6);

  // Independent sources: conditioning on the partner symbol changes nothing.
  auto [mi_u, se_u] = mutual_info_mc(cb, 0.5, MiQuantity::x1_given_x2, 50000, 11);
  CHECK(std::abs(mi - mi_u) < 1e-9);
  CHECK(std::abs(se - se_u) < 1e-9);

  // The swapped-role estimate converges to the same symmetric value.
  auto [mi_s, se_s] = mutual_info_mc(cb, 0.5, MiQuantity::x2_given_x1_u1, 50000, 12);
  CHECK(std::abs(mi_s - mi) < 4.0 * (se + se_s) + 1e-6);

  CHECK_THROWS_AS(mutual_info_mc(cb, 0.5, MiQuantity::x1_given_x2, 9999, 1), input_error);
  CHECK_THROWS_AS(mutual_info_mc(cb, 0.0, MiQuantity::x1_given_x2, 50000, 1), input_error);
  CHECK_THROWS_AS(mutual_info_mc(cb, 0.5, MiQuantity::x1_given_x2, 50000, 1, -1.0),
                  input_error);
  MixtureCodebook bad = cb;
  bad.users[0][0][0].w = 0.5;
  CHECK_THROWS_AS(mutual_info_mc(bad, 0.5, MiQuantity::x1_given_x2, 50000, 1), input_error);
}
