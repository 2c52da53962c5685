#include "macjscc/mcsim.hpp"

#include <atomic>
#include <cmath>
#include <thread>
#include <vector>

namespace macjscc {

void RunningStat::merge(const RunningStat& other) {
  if (other.n_ == 0) return;
  if (n_ == 0) {
    *this = other;
    return;
  }
  int64_t n = n_ + other.n_;
  double d = other.mean_ - mean_;
  mean_ += d * static_cast<double>(other.n_) / static_cast<double>(n);
  m2_ += other.m2_ +
         d * d * static_cast<double>(n_) * static_cast<double>(other.n_) / static_cast<double>(n);
  n_ = n;
}

double RunningStat::variance() const {
  if (n_ < 2) return 0.0;
  return m2_ / static_cast<double>(n_ - 1);
}

double RunningStat::standard_error() const {
  if (n_ < 2) return 0.0;
  return std::sqrt(variance() / static_cast<double>(n_));
}

void SimConfig::validate() const {
  if (n_samples < 1000) throw input_error("SimConfig: need at least 10^3 samples");
  if (batch < 1) throw input_error("SimConfig: batch must be positive");
  if (threads < 0) throw input_error("SimConfig: negative thread count");
}

namespace {

struct PairStat {
  RunningStat e1, e2;
};

// Runs cfg.n_samples draws split into batches; batch b uses the (seed, b)
// substream and batch statistics merge in index order, so the result is
// identical for any thread count.
template <class Fn>
PairStat run_batches(const SimConfig& cfg, Fn&& per_sample) {
  int64_t n_batches = (cfg.n_samples + cfg.batch - 1) / cfg.batch;
  std::vector<PairStat> parts(static_cast<size_t>(n_batches));

  auto work = [&](int64_t b) {
    int64_t lo = b * cfg.batch;
    int64_t count = std::min(cfg.batch, cfg.n_samples - lo);
    CounterRng rng(cfg.seed, static_cast<uint64_t>(b));
    PairStat ps;
    for (int64_t i = 0; i < count; ++i) {
      double err1 = 0.0, err2 = 0.0;
      per_sample(rng, err1, err2);
      ps.e1.add(err1);
      ps.e2.add(err2);
    }
    parts[static_cast<size_t>(b)] = ps;
  };

  unsigned hw = std::thread::hardware_concurrency();
  int64_t n_workers = cfg.threads > 0 ? cfg.threads : (hw ? static_cast<int>(hw) : 1);
  n_workers = std::min<int64_t>(n_workers, n_batches);
  if (n_workers <= 1) {
    for (int64_t b = 0; b < n_batches; ++b) work(b);
  } else {
    std::atomic<int64_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(n_workers));
    for (int64_t t = 0; t < n_workers; ++t)
      pool.emplace_back([&] {
        for (;;) {
          int64_t b = next.fetch_add(1);
          if (b >= n_batches) return;
          work(b);
        }
      });
    for (auto& th : pool) th.join();
  }

  PairStat total;
  for (auto& p : parts) {
    total.e1.merge(p.e1);
    total.e2.merge(p.e2);
  }
  return total;
}

SimResult finish(const PairStat& stat, double closed1, double closed2) {
  SimResult r;
  r.d1 = stat.e1.mean();
  r.d2 = stat.e2.mean();
  r.se1 = stat.e1.standard_error();
  r.se2 = stat.e2.standard_error();
  r.n = stat.e1.count();
  r.d1_closed = closed1;
  r.d2_closed = closed2;
  r.z1 = r.se1 > 0.0 ? (r.d1 - closed1) / r.se1 : 0.0;
  r.z2 = r.se2 > 0.0 ? (r.d2 - closed2) / r.se2 : 0.0;
  return r;
}

}  // namespace

SimResult simulate_af_gmac(const GaussianSourcePair& s, const GmacSpec& g, const SimConfig& cfg) {
  s.validate();
  g.validate();
  cfg.validate();

  const double sd1 = std::sqrt(s.sigma1_2);
  const double sd2 = std::sqrt(s.sigma2_2);
  const double rho = s.rho;
  const double rc = std::sqrt(1.0 - rho * rho);
  const double a1 = std::sqrt(g.p1);
  const double a2 = std::sqrt(g.p2);
  const double sn = std::sqrt(g.sigma_n2);
  const double t = g.p1 + g.p2 + 2.0 * rho * a1 * a2 + g.sigma_n2;
  const double k1 = sd1 * (a1 + rho * a2) / t;
  const double k2 = sd2 * (a2 + rho * a1) / t;

  PairStat stat = run_batches(cfg, [&](CounterRng& rng, double& err1, double& err2) {
    double ga = rng.next_gaussian();
    double gb = rng.next_gaussian();
    double gc = rng.next_gaussian();
    double u1 = sd1 * ga;
    double u2 = sd2 * (rho * ga + rc * gb);
    double y = a1 * ga + a2 * (rho * ga + rc * gb) + sn * gc;
    double d1 = u1 - k1 * y;
    double d2 = u2 - k2 * y;
    err1 = d1 * d1;
    err2 = d2 * d2;
  });

  DistortionPair closed = af_distortion(s, g);
  return finish(stat, closed.d1, closed.d2);
}

SimResult simulate_af_orth(const GaussianSourcePair& s, const OrthogonalSpec& spec,
                           const std::optional<SideInfoModel>& si,
                           const std::optional<LinearCombiner>& comb, bool decoder_si,
                           const SimConfig& cfg) {
  s.validate();
  spec.validate();
  cfg.validate();
  SideInfoModel si_eff = si.value_or(SideInfoModel{});
  LinearCombiner comb_eff = comb.value_or(LinearCombiner{});

  OrthAfModel model = orth_af_model(s, spec, si_eff, comb_eff);
  std::vector<std::string> observed = {"Y1", "Y2"};
  if (decoder_si) {
    observed.push_back("Z1");
    observed.push_back("Z2");
  }
  LmmseResult dec = lmmse(model.joint, {"U1", "U2"}, observed, true);

  std::vector<int> obs_idx = model.joint.indices(observed);
  const int iu1 = model.joint.index("U1");
  const int iu2 = model.joint.index("U2");
  const Eigen::MatrixXd& tf = model.transform;
  const Eigen::MatrixXd& coeff = dec.coeff;

  PairStat stat = run_batches(cfg, [&](CounterRng& rng, double& err1, double& err2) {
    Eigen::Matrix<double, 6, 1> gvec;
    for (int i = 0; i < 6; ++i) gvec(i) = rng.next_gaussian();
    Eigen::Matrix<double, 6, 1> vars = tf * gvec;
    double est1 = 0.0, est2 = 0.0;
    for (size_t j = 0; j < obs_idx.size(); ++j) {
      double o = vars(obs_idx[j]);
      est1 += coeff(0, static_cast<int>(j)) * o;
      est2 += coeff(1, static_cast<int>(j)) * o;
    }
    double d1 = vars(iu1) - est1;
    double d2 = vars(iu2) - est2;
    err1 = d1 * d1;
    err2 = d2 * d2;
  });

  DistortionPair closed = af_si_distortion(s, spec, si_eff, comb_eff, decoder_si);
  return finish(stat, closed.d1, closed.d2);
}

}  // namespace macjscc
