#include "macjscc/fixtures.hpp"

namespace macjscc::fixtures {

namespace {

constexpr double kBscCrossover = 0.3;

double pair_weight(int u1, int u2) { return u1 == u2 ? 1.0 / 3.0 : 1.0 / 6.0; }

double bsc(int out, int in) {
  return out == in ? 1.0 - kBscCrossover : kBscCrossover;
}

int z_size(CoverSi si) {
  switch (si) {
    case CoverSi::none: return 1;
    case CoverSi::z1: return 2;
    case CoverSi::z1z2: return 4;
    case CoverSi::v: return 2;
    case CoverSi::full: return 8;
  }
  return 1;
}

int z_code(CoverSi si, int z1, int z2, int v) {
  switch (si) {
    case CoverSi::none: return 0;
    case CoverSi::z1: return z1;
    case CoverSi::z1z2: return 2 * z1 + z2;
    case CoverSi::v: return v;
    case CoverSi::full: return 4 * z1 + 2 * z2 + v;
  }
  return 0;
}

}  // namespace

Pmf cover_pair() {
  return make_pmf({{"U1", 2}, {"U2", 2}},
                  {pair_weight(0, 0), pair_weight(0, 1), pair_weight(1, 0), pair_weight(1, 1)});
}

Pmf cover_source(CoverSi si) {
  const int nz = z_size(si);
  std::vector<Var> vars = {{"U1", 2}, {"U2", 2}, {"Z1", 2}, {"Z2", 2}, {"Z", nz}};
  std::vector<double> w(static_cast<size_t>(16 * nz), 0.0);
  for (int u1 = 0; u1 < 2; ++u1)
    for (int u2 = 0; u2 < 2; ++u2)
      for (int z1 = 0; z1 < 2; ++z1)
        for (int z2 = 0; z2 < 2; ++z2)
          for (int n = 0; n < 2; ++n) {
            int v = u1 & u2 & n;
            double p = pair_weight(u1, u2) * bsc(z1, u2) * bsc(z2, u1) * 0.5;
            size_t idx = static_cast<size_t>(
                (((u1 * 2 + u2) * 2 + z1) * 2 + z2) * nz + z_code(si, z1, z2, v));
            w[idx] += p;
          }
  return make_pmf(std::move(vars), std::move(w));
}

SideInfoSystem cover_example(CoverSi si, CoverMaps maps, double d1, double d2) {
  Pmf source = cover_source(si);

  auto copy_source = [](const std::string& u, const std::string& z, const std::string& w,
                        int nz_enc) {
    return deterministic_kernel({{u, 2}, {z, nz_enc}}, {w, 2},
                                [](const std::vector<int>& s) { return s[0]; });
  };
  Kernel q1 = copy_source("U1", "Z1", "W1", 2);
  Kernel q2 = copy_source("U2", "Z2", "W2", 2);

  Kernel m1 = maps == CoverMaps::identity
                  ? identity_kernel({"W1", 2}, "X1")
                  : independent_kernel({{"W1", 2}}, {"X1", 2}, {0.5, 0.5});
  Kernel m2 = maps == CoverMaps::identity
                  ? identity_kernel({"W2", 2}, "X2")
                  : independent_kernel({{"W2", 2}}, {"X2", 2}, {0.5, 0.5});

  Kernel adder = deterministic_kernel({{"X1", 2}, {"X2", 2}}, {"Y", 3},
                                      [](const std::vector<int>& s) { return s[0] + s[1]; });

  DistortionSpec dist;
  dist.measure1 = DistortionMeasure::hamming();
  dist.measure2 = DistortionMeasure::hamming();
  dist.limit1 = d1;
  dist.limit2 = d2;

  return SideInfoSystem{std::move(source), std::move(q1), std::move(q2),
                        std::move(m1), std::move(m2), std::move(adder), std::move(dist)};
}

Pmf gmac_discrete_pmf() {
  return make_pmf({{"U1", 2}, {"U2", 2}}, {1.0 / 3.0, 1.0 / 3.0, 0.0, 1.0 / 3.0});
}

GmacDiscreteFixture gmac_discrete() { return GmacDiscreteFixture{gmac_discrete_pmf()}; }

}  // namespace macjscc::fixtures
