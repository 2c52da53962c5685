#pragma once

#include "macjscc/admissibility.hpp"

namespace macjscc::fixtures {

// Which part of the encoder observations the decoder is given, packed into
// the single decoder variable Z.
enum class CoverSi { none, z1, z1z2, v, full };

// Channel inputs either copy the codeword bit or are fresh fair bits drawn
// independently of everything else.
enum class CoverMaps { identity, uniform };

// Correlated bit pair (equal values twice as likely as unequal), each encoder
// observing the other source through a BSC(0.3), plus an extra bit V equal to
// the AND of both sources and an independent fair bit.  Codewords copy the
// sources, the channel is the noiseless binary adder, distortion is Hamming.
SideInfoSystem cover_example(CoverSi si = CoverSi::full,
                             CoverMaps maps = CoverMaps::uniform,
                             double d1 = 0.0, double d2 = 0.0);

// The (U1,U2,Z1,Z2,Z) source joint of cover_example.
Pmf cover_source(CoverSi si);

// The bare correlated pair.
Pmf cover_pair();

// Ternary-support pair used by the code design examples: (1,0) has zero
// probability, the other three cells are uniform.
Pmf gmac_discrete_pmf();

struct GmacDiscreteFixture {
  Pmf source;
  double p1 = 3.0;
  double p2 = 4.0;
  double sigma_n2 = 1.0;
};

GmacDiscreteFixture gmac_discrete();

}  // namespace macjscc::fixtures
