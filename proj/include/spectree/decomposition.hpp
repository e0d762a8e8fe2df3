#pragma once

#include <vector>

#include "spectree/halfline.hpp"
#include "spectree/potentials.hpp"
#include "spectree/tree_model.hpp"

namespace spectree {

// Channels 0..k_max of the orthogonal-sum decomposition; channels with zero
// multiplicity are omitted.
std::vector<Channel> build_channels(const RegularTree& tree,
                                    const RadialPotential& V, double lambda,
                                    double d, int k_max);

struct TreeSpectrum {
  struct Line {
    double E = 0.0;
    long long multiplicity = 0;
    int channel = 0;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
  };
  std::vector<Line> lines;      // ascending in E, merged across channels
  std::vector<Line> marginal;   // eigenvalues in (-1e-6, 0), not counted
  long long total_count = 0;    // sum of multiplicities over `lines`
  bool only_channel0 = false;   // Corollary-2 regime flag
  std::vector<ChannelSolve> channel_solves;
  std::vector<int> channel_indices;

  // Eigenvalues repeated by multiplicity, ascending.
  std::vector<double> flattened() const;
};

// Solves every channel and merges the negative spectra with multiplicities.
// Eigenvalues within 1e-8 * max(1, |E|) merge into one line; eigenvalues in
// (-1e-6, 0) are reported as marginal and excluded from counts.
TreeSpectrum assemble_negative_spectrum(const std::vector<Channel>& channels,
                                        const Numerics& num);

// Certified channel cutoff: smallest K >= 0 such that the translated
// Bargmann bound for channels K+1 and K+2 is below one (those channels are
// then provably empty, and the bound keeps shrinking with k for the decaying
// potentials handled here). Throws "cutoff-not-found" past `hard_cap`.
struct ChannelCutoff {
  int k_max = 0;
  std::vector<double> bounds;  // bound for channels 1..k_max+2
};
ChannelCutoff choose_k_max(const RegularTree& tree, const RadialPotential& V,
                           double lambda, double d, int hard_cap = 40);

}  // namespace spectree
