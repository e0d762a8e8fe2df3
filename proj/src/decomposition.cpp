#include "spectree/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "spectree/common.hpp"
#include "spectree/special_functions.hpp"

namespace spectree {

std::vector<Channel> build_channels(const RegularTree& tree,
                                    const RadialPotential& V, double lambda,
                                    double d, int k_max) {
  (void)d;
  if (k_max < 0) throw Error("domain", "build_channels: k_max must be >= 0");
  std::vector<Channel> out;
  out.push_back(Channel::from_tree(tree, V, lambda, 0));
  for (int k = 1; k <= std::min(k_max, tree.generations()); ++k) {
    if (tree.multiplicity(k) == 0) continue;
    out.push_back(Channel::from_tree(tree, V, lambda, k));
  }
  return out;
}

std::vector<double> TreeSpectrum::flattened() const {
  std::vector<double> out;
  for (const auto& l : lines)
    for (long long i = 0; i < l.multiplicity; ++i) out.push_back(l.E);
  return out;
}

TreeSpectrum assemble_negative_spectrum(const std::vector<Channel>& channels,
                                        const Numerics& num) {
  TreeSpectrum spec;
  struct Raw {
    double E;
    long long mult;
    int channel;
    double lo, hi;
  };
  std::vector<Raw> raw;
  for (const auto& ch : channels) {
    ChannelSolve cs = solve_channel(ch, num);
    for (std::size_t i = 0; i < cs.result.eigenvalues.size(); ++i)
      raw.push_back({cs.result.eigenvalues[i], ch.multiplicity, ch.k,
                     cs.result.bracket_lo[i], cs.result.bracket_hi[i]});
    spec.channel_solves.push_back(std::move(cs));
    spec.channel_indices.push_back(ch.k);
  }
  std::sort(raw.begin(), raw.end(),
            [](const Raw& a, const Raw& b) { return a.E < b.E; });

  constexpr double kMarginal = -1e-6;
  for (const auto& r : raw) {
    TreeSpectrum::Line line{r.E, r.mult, r.channel, r.lo, r.hi};
    if (r.E > kMarginal) {
      spec.marginal.push_back(line);
      continue;
    }
    const double tol = 1e-8 * std::max(1.0, std::abs(r.E));
    if (!spec.lines.empty() && spec.lines.back().channel == r.channel &&
        std::abs(spec.lines.back().E - r.E) <= tol) {
      spec.lines.back().multiplicity += r.mult;
    } else {
      spec.lines.push_back(line);
    }
  }
  spec.total_count = 0;
  spec.only_channel0 = true;
  for (const auto& l : spec.lines) {
    spec.total_count += l.multiplicity;
    if (l.channel != 0) spec.only_channel0 = false;
  }
  return spec;
}

namespace {

// Bargmann-type constant for the translated channel operator
//   -d^2/ds^2 + (d-1)(d-3)/(4 s^2) + lambda Vk^-(s + t_k), Dirichlet at 0.
// For 1 <= d < 2 this is the paper's K(d) = 1/(2-d); for 2 < d <= 3 the same
// argument runs with |nu| and gives 1/(d-2); for d > 3 the inverse-square
// term is nonnegative and dropping it leaves the classical Bargmann bound.
double cert_constant(double d) {
  if (d >= 1.0 && d < 2.0) return 1.0 / (2.0 - d);
  if (d > 2.0 && d <= 3.0) return 1.0 / (d - 2.0);
  if (d > 3.0) return 1.0;
  throw Error("domain",
              "no certified channel bound at d=" + std::to_string(d) +
                  " (d = 2 has no Bargmann constant)");
}

}  // namespace

ChannelCutoff choose_k_max(const RegularTree& tree, const RadialPotential& V,
                           double lambda, double d, int hard_cap) {
  ChannelCutoff out;
  const double Kd = cert_constant(d);
  const double extent = V.extent(1e-14);

  auto channel_bound = [&](int k) -> double {
    if (k > tree.generations()) return 0.0;  // implicit b_k = 1: no channel
    if (tree.multiplicity(k) == 0) return 0.0;
    const double tk = tree.vertex_distances()[k - 1];
    if (tk >= extent) return 0.0;  // potential dead on the channel domain
    const double L_check = std::max(4.0 * extent, 4.0 * tk);
    Envelope env = envelope_constants(tree, k, d, L_check);
    PotentialView Vk = modified_potential_shifted(V, tree, k, d, env,
                                                  EnvelopeSide::Lower);
    const double m = moment(Vk, MomentWeight::power_t(1.0), true);
    return lambda * Kd * m;
  };

  std::vector<double> bounds;
  for (int K = 0; K <= hard_cap; ++K) {
    const double b1 = K < static_cast<int>(bounds.size())
                          ? bounds[K]
                          : channel_bound(K + 1);
    if (K >= static_cast<int>(bounds.size())) bounds.push_back(b1);
    const double b2 = channel_bound(K + 2);
    bounds.push_back(b2);
    if (b1 < 1.0 && b2 < 1.0) {
      out.k_max = K;
      out.bounds = bounds;
      return out;
    }
  }
  throw Error("cutoff-not-found",
              "no certified channel cutoff below k=" +
                  std::to_string(hard_cap) +
                  "; raise the cap or lower lambda");
}

}  // namespace spectree
