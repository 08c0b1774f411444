#pragma once

// Density-based heuristics for entanglement enhancement: effective density,
// the qualitative enhancement verdict, the border-density ranking of candidate
// blocks, and a tabulated homogeneous single-site entanglement curve.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "hubbard/eigensolver.hpp"
#include "hubbard/entanglement.hpp"
#include "hubbard/hamiltonian.hpp"
#include "hubbard/lattice.hpp"

namespace hubbard {

/// Upper edge of the regime where entanglement grows with density.
inline constexpr double kMonotoneDensityLimit = 0.8;

/// N / (L - I): particles spread over the sites not depleted by impurities.
[[nodiscard]] inline double effective_density(int sites, int particles, int impurities) {
  if (impurities < 0 || impurities >= sites)
    throw ValidationError("impurity count " + std::to_string(impurities) + " must lie in [0, L=" +
                          std::to_string(sites) + ")");
  return static_cast<double>(particles) / static_cast<double>(sites - impurities);
}

enum class Verdict { enhance, suppress, indeterminate };

[[nodiscard]] inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::enhance: return "enhance";
    case Verdict::suppress: return "suppress";
    default: return "indeterminate";
  }
}

struct Prediction {
  Verdict verdict = Verdict::indeterminate;
  double filling = 0.0;
  double effective_filling = 0.0;
  std::string rationale;
};

/// Enhancement is predicted when n < n_eff <= 0.8 in the strong-potential
/// regime (every nonzero V_i >= 2U).
[[nodiscard]] inline Prediction predict_enhancement_regime(const ChainSpec& spec) {
  const auto imps = spec.impurity_sites();
  if (imps.empty()) throw ValidationError("homogeneous chain: no inhomogeneity to predict from");
  Prediction p;
  p.filling = spec.filling();
  p.effective_filling = effective_density(spec.sites, spec.particles(), static_cast<int>(imps.size()));
  double v_min = spec.potential[static_cast<std::size_t>(imps.front())];
  for (int i : imps) v_min = std::min(v_min, spec.potential[static_cast<std::size_t>(i)]);

  char buf[160];
  if (v_min < 2.0 * spec.U) {
    std::snprintf(buf, sizeof buf, "weak potential: min V = %.4g < 2U = %.4g, outside the V >> U regime", v_min,
                  2.0 * spec.U);
    p.rationale = buf;
    return p;
  }
  if (spec.particles() == 0) {
    p.rationale = "empty chain";
    return p;
  }
  if (p.filling < p.effective_filling && p.effective_filling <= kMonotoneDensityLimit) {
    p.verdict = Verdict::enhance;
    std::snprintf(buf, sizeof buf, "n = %.4g < n_eff = %.4g <= %.2g: depletion raises the density of the remaining sites",
                  p.filling, p.effective_filling, kMonotoneDensityLimit);
  } else if (p.filling <= kMonotoneDensityLimit) {
    std::snprintf(buf, sizeof buf, "n = %.4g <= %.2g < n_eff = %.4g: effective density leaves the monotone regime",
                  p.filling, kMonotoneDensityLimit, p.effective_filling);
  } else {
    p.verdict = Verdict::suppress;
    std::snprintf(buf, sizeof buf, "n = %.4g > %.2g: raising the density further reduces entanglement", p.filling,
                  kMonotoneDensityLimit);
  }
  p.rationale = buf;
  return p;
}

struct BlockScore {
  BlockSpec block;
  double border_density = 0.0;     // mean over both sides of the cut
  double interface_density = 0.0;  // complement side of the cut
  double block_density = 0.0;
  double score = 0.0;              // primary ordering key (capped border density)
};

namespace detail {

inline double capped_mean(std::span<const double> profile, std::span<const int> sites) {
  if (sites.empty()) return 0.0;
  double s = 0.0;
  for (int i : sites) s += std::min(profile[static_cast<std::size_t>(i)], kMonotoneDensityLimit);
  return s / static_cast<double>(sites.size());
}

}  // namespace detail

/// Scores one block: the mean of the (capped) block-border density and the
/// (capped) interface density.
[[nodiscard]] inline BlockScore score_block(std::span<const double> profile, const BlockSpec& block,
                                            Boundary boundary) {
  const int sites = static_cast<int>(profile.size());
  const auto border = block_border_sites(sites, boundary, block);
  const auto iface = interface_sites(sites, boundary, block);
  BlockScore s;
  s.block = block;
  s.interface_density = detail::capped_mean(profile, iface);
  s.block_density = detail::capped_mean(profile, block.sites);
  s.border_density = 0.5 * (detail::capped_mean(profile, border) + s.interface_density);
  s.score = s.border_density;
  return s;
}

/// Candidate blocks ordered best first. Key: border score (higher first),
/// then interface density, then block density, then lowest first site.
[[nodiscard]] inline std::vector<BlockScore> rank_blocks(std::span<const double> profile,
                                                         const std::vector<BlockSpec>& blocks,
                                                         Boundary boundary = Boundary::periodic) {
  std::vector<BlockScore> out;
  out.reserve(blocks.size());
  for (const auto& b : blocks) out.push_back(score_block(profile, b, boundary));
  std::stable_sort(out.begin(), out.end(), [](const BlockScore& a, const BlockScore& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.interface_density != b.interface_density) return a.interface_density > b.interface_density;
    if (a.block_density != b.block_density) return a.block_density > b.block_density;
    return a.block.sites < b.block.sites;
  });
  return out;
}

/// Single-site entanglement of homogeneous periodic chains, tabulated against
/// filling and interpolated linearly.
struct HomogeneousReference {
  double U = 0.0;
  int sites = 0;
  std::vector<double> fillings;
  std::vector<double> entropies;

  [[nodiscard]] double at(double n) const {
    if (fillings.empty()) throw ValidationError("empty reference");
    if (n <= fillings.front()) return entropies.front();
    if (n >= fillings.back()) return entropies.back();
    const auto it = std::upper_bound(fillings.begin(), fillings.end(), n);
    const std::size_t k = static_cast<std::size_t>(it - fillings.begin());
    const double f = (n - fillings[k - 1]) / (fillings[k] - fillings[k - 1]);
    return entropies[k - 1] + f * (entropies[k] - entropies[k - 1]);
  }

  /// True if S_1 strictly increases over every tabulated filling <= limit.
  [[nodiscard]] bool increasing_up_to(double limit) const {
    for (std::size_t k = 1; k < fillings.size() && fillings[k] <= limit + 1e-12; ++k)
      if (!(entropies[k] > entropies[k - 1])) return false;
    return true;
  }

  void write_csv(std::ostream& os) const {
    os << "n,S1_bits\n";
    char buf[64];
    for (std::size_t k = 0; k < fillings.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%.10g,%.12g\n", fillings[k], entropies[k]);
      os << buf;
    }
  }
};

[[nodiscard]] inline HomogeneousReference build_homogeneous_reference(double U, int sites,
                                                                      std::vector<double> fillings,
                                                                      const SolverOptions& options = {}) {
  if (fillings.empty()) throw ValidationError("no fillings requested");
  std::sort(fillings.begin(), fillings.end());
  HomogeneousReference ref;
  ref.U = U;
  ref.sites = sites;
  for (double n : fillings) {
    const double particles = n * sites;
    const int N = static_cast<int>(std::lround(particles));
    if (std::abs(particles - N) > 1e-9 || N % 2 != 0 || N <= 0 || N >= 2 * sites)
      throw ValidationError("filling " + std::to_string(n) + " is not realizable with balanced spins on L = " +
                            std::to_string(sites));
    if (!ref.fillings.empty() && std::abs(ref.fillings.back() - n) < 1e-12) continue;
    const ChainSpec spec = make_uniform_chain(sites, 1.0, U, N / 2, N / 2, Boundary::periodic);
    const SectorBasis basis(sites, N / 2, N / 2);
    const GroundState gs = ground_state(build_hamiltonian(spec, basis), options);
    ref.fillings.push_back(static_cast<double>(N) / sites);
    ref.entropies.push_back(entropy_of_spectrum(schmidt_spectrum(gs.vector, basis, BlockSpec{{0}})));
  }
  return ref;
}

}  // namespace hubbard
