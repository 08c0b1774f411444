#pragma once

// Mode entanglement of site blocks: Schmidt spectra from sector-blocked SVDs,
// von Neumann entropies in bits, density profiles, bipartition averages.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hubbard/eigensolver.hpp"
#include "hubbard/fock_basis.hpp"
#include "hubbard/lattice.hpp"

namespace hubbard {

inline constexpr double kSpectrumClamp = 1e-14;

/// Squared Schmidt coefficients keyed by the block occupation (n_up, n_down).
struct SchmidtSpectrum {
  std::map<std::pair<int, int>, std::vector<double>> sectors;

  [[nodiscard]] double total() const {
    double s = 0.0;
    for (const auto& [key, lambdas] : sectors)
      for (double l : lambdas) s += l;
    return s;
  }

  [[nodiscard]] std::vector<double> flat() const {
    std::vector<double> out;
    for (const auto& [key, lambdas] : sectors) out.insert(out.end(), lambdas.begin(), lambdas.end());
    return out;
  }
};

/// -sum lambda log2 lambda with 0 log 0 = 0.
[[nodiscard]] inline double entropy_of_spectrum(std::span<const double> lambdas) {
  double total = 0.0;
  for (double l : lambdas) {
    if (l < -kSpectrumClamp) throw ValidationError("negative Schmidt weight " + std::to_string(l));
    total += l;
  }
  if (std::abs(total - 1.0) > 1e-8) throw ValidationError("Schmidt spectrum sums to " + std::to_string(total));
  double s = 0.0;
  for (double l : lambdas)
    if (l >= kSpectrumClamp) s -= l * std::log2(l);
  return s;
}

[[nodiscard]] inline double entropy_of_spectrum(const SchmidtSpectrum& spectrum) {
  const auto all = spectrum.flat();
  return entropy_of_spectrum(all);
}

namespace detail {

inline void require_normalized(std::span<const double> psi) {
  double n2 = 0.0;
  for (double a : psi) n2 += a * a;
  if (std::abs(std::sqrt(n2) - 1.0) > 1e-8)
    throw ValidationError("state is not normalized (norm " + std::to_string(std::sqrt(n2)) + ")");
}

inline std::uint64_t pack(Mask a, Mask b) { return (std::uint64_t{a} << 32) | b; }

}  // namespace detail

/// Schmidt spectrum of `psi` across the cut block | environment. With
/// `signed_product_basis` off, the fermionic reordering sign is dropped (only
/// useful for demonstrating that it matters).
[[nodiscard]] inline SchmidtSpectrum schmidt_spectrum(std::span<const double> psi, const SectorBasis& basis,
                                                      const BlockSpec& block, bool signed_product_basis = true) {
  if (psi.size() != basis.size()) throw ValidationError("state length does not match basis");
  detail::require_normalized(psi);
  const Mask bm = block.mask();
  if (bm == 0 || bm == low_bits(basis.sites()) || (bm & ~low_bits(basis.sites())) != 0)
    throw ValidationError("block must be a nonempty proper subset of the chain");
  const Mask em = low_bits(basis.sites()) & ~bm;

  struct Sector {
    std::unordered_map<std::uint64_t, Eigen::Index> rows;
    std::unordered_map<std::uint64_t, Eigen::Index> cols;
    std::vector<std::pair<std::pair<Eigen::Index, Eigen::Index>, double>> entries;
  };
  std::map<std::pair<int, int>, Sector> sectors;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (psi[i] == 0.0) continue;
    const FockState s = basis[i];
    const std::pair<int, int> key{popcount(s.up & bm), popcount(s.down & bm)};
    Sector& sec = sectors[key];
    const auto r = sec.rows.try_emplace(detail::pack(s.up & bm, s.down & bm), static_cast<Eigen::Index>(sec.rows.size())).first->second;
    const auto c = sec.cols.try_emplace(detail::pack(s.up & em, s.down & em), static_cast<Eigen::Index>(sec.cols.size())).first->second;
    const double sign = signed_product_basis ? block_permutation_sign(s, bm, basis.sites()) : 1.0;
    sec.entries.push_back({{r, c}, sign * psi[i]});
  }

  SchmidtSpectrum out;
  for (auto& [key, sec] : sectors) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(sec.rows.size()),
                                              static_cast<Eigen::Index>(sec.cols.size()));
    for (const auto& [rc, v] : sec.entries) m(rc.first, rc.second) = v;
    Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
    std::vector<double> lambdas;
    for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k) {
      const double l = svd.singularValues()(k) * svd.singularValues()(k);
      lambdas.push_back(l < kSpectrumClamp ? 0.0 : l);
    }
    out.sectors.emplace(key, std::move(lambdas));
  }
  return out;
}

/// n_i = sum_s |psi_s|^2 (n_i↑ + n_i↓).
[[nodiscard]] inline std::vector<double> density_profile(std::span<const double> psi, const SectorBasis& basis) {
  if (psi.size() != basis.size()) throw ValidationError("state length does not match basis");
  detail::require_normalized(psi);
  std::vector<double> n(static_cast<std::size_t>(basis.sites()), 0.0);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const double w = psi[i] * psi[i];
    const FockState s = basis[i];
    for (int site = 0; site < basis.sites(); ++site)
      n[static_cast<std::size_t>(site)] += w * (occupied(s.up, site) + occupied(s.down, site));
  }
  return n;
}

[[nodiscard]] inline std::vector<double> density_profile(const GroundState& gs, const SectorBasis& basis) {
  return density_profile(gs.vector, basis);
}

[[nodiscard]] inline double mean_over(std::span<const double> profile, std::span<const int> sites) {
  if (sites.empty()) return 0.0;
  double s = 0.0;
  for (int i : sites) s += profile[static_cast<std::size_t>(i)];
  return s / static_cast<double>(sites.size());
}

struct BlockReport {
  BlockSpec block;
  int x = 0;
  double entropy = 0.0;  // bits
  SchmidtSpectrum spectrum;
  double block_density = 0.0;
  double interface_density = 0.0;
  std::optional<int> offset;  // distance d to the nearest impurity
};

/// Entropy and densities of one block of the solved chain `spec`.
[[nodiscard]] inline BlockReport block_entropy(std::span<const double> psi, const SectorBasis& basis,
                                               const BlockSpec& block, const ChainSpec& spec,
                                               std::span<const double> profile) {
  BlockReport rep;
  rep.block = block;
  rep.x = block.size();
  rep.spectrum = schmidt_spectrum(psi, basis, block);
  rep.entropy = entropy_of_spectrum(rep.spectrum);
  rep.block_density = mean_over(profile, block.sites);
  const auto iface = interface_sites(spec.sites, spec.boundary, block);
  rep.interface_density = mean_over(profile, iface);
  rep.offset = impurity_offset(spec, block);
  return rep;
}

[[nodiscard]] inline BlockReport block_entropy(const GroundState& gs, const SectorBasis& basis,
                                               const BlockSpec& block, const ChainSpec& spec) {
  const auto profile = density_profile(gs, basis);
  return block_entropy(gs.vector, basis, block, spec, profile);
}

struct BlockAverage {
  double mean = 0.0;
  std::vector<BlockReport> blocks;
};

/// Arithmetic mean of S_x over enumerate_blocks(L, x, mode).
[[nodiscard]] inline BlockAverage average_block_entropy(const GroundState& gs, const SectorBasis& basis,
                                                        const ChainSpec& spec, int x, BlockMode mode) {
  const auto profile = density_profile(gs, basis);
  BlockAverage avg;
  for (const auto& b : enumerate_blocks(spec.sites, x, mode, spec.boundary)) {
    avg.blocks.push_back(block_entropy(gs.vector, basis, b, spec, profile));
    avg.mean += avg.blocks.back().entropy;
  }
  avg.mean /= static_cast<double>(avg.blocks.size());
  return avg;
}

/// Maximum homogeneous block entanglement from conformal invariance:
/// 2 + log2(x^(2/3)).
[[nodiscard]] inline double conformal_max(int x) {
  if (x < 1) throw ValidationError("block size must be >= 1");
  return 2.0 + (2.0 / 3.0) * std::log2(static_cast<double>(x));
}

/// Relative enhancement (S_inhom - S_hom) / S_hom.
[[nodiscard]] inline double enhancement(double s_inhom, double s_hom) {
  if (!(s_hom > 0.0)) throw ValidationError("homogeneous entropy must be > 0");
  return (s_inhom - s_hom) / s_hom;
}

/// A chain together with its sector, ground state and density profile.
struct SolvedChain {
  ChainSpec spec;
  SectorBasis basis;
  GroundState gs;
  std::vector<double> profile;

  [[nodiscard]] BlockReport report(const BlockSpec& block) const {
    return block_entropy(gs.vector, basis, block, spec, profile);
  }
};

[[nodiscard]] inline SolvedChain solve_chain(const ChainSpec& spec, const SolverOptions& options = {}) {
  SectorBasis basis(spec.sites, spec.n_up, spec.n_down);
  GroundState gs = ground_state(build_hamiltonian(spec, basis), options);
  std::vector<double> profile = density_profile(gs, basis);
  return SolvedChain{spec, std::move(basis), std::move(gs), std::move(profile)};
}

}  // namespace hubbard
