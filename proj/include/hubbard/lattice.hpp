#pragma once

// Chain descriptions: uniform chains, localized impurities, superlattice
// potentials, and block (subsystem) descriptors.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hubbard/fock_basis.hpp"

namespace hubbard {

enum class Boundary { periodic, open };

[[nodiscard]] inline std::string to_string(Boundary b) { return b == Boundary::periodic ? "periodic" : "open"; }

[[nodiscard]] inline Boundary parse_boundary(const std::string& s) {
  if (s == "periodic") return Boundary::periodic;
  if (s == "open") return Boundary::open;
  throw ValidationError("unknown boundary '" + s + "' (expected periodic|open)");
}

/// Physical description of an inhomogeneous Hubbard chain. Energies are in
/// units of the hopping t.
struct ChainSpec {
  int sites = 0;
  double t = 1.0;
  double U = 0.0;
  std::vector<double> potential;  // V_i, one per site
  Boundary boundary = Boundary::periodic;
  int n_up = 0;
  int n_down = 0;

  [[nodiscard]] int particles() const noexcept { return n_up + n_down; }
  [[nodiscard]] double filling() const noexcept { return static_cast<double>(particles()) / sites; }

  /// Sites with V_i > 0.
  [[nodiscard]] std::vector<int> impurity_sites() const {
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(potential.size()); ++i)
      if (potential[i] > 0.0) out.push_back(i);
    return out;
  }
  [[nodiscard]] int impurity_count() const { return static_cast<int>(impurity_sites().size()); }

  /// Full invariant check (finite t > 0, U >= 0, V_i >= 0, 0 < n < 2).
  void validate() const {
    if (sites < 1 || sites > kMaxSites)
      throw ValidationError("L = " + std::to_string(sites) + " outside [1, " + std::to_string(kMaxSites) + "]");
    if (static_cast<int>(potential.size()) != sites)
      throw ValidationError("potential has " + std::to_string(potential.size()) + " entries, expected L = " +
                            std::to_string(sites));
    if (!std::isfinite(t) || t <= 0.0) throw ValidationError("hopping t must be finite and > 0");
    if (!std::isfinite(U) || U < 0.0) throw ValidationError("U must be finite and >= 0");
    for (double v : potential)
      if (!std::isfinite(v) || v < 0.0) throw ValidationError("site potentials must be finite and >= 0");
    if (n_up < 0 || n_down < 0 || n_up > sites || n_down > sites)
      throw ValidationError("particle counts out of range");
    if (particles() <= 0 || particles() >= 2 * sites)
      throw ValidationError("filling N/L must lie strictly between 0 and 2");
  }

  bool operator==(const ChainSpec&) const = default;
};

[[nodiscard]] inline ChainSpec make_uniform_chain(int sites, double t, double U, int n_up, int n_down,
                                                  Boundary boundary) {
  return ChainSpec{sites, t, U, std::vector<double>(static_cast<std::size_t>(std::max(sites, 0)), 0.0), boundary,
                   n_up, n_down};
}

[[nodiscard]] inline ChainSpec make_impurity_chain(int sites, double t, double U, int n_up, int n_down,
                                                   const std::vector<int>& impurity_sites, double V,
                                                   Boundary boundary) {
  ChainSpec spec = make_uniform_chain(sites, t, U, n_up, n_down, boundary);
  for (int s : impurity_sites) {
    if (s < 0 || s >= sites)
      throw ValidationError("impurity site " + std::to_string(s) + " outside [0, " + std::to_string(sites) + ")");
    spec.potential[static_cast<std::size_t>(s)] = V;
  }
  return spec;
}

/// SL[a, alpha, b, beta]: a sites at V, alpha at 0, b at V, beta at 0.
/// The two-element form [a, alpha] is also accepted.
struct SuperlatticePattern {
  struct Segment {
    bool at_potential;
    int length;
  };
  std::vector<int> notation;
  std::vector<Segment> segments;
  std::vector<bool> unit_cell;  // true where V_i = V

  static SuperlatticePattern from_notation(const std::vector<int>& notation) {
    if (notation.size() != 2 && notation.size() != 4)
      throw ValidationError("superlattice pattern must have 2 or 4 entries");
    SuperlatticePattern p;
    p.notation = notation;
    for (std::size_t k = 0; k < notation.size(); ++k) {
      if (notation[k] < 0) throw ValidationError("superlattice layer lengths must be >= 0");
      const bool at_v = (k % 2 == 0);
      p.segments.push_back({at_v, notation[k]});
      p.unit_cell.insert(p.unit_cell.end(), static_cast<std::size_t>(notation[k]), at_v);
    }
    if (p.unit_cell.empty()) throw ValidationError("superlattice unit cell is empty");
    return p;
  }

  [[nodiscard]] int cell_length() const noexcept { return static_cast<int>(unit_cell.size()); }

  [[nodiscard]] std::string label() const {
    std::string s = "SL[";
    for (std::size_t k = 0; k < notation.size(); ++k) s += (k ? "," : "") + std::to_string(notation[k]);
    return s + "]";
  }

  /// Unit cell as a V/0 string, e.g. "V0VV00".
  [[nodiscard]] std::string cell_string() const {
    std::string s;
    for (bool b : unit_cell) s += b ? 'V' : '0';
    return s;
  }
};

[[nodiscard]] inline ChainSpec make_superlattice_chain(int sites, double t, double U, int n_up, int n_down,
                                                       const SuperlatticePattern& pattern, double V,
                                                       Boundary boundary) {
  const int cell = pattern.cell_length();
  if (sites <= 0 || sites % cell != 0)
    throw ValidationError("chain length L = " + std::to_string(sites) + " is not a multiple of the unit-cell length " +
                          std::to_string(cell) + " of " + pattern.label());
  ChainSpec spec = make_uniform_chain(sites, t, U, n_up, n_down, boundary);
  for (int i = 0; i < sites; ++i)
    if (pattern.unit_cell[static_cast<std::size_t>(i % cell)]) spec.potential[static_cast<std::size_t>(i)] = V;
  return spec;
}

/// Nonempty proper subset of chain sites, kept sorted and unique.
struct BlockSpec {
  std::vector<int> sites;

  [[nodiscard]] int size() const noexcept { return static_cast<int>(sites.size()); }

  [[nodiscard]] Mask mask() const noexcept {
    Mask m = 0;
    for (int s : sites) m |= Mask{1} << s;
    return m;
  }

  [[nodiscard]] bool contains(int site) const { return std::binary_search(sites.begin(), sites.end(), site); }

  /// Space-separated site list, e.g. "3 4".
  [[nodiscard]] std::string label() const {
    std::string s;
    for (std::size_t k = 0; k < sites.size(); ++k) s += (k ? " " : "") + std::to_string(sites[k]);
    return s;
  }

  bool operator==(const BlockSpec&) const = default;
};

[[nodiscard]] inline BlockSpec make_block(std::vector<int> sites, int chain_sites) {
  std::sort(sites.begin(), sites.end());
  sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
  if (sites.empty()) throw ValidationError("block is empty");
  if (static_cast<int>(sites.size()) >= chain_sites) throw ValidationError("block must be a proper subset of the chain");
  if (sites.front() < 0 || sites.back() >= chain_sites)
    throw ValidationError("block site outside [0, " + std::to_string(chain_sites) + ")");
  return BlockSpec{std::move(sites)};
}

enum class BlockMode { contiguous, all_subsets };

[[nodiscard]] inline std::string to_string(BlockMode m) { return m == BlockMode::contiguous ? "contiguous" : "all_subsets"; }

[[nodiscard]] inline BlockMode parse_block_mode(const std::string& s) {
  if (s == "contiguous") return BlockMode::contiguous;
  if (s == "all_subsets" || s == "all") return BlockMode::all_subsets;
  throw ValidationError("unknown block mode '" + s + "' (expected contiguous|all_subsets)");
}

/// Contiguous windows of length x starting at `first` (wrapping on periodic chains).
[[nodiscard]] inline BlockSpec window(int sites, int first, int x) {
  std::vector<int> s;
  for (int k = 0; k < x; ++k) s.push_back((first + k) % sites);
  return make_block(std::move(s), sites);
}

[[nodiscard]] inline std::vector<BlockSpec> enumerate_blocks(int sites, int x, BlockMode mode,
                                                             Boundary boundary = Boundary::periodic) {
  if (x < 1 || x > sites - 1)
    throw ValidationError("block size x = " + std::to_string(x) + " outside [1, " + std::to_string(sites - 1) + "]");
  std::vector<BlockSpec> out;
  if (mode == BlockMode::contiguous) {
    const int count = boundary == Boundary::periodic ? sites : sites - x + 1;
    for (int first = 0; first < count; ++first) out.push_back(window(sites, first, x));
    return out;
  }
  for (Mask m : masks_with_popcount(sites, x)) {
    std::vector<int> s;
    for (int i = 0; i < sites; ++i)
      if (occupied(m, i)) s.push_back(i);
    out.push_back(BlockSpec{std::move(s)});
  }
  return out;
}

/// Neighbours of site i on the chain.
[[nodiscard]] inline std::vector<int> neighbours(int sites, Boundary boundary, int i) {
  std::vector<int> out;
  if (sites < 2) return out;
  if (i > 0) out.push_back(i - 1);
  else if (boundary == Boundary::periodic) out.push_back(sites - 1);
  if (i < sites - 1) out.push_back(i + 1);
  else if (boundary == Boundary::periodic) out.push_back(0);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Complement sites adjacent to at least one block site (the outmost sites of
/// the complementing block).
[[nodiscard]] inline std::vector<int> interface_sites(int sites, Boundary boundary, const BlockSpec& block) {
  std::set<int> out;
  for (int s : block.sites)
    for (int n : neighbours(sites, boundary, s))
      if (!block.contains(n)) out.insert(n);
  return {out.begin(), out.end()};
}

/// Block sites adjacent to at least one complement site.
[[nodiscard]] inline std::vector<int> block_border_sites(int sites, Boundary boundary, const BlockSpec& block) {
  std::vector<int> out;
  for (int s : block.sites) {
    const auto nb = neighbours(sites, boundary, s);
    if (std::any_of(nb.begin(), nb.end(), [&](int n) { return !block.contains(n); })) out.push_back(s);
  }
  return out;
}

[[nodiscard]] inline int site_distance(int sites, Boundary boundary, int a, int b) {
  const int d = std::abs(a - b);
  return boundary == Boundary::periodic ? std::min(d, sites - d) : d;
}

/// Offset d of an impurity-free block from the nearest impurity: 0 when the
/// block touches an impurity. Empty when the block holds an impurity or the
/// chain has none.
[[nodiscard]] inline std::optional<int> impurity_offset(const ChainSpec& spec, const BlockSpec& block) {
  const auto imps = spec.impurity_sites();
  if (imps.empty()) return std::nullopt;
  int best = spec.sites;
  for (int s : block.sites) {
    if (spec.potential[static_cast<std::size_t>(s)] > 0.0) return std::nullopt;
    for (int p : imps) best = std::min(best, site_distance(spec.sites, spec.boundary, s, p));
  }
  return best - 1;
}

}  // namespace hubbard
