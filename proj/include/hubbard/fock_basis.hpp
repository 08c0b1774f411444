#pragma once

// Fixed-(N_up, N_down) Fock sectors on an L-site chain, encoded as bitmask pairs,
// plus the fermionic sign bookkeeping used by the Hamiltonian and the block
// reduced density matrices.
//
// Canonical mode ordering: spin-up modes for sites 0..L-1, then spin-down
// modes for sites 0..L-1. Bit i of a mask is site i.

#include <algorithm>
#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hubbard {

using Mask = std::uint32_t;

inline constexpr int kMaxSites = 20;

/// Thrown for any violated precondition on user-supplied parameters.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct FockState {
  Mask up = 0;
  Mask down = 0;

  constexpr auto operator<=>(const FockState&) const = default;
};

[[nodiscard]] constexpr int popcount(Mask m) noexcept { return std::popcount(m); }

[[nodiscard]] constexpr bool occupied(Mask m, int site) noexcept { return (m >> site) & 1u; }

/// Mask with bits 0..n-1 set.
[[nodiscard]] constexpr Mask low_bits(int n) noexcept {
  if (n <= 0) return 0;
  if (n >= 32) return ~Mask{0};
  return (Mask{1} << n) - 1;
}

/// All L-bit masks with `count` bits set, in ascending numeric order.
[[nodiscard]] inline std::vector<Mask> masks_with_popcount(int sites, int count) {
  std::vector<Mask> out;
  if (count < 0 || count > sites) return out;
  if (count == 0) {
    out.push_back(0);
    return out;
  }
  const std::uint64_t limit = std::uint64_t{1} << sites;
  std::uint64_t m = (std::uint64_t{1} << count) - 1;
  while (m < limit) {
    out.push_back(static_cast<Mask>(m));
    // Gosper's hack: next integer with the same popcount.
    const std::uint64_t c = m & (~m + 1);
    const std::uint64_t r = m + c;
    m = (((r ^ m) >> 2) / c) | r;
  }
  return out;
}

[[nodiscard]] inline std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  return r;
}

/// Every Fock state with N_up up-spins and N_down down-spins on L sites,
/// sorted lexicographically on (up, down). Immutable after construction.
class SectorBasis {
 public:
  SectorBasis(int sites, int n_up, int n_down) : sites_(sites), n_up_(n_up), n_down_(n_down) {
    if (sites < 1 || sites > kMaxSites)
      throw ValidationError("site count " + std::to_string(sites) + " outside [1, " +
                            std::to_string(kMaxSites) + "]");
    if (n_up < 0 || n_up > sites || n_down < 0 || n_down > sites)
      throw ValidationError("particle counts (" + std::to_string(n_up) + ", " + std::to_string(n_down) +
                            ") outside [0, " + std::to_string(sites) + "]");
    up_masks_ = masks_with_popcount(sites, n_up);
    down_masks_ = masks_with_popcount(sites, n_down);
    states_.reserve(up_masks_.size() * down_masks_.size());
    for (Mask u : up_masks_)
      for (Mask d : down_masks_) states_.push_back({u, d});
  }

  [[nodiscard]] int sites() const noexcept { return sites_; }
  [[nodiscard]] int n_up() const noexcept { return n_up_; }
  [[nodiscard]] int n_down() const noexcept { return n_down_; }
  [[nodiscard]] int particles() const noexcept { return n_up_ + n_down_; }
  [[nodiscard]] std::size_t size() const noexcept { return states_.size(); }

  [[nodiscard]] const FockState& operator[](std::size_t i) const { return states_[i]; }
  [[nodiscard]] std::span<const FockState> states() const noexcept { return states_; }
  [[nodiscard]] std::span<const Mask> up_masks() const noexcept { return up_masks_; }
  [[nodiscard]] std::span<const Mask> down_masks() const noexcept { return down_masks_; }

  /// Ordinal of `s`, or nullopt if `s` is not in this sector. O(log |states|).
  [[nodiscard]] std::optional<std::size_t> find(FockState s) const noexcept {
    const auto iu = std::lower_bound(up_masks_.begin(), up_masks_.end(), s.up);
    if (iu == up_masks_.end() || *iu != s.up) return std::nullopt;
    const auto id = std::lower_bound(down_masks_.begin(), down_masks_.end(), s.down);
    if (id == down_masks_.end() || *id != s.down) return std::nullopt;
    return static_cast<std::size_t>(iu - up_masks_.begin()) * down_masks_.size() +
           static_cast<std::size_t>(id - down_masks_.begin());
  }

  [[nodiscard]] std::size_t index(FockState s) const {
    if (auto i = find(s)) return *i;
    throw ValidationError("state not in sector");
  }

 private:
  int sites_;
  int n_up_;
  int n_down_;
  std::vector<Mask> up_masks_;
  std::vector<Mask> down_masks_;
  std::vector<FockState> states_;
};

[[nodiscard]] inline SectorBasis enumerate_sector(int sites, int n_up, int n_down) {
  return SectorBasis(sites, n_up, n_down);
}

/// Jordan-Wigner sign of c†_to c_from acting on one spin species: (-1) to the
/// number of occupied modes strictly between `from` and `to`.
[[nodiscard]] inline int hop_sign(Mask mask, int to, int from) {
  if (to < 0 || from < 0 || to >= 32 || from >= 32)
    throw ValidationError("hop_sign: site index out of range");
  if (to == from) throw ValidationError("hop_sign: source and destination coincide");
  if (!occupied(mask, from)) throw ValidationError("hop_sign: source mode is empty");
  if (occupied(mask, to)) throw ValidationError("hop_sign: destination mode is occupied");
  const int lo = std::min(to, from);
  const int hi = std::max(to, from);
  const Mask between = mask & low_bits(hi) & ~low_bits(lo + 1);
  return (popcount(between) & 1) ? -1 : 1;
}

/// Parity of the permutation taking the occupied modes of `state` from the
/// canonical order (up 0..L-1, down 0..L-1) to the block-first order
/// (block-up, block-down, env-up, env-down), each group ordered by site.
[[nodiscard]] inline int block_permutation_sign(FockState state, Mask block, int sites) {
  const Mask all = low_bits(sites);
  if ((block & ~all) != 0) throw ValidationError("block contains sites outside the chain");
  if (block == 0 || block == all) throw ValidationError("block must be a nonempty proper subset");
  const Mask env = all & ~block;

  auto same_species = [&](Mask m) {
    // Pairs (env site k, block site j) with k < j are inverted.
    int count = 0;
    Mask b = m & block;
    while (b) {
      const int j = std::countr_zero(b);
      count += popcount(m & env & low_bits(j));
      b &= b - 1;
    }
    return count;
  };
  // Every occupied env-up mode moves behind every occupied block-down mode.
  const int crossings = popcount(state.up & env) * popcount(state.down & block);
  const int inversions = same_species(state.up) + same_species(state.down) + crossings;
  return (inversions & 1) ? -1 : 1;
}

}  // namespace hubbard
