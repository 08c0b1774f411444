#pragma once

// Sparse real-symmetric Hubbard Hamiltonian in a fixed (N_up, N_down) sector:
//
//   H = -t sum_<ij>,s c†_is c_js + U sum_i n_i↑ n_i↓ + sum_i,s V_i n_is

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hubbard/fock_basis.hpp"
#include "hubbard/lattice.hpp"

namespace hubbard {

/// Symmetric storage: the diagonal plus the strict upper triangle in
/// compressed rows (col > row).
struct SparseHamiltonian {
  std::size_t dim = 0;
  std::vector<double> diagonal;
  std::vector<std::size_t> row_ptr;  // dim + 1 entries
  std::vector<std::uint32_t> cols;
  std::vector<double> values;

  [[nodiscard]] std::size_t upper_nonzeros() const noexcept { return values.size(); }

  /// out = H v. Each stored element contributes to both of its rows; the
  /// summation order is fixed by the storage order.
  void apply(std::span<const double> v, std::span<double> out) const {
    if (v.size() != dim || out.size() != dim)
      throw ValidationError("apply: vector length " + std::to_string(v.size()) + " does not match dimension " +
                            std::to_string(dim));
    for (std::size_t r = 0; r < dim; ++r) out[r] = diagonal[r] * v[r];
    for (std::size_t r = 0; r < dim; ++r) {
      const double vr = v[r];
      double acc = out[r];
      for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
        const std::size_t c = cols[k];
        acc += values[k] * v[c];
        out[c] += values[k] * vr;
      }
      out[r] = acc;
    }
  }

  [[nodiscard]] std::vector<double> apply(std::span<const double> v) const {
    std::vector<double> out(dim);
    apply(v, out);
    return out;
  }

  [[nodiscard]] Eigen::MatrixXd to_dense() const {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t r = 0; r < dim; ++r) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(r)) = diagonal[r];
      for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
        const auto i = static_cast<Eigen::Index>(r);
        const auto j = static_cast<Eigen::Index>(cols[k]);
        m(i, j) = values[k];
        m(j, i) = values[k];
      }
    }
    return m;
  }

  /// Coordinate text dump: "row col value" per line, 0-based, diagonal and
  /// upper triangle only, row-major.
  void write_coordinates(std::ostream& os) const {
    char buf[96];
    for (std::size_t r = 0; r < dim; ++r) {
      std::snprintf(buf, sizeof buf, "%zu %zu %.17g\n", r, r, diagonal[r]);
      os << buf;
      for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
        std::snprintf(buf, sizeof buf, "%zu %u %.17g\n", r, cols[k], values[k]);
        os << buf;
      }
    }
  }
};

/// Nearest-neighbour bonds. The wrap bond (L-1, 0) exists only for periodic
/// chains with L > 2; for L = 2 it would duplicate bond (0, 1).
[[nodiscard]] inline std::vector<std::pair<int, int>> chain_bonds(int sites, Boundary boundary) {
  std::vector<std::pair<int, int>> bonds;
  for (int i = 0; i + 1 < sites; ++i) bonds.emplace_back(i, i + 1);
  if (boundary == Boundary::periodic && sites > 2) bonds.emplace_back(sites - 1, 0);
  return bonds;
}

[[nodiscard]] inline double diagonal_energy(const ChainSpec& spec, FockState s) {
  double e = spec.U * popcount(s.up & s.down);
  for (int i = 0; i < spec.sites; ++i) e += spec.potential[static_cast<std::size_t>(i)] * (occupied(s.up, i) + occupied(s.down, i));
  return e;
}

/// Assembles H for `spec` on `basis`. Accepts t = 0 (diagonal-only limit) and
/// empty sectors; full physical validation is ChainSpec::validate.
[[nodiscard]] inline SparseHamiltonian build_hamiltonian(const ChainSpec& spec, const SectorBasis& basis) {
  if (spec.sites != basis.sites() || spec.n_up != basis.n_up() || spec.n_down != basis.n_down())
    throw ValidationError("basis (L=" + std::to_string(basis.sites()) + ", N_up=" + std::to_string(basis.n_up()) +
                          ", N_down=" + std::to_string(basis.n_down()) + ") does not match chain spec (L=" +
                          std::to_string(spec.sites) + ", N_up=" + std::to_string(spec.n_up) +
                          ", N_down=" + std::to_string(spec.n_down) + ")");
  if (static_cast<int>(spec.potential.size()) != spec.sites)
    throw ValidationError("potential length does not match L");
  if (!std::isfinite(spec.t) || spec.t < 0.0) throw ValidationError("hopping t must be finite and >= 0");

  const auto bonds = chain_bonds(spec.sites, spec.boundary);
  SparseHamiltonian h;
  h.dim = basis.size();
  h.diagonal.resize(h.dim);
  h.row_ptr.assign(h.dim + 1, 0);

  std::vector<std::pair<std::uint32_t, double>> row;
  for (std::size_t r = 0; r < h.dim; ++r) {
    const FockState s = basis[r];
    h.diagonal[r] = diagonal_energy(spec, s);
    row.clear();
    if (spec.t != 0.0) {
      for (int species = 0; species < 2; ++species) {
        const Mask m = species == 0 ? s.up : s.down;
        for (auto [a, b] : bonds) {
          if (occupied(m, a) == occupied(m, b)) continue;
          const int from = occupied(m, a) ? a : b;
          const int to = occupied(m, a) ? b : a;
          const Mask moved = (m & ~(Mask{1} << from)) | (Mask{1} << to);
          const FockState target = species == 0 ? FockState{moved, s.down} : FockState{s.up, moved};
          const std::size_t c = basis.index(target);
          if (c <= r) continue;
          row.emplace_back(static_cast<std::uint32_t>(c), -spec.t * hop_sign(m, to, from));
        }
      }
      std::sort(row.begin(), row.end());
    }
    for (auto [c, v] : row) {
      h.cols.push_back(c);
      h.values.push_back(v);
    }
    h.row_ptr[r + 1] = h.cols.size();
  }
  return h;
}

}  // namespace hubbard
