#pragma once

// Parameter sweeps over V or U with homogeneous baselines, flat result rows,
// and deterministic CSV output.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "hubbard/eigensolver.hpp"
#include "hubbard/entanglement.hpp"
#include "hubbard/io.hpp"
#include "hubbard/lattice.hpp"
#include "hubbard/predictor.hpp"

namespace hubbard {

enum class Axis { V, U };

[[nodiscard]] inline std::string to_string(Axis a) { return a == Axis::V ? "V" : "U"; }

[[nodiscard]] inline Axis parse_axis(const std::string& s) {
  if (s == "V") return Axis::V;
  if (s == "U") return Axis::U;
  throw ValidationError("unknown sweep axis '" + s + "' (expected V or U)");
}

/// One entry of a block request: either a fixed block or every block of size
/// x from enumerate_blocks, which also yields an average row.
struct BlockItem {
  std::optional<BlockSpec> block;
  int x = 0;
  BlockMode mode = BlockMode::contiguous;
  std::string label;  // free-form placement tag, copied into rows
};

/// Parses "3,4;5" (explicit blocks) and "2:contiguous" / "3:all" (families).
/// Items are separated by ';' and may be mixed.
[[nodiscard]] inline std::vector<BlockItem> parse_block_items(const std::string& text, int sites) {
  std::vector<BlockItem> items;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ';')) {
    part.erase(0, part.find_first_not_of(" \t"));
    part.erase(part.find_last_not_of(" \t") + 1);
    if (part.empty()) continue;
    BlockItem item;
    const auto colon = part.find(':');
    try {
      if (colon != std::string::npos) {
        std::size_t used = 0;
        item.x = std::stoi(part.substr(0, colon), &used);
        if (used != colon) throw ValidationError("bad block size in '" + part + "'");
        item.mode = parse_block_mode(part.substr(colon + 1));
        if (item.x < 1 || item.x >= sites)
          throw ValidationError("block size " + std::to_string(item.x) + " must lie in [1, L-1]");
      } else {
        std::vector<int> s;
        std::stringstream ps(part);
        std::string tok;
        while (std::getline(ps, tok, ',')) {
          std::size_t used = 0;
          s.push_back(std::stoi(tok, &used));
          tok.erase(0, used);
          if (tok.find_first_not_of(" \t") != std::string::npos) throw ValidationError("bad site '" + tok + "'");
        }
        item.block = make_block(s, sites);
        item.x = item.block->size();
      }
    } catch (const std::logic_error& e) {
      if (dynamic_cast<const ValidationError*>(&e)) throw;
      throw ValidationError("cannot parse block request '" + part + "'");
    }
    items.push_back(std::move(item));
  }
  if (items.empty()) throw ValidationError("empty block request");
  return items;
}

struct SweepPlan {
  ChainConfig base;
  Axis axis = Axis::V;
  std::vector<double> values;
  std::vector<BlockItem> blocks;
  SolverOptions solver;
  int workers = 1;

  void validate() const {
    if (values.empty()) throw ValidationError("sweep: empty value list");
    for (std::size_t k = 0; k < values.size(); ++k) {
      if (!std::isfinite(values[k])) throw ValidationError("sweep: non-finite axis value");
      if (k > 0 && !(values[k] > values[k - 1])) throw ValidationError("sweep: axis values must be strictly increasing");
    }
    if (axis == Axis::V && !base.potential.scalable())
      throw ValidationError("sweep over V needs an impurity or superlattice potential");
    if (blocks.empty()) throw ValidationError("sweep: no blocks requested");
    if (workers < 1) throw ValidationError("sweep: workers must be >= 1");
    for (double v : values) (void)at(v).spec();
  }

  /// Base configuration with the swept parameter set to `value`.
  [[nodiscard]] ChainConfig at(double value) const {
    ChainConfig c = base;
    if (axis == Axis::V) c.potential.strength = value;
    else c.U = value;
    return c;
  }
};

/// Uniform grid lo, lo + step, ..., hi (inclusive up to rounding).
[[nodiscard]] inline std::vector<double> linear_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi >= lo) || !std::isfinite(lo) || !std::isfinite(hi))
    throw ValidationError("grid needs finite lo <= hi and step > 0");
  std::vector<double> g;
  const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  for (long k = 0; k <= n; ++k) g.push_back(lo + static_cast<double>(k) * step);
  return g;
}

/// Flat record: full parameter tuple plus computed quantities.
struct ResultRow {
  Axis axis = Axis::V;
  double value = 0.0;
  int sites = 0;
  int n_up = 0;
  int n_down = 0;
  double t = 1.0;
  double U = 0.0;
  double V = 0.0;
  Boundary boundary = Boundary::periodic;
  std::string potential;
  std::string block;  // site list, or "avg" for a family average
  std::string placement;
  int x = 0;
  std::optional<int> d;
  double S = 0.0;
  double S_hom = 0.0;
  double enhancement = 0.0;
  double block_density = std::nan("");
  double interface_density = std::nan("");
  double energy = 0.0;
  double gap = 0.0;
  std::string verdict;
  double n = 0.0;
  double n_eff = 0.0;
  bool reliable = true;  // false when either ground state was degenerate
};

inline constexpr const char* kResultCsvHeader =
    "axis,value,L,N_up,N_down,t,U,V,boundary,potential,block,placement,x,d,S_bits,S_hom_bits,enhancement,"
    "block_density,interface_density,energy,gap,verdict,n,n_eff,reliable";

[[nodiscard]] inline std::string csv_row(const ResultRow& r) {
  std::string s;
  s += to_string(r.axis) + "," + fmt_number(r.value) + "," + std::to_string(r.sites) + "," + std::to_string(r.n_up) +
       "," + std::to_string(r.n_down) + "," + fmt_number(r.t) + "," + fmt_number(r.U) + "," + fmt_number(r.V) + "," +
       to_string(r.boundary) + "," + csv_field(r.potential) + "," + r.block + "," + csv_field(r.placement) + "," + std::to_string(r.x) +
       "," + (r.d ? std::to_string(*r.d) : "") + "," + fmt_number(r.S) + "," + fmt_number(r.S_hom) + "," +
       fmt_number(r.enhancement) + "," + fmt_number(r.block_density) + "," + fmt_number(r.interface_density) + "," +
       fmt_number(r.energy) + "," + fmt_number(r.gap) + "," + r.verdict + "," + fmt_number(r.n) + "," +
       fmt_number(r.n_eff) + "," + (r.reliable ? "1" : "0");
  return s;
}

[[nodiscard]] inline std::string results_csv(const std::vector<ResultRow>& rows) {
  std::string out = std::string(kResultCsvHeader) + "\n";
  for (const auto& r : rows) out += csv_row(r) + "\n";
  return out;
}

/// Runs f(0..n-1) on up to `workers` threads. All failures are captured; the
/// one with the lowest index is rethrown.
template <class F>
void parallel_for(std::size_t n, int workers, F&& f) {
  std::vector<std::exception_ptr> errors(n);
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  auto work = [&] {
    for (std::size_t i = next++; i < n && !failed; i = next++) {
      try {
        f(i);
      } catch (...) {
        errors[i] = std::current_exception();
        failed = true;
      }
    }
  };
  std::vector<std::thread> pool;
  const auto count = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
  for (std::size_t w = 0; w < count; ++w) pool.emplace_back(work);
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// Rethrows the active exception with `context` prepended, keeping its type.
[[noreturn]] inline void rethrow_with_context(const std::string& context) {
  try {
    throw;
  } catch (const DegenerateGroundStateError& e) {
    throw DegenerateGroundStateError(context + ": " + e.what(), e.best());
  } catch (const SolverError& e) {
    throw SolverError(context + ": " + e.what(), e.ritz_value(), e.ritz_vector(), e.residual());
  } catch (const ValidationError& e) {
    throw ValidationError(context + ": " + e.what());
  }
}

[[nodiscard]] inline std::string describe(const ChainConfig& c) {
  std::ostringstream os;
  os << "L=" << c.sites << " N_up=" << c.n_up << " N_down=" << c.n_down << " t=" << c.t << " U=" << c.U
     << " V=" << c.strength() << " potential=" << c.potential.label() << " boundary=" << to_string(c.boundary);
  return os.str();
}

/// Same L, N, t, U and boundary with V = 0 everywhere.
[[nodiscard]] inline ChainSpec homogeneous_counterpart(const ChainSpec& s) {
  return make_uniform_chain(s.sites, s.t, s.U, s.n_up, s.n_down, s.boundary);
}

using SolvedHook = std::function<void(const SolvedChain&)>;

namespace detail {

inline SolvedChain solve_named(const ChainSpec& spec, const SolverOptions& options, const std::string& name) {
  try {
    return solve_chain(spec, options);
  } catch (...) {
    rethrow_with_context(name);
  }
}

struct ExpandedBlock {
  const BlockItem* item;
  std::vector<BlockSpec> blocks;  // one block, or a family
};

inline std::vector<ExpandedBlock> expand(const std::vector<BlockItem>& items, const ChainSpec& spec) {
  std::vector<ExpandedBlock> out;
  for (const auto& it : items) {
    if (it.block) {
      if (it.block->sites.back() >= spec.sites) throw ValidationError("block " + it.block->label() + " exceeds L");
      out.push_back({&it, {*it.block}});
    } else {
      out.push_back({&it, enumerate_blocks(spec.sites, it.x, it.mode, spec.boundary)});
    }
  }
  return out;
}

}  // namespace detail

/// Rows for one solved chain against its homogeneous baseline.
[[nodiscard]] inline std::vector<ResultRow> evaluate_blocks(const SolvedChain& chain, const SolvedChain& baseline,
                                                            const std::vector<BlockItem>& items, Axis axis,
                                                            double value, const std::string& potential_label,
                                                            double strength) {
  ResultRow proto;
  proto.axis = axis;
  proto.value = value;
  proto.sites = chain.spec.sites;
  proto.n_up = chain.spec.n_up;
  proto.n_down = chain.spec.n_down;
  proto.t = chain.spec.t;
  proto.U = chain.spec.U;
  proto.V = strength;
  proto.boundary = chain.spec.boundary;
  proto.potential = potential_label;
  proto.energy = chain.gs.energy;
  proto.gap = chain.gs.gap;
  proto.n = chain.spec.filling();
  proto.reliable = !chain.gs.degenerate && !baseline.gs.degenerate;
  if (chain.spec.impurity_count() == 0) {
    proto.verdict = "none";
    proto.n_eff = proto.n;
  } else {
    const Prediction p = predict_enhancement_regime(chain.spec);
    proto.verdict = to_string(p.verdict);
    proto.n_eff = p.effective_filling;
  }

  auto finish = [](ResultRow& r) { r.enhancement = r.S_hom > 0.0 ? enhancement(r.S, r.S_hom) : std::nan(""); };

  std::vector<ResultRow> rows;
  for (const auto& eb : detail::expand(items, chain.spec)) {
    double sum = 0.0;
    double sum_hom = 0.0;
    for (const auto& b : eb.blocks) {
      const BlockReport rep = chain.report(b);
      const BlockReport hom = baseline.report(b);
      ResultRow r = proto;
      r.block = b.label();
      r.placement = eb.item->label;
      r.x = rep.x;
      r.d = rep.offset;
      r.S = rep.entropy;
      r.S_hom = hom.entropy;
      r.block_density = rep.block_density;
      r.interface_density = rep.interface_density;
      finish(r);
      rows.push_back(std::move(r));
      sum += rep.entropy;
      sum_hom += hom.entropy;
    }
    if (!eb.item->block) {
      ResultRow r = proto;
      r.block = "avg";
      r.placement = eb.item->label.empty() ? to_string(eb.item->mode) : eb.item->label;
      r.x = eb.item->x;
      r.S = sum / static_cast<double>(eb.blocks.size());
      r.S_hom = sum_hom / static_cast<double>(eb.blocks.size());
      finish(r);
      rows.push_back(std::move(r));
    }
  }
  return rows;
}

/// Solves every point of the plan and its homogeneous baseline (one per
/// distinct U). Rows are ordered by axis value, then by block request.
[[nodiscard]] inline std::vector<ResultRow> run_sweep(const SweepPlan& plan, const SolvedHook& on_solved = {}) {
  plan.validate();
  std::mutex hook_mutex;
  auto notify = [&](const SolvedChain& c) {
    if (!on_solved) return;
    std::lock_guard lock(hook_mutex);
    on_solved(c);
  };

  std::vector<double> us;
  for (double v : plan.values) us.push_back(plan.at(v).U);
  std::sort(us.begin(), us.end());
  us.erase(std::unique(us.begin(), us.end()), us.end());
  std::vector<std::optional<SolvedChain>> baselines(us.size());
  parallel_for(us.size(), plan.workers, [&](std::size_t k) {
    ChainConfig c = plan.base;
    c.U = us[k];
    const ChainSpec hom = homogeneous_counterpart(c.spec());
    baselines[k] = detail::solve_named(hom, plan.solver, "homogeneous baseline (" + describe(c) + ", V=0)");
    notify(*baselines[k]);
  });
  auto baseline_for = [&](double U) -> const SolvedChain& {
    return *baselines[static_cast<std::size_t>(std::lower_bound(us.begin(), us.end(), U) - us.begin())];
  };

  std::vector<std::vector<ResultRow>> per_point(plan.values.size());
  parallel_for(plan.values.size(), plan.workers, [&](std::size_t k) {
    const ChainConfig c = plan.at(plan.values[k]);
    const std::string name = "sweep point " + to_string(plan.axis) + "=" + fmt_number(plan.values[k]) + " (" +
                             describe(c) + ")";
    try {
      const ChainSpec spec = c.spec();
      const SolvedChain& base = baseline_for(c.U);
      // The V = 0 point is the baseline itself.
      const bool same = spec == base.spec;
      std::optional<SolvedChain> own;
      if (!same) {
        own = solve_chain(spec, plan.solver);
        notify(*own);
      }
      const SolvedChain& chain = same ? base : *own;
      per_point[k] = evaluate_blocks(chain, base, plan.blocks, plan.axis, plan.values[k], c.potential.label(),
                                     c.strength());
    } catch (...) {
      rethrow_with_context(name);
    }
  });

  std::vector<ResultRow> rows;
  for (auto& p : per_point)
    for (auto& r : p) rows.push_back(std::move(r));
  return rows;
}

/// Sweep document: {"chain": {...}, "axis": "V"|"U", "values": [...] or
/// {"from": a, "to": b, "step": h}, "blocks": "<request>", "workers": k}.
[[nodiscard]] inline SweepPlan sweep_plan_from_json(const json& j) {
  if (!j.is_object() || !j.contains("chain")) throw ValidationError("sweep config needs a 'chain' object");
  SweepPlan p;
  p.base = chain_config_from_json(j.at("chain"));
  p.axis = parse_axis(j.value("axis", std::string("V")));
  if (!j.contains("values")) {
    p.values = linear_grid(0.0, 20.0, 0.5);
  } else if (j.at("values").is_array()) {
    p.values = detail::require<std::vector<double>>(j, "values");
  } else {
    const json& g = j.at("values");
    p.values = linear_grid(detail::require<double>(g, "from"), detail::require<double>(g, "to"),
                           detail::require<double>(g, "step"));
  }
  if (j.contains("blocks") || !j.contains("placements"))
    p.blocks = parse_block_items(j.value("blocks", std::string("1:contiguous")), p.base.sites);
  if (j.contains("placements")) {
    for (const auto& pl : j.at("placements")) {
      BlockItem item;
      item.block = make_block(detail::require<std::vector<int>>(pl, "sites"), p.base.sites);
      item.x = item.block->size();
      item.label = pl.value("label", std::string());
      p.blocks.push_back(std::move(item));
    }
  }
  p.workers = j.value("workers", 1);
  return p;
}

}  // namespace hubbard
