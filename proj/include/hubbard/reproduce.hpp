#pragma once

// Built-in figure scenarios. Each writes CSV tables plus a JSON summary of
// headline numbers into an output directory.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "hubbard/entanglement.hpp"
#include "hubbard/io.hpp"
#include "hubbard/lattice.hpp"
#include "hubbard/predictor.hpp"
#include "hubbard/runner.hpp"

namespace hubbard {

enum class Figure { fig2, fig3a, fig3b, fig4, fig5, fig6a, fig6b };

inline const std::vector<std::pair<Figure, std::string>>& figure_names() {
  static const std::vector<std::pair<Figure, std::string>> names{
      {Figure::fig2, "fig2"}, {Figure::fig3a, "fig3a"}, {Figure::fig3b, "fig3b"}, {Figure::fig4, "fig4"},
      {Figure::fig5, "fig5"}, {Figure::fig6a, "fig6a"}, {Figure::fig6b, "fig6b"}};
  return names;
}

[[nodiscard]] inline std::string to_string(Figure f) {
  for (const auto& [fig, name] : figure_names())
    if (fig == f) return name;
  return "?";
}

[[nodiscard]] inline Figure parse_figure(const std::string& s) {
  for (const auto& [fig, name] : figure_names())
    if (name == s) return fig;
  throw ValidationError("unknown figure '" + s + "' (expected fig2, fig3a, fig3b, fig4, fig5, fig6a or fig6b)");
}

struct ReproduceOptions {
  SolverOptions solver;
  int workers = 1;
  std::vector<double> v_grid = linear_grid(0.0, 20.0, 0.5);
  std::vector<double> u_grid = linear_grid(0.0, 20.0, 0.5);
  SolvedHook on_solved;  // sees every chain solved by the scenario
};

struct FigureOutput {
  std::map<std::string, std::string> files;  // file name -> contents
  json summary;
  std::vector<ResultRow> rows;

  void write(const std::filesystem::path& dir, const std::string& stem) const {
    std::filesystem::create_directories(dir);
    for (const auto& [name, content] : files) write_text((dir / name).string(), content);
    write_text((dir / (stem + "_summary.json")).string(), summary.dump(2) + "\n");
  }
};

// Two-impurity chain: L=10, N=6, U=4, impurities on sites 3 and 4, periodic.
[[nodiscard]] inline ChainConfig two_impurity_config(double V = 8.0) {
  ChainConfig c;
  c.sites = 10;
  c.U = 4.0;
  c.n_up = 3;
  c.n_down = 3;
  c.potential.kind = PotentialSpec::Kind::impurities;
  c.potential.sites = {3, 4};
  c.potential.strength = V;
  return c;
}

[[nodiscard]] inline ChainConfig superlattice_config(std::vector<int> pattern, double V = 8.0, double U = 4.0,
                                                     int sites = 12, int n_up = 3, int n_down = 3) {
  ChainConfig c;
  c.sites = sites;
  c.U = U;
  c.n_up = n_up;
  c.n_down = n_down;
  c.potential.kind = PotentialSpec::Kind::superlattice;
  c.potential.pattern = std::move(pattern);
  c.potential.strength = V;
  return c;
}

/// Named placements on the two-impurity chain: "sym" holds both impurities
/// centred, "asym" holds one impurity at its edge, "d=k" starts k sites past
/// impurity 4.
[[nodiscard]] inline std::vector<BlockItem> two_impurity_placements() {
  struct P {
    std::vector<int> sites;
    const char* label;
  };
  const std::vector<P> table{
      {{3, 4}, "sym"},          {{4, 5}, "asym"},         {{5, 6}, "d=0"},          {{6, 7}, "d=1"},
      {{7, 8}, "d=2"},          {{8, 9}, "d=3"},          {{2, 3, 4}, "sym"},       {{4, 5, 6}, "asym"},
      {{5, 6, 7}, "d=0"},       {{6, 7, 8}, "d=1"},       {{7, 8, 9}, "d=2"},       {{2, 3, 4, 5}, "sym"},
      {{4, 5, 6, 7}, "asym"},   {{5, 6, 7, 8}, "d=0"},    {{6, 7, 8, 9}, "d=1"},    {{7, 8, 9, 0}, "d=2"},
  };
  std::vector<BlockItem> items;
  for (const auto& p : table) {
    BlockItem it;
    it.block = make_block(p.sites, 10);
    it.x = it.block->size();
    it.label = p.label;
    items.push_back(std::move(it));
  }
  return items;
}

namespace detail {

inline const ResultRow* find_row(const std::vector<ResultRow>& rows, double value, const std::string& block, int x) {
  for (const auto& r : rows)
    if (std::abs(r.value - value) < 1e-12 && r.block == block && r.x == x) return &r;
  return nullptr;
}

inline std::string profile_csv(const std::vector<double>& a, const std::vector<double>* b, const char* header) {
  std::string s = std::string(header) + "\n";
  for (std::size_t i = 0; i < a.size(); ++i) {
    s += std::to_string(i) + "," + fmt_number(a[i]);
    if (b) s += "," + fmt_number((*b)[i]);
    s += "\n";
  }
  return s;
}

}  // namespace detail

/// Single-site entanglement vs V with the bipartition average.
[[nodiscard]] inline FigureOutput reproduce_fig2(const ReproduceOptions& opt = {}) {
  SweepPlan plan;
  plan.base = two_impurity_config();
  plan.values = opt.v_grid;
  plan.blocks = parse_block_items("1:contiguous", 10);
  plan.solver = opt.solver;
  plan.workers = opt.workers;
  FigureOutput out;
  out.rows = run_sweep(plan, opt.on_solved);
  out.files["fig2_single_site.csv"] = results_csv(out.rows);

  json& s = out.summary;
  s["figure"] = "fig2";
  s["chain"] = to_json(plan.base);
  const double v0 = plan.values.front();
  s["S1_homogeneous"] = detail::find_row(out.rows, v0, "0", 1)->S_hom;
  for (double v : {8.0, 16.0, 20.0}) {
    if (!detail::find_row(out.rows, v, "avg", 1)) continue;
    json at;
    for (int site = 0; site < 10; ++site) at["S1"][std::to_string(site)] = detail::find_row(out.rows, v, std::to_string(site), 1)->S;
    at["average"] = detail::find_row(out.rows, v, "avg", 1)->S;
    s["V=" + fmt_number(v)] = at;
  }
  if (detail::find_row(out.rows, 8.0, "5", 1)) {
    const double d0 = detail::find_row(out.rows, 8.0, "5", 1)->S;
    const double d1 = detail::find_row(out.rows, 8.0, "6", 1)->S;
    s["d0_vs_d1_relative_gap_at_V8"] = (d1 - d0) / d1;
  }
  return out;
}

/// Density profile at V=8 against the effective open chain of the eight
/// non-impurity sites.
[[nodiscard]] inline FigureOutput reproduce_fig3a(const ReproduceOptions& opt = {}) {
  const ChainSpec spec = two_impurity_config(8.0).spec();
  const SolvedChain chain = solve_chain(spec, opt.solver);
  const ChainSpec eff_spec = make_uniform_chain(8, 1.0, 4.0, 3, 3, Boundary::open);
  const SolvedChain eff = solve_chain(eff_spec, opt.solver);
  if (opt.on_solved) {
    opt.on_solved(chain);
    opt.on_solved(eff);
  }
  // Non-impurity sites 5..9, 0..2 in chain order map to open sites 0..7.
  const std::vector<int> mapping{5, 6, 7, 8, 9, 0, 1, 2};
  std::vector<double> mapped(10, std::nan(""));
  double max_dev = 0.0;
  for (std::size_t k = 0; k < mapping.size(); ++k) {
    mapped[static_cast<std::size_t>(mapping[k])] = eff.profile[k];
    max_dev = std::max(max_dev, std::abs(eff.profile[k] - chain.profile[static_cast<std::size_t>(mapping[k])]));
  }
  FigureOutput out;
  out.files["fig3a_density.csv"] = detail::profile_csv(chain.profile, &mapped, "site,n_impurity_chain,n_effective_chain");
  out.files["fig3a_effective_chain.csv"] = detail::profile_csv(eff.profile, nullptr, "site,n");
  json& s = out.summary;
  s["figure"] = "fig3a";
  s["chain"] = to_json(spec);
  s["effective_chain"] = to_json(eff_spec);
  s["profile"] = chain.profile;
  s["effective_profile"] = eff.profile;
  s["site_map"] = mapping;
  s["impurity_densities"] = {chain.profile[3], chain.profile[4]};
  s["max_abs_deviation"] = max_dev;
  return out;
}

/// Ranking of every contiguous block (x = 1..4) at V=8 next to its measured
/// entropy.
[[nodiscard]] inline FigureOutput reproduce_fig3b(const ReproduceOptions& opt = {}) {
  const ChainSpec spec = two_impurity_config(8.0).spec();
  const SolvedChain chain = solve_chain(spec, opt.solver);
  if (opt.on_solved) opt.on_solved(chain);
  FigureOutput out;
  std::string csv = "x,rank,block_sites,score,interface_density,block_density,S_bits\n";
  json& s = out.summary;
  s["figure"] = "fig3b";
  s["chain"] = to_json(spec);
  s["profile"] = chain.profile;
  for (int x = 1; x <= 4; ++x) {
    const auto ranked = rank_blocks(chain.profile, enumerate_blocks(10, x, BlockMode::contiguous), spec.boundary);
    double best = -1.0;
    std::string best_label;
    double top = 0.0;
    for (std::size_t k = 0; k < ranked.size(); ++k) {
      const double S = chain.report(ranked[k].block).entropy;
      if (k == 0) top = S;
      if (S > best + 1e-12) {
        best = S;
        best_label = ranked[k].block.label();
      }
      csv += std::to_string(x) + "," + std::to_string(k + 1) + "," + ranked[k].block.label() + "," +
             fmt_number(ranked[k].score) + "," + fmt_number(ranked[k].interface_density) + "," +
             fmt_number(ranked[k].block_density) + "," + fmt_number(S) + "\n";
    }
    json xs;
    xs["top_ranked"] = ranked.front().block.sites;
    xs["top_ranked_S"] = top;
    xs["measured_best"] = best_label;
    xs["measured_best_S"] = best;
    s["x=" + std::to_string(x)] = xs;
  }
  out.files["fig3b_ranking.csv"] = csv;
  return out;
}

/// Named x = 2, 3, 4 placements and contiguous averages vs V.
[[nodiscard]] inline FigureOutput reproduce_fig4(const ReproduceOptions& opt = {}) {
  SweepPlan plan;
  plan.base = two_impurity_config();
  plan.values = opt.v_grid;
  plan.blocks = two_impurity_placements();
  for (auto& it : parse_block_items("2:contiguous;3:contiguous;4:contiguous", 10)) plan.blocks.push_back(it);
  plan.solver = opt.solver;
  plan.workers = opt.workers;
  FigureOutput out;
  out.rows = run_sweep(plan, opt.on_solved);
  out.files["fig4_blocks.csv"] = results_csv(out.rows);
  json& s = out.summary;
  s["figure"] = "fig4";
  s["chain"] = to_json(plan.base);
  for (const auto& r : out.rows) {
    if (std::abs(r.value - 8.0) > 1e-12 || (r.placement.empty() && r.block != "avg")) continue;
    const std::string key = r.block == "avg" ? "avg" : r.placement + " [" + r.block + "]";
    s["V=8"]["x=" + std::to_string(r.x)][key] = {{"S", r.S}, {"enhancement", r.enhancement}};
  }
  return out;
}

struct SuperlatticeEntry {
  std::vector<int> pattern;
  int x = 0;
  BlockSpec ranked_block;
  double S = 0.0;
  double S_hom = 0.0;
  double enhancement = 0.0;
  BlockSpec best_block;  // measured optimum over all windows
  double S_best = 0.0;
  double n = 0.0;
  double n_eff = 0.0;
  Verdict verdict = Verdict::indeterminate;
};

[[nodiscard]] inline std::vector<std::vector<int>> fig5_patterns() {
  return {{1, 1, 2, 2}, {1, 2}, {1, 4, 3, 4}, {1, 3}, {1, 5}, {2, 4}, {1, 1, 1, 3}};
}

/// Superlattices at L=12, N=6, U=4, V=8 with x=3 and x=4 blocks placed by
/// rank_blocks, plus the measured optimum for reference.
[[nodiscard]] inline FigureOutput reproduce_fig5(const ReproduceOptions& opt = {},
                                                 std::vector<SuperlatticeEntry>* entries = nullptr) {
  const auto patterns = fig5_patterns();
  const SolvedChain hom = solve_chain(make_uniform_chain(12, 1.0, 4.0, 3, 3, Boundary::periodic), opt.solver);
  if (opt.on_solved) opt.on_solved(hom);
  std::vector<std::vector<SuperlatticeEntry>> per(patterns.size());
  std::mutex hook_mutex;
  parallel_for(patterns.size(), opt.workers, [&](std::size_t k) {
    const ChainConfig cfg = superlattice_config(patterns[k]);
    const ChainSpec spec = cfg.spec();
    SolvedChain chain = [&] {
      try {
        return solve_chain(spec, opt.solver);
      } catch (...) {
        rethrow_with_context("superlattice " + cfg.potential.label() + " (" + describe(cfg) + ")");
      }
    }();
    if (opt.on_solved) {
      std::lock_guard lock(hook_mutex);
      opt.on_solved(chain);
    }
    const Prediction p = predict_enhancement_regime(spec);
    for (int x : {3, 4}) {
      const auto windows = enumerate_blocks(12, x, BlockMode::contiguous);
      SuperlatticeEntry e;
      e.pattern = patterns[k];
      e.x = x;
      e.ranked_block = rank_blocks(chain.profile, windows, spec.boundary).front().block;
      e.S = chain.report(e.ranked_block).entropy;
      e.S_hom = hom.report(e.ranked_block).entropy;
      e.enhancement = enhancement(e.S, e.S_hom);
      e.S_best = -1.0;
      for (const auto& w : windows) {
        const double S = chain.report(w).entropy;
        if (S > e.S_best + 1e-12) {
          e.S_best = S;
          e.best_block = w;
        }
      }
      e.n = p.filling;
      e.n_eff = p.effective_filling;
      e.verdict = p.verdict;
      per[k].push_back(e);
    }
  });

  FigureOutput out;
  std::string csv = "pattern,cell,n,n_eff,verdict,x,block_sites,S_bits,S_hom_bits,enhancement,conformal_max,"
                    "best_block_sites,S_best_bits,enhancement_best\n";
  json& s = out.summary;
  s["figure"] = "fig5";
  s["L"] = 12;
  s["N_up"] = 3;
  s["N_down"] = 3;
  s["U"] = 4.0;
  s["V"] = 8.0;
  double max_enh = -1e300;
  std::string max_at;
  json above = json::array();
  for (const auto& list : per) {
    for (const auto& e : list) {
      const auto pat = SuperlatticePattern::from_notation(e.pattern);
      const double cmax = conformal_max(e.x);
      csv += csv_field(pat.label()) + "," + pat.cell_string() + "," + fmt_number(e.n) + "," + fmt_number(e.n_eff) + "," +
             to_string(e.verdict) + "," + std::to_string(e.x) + "," + e.ranked_block.label() + "," + fmt_number(e.S) +
             "," + fmt_number(e.S_hom) + "," + fmt_number(e.enhancement) + "," + fmt_number(cmax) + "," +
             e.best_block.label() + "," + fmt_number(e.S_best) + "," + fmt_number(enhancement(e.S_best, e.S_hom)) + "\n";
      s["entries"].push_back({{"pattern", pat.label()}, {"x", e.x}, {"block_sites", e.ranked_block.sites},
                              {"S", e.S}, {"S_hom", e.S_hom}, {"enhancement", e.enhancement},
                              {"n_eff", e.n_eff}, {"verdict", to_string(e.verdict)}});
      if (e.enhancement > max_enh) {
        max_enh = e.enhancement;
        max_at = pat.label() + " x=" + std::to_string(e.x);
      }
      if (e.S > cmax) above.push_back(pat.label() + " x=" + std::to_string(e.x));
    }
  }
  s["max_enhancement"] = max_enh;
  s["max_enhancement_at"] = max_at;
  s["above_conformal_max"] = above;
  out.files["fig5_superlattices.csv"] = csv;
  if (entries) {
    entries->clear();
    for (auto& list : per)
      for (auto& e : list) entries->push_back(std::move(e));
  }
  return out;
}

/// x=3 and x=4 blocks for SL[1,4,3,4], chosen by rank_blocks at V=8, U=4.
[[nodiscard]] inline std::vector<BlockItem> fig6_blocks(const SolverOptions& solver = {}) {
  const SolvedChain chain = solve_chain(superlattice_config({1, 4, 3, 4}).spec(), solver);
  std::vector<BlockItem> items;
  for (int x : {3, 4}) {
    BlockItem it;
    it.block = rank_blocks(chain.profile, enumerate_blocks(12, x, BlockMode::contiguous)).front().block;
    it.x = x;
    it.label = "ranked";
    items.push_back(std::move(it));
  }
  return items;
}

[[nodiscard]] inline FigureOutput reproduce_fig6(Axis axis, const ReproduceOptions& opt = {}) {
  SweepPlan plan;
  plan.base = superlattice_config({1, 4, 3, 4});
  plan.axis = axis;
  plan.values = axis == Axis::V ? opt.v_grid : opt.u_grid;
  plan.blocks = fig6_blocks(opt.solver);
  plan.solver = opt.solver;
  plan.workers = opt.workers;
  FigureOutput out;
  out.rows = run_sweep(plan, opt.on_solved);
  const std::string stem = axis == Axis::V ? "fig6a" : "fig6b";
  out.files[stem + "_enhancement.csv"] = results_csv(out.rows);
  json& s = out.summary;
  s["figure"] = stem;
  s["chain"] = to_json(plan.base);
  s["axis"] = to_string(axis);
  for (const auto& it : plan.blocks) {
    double mx = -1e300;
    double at = 0.0;
    for (const auto& r : out.rows)
      if (r.block == it.block->label() && r.enhancement > mx) {
        mx = r.enhancement;
        at = r.value;
      }
    s["x=" + std::to_string(it.x)] = {{"block_sites", it.block->sites}, {"max_enhancement", mx}, {"at", at}};
  }
  return out;
}

[[nodiscard]] inline FigureOutput reproduce(Figure f, const ReproduceOptions& opt = {}) {
  switch (f) {
    case Figure::fig2: return reproduce_fig2(opt);
    case Figure::fig3a: return reproduce_fig3a(opt);
    case Figure::fig3b: return reproduce_fig3b(opt);
    case Figure::fig4: return reproduce_fig4(opt);
    case Figure::fig5: return reproduce_fig5(opt);
    case Figure::fig6a: return reproduce_fig6(Axis::V, opt);
    default: return reproduce_fig6(Axis::U, opt);
  }
}

}  // namespace hubbard
