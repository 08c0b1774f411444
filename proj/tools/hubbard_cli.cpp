// Command-line front end: solve, density, entropy, sweep, predict, reproduce.
//
// Exit codes: 0 success, 2 validation error, 3 solver failure,
// 4 degenerate ground state.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "hubbard/hubbard.hpp"

namespace {

using namespace hubbard;

enum ExitCode { kOk = 0, kValidation = 2, kSolver = 3, kDegenerate = 4 };

struct Args {
  std::string config;
  std::string out;
  std::string blocks;
  std::string figure;
  std::string dump_matrix;
  int workers = 1;
  bool dump_state = false;
  bool allow_degenerate = false;
  double tolerance = 1e-10;
  int max_iterations = 1000;
};

SolverOptions solver_options(const Args& a) {
  SolverOptions o;
  o.allow_degenerate = a.allow_degenerate;
  o.tolerance = a.tolerance;
  o.max_iterations = a.max_iterations;
  return o;
}

json read_json(const std::string& path) {
  if (path.empty()) throw ValidationError("--config is required");
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError("config '" + path + "': " + e.what());
  }
}

// Writes `content` to <out>/<name> when --out is set, otherwise to stdout.
void emit(const Args& a, const std::string& name, const std::string& content) {
  if (a.out.empty()) {
    std::cout << content;
    return;
  }
  std::filesystem::create_directories(a.out);
  write_text((std::filesystem::path(a.out) / name).string(), content);
  std::cerr << "wrote " << (std::filesystem::path(a.out) / name).string() << "\n";
}

SolvedChain solve_from_config(const Args& a, ChainSpec& spec) {
  spec = chain_config_from_json(read_json(a.config)).spec();
  SolvedChain chain{spec, SectorBasis(spec.sites, spec.n_up, spec.n_down), {}, {}};
  const SparseHamiltonian h = build_hamiltonian(spec, chain.basis);
  if (!a.dump_matrix.empty()) {
    std::ofstream m(a.dump_matrix);
    if (!m) throw ValidationError("cannot write '" + a.dump_matrix + "'");
    h.write_coordinates(m);
  }
  chain.gs = ground_state(h, solver_options(a));
  chain.profile = density_profile(chain.gs, chain.basis);
  return chain;
}

int cmd_solve(const Args& a) {
  ChainSpec spec;
  const SolvedChain c = solve_from_config(a, spec);
  json j{{"chain", to_json(spec)}, {"dimension", c.basis.size()}, {"ground_state", to_json(c.gs, a.dump_state)}};
  emit(a, "solve.json", j.dump(2) + "\n");
  return kOk;
}

int cmd_density(const Args& a) {
  ChainSpec spec;
  const SolvedChain c = solve_from_config(a, spec);
  double total = 0.0;
  for (double n : c.profile) total += n;
  json j{{"chain", to_json(spec)}, {"energy", c.gs.energy}, {"density", c.profile}, {"total", total}};
  emit(a, "density.json", j.dump(2) + "\n");
  return kOk;
}

int cmd_entropy(const Args& a) {
  ChainSpec spec;
  const SolvedChain c = solve_from_config(a, spec);
  const auto items = parse_block_items(a.blocks.empty() ? "1:contiguous" : a.blocks, spec.sites);
  json reports = json::array();
  json averages = json::array();
  std::string csv = std::string(kBlockReportCsvHeader) + "\n";
  for (const auto& it : items) {
    const auto blocks = it.block ? std::vector<BlockSpec>{*it.block}
                                 : enumerate_blocks(spec.sites, it.x, it.mode, spec.boundary);
    double sum = 0.0;
    for (const auto& b : blocks) {
      const BlockReport r = c.report(b);
      reports.push_back(to_json(r));
      csv += csv_row(r) + "\n";
      sum += r.entropy;
    }
    if (!it.block)
      averages.push_back({{"x", it.x}, {"mode", to_string(it.mode)}, {"mean_S_bits", sum / static_cast<double>(blocks.size())},
                          {"blocks", blocks.size()}});
  }
  json j{{"chain", to_json(spec)},   {"energy", c.gs.energy},  {"reliable", !c.gs.degenerate},
         {"blocks", reports},          {"averages", averages}};
  if (a.out.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    emit(a, "entropy.json", j.dump(2) + "\n");
    emit(a, "entropy.csv", csv);
  }
  return kOk;
}

int cmd_sweep(const Args& a) {
  const json doc = read_json(a.config);
  SweepPlan plan = sweep_plan_from_json(doc);
  if (!a.blocks.empty()) plan.blocks = parse_block_items(a.blocks, plan.base.sites);
  if (a.workers != 1 || !doc.contains("workers")) plan.workers = a.workers;
  plan.solver = solver_options(a);
  const auto rows = run_sweep(plan);
  emit(a, "sweep.csv", results_csv(rows));
  return kOk;
}

int cmd_predict(const Args& a) {
  const ChainSpec spec = chain_config_from_json(read_json(a.config)).spec();
  json j = to_json(predict_enhancement_regime(spec));
  if (!a.blocks.empty()) {
    const SolvedChain c = solve_chain(spec, solver_options(a));
    std::vector<BlockSpec> blocks;
    for (const auto& it : parse_block_items(a.blocks, spec.sites)) {
      if (it.block) blocks.push_back(*it.block);
      else for (const auto& b : enumerate_blocks(spec.sites, it.x, it.mode, spec.boundary)) blocks.push_back(b);
    }
    json ranking = json::array();
    for (const auto& s : rank_blocks(c.profile, blocks, spec.boundary)) ranking.push_back(to_json(s));
    j["ranking"] = ranking;
  }
  emit(a, "predict.json", j.dump(2) + "\n");
  return kOk;
}

int cmd_reproduce(const Args& a) {
  const Figure f = parse_figure(a.figure);
  ReproduceOptions opt;
  opt.solver = solver_options(a);
  opt.workers = a.workers;
  const FigureOutput out = reproduce(f, opt);
  const std::string dir = a.out.empty() ? "results" : a.out;
  out.write(dir, to_string(f));
  std::cout << out.summary.dump(2) << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact diagonalization of inhomogeneous 1D Hubbard chains and block entanglement"};
  app.require_subcommand(1);
  Args a;

  auto common = [&](CLI::App* sub, bool config) {
    if (config) sub->add_option("--config", a.config, "Chain JSON document")->required();
    sub->add_option("--out", a.out, "Output directory");
    sub->add_flag("--allow-degenerate", a.allow_degenerate, "Proceed when the ground state is degenerate");
    sub->add_option("--tolerance", a.tolerance, "Residual tolerance for Lanczos");
    sub->add_option("--max-iterations", a.max_iterations, "Lanczos iteration cap")->check(CLI::PositiveNumber);
  };

  auto* solve = app.add_subcommand("solve", "Ground-state energy and diagnostics");
  common(solve, true);
  solve->add_flag("--dump-state", a.dump_state, "Include the ground-state vector");
  solve->add_option("--dump-matrix", a.dump_matrix, "Write the Hamiltonian as 'row col value' triplets");

  auto* density = app.add_subcommand("density", "Site density profile");
  common(density, true);

  auto* entropy = app.add_subcommand("entropy", "Block entanglement entropies");
  common(entropy, true);
  entropy->add_option("--blocks", a.blocks, "Blocks: '3,4;5' or 'x:contiguous|all'");

  auto* sweep = app.add_subcommand("sweep", "Parameter sweep over V or U");
  common(sweep, true);
  sweep->add_option("--blocks", a.blocks, "Override the block request");
  sweep->add_option("--workers", a.workers, "Parallel sweep points")->check(CLI::PositiveNumber);

  auto* predict = app.add_subcommand("predict", "Enhancement verdict and optional block ranking");
  common(predict, true);
  predict->add_option("--blocks", a.blocks, "Candidate blocks to rank");

  auto* repro = app.add_subcommand("reproduce", "Run a built-in figure scenario");
  common(repro, false);
  repro->add_option("figure", a.figure, "fig2|fig3a|fig3b|fig4|fig5|fig6a|fig6b")->required();
  repro->add_option("--workers", a.workers, "Parallel sweep points")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kValidation;
  }

  try {
    if (*solve) return cmd_solve(a);
    if (*density) return cmd_density(a);
    if (*entropy) return cmd_entropy(a);
    if (*sweep) return cmd_sweep(a);
    if (*predict) return cmd_predict(a);
    return cmd_reproduce(a);
  } catch (const DegenerateGroundStateError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDegenerate;
  } catch (const SolverError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSolver;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSolver;
  }
}
