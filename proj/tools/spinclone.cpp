#include <cstdlib>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spinclone/commands.hpp"

namespace {

using spinclone::cli::CommandResult;

int report_results(const std::vector<CommandResult>& results) {
  bool ok = true;
  for (const auto& r : results) {
    for (const auto& f : r.files) std::cout << "wrote " << f.string() << "\n";
    for (const auto& c : r.checks) {
      std::cout << (c.passed ? "ok   " : "FAIL ") << c.name;
      if (!c.detail.empty()) std::cout << "  (" << c.detail << ")";
      std::cout << "\n";
      ok = ok && c.passed;
    }
  }
  return ok ? EXIT_SUCCESS : EXIT_FAILURE;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cloning by free evolution of spin networks"};
  app.require_subcommand(1);

  spinclone::cli::Options opts;
  std::string out_dir = opts.out_dir.string();
  std::string format = "csv";
  std::size_t t_points = 0;
  std::size_t b_points = 0;

  app.add_option("--seed", opts.seed, "RNG seed")->capture_default_str();
  app.add_option("--out-dir", out_dir, "Output directory")->capture_default_str();
  app.add_option("--t-points", t_points, "Coarse time grid points (0: command default)");
  app.add_option("--b-points", b_points, "Coarse field grid points (0: command default)");
  app.add_option("--n-traj", opts.n_traj, "Trajectories per noisy point")->capture_default_str();
  app.add_option("--gamma-grid", opts.gamma_grid, "Dephasing rates Gamma/J (default: 10 log points 1e-4..1e-1)")
      ->delimiter(',');
  app.add_option("--threads", opts.threads, "Worker threads (0: hardware)")->capture_default_str();
  app.add_option("--format", format, "Table format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  app.add_option("--samples", opts.disorder_samples, "Disorder realizations")->capture_default_str();
  app.add_flag("--trajectories", opts.trajectories, "fig3: quantum trajectories instead of the master equation");

  auto* fig2 = app.add_subcommand("fig2", "Fidelity versus theta for M=2, plus the M=2..7 inset");
  auto* table1 = app.add_subcommand("table1", "N -> M optimization on complete bipartite networks");
  auto* fig3 = app.add_subcommand("fig3", "Network versus circuit under dephasing");
  auto* tree = app.add_subcommand("tree", "Binary and ternary tree networks");
  auto* disorder = app.add_subcommand("disorder", "Coupling disorder on stars");
  auto* graph = app.add_subcommand("graph", "Print a network in the text graph format");
  std::string topology = "star";
  std::size_t a = 2;
  std::size_t b = 0;
  graph->add_option("topology", topology, "star | tree | bipartite")
      ->check(CLI::IsMember({"star", "tree", "bipartite"}));
  graph->add_option("a", a, "star: M; tree: k; bipartite: N");
  graph->add_option("b", b, "tree: levels; bipartite: M");

  CLI11_PARSE(app, argc, argv);

  opts.out_dir = out_dir;
  opts.format = format == "json" ? spinclone::report::Format::json : spinclone::report::Format::csv;
  if (t_points > 0) opts.t_points = t_points;
  if (b_points > 0) opts.b_points = b_points;

  try {
    namespace cmd = spinclone::cli;
    if (*fig2) return report_results(cmd::cmd_fig2(opts));
    if (*table1) return report_results({cmd::cmd_table1(opts)});
    if (*fig3) return report_results({cmd::cmd_fig3(opts)});
    if (*tree) return report_results({cmd::cmd_tree(opts)});
    if (*disorder) return report_results({cmd::cmd_disorder(opts)});
    if (*graph) {
      spinclone::SpinNetwork net = topology == "star"   ? spinclone::star(a)
                                   : topology == "tree" ? spinclone::tree(a, b)
                                                        : spinclone::bipartite(a, b);
      std::cout << spinclone::to_text(net);
      return EXIT_SUCCESS;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return EXIT_SUCCESS;
}
