#include "atomip/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "atomip/branch_bound.hpp"
#include "atomip/parser.hpp"
#include "atomip/report.hpp"
#include "atomip/run_config.hpp"

namespace atomip::cli {

namespace {

namespace fs = std::filesystem;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error reading '" + path + "'");
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw IoError("error writing '" + path.string() + "'");
}

fs::path prepare_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + dir + "'");
  return fs::path(dir);
}

Problem load_problem(const std::string& path, std::ostream& err) {
  const std::string text = read_file(path);
  try {
    return parse_problem(text);
  } catch (const ParseError& e) {
    err << path << ":" << e.what() << "\n";
    throw;
  }
}

struct SolveFlags {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> restarts, layers, budget, threads;
  std::optional<double> dt, report_dt;
  std::string policy;
};

RunConfig build_config(const SolveFlags& f) {
  RunConfig c;
  if (!f.policy.empty()) c = parse_run_config(read_file(f.policy));
  if (f.seed) c.control.seed = *f.seed;
  if (f.restarts) c.control.restarts = *f.restarts;
  if (f.layers) c.control.layers = *f.layers;
  if (f.budget) c.control.budget = *f.budget;
  if (f.threads) c.control.threads = *f.threads;
  if (f.dt) c.control.dt = *f.dt;
  if (f.report_dt) c.report_dt = *f.report_dt;
  validate(c);
  return c;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Classical simulator of single-atom integer programming", "atomip"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  std::string file, out_dir;
  auto add_common = [&](CLI::App* sub, bool with_out) {
    sub->add_option("problem", file, "Problem file (.ip)")->required();
    if (with_out) sub->add_option("--out", out_dir, "Directory for report files");
  };

  auto* parse_cmd = app.add_subcommand("parse", "Parse and print the canonical problem text");
  add_common(parse_cmd, false);
  auto* metrics_cmd = app.add_subcommand("metrics", "Benchmark metrics B1-B3 as JSON");
  add_common(metrics_cmd, true);
  auto* brute_cmd = app.add_subcommand("brute", "Exhaustive optimum and argmax set");
  add_common(brute_cmd, true);

  auto* bnb_cmd = app.add_subcommand("bnb", "LP-relaxation branch and bound");
  add_common(bnb_cmd, true);
  std::string order = "best-first";
  std::size_t max_nodes = BnBConfig{}.max_nodes;
  bnb_cmd->add_option("--order", order, "best-first or depth-first")
      ->check(CLI::IsMember({"best-first", "depth-first"}));
  bnb_cmd->add_option("--max-nodes", max_nodes, "Node limit");

  auto* solve_cmd = app.add_subcommand("solve", "Optimize a pulse protocol and decode solutions");
  add_common(solve_cmd, true);
  SolveFlags sf;
  solve_cmd->add_option("--seed", sf.seed, "Base random seed");
  solve_cmd->add_option("--restarts", sf.restarts, "Optimizer restarts");
  solve_cmd->add_option("--layers", sf.layers, "Protocol layers L");
  solve_cmd->add_option("--budget", sf.budget, "Objective evaluations per restart");
  solve_cmd->add_option("--dt", sf.dt, "Simulation step, us");
  solve_cmd->add_option("--report-dt", sf.report_dt, "Reporting step, us");
  solve_cmd->add_option("--threads", sf.threads, "Worker threads for restarts");
  solve_cmd->add_option("--policy", sf.policy, "Run-configuration file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kOk : kParse;
  }

  try {
    Problem p = load_problem(file, err);
    std::optional<fs::path> dir;
    if (!out_dir.empty()) dir = prepare_out_dir(out_dir);

    if (*parse_cmd) {
      out << format_problem(p);
      return kOk;
    }
    if (*metrics_cmd) {
      const std::string text = dump(metrics_report(p, compute_metrics(p)));
      if (dir) write_file(*dir / "report.json", text);
      out << text;
      return kOk;
    }
    if (*brute_cmd) {
      const BruteForceResult r = brute_force_optimum(p);
      if (dir) write_file(*dir / "report.json", dump(brute_report(p, r)));
      if (!r.feasible) {
        out << "infeasible\n";
        return kOk;
      }
      out << "value " << to_string(r.value) << "\n";
      for (const auto& x : r.argmax) {
        out << "argmax";
        for (std::size_t i = 0; i < x.size(); ++i) out << " " << p.variables()[i].name << "=" << x[i];
        out << "\n";
      }
      return kOk;
    }
    if (*bnb_cmd) {
      BnBConfig cfg;
      cfg.order = order == "depth-first" ? SearchOrder::DepthFirst : SearchOrder::BestFirst;
      cfg.max_nodes = max_nodes;
      const BnBResult r = solve_bnb(p, cfg);
      const std::string text = dump(bnb_report(p, cfg, r));
      if (dir) {
        write_file(*dir / "report.json", text);
        write_file(*dir / "bnb_trace.json", dump(bnb_trace(p, r)));
        out << (r.feasible ? "value " + to_string(r.value) : std::string("infeasible")) << ", nodes "
            << r.node_count << "\n";
      } else {
        out << text;
      }
      return kOk;
    }
    if (*solve_cmd) {
      const RunConfig cfg = build_config(sf);
      try {
        const SolveRun run = run_solve(p, cfg);
        const std::string text = dump(solve_report(p, cfg, run));
        if (dir) {
          write_file(*dir / "report.json", text);
          write_file(*dir / "trajectory.csv", trajectory_csv(p, run));
          const auto& b = run.optimization.best_feasible;
          out << "best feasible cost " << (b ? to_string(b->cost) : std::string("none"))
              << ", objective " << run.optimization.best_objective << "\n";
        } else {
          out << text;
        }
      } catch (const OptimizerAbort& e) {
        const std::string text = dump(aborted_solve_report(p, cfg, e));
        if (dir) write_file(*dir / "report.json", text);
        err << "optimizer aborted: " << e.what() << "\n";
        return kOptimizerAbort;
      }
      return kOk;
    }
  } catch (const ParseError&) {
    return kParse;
  } catch (const ConfigError& e) {
    err << "config: " << e.what() << "\n";
    return kParse;
  } catch (const IoError& e) {
    err << e.what() << "\n";
    return kIo;
  } catch (const Unsupported& e) {
    err << "unsupported: " << e.what() << "\n";
    return kUnsupported;
  } catch (const CapExceeded& e) {
    err << "enumeration cap exceeded: " << e.what() << "\n";
    return kUnsupported;
  } catch (const ConstraintUnsatisfiable& e) {
    err << "unsupported: " << e.what() << "\n";
    return kUnsupported;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInternal;
  }
  return kInternal;
}

}  // namespace atomip::cli
