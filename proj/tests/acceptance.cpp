// Acceptance checks: one PASS/FAIL line per criterion, non-zero exit on any failure.
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "atomip/branch_bound.hpp"
#include "atomip/cli.hpp"
#include "atomip/control.hpp"
#include "atomip/report.hpp"
#include "support.hpp"

using namespace atomip;
using test::q;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void report(int id, const std::string& name, const Outcome& o) {
  std::cout << "criterion " << id << " (" << name << "): " << (o.pass ? "PASS" : "FAIL") << " -"
            << o.detail.str() << std::endl;
  if (!o.pass) ++failures;
}

void oracle_values() {
  Outcome o;
  const struct {
    const char* name;
    long value;
  } expect[] = {{"p1", 6}, {"p2", 4}, {"p3", 25}, {"p4", 8}};
  for (const auto& e : expect) {
    const auto t0 = Clock::now();
    const auto r = brute_force_optimum(test::load(e.name));
    const double dt = seconds_since(t0);
    o.detail << " " << e.name << "=" << (r.feasible ? to_string(r.value) : "infeasible") << " ("
             << dt << " s)";
    o.require(r.feasible && r.value == e.value, std::string(e.name) + " value");
    o.require(dt < 1.0, std::string(e.name) + " under 1 s");
    if (std::string(e.name) == "p4")
      o.require(r.argmax == std::vector<Assignment>{{1, 0, 0}}, "p4 argmax (1,0,0)");
  }
  report(1, "oracle values", o);
}

void relaxation_gaps() {
  Outcome o;
  const auto m1 = compute_metrics(test::load("p1"));
  const auto m4 = compute_metrics(test::load("p4"));
  o.detail << " B1(P1)=" << m1.metrics.b1 << "% B1(P4)=" << m4.metrics.b1 << "%";
  o.require(m1.relaxation_method == "simplex" && m4.relaxation_method == "simplex", "exact simplex");
  o.require(std::abs(m1.metrics.b1 - 8.33) <= 0.05, "B1(P1)");
  o.require(std::abs(m4.metrics.b1 - 93.75) <= 0.05, "B1(P4)");
  for (const char* name : {"p1", "p2", "p3", "p4"}) {
    const double b3 = metric_b3(test::load(name));
    o.detail << " B3(" << name << ")=" << b3;
    o.require(b3 == 100.0, std::string("B3 ") + name);
  }
  report(2, "relaxation gaps", o);
}

void branch_and_bound() {
  Outcome o;
  const auto r1 = solve_bnb(test::load("p1"));
  o.detail << " P1 value " << to_string(r1.value) << " in " << r1.node_count << " nodes;";
  o.require(r1.feasible && r1.value == 6 && r1.node_count == 3, "P1 = 6 in 3 nodes");
  const auto r4 = solve_bnb(test::load("p4"));
  o.detail << " P4 value " << to_string(r4.value) << " in " << r4.node_count << " nodes;";
  o.require(r4.feasible && r4.value == 8 && r4.assignment == Assignment{1, 0, 0}, "P4 = 8 at (1,0,0)");
  o.require(r4.node_count == 11, "P4 node count 11");

  std::mt19937_64 rng(20240917);
  int compared = 0, mismatches = 0;
  while (compared < 200) {
    const Problem p = test::random_linear(rng);
    const auto brute = brute_force_optimum(p);
    if (!brute.feasible) continue;
    ++compared;
    const auto r = solve_bnb(p);
    if (!r.feasible || r.value != brute.value || !is_feasible(p, r.assignment)) ++mismatches;
  }
  o.detail << " random: " << compared << " instances, " << mismatches << " mismatches";
  o.require(mismatches == 0, "random instances");
  report(3, "branch and bound", o);
}

void encoding_fidelity() {
  Outcome o;
  const Problem p = test::load("p1");
  const auto scheme = build_level_scheme(p);
  const auto t = build_templates(p, scheme);
  using S = CouplingSlot;
  // Expected P1 slots, 0-based manifolds.
  const std::vector<S> c1{S::internal(0, 0, 1), S::internal(1, 0, 1), S::internal(1, 0, 2),
                          S::external(0, 0, 1, 1)};
  const std::vector<S> c2{S::internal(1, 0, 1), S::internal(1, 0, 2), S::internal(2, 0, 1),
                          S::internal(2, 0, 2), S::external(1, 1, 2, 2)};
  o.require(t.size() == 2, "two templates");
  if (t.size() == 2) {
    o.detail << " C1 " << t[0].slots.size() << " slots, C2 " << t[1].slots.size() << " slots";
    o.require(t[0].slots == c1, "C1 slots");
    o.require(t[1].slots == c2, "C2 slots");
  }
  report(4, "encoding fidelity", o);
}

void dynamics_accuracy() {
  Outcome o;
  // Rabi.
  const Problem two({{"x", 0, 1}}, Polynomial({{q(1), {0}}}), {});
  const auto s2 = build_level_scheme(two);
  const HamiltonianTemplate rabi{0, {CouplingSlot::internal(0, 0, 1)}};
  double rabi_err = 0.0;
  for (double omega : {0.5, 1.0, 3.0, 10.0}) {
    ProtocolParams params;
    params.segments.push_back({SegmentParams{10.0, Eigen::VectorXd::Constant(1, omega)}});
    const auto traj = run_protocol(s2, {rabi}, params, 0.01, basis_state(s2, 0, 0));
    for (std::size_t k = 0; k < traj.samples(); ++k)
      rabi_err = std::max(rabi_err, std::abs(traj.populations(1, static_cast<Eigen::Index>(k)) -
                                             std::pow(std::sin(omega * traj.times[k]), 2)));
  }
  o.detail << " Rabi error " << rabi_err << ";";
  o.require(rabi_err <= 1e-9, "Rabi");

  // Norm and leakage on a 40 us, three-layer protocol for P3 (largest scheme).
  const Problem p = test::load("p3");
  const auto scheme = build_level_scheme(p);
  const auto templates = build_templates(p, scheme);
  ControlConfig cfg;
  const ProtocolLayout layout(templates, cfg);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::VectorXd x(layout.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = u(rng);
  const auto params = layout.params(x);
  const StateVector psi0 = initial_state(scheme, templates, InitialState::Auto);
  const auto traj = run_protocol(scheme, templates, params, 0.01, psi0);
  const double drift = (traj.populations.colwise().sum().array() - 1.0).abs().maxCoeff();
  o.detail << " T=" << traj.total_time << " us, norm drift " << drift << ";";
  o.require(std::abs(traj.total_time - 40.0) < 1e-9, "40 us protocol");
  o.require(drift <= 1e-9, "norm drift");

  double leak = 0.0;
  StateVector psi = psi0;
  for (const auto& layer : params.segments) {
    for (std::size_t c = 0; c < layer.size(); ++c) {
      const Eigen::MatrixXd h = assemble<double>(templates[c], scheme, layer[c].amplitudes);
      const auto active = detail::active_levels(h);
      const StateVector next = detail::evolve_state(h, psi, layer[c].duration);
      for (Eigen::Index i = 0; i < psi.size(); ++i)
        if (std::find(active.begin(), active.end(), i) == active.end())
          leak = std::max(leak, std::abs(std::norm(next(i)) - std::norm(psi(i))));
      psi = next;
    }
  }
  o.detail << " leakage " << leak;
  o.require(leak <= 1e-12, "leakage");
  report(5, "dynamics", o);
}

void quantum_solve() {
  Outcome o;
  // P3 only has to come near the optimum; the others must hit it.
  const struct {
    const char* name;
    std::optional<long> near;
    int needed;
  } cases[] = {{"p1", {}, 4}, {"p2", {}, 4}, {"p3", 24, 3}, {"p4", {}, 4}};
  for (const auto& c : cases) {
    const Problem p = test::load(c.name);
    const Rational v_int = brute_force_optimum(p).value;
    const auto scheme = build_level_scheme(p);
    const auto templates = build_templates(p, scheme);
    int hits = 0;
    const auto t0 = Clock::now();
    std::ostringstream seeds;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      ControlConfig cfg;
      cfg.seed = seed;
      cfg.restarts = 20;
      cfg.budget = 2000;
      cfg.layers = 3;
      cfg.threads = std::max(1u, std::thread::hardware_concurrency());
      const auto r = optimize_protocol(p, scheme, templates, cfg);
      bool ok = false;
      if (r.best_feasible) {
        const auto& b = *r.best_feasible;
        const bool value_ok = c.near ? b.cost >= *c.near : b.cost == v_int;
        ok = value_ok && b.first_time <= 40.0 && is_feasible(p, b.assignment);
        seeds << " " << to_string(b.cost) << "@" << b.first_time;
      } else {
        seeds << " none";
      }
      hits += ok;
    }
    const double wall = seconds_since(t0);
    o.detail << " " << c.name << ": " << hits << "/5 [" << seeds.str() << " ] " << wall << " s;";
    o.require(hits >= c.needed, std::string(c.name) + " success rate");
    o.require(wall <= 1800.0, std::string(c.name) + " wall clock");
  }
  report(6, "quantum solve", o);
}

void objective_properties() {
  Outcome o;
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> cost(0.0, 10.0);
  int iff_violations = 0, two_violations = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = 1 + rng() % 20;
    std::vector<bool> f(n);
    std::vector<double> c(n);
    bool all = true;
    for (std::size_t k = 0; k < n; ++k) {
      f[k] = rng() % 4 != 0;
      c[k] = trial % 7 == 0 ? 0.0 : cost(rng);
      all = all && f[k];
    }
    iff_violations += (multi_objective(f, c) == 0.0) != all;
    std::vector<bool> none(n, false);
    std::vector<double> pos(n, 1.0);
    for (std::size_t k = 0; k < n; ++k) pos[k] += c[k];
    two_violations += multi_objective(none, pos) != 2.0;
  }
  const double hand = multi_objective({false, true}, {6.0, 6.0});
  o.detail << " iff violations " << iff_violations << ", O=2 violations " << two_violations
           << ", hand case O=" << hand;
  o.require(iff_violations == 0, "O = 0 iff all feasible");
  o.require(two_violations == 0, "O = 2 when nothing is feasible");
  o.require(hand == 1.0, "hand case");
  report(7, "objective properties", o);
}

void determinism() {
  Outcome o;
  namespace fs = std::filesystem;
  const fs::path base = fs::temp_directory_path() / "atomip_acceptance";
  std::string reports[2];
  for (int i = 0; i < 2; ++i) {
    const fs::path dir = base / ("run" + std::to_string(i));
    fs::remove_all(dir);
    const std::string file = test::data_path("p1.ip");
    const std::string out = dir.string();
    const char* argv[] = {"atomip", "solve", file.c_str(), "--seed", "7", "--out", out.c_str()};
    std::ostringstream sout, serr;
    const int code = cli::run(7, argv, sout, serr);
    o.require(code == 0, "exit code");
    reports[i] = test::read_text((dir / "report.json").string());
  }
  o.detail << " report.json " << reports[0].size() << " bytes, identical: "
           << (reports[0] == reports[1] ? "yes" : "no");
  o.require(!reports[0].empty() && reports[0] == reports[1], "byte-identical");
  report(8, "determinism", o);
}

}  // namespace

int main() {
  oracle_values();
  relaxation_gaps();
  branch_and_bound();
  encoding_fidelity();
  dynamics_accuracy();
  quantum_solve();
  objective_properties();
  determinism();
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
