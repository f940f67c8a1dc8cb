#pragma once

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "atomip/control.hpp"
#include "atomip/encoding.hpp"
#include "atomip/problem.hpp"

namespace atomip {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& message, std::size_t line = 0)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + message : message),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// One end of an explicit external coupling, named by variable and value.
struct LevelRef {
  std::string variable;
  Value value = 0;
};

struct NamedCoupling {
  LevelRef a;
  LevelRef b;
};

/// Everything a solve run needs besides the problem itself.
struct RunConfig {
  ControlConfig control;
  double report_dt = 1.0;  // us
  InternalTopology internal = InternalTopology::Star;
  ExternalRule external = ExternalRule::DiagonalChain;
  std::map<std::string, std::vector<NamedCoupling>> explicit_external;  // by constraint name
};

/// Key-value text, one `key = value` per line, `#` starts a comment:
///
///   seed = 3
///   restarts = 20            layers = 3          budget = 2000
///   dt = 0.01                report_dt = 1       max_total_time = 40
///   amplitude_min = 0        amplitude_max = 20
///   tau_min = 0.1            tau_max = 10
///   nm_fraction = 0.75       threads = 1         tied_layers = false
///   initial = auto | first-manifold
///   internal_topology = star | chain
///   external_rule = diagonal-chain | explicit
///   external.C1 = x1:0-x2:1, x2:1-x3:2
///
/// Keys may appear in any order; later lines win. Values are applied on top of `base`.
RunConfig parse_run_config(std::string_view text, RunConfig base = {});

/// Checks value ranges that do not depend on the problem.
void validate(const RunConfig& config);

/// Turns named explicit couplings into level-scheme slots for `p`.
CouplingPolicy resolve_policy(const RunConfig& config, const Problem& p, const LevelScheme& scheme);

std::string to_string(InternalTopology t);
std::string to_string(ExternalRule r);
std::string to_string(InitialState s);

}  // namespace atomip
