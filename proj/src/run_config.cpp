#include "atomip/run_config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

namespace atomip {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(std::string_view v, std::string_view key, std::size_t line) {
  T out{};
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigError("invalid value '" + std::string(v) + "' for " + std::string(key), line);
  return out;
}

double parse_double(std::string_view v, std::string_view key, std::size_t line) {
  const double d = parse_number<double>(v, key, line);
  if (!std::isfinite(d)) throw ConfigError("non-finite value for " + std::string(key), line);
  return d;
}

bool parse_bool(std::string_view v, std::string_view key, std::size_t line) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("expected true/false for " + std::string(key), line);
}

LevelRef parse_level_ref(std::string_view s, std::size_t line) {
  s = trim(s);
  const auto colon = s.find(':');
  if (colon == std::string_view::npos || colon == 0)
    throw ConfigError("expected <variable>:<value>, got '" + std::string(s) + "'", line);
  LevelRef r;
  r.variable = std::string(trim(s.substr(0, colon)));
  r.value = parse_number<Value>(trim(s.substr(colon + 1)), "coupling value", line);
  return r;
}

std::vector<NamedCoupling> parse_couplings(std::string_view v, std::size_t line) {
  std::vector<NamedCoupling> out;
  if (trim(v).empty()) return out;
  std::size_t pos = 0;
  while (pos <= v.size()) {
    auto comma = v.find(',', pos);
    if (comma == std::string_view::npos) comma = v.size();
    const std::string_view item = trim(v.substr(pos, comma - pos));
    // The separator is the '-' that starts the second variable name; a '-' after
    // a colon is a sign.
    std::size_t split = std::string_view::npos;
    for (std::size_t i = 0; i + 1 < item.size(); ++i) {
      if (item[i] != '-') continue;
      const auto rest = trim(item.substr(i + 1));
      if (!rest.empty() && (std::isalpha(static_cast<unsigned char>(rest[0])) || rest[0] == '_')) {
        split = i;
        break;
      }
    }
    if (split == std::string_view::npos)
      throw ConfigError("expected <var>:<value>-<var>:<value>, got '" + std::string(item) + "'", line);
    out.push_back({parse_level_ref(item.substr(0, split), line),
                   parse_level_ref(item.substr(split + 1), line)});
    pos = comma + 1;
  }
  return out;
}

}  // namespace

RunConfig parse_run_config(std::string_view text, RunConfig c) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (auto h = line.find('#'); h != std::string_view::npos) line = line.substr(0, h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected key = value", line_no);
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view val = trim(line.substr(eq + 1));
    auto& k = c.control;

    if (key == "seed") k.seed = parse_number<std::uint64_t>(val, key, line_no);
    else if (key == "restarts") k.restarts = parse_number<std::size_t>(val, key, line_no);
    else if (key == "layers") k.layers = parse_number<std::size_t>(val, key, line_no);
    else if (key == "budget") k.budget = parse_number<std::size_t>(val, key, line_no);
    else if (key == "threads") k.threads = parse_number<std::size_t>(val, key, line_no);
    else if (key == "dt") k.dt = parse_double(val, key, line_no);
    else if (key == "report_dt") c.report_dt = parse_double(val, key, line_no);
    else if (key == "max_total_time") k.max_total_time = parse_double(val, key, line_no);
    else if (key == "amplitude_min") k.amplitude_min = parse_double(val, key, line_no);
    else if (key == "amplitude_max") k.amplitude_max = parse_double(val, key, line_no);
    else if (key == "tau_min") k.tau_min = parse_double(val, key, line_no);
    else if (key == "tau_max") k.tau_max = parse_double(val, key, line_no);
    else if (key == "nm_fraction") k.nm_fraction = parse_double(val, key, line_no);
    else if (key == "nm_tolerance") k.nm_tolerance = parse_double(val, key, line_no);
    else if (key == "nm_initial_step") k.nm_initial_step = parse_double(val, key, line_no);
    else if (key == "fd_step") k.fd_step = parse_double(val, key, line_no);
    else if (key == "gradient_tolerance") k.gradient_tolerance = parse_double(val, key, line_no);
    else if (key == "tied_layers") k.tied_layers = parse_bool(val, key, line_no);
    else if (key == "initial") {
      if (val == "auto") k.initial = InitialState::Auto;
      else if (val == "first-manifold") k.initial = InitialState::FirstManifold;
      else throw ConfigError("initial must be auto or first-manifold", line_no);
    } else if (key == "internal_topology") {
      if (val == "star") c.internal = InternalTopology::Star;
      else if (val == "chain") c.internal = InternalTopology::Chain;
      else throw ConfigError("internal_topology must be star or chain", line_no);
    } else if (key == "external_rule") {
      if (val == "diagonal-chain") c.external = ExternalRule::DiagonalChain;
      else if (val == "explicit") c.external = ExternalRule::Explicit;
      else throw ConfigError("external_rule must be diagonal-chain or explicit", line_no);
    } else if (key.starts_with("external.") && key.size() > 9) {
      c.explicit_external[std::string(key.substr(9))] = parse_couplings(val, line_no);
    } else {
      throw ConfigError("unknown key '" + std::string(key) + "'", line_no);
    }
  }
  return c;
}

void validate(const RunConfig& c) {
  const auto& k = c.control;
  if (k.restarts == 0) throw ConfigError("restarts must be positive");
  if (k.layers == 0) throw ConfigError("layers must be positive");
  if (!(k.dt > 0.0)) throw ConfigError("dt must be positive");
  if (!(c.report_dt > 0.0)) throw ConfigError("report_dt must be positive");
  const double ratio = c.report_dt / k.dt;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio || std::round(ratio) < 1.0)
    throw ConfigError("report_dt must be a positive integer multiple of dt");
  if (!(k.tau_min > 0.0) || k.tau_max < k.tau_min) throw ConfigError("need 0 < tau_min <= tau_max");
  if (k.amplitude_max < k.amplitude_min) throw ConfigError("need amplitude_min <= amplitude_max");
  if (k.max_total_time < 0.0) throw ConfigError("max_total_time must be >= 0");
  if (k.nm_fraction < 0.0 || k.nm_fraction > 1.0) throw ConfigError("nm_fraction must lie in [0, 1]");
  if (k.threads == 0) throw ConfigError("threads must be positive");
  if (!c.explicit_external.empty() && c.external != ExternalRule::Explicit)
    throw ConfigError("external.<constraint> entries require external_rule = explicit");
}

CouplingPolicy resolve_policy(const RunConfig& config, const Problem& p, const LevelScheme& scheme) {
  CouplingPolicy policy;
  policy.internal = config.internal;
  policy.external = config.external;
  auto resolve = [&](const LevelRef& r) {
    const auto var = p.find_variable(r.variable);
    if (!var) throw ConfigError("unknown variable '" + r.variable + "' in external coupling");
    const auto& v = p.variables()[*var];
    if (r.value < v.lo || r.value > v.hi)
      throw ConfigError("value " + std::to_string(r.value) + " outside the domain of " + r.variable);
    return std::pair{*var, scheme.level_of(*var, r.value)};
  };
  for (const auto& [name, couplings] : config.explicit_external) {
    std::optional<std::size_t> index;
    for (std::size_t i = 0; i < p.constraints().size(); ++i)
      if (p.constraints()[i].name == name) index = i;
    if (!index) throw ConfigError("unknown constraint '" + name + "' in external coupling");
    auto& slots = policy.explicit_external[*index];
    for (const auto& c : couplings) {
      const auto [ma, la] = resolve(c.a);
      const auto [mb, lb] = resolve(c.b);
      if (ma == mb) throw ConfigError("external coupling must join two different variables");
      slots.push_back(CouplingSlot::external(ma, la, mb, lb));
    }
  }
  return policy;
}

std::string to_string(InternalTopology t) { return t == InternalTopology::Star ? "star" : "chain"; }
std::string to_string(ExternalRule r) {
  return r == ExternalRule::DiagonalChain ? "diagonal-chain" : "explicit";
}
std::string to_string(InitialState s) {
  return s == InitialState::Auto ? "auto" : "first-manifold";
}

}  // namespace atomip
