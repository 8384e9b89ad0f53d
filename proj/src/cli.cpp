#include "hfa/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "hfa/errors.hpp"

namespace hfa {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double to_real(std::string_view key, std::string_view value) {
  try {
    const double v = parse_real(trim(value));
    if (!std::isfinite(v)) throw InvalidArgument("not finite");
    return v;
  } catch (const InvalidArgument&) {
    throw ConfigError(std::string(key), "key '" + std::string(key) + "': expected a real number, got '" +
                                            std::string(value) + "'");
  }
}

template <typename Int>
Int to_integer(std::string_view key, std::string_view value) {
  value = trim(value);
  Int out{};
  const auto result = std::from_chars(value.data(), value.data() + value.size(), out);
  if (result.ec != std::errc() || result.ptr != value.data() + value.size()) {
    throw ConfigError(std::string(key), "key '" + std::string(key) + "': expected an integer, got '" +
                                            std::string(value) + "'");
  }
  return out;
}

bool to_bool(std::string_view key, std::string_view value) {
  value = trim(value);
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError(std::string(key), "key '" + std::string(key) + "': expected true or false");
}

template <typename T, typename Parse>
std::vector<T> to_list(std::string_view key, std::string_view value, Parse parse) {
  std::vector<T> out;
  value = trim(value);
  if (value.empty()) return out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = value.find(',', start);
    out.push_back(parse(key, value.substr(start, comma == std::string_view::npos ? value.npos : comma - start)));
    if (comma == std::string_view::npos) return out;
    start = comma + 1;
  }
}

template <typename T, typename Format>
std::string join(const std::vector<T>& values, Format format) {
  std::string out;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k) out += ',';
    out += format(values[k]);
  }
  return out;
}

std::string format_index(Index value) { return std::to_string(value); }

struct KeyHandler {
  ConfigKey key;
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

const std::vector<KeyHandler>& handlers() {
  static const std::vector<KeyHandler> table = [] {
    std::vector<KeyHandler> h;
    auto real = [&h](std::string name, std::string help, double ExperimentSpec::*inner) {
      h.push_back({{name, std::move(help)},
                   [name, inner](RunConfig& c, std::string_view v) { c.spec.*inner = to_real(name, v); },
                   [inner](const RunConfig& c) { return format_real(c.spec.*inner); }});
    };
    h.push_back({{"experiment", "one of converge, locality, wegner, localisation, gap-closing, "
                                "sweep-periodic, multiscale-probe, verify"},
                 [](RunConfig& c, std::string_view v) { c.experiment = std::string(trim(v)); },
                 [](const RunConfig& c) { return c.experiment; }});
    real("xi", "periodic amplitude", &ExperimentSpec::xi);
    real("w", "disorder width: V_omega uniform on [0, w]", &ExperimentSpec::w);
    real("q", "interaction strength W(0)", &ExperimentSpec::q);
    h.push_back({{"L", "sites per axis"},
                 [](RunConfig& c, std::string_view v) { c.spec.L = to_integer<Index>("L", v); },
                 [](const RunConfig& c) { return format_index(c.spec.L); }});
    h.push_back({{"d", "lattice dimension"},
                 [](RunConfig& c, std::string_view v) { c.spec.d = to_integer<int>("d", v); },
                 [](const RunConfig& c) { return std::to_string(c.spec.d); }});
    h.push_back({{"filling", "half or quarter (aufbau particle number)"},
                 [](RunConfig& c, std::string_view v) {
                   v = trim(v);
                   if (v == "half") {
                     c.spec.filling = FillingRule::half;
                   } else if (v == "quarter") {
                     c.spec.filling = FillingRule::quarter;
                   } else {
                     throw ConfigError("filling", "key 'filling': expected half or quarter");
                   }
                 },
                 [](const RunConfig& c) { return to_string(c.spec.filling); }});
    h.push_back({{"mu", "mid-gap, aufbau, or a fixed real chemical potential"},
                 [](RunConfig& c, std::string_view v) {
                   v = trim(v);
                   if (v == "mid-gap") {
                     c.spec.mu_rule = MuRule::mid_gap;
                     c.spec.mu = 0.0;
                   } else if (v == "aufbau") {
                     c.spec.mu_rule = MuRule::aufbau;
                     c.spec.mu = 0.0;
                   } else {
                     c.spec.mu_rule = MuRule::fixed;
                     c.spec.mu = to_real("mu", v);
                   }
                 },
                 [](const RunConfig& c) {
                   return c.spec.mu_rule == MuRule::fixed ? format_real(c.spec.mu) : to_string(c.spec.mu_rule);
                 }});
    h.push_back({{"seed", "base seed of the disorder"},
                 [](RunConfig& c, std::string_view v) { c.spec.seed = to_integer<std::uint64_t>("seed", v); },
                 [](const RunConfig& c) { return std::to_string(c.spec.seed); }});
    h.push_back({{"samples", "ensemble size (>= 1)"},
                 [](RunConfig& c, std::string_view v) {
                   const auto n = to_integer<long long>("samples", v);
                   if (n < 1) throw ConfigError("samples", "key 'samples': must be >= 1");
                   c.spec.samples = static_cast<std::size_t>(n);
                 },
                 [](const RunConfig& c) { return std::to_string(c.spec.samples); }});
    real("tol", "SCF residual threshold", &ExperimentSpec::tol);
    h.push_back({{"max_iter", "SCF iteration cap"},
                 [](RunConfig& c, std::string_view v) { c.spec.max_iter = to_integer<int>("max_iter", v); },
                 [](const RunConfig& c) { return std::to_string(c.spec.max_iter); }});
    h.push_back({{"algorithm", "fixed_point or oda"},
                 [](RunConfig& c, std::string_view v) {
                   v = trim(v);
                   if (v == "fixed_point") {
                     c.spec.algorithm = Algorithm::fixed_point;
                   } else if (v == "oda") {
                     c.spec.algorithm = Algorithm::oda;
                   } else {
                     throw ConfigError("algorithm", "key 'algorithm': expected fixed_point or oda");
                   }
                 },
                 [](const RunConfig& c) { return to_string(c.spec.algorithm); }});
    h.push_back({{"oda_fallback", "rerun with ODA when the fixed point hits max_iter"},
                 [](RunConfig& c, std::string_view v) { c.spec.oda_fallback = to_bool("oda_fallback", v); },
                 [](const RunConfig& c) { return std::string(c.spec.oda_fallback ? "true" : "false"); }});
    h.push_back({{"output", "output path; empty writes to standard output"},
                 [](RunConfig& c, std::string_view v) { c.output = std::string(trim(v)); },
                 [](const RunConfig& c) { return c.output; }});
    h.push_back({{"format", "csv or json"},
                 [](RunConfig& c, std::string_view v) { c.format = std::string(trim(v)); },
                 [](const RunConfig& c) { return c.format; }});
    h.push_back({{"site", "locality: perturbed site (negative: |domain| / 2)"},
                 [](RunConfig& c, std::string_view v) { c.site = to_integer<Index>("site", v); },
                 [](const RunConfig& c) { return format_index(c.site); }});
    h.push_back({{"amplitude", "locality: requested perturbation amplitude"},
                 [](RunConfig& c, std::string_view v) { c.amplitude = to_real("amplitude", v); },
                 [](const RunConfig& c) { return format_real(c.amplitude); }});
    h.push_back({{"lambda0", "wegner: left end of the counting window"},
                 [](RunConfig& c, std::string_view v) { c.lambda0 = to_real("lambda0", v); },
                 [](const RunConfig& c) { return format_real(c.lambda0); }});
    h.push_back({{"epsilons", "wegner: comma-separated window widths"},
                 [](RunConfig& c, std::string_view v) { c.epsilons = to_list<double>("epsilons", v, to_real); },
                 [](const RunConfig& c) { return join(c.epsilons, format_real); }});
    h.push_back({{"xi_values", "sweep-periodic: comma-separated periodic amplitudes"},
                 [](RunConfig& c, std::string_view v) { c.xi_values = to_list<double>("xi_values", v, to_real); },
                 [](const RunConfig& c) { return join(c.xi_values, format_real); }});
    h.push_back({{"lambda", "multiscale-probe: probe energy"},
                 [](RunConfig& c, std::string_view v) { c.multiscale.lambda = to_real("lambda", v); },
                 [](const RunConfig& c) { return format_real(c.multiscale.lambda); }});
    h.push_back({{"zeta_box", "multiscale-probe: good-box decay rate"},
                 [](RunConfig& c, std::string_view v) { c.multiscale.zeta_box = to_real("zeta_box", v); },
                 [](const RunConfig& c) { return format_real(c.multiscale.zeta_box); }});
    h.push_back({{"radii", "multiscale-probe: comma-separated box radii"},
                 [](RunConfig& c, std::string_view v) {
                   c.multiscale.radii = to_list<Index>("radii", v, to_integer<Index>);
                 },
                 [](const RunConfig& c) { return join(c.multiscale.radii, format_index); }});
    h.push_back({{"D", "multiscale-probe: locality constant D"},
                 [](RunConfig& c, std::string_view v) { c.multiscale.constants.D = to_real("D", v); },
                 [](const RunConfig& c) { return format_real(c.multiscale.constants.D); }});
    h.push_back({{"nu", "multiscale-probe: locality rate nu"},
                 [](RunConfig& c, std::string_view v) { c.multiscale.constants.nu = to_real("nu", v); },
                 [](const RunConfig& c) { return format_real(c.multiscale.constants.nu); }});
    h.push_back({{"margin", "multiscale-probe: extra sites at both chain ends"},
                 [](RunConfig& c, std::string_view v) { c.multiscale.margin = to_integer<Index>("margin", v); },
                 [](const RunConfig& c) { return format_index(c.multiscale.margin); }});
    return h;
  }();
  return table;
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diagonal = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t above = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diagonal + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diagonal = above;
    }
  }
  return row[b.size()];
}

[[noreturn]] void unknown_key(std::string_view key) {
  static const std::map<std::string, std::string, std::less<>> aliases{
      {"zeta", "w (the disorder width; the good-box decay rate is zeta_box)"},
      {"disorder", "w (the disorder width)"},
      {"N", "filling"},
      {"threads", "the HFA_THREADS environment variable"}};
  std::string message = "unknown key '" + std::string(key) + "'";
  if (const auto it = aliases.find(key); it != aliases.end()) {
    message += "; did you mean " + it->second + "?";
  } else {
    std::string best;
    std::size_t best_distance = 3;
    for (const auto& h : handlers()) {
      const auto d = edit_distance(key, h.key.name);
      if (d < best_distance) {
        best_distance = d;
        best = h.key.name;
      }
    }
    if (!best.empty()) message += "; did you mean " + best + "?";
  }
  throw ConfigError(std::string(key), message);
}

const KeyHandler& handler(std::string_view key) {
  for (const auto& h : handlers()) {
    if (h.key.name == key) return h;
  }
  unknown_key(key);
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config", "cannot read config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

}  // namespace

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> out;
    for (const auto& h : handlers()) out.push_back(h.key);
    return out;
  }();
  return keys;
}

void apply_setting(RunConfig& config, std::string_view key, std::string_view value) {
  handler(key).set(config, value);
}

RunConfig parse_config_text(std::string_view text, RunConfig base) {
  std::size_t line_number = 0;
  while (!text.empty()) {
    const auto newline = text.find('\n');
    auto line = text.substr(0, newline);
    text = newline == std::string_view::npos ? std::string_view() : text.substr(newline + 1);
    ++line_number;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("", "config line " + std::to_string(line_number) + ": expected key = value");
    }
    apply_setting(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return base;
}

std::string emit_config(const RunConfig& config) {
  std::string out;
  for (const auto& h : handlers()) out += h.key.name + " = " + h.get(config) + "\n";
  return out;
}

void validate(const RunConfig& config) {
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), config.experiment) == names.end()) {
    throw ConfigError("experiment", "key 'experiment': unknown experiment '" + config.experiment + "'");
  }
  if (config.format != "csv" && config.format != "json") {
    throw ConfigError("format", "key 'format': expected csv or json");
  }
  const auto& s = config.spec;
  if (s.L < 2) throw ConfigError("L", "key 'L': must be >= 2");
  if (s.d < 1) throw ConfigError("d", "key 'd': must be >= 1");
  if (s.samples < 1) throw ConfigError("samples", "key 'samples': must be >= 1");
  if (s.xi < 0.0) throw ConfigError("xi", "key 'xi': must be >= 0");
  if (s.w < 0.0) throw ConfigError("w", "key 'w': must be >= 0");
  if (s.q < 0.0) throw ConfigError("q", "key 'q': must be >= 0");
  if (!(s.tol > 0.0)) throw ConfigError("tol", "key 'tol': must be > 0");
  if (s.mu_rule != MuRule::fixed && s.mu != 0.0) {
    throw ConfigError("mu", "key 'mu': a chemical potential value needs the fixed rule");
  }
  if (s.max_iter < 1) throw ConfigError("max_iter", "key 'max_iter': must be >= 1");
  if (config.experiment == "wegner") {
    if (config.epsilons.empty()) throw ConfigError("epsilons", "key 'epsilons': must not be empty");
    for (double e : config.epsilons) {
      if (e < 0.0) throw ConfigError("epsilons", "key 'epsilons': values must be >= 0");
    }
  }
  if (config.experiment == "sweep-periodic") {
    if (config.xi_values.empty()) throw ConfigError("xi_values", "key 'xi_values': must not be empty");
    if (s.q != 0.0) throw ConfigError("q", "key 'q': sweep-periodic is the linear problem, q must be 0");
  }
  if (config.experiment == "locality" && config.site >= experiment_domain(s).size()) {
    throw ConfigError("site", "key 'site': outside the domain");
  }
  if (config.experiment == "multiscale-probe") {
    if (s.d != 1) throw ConfigError("d", "key 'd': multiscale-probe runs on chains (d = 1)");
    if (s.samples < 2) throw ConfigError("samples", "key 'samples': multiscale-probe needs >= 2");
    if (config.multiscale.radii.empty()) throw ConfigError("radii", "key 'radii': must not be empty");
    for (Index r : config.multiscale.radii) {
      if (r < 1) throw ConfigError("radii", "key 'radii': values must be >= 1");
    }
    if (config.multiscale.margin < 0) throw ConfigError("margin", "key 'margin': must be >= 0");
  }
}

RunConfig parse_command_line(const std::vector<std::string>& args) {
  CLI::App app{"Hartree-Fock mean-field solver and disorder-ensemble experiments", "hfa"};
  app.allow_extras();
  std::string config_path;
  app.add_option("--config", config_path, "flat key = value config file");
  std::map<std::string, std::string> flags;
  std::map<std::string, CLI::Option*> options;
  for (const auto& key : config_keys()) {
    options[key.name] = app.add_option("--" + key.name, flags[key.name], key.help);
  }
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    throw ConfigError("", e.what());
  }
  for (const auto& extra : app.remaining()) {
    if (extra.rfind("--", 0) == 0) {
      std::string key = extra.substr(2);
      if (const auto eq = key.find('='); eq != std::string::npos) key.resize(eq);
      unknown_key(key);
    }
    throw ConfigError("", "unexpected argument '" + extra + "'");
  }

  RunConfig config;
  if (!config_path.empty()) config = parse_config_text(read_file(config_path));
  for (const auto& key : config_keys()) {
    if (options[key.name]->count() > 0) apply_setting(config, key.name, flags[key.name]);
  }
  validate(config);
  return config;
}

RunOutcome run(const RunConfig& config) {
  validate(config);
  RunOutcome out;
  bool ok = false;
  try {
    const auto& s = config.spec;
    if (config.experiment == "converge") {
      auto r = convergence_experiment(s);
      ok = r.ok;
      out.table = std::move(r.table);
    } else if (config.experiment == "locality") {
      const Index site = config.site < 0 ? experiment_domain(s).size() / 2 : config.site;
      auto r = locality_experiment(s, site, config.amplitude);
      ok = r.ok;
      out.table = std::move(r.table);
    } else if (config.experiment == "wegner") {
      auto r = wegner_experiment(s, config.lambda0, config.epsilons);
      ok = r.ok;
      out.table = std::move(r.table);
    } else if (config.experiment == "localisation") {
      auto r = localisation_experiment(s);
      ok = r.ok;
      out.table = std::move(r.table);
    } else if (config.experiment == "gap-closing") {
      auto r = gap_closing_experiment(s);
      ok = r.ok;
      out.table = std::move(r.table);
    } else if (config.experiment == "sweep-periodic") {
      auto r = periodic_sweep(s, config.xi_values);
      ok = r.ok;
      out.table = std::move(r.table);
    } else if (config.experiment == "multiscale-probe") {
      auto r = multiscale_probe(s, config.multiscale);
      ok = r.ok;
      out.table = std::move(r.table);
    } else {
      auto r = verify_experiment(s);
      ok = r.ok;
      out.table = std::move(r.table);
    }
  } catch (const InvalidArgument& e) {
    throw ConfigError("", e.what());
  }
  out.exit_code = ok ? 0 : 1;
  const std::string echo = emit_config(config);
  out.table.set_metadata("version", kArtifactVersion);
  out.table.set_metadata("run_id", fnv1a_hex(echo));
  for (const auto& h : handlers()) {
    // The output path does not change the data.
    if (h.key.name == "output") continue;
    out.table.set_metadata("config." + h.key.name, h.get(config));
  }
  return out;
}

std::string render(const RunConfig& config, const ResultTable& table, const std::string& timestamp) {
  return config.format == "json" ? table.to_json(timestamp) : table.to_csv(timestamp);
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  if (std::find(args.begin(), args.end(), "--help") != args.end() ||
      std::find(args.begin(), args.end(), "-h") != args.end()) {
    out << "usage: hfa [--config FILE] [--KEY VALUE]...\n\nkeys (file and flags share names):\n";
    for (const auto& key : config_keys()) out << "  --" << key.name << "  " << key.help << "\n";
    out << "\nexit codes: 0 success, 1 solver failure (partial output written), 2 config error\n"
        << "HFA_THREADS caps the worker threads of ensemble experiments.\n";
    return 0;
  }
  const bool dump = std::find(args.begin(), args.end(), "--dump-config") != args.end();
  std::vector<std::string> rest;
  for (const auto& a : args) {
    if (a != "--dump-config") rest.push_back(a);
  }
  RunConfig config;
  try {
    config = parse_command_line(rest);
  } catch (const ConfigError& e) {
    err << "hfa: config error: " << e.what() << "\n";
    return 2;
  }
  if (dump) {
    out << emit_config(config);
    return 0;
  }

  RunOutcome outcome;
  try {
    outcome = run(config);
  } catch (const ConfigError& e) {
    err << "hfa: config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "hfa: " << e.what() << "\n";
    return 1;
  }
  const std::string text = render(config, outcome.table, utc_timestamp());
  if (config.output.empty()) {
    out << text;
  } else {
    std::ofstream file(config.output, std::ios::binary | std::ios::trunc);
    if (!file || !(file << text)) {
      err << "hfa: cannot write '" << config.output << "'\n";
      return 1;
    }
  }
  if (outcome.exit_code != 0) {
    err << "hfa: solver failure: " << outcome.table.metadata_value("failure").value_or("see metadata") << "\n";
  }
  return outcome.exit_code;
}

}  // namespace hfa
