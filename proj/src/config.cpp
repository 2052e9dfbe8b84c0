#include "vbd/cli/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "vbd/errors.hpp"

namespace vbd {
namespace {

namespace pt = boost::property_tree;

double parse_number(const std::string& key, const std::string& text) {
  const char* b = text.data();
  const char* e = b + text.size();
  while (b < e && (*b == ' ' || *b == '\t')) ++b;
  while (e > b && (e[-1] == ' ' || e[-1] == '\t')) --e;
  if (b < e && *b == '+') ++b;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || ptr != e || b == e) throw ConfigError("key '" + key + "': '" + text + "' is not a number");
  return v;
}

int parse_int(const std::string& key, const std::string& text) {
  const double v = parse_number(key, text);
  if (v != static_cast<double>(static_cast<int>(v))) throw ConfigError("key '" + key + "': expected an integer");
  return static_cast<int>(v);
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("key '" + key + "': expected true or false");
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(key, item));
  return out;
}

using Setter = std::function<void(ScenarioConfig&, const std::string& key, const std::string& value)>;

struct KeySpec {
  Setter set;
  bool required = false;  // only when a file is given
};

template <class T>
Setter number(T ScenarioConfig::*field) {
  return [field](ScenarioConfig& c, const std::string& k, const std::string& v) { c.*field = parse_number(k, v); };
}

Setter range_part(Range ScenarioConfig::*field, int part) {
  return [field, part](ScenarioConfig& c, const std::string& k, const std::string& v) {
    Range& r = c.*field;
    if (part == 0) r.lo = parse_number(k, v);
    if (part == 1) r.hi = parse_number(k, v);
    if (part == 2) r.n = parse_int(k, v);
  };
}

const std::map<std::string, std::map<std::string, KeySpec>>& schema() {
  static const std::map<std::string, std::map<std::string, KeySpec>> s = [] {
    std::map<std::string, std::map<std::string, KeySpec>> m;
    auto wh = [](double WithinHostParams::*f) {
      return KeySpec{[f](ScenarioConfig& c, const std::string& k, const std::string& v) {
                       c.within_host.*f = parse_number(k, v);
                     },
                     true};
    };
    m["within_host"] = {{"a1", wh(&WithinHostParams::a1)}, {"a2", wh(&WithinHostParams::a2)},
                        {"a3", wh(&WithinHostParams::a3)}, {"a4", wh(&WithinHostParams::a4)},
                        {"a5", wh(&WithinHostParams::a5)}, {"z0", wh(&WithinHostParams::z0)}};

    auto ep = [](double EpiParams::*f) {
      return KeySpec{[f](ScenarioConfig& c, const std::string& k, const std::string& v) { c.epi.*f = parse_number(k, v); },
                     true};
    };
    m["epi"] = {{"b", ep(&EpiParams::b)},
                {"beta_vh", ep(&EpiParams::beta_vh)},
                {"m", ep(&EpiParams::m)},
                {"mu_v", ep(&EpiParams::mu_v)},
                {"tau_h", ep(&EpiParams::tau_h)},
                {"tau_v", ep(&EpiParams::tau_v)},
                // beta_hv is resolved after parsing, together with the profile keys
                {"beta_hv", {[](ScenarioConfig&, const std::string& k, const std::string& v) { parse_number(k, v); }, true}},
                {"beta_hv_profile", {[](ScenarioConfig&, const std::string&, const std::string&) {}}},
                {"beta_hv_z_half", {[](ScenarioConfig&, const std::string& k, const std::string& v) { parse_number(k, v); }}},
                {"beta_hv_slope", {[](ScenarioConfig&, const std::string& k, const std::string& v) { parse_number(k, v); }}}};

    m["entry"] = {
        {"kind", {[](ScenarioConfig& c, const std::string&, const std::string& v) { c.entry.kind = v; }}},
        {"alpha", {[](ScenarioConfig& c, const std::string& k, const std::string& v) { c.entry.alpha = parse_number(k, v); }}},
        {"variance",
         {[](ScenarioConfig& c, const std::string& k, const std::string& v) { c.entry.variance = parse_number(k, v); }}},
        {"nodes", {[](ScenarioConfig& c, const std::string& k, const std::string& v) { c.entry.nodes = parse_list(k, v); }}},
        {"values",
         {[](ScenarioConfig& c, const std::string& k, const std::string& v) { c.entry.values = parse_list(k, v); }}}};

    m["uhr"] = {{"alpha", {number(&ScenarioConfig::uhr_alpha)}},
                {"tau1", {[](ScenarioConfig& c, const std::string& k, const std::string& v) { c.uhr_tau1 = parse_number(k, v); }}},
                {"tau2", {[](ScenarioConfig& c, const std::string& k, const std::string& v) { c.uhr_tau2 = parse_number(k, v); }}}};

    m["sim"] = {{"uhr_t_end", {number(&ScenarioConfig::uhr_t_end)}},
                {"dt", {number(&ScenarioConfig::dt)}},
                {"full_t_end", {number(&ScenarioConfig::full_t_end)}},
                {"cfl", {number(&ScenarioConfig::cfl)}},
                {"nz", {[](ScenarioConfig& c, const std::string& k, const std::string& v) { c.nz = parse_int(k, v); }}},
                {"ny", {[](ScenarioConfig& c, const std::string& k, const std::string& v) { c.ny = parse_int(k, v); }}},
                {"margin", {number(&ScenarioConfig::margin)}},
                {"run_full", {[](ScenarioConfig& c, const std::string& k, const std::string& v) { c.run_full = parse_bool(k, v); }}}};

    m["init"] = {{"uhr_history", {[](ScenarioConfig& c, const std::string&, const std::string& v) { c.uhr_history = v; }}},
                 {"uhr_E0", {number(&ScenarioConfig::uhr_E0)}},
                 {"uhr_I0", {number(&ScenarioConfig::uhr_I0)}},
                 {"uhr_R0", {number(&ScenarioConfig::uhr_R0)}},
                 {"Ev0", {number(&ScenarioConfig::Ev0)}},
                 {"Iv0", {number(&ScenarioConfig::Iv0)}},
                 {"full_E0", {number(&ScenarioConfig::full_E0)}}};

    m["output"] = {
        {"uhr_record_stride",
         {[](ScenarioConfig& c, const std::string& k, const std::string& v) { c.uhr_record_stride = parse_int(k, v); }}},
        {"full_record_interval", {number(&ScenarioConfig::full_record_interval)}},
        {"snapshots",
         {[](ScenarioConfig& c, const std::string& k, const std::string& v) { c.snapshot_times = parse_list(k, v); }}}};

    m["sweep"] = {{"a1_min", {range_part(&ScenarioConfig::a1, 0)}}, {"a1_max", {range_part(&ScenarioConfig::a1, 1)}},
                  {"a1_n", {range_part(&ScenarioConfig::a1, 2)}},   {"a3_min", {range_part(&ScenarioConfig::a3, 0)}},
                  {"a3_max", {range_part(&ScenarioConfig::a3, 1)}}, {"a3_n", {range_part(&ScenarioConfig::a3, 2)}},
                  {"a2_min", {range_part(&ScenarioConfig::a2, 0)}}, {"a2_max", {range_part(&ScenarioConfig::a2, 1)}},
                  {"a2_n", {range_part(&ScenarioConfig::a2, 2)}},   {"a4_min", {range_part(&ScenarioConfig::a4, 0)}},
                  {"a4_max", {range_part(&ScenarioConfig::a4, 1)}}, {"a4_n", {range_part(&ScenarioConfig::a4, 2)}},
                  {"alphas", {[](ScenarioConfig& c, const std::string& k, const std::string& v) { c.alphas = parse_list(k, v); }}},
                  {"threshold_n",
                   {[](ScenarioConfig& c, const std::string& k, const std::string& v) { c.threshold_n = parse_int(k, v); }}},
                  {"r0_min", {number(&ScenarioConfig::r0_min)}},
                  {"r0_max", {number(&ScenarioConfig::r0_max)}},
                  {"threshold_t_f", {number(&ScenarioConfig::threshold_t_f)}},
                  {"sample_n", {[](ScenarioConfig& c, const std::string& k, const std::string& v) { c.sample_n = parse_int(k, v); }}},
                  {"tau1_min", {number(&ScenarioConfig::tau1_min)}},
                  {"tau1_max", {number(&ScenarioConfig::tau1_max)}},
                  {"entries", {[](ScenarioConfig& c, const std::string& k, const std::string& v) { c.entries = parse_list(k, v); }}}};
    return m;
  }();
  return s;
}

void resolve_beta_hv(ScenarioConfig& c, const pt::ptree& tree) {
  const auto level = tree.get_optional<std::string>("epi.beta_hv");
  const std::string profile = tree.get<std::string>("epi.beta_hv_profile", "constant");
  const double value = level ? parse_number("epi.beta_hv", *level) : c.epi.beta_hv.level();
  if (profile == "constant") {
    c.epi.beta_hv = BetaHv::constant(value);
  } else if (profile == "logistic") {
    const auto zh = tree.get_optional<std::string>("epi.beta_hv_z_half");
    const auto sl = tree.get_optional<std::string>("epi.beta_hv_slope");
    if (!zh || !sl) throw ConfigError("logistic beta_hv needs epi.beta_hv_z_half and epi.beta_hv_slope");
    c.epi.beta_hv = BetaHv::logistic(value, parse_number("epi.beta_hv_z_half", *zh), parse_number("epi.beta_hv_slope", *sl));
  } else {
    throw ConfigError("epi.beta_hv_profile must be constant or logistic, got '" + profile + "'");
  }
}

void check(const ScenarioConfig& c) {
  auto fail = [](const std::string& m) { throw ConfigError(m); };
  try {
    require_valid(c.within_host);
    require_valid(c.epi);
  } catch (const Error& e) {
    fail(e.what());
  }
  if (c.entry.kind != "gaussian" && c.entry.kind != "dirac" && c.entry.kind != "uniform" && c.entry.kind != "tabulated") {
    fail("entry.kind must be gaussian, dirac, uniform or tabulated");
  }
  if (!(c.entry.alpha > 0.0 && c.entry.alpha < 1.0)) fail("entry.alpha must lie in (0, 1)");
  if (!(c.entry.variance > 0.0)) fail("entry.variance must be positive");
  if (!(c.uhr_alpha >= 0.0 && c.uhr_alpha < 1.0)) fail("uhr.alpha must lie in [0, 1)");
  if (c.uhr_tau1 && !(*c.uhr_tau1 > 0.0)) fail("uhr.tau1 must be positive");
  if (c.uhr_tau2 && !(*c.uhr_tau2 >= 0.0)) fail("uhr.tau2 must be non-negative");
  if (!(c.dt > 0.0) || !(c.uhr_t_end > 0.0) || !(c.full_t_end > 0.0)) fail("sim times and dt must be positive");
  if (!(c.cfl > 0.0 && c.cfl <= 1.0)) fail("sim.cfl must lie in (0, 1]");
  if (c.nz < 8 || c.ny < 8) fail("sim.nz and sim.ny must be >= 8");
  if (!(c.margin >= 0.1)) fail("sim.margin must be >= 0.1");
  if (c.uhr_history != "constant" && c.uhr_history != "totals") fail("init.uhr_history must be constant or totals");
  if (!(c.uhr_E0 >= 0.0 && c.uhr_I0 >= 0.0 && c.uhr_R0 >= 0.0 && c.full_E0 >= 0.0)) fail("initial values must be >= 0");
  if (!(c.Ev0 >= 0.0 && c.Iv0 >= 0.0 && c.Ev0 + c.Iv0 <= 1.0)) fail("init.Ev0 + init.Iv0 must lie in [0, 1]");
  if (!(c.full_E0 <= 1.0)) fail("init.full_E0 must be <= 1");
  if (!(c.full_record_interval > 0.0)) fail("output.full_record_interval must be positive");
  for (double t : c.snapshot_times) {
    if (!(t >= 0.0 && t <= c.full_t_end)) fail("output.snapshots must lie in [0, sim.full_t_end]");
  }
  for (const Range* r : {&c.a1, &c.a2, &c.a3, &c.a4}) {
    if (r->n < 1 || !(r->lo > 0.0) || !(r->hi >= r->lo)) fail("sweep axis ranges must be positive with n >= 1");
  }
  for (double a : c.alphas) {
    if (!(a > 0.0 && a < 1.0)) fail("sweep.alphas must lie in (0, 1)");
  }
  if (c.threshold_n < 2) fail("sweep.threshold_n must be >= 2");
  if (!(c.r0_min > 0.0 && c.r0_max > c.r0_min)) fail("sweep.r0_min/r0_max must satisfy 0 < min < max");
  if (!(c.threshold_t_f > 0.0)) fail("sweep.threshold_t_f must be positive");
  if (c.sample_n < 1) fail("sweep.sample_n must be >= 1");
  if (!(c.tau1_max > c.tau1_min)) fail("sweep.tau1_max must exceed sweep.tau1_min");
}

}  // namespace

ScenarioConfig default_config() {
  ScenarioConfig c;
  for (int i = 1; i <= 19; ++i) c.alphas.push_back(i / 20.0);
  const double y0 = c.within_host.y0();
  c.entries = {0.0, 0.25 * y0, 0.5 * y0, 0.75 * y0};
  return c;
}

ScenarioConfig parse_config(const std::string& text, const std::string& origin) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(origin + ":" + std::to_string(e.line()) + ": " + e.message());
  }

  // Line numbers for diagnostics; the ini reader drops them.
  std::map<std::string, int> line_of;
  {
    std::istringstream in(text);
    std::string line, section;
    for (int n = 1; std::getline(in, line); ++n) {
      const auto b = line.find_first_not_of(" \t");
      if (b == std::string::npos || line[b] == ';' || line[b] == '#') continue;
      if (line[b] == '[') {
        section = line.substr(b + 1, line.find(']') - b - 1);
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      std::string key = line.substr(b, eq - b);
      key.erase(key.find_last_not_of(" \t") + 1);
      line_of[section + "." + key] = n;
    }
  }
  auto where = [&](const std::string& full) {
    const auto it = line_of.find(full);
    return it == line_of.end() ? origin : origin + ":" + std::to_string(it->second);
  };

  ScenarioConfig c = default_config();
  const auto& sch = schema();
  for (const auto& [section, body] : tree) {
    const auto sec = sch.find(section);
    if (sec == sch.end()) throw ConfigError(origin + ": unknown section [" + section + "]");
    if (!body.data().empty() && body.empty()) throw ConfigError(where(section) + ": key outside any section");
    for (const auto& [key, value] : body) {
      const std::string full = section + "." + key;
      const auto spec = sec->second.find(key);
      if (spec == sec->second.end()) throw ConfigError(where(full) + ": unknown key '" + full + "'");
      try {
        spec->second.set(c, full, value.data());
      } catch (const ConfigError& e) {
        throw ConfigError(where(full) + ": " + e.what());
      }
    }
  }
  for (const auto& [section, keys] : sch) {
    for (const auto& [key, spec] : keys) {
      if (spec.required && !tree.get_child_optional(section + "." + key)) {
        throw ConfigError(origin + ": missing required key '" + section + "." + key + "'");
      }
    }
  }
  resolve_beta_hv(c, tree);
  if (!tree.get_child_optional("sweep.entries")) {
    const double y0 = c.within_host.y0();
    c.entries = {0.0, 0.25 * y0, 0.5 * y0, 0.75 * y0};
  }
  check(c);
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

EntryDistribution make_entry(const EntryConfig& e, double y0) {
  if (e.kind == "gaussian") return EntryDistribution::gaussian(e.alpha * y0, e.variance, y0);
  if (e.kind == "dirac") return EntryDistribution::dirac(e.alpha * y0, y0);
  if (e.kind == "uniform") return EntryDistribution::uniform(y0);
  return EntryDistribution::tabulated(e.nodes, e.values, y0);
}

}  // namespace vbd
