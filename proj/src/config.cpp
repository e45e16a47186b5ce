#include "spinsq/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "spinsq/error.hpp"

namespace spinsq {

namespace pt = boost::property_tree;

std::uint64_t fnv1a(const std::string &text, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trim(const std::string &s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string &s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string &s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (trim(s.substr(used)).size()) throw std::invalid_argument(s);
  return v;
}

long long to_integer(const std::string &s) {
  std::size_t used = 0;
  const long long v = std::stoll(s, &used);
  if (trim(s.substr(used)).size()) throw std::invalid_argument(s);
  return v;
}

template <typename Seq>
std::string join(const Seq &items) {
  std::string out;
  for (const auto &x : items) {
    if (!out.empty()) out += ",";
    if constexpr (std::is_same_v<std::decay_t<decltype(x)>, double>)
      out += fmt(x);
    else
      out += std::to_string(x);
  }
  return out;
}

struct Field {
  std::string key;  // section.name
  std::function<void(const std::string &)> set;
  std::function<std::string()> get;
};

Field real(const std::string &key, double &ref) {
  return {key, [&ref](const std::string &s) { ref = to_double(s); },
          [&ref] { return fmt(ref); }};
}

template <typename Int>
Field integer(const std::string &key, Int &ref) {
  return {key, [&ref](const std::string &s) { ref = static_cast<Int>(to_integer(s)); },
          [&ref] { return std::to_string(ref); }};
}

std::vector<Field> scenario_fields(const std::string &name, LossScenario &s) {
  const std::string p = "scenario." + name + ".";
  return {
      {p + "label", [&s](const std::string &v) { s.label = v; }, [&s] { return s.label; }},
      real(p + "K2_a", s.K2_a),
      real(p + "K2_b", s.K2_b),
      real(p + "K2_ab", s.K2_ab),
      real(p + "K3_a", s.K3_a),
      real(p + "K3_b", s.K3_b),
  };
}

// Mass and constants are read in convenient units and stored in SI.
struct SetupProxy {
  double mass_amu = 86.909;
  double wavelength = 830e-9;
};

std::vector<Field> fields(ScenarioConfig &c, SetupProxy &proxy) {
  auto &s = c.setup;
  auto &r = c.run;
  return {
      real("setup.mass_amu", proxy.mass_amu),
      real("setup.wavelength_m", proxy.wavelength),
      real("setup.a_aa", s.a_aa),
      real("setup.a_bb", s.a_bb),
      real("setup.a_ab", s.a_ab),
      integer("setup.coordination", s.coordination),
      real("setup.hbar", s.constants.hbar),
      real("setup.bohr_m", s.constants.bohr),
      real("setup.amu_kg", s.constants.amu),
      integer("lattice.plane_waves", c.lattice.plane_waves),
      integer("lattice.quasi_momenta", c.lattice.quasi_momenta),
      integer("lattice.points_per_site", c.lattice.points_per_site),
      real("lattice.min_depth", c.lattice.min_depth),
      integer("gutzwiller.n_max", c.gutzwiller.n_max),
      real("gutzwiller.tol", c.gutzwiller.tol),
      integer("gutzwiller.max_iter", c.gutzwiller.max_iter),
      integer("gutzwiller.random_starts", c.gutzwiller.random_starts),
      integer("gutzwiller.seed", c.gutzwiller.seed),
      integer("run.N", r.N),
      real("run.v_init", r.v_init),
      {"run.v_c",
       [&r](const std::string &v) {
         if (trim(v) == "auto")
           r.v_c.reset();
         else
           r.v_c = to_double(v);
       },
       [&r] { return r.v_c ? fmt(*r.v_c) : std::string("auto"); }},
      integer("run.depth_points", r.depth_points),
      integer("run.time_intervals", r.time_intervals),
      real("run.overshoot", r.overshoot),
      real("run.vc_tol", r.vc_tol),
      {"run.sweep_N",
       [&r](const std::string &v) {
         r.sweep_N.clear();
         for (const auto &x : split_list(v)) r.sweep_N.push_back(static_cast<int>(to_integer(x)));
       },
       [&r] { return join(r.sweep_N); }},
      integer("run.table_points", r.table_points),
      integer("adiabatic.N", c.adiabatic.N),
      integer("adiabatic.excitation_N", c.adiabatic.excitation_N),
      {"adiabatic.tau_factors",
       [&c](const std::string &v) {
         c.adiabatic.tau_factors.clear();
         for (const auto &x : split_list(v)) c.adiabatic.tau_factors.push_back(to_double(x));
       },
       [&c] { return join(c.adiabatic.tau_factors); }},
      real("losses.N_min", c.losses.N_min),
      {"losses.exact_reference",
       [&c](const std::string &v) {
         if (v == "true" || v == "1")
           c.losses.exact_reference = true;
         else if (v == "false" || v == "0")
           c.losses.exact_reference = false;
         else
           throw std::invalid_argument(v);
       },
       [&c] { return std::string(c.losses.exact_reference ? "true" : "false"); }},
      real("losses.N_max", c.losses.N_max),
      integer("losses.N_points", c.losses.N_points),
      real("output.grid_scale", c.output.grid_scale),
      {"output.dir", [&c](const std::string &v) { c.output.dir = v; },
       [&c] { return c.output.dir; }},
      {"output.cache", [&c](const std::string &v) { c.output.cache = v; },
       [&c] { return c.output.cache; }},
      integer("output.jobs", c.output.jobs),
  };
}

std::vector<std::string> builtin_scenario_names() { return {"a", "b"}; }

LossScenario builtin_scenario(const std::string &name) {
  if (name == "a") return two_body_scenario();
  if (name == "b") return three_body_scenario();
  LossScenario s;
  s.name = name;
  s.label = name;
  return s;
}

void validate(const ScenarioConfig &c) {
  c.setup.validate();
  auto check = [](bool ok, const std::string &field, const std::string &why) {
    if (!ok) fail(ErrorKind::Config, "invalid " + field + ": " + why);
  };
  check(c.lattice.plane_waves >= 11 && c.lattice.plane_waves % 2 == 1,
        "lattice.plane_waves", "must be odd and >= 11");
  check(c.lattice.quasi_momenta >= 8, "lattice.quasi_momenta", "must be >= 8");
  check(c.lattice.points_per_site >= 16, "lattice.points_per_site", "must be >= 16");
  check(c.gutzwiller.n_max >= 2, "gutzwiller.n_max", "must be >= 2");
  check(c.gutzwiller.tol > 0, "gutzwiller.tol", "must be positive");
  check(c.gutzwiller.max_iter > 0, "gutzwiller.max_iter", "must be positive");
  check(c.gutzwiller.random_starts >= 0, "gutzwiller.random_starts", "must be >= 0");
  check(c.run.N >= 8, "run.N", "must be >= 8");
  check(c.run.v_init >= c.lattice.min_depth, "run.v_init",
        "must be >= lattice.min_depth");
  check(!c.run.v_c || *c.run.v_c > c.run.v_init, "run.v_c", "must exceed run.v_init");
  check(c.run.depth_points >= 8, "run.depth_points", "must be >= 8");
  check(c.run.time_intervals >= 4, "run.time_intervals", "must be >= 4");
  check(c.run.overshoot >= 1.0, "run.overshoot", "must be >= 1");
  check(c.run.vc_tol > 0, "run.vc_tol", "must be positive");
  check(!c.run.sweep_N.empty(), "run.sweep_N", "must list at least one N");
  for (int n : c.run.sweep_N) check(n >= 8, "run.sweep_N", "entries must be >= 8");
  check(c.run.table_points >= 8, "run.table_points", "must be >= 8");
  check(c.adiabatic.N >= 8, "adiabatic.N", "must be >= 8");
  check(c.adiabatic.excitation_N == 0 || c.adiabatic.excitation_N >= 8,
        "adiabatic.excitation_N", "must be 0 (off) or >= 8");
  for (double f : c.adiabatic.tau_factors)
    check(f > 0, "adiabatic.tau_factors", "entries must be positive");
  check(c.losses.N_min >= 2 && c.losses.N_max > c.losses.N_min, "losses.N_min/N_max",
        "need 2 <= N_min < N_max");
  check(c.losses.N_points >= 2, "losses.N_points", "must be >= 2");
  for (const auto &s : c.losses.scenarios) {
    check(!s.name.empty() && s.name.find_first_of(" /\\") == std::string::npos,
          "losses.scenarios", "names must be non-empty without spaces or slashes");
    try {
      s.validate();
    } catch (const Error &e) {
      fail(ErrorKind::Config, "scenario " + s.label + ": " + e.what());
    }
  }
  check(c.output.jobs >= 1, "output.jobs", "must be >= 1");
  check(c.output.grid_scale > 0, "output.grid_scale", "must be positive");
}

// Line numbers of "section.key" entries, for diagnostics.
std::map<std::string, int> key_lines(const std::string &text) {
  std::map<std::string, int> out;
  std::istringstream in(text);
  std::string line, section;
  for (int no = 1; std::getline(in, line); ++no) {
    const auto t = trim(line);
    if (t.empty() || t[0] == ';' || t[0] == '#') continue;
    if (t.front() == '[' && t.back() == ']') {
      section = trim(t.substr(1, t.size() - 2));
      out.emplace(section, no);
      continue;
    }
    const auto eq = t.find('=');
    if (eq != std::string::npos) out.emplace(section + "." + trim(t.substr(0, eq)), no);
  }
  return out;
}

}  // namespace

int ScenarioConfig::depth_points() const {
  return std::max(8, static_cast<int>(std::lround(run.depth_points * output.grid_scale)));
}

int ScenarioConfig::time_intervals() const {
  return std::max(4, static_cast<int>(std::lround(run.time_intervals * output.grid_scale)));
}

int ScenarioConfig::loss_points() const {
  return std::max(2, static_cast<int>(std::lround(losses.N_points * output.grid_scale)));
}

std::string ScenarioConfig::hash() const {
  std::string text;
  for (const auto &[k, v] : echo)
    if (k != "output.dir" && k != "output.cache" && k != "output.jobs")
      text += k + "=" + v + "\n";
  return hex64(fnv1a(text));
}

void refresh_echo(ScenarioConfig &config) {
  SetupProxy proxy{config.setup.mass / config.setup.constants.amu, config.setup.wavelength};
  config.echo.clear();
  for (const auto &f : fields(config, proxy)) config.echo.emplace_back(f.key, f.get());
  std::string names;
  for (auto &s : config.losses.scenarios) {
    names += (names.empty() ? "" : ",") + s.name;
    for (const auto &f : scenario_fields(s.name, s)) config.echo.emplace_back(f.key, f.get());
  }
  config.echo.emplace_back("losses.scenarios", names);
}

ScenarioConfig default_config() {
  ScenarioConfig c;
  refresh_echo(c);
  for (const auto &[k, v] : c.echo) c.defaulted.push_back(k);
  return c;
}

ScenarioConfig parse_config(std::istream &in, const std::string &source) {
  const std::string text{std::istreambuf_iterator<char>(in), {}};
  const auto lines = key_lines(text);
  auto where = [&](const std::string &key) {
    const auto it = lines.find(key);
    return source + (it != lines.end() ? ":" + std::to_string(it->second) : "");
  };

  pt::ptree tree;
  try {
    std::istringstream s(text);
    pt::read_ini(s, tree);
  } catch (const pt::ini_parser_error &e) {
    fail(ErrorKind::Config, source + ":" + std::to_string(e.line()) + ": " + e.message());
  }

  ScenarioConfig c;
  SetupProxy proxy;
  auto table = fields(c, proxy);
  std::map<std::string, Field *> by_key;
  for (auto &f : table) by_key[f.key] = &f;
  std::set<std::string> seen;

  auto apply = [&](Field &f, const std::string &value) {
    try {
      f.set(trim(value));
    } catch (const std::exception &) {
      fail(ErrorKind::Config,
           where(f.key) + ": cannot parse '" + value + "' for field " + f.key);
    }
    seen.insert(f.key);
  };

  std::vector<std::string> names = builtin_scenario_names();
  std::map<std::string, LossScenario> scenarios;
  for (const auto &n : names) scenarios[n] = builtin_scenario(n);

  for (const auto &[section, body] : tree) {
    if (section.rfind("scenario.", 0) == 0) {
      const std::string name = section.substr(9);
      auto &s = scenarios.try_emplace(name, builtin_scenario(name)).first->second;
      auto sf = scenario_fields(name, s);
      for (const auto &[key, value] : body) {
        const std::string full = section + "." + key;
        auto it = std::find_if(sf.begin(), sf.end(), [&](auto &f) { return f.key == full; });
        if (it == sf.end()) fail(ErrorKind::Config, where(full) + ": unknown field " + full);
        apply(*it, value.data());
      }
      continue;
    }
    if (section == "losses") {
      if (auto list = body.get_optional<std::string>("scenarios")) {
        names = split_list(*list);
        seen.insert("losses.scenarios");
      }
    }
    if (body.empty() && !body.data().empty())
      fail(ErrorKind::Config, where(section) + ": key outside any section: " + section);
    for (const auto &[key, value] : body) {
      const std::string full = section + "." + key;
      if (full == "losses.scenarios") continue;
      auto it = by_key.find(full);
      if (it == by_key.end()) fail(ErrorKind::Config, where(full) + ": unknown field " + full);
      apply(*it->second, value.data());
    }
  }

  c.setup.mass = proxy.mass_amu * c.setup.constants.amu;
  c.setup.wavelength = proxy.wavelength;
  c.losses.scenarios.clear();
  for (const auto &n : names) {
    auto it = scenarios.find(n);
    if (it == scenarios.end())
      fail(ErrorKind::Config, where("losses.scenarios") + ": unknown scenario " + n);
    c.losses.scenarios.push_back(it->second);
  }

  try {
    validate(c);
  } catch (const Error &e) {
    fail(ErrorKind::Config, source + ": " + e.what());
  }
  refresh_echo(c);
  for (const auto &[k, v] : c.echo)
    if (!seen.count(k) && k.rfind("scenario.", 0) != 0) c.defaulted.push_back(k);
  return c;
}

ScenarioConfig load_config(const std::string &path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Config, "cannot open config file " + path);
  return parse_config(in, path);
}

}  // namespace spinsq
