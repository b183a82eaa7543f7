#include "mildns/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "mildns/errors.hpp"
#include "mildns/presets.hpp"
#include "mildns/rng.hpp"
#include "mildns/snapshot.hpp"

namespace mildns {
namespace {

struct KeySpec {
  std::string key;
  std::string fallback;
  std::string accepted;  // human-readable
  std::vector<std::string> choices;  // non-empty for enumerations
};

struct SectionSpec {
  std::string name;
  std::vector<KeySpec> keys;
};

const std::vector<SectionSpec>& schema() {
  static const std::vector<SectionSpec> s = {
      {"grid", {{"dim", "2", "integer 1, 2 or 3", {}}, {"resolution", "32", "even integer >= 8, or one per axis separated by commas", {}}}},
      {"physics", {{"mu", "0.01", "positive number", {}}, {"rho_bar", "1", "positive number", {}}}},
      {"lp", {{"p", "4", "number with N < p <= 6", {}}}},
      {"time",
       {{"T", "0.1", "positive number", {}},
        {"dt", "0.001", "positive number dividing T", {}},
        {"total", "", "positive multiple of dt (empty: T)", {}}}},
      {"noise",
       {{"K", "8", "non-negative integer", {}},
        {"preset", "none", "none | eigen", {"none", "eigen"}},
        {"amplitude", "0.1", "number", {}},
        {"decay", "2", "number", {}},
        {"seed", "1", "unsigned 64-bit integer", {}},
        {"samples", "1", "positive integer", {}}}},
      {"initial",
       {{"velocity", "taylor_green", "taylor_green | random_divfree | zero | file", {"taylor_green", "random_divfree", "zero", "file"}},
        {"amplitude", "1", "number", {}},
        {"slope", "2", "number", {}},
        {"kmax", "4", "positive integer", {}},
        {"velocity_file", "", "path to a vector snapshot", {}},
        {"density", "zero", "zero | wave | random | file", {"zero", "wave", "random", "file"}},
        {"density_amplitude", "0.2", "number with |a| inside the band", {}},
        {"density_file", "", "path to a scalar snapshot", {}},
        {"density_band", "0.5", "number in (0, 1)", {}}}},
      {"picard",
       {{"tol", "1e-8", "positive number", {}},
        {"max_levels", "20", "positive integer", {}},
        {"window", "fixed", "auto | fixed", {"auto", "fixed"}},
        {"window_length", "0", "non-negative multiple of dt (0: T)", {}},
        {"M", "2", "number >= 2", {}},
        {"alpha_margin", "0.001", "number in (0, 1/2)", {}},
        {"C5", "auto", "auto | non-negative number", {}},
        {"pressure", "rho2", "rho2 | rho", {"rho2", "rho"}},
        {"nonlinear", "true", "true | false", {"true", "false"}},
        {"patience", "3", "positive integer", {}}}},
  };
  return s;
}

const SectionSpec* find_section(const std::string& name) {
  for (const auto& s : schema())
    if (s.name == name) return &s;
  return nullptr;
}

const KeySpec& find_key(const std::string& section, const std::string& key) {
  const auto* s = find_section(section);
  if (!s) {
    std::string names;
    for (const auto& x : schema()) names += (names.empty() ? "" : ", ") + x.name;
    throw ConfigError("unknown section [" + section + "]; accepted sections: " + names + ", sweep");
  }
  for (const auto& k : s->keys)
    if (k.key == key) return k;
  std::string names;
  for (const auto& k : s->keys) names += (names.empty() ? "" : ", ") + k.key;
  throw ConfigError("unknown key '" + section + "." + key + "'; accepted keys: " + names);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  const auto e = s.find_last_not_of(" \t\r\n");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, sep);) out.push_back(trim(item));
  return out;
}

[[noreturn]] void bad_value(const std::string& section, const std::string& key, const std::string& value) {
  throw ConfigError("invalid value '" + value + "' for " + section + "." + key + "; accepted: " +
                    find_key(section, key).accepted);
}

double as_double(const std::string& section, const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size() || !std::isfinite(x)) bad_value(section, key, v);
    return x;
  } catch (const std::logic_error&) {
    bad_value(section, key, v);
  }
}

long long as_int(const std::string& section, const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size()) bad_value(section, key, v);
    return x;
  } catch (const std::logic_error&) {
    bad_value(section, key, v);
  }
}

std::pair<std::string, std::string> split_dotted(const std::string& dotted) {
  const auto dot = dotted.find('.');
  if (dot == std::string::npos) throw ConfigError("expected section.key, got '" + dotted + "'");
  return {trim(dotted.substr(0, dot)), trim(dotted.substr(dot + 1))};
}

}  // namespace

std::vector<std::string> config_sections() {
  std::vector<std::string> out;
  for (const auto& s : schema()) out.push_back(s.name);
  return out;
}

std::vector<std::string> config_keys(const std::string& section) {
  std::vector<std::string> out;
  if (const auto* s = find_section(section))
    for (const auto& k : s->keys) out.push_back(k.key);
  return out;
}

RunConfig::RunConfig() {
  for (const auto& s : schema())
    for (const auto& k : s.keys) values_[s.name][k.key] = k.fallback;
}

RunConfig RunConfig::parse(const std::string& text) {
  RunConfig cfg;
  std::string section;
  std::stringstream ss(text);
  int line_no = 0;
  for (std::string line; std::getline(ss, line);) {
    ++line_no;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(line_no) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "sweep" && !find_section(section)) find_key(section, "");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    if (section.empty()) throw ConfigError("line " + std::to_string(line_no) + ": key outside any section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section == "sweep") {
      const auto [s, k] = split_dotted(key);
      if (s == "sweep") throw ConfigError("sweep axes cannot target the sweep section");
      find_key(s, k);
      cfg.sweep_.emplace_back(s + "." + k, value);
    } else {
      cfg.set(section, key, value);
    }
  }
  return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  auto cfg = parse(ss.str());
  cfg.set_base_directory(path.parent_path());
  return cfg;
}

void RunConfig::set_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override must look like section.key=value, got '" + assignment + "'");
  const auto [s, k] = split_dotted(assignment.substr(0, eq));
  set(s, k, trim(assignment.substr(eq + 1)));
}

void RunConfig::set(const std::string& section, const std::string& key, const std::string& value) {
  const auto& spec = find_key(section, key);
  if (!spec.choices.empty() && std::find(spec.choices.begin(), spec.choices.end(), value) == spec.choices.end())
    bad_value(section, key, value);
  values_[section][key] = value;
}

std::string RunConfig::get(const std::string& section, const std::string& key) const {
  find_key(section, key);
  return values_.at(section).at(key);
}

std::string RunConfig::normalized() const {
  std::ostringstream os;
  for (const auto& s : schema()) {
    os << '[' << s.name << "]\n";
    for (const auto& k : s.keys) os << k.key << " = " << values_.at(s.name).at(k.key) << '\n';
  }
  if (!sweep_.empty()) {
    os << "[sweep]\n";
    for (const auto& [k, v] : sweep_) os << k << " = " << v << '\n';
  }
  return os.str();
}

std::string RunConfig::hash() const {
  std::uint64_t h = 1469598103934665603ull;
  for (char c : normalized()) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

SolverConfig RunConfig::solver() const {
  SolverConfig c;
  c.dim = static_cast<int>(as_int("grid", "dim", get("grid", "dim")));
  c.mu = as_double("physics", "mu", get("physics", "mu"));
  c.rho_bar = as_double("physics", "rho_bar", get("physics", "rho_bar"));
  c.p = as_double("lp", "p", get("lp", "p"));
  c.horizon = as_double("time", "T", get("time", "T"));
  c.dt = as_double("time", "dt", get("time", "dt"));
  c.picard_tol = as_double("picard", "tol", get("picard", "tol"));
  c.max_levels = static_cast<int>(as_int("picard", "max_levels", get("picard", "max_levels")));
  c.window_mode = get("picard", "window") == "auto" ? WindowMode::auto_formula : WindowMode::fixed;
  c.fixed_window = as_double("picard", "window_length", get("picard", "window_length"));
  c.constant_M = as_double("picard", "M", get("picard", "M"));
  c.alpha_margin = as_double("picard", "alpha_margin", get("picard", "alpha_margin"));
  const auto c5 = get("picard", "C5");
  c.C5 = c5 == "auto" ? -1.0 : as_double("picard", "C5", c5);
  if (c5 != "auto" && c.C5 < 0.0) bad_value("picard", "C5", c5);
  c.density_band = as_double("initial", "density_band", get("initial", "density_band"));
  c.pressure_form = get("picard", "pressure") == "rho" ? PressureForm::inverse : PressureForm::inverse_square;
  c.nonlinear = get("picard", "nonlinear") == "true";
  c.divergence_patience = static_cast<int>(as_int("picard", "patience", get("picard", "patience")));
  c.validate();
  return c;
}

GridPtr RunConfig::grid() const {
  const auto dim = as_int("grid", "dim", get("grid", "dim"));
  if (dim < 1 || dim > 3) bad_value("grid", "dim", get("grid", "dim"));
  std::vector<int> res;
  for (const auto& item : split(get("grid", "resolution"), ','))
    res.push_back(static_cast<int>(as_int("grid", "resolution", item)));
  if (res.size() == 1) res.assign(static_cast<std::size_t>(dim), res.front());
  if (static_cast<long long>(res.size()) != dim)
    throw ConfigError("grid.resolution lists " + std::to_string(res.size()) + " axes for dimension " + std::to_string(dim));
  for (int m : res)
    if (m < 8 || m % 2 != 0) bad_value("grid", "resolution", get("grid", "resolution"));
  return make_grid(res);
}

InitialData RunConfig::initial(const GridPtr& grid) const {
  const auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_relative() && !base_.empty() ? base_ / path : path;
  };
  const double amp = as_double("initial", "amplitude", get("initial", "amplitude"));
  const double slope = as_double("initial", "slope", get("initial", "slope"));
  const auto kmax = as_int("initial", "kmax", get("initial", "kmax"));
  if (kmax < 1) bad_value("initial", "kmax", get("initial", "kmax"));

  const auto vel = get("initial", "velocity");
  VectorField u = VectorField::zeros(grid);
  if (vel == "taylor_green") {
    u = taylor_green(grid, amp);
  } else if (vel == "random_divfree") {
    u = amp * random_divfree(grid, seed(), substream_id("initial/velocity"), static_cast<int>(kmax), slope);
  } else if (vel == "file") {
    auto snap = read_snapshot(resolve(get("initial", "velocity_file")), grid);
    if (!std::holds_alternative<VectorField>(snap)) throw ConfigError("initial.velocity_file must hold a vector field");
    u = std::get<VectorField>(snap);
  }

  const auto den = get("initial", "density");
  const double damp = as_double("initial", "density_amplitude", get("initial", "density_amplitude"));
  ScalarField a = ScalarField::zeros(grid);
  if (den == "wave") {
    a = density_wave(grid, damp);
  } else if (den == "random") {
    a = density_random(grid, seed(), damp);
  } else if (den == "file") {
    auto snap = read_snapshot(resolve(get("initial", "density_file")), grid);
    if (!std::holds_alternative<ScalarField>(snap)) throw ConfigError("initial.density_file must hold a scalar field");
    a = std::get<ScalarField>(snap);
  }
  const double band = as_double("initial", "density_band", get("initial", "density_band"));
  if (std::max(std::abs(a.min()), std::abs(a.max())) > band)
    throw ConfigError("initial density perturbation leaves the band |a| <= " + get("initial", "density_band"));
  return InitialData{a, u};
}

NoiseModel RunConfig::noise(const GridPtr& grid) const {
  const auto k = as_int("noise", "K", get("noise", "K"));
  if (k < 0) bad_value("noise", "K", get("noise", "K"));
  const double amp = as_double("noise", "amplitude", get("noise", "amplitude"));
  const double decay = as_double("noise", "decay", get("noise", "decay"));
  if (get("noise", "preset") == "none" || k == 0) {
    NoiseModel m;
    m.seed = seed();
    m.stream_id = substream_id("noise");
    return m;
  }
  return eigenmode_noise(grid, static_cast<int>(k), amp, decay, seed());
}

double RunConfig::total_time() const {
  const auto t = get("time", "total");
  return t.empty() ? as_double("time", "T", get("time", "T")) : as_double("time", "total", t);
}

std::uint64_t RunConfig::seed() const {
  const auto v = get("noise", "seed");
  try {
    std::size_t pos = 0;
    const auto x = std::stoull(v, &pos);
    if (pos != v.size() || v.front() == '-') bad_value("noise", "seed", v);
    return x;
  } catch (const std::logic_error&) {
    bad_value("noise", "seed", v);
  }
}

int RunConfig::samples() const {
  const auto n = as_int("noise", "samples", get("noise", "samples"));
  if (n < 1) bad_value("noise", "samples", get("noise", "samples"));
  return static_cast<int>(n);
}

void RunConfig::validate() const {
  const auto cfg = solver();
  const auto g = grid();
  if (g->dim() != cfg.dim) throw ConfigError("grid.dim does not match the grid resolution list");
  const double total = total_time();
  if (!(total > 0.0)) bad_value("time", "total", get("time", "total"));
  cfg.steps_for(total);
  seed();
  samples();
  if (get("noise", "preset") == "eigen" && as_int("noise", "K", get("noise", "K")) > 0 && cfg.dim < 2)
    throw ConfigError("noise.preset = eigen needs divergence-free modes, which require dimension >= 2");
  if (get("initial", "velocity") == "taylor_green" && cfg.dim < 2)
    throw ConfigError("initial.velocity = taylor_green requires dimension >= 2");
  if (get("initial", "velocity") == "random_divfree" && cfg.dim < 2)
    throw ConfigError("initial.velocity = random_divfree requires dimension >= 2");
}

std::vector<std::pair<RunConfig, std::vector<std::string>>> RunConfig::sweep_cells() const {
  std::vector<std::pair<RunConfig, std::vector<std::string>>> cells;
  RunConfig base = *this;
  base.sweep_.clear();
  cells.emplace_back(base, std::vector<std::string>{});
  for (const auto& [dotted, list] : sweep_) {
    const auto [s, k] = split_dotted(dotted);
    std::vector<std::pair<RunConfig, std::vector<std::string>>> next;
    for (const auto& [cfg, assigned] : cells) {
      for (const auto& value : split(list, ',')) {
        RunConfig c = cfg;
        c.set(s, k, value);
        auto a = assigned;
        a.push_back(dotted + "=" + value);
        next.emplace_back(std::move(c), std::move(a));
      }
    }
    cells = std::move(next);
  }
  return cells;
}

}  // namespace mildns
