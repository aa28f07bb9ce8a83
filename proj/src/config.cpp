#include "eddydg/cli.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>
#include <sstream>

namespace eddydg {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

const std::set<std::string> kKnownKeys = {
    "run.mode",          "run.mesh",       "run.cut",         "run.degree",       "run.mms",
    "run.current",       "run.levels",     "run.eoc_min",     "run.output",       "run.seed",
    "run.samples",       "run.vtk",        "materials.omega", "materials.mu0",    "materials.mu",
    "materials.sigma",   "penalties.a_c",  "penalties.a_i",   "penalties.alpha",  "penalties.scale"};

bool known(const std::string& key) {
  if (kKnownKeys.count(key)) return true;
  return key.rfind("materials.mu.", 0) == 0 || key.rfind("materials.sigma.", 0) == 0;
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const char* b = v.data();
  const auto [p, ec] = std::from_chars(b, b + v.size(), out);
  if (ec != std::errc() || p != b + v.size()) throw ConfigError(key + ": not a number: '" + v + "'");
  return out;
}

long to_int(const std::string& key, const std::string& v) {
  long out = 0;
  const char* b = v.data();
  const auto [p, ec] = std::from_chars(b, b + v.size(), out);
  if (ec != std::errc() || p != b + v.size()) throw ConfigError(key + ": not an integer: '" + v + "'");
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep))
    if (!trim(item).empty()) out.push_back(trim(item));
  return out;
}

}  // namespace

ConfigTable parse_config_text(const std::string& text) {
  ConfigTable table;
  std::string section = "run";
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
      section = lower(trim(line.substr(1, line.size() - 2)));
      if (section != "run" && section != "materials" && section != "penalties")
        throw ConfigError("line " + std::to_string(lineno) + ": unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = section + "." + lower(trim(line.substr(0, eq)));
    if (!known(key)) throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    table[key] = trim(line.substr(eq + 1));
  }
  return table;
}

void apply_overrides(ConfigTable& table, const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string a = args[i];
    if (a.rfind("--", 0) != 0) throw ConfigError("unexpected argument '" + a + "'");
    a = lower(a.substr(2));
    std::string value;
    const auto eq = a.find('=');
    if (eq != std::string::npos) {
      value = args[i].substr(2 + eq + 1);
      a = a.substr(0, eq);
    } else {
      if (i + 1 >= args.size()) throw ConfigError("missing value for --" + a);
      value = args[++i];
    }
    std::string key;
    if (a.find('.') != std::string::npos && known(a)) {
      key = a;
    } else {
      for (const char* sec : {"run.", "materials.", "penalties."})
        if (known(sec + a)) {
          if (!key.empty()) throw ConfigError("ambiguous option --" + a);
          key = sec + a;
        }
      if (key.empty()) {
        for (const char* sec : {"materials."})
          if (known(sec + a)) key = sec + a;
      }
    }
    if (key.empty()) throw ConfigError("unknown option --" + a);
    table[key] = value;
  }
}

RunConfig make_run_config(const ConfigTable& table) {
  RunConfig c;
  auto get = [&](const std::string& k) -> const std::string* {
    auto it = table.find(k);
    return it == table.end() ? nullptr : &it->second;
  };
  if (auto v = get("run.mode")) {
    const std::string m = lower(*v);
    if (m == "solve") c.mode = RunMode::Solve;
    else if (m == "verify") c.mode = RunMode::Verify;
    else if (m == "convergence") c.mode = RunMode::Convergence;
    else throw ConfigError("run.mode: unknown mode '" + *v + "'");
  }
  if (auto v = get("run.mesh")) c.mesh = *v;
  if (auto v = get("run.cut")) c.cut = *v;
  if (auto v = get("run.degree")) {
    c.degree = static_cast<int>(to_int("run.degree", *v));
    if (c.degree < 1 || c.degree > 3) throw ConfigError("run.degree must be 1, 2 or 3");
  }
  if (auto v = get("run.mms")) {
    c.mms = *v;
    static const std::set<std::string> names = {"zero", "gradient_pair", "polynomial_pair", "windowed", "torus_k", ""};
    if (!names.count(c.mms)) throw ConfigError("run.mms: unknown exact solution '" + c.mms + "'");
  }
  if (auto v = get("run.current")) {
    const auto parts = split(*v, ',');
    if (parts.size() != 3) throw ConfigError("run.current needs three comma-separated components");
    for (int i = 0; i < 3; ++i) c.current[i] = to_double("run.current", parts[i]);
  }
  if (auto v = get("run.levels")) c.levels = split(*v, ',');
  if (auto v = get("run.eoc_min")) c.eoc_min = to_double("run.eoc_min", *v);
  if (auto v = get("run.output")) c.output = *v;
  if (auto v = get("run.seed")) c.seed = static_cast<std::uint64_t>(to_int("run.seed", *v));
  if (auto v = get("run.samples")) {
    c.samples = static_cast<int>(to_int("run.samples", *v));
    if (c.samples < 1) throw ConfigError("run.samples must be positive");
  }
  if (auto v = get("run.vtk")) {
    const std::string b = lower(*v);
    if (b != "true" && b != "false" && b != "1" && b != "0") throw ConfigError("run.vtk must be true or false");
    c.vtk = b == "true" || b == "1";
  }

  auto& mat = c.materials;
  if (auto v = get("materials.omega")) mat.omega = to_double("materials.omega", *v);
  if (auto v = get("materials.mu0")) mat.mu0 = to_double("materials.mu0", *v);
  if (auto v = get("materials.mu")) mat.default_mu = to_double("materials.mu", *v);
  if (auto v = get("materials.sigma")) mat.default_sigma = to_double("materials.sigma", *v);
  for (const auto& [k, v] : table) {
    if (k.rfind("materials.mu.", 0) == 0)
      mat.mu[static_cast<int>(to_int(k, k.substr(13)))] = to_double(k, v);
    else if (k.rfind("materials.sigma.", 0) == 0)
      mat.sigma[static_cast<int>(to_int(k, k.substr(16)))] = to_double(k, v);
  }
  try {
    mat.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("materials.") + e.what());
  }

  c.penalties = PenaltyConfig::defaults(c.degree);
  if (auto v = get("penalties.a_c")) c.penalties.a_C = to_double("penalties.a_C", *v), c.penalties_set = true;
  if (auto v = get("penalties.a_i")) c.penalties.a_I = to_double("penalties.a_I", *v), c.penalties_set = true;
  if (auto v = get("penalties.alpha")) c.penalties.alpha = to_double("penalties.alpha", *v), c.penalties_set = true;
  if (auto v = get("penalties.scale")) c.penalties = c.penalties.scaled(to_double("penalties.scale", *v));
  try {
    c.penalties.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("penalties.") + e.what());
  }
  if (c.mode == RunMode::Convergence && c.levels.size() < 2)
    throw ConfigError("run.levels needs at least two mesh specs in convergence mode");
  if (c.mode == RunMode::Convergence && c.mms.empty()) throw ConfigError("run.mms is required in convergence mode");
  return c;
}

}  // namespace eddydg
