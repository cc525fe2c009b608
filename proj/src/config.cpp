#include "ezegm/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "ezegm/errors.hpp"

namespace ezegm {

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "beta",          "r",          "gamma",     "rho",       "eis",
      "persistence",   "innovation_sd", "n_states", "width",    "n_m",
      "n_a",           "m_max_multiple", "curvature", "conv_tol", "max_iters",
      "howard_k",      "seed"};
  return keys;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

double to_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double out = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return out;
  } catch (const std::exception&) {
    throw InvalidArgument("config: bad numeric value for '" + key + "': " + value);
  }
}

long to_long(const std::string& key, const std::string& value) {
  const double d = to_double(key, value);
  const long l = static_cast<long>(d);
  if (double(l) != d) throw InvalidArgument("config: '" + key + "' must be an integer");
  return l;
}

void apply_env_overrides(std::map<std::string, std::string>& entries) {
  for (const auto& key : known_keys()) {
    std::string env_name = kEnvPrefix + key;
    std::transform(env_name.begin(), env_name.end(), env_name.begin(),
                   [](unsigned char c) { return std::toupper(c); });
    if (const char* value = std::getenv(env_name.c_str())) entries[key] = value;
  }
}

}  // namespace

std::map<std::string, std::string> parse_config_file(const std::string& path) {
  std::map<std::string, std::string> entries;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("config: cannot open " + path);
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw InvalidArgument("config: expected 'key = value' at " + path + ":" +
                              std::to_string(line_no));
      const std::string key = lower(trim(line.substr(0, eq)));
      const std::string value = trim(line.substr(eq + 1));
      if (!known_keys().count(key))
        throw InvalidArgument("config: unknown key '" + key + "' at " + path + ":" +
                              std::to_string(line_no));
      entries[key] = value;
    }
  }
  apply_env_overrides(entries);
  return entries;
}

Calibration calibration_from(const std::map<std::string, std::string>& entries) {
  Calibration cal;
  const auto get = [&](const char* key) -> const std::string* {
    const auto it = entries.find(key);
    return it == entries.end() ? nullptr : &it->second;
  };

  if (const auto* v = get("beta")) cal.params.beta = to_double("beta", *v);
  if (const auto* v = get("r")) cal.params.R = to_double("r", *v);
  if (const auto* v = get("gamma")) cal.params.gamma = to_double("gamma", *v);
  if (const auto* v = get("rho")) {
    cal.params.rho = to_double("rho", *v);
  } else if (const auto* e = get("eis")) {
    const double eis = to_double("eis", *e);
    if (!(eis > 0.0)) throw InvalidArgument("config: eis must be positive");
    cal.params.rho = 1.0 / eis;
  }
  if (const auto* v = get("conv_tol")) cal.params.conv_tol = to_double("conv_tol", *v);
  if (const auto* v = get("max_iters")) cal.params.max_iters = to_long("max_iters", *v);
  if (const auto* v = get("persistence")) cal.persistence = to_double("persistence", *v);
  if (const auto* v = get("innovation_sd")) cal.innovation_sd = to_double("innovation_sd", *v);
  if (const auto* v = get("n_states")) cal.n_states = to_long("n_states", *v);
  if (const auto* v = get("width")) cal.width = to_double("width", *v);
  if (const auto* v = get("n_m")) cal.n_m = to_long("n_m", *v);
  if (const auto* v = get("n_a")) cal.n_a = to_long("n_a", *v);
  if (const auto* v = get("m_max_multiple")) cal.m_max_multiple = to_double("m_max_multiple", *v);
  if (const auto* v = get("curvature")) cal.curvature = to_double("curvature", *v);
  if (const auto* v = get("howard_k")) cal.howard_k = to_long("howard_k", *v);
  if (const auto* v = get("seed")) cal.seed = std::stoull(*v);

  validate(cal.params);
  return cal;
}

Calibration load_calibration(const std::string& path) {
  return calibration_from(parse_config_file(path));
}

Model build_model(const Calibration& cal) {
  IncomeProcess income = tauchen(cal.persistence, cal.innovation_sd, cal.n_states, cal.width);
  Grids grids = build_grids(cal.n_m, cal.n_a, cal.m_max_multiple, cal.curvature, income);
  return make_model(cal.params, std::move(income), std::move(grids));
}

}  // namespace ezegm
