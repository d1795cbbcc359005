#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>

#include "biharm/cli.hpp"

namespace biharm::cli {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

real parse_real(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  real out = 0;
  try {
    out = std::stold(v, &used);
  } catch (const std::exception&) {
    throw ConfigError("config: '" + key + "' expects a number, got '" + v + "'");
  }
  if (used != v.size() || !std::isfinite(out))
    throw ConfigError("config: '" + key + "' expects a finite number, got '" + v + "'");
  return out;
}

long long parse_int(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long long out = 0;
  try {
    out = std::stoll(v, &used);
  } catch (const std::exception&) {
    throw ConfigError("config: '" + key + "' expects an integer, got '" + v + "'");
  }
  if (used != v.size()) throw ConfigError("config: '" + key + "' expects an integer, got '" + v + "'");
  return out;
}

std::vector<real> parse_list(const std::string& key, const std::string& v) {
  std::vector<real> out;
  std::istringstream is(v);
  std::string item;
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(parse_real(key, item));
  }
  return out;
}

std::size_t positive_count(const std::string& key, const std::string& v) {
  const long long n = parse_int(key, v);
  if (n < 1) throw ConfigError("config: '" + key + "' must be at least 1");
  return static_cast<std::size_t>(n);
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table{
      {"a", [](RunConfig& c, auto& k, auto& v) { c.width = parse_real(k, v); }},
      {"b", [](RunConfig& c, auto& k, auto& v) { c.height = parse_real(k, v); }},
      {"nx", [](RunConfig& c, auto& k, auto& v) { c.nx = positive_count(k, v); }},
      {"ny", [](RunConfig& c, auto& k, auto& v) { c.ny = positive_count(k, v); }},
      {"N", [](RunConfig& c, auto& k, auto& v) { c.dimension = static_cast<int>(parse_int(k, v)); }},
      {"p", [](RunConfig& c, auto& k, auto& v) { c.p = parse_real(k, v); }},
      {"r", [](RunConfig& c, auto& k, auto& v) { c.r = parse_real(k, v); }},
      {"forcing",
       [](RunConfig& c, auto& k, auto& v) {
         if (v == "eigen_power") c.forcing = ForcingKind::eigen_power;
         else if (v == "file") c.forcing = ForcingKind::file;
         else throw ConfigError("config: '" + k + "' must be eigen_power or file");
       }},
      {"c", [](RunConfig& c, auto& k, auto& v) { c.c = parse_real(k, v); }},
      {"forcing_file", [](RunConfig& c, auto&, auto& v) { c.forcing_file = v; }},
      {"linear_tol", [](RunConfig& c, auto& k, auto& v) { c.linear_tol = parse_real(k, v); }},
      {"newton_tol", [](RunConfig& c, auto& k, auto& v) { c.newton_tol = parse_real(k, v); }},
      {"newton_max_iter",
       [](RunConfig& c, auto& k, auto& v) { c.newton_max_iter = static_cast<int>(positive_count(k, v)); }},
      {"continuation_steps",
       [](RunConfig& c, auto& k, auto& v) { c.continuation_steps = static_cast<int>(parse_int(k, v)); }},
      {"t_ref", [](RunConfig& c, auto& k, auto& v) { c.t_ref = parse_real(k, v); }},
      {"eigen_tol", [](RunConfig& c, auto& k, auto& v) { c.eigen_tol = parse_real(k, v); }},
      {"eig_count", [](RunConfig& c, auto& k, auto& v) { c.eig_count = static_cast<int>(positive_count(k, v)); }},
      {"p_grid", [](RunConfig& c, auto& k, auto& v) { c.p_grid = parse_list(k, v); }},
      {"c_grid", [](RunConfig& c, auto& k, auto& v) { c.c_grid = parse_list(k, v); }},
      {"samples", [](RunConfig& c, auto& k, auto& v) { c.samples = static_cast<int>(parse_int(k, v)); }},
      {"out", [](RunConfig& c, auto&, auto& v) { c.out_dir = v; }},
      {"seed",
       [](RunConfig& c, auto& k, auto& v) {
         try {
           std::size_t used = 0;
           c.seed = std::stoull(v, &used);
           if (used != v.size()) throw std::invalid_argument(v);
         } catch (const std::exception&) {
           throw ConfigError("config: '" + k + "' expects an unsigned integer");
         }
       }},
  };
  return table;
}

}  // namespace

RunConfig parse_config(std::istream& is) {
  RunConfig config;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    it->second(config, key, value);
  }
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  return parse_config(in);
}

void validate(const RunConfig& c) {
  if (!(c.width > 0) || !(c.height > 0)) throw ConfigError("config: a and b must be positive");
  if (!(c.linear_tol > 0) || !(c.newton_tol > 0) || !(c.eigen_tol > 0))
    throw ConfigError("config: tolerances must be positive");
  if (!(c.t_ref > 0)) throw ConfigError("config: t_ref must be positive");
  if (c.continuation_steps < 1) throw ConfigError("config: continuation_steps must be at least 1");
  if (c.forcing == ForcingKind::file) {
    if (c.forcing_file.empty()) throw ConfigError("config: forcing = file needs forcing_file");
    if (!std::ifstream(c.forcing_file)) throw ConfigError("config: cannot open forcing_file '" + c.forcing_file + "'");
  }
}

std::string describe(const RunConfig& c) {
  std::ostringstream os;
  os << std::setprecision(17);
  auto list = [&](const std::vector<real>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
      std::ostringstream item;
      item << std::setprecision(17) << static_cast<double>(v[i]);
      s += (i ? "," : "") + item.str();
    }
    return s;
  };
  os << "a=" << static_cast<double>(c.width) << " b=" << static_cast<double>(c.height) << " nx=" << c.nx
     << " ny=" << c.ny << " N=" << c.dimension << " p=" << static_cast<double>(c.p)
     << " r=" << static_cast<double>(c.r)
     << " forcing=" << (c.forcing == ForcingKind::eigen_power ? "eigen_power" : "file")
     << " c=" << static_cast<double>(c.c) << " forcing_file=" << c.forcing_file
     << " linear_tol=" << static_cast<double>(c.linear_tol) << " newton_tol=" << static_cast<double>(c.newton_tol)
     << " newton_max_iter=" << c.newton_max_iter << " continuation_steps=" << c.continuation_steps
     << " t_ref=" << static_cast<double>(c.t_ref) << " eigen_tol=" << static_cast<double>(c.eigen_tol)
     << " eig_count=" << c.eig_count << " p_grid=" << (c.p_grid ? list(*c.p_grid) : std::string("auto"))
     << " c_grid=" << list(c.c_grid) << " samples=" << c.samples << " out=" << c.out_dir << " seed=" << c.seed;
  return os.str();
}

}  // namespace biharm::cli
