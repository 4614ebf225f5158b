#ifndef WCS_IO_HPP
#define WCS_IO_HPP

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "wcs/config.hpp"

namespace wcs {

// 17 significant digits: round-trips doubles exactly and keeps CSV stable.
inline std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

namespace detail {

inline std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline std::vector<double> parse_double_list(const std::string& text,
                                             const std::string& field) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      size_t pos = 0;
      out.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(field, "cannot parse '" + item + "' as a number");
    }
  }
  return out;
}

}  // namespace detail

// Apply one "key = value" assignment to a config.
inline void apply_setting(NetworkConfig& cfg, const std::string& key,
                          const std::string& value) {
  auto as_int = [&](const char* f) {
    try {
      size_t pos = 0;
      int v = std::stoi(value, &pos);
      if (pos != value.size()) throw std::invalid_argument(value);
      return v;
    } catch (const std::exception&) {
      throw ConfigError(f, "cannot parse '" + value + "' as an integer");
    }
  };
  auto as_double = [&](const char* f) {
    try {
      size_t pos = 0;
      double v = std::stod(value, &pos);
      if (pos != value.size()) throw std::invalid_argument(value);
      return v;
    } catch (const std::exception&) {
      throw ConfigError(f, "cannot parse '" + value + "' as a number");
    }
  };
  if (key == "n") cfg.n = as_int("n");
  else if (key == "m") cfg.m = as_int("m");
  else if (key == "S") cfg.S = as_double("S");
  else if (key == "v") cfg.v = as_double("v");
  else if (key == "q") cfg.q = as_double("q");
  else if (key == "u") cfg.u = as_int("u");
  else if (key == "L") cfg.L = as_int("L");
  else if (key == "E") cfg.E = as_int("E");
  else if (key == "M") cfg.M = as_int("M");
  else if (key == "radii") cfg.radii = detail::parse_double_list(value, "radii");
  else if (key == "seed") {
    try {
      cfg.seed = std::stoull(value);
    } catch (const std::exception&) {
      throw ConfigError("seed", "cannot parse '" + value + "' as an integer");
    }
  } else {
    throw ConfigError(key, "unknown configuration key");
  }
}

// Key/value scenario file: one "key = value" per line, '#' comments.
inline NetworkConfig parse_config_text(const std::string& text,
                                       NetworkConfig base = default_config()) {
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno),
                        "expected 'key = value', got '" + line + "'");
    std::string key = detail::trim(line.substr(0, eq));
    std::string value = detail::trim(line.substr(eq + 1));
    apply_setting(base, key, value);
  }
  return base;
}

inline NetworkConfig load_config_file(const std::string& path,
                                      NetworkConfig base = default_config()) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), base);
}

inline std::string config_to_text(const NetworkConfig& cfg) {
  std::ostringstream out;
  out << "n = " << cfg.n << "\n"
      << "m = " << cfg.m << "\n"
      << "S = " << fmt17(cfg.S) << "\n"
      << "v = " << fmt17(cfg.v) << "\n"
      << "q = " << fmt17(cfg.q) << "\n"
      << "u = " << cfg.u << "\n"
      << "L = " << cfg.L << "\n"
      << "E = " << cfg.E << "\n"
      << "radii = ";
  for (size_t i = 0; i < cfg.radii.size(); ++i) {
    if (i) out << ", ";
    out << fmt17(cfg.radii[i]);
  }
  out << "\n";
  if (cfg.M > 0) out << "M = " << cfg.M << "\n";
  out << "seed = " << cfg.seed << "\n";
  return out.str();
}

}  // namespace wcs

#endif
