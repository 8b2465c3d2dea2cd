#include "pflab/config.hpp"

#include <fstream>
#include <sstream>

#include "pflab/errors.hpp"

namespace pflab {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str(), path);
}

Config Config::parse_string(const std::string& text, const std::string& origin) {
  Config cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(origin + ":" + std::to_string(lineno) +
                          ": malformed section header: " + line);
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) +
                        ": expected key = value, got: " + line);
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
    cfg.sections_[section][key] = value;
  }
  return cfg;
}

bool Config::has(const std::string& section, const std::string& key) const {
  auto s = sections_.find(section);
  return s != sections_.end() && s->second.count(key) > 0;
}

std::string Config::get_string(const std::string& section, const std::string& key) const {
  auto s = sections_.find(section);
  if (s == sections_.end() || !s->second.count(key))
    throw ConfigError("missing config key: " + section + "." + key +
                          (origin_.empty() ? "" : " (in " + origin_ + ")"),
                      section + "." + key);
  return s->second.at(key);
}

double Config::get_double(const std::string& section, const std::string& key) const {
  const std::string raw = get_string(section, key);
  try {
    size_t pos = 0;
    double v = std::stod(raw, &pos);
    if (pos != raw.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key " + section + "." + key + " is not a number: " + raw,
                      section + "." + key);
  }
}

int Config::get_int(const std::string& section, const std::string& key) const {
  const std::string raw = get_string(section, key);
  try {
    size_t pos = 0;
    int v = std::stoi(raw, &pos);
    if (pos != raw.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key " + section + "." + key + " is not an integer: " + raw,
                      section + "." + key);
  }
}

bool Config::get_bool(const std::string& section, const std::string& key) const {
  const std::string raw = get_string(section, key);
  if (raw == "true" || raw == "1" || raw == "yes" || raw == "on") return true;
  if (raw == "false" || raw == "0" || raw == "no" || raw == "off") return false;
  throw ConfigError("config key " + section + "." + key + " is not a boolean: " + raw,
                    section + "." + key);
}

std::vector<double> Config::get_double_list(const std::string& section,
                                            const std::string& key) const {
  const std::string raw = get_string(section, key);
  std::istringstream in(raw);
  std::vector<double> out;
  std::string tok;
  while (in >> tok) {
    try {
      size_t pos = 0;
      out.push_back(std::stod(tok, &pos));
      if (pos != tok.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw ConfigError("config key " + section + "." + key +
                            " has a non-numeric entry: " + tok,
                        section + "." + key);
    }
  }
  if (out.empty())
    throw ConfigError("config key " + section + "." + key + " lists no values",
                      section + "." + key);
  return out;
}

std::string Config::get_string_or(const std::string& section, const std::string& key,
                                  const std::string& fallback) const {
  return has(section, key) ? get_string(section, key) : fallback;
}
double Config::get_double_or(const std::string& section, const std::string& key,
                             double fallback) const {
  return has(section, key) ? get_double(section, key) : fallback;
}
int Config::get_int_or(const std::string& section, const std::string& key,
                       int fallback) const {
  return has(section, key) ? get_int(section, key) : fallback;
}
bool Config::get_bool_or(const std::string& section, const std::string& key,
                         bool fallback) const {
  return has(section, key) ? get_bool(section, key) : fallback;
}

}  // namespace pflab
