#include "pmri/harness/config.hpp"

#include "pmri/core/types.hpp"

#include "json.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace pmri {

namespace {

std::string trim(std::string const &s)
{
  size_t const b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) { return ""; }
  size_t const e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string scalar_text(nlohmann::json const &v)
{
  if (v.is_string()) { return v.get<std::string>(); }
  if (v.is_boolean()) { return v.get<bool>() ? "true" : "false"; }
  if (v.is_number_integer()) { return std::to_string(v.get<long long>()); }
  if (v.is_number()) {
    std::ostringstream os;
    os.precision(17);
    os << v.get<double>();
    return os.str();
  }
  if (v.is_null()) { return ""; }
  throw ConfigError("unsupported JSON value " + v.dump());
}

void flatten(nlohmann::json const &node, std::string const &prefix, Config &out)
{
  if (node.is_object()) {
    for (auto it = node.begin(); it != node.end(); ++it) {
      flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
    }
  } else if (node.is_array()) {
    std::string joined;
    for (size_t k = 0; k < node.size(); ++k) { joined += (k ? "," : "") + scalar_text(node[k]); }
    out.set(prefix, joined);
  } else {
    out.set(prefix, scalar_text(node));
  }
}

} // namespace

Config Config::parse(std::string const &text)
{
  Config c;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t const hash = line.find('#');
    if (hash != std::string::npos) { line.erase(hash); }
    line = trim(line);
    if (line.empty()) { continue; }
    if (line.front() == '[') {
      if (line.back() != ']') { throw ConfigError("line " + std::to_string(lineno) + ": unterminated section header"); }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    size_t const eq = line.find('=');
    if (eq == std::string::npos) { throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'"); }
    std::string key = trim(line.substr(0, eq));
    if (key.empty()) { throw ConfigError("line " + std::to_string(lineno) + ": empty key"); }
    if (!section.empty()) { key = section + "." + key; }
    c.set(key, trim(line.substr(eq + 1)));
  }
  return c;
}

Config Config::parse_json(std::string const &text)
{
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (nlohmann::json::parse_error const &e) {
    throw ConfigError(std::string("invalid JSON config: ") + e.what());
  }
  if (!j.is_object()) { throw ConfigError("JSON config must be an object"); }
  Config c;
  flatten(j, "", c);
  return c;
}

Config Config::load(std::string const &path)
{
  std::ifstream f(path);
  if (!f) { throw ConfigError("cannot open config '" + path + "'"); }
  std::stringstream ss;
  ss << f.rdbuf();
  std::string const text = ss.str();
  size_t const first = text.find_first_not_of(" \t\r\n");
  return first != std::string::npos && text[first] == '{' ? parse_json(text) : parse(text);
}

std::string Config::get(std::string const &key, std::string const &fallback) const
{
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double Config::get_double(std::string const &key, double fallback) const
{
  auto it = values_.find(key);
  if (it == values_.end()) { return fallback; }
  std::string const &v = it->second;
  if (v == "inf" || v == "+inf" || v == "infinity") { return INFINITY; }
  try {
    size_t pos = 0;
    double const d = std::stod(v, &pos);
    if (pos != v.size()) { throw std::invalid_argument(v); }
    return d;
  } catch (std::exception const &) {
    throw ConfigError("'" + key + "' expects a number, got '" + v + "'");
  }
}

long long Config::get_int(std::string const &key, long long fallback) const
{
  auto it = values_.find(key);
  if (it == values_.end()) { return fallback; }
  std::string const &v = it->second;
  try {
    size_t pos = 0;
    long long const n = std::stoll(v, &pos);
    if (pos != v.size()) { throw std::invalid_argument(v); }
    return n;
  } catch (std::exception const &) {
    throw ConfigError("'" + key + "' expects an integer, got '" + v + "'");
  }
}

bool Config::get_bool(std::string const &key, bool fallback) const
{
  auto it = values_.find(key);
  if (it == values_.end()) { return fallback; }
  if (it->second == "true" || it->second == "1" || it->second == "yes") { return true; }
  if (it->second == "false" || it->second == "0" || it->second == "no") { return false; }
  throw ConfigError("'" + key + "' expects true or false, got '" + it->second + "'");
}

std::vector<std::string> Config::get_list(std::string const &key, std::vector<std::string> const &fallback) const
{
  auto it = values_.find(key);
  if (it == values_.end()) { return fallback; }
  std::vector<std::string> out;
  std::stringstream ss(it->second);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) { out.push_back(item); }
  }
  return out;
}

std::string Config::to_text() const
{
  std::string s;
  for (auto const &[k, v] : values_) { s += k + " = " + v + "\n"; }
  return s;
}

} // namespace pmri
