#include "swformer/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "swformer/errors.hpp"

namespace swformer {

namespace {

using nlohmann::json;

std::string scalar_text(const json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  if (v.is_number()) {
    std::ostringstream os;
    os.precision(17);
    os << v.get<double>();
    return os.str();
  }
  throw ConfigError("config key '" + key + "' must be a scalar or an array of scalars");
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(text);
  while (std::getline(is, item, ',')) {
    const auto b = item.find_first_not_of(" \t[]");
    const auto e = item.find_last_not_of(" \t[]");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

}  // namespace

FlatConfig FlatConfig::parse_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object of dotted keys");
  FlatConfig cfg;
  for (const auto& [key, value] : doc.items()) {
    if (value.is_array()) {
      std::string joined;
      for (const auto& item : value) {
        if (!joined.empty()) joined += ",";
        joined += scalar_text(item, key);
      }
      cfg.values_[key] = joined;
    } else {
      cfg.values_[key] = scalar_text(value, key);
    }
  }
  return cfg;
}

FlatConfig FlatConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str());
}

std::string FlatConfig::to_json() const {
  json doc = json::object();
  for (const auto& [k, v] : values_) doc[k] = v;
  return doc.dump(2) + "\n";
}

void FlatConfig::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override must look like key=value, got '" + assignment + "'");
  }
  values_[assignment.substr(0, eq)] = assignment.substr(eq + 1);
}

void FlatConfig::merge(const FlatConfig& other) {
  for (const auto& [k, v] : other.values_) values_[k] = v;
}

std::string FlatConfig::get(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

std::int64_t FlatConfig::get_int(const std::string& key, std::int64_t fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    std::size_t used = 0;
    const auto v = std::stoll(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' expects an integer, got '" + it->second + "'");
  }
}

double FlatConfig::get_double(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    std::size_t used = 0;
    const auto v = std::stod(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' expects a number, got '" + it->second + "'");
  }
}

bool FlatConfig::get_bool(const std::string& key, bool fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const auto& v = it->second;
  if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "off" || v == "no") return false;
  throw ConfigError("config key '" + key + "' expects a boolean, got '" + v + "'");
}

std::vector<std::int64_t> FlatConfig::get_ints(const std::string& key,
                                               const std::vector<std::int64_t>& fallback) const {
  if (!has(key)) return fallback;
  std::vector<std::int64_t> out;
  for (const auto& item : split_list(values_.at(key))) {
    FlatConfig tmp;
    tmp.set(key, item);
    out.push_back(tmp.get_int(key, 0));
  }
  return out;
}

std::vector<double> FlatConfig::get_doubles(const std::string& key, const std::vector<double>& fallback) const {
  if (!has(key)) return fallback;
  std::vector<double> out;
  for (const auto& item : split_list(values_.at(key))) {
    FlatConfig tmp;
    tmp.set(key, item);
    out.push_back(tmp.get_double(key, 0));
  }
  return out;
}

FlatConfig FlatConfig::section(const std::string& prefix) const {
  FlatConfig out;
  for (const auto& [k, v] : values_) {
    if (k.rfind(prefix, 0) == 0) out.values_[k] = v;
  }
  return out;
}

void FlatConfig::reject_unknown(const std::vector<std::string>& allowed) const {
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  std::string bad;
  for (const auto& [k, v] : values_) {
    if (ok.count(k) == 0) bad += (bad.empty() ? "" : ", ") + k;
  }
  if (!bad.empty()) throw ConfigError("unknown config keys: " + bad);
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string FlatConfig::hash() const { return fnv1a_hex(to_json()); }

}  // namespace swformer
