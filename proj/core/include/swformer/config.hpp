#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace swformer {

// Flat dotted-key configuration ("model.width" -> "16"). Stored as text so
// it can be hashed, echoed and embedded in checkpoints verbatim.
class FlatConfig {
 public:
  FlatConfig() = default;
  explicit FlatConfig(std::map<std::string, std::string> values) : values_(std::move(values)) {}

  // Parses a JSON object whose values are scalars or arrays of scalars.
  static FlatConfig parse_json(const std::string& text);
  static FlatConfig load(const std::string& path);
  // Canonical JSON text: sorted keys, two-space indent, trailing newline.
  [[nodiscard]] std::string to_json() const;

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  // "key=value" override; value text is used verbatim.
  void apply_override(const std::string& assignment);
  void merge(const FlatConfig& other);

  [[nodiscard]] bool has(const std::string& key) const { return values_.count(key) != 0; }
  [[nodiscard]] std::string get(const std::string& key, const std::string& fallback) const;
  [[nodiscard]] std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  [[nodiscard]] double get_double(const std::string& key, double fallback) const;
  [[nodiscard]] bool get_bool(const std::string& key, bool fallback) const;
  [[nodiscard]] std::vector<std::int64_t> get_ints(const std::string& key,
                                                   const std::vector<std::int64_t>& fallback) const;
  [[nodiscard]] std::vector<double> get_doubles(const std::string& key,
                                                const std::vector<double>& fallback) const;

  // Keys under `prefix` (e.g. "model.") only.
  [[nodiscard]] FlatConfig section(const std::string& prefix) const;
  // Throws ConfigError naming every key not in `allowed`.
  void reject_unknown(const std::vector<std::string>& allowed) const;

  [[nodiscard]] const std::map<std::string, std::string>& values() const { return values_; }
  // FNV-1a 64 of to_json(), hex.
  [[nodiscard]] std::string hash() const;

 private:
  std::map<std::string, std::string> values_;
};

std::string fnv1a_hex(const std::string& bytes);

}  // namespace swformer
