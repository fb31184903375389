#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "swformer/module.hpp"
#include "swformer/optim.hpp"

namespace swformer {

// Byte layout, all integers little-endian:
//   "SWFMCKPT"  u32 version  u32 flags (bit 0: optimizer state present)
//   u64 seed    u64 n + n bytes of config JSON
//   u64 count, then per array sorted by name:
//     u32 n + name bytes, 4 x i64 shape (n, c, h, w), numel x f32
//   if flags & 1: u64 step, u64 count, then per entry sorted by name:
//     u32 n + name bytes, u64 numel, numel x f32 (m), numel x f32 (v)
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct CheckpointArray {
  Shape shape;
  std::vector<float> data;
};

struct OptimizerSnapshot {
  std::int64_t step = 0;
  std::map<std::string, std::pair<std::vector<float>, std::vector<float>>> moments;  // name -> (m, v)
};

struct Checkpoint {
  std::string config_json;
  std::uint64_t seed = 0;
  std::map<std::string, CheckpointArray> arrays;  // parameters and buffers
  std::optional<OptimizerSnapshot> optimizer;

  [[nodiscard]] std::string serialize() const;
  static Checkpoint deserialize(const std::string& bytes, const std::string& origin = "<memory>");
  void save(const std::string& path) const;
  static Checkpoint load(const std::string& path);
  // Number of scalars over the named arrays whose names are in `names`, or
  // over all arrays if `names` is empty.
  [[nodiscard]] std::int64_t scalar_count(const std::vector<std::string>& names = {}) const;
};

template <typename T>
Checkpoint capture(const Module<T>& model, const std::string& config_json, std::uint64_t seed,
                   const AdamW<T>* optimizer = nullptr);

// Copies arrays into the model's parameters and buffers. Every model tensor
// must be present with a matching shape; extra arrays raise as well.
template <typename T>
void restore(Module<T>& model, const Checkpoint& ckpt);
template <typename T>
void restore(AdamW<T>& optimizer, const OptimizerSnapshot& snap);

}  // namespace swformer
