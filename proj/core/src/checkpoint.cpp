#include "swformer/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace swformer {

namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

constexpr char kMagic[8] = {'S', 'W', 'F', 'M', 'C', 'K', 'P', 'T'};

class Writer {
 public:
  template <typename U>
  void put(U v) {
    const auto* p = reinterpret_cast<const char*>(&v);
    out_.append(p, sizeof(U));
  }
  void bytes(const std::string& s) { out_.append(s); }
  void floats(const std::vector<float>& v) {
    out_.append(reinterpret_cast<const char*>(v.data()), v.size() * sizeof(float));
  }
  void name(const std::string& s) {
    put<std::uint32_t>(static_cast<std::uint32_t>(s.size()));
    bytes(s);
  }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  Reader(const std::string& data, std::string origin) : data_(data), origin_(std::move(origin)) {}
  template <typename U>
  U get() {
    need(sizeof(U));
    U v;
    std::memcpy(&v, data_.data() + pos_, sizeof(U));
    pos_ += sizeof(U);
    return v;
  }
  std::string bytes(std::size_t n) {
    need(n);
    std::string s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::vector<float> floats(std::size_t n) {
    if (n > (data_.size() - pos_) / sizeof(float)) fail("truncated array data");
    std::vector<float> v(n);
    std::memcpy(v.data(), data_.data() + pos_, n * sizeof(float));
    pos_ += n * sizeof(float);
    return v;
  }
  std::string name() { return bytes(get<std::uint32_t>()); }
  [[nodiscard]] bool done() const { return pos_ == data_.size(); }
  [[noreturn]] void fail(const std::string& what) const {
    throw IoError(origin_ + ": corrupt checkpoint (" + what + ")");
  }

 private:
  void need(std::size_t n) const {
    if (n > data_.size() - pos_) fail("unexpected end of file");
  }
  const std::string& data_;
  std::string origin_;
  std::size_t pos_ = 0;
};

template <typename T>
std::vector<float> to_f32(std::span<const T> s) {
  return std::vector<float>(s.begin(), s.end());
}

}  // namespace

std::string Checkpoint::serialize() const {
  Writer w;
  w.bytes(std::string(kMagic, 8));
  w.put<std::uint32_t>(kCheckpointVersion);
  w.put<std::uint32_t>(optimizer ? 1u : 0u);
  w.put<std::uint64_t>(seed);
  w.put<std::uint64_t>(config_json.size());
  w.bytes(config_json);
  w.put<std::uint64_t>(arrays.size());
  for (const auto& [name, a] : arrays) {
    w.name(name);
    for (auto d : {a.shape.n, a.shape.c, a.shape.h, a.shape.w}) w.put<std::int64_t>(d);
    w.floats(a.data);
  }
  if (optimizer) {
    w.put<std::uint64_t>(static_cast<std::uint64_t>(optimizer->step));
    w.put<std::uint64_t>(optimizer->moments.size());
    for (const auto& [name, mv] : optimizer->moments) {
      w.name(name);
      w.put<std::uint64_t>(mv.first.size());
      w.floats(mv.first);
      w.floats(mv.second);
    }
  }
  return w.take();
}

Checkpoint Checkpoint::deserialize(const std::string& bytes, const std::string& origin) {
  Reader r(bytes, origin);
  if (r.bytes(8) != std::string(kMagic, 8)) r.fail("bad magic");
  const auto version = r.get<std::uint32_t>();
  if (version != kCheckpointVersion) r.fail("unsupported version " + std::to_string(version));
  const auto flags = r.get<std::uint32_t>();
  Checkpoint c;
  c.seed = r.get<std::uint64_t>();
  c.config_json = r.bytes(r.get<std::uint64_t>());
  const auto count = r.get<std::uint64_t>();
  for (std::uint64_t i = 0; i < count; ++i) {
    auto name = r.name();
    CheckpointArray a;
    a.shape.n = r.get<std::int64_t>();
    a.shape.c = r.get<std::int64_t>();
    a.shape.h = r.get<std::int64_t>();
    a.shape.w = r.get<std::int64_t>();
    if (a.shape.n < 0 || a.shape.c < 0 || a.shape.h < 0 || a.shape.w < 0) r.fail("negative extent in " + name);
    a.data = r.floats(static_cast<std::size_t>(a.shape.numel()));
    if (!c.arrays.emplace(name, std::move(a)).second) r.fail("duplicate array " + name);
  }
  if ((flags & 1u) != 0) {
    OptimizerSnapshot s;
    s.step = static_cast<std::int64_t>(r.get<std::uint64_t>());
    const auto n = r.get<std::uint64_t>();
    for (std::uint64_t i = 0; i < n; ++i) {
      auto name = r.name();
      const auto numel = r.get<std::uint64_t>();
      auto m = r.floats(numel);
      auto v = r.floats(numel);
      s.moments.emplace(name, std::make_pair(std::move(m), std::move(v)));
    }
    c.optimizer = std::move(s);
  }
  if (!r.done()) r.fail("trailing bytes");
  return c;
}

void Checkpoint::save(const std::string& path) const {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path + ": cannot open for writing");
    const auto bytes = serialize();
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError(path + ": write failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError(path + ": rename failed: " + ec.message());
}

Checkpoint Checkpoint::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path + ": cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize(ss.str(), path);
}

std::int64_t Checkpoint::scalar_count(const std::vector<std::string>& names) const {
  std::int64_t total = 0;
  if (names.empty()) {
    for (const auto& [name, a] : arrays) total += a.shape.numel();
    return total;
  }
  for (const auto& n : names) {
    auto it = arrays.find(n);
    if (it != arrays.end()) total += it->second.shape.numel();
  }
  return total;
}

template <typename T>
Checkpoint capture(const Module<T>& model, const std::string& config_json, std::uint64_t seed,
                   const AdamW<T>* optimizer) {
  Checkpoint c;
  c.config_json = config_json;
  c.seed = seed;
  auto add = [&](const std::vector<NamedTensor<T>>& list) {
    for (const auto& p : list) {
      CheckpointArray a{p.tensor.shape(), to_f32<T>(p.tensor.data())};
      if (!c.arrays.emplace(p.name, std::move(a)).second) {
        throw UsageError("checkpoint: duplicate tensor name " + p.name);
      }
    }
  };
  add(model.named_parameters());
  add(model.named_buffers());
  if (optimizer != nullptr) {
    OptimizerSnapshot s;
    s.step = optimizer->steps();
    const auto& params = optimizer->params();
    for (std::size_t k = 0; k < params.size(); ++k) {
      s.moments.emplace(params[k].name,
                        std::make_pair(std::vector<float>(optimizer->m[k].begin(), optimizer->m[k].end()),
                                       std::vector<float>(optimizer->v[k].begin(), optimizer->v[k].end())));
    }
    c.optimizer = std::move(s);
  }
  return c;
}

template <typename T>
void restore(Module<T>& model, const Checkpoint& ckpt) {
  std::set<std::string> seen;
  auto load = [&](std::vector<NamedTensor<T>> list) {
    for (auto& p : list) {
      auto it = ckpt.arrays.find(p.name);
      if (it == ckpt.arrays.end()) throw IoError("checkpoint is missing tensor " + p.name);
      if (!(it->second.shape == p.tensor.shape())) {
        throw DimensionError("checkpoint tensor " + p.name + " has shape " + it->second.shape.str() +
                             ", model expects " + p.tensor.shape().str());
      }
      auto d = p.tensor.data();
      std::copy(it->second.data.begin(), it->second.data.end(), d.begin());
      seen.insert(p.name);
    }
  };
  load(model.named_parameters());
  load(model.named_buffers());
  for (const auto& [name, a] : ckpt.arrays) {
    if (seen.count(name) == 0) throw IoError("checkpoint tensor " + name + " does not exist in the model");
  }
}

template <typename T>
void restore(AdamW<T>& optimizer, const OptimizerSnapshot& snap) {
  const auto& params = optimizer.params();
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto it = snap.moments.find(params[k].name);
    if (it == snap.moments.end()) throw IoError("checkpoint has no optimizer state for " + params[k].name);
    if (it->second.first.size() != optimizer.m[k].size() || it->second.second.size() != optimizer.v[k].size()) {
      throw DimensionError("optimizer state for " + params[k].name + " has the wrong size");
    }
    std::copy(it->second.first.begin(), it->second.first.end(), optimizer.m[k].begin());
    std::copy(it->second.second.begin(), it->second.second.end(), optimizer.v[k].begin());
  }
  optimizer.set_steps(snap.step);
}

#define SWFORMER_INSTANTIATE_CHECKPOINT(T)                                                    \
  template Checkpoint capture<T>(const Module<T>&, const std::string&, std::uint64_t, const AdamW<T>*); \
  template void restore<T>(Module<T>&, const Checkpoint&);                                   \
  template void restore<T>(AdamW<T>&, const OptimizerSnapshot&);

SWFORMER_INSTANTIATE_CHECKPOINT(float)
SWFORMER_INSTANTIATE_CHECKPOINT(double)

}  // namespace swformer
