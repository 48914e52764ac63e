#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "intexp/nn/layers.hpp"

namespace intexp::nn {

// Binary checkpoint, little-endian regardless of host:
//   "IXCK" u32 version u32 n_meta {str key, str value}* u32 n_params
//   {str name, u8 dtype_bytes, u32 rank, i32 dims[rank], data}*
// Strings are u32 length + bytes. Loading checks names and shapes in order.
inline constexpr std::uint32_t kCheckpointVersion = 1;

namespace detail {

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}
inline void put_str(std::string& out, const std::string& s) {
  put_u32(out, static_cast<std::uint32_t>(s.size()));
  out += s;
}

struct Reader {
  const std::string& buf;
  size_t pos = 0;
  std::string source;
  void need(size_t n) {
    if (pos + n > buf.size()) throw FileError("truncated checkpoint " + source);
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
    pos += 4;
    return v;
  }
  std::string str() {
    const std::uint32_t n = u32();
    need(n);
    std::string s = buf.substr(pos, n);
    pos += n;
    return s;
  }
};

template <typename Container, typename T = typename Container::value_type>
void put_values(std::string& out, const Container& data) {
  static_assert(sizeof(T) == 4 || sizeof(T) == 8);
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  for (const T x : data) {
    U bits;
    std::memcpy(&bits, &x, sizeof(T));
    for (size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
  }
}

}  // namespace detail

using CheckpointMeta = std::map<std::string, std::string>;

template <typename T>
std::string serialize_params(const std::vector<Param<T>*>& ps, const CheckpointMeta& meta = {}) {
  std::string out = "IXCK";
  detail::put_u32(out, kCheckpointVersion);
  detail::put_u32(out, static_cast<std::uint32_t>(meta.size()));
  for (const auto& [k, v] : meta) {
    detail::put_str(out, k);
    detail::put_str(out, v);
  }
  detail::put_u32(out, static_cast<std::uint32_t>(ps.size()));
  for (const auto* p : ps) {
    detail::put_str(out, p->name);
    out.push_back(static_cast<char>(sizeof(T)));
    detail::put_u32(out, static_cast<std::uint32_t>(p->value.rank()));
    for (int d : p->value.shape) detail::put_u32(out, static_cast<std::uint32_t>(d));
    detail::put_values(out, p->value.data);
  }
  return out;
}

template <typename T>
CheckpointMeta deserialize_params(const std::string& buf, const std::vector<Param<T>*>& ps,
                                  const std::string& source = "<memory>") {
  detail::Reader r{buf, 0, source};
  r.need(4);
  if (buf.compare(0, 4, "IXCK") != 0) throw FileError("not a checkpoint: " + source);
  r.pos = 4;
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion)
    throw FileError("unsupported checkpoint version " + std::to_string(version) + " in " + source);
  CheckpointMeta meta;
  const std::uint32_t n_meta = r.u32();
  for (std::uint32_t i = 0; i < n_meta; ++i) {
    std::string k = r.str();
    meta[k] = r.str();
  }
  const std::uint32_t n = r.u32();
  if (n != ps.size())
    throw DimensionError("checkpoint " + source + " has " + std::to_string(n) + " tensors, model expects " +
                         std::to_string(ps.size()));
  for (auto* p : ps) {
    const std::string name = r.str();
    if (name != p->name) throw DimensionError("checkpoint " + source + ": expected " + p->name + ", found " + name);
    r.need(1);
    const int bytes = static_cast<unsigned char>(buf[r.pos++]);
    if (bytes != 4 && bytes != 8) throw FileError("bad dtype in checkpoint " + source);
    Shape shape(r.u32());
    for (int& d : shape) d = static_cast<int>(r.u32());
    if (shape != p->value.shape)
      throw DimensionError("checkpoint " + source + ": " + name + " has shape " + shape_str(shape) + ", model expects " +
                           shape_str(p->value.shape));
    r.need(numel(shape) * bytes);
    for (size_t i = 0; i < numel(shape); ++i) {
      std::uint64_t bits = 0;
      for (int b = 0; b < bytes; ++b)
        bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[r.pos + b])) << (8 * b);
      r.pos += bytes;
      if (bytes == 4) {
        const std::uint32_t b32 = static_cast<std::uint32_t>(bits);
        float f;
        std::memcpy(&f, &b32, 4);
        p->value[i] = static_cast<T>(f);
      } else {
        double d;
        std::memcpy(&d, &bits, 8);
        p->value[i] = static_cast<T>(d);
      }
    }
  }
  if (r.pos != buf.size()) throw FileError("trailing bytes in checkpoint " + source);
  return meta;
}

template <typename T>
void save_checkpoint(const std::string& path, const std::vector<Param<T>*>& ps, const CheckpointMeta& meta = {}) {
  const std::string buf = serialize_params(ps, meta);
  std::ofstream f(path, std::ios::binary);
  f.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!f) throw FileError("cannot write checkpoint " + path);
}

template <typename T>
CheckpointMeta load_checkpoint(const std::string& path, const std::vector<Param<T>*>& ps) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw FileError("checkpoint not found: " + path);
  const std::string buf((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return deserialize_params(buf, ps, path);
}

// Metadata only, without touching parameters.
inline CheckpointMeta read_checkpoint_meta(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw FileError("checkpoint not found: " + path);
  const std::string buf((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  detail::Reader r{buf, 0, path};
  r.need(4);
  if (buf.compare(0, 4, "IXCK") != 0) throw FileError("not a checkpoint: " + path);
  r.pos = 4;
  if (r.u32() != kCheckpointVersion) throw FileError("unsupported checkpoint version in " + path);
  CheckpointMeta meta;
  const std::uint32_t n_meta = r.u32();
  for (std::uint32_t i = 0; i < n_meta; ++i) {
    std::string k = r.str();
    meta[k] = r.str();
  }
  return meta;
}

}  // namespace intexp::nn
