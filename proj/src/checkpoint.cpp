#include "svae/checkpoint.hpp"

#include <bit>
#include <fstream>

namespace svae::ckpt {

static_assert(std::endian::native == std::endian::little,
              "checkpoint payloads are written as raw little-endian bytes");

namespace {

constexpr char kMagic[4] = {'S', 'V', 'A', 'E'};

template <class T>
void put(std::vector<std::uint8_t>& out, T v) {
  const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
  out.insert(out.end(), p, p + sizeof(T));
}

template <class T>
T take(const std::uint8_t* data, std::size_t size, std::size_t& off) {
  if (off + sizeof(T) > size) throw CheckpointError("checkpoint truncated");
  T v;
  std::memcpy(&v, data + off, sizeof(T));
  off += sizeof(T);
  return v;
}

}  // namespace

std::size_t dtype_size(DType d) {
  switch (d) {
    case DType::u8: return 1;
    case DType::f32: return 4;
    case DType::f64: return 8;
    case DType::i64: return 8;
  }
  throw CheckpointError("unknown dtype tag");
}

Record* Container::find(std::string_view name) {
  for (auto& r : records) {
    if (r.name == name) return &r;
  }
  return nullptr;
}

const Record* Container::find(std::string_view name) const {
  for (const auto& r : records) {
    if (r.name == name) return &r;
  }
  return nullptr;
}

std::vector<std::uint8_t> Container::to_bytes() const {
  std::vector<std::uint8_t> out;
  out.insert(out.end(), kMagic, kMagic + 4);
  put<std::uint32_t>(out, version);
  for (const auto& r : records) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(r.name.size()));
    out.insert(out.end(), r.name.begin(), r.name.end());
    put<std::uint8_t>(out, static_cast<std::uint8_t>(r.dtype));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(r.dims.size()));
    for (auto d : r.dims) put<std::uint64_t>(out, d);
    if (r.data.size() != r.count() * dtype_size(r.dtype)) {
      throw CheckpointError("record " + r.name + ": payload size does not match dims");
    }
    out.insert(out.end(), r.data.begin(), r.data.end());
  }
  return out;
}

Container Container::from_bytes(const std::uint8_t* data, std::size_t size) {
  std::size_t off = 0;
  if (size < 8 || std::memcmp(data, kMagic, 4) != 0) {
    throw CheckpointError("bad checkpoint magic");
  }
  off = 4;
  Container c;
  c.version = take<std::uint32_t>(data, size, off);
  if (c.version != kVersion) {
    throw CheckpointError("unsupported checkpoint version " + std::to_string(c.version));
  }
  while (off < size) {
    Record r;
    const auto name_len = take<std::uint32_t>(data, size, off);
    if (off + name_len > size) throw CheckpointError("checkpoint truncated in record name");
    r.name.assign(reinterpret_cast<const char*>(data + off), name_len);
    off += name_len;
    const auto tag = take<std::uint8_t>(data, size, off);
    if (tag > static_cast<std::uint8_t>(DType::i64)) {
      throw CheckpointError("record " + r.name + ": unknown dtype tag");
    }
    r.dtype = static_cast<DType>(tag);
    const auto rank = take<std::uint32_t>(data, size, off);
    r.dims.resize(rank);
    for (auto& d : r.dims) d = take<std::uint64_t>(data, size, off);
    const std::uint64_t bytes = r.count() * dtype_size(r.dtype);
    if (off + bytes > size) throw CheckpointError("checkpoint truncated in record " + r.name);
    r.data.assign(data + off, data + off + bytes);
    off += bytes;
    c.records.push_back(std::move(r));
  }
  return c;
}

void Container::save(const std::string& path) const {
  const auto bytes = to_bytes();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError("cannot open for writing: " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw CheckpointError("write failed: " + path);
}

Container Container::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw CheckpointError("cannot open checkpoint: " + path);
  const auto size = static_cast<std::size_t>(in.tellg());
  in.seekg(0);
  std::vector<std::uint8_t> bytes(size);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(size));
  if (!in) throw CheckpointError("read failed: " + path);
  return from_bytes(bytes.data(), bytes.size());
}

void Container::add_scalar_i64(const std::string& name, std::int64_t v) {
  Record r;
  r.name = name;
  r.dtype = DType::i64;
  r.dims = {1};
  r.data.resize(8);
  std::memcpy(r.data.data(), &v, 8);
  records.push_back(std::move(r));
}

std::int64_t Container::get_scalar_i64(const std::string& name) const {
  const Record* r = find(name);
  if (r == nullptr || r->dtype != DType::i64 || r->count() != 1) {
    throw CheckpointError("missing/invalid i64 record: " + name);
  }
  std::int64_t v;
  std::memcpy(&v, r->data.data(), 8);
  return v;
}

void Container::add_text(const std::string& name, const std::string& text) {
  Record r;
  r.name = name;
  r.dtype = DType::u8;
  r.dims = {text.size()};
  r.data.assign(text.begin(), text.end());
  records.push_back(std::move(r));
}

std::string Container::get_text(const std::string& name) const {
  const Record* r = find(name);
  if (r == nullptr || r->dtype != DType::u8) {
    throw CheckpointError("missing/invalid text record: " + name);
  }
  return std::string(r->data.begin(), r->data.end());
}

}  // namespace svae::ckpt
