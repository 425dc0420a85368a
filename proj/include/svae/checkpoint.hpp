#ifndef SVAE_CHECKPOINT_HPP
#define SVAE_CHECKPOINT_HPP

#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>
#include <vector>

#include "svae/errors.hpp"
#include "svae/tape.hpp"

namespace svae::ckpt {

enum class DType : std::uint8_t { u8 = 0, f32 = 1, f64 = 2, i64 = 3 };

std::size_t dtype_size(DType d);

// One named array: dtype, dims and raw little-endian payload.
struct Record {
  std::string name;
  DType dtype = DType::u8;
  std::vector<std::uint64_t> dims;
  std::vector<std::uint8_t> data;

  std::uint64_t count() const {
    std::uint64_t n = 1;
    for (auto d : dims) n *= d;
    return n;
  }
};

// Flat record container. File layout: magic "SVAE", u32 format version, then
// per record: u32 name length, name bytes, u8 dtype, u32 rank, u64 dims,
// payload. All integers and values little-endian. Records keep their order,
// so save -> load -> save is byte-identical.
struct Container {
  static constexpr std::uint32_t kVersion = 1;

  std::uint32_t version = kVersion;
  std::vector<Record> records;

  Record* find(std::string_view name);
  const Record* find(std::string_view name) const;

  std::vector<std::uint8_t> to_bytes() const;
  static Container from_bytes(const std::uint8_t* data, std::size_t size);

  void save(const std::string& path) const;
  static Container load(const std::string& path);

  // Typed helpers -------------------------------------------------------

  void add_scalar_i64(const std::string& name, std::int64_t v);
  std::int64_t get_scalar_i64(const std::string& name) const;

  void add_text(const std::string& name, const std::string& text);
  std::string get_text(const std::string& name) const;

  template <class Real>
  void add_matrix(const std::string& name, const ad::Mat<Real>& m) {
    Record r;
    r.name = name;
    r.dtype = std::is_same_v<Real, float> ? DType::f32 : DType::f64;
    r.dims = {static_cast<std::uint64_t>(m.rows()), static_cast<std::uint64_t>(m.cols())};
    r.data.resize(sizeof(Real) * static_cast<std::size_t>(m.size()));
    std::memcpy(r.data.data(), m.data(), r.data.size());
    records.push_back(std::move(r));
  }

  // Reads a matrix record into Real precision, converting from the stored
  // dtype when they differ. Throws CheckpointError on missing records or
  // shape mismatches against (rows, cols); pass rows = -1 to skip the check.
  template <class Real>
  ad::Mat<Real> get_matrix(const std::string& name, Eigen::Index rows = -1,
                           Eigen::Index cols = -1) const {
    const Record* r = find(name);
    if (r == nullptr) throw CheckpointError("checkpoint record missing: " + name);
    if (r->dims.size() != 2) throw CheckpointError("record " + name + " is not a matrix");
    const auto rr = static_cast<Eigen::Index>(r->dims[0]);
    const auto rc = static_cast<Eigen::Index>(r->dims[1]);
    if (rows >= 0 && (rr != rows || rc != cols)) {
      throw CheckpointError("record " + name + ": shape " + std::to_string(rr) + "x" +
                            std::to_string(rc) + " does not match expected " +
                            std::to_string(rows) + "x" + std::to_string(cols));
    }
    ad::Mat<Real> out(rr, rc);
    if (r->dtype == DType::f32) {
      const float* src = reinterpret_cast<const float*>(r->data.data());
      for (Eigen::Index i = 0; i < out.size(); ++i) out.data()[i] = static_cast<Real>(src[i]);
    } else if (r->dtype == DType::f64) {
      const double* src = reinterpret_cast<const double*>(r->data.data());
      for (Eigen::Index i = 0; i < out.size(); ++i) out.data()[i] = static_cast<Real>(src[i]);
    } else {
      throw CheckpointError("record " + name + " has a non-floating dtype");
    }
    return out;
  }
};

}  // namespace svae::ckpt

#endif
