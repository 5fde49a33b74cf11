#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <span>
#include <vector>

#include "manet/types.hpp"

namespace manet {

/// Big-endian canonical byte writer shared by packet tagging and the ledger.
class ByteWriter {
public:
  ByteWriter() = default;
  explicit ByteWriter(std::size_t capacity) { buf_.reserve(capacity); }

  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u32(std::uint32_t v) { put_be(v, 4); }
  void u64(std::uint64_t v) { put_be(v, 8); }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
  void f64(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    u64(bits);
  }
  void digest(const Digest& d) { buf_.insert(buf_.end(), d.begin(), d.end()); }
  void bytes(std::span<const std::uint8_t> b) { buf_.insert(buf_.end(), b.begin(), b.end()); }

  const std::vector<std::uint8_t>& data() const { return buf_; }
  std::vector<std::uint8_t> take() { return std::move(buf_); }

private:
  void put_be(std::uint64_t v, int width) {
    for (int i = width - 1; i >= 0; --i) {
      buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
  }
  std::vector<std::uint8_t> buf_;
};

/// Seconds to integer microseconds, rounded to nearest.
inline std::int64_t to_micros(double seconds) {
  return static_cast<std::int64_t>(std::llround(seconds * 1e6));
}

inline double from_micros(std::int64_t us) { return static_cast<double>(us) / 1e6; }

} // namespace manet
