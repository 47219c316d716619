#ifndef SLMC_ENCODING_HPP_
#define SLMC_ENCODING_HPP_

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace slmc {

// Canonical byte encodings give every state a total, deterministic
// identity used for hashing, deduplication and frontier ordering.
using Bytes = std::vector<std::uint8_t>;
using BytesView = std::span<const std::uint8_t>;

namespace enc {

inline void put_varint(Bytes& out, std::uint64_t v) {
  while (v >= 0x80) {
    out.push_back(static_cast<std::uint8_t>(v) | 0x80);
    v >>= 7;
  }
  out.push_back(static_cast<std::uint8_t>(v));
}

inline void put_byte(Bytes& out, std::uint8_t b) { out.push_back(b); }

class Reader {
 public:
  explicit Reader(BytesView data) : data_(data) {}

  std::uint64_t varint() {
    std::uint64_t v = 0;
    int shift = 0;
    while (true) {
      if (pos_ >= data_.size()) throw std::runtime_error("truncated state encoding");
      std::uint8_t b = data_[pos_++];
      v |= static_cast<std::uint64_t>(b & 0x7f) << shift;
      if (!(b & 0x80)) break;
      shift += 7;
      if (shift > 63) throw std::runtime_error("malformed state encoding");
    }
    return v;
  }

  std::uint8_t byte() {
    if (pos_ >= data_.size()) throw std::runtime_error("truncated state encoding");
    return data_[pos_++];
  }

  bool done() const { return pos_ == data_.size(); }

 private:
  BytesView data_;
  std::size_t pos_ = 0;
};

}  // namespace enc

}  // namespace slmc

#endif  // SLMC_ENCODING_HPP_
