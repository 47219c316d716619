#ifndef SLMC_STATE_TABLE_HPP_
#define SLMC_STATE_TABLE_HPP_

#include <cstdint>
#include <cstring>
#include <memory>
#include <stdexcept>
#include <vector>

#include "slmc/encoding.hpp"

namespace slmc {

// Append-only interning table for canonical state encodings. Keys live in
// chunked arenas (stable addresses, no per-key allocation); an open
// addressing index maps bytes to the dense state index. State identity is
// byte equality of the canonical encoding.
class StateTable {
 public:
  static constexpr std::uint32_t npos = UINT32_MAX;

  StateTable() { slots_.resize(1 << 16, npos); }

  static std::uint64_t hash_bytes(BytesView key) {
    // FNV-1a with a final mix; keys are short.
    std::uint64_t h = 1469598103934665603ull;
    for (std::uint8_t b : key) {
      h ^= b;
      h *= 1099511628211ull;
    }
    h ^= h >> 32;
    h *= 0xd6e8feb86659fd93ull;
    h ^= h >> 32;
    return h;
  }

  std::uint32_t find(BytesView key) const { return find_hashed(key, hash_bytes(key)); }

  // Interns a key, returning its new dense index. Key must not be present.
  std::uint32_t insert(BytesView key) {
    if (size() >= slot_limit()) grow();
    const std::uint64_t h = hash_bytes(key);
    std::size_t mask = slots_.size() - 1;
    std::size_t pos = h & mask;
    while (slots_[pos] != npos) pos = (pos + 1) & mask;
    std::uint32_t idx = static_cast<std::uint32_t>(keys_.size());
    slots_[pos] = idx;
    keys_.push_back(store(key));
    return idx;
  }

  BytesView key_of(std::uint32_t idx) const {
    const auto& ref = keys_[idx];
    return BytesView(chunks_[ref.chunk].get() + ref.offset, ref.len);
  }

  std::uint32_t size() const { return static_cast<std::uint32_t>(keys_.size()); }

  std::uint64_t arena_bytes() const { return static_cast<std::uint64_t>(chunks_.size()) * kChunkSize; }

 private:
  static constexpr std::size_t kChunkSize = 1 << 22;

  struct KeyRef {
    std::uint32_t chunk;
    std::uint32_t offset : 24;
    std::uint32_t len : 8;  // canonical encodings are short
  };

  std::uint32_t find_hashed(BytesView key, std::uint64_t h) const {
    std::size_t mask = slots_.size() - 1;
    std::size_t pos = h & mask;
    while (true) {
      std::uint32_t idx = slots_[pos];
      if (idx == npos) return npos;
      BytesView k = key_of(idx);
      if (k.size() == key.size() && std::memcmp(k.data(), key.data(), key.size()) == 0) {
        return idx;
      }
      pos = (pos + 1) & mask;
    }
  }

  KeyRef store(BytesView key) {
    if (key.size() >= (1 << 8)) throw std::runtime_error("state encoding too long");
    if (chunks_.empty() || chunk_used_ + key.size() > kChunkSize) {
      chunks_.push_back(std::make_unique<std::uint8_t[]>(kChunkSize));
      chunk_used_ = 0;
    }
    std::uint8_t* dst = chunks_.back().get() + chunk_used_;
    std::memcpy(dst, key.data(), key.size());
    KeyRef ref{static_cast<std::uint32_t>(chunks_.size() - 1),
               static_cast<std::uint32_t>(chunk_used_) & 0xffffffu,
               static_cast<std::uint32_t>(key.size()) & 0xffu};
    chunk_used_ += key.size();
    return ref;
  }

  std::size_t slot_limit() const { return slots_.size() - slots_.size() / 4; }

  void grow() {
    std::vector<std::uint32_t> old = std::move(slots_);
    slots_.assign(old.size() * 2, npos);
    std::size_t mask = slots_.size() - 1;
    for (std::uint32_t idx = 0; idx < keys_.size(); ++idx) {
      std::size_t pos = hash_bytes(key_of(idx)) & mask;
      while (slots_[pos] != npos) pos = (pos + 1) & mask;
      slots_[pos] = idx;
    }
  }

  std::vector<std::uint32_t> slots_;
  std::vector<KeyRef> keys_;
  std::vector<std::unique_ptr<std::uint8_t[]>> chunks_;
  std::size_t chunk_used_ = 0;
};

}  // namespace slmc

#endif  // SLMC_STATE_TABLE_HPP_
