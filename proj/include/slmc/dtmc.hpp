#ifndef SLMC_DTMC_HPP_
#define SLMC_DTMC_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/dynamic_bitset.hpp>

#include "slmc/encoding.hpp"
#include "slmc/probability.hpp"

namespace slmc {

using Bitset = boost::dynamic_bitset<std::uint64_t>;

// Per-state facts collected during exploration so the analyzer never needs
// the decoded states. Keeping these as flat arrays instead of one label
// bitset per ncrit count keeps memory bounded for n in the thousands.
struct StateFeatures {
  enum Flag : std::uint8_t {
    kP1Wait = 1,
    kP1Crit = 2,
    kP1Ncrit = 4,
    kAnyWait = 8,
    kP1Granted = 16,           // lock points at P1 while P1 still waits
    kP1GrantedImmediate = 32,  // ... with wait timer 1 (gamma0 entry next tick)
  };

  std::vector<std::uint32_t> ncrit_count;
  std::vector<std::uint8_t> flags;
  std::uint32_t dist_bits = 0;   // distance labels 0..dist_bits-1
  std::uint32_t dist_words = 0;  // words per state
  std::vector<std::uint64_t> dist;

  bool has_flag(std::uint32_t state, Flag f) const { return flags[state] & f; }

  bool has_distance(std::uint32_t state, std::uint32_t k) const {
    if (k >= dist_bits) return false;
    return dist[static_cast<std::size_t>(state) * dist_words + (k >> 6)] >>
               (k & 63) & 1;
  }
};

// Optional index -> canonical encoding mapping.
struct StateDecodeTable {
  std::vector<std::uint64_t> offsets;  // size num_states+1
  Bytes bytes;

  BytesView at(std::uint32_t idx) const {
    return BytesView(bytes.data() + offsets[idx], offsets[idx + 1] - offsets[idx]);
  }
  std::uint32_t size() const { return offsets.empty() ? 0 : static_cast<std::uint32_t>(offsets.size() - 1); }
};

// Explicit DTMC over the explored reachable states: row-compressed
// stochastic matrix, initial distribution, label sets and optional
// per-state data.
template <class P>
struct SparseDTMC {
  std::vector<std::uint64_t> row_offsets;  // num_states + 1
  std::vector<std::uint32_t> cols;
  std::vector<P> probs;
  std::vector<std::pair<std::uint32_t, P>> initial;
  std::map<std::string, Bitset> labels;
  std::optional<StateFeatures> features;
  std::optional<StateDecodeTable> decode;

  std::uint32_t num_states() const {
    return row_offsets.empty() ? 0 : static_cast<std::uint32_t>(row_offsets.size() - 1);
  }
  std::uint64_t num_transitions() const { return cols.size(); }

  std::span<const std::uint32_t> row_cols(std::uint32_t s) const {
    return {cols.data() + row_offsets[s], cols.data() + row_offsets[s + 1]};
  }
  std::span<const P> row_probs(std::uint32_t s) const {
    return {probs.data() + row_offsets[s], probs.data() + row_offsets[s + 1]};
  }

  P row_sum(std::uint32_t s) const {
    P sum(0);
    for (const P& p : row_probs(s)) sum += p;
    return sum;
  }

  // Structural and stochasticity invariants.
  void validate(double tol = 1e-12) const {
    if (row_offsets.empty() || row_offsets.front() != 0 || row_offsets.back() != cols.size()) {
      throw std::logic_error("inconsistent row offsets");
    }
    const std::uint32_t n = num_states();
    for (std::uint32_t s = 0; s < n; ++s) {
      auto rc = row_cols(s);
      if (rc.empty()) throw std::logic_error("state " + std::to_string(s) + " has no successors");
      for (std::size_t i = 0; i < rc.size(); ++i) {
        if (rc[i] >= n) throw std::logic_error("column index out of bounds");
        if (i > 0 && rc[i] <= rc[i - 1]) {
          throw std::logic_error("row columns not strictly increasing");
        }
      }
      P sum = row_sum(s);
      if constexpr (is_rational_v<P>) {
        if (sum != P(1)) throw std::logic_error("row " + std::to_string(s) + " not stochastic");
      } else {
        if (std::abs(to_double(sum) - 1.0) > tol) {
          throw std::logic_error("row " + std::to_string(s) + " sums to " +
                                 format_double(to_double(sum)));
        }
      }
    }
    P isum(0);
    for (const auto& [idx, p] : initial) {
      if (idx >= n) throw std::logic_error("initial state out of bounds");
      isum += p;
    }
    if constexpr (is_rational_v<P>) {
      if (isum != P(1)) throw std::logic_error("initial distribution not normalised");
    } else {
      if (std::abs(to_double(isum) - 1.0) > tol) {
        throw std::logic_error("initial distribution sums to " + format_double(to_double(isum)));
      }
    }
  }
};

}  // namespace slmc

#endif  // SLMC_DTMC_HPP_
