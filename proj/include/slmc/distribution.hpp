#ifndef SLMC_DISTRIBUTION_HPP_
#define SLMC_DISTRIBUTION_HPP_

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "slmc/probability.hpp"

namespace slmc {

using Ticks = std::uint32_t;

// Finite probability distribution over nonnegative integer tick counts.
// Entries are sorted by value, values are distinct, probabilities are
// strictly positive and sum to one (exactly for Rational, within 1e-12
// for double).
template <class P>
class DiscreteDistribution {
 public:
  struct Entry {
    Ticks value;
    P prob;
  };

  DiscreteDistribution() = default;

  explicit DiscreteDistribution(std::vector<Entry> entries) : entries_(std::move(entries)) {
    std::sort(entries_.begin(), entries_.end(),
              [](const Entry& a, const Entry& b) { return a.value < b.value; });
    validate();
  }

  DiscreteDistribution(std::initializer_list<Entry> entries)
      : DiscreteDistribution(std::vector<Entry>(entries)) {}

  static DiscreteDistribution point(Ticks value) { return DiscreteDistribution({{value, P(1)}}); }

  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t support_size() const { return entries_.size(); }

  Ticks max_value() const {
    if (entries_.empty()) throw std::logic_error("empty distribution");
    return entries_.back().value;
  }

  const P& prob_of(Ticks value) const {
    for (const auto& e : entries_) {
      if (e.value == value) return e.prob;
    }
    throw std::out_of_range("value not in support: " + std::to_string(value));
  }

  bool operator==(const DiscreteDistribution& other) const = default;

 private:
  void validate() const {
    if (entries_.empty()) throw std::invalid_argument("distribution must have at least one entry");
    P sum(0);
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      if (i > 0 && entries_[i].value == entries_[i - 1].value) {
        throw std::invalid_argument("duplicate distribution value: " +
                                    std::to_string(entries_[i].value));
      }
      if (!(entries_[i].prob > P(0))) {
        throw std::invalid_argument("distribution probabilities must be strictly positive");
      }
      sum += entries_[i].prob;
    }
    if constexpr (is_rational_v<P>) {
      if (sum != P(1)) throw std::invalid_argument("distribution probabilities must sum to 1");
    } else {
      if (std::abs(to_double(sum) - 1.0) > 1e-12) {
        throw std::invalid_argument("distribution probabilities must sum to 1 (got " +
                                    format_double(to_double(sum)) + ")");
      }
    }
  }

  std::vector<Entry> entries_;
};

// Parses "40:0.5,50:1/2" style value:probability lists.
template <class P>
DiscreteDistribution<P> parse_distribution(std::string_view text) {
  std::vector<typename DiscreteDistribution<P>::Entry> entries;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto comma = text.find(',', pos);
    std::string_view item =
        text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
    auto colon = item.find(':');
    if (colon == std::string_view::npos) {
      throw std::invalid_argument("expected value:prob, got '" + std::string(item) + "'");
    }
    std::string value_str(item.substr(0, colon));
    unsigned long value = 0;
    try {
      std::size_t used = 0;
      value = std::stoul(value_str, &used);
      if (used != value_str.size()) throw std::invalid_argument(value_str);
    } catch (const std::exception&) {
      throw std::invalid_argument("malformed tick value: '" + value_str + "'");
    }
    entries.push_back({static_cast<Ticks>(value), parse_probability<P>(item.substr(colon + 1))});
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return DiscreteDistribution<P>(std::move(entries));
}

template <class P>
std::string format_distribution(const DiscreteDistribution<P>& d) {
  std::ostringstream out;
  bool first = true;
  for (const auto& e : d.entries()) {
    if (!first) out << ',';
    first = false;
    out << e.value << ':' << format_probability(e.prob);
  }
  return out.str();
}

// Model parameters: process count plus the non-critical (nu) and critical
// section (gamma0 immediate, gamma1 after spinning) duration distributions.
template <class P>
struct ModelParams {
  std::uint32_t n = 1;
  DiscreteDistribution<P> nu;
  DiscreteDistribution<P> gamma0;
  DiscreteDistribution<P> gamma1;

  void validate() const {
    if (n < 1) throw std::invalid_argument("process count must be >= 1");
    if (nu.support_size() == 0 || gamma0.support_size() == 0 || gamma1.support_size() == 0) {
      throw std::invalid_argument("all three distributions must be nonempty");
    }
  }

  Ticks max_ncrit_timer() const { return nu.max_value(); }
  Ticks max_crit_timer() const { return std::max(gamma0.max_value(), gamma1.max_value()); }
};

}  // namespace slmc

#endif  // SLMC_DISTRIBUTION_HPP_
