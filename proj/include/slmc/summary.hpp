#ifndef SLMC_SUMMARY_HPP_
#define SLMC_SUMMARY_HPP_

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "slmc/process.hpp"

namespace slmc {

enum class LockView : std::uint8_t { Unlocked = 0, HeldByP1 = 1, HeldBySym = 2 };

// Permutation-invariant view of a global state: P1 explicit, the lock seen
// relative to P1, the symmetric lock holder (if any) pulled out, and the
// remaining symmetric processes as (location, timer) class counts.
//
// Symmetric state predicates are written against this view only. The view
// carries no process indices, so a predicate cannot reference a specific
// symmetric process; that makes every predicate valid on both the full and
// the reduced model, with identical truth values on a state and its
// quotient.
struct StateSummary {
  struct ClassCount {
    Loc loc;
    Ticks t;
    std::uint32_t count;

    friend auto operator<=>(const ClassCount&, const ClassCount&) = default;
  };

  std::uint32_t n = 0;
  ProcState p1;
  LockView lock = LockView::Unlocked;
  std::optional<ProcState> sym_holder;      // present iff lock == HeldBySym
  std::vector<ClassCount> sym_classes;      // sorted by (loc, t), counts > 0

  std::uint32_t ncrit_count() const {
    std::uint32_t k = p1.loc == Loc::Ncrit ? 1 : 0;
    for (const auto& c : sym_classes) {
      if (c.loc == Loc::Ncrit) k += c.count;
    }
    if (sym_holder && sym_holder->loc == Loc::Ncrit) k += 1;
    return k;
  }

  std::uint32_t wait_count() const {
    std::uint32_t k = p1.loc == Loc::Wait ? 1 : 0;
    for (const auto& c : sym_classes) {
      if (c.loc == Loc::Wait) k += c.count;
    }
    if (sym_holder && sym_holder->loc == Loc::Wait) k += 1;
    return k;
  }

  bool any_wait() const { return wait_count() > 0; }

  // Multiset of ncrit timer values, ascending, with multiplicities.
  std::vector<std::pair<Ticks, std::uint32_t>> ncrit_timer_classes() const {
    std::vector<std::pair<Ticks, std::uint32_t>> timers;
    for (const auto& c : sym_classes) {
      if (c.loc == Loc::Ncrit) timers.emplace_back(c.t, c.count);
    }
    if (p1.loc == Loc::Ncrit) {
      auto it = std::lower_bound(timers.begin(), timers.end(),
                                 std::make_pair(p1.t, std::uint32_t{0}));
      if (it != timers.end() && it->first == p1.t) {
        it->second += 1;
      } else {
        timers.insert(it, {p1.t, 1});
      }
    }
    return timers;
  }
};

using SymmetricPredicate = std::function<bool(const StateSummary&)>;

// Lifts a symmetric predicate onto a model's own state type. For the full
// model this is plain evaluation; for the reduced model it is the quotient
// lifting: pred(f) == lifted(quotient(f)) for every full state f.
template <class Model>
auto lift_predicate(const Model& model, SymmetricPredicate pred) {
  return [&model, pred = std::move(pred)](const typename Model::State& s) {
    return pred(model.summary(s));
  };
}

// Distances between neighbouring processes in their non-critical section:
// sorted ncrit timers, gaps between adjacent values with nothing in
// between; a duplicated timer value yields distance 0. Sets bit k of the
// result for every distance k present; the caller sizes the bit count.
inline std::vector<std::uint64_t> distance_bits(const StateSummary& s, std::uint32_t num_bits) {
  std::vector<std::uint64_t> bits((num_bits + 63) / 64, 0);
  auto set_bit = [&](Ticks k) {
    if (k < num_bits) bits[k >> 6] |= std::uint64_t{1} << (k & 63);
  };
  auto timers = s.ncrit_timer_classes();
  std::uint32_t total = 0;
  for (const auto& [t, c] : timers) total += c;
  if (total < 2) return bits;
  for (std::size_t i = 0; i < timers.size(); ++i) {
    if (timers[i].second >= 2) set_bit(0);
    if (i + 1 < timers.size()) set_bit(timers[i + 1].first - timers[i].first);
  }
  return bits;
}

}  // namespace slmc

#endif  // SLMC_SUMMARY_HPP_
