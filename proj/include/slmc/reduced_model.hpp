#ifndef SLMC_REDUCED_MODEL_HPP_
#define SLMC_REDUCED_MODEL_HPP_

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "slmc/distribution.hpp"
#include "slmc/encoding.hpp"
#include "slmc/full_model.hpp"
#include "slmc/process.hpp"
#include "slmc/summary.hpp"

namespace slmc {

// Class counts of the symmetric processes 2..n that are not the
// distinguished lock holder. Classes are (location, timer) pairs, sorted,
// with strictly positive counts; crit never appears here because a
// symmetric process in its critical section is always the holder.
struct CounterVector {
  std::vector<StateSummary::ClassCount> classes;

  friend auto operator<=>(const CounterVector&, const CounterVector&) = default;

  std::uint64_t total() const {
    std::uint64_t sum = 0;
    for (const auto& c : classes) sum += c.count;
    return sum;
  }

  std::uint64_t wait_total() const {
    std::uint64_t sum = 0;
    for (const auto& c : classes) {
      if (c.loc == Loc::Wait) sum += c.count;
    }
    return sum;
  }

  void add(Loc loc, Ticks t, std::uint32_t count) {
    if (count == 0) return;
    StateSummary::ClassCount key{loc, t, 0};
    auto it = std::lower_bound(classes.begin(), classes.end(), key,
                               [](const auto& a, const auto& b) {
                                 return std::pair(a.loc, a.t) < std::pair(b.loc, b.t);
                               });
    if (it != classes.end() && it->loc == loc && it->t == t) {
      it->count += count;
    } else {
      classes.insert(it, {loc, t, count});
    }
  }

  void remove_one(Loc loc, Ticks t) {
    for (auto it = classes.begin(); it != classes.end(); ++it) {
      if (it->loc == loc && it->t == t) {
        if (--it->count == 0) classes.erase(it);
        return;
      }
    }
    throw std::logic_error("counter underflow: no process in class " +
                           std::string(loc_name(loc)) + "(" + std::to_string(t) + ")");
  }

  // Deterministic one-tick shift of every counted process: ncrit timers
  // decrement, ncrit(0) moves to wait(0), wait timers saturate at 2.
  CounterVector shifted() const {
    CounterVector out;
    for (const auto& c : classes) {
      if (c.loc == Loc::Ncrit) {
        if (c.t > 0) {
          out.add(Loc::Ncrit, c.t - 1, c.count);
        } else {
          out.add(Loc::Wait, 0, c.count);
        }
      } else {
        out.add(Loc::Wait, std::min(c.t + 1, kMaxWaitTimer), c.count);
      }
    }
    return out;
  }
};

enum class ReducedLock : std::uint8_t { Unlocked = 0, HeldByP1 = 1, HeldBySym = 2 };

// Generic-representative quotient state: P1 kept explicit, one optional
// distinguished symmetric lock holder, and counters for the rest.
struct ReducedState {
  ProcState p1;
  ReducedLock lock = ReducedLock::Unlocked;
  std::optional<ProcState> holder;  // present iff lock == HeldBySym
  CounterVector counters;

  friend auto operator<=>(const ReducedState&, const ReducedState&) = default;
};

inline std::string to_string(const ReducedState& s) {
  std::string out;
  switch (s.lock) {
    case ReducedLock::Unlocked: out = "unlock"; break;
    case ReducedLock::HeldByP1: out = "lock_p1"; break;
    case ReducedLock::HeldBySym: out = "lock_sym"; break;
  }
  out += " p1=" + to_string(s.p1);
  if (s.holder) out += " holder=" + to_string(*s.holder);
  out += " [";
  for (const auto& c : s.counters.classes) {
    out += " " + std::string(loc_name(c.loc)) + "(" + std::to_string(c.t) +
           ")x" + std::to_string(c.count);
  }
  out += " ]";
  return out;
}

enum class InitialMode { Multinomial, UniformCompositions };

// Symmetry-reduced spinlock model. The lock is granted to a waiting P1
// with probability 1/waiting and to one of the symmetric wait classes with
// probability count/waiting; the granted symmetric process is pulled out
// of the counters as the distinguished holder.
template <class P>
class ReducedModel {
 public:
  using State = ReducedState;
  using Prob = P;

  explicit ReducedModel(ModelParams<P> params, InitialMode mode = InitialMode::Multinomial)
      : params_(std::move(params)), mode_(mode) {
    params_.validate();
  }

  const ModelParams<P>& params() const { return params_; }
  std::uint32_t n() const { return params_.n; }
  InitialMode initial_mode() const { return mode_; }

  // P1 starts ncrit with a nu-sampled timer; the n-1 symmetric processes
  // start as a composition over the ncrit timer classes. Multinomial
  // weighs each composition to match the original product distribution;
  // UniformCompositions makes every composition equally likely.
  std::vector<std::pair<P, ReducedState>> initial() const {
    const auto& nu = params_.nu.entries();
    std::vector<std::pair<P, CounterVector>> comps =
        compositions(params_.n - 1);
    std::vector<std::pair<P, ReducedState>> out;
    out.reserve(nu.size() * comps.size());
    for (const auto& e : nu) {
      for (const auto& [cprob, counters] : comps) {
        ReducedState s;
        s.p1 = {Loc::Ncrit, e.value};
        s.lock = ReducedLock::Unlocked;
        s.counters = counters;
        out.emplace_back(e.prob * cprob, std::move(s));
      }
    }
    return out;
  }

  std::vector<std::pair<P, ReducedState>> successors(const ReducedState& s) const {
    std::vector<std::pair<P, ReducedState>> out;
    successors(s, out);
    return out;
  }

  void successors(const ReducedState& s, std::vector<std::pair<P, ReducedState>>& out) const {
    validate_state(s);

    // P1's own tick (guards on the pre-tick state).
    std::vector<std::pair<P, ProcState>> p1_branches;
    proc_tick_branches(s.p1, s.lock == ReducedLock::HeldByP1, params_, p1_branches);

    // Processes eligible for a grant this tick. The holder never is: when
    // a grant fires it is either absent or releasing from crit.
    const std::uint64_t sym_waiting = s.counters.wait_total();
    const bool p1_waiting = s.p1.loc == Loc::Wait;
    const std::uint64_t waiting = sym_waiting + (p1_waiting ? 1 : 0);

    // Combined lock/holder/counter outcomes.
    struct Outcome {
      P prob;
      ReducedLock lock;
      std::optional<ProcState> holder;
      std::optional<std::pair<Loc, Ticks>> remove_pre_shift;  // granted waiter's class
      std::optional<Ticks> returning_ncrit_timer;             // released holder's nu sample
    };
    std::vector<Outcome> outcomes;

    auto grant_branches = [&](const P& base_prob, std::optional<Ticks> returning) {
      // Uniform choice among the pre-tick waiters: P1 with weight 1, each
      // wait class with its count.
      P share = base_prob / P(static_cast<unsigned long long>(waiting));
      if (p1_waiting) {
        outcomes.push_back({share, ReducedLock::HeldByP1, std::nullopt, std::nullopt, returning});
      }
      for (const auto& c : s.counters.classes) {
        if (c.loc != Loc::Wait) continue;
        // The grantee spins through this tick (the lock did not point at
        // it before), so its wait timer still advances.
        ProcState new_holder{Loc::Wait, std::min(c.t + 1, kMaxWaitTimer)};
        outcomes.push_back({share * P(c.count), ReducedLock::HeldBySym, new_holder,
                            std::pair(c.loc, c.t), returning});
      }
    };

    switch (s.lock) {
      case ReducedLock::Unlocked:
        if (waiting == 0) {
          outcomes.push_back({P(1), ReducedLock::Unlocked, std::nullopt, std::nullopt, std::nullopt});
        } else {
          grant_branches(P(1), std::nullopt);
        }
        break;
      case ReducedLock::HeldByP1:
        if (!(s.p1.loc == Loc::Crit && s.p1.t == 0)) {
          outcomes.push_back({P(1), ReducedLock::HeldByP1, std::nullopt, std::nullopt, std::nullopt});
        } else if (waiting == 0) {
          outcomes.push_back({P(1), ReducedLock::Unlocked, std::nullopt, std::nullopt, std::nullopt});
        } else {
          grant_branches(P(1), std::nullopt);
        }
        break;
      case ReducedLock::HeldBySym: {
        const ProcState& h = *s.holder;
        if (!(h.loc == Loc::Crit && h.t == 0)) {
          std::vector<std::pair<P, ProcState>> holder_branches;
          proc_tick_branches(h, true, params_, holder_branches);
          for (auto& [hp, hs] : holder_branches) {
            outcomes.push_back({hp, ReducedLock::HeldBySym, hs, std::nullopt, std::nullopt});
          }
        } else {
          // Holder releases: it re-enters ncrit with a nu-sampled timer and
          // merges back into the counters, while the lock is granted or
          // freed in the same tick.
          for (const auto& e : params_.nu.entries()) {
            if (waiting == 0) {
              outcomes.push_back(
                  {e.prob, ReducedLock::Unlocked, std::nullopt, std::nullopt, e.value});
            } else {
              grant_branches(e.prob, e.value);
            }
          }
        }
        break;
      }
    }

    std::size_t first = out.size();
    for (const auto& oc : outcomes) {
      CounterVector counters = s.counters;
      if (oc.remove_pre_shift) counters.remove_one(oc.remove_pre_shift->first, oc.remove_pre_shift->second);
      counters = counters.shifted();
      if (oc.returning_ncrit_timer) counters.add(Loc::Ncrit, *oc.returning_ncrit_timer, 1);
      for (const auto& [p1_prob, p1_next] : p1_branches) {
        ReducedState next;
        next.p1 = p1_next;
        next.lock = oc.lock;
        next.holder = oc.holder;
        next.counters = counters;
        out.emplace_back(oc.prob * p1_prob, std::move(next));
      }
    }
    dedup_successors(out, first);
  }

  void encode(const ReducedState& s, Bytes& out) const {
    enc::put_byte(out, static_cast<std::uint8_t>(s.lock));
    enc::put_byte(out, static_cast<std::uint8_t>(s.p1.loc));
    enc::put_varint(out, s.p1.t);
    if (s.lock == ReducedLock::HeldBySym) {
      enc::put_byte(out, static_cast<std::uint8_t>(s.holder->loc));
      enc::put_varint(out, s.holder->t);
    }
    enc::put_varint(out, s.counters.classes.size());
    for (const auto& c : s.counters.classes) {
      enc::put_byte(out, static_cast<std::uint8_t>(c.loc));
      enc::put_varint(out, c.t);
      enc::put_varint(out, c.count);
    }
  }

  ReducedState decode(BytesView data) const {
    enc::Reader r(data);
    ReducedState s;
    s.lock = static_cast<ReducedLock>(r.byte());
    s.p1.loc = static_cast<Loc>(r.byte());
    s.p1.t = static_cast<Ticks>(r.varint());
    if (s.lock == ReducedLock::HeldBySym) {
      ProcState h;
      h.loc = static_cast<Loc>(r.byte());
      h.t = static_cast<Ticks>(r.varint());
      s.holder = h;
    }
    auto k = r.varint();
    s.counters.classes.resize(k);
    for (auto& c : s.counters.classes) {
      c.loc = static_cast<Loc>(r.byte());
      c.t = static_cast<Ticks>(r.varint());
      c.count = static_cast<std::uint32_t>(r.varint());
    }
    if (!r.done()) throw std::runtime_error("trailing bytes in state encoding");
    return s;
  }

  StateSummary summary(const ReducedState& s) const {
    StateSummary sum;
    sum.n = params_.n;
    sum.p1 = s.p1;
    sum.lock = static_cast<LockView>(s.lock);
    sum.sym_holder = s.holder;
    sum.sym_classes = s.counters.classes;
    return sum;
  }

  // Abstraction map: the quotient of a full state under permutation of
  // processes 2..n.
  ReducedState quotient_of(const FullState& f) const {
    ReducedState q;
    q.p1 = f.procs.at(0);
    if (f.lock == 0) {
      q.lock = ReducedLock::Unlocked;
    } else if (f.lock == 1) {
      q.lock = ReducedLock::HeldByP1;
    } else {
      q.lock = ReducedLock::HeldBySym;
      q.holder = f.procs.at(f.lock - 1);
    }
    for (std::uint32_t i = 1; i < f.procs.size(); ++i) {
      if (f.lock == i + 1) continue;
      q.counters.add(f.procs[i].loc, f.procs[i].t, 1);
    }
    return q;
  }

  void validate_state(const ReducedState& s) const {
    const bool has_holder = s.holder.has_value();
    if (has_holder != (s.lock == ReducedLock::HeldBySym)) {
      throw std::logic_error("holder present iff lock is held by a symmetric process");
    }
    if (has_holder && s.holder->loc == Loc::Ncrit) {
      throw std::logic_error("distinguished holder must be waiting or critical");
    }
    if (s.lock == ReducedLock::HeldByP1 && s.p1.loc == Loc::Ncrit) {
      throw std::logic_error("lock points at P1 while P1 is non-critical");
    }
    if (s.p1.loc == Loc::Crit && s.lock != ReducedLock::HeldByP1) {
      throw std::logic_error("P1 critical without the lock");
    }
    std::uint64_t expected = params_.n - 1 - (has_holder ? 1 : 0);
    if (s.counters.total() != expected) {
      throw std::logic_error("counter conservation violated: " + to_string(s));
    }
    for (const auto& c : s.counters.classes) {
      if (c.loc == Loc::Crit) throw std::logic_error("crit class in counters: " + to_string(s));
      if (c.count == 0) throw std::logic_error("zero-count class in counters");
    }
  }

 private:
  // Enumerates all compositions of `total` over support(nu), each with its
  // initial probability under the configured mode. Multinomial weights are
  // computed exactly and converted at the end.
  std::vector<std::pair<P, CounterVector>> compositions(std::uint64_t total) const {
    const auto& nu = params_.nu.entries();
    std::vector<std::pair<P, CounterVector>> out;

    std::vector<Rational> exact_nu;
    if (mode_ == InitialMode::Multinomial) {
      for (const auto& e : nu) {
        if constexpr (is_rational_v<P>) {
          exact_nu.push_back(e.prob);
        } else {
          exact_nu.push_back(parse_probability<Rational>(format_double(e.prob)));
        }
      }
      // Renormalise so tiny double parse residue cannot skew the weights.
      Rational sum(0);
      for (const auto& r : exact_nu) sum += r;
      for (auto& r : exact_nu) r /= sum;
    }

    CounterVector current;
    Rational weight(1);
    std::uint64_t count_guard = 0;
    enumerate(0, total, current, weight, exact_nu, out, count_guard);

    if (mode_ == InitialMode::UniformCompositions) {
      P share = P(1) / P(static_cast<unsigned long long>(out.size()));
      for (auto& [p, c] : out) p = share;
    }
    return out;
  }

  void enumerate(std::size_t idx, std::uint64_t remaining, CounterVector& current,
                 const Rational& weight, const std::vector<Rational>& exact_nu,
                 std::vector<std::pair<P, CounterVector>>& out,
                 std::uint64_t& count_guard) const {
    const auto& nu = params_.nu.entries();
    if (idx + 1 == nu.size()) {
      if (++count_guard > (1u << 26)) {
        throw std::runtime_error("reduced-model initial distribution too large");
      }
      CounterVector c = current;
      if (remaining > 0) c.add(Loc::Ncrit, nu[idx].value, static_cast<std::uint32_t>(remaining));
      Rational w = weight;
      if (mode_ == InitialMode::Multinomial && remaining > 0) {
        Rational pw = exact_nu[idx];
        // remaining identical picks of the final value; the binomial factor
        // is 1 here because all slots left go to this class.
        for (std::uint64_t i = 1; i < remaining; ++i) pw *= exact_nu[idx];
        w *= pw;
      }
      P prob;
      if (mode_ == InitialMode::Multinomial) {
        if constexpr (is_rational_v<P>) {
          prob = w;
        } else {
          prob = to_double(w);
        }
      } else {
        prob = P(0);  // filled in by the caller
      }
      out.emplace_back(prob, std::move(c));
      return;
    }
    // Choose x processes of class nu[idx]; multinomial weight accumulates
    // C(remaining, x) * p^x incrementally.
    Rational w = weight;
    for (std::uint64_t x = 0; x <= remaining; ++x) {
      CounterVector saved = current;
      if (x > 0) current.add(Loc::Ncrit, nu[idx].value, static_cast<std::uint32_t>(x));
      enumerate(idx + 1, remaining - x, current, w, exact_nu, out, count_guard);
      current = saved;
      if (mode_ == InitialMode::Multinomial && x < remaining) {
        w *= exact_nu[idx];
        w *= Rational(remaining - x);
        w /= Rational(x + 1);
      }
    }
  }

  static void dedup_successors(std::vector<std::pair<P, ReducedState>>& out, std::size_t first) {
    std::sort(out.begin() + first, out.end(),
              [](const auto& a, const auto& b) { return a.second < b.second; });
    std::size_t w = first;
    for (std::size_t r = first; r < out.size(); ++r) {
      if (r > first && out[r].second == out[w - 1].second) {
        out[w - 1].first += out[r].first;
      } else {
        if (w != r) out[w] = std::move(out[r]);
        ++w;
      }
    }
    out.resize(w);
  }

  ModelParams<P> params_;
  InitialMode mode_;
};

}  // namespace slmc

#endif  // SLMC_REDUCED_MODEL_HPP_
