#ifndef SLMC_FULL_MODEL_HPP_
#define SLMC_FULL_MODEL_HPP_

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "slmc/distribution.hpp"
#include "slmc/encoding.hpp"
#include "slmc/process.hpp"
#include "slmc/summary.hpp"

namespace slmc {

// Global state of the non-reduced model: the lock (0 = free, otherwise the
// 1-based index of the process it points at) and one ProcState per process.
struct FullState {
  std::uint32_t lock = 0;
  std::vector<ProcState> procs;

  friend auto operator<=>(const FullState&, const FullState&) = default;
};

inline std::string to_string(const FullState& s) {
  std::string out = s.lock == 0 ? "unlock" : "lock_" + std::to_string(s.lock);
  for (const auto& p : s.procs) out += " " + to_string(p);
  return out;
}

// One-tick synchronous semantics of n identical processes composed with the
// lock. All guards are evaluated against the pre-tick state; independent
// probabilistic choices (nu/gamma sampling, uniform grant among waiters)
// multiply.
template <class P>
class FullModel {
 public:
  using State = FullState;
  using Prob = P;

  explicit FullModel(ModelParams<P> params) : params_(std::move(params)) { params_.validate(); }

  const ModelParams<P>& params() const { return params_; }
  std::uint32_t n() const { return params_.n; }

  // Product distribution: every process independently starts its
  // non-critical section with a nu-sampled timer, lock free.
  std::vector<std::pair<P, FullState>> initial() const {
    const auto& nu = params_.nu.entries();
    double combos = 1;
    for (std::uint32_t i = 0; i < params_.n; ++i) {
      combos *= static_cast<double>(nu.size());
      if (combos > (1u << 26)) {
        throw std::runtime_error("full-model initial distribution too large (|support(nu)|^n)");
      }
    }
    std::vector<std::pair<P, FullState>> out;
    std::vector<std::size_t> pick(params_.n, 0);
    while (true) {
      FullState s;
      s.lock = 0;
      s.procs.resize(params_.n);
      P prob(1);
      for (std::uint32_t i = 0; i < params_.n; ++i) {
        s.procs[i] = {Loc::Ncrit, nu[pick[i]].value};
        prob = prob * nu[pick[i]].prob;
      }
      out.emplace_back(std::move(prob), std::move(s));
      std::uint32_t i = 0;
      for (; i < params_.n; ++i) {
        if (++pick[i] < nu.size()) break;
        pick[i] = 0;
      }
      if (i == params_.n) break;
    }
    return out;
  }

  std::vector<std::pair<P, FullState>> successors(const FullState& s) const {
    std::vector<std::pair<P, FullState>> out;
    successors(s, out);
    return out;
  }

  // Appends the deduplicated successor distribution of one global tick.
  void successors(const FullState& s, std::vector<std::pair<P, FullState>>& out) const {
    validate_state(s);
    const std::uint32_t n = params_.n;

    std::vector<std::uint32_t> waiters;
    for (std::uint32_t i = 0; i < n; ++i) {
      if (s.procs[i].loc == Loc::Wait) waiters.push_back(i + 1);
    }

    // Lock component, Fig.-3 style: grants pick uniformly among the
    // processes waiting in the pre-tick state.
    std::vector<std::pair<P, std::uint32_t>> lock_branches;
    bool releasing = false;
    if (s.lock != 0) {
      const ProcState& h = s.procs[s.lock - 1];
      releasing = h.loc == Loc::Crit && h.t == 0;
    }
    if (s.lock != 0 && !releasing) {
      lock_branches.emplace_back(P(1), s.lock);
    } else if (waiters.empty()) {
      lock_branches.emplace_back(P(1), 0u);
    } else {
      P share = P(1) / P(static_cast<unsigned>(waiters.size()));
      for (std::uint32_t k : waiters) lock_branches.emplace_back(share, k);
    }

    // Per-process branches, guards on the pre-tick state.
    std::vector<std::vector<std::pair<P, ProcState>>> proc_branches(n);
    for (std::uint32_t i = 0; i < n; ++i) {
      proc_tick_branches(s.procs[i], s.lock == i + 1, params_, proc_branches[i]);
    }

    // Cartesian product of the independent choices.
    std::size_t first = out.size();
    std::vector<std::size_t> pick(n, 0);
    for (const auto& [lock_prob, lock_next] : lock_branches) {
      std::fill(pick.begin(), pick.end(), 0);
      while (true) {
        FullState next;
        next.lock = lock_next;
        next.procs.resize(n);
        P prob = lock_prob;
        for (std::uint32_t i = 0; i < n; ++i) {
          const auto& [p_prob, p_state] = proc_branches[i][pick[i]];
          prob = prob * p_prob;
          next.procs[i] = p_state;
        }
        out.emplace_back(std::move(prob), std::move(next));
        std::uint32_t i = 0;
        for (; i < n; ++i) {
          if (++pick[i] < proc_branches[i].size()) break;
          pick[i] = 0;
        }
        if (i == n) break;
      }
    }
    dedup_successors(out, first);
  }

  void encode(const FullState& s, Bytes& out) const {
    enc::put_varint(out, s.lock);
    for (const auto& p : s.procs) {
      enc::put_byte(out, static_cast<std::uint8_t>(p.loc));
      enc::put_varint(out, p.t);
    }
  }

  FullState decode(BytesView data) const {
    enc::Reader r(data);
    FullState s;
    s.lock = static_cast<std::uint32_t>(r.varint());
    s.procs.resize(params_.n);
    for (auto& p : s.procs) {
      p.loc = static_cast<Loc>(r.byte());
      p.t = static_cast<Ticks>(r.varint());
    }
    if (!r.done()) throw std::runtime_error("trailing bytes in state encoding");
    return s;
  }

  StateSummary summary(const FullState& s) const {
    StateSummary sum;
    sum.n = params_.n;
    sum.p1 = s.procs[0];
    if (s.lock == 0) {
      sum.lock = LockView::Unlocked;
    } else if (s.lock == 1) {
      sum.lock = LockView::HeldByP1;
    } else {
      sum.lock = LockView::HeldBySym;
      sum.sym_holder = s.procs[s.lock - 1];
    }
    std::vector<ProcState> rest;
    rest.reserve(params_.n);
    for (std::uint32_t i = 1; i < params_.n; ++i) {
      if (s.lock == i + 1) continue;
      rest.push_back(s.procs[i]);
    }
    std::sort(rest.begin(), rest.end());
    for (const auto& p : rest) {
      if (!sum.sym_classes.empty() && sum.sym_classes.back().loc == p.loc &&
          sum.sym_classes.back().t == p.t) {
        sum.sym_classes.back().count += 1;
      } else {
        sum.sym_classes.push_back({p.loc, p.t, 1});
      }
    }
    return sum;
  }

  void validate_state(const FullState& s) const {
    if (s.procs.size() != params_.n) throw std::logic_error("state has wrong process count");
    if (s.lock > params_.n) throw std::logic_error("lock index out of range");
    std::uint32_t crit = 0;
    for (std::uint32_t i = 0; i < params_.n; ++i) {
      if (s.procs[i].loc == Loc::Crit) {
        ++crit;
        if (s.lock != i + 1) {
          throw std::logic_error("critical process without the lock: " + to_string(s));
        }
      }
    }
    if (crit > 1) throw std::logic_error("mutual exclusion violated: " + to_string(s));
    if (s.lock != 0 && s.procs[s.lock - 1].loc == Loc::Ncrit) {
      throw std::logic_error("lock points at a non-waiting process: " + to_string(s));
    }
  }

 private:
  static void dedup_successors(std::vector<std::pair<P, FullState>>& out, std::size_t first) {
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
};

}  // namespace slmc

#endif  // SLMC_FULL_MODEL_HPP_
