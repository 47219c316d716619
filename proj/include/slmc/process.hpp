#ifndef SLMC_PROCESS_HPP_
#define SLMC_PROCESS_HPP_

#include <compare>
#include <cstdint>
#include <string>

#include "slmc/distribution.hpp"

namespace slmc {

enum class Loc : std::uint8_t { Ncrit = 0, Wait = 1, Crit = 2 };

inline const char* loc_name(Loc loc) {
  switch (loc) {
    case Loc::Ncrit: return "ncrit";
    case Loc::Wait: return "wait";
    case Loc::Crit: return "crit";
  }
  return "?";
}

// Local state of one process: control-flow location plus its timer. In
// ncrit/crit the timer counts remaining ticks; in wait it records whether
// the lock could be entered immediately (1) or only after spinning (2).
struct ProcState {
  Loc loc = Loc::Ncrit;
  Ticks t = 0;

  friend auto operator<=>(const ProcState&, const ProcState&) = default;
};

inline std::string to_string(const ProcState& p) {
  return std::string(loc_name(p.loc)) + "(" + std::to_string(p.t) + ")";
}

// Maximum wait timer; min(t+1, 2) saturates here while spinning.
inline constexpr Ticks kMaxWaitTimer = 2;

// One tick of a single process, guards evaluated on the pre-tick state.
// `lock_points_here` is true when the lock component points at this
// process. Appends (probability, post-tick state) branches.
template <class P>
void proc_tick_branches(const ProcState& p, bool lock_points_here, const ModelParams<P>& params,
                        std::vector<std::pair<P, ProcState>>& out) {
  switch (p.loc) {
    case Loc::Ncrit:
      if (p.t > 0) {
        out.emplace_back(P(1), ProcState{Loc::Ncrit, p.t - 1});
      } else {
        // The edge into wait does not assign the timer; t=0 is carried.
        out.emplace_back(P(1), ProcState{Loc::Wait, 0});
      }
      break;
    case Loc::Wait:
      if (!lock_points_here) {
        out.emplace_back(P(1), ProcState{Loc::Wait, std::min(p.t + 1, kMaxWaitTimer)});
      } else if (p.t == 1) {
        for (const auto& e : params.gamma0.entries()) {
          out.emplace_back(e.prob, ProcState{Loc::Crit, e.value});
        }
      } else if (p.t == 2) {
        for (const auto& e : params.gamma1.entries()) {
          out.emplace_back(e.prob, ProcState{Loc::Crit, e.value});
        }
      } else {
        throw std::logic_error("waiting process holds the lock with timer 0");
      }
      break;
    case Loc::Crit:
      if (p.t > 0) {
        out.emplace_back(P(1), ProcState{Loc::Crit, p.t - 1});
      } else {
        for (const auto& e : params.nu.entries()) {
          out.emplace_back(e.prob, ProcState{Loc::Ncrit, e.value});
        }
      }
      break;
  }
}

}  // namespace slmc

#endif  // SLMC_PROCESS_HPP_
