#ifndef SLMC_ANALYZE_HPP_
#define SLMC_ANALYZE_HPP_

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "slmc/dtmc.hpp"
#include "slmc/explore.hpp"
#include "slmc/phase_type.hpp"
#include "slmc/summary.hpp"

namespace slmc {

// Long-run properties of one explored model under a steady-state vector.
template <class P>
struct PropertyReport {
  std::map<std::uint32_t, P> ncrit_histogram;   // k -> P(exactly k in ncrit)
  P p1_spinning = P(0);                         // P1 waiting for the lock
  P any_spinning = P(0);                        // some process waiting
  std::map<std::uint32_t, P> distance_spectrum; // k -> P(adjacent ncrit timers at distance k)
  P p_acquire_no_wait = P(0);                   // acquisitions entered at wait timer 1
  P expected_wait = P(0);                       // mean ticks per wait-set visit of P1
  std::uint32_t wait_quantile_95 = 0;
};

template <class P>
const StateFeatures& require_features(const SparseDTMC<P>& dtmc) {
  if (!dtmc.features) {
    throw std::invalid_argument("chain was explored without per-state features");
  }
  return *dtmc.features;
}

template <class P>
std::map<std::uint32_t, P> ncrit_histogram(const SparseDTMC<P>& dtmc, const std::vector<P>& pi) {
  const auto& f = require_features(dtmc);
  std::map<std::uint32_t, P> hist;
  for (std::uint32_t s = 0; s < dtmc.num_states(); ++s) {
    if (pi[s] == P(0)) continue;
    hist[f.ncrit_count[s]] += pi[s];
  }
  return hist;
}

template <class P>
std::pair<P, P> spinning_probabilities(const SparseDTMC<P>& dtmc, const std::vector<P>& pi) {
  const auto& f = require_features(dtmc);
  P p1(0), any(0);
  for (std::uint32_t s = 0; s < dtmc.num_states(); ++s) {
    if (pi[s] == P(0)) continue;
    if (f.has_flag(s, StateFeatures::kP1Wait)) p1 += pi[s];
    if (f.has_flag(s, StateFeatures::kAnyWait)) any += pi[s];
  }
  return {p1, any};
}

template <class P>
std::map<std::uint32_t, P> distance_spectrum(const SparseDTMC<P>& dtmc, const std::vector<P>& pi) {
  const auto& f = require_features(dtmc);
  std::map<std::uint32_t, P> spec;
  for (std::uint32_t k = 0; k < f.dist_bits; ++k) spec[k] = P(0);
  for (std::uint32_t s = 0; s < dtmc.num_states(); ++s) {
    if (pi[s] == P(0)) continue;
    for (std::uint32_t w = 0; w < f.dist_words; ++w) {
      std::uint64_t bits = f.dist[static_cast<std::size_t>(s) * f.dist_words + w];
      while (bits) {
        std::uint32_t k = w * 64 + static_cast<std::uint32_t>(std::countr_zero(bits));
        spec[k] += pi[s];
        bits &= bits - 1;
      }
    }
  }
  return spec;
}

struct AcquisitionFrequencies {
  double via_gamma0 = 0;  // long-run frequency of P1 entering crit at wait timer 1
  double total = 0;       // all P1 wait->crit transitions per tick
};

// Edge frequencies sum pi(s) * P(s, s') over the transition sets
// {P1 granted, timer 1} x {P1 critical} and {P1 granted} x {P1 critical}.
template <class P>
AcquisitionFrequencies acquisition_frequencies(const SparseDTMC<P>& dtmc,
                                               const std::vector<P>& pi) {
  const auto& f = require_features(dtmc);
  P g0(0), total(0);
  for (std::uint32_t s = 0; s < dtmc.num_states(); ++s) {
    if (pi[s] == P(0) || !f.has_flag(s, StateFeatures::kP1Granted)) continue;
    auto rc = dtmc.row_cols(s);
    auto rp = dtmc.row_probs(s);
    P mass(0);
    for (std::size_t e = 0; e < rc.size(); ++e) {
      if (f.has_flag(rc[e], StateFeatures::kP1Crit)) mass += pi[s] * rp[e];
    }
    total += mass;
    if (f.has_flag(s, StateFeatures::kP1GrantedImmediate)) g0 += mass;
  }
  return {to_double(g0), to_double(total)};
}

template <class P>
Bitset p1_wait_set(const SparseDTMC<P>& dtmc) {
  const auto& f = require_features(dtmc);
  Bitset wait(dtmc.num_states());
  for (std::uint32_t s = 0; s < dtmc.num_states(); ++s) {
    if (f.has_flag(s, StateFeatures::kP1Wait)) wait.set(s);
  }
  return wait;
}

struct AnalyzeOptions {
  PhaseTypeOptions phase_type;
  double quantile = 0.95;
};

template <class P>
PropertyReport<P> analyze(const SparseDTMC<P>& dtmc, const std::vector<P>& pi,
                          const AnalyzeOptions& opt = {}) {
  PropertyReport<P> report;
  report.ncrit_histogram = ncrit_histogram(dtmc, pi);
  auto [p1s, anys] = spinning_probabilities(dtmc, pi);
  report.p1_spinning = p1s;
  report.any_spinning = anys;
  report.distance_spectrum = distance_spectrum(dtmc, pi);

  auto freq = acquisition_frequencies(dtmc, pi);
  if (freq.total <= 0) {
    throw std::runtime_error("P1 never acquires the lock; acquisition ratio undefined");
  }
  report.p_acquire_no_wait = P(freq.via_gamma0) / P(freq.total);
  if constexpr (is_rational_v<P>) {
    // recompute the ratio exactly rather than via doubles
    const auto& f = require_features(dtmc);
    P g0(0), total(0);
    for (std::uint32_t s = 0; s < dtmc.num_states(); ++s) {
      if (pi[s] == P(0) || !f.has_flag(s, StateFeatures::kP1Granted)) continue;
      auto rc = dtmc.row_cols(s);
      auto rp = dtmc.row_probs(s);
      P mass(0);
      for (std::size_t e = 0; e < rc.size(); ++e) {
        if (f.has_flag(rc[e], StateFeatures::kP1Crit)) mass += pi[s] * rp[e];
      }
      total += mass;
      if (f.has_flag(s, StateFeatures::kP1GrantedImmediate)) g0 += mass;
    }
    report.p_acquire_no_wait = g0 / total;
  }

  auto wait = phase_type_waiting(dtmc, pi, p1_wait_set(dtmc), opt.phase_type);
  report.expected_wait = wait.mean;
  report.wait_quantile_95 = wait.quantile(opt.quantile);
  return report;
}

// Standard label set attached to explored models; "p1_acq" marks the
// states from which P1 enters its critical section on the next tick.
inline std::vector<LabelDef> standard_labels() {
  return {
      {"p1_wait", [](const StateSummary& s) { return s.p1.loc == Loc::Wait; }},
      {"any_wait", [](const StateSummary& s) { return s.any_wait(); }},
      {"p1_crit", [](const StateSummary& s) { return s.p1.loc == Loc::Crit; }},
      {"p1_acq",
       [](const StateSummary& s) { return s.lock == LockView::HeldByP1 && s.p1.loc == Loc::Wait; }},
      {"p1_acq_nowait",
       [](const StateSummary& s) {
         return s.lock == LockView::HeldByP1 && s.p1.loc == Loc::Wait && s.p1.t == 1;
       }},
  };
}

}  // namespace slmc

#endif  // SLMC_ANALYZE_HPP_
