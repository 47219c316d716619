#ifndef SLMC_PHASE_TYPE_HPP_
#define SLMC_PHASE_TYPE_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "slmc/dense_linear.hpp"
#include "slmc/dtmc.hpp"

namespace slmc {

// Distribution of the number of consecutive ticks spent inside a state set
// per visit: absorption time of the substochastic restriction Q from the
// long-run entry distribution, P(W=k) = e * Q^(k-1) * r.
template <class P>
struct WaitingTimeDistribution {
  std::vector<P> pmf;     // pmf[k] = P(W = k); pmf[0] = 0
  P mean = P(0);
  P entry_rate = P(0);    // long-run entries into the set per tick
  P truncated_tail = P(0);

  std::uint32_t quantile(double q) const {
    P cdf(0);
    for (std::size_t k = 1; k < pmf.size(); ++k) {
      cdf += pmf[k];
      if (to_double(cdf) >= q) return static_cast<std::uint32_t>(k);
    }
    throw std::runtime_error("quantile beyond computed tail");
  }
};

struct PhaseTypeOptions {
  double tail_eps = 1e-12;        // stop once remaining mass is below this
  std::uint64_t max_steps = 10'000'000;
  double mean_eps = 1e-14;        // Gauss-Seidel tolerance for expected steps
  std::uint64_t mean_max_iter = 1'000'000;
};

template <class P>
WaitingTimeDistribution<P> phase_type_waiting(const SparseDTMC<P>& dtmc, const std::vector<P>& pi,
                                              const Bitset& wait_set,
                                              const PhaseTypeOptions& opt = {}) {
  const std::uint32_t n = dtmc.num_states();
  if (pi.size() != n || wait_set.size() != n) throw std::invalid_argument("size mismatch");
  if (!wait_set.any()) throw std::invalid_argument("wait set is empty");

  std::vector<std::uint32_t> wait_states;
  std::vector<std::uint32_t> local(n, UINT32_MAX);
  for (std::size_t s = wait_set.find_first(); s != Bitset::npos; s = wait_set.find_next(s)) {
    local[s] = static_cast<std::uint32_t>(wait_states.size());
    wait_states.push_back(static_cast<std::uint32_t>(s));
  }
  const std::size_t m = wait_states.size();

  WaitingTimeDistribution<P> out;

  // Entry distribution: incoming long-run probability flux from outside.
  std::vector<P> entry(m, P(0));
  for (std::uint32_t s = 0; s < n; ++s) {
    if (wait_set.test(s) || pi[s] == P(0)) continue;
    auto rc = dtmc.row_cols(s);
    auto rp = dtmc.row_probs(s);
    for (std::size_t e = 0; e < rc.size(); ++e) {
      if (local[rc[e]] != UINT32_MAX) entry[local[rc[e]]] += pi[s] * rp[e];
    }
  }
  for (const P& v : entry) out.entry_rate += v;
  if (!(out.entry_rate > P(0))) {
    throw std::runtime_error("zero entry rate: the observed process never enters the wait set");
  }
  for (P& v : entry) v = v / out.entry_rate;

  // Substochastic restriction rows and per-state exit probability.
  std::vector<std::uint64_t> q_offsets(m + 1, 0);
  std::vector<std::uint32_t> q_cols;
  std::vector<P> q_probs;
  std::vector<P> exit(m, P(0));
  for (std::size_t i = 0; i < m; ++i) {
    auto rc = dtmc.row_cols(wait_states[i]);
    auto rp = dtmc.row_probs(wait_states[i]);
    for (std::size_t e = 0; e < rc.size(); ++e) {
      if (local[rc[e]] != UINT32_MAX) {
        q_cols.push_back(local[rc[e]]);
        q_probs.push_back(rp[e]);
      } else {
        exit[i] += rp[e];
      }
    }
    q_offsets[i + 1] = q_cols.size();
  }

  // Expected sojourn: m_i = 1 + sum_j Q_ij m_j. Exact dense solve for
  // rationals, Gauss-Seidel otherwise.
  if constexpr (is_rational_v<P>) {
    std::vector<std::vector<P>> a(m, std::vector<P>(m, P(0)));
    std::vector<P> b(m, P(1));
    for (std::size_t i = 0; i < m; ++i) {
      a[i][i] = P(1);
      for (std::uint64_t e = q_offsets[i]; e < q_offsets[i + 1]; ++e) {
        a[i][q_cols[e]] -= q_probs[e];
      }
    }
    std::vector<P> steps = solve_dense(std::move(a), std::move(b));
    for (std::size_t i = 0; i < m; ++i) out.mean += entry[i] * steps[i];
  } else {
    std::vector<double> steps(m, 1.0);
    double delta = 1.0;
    std::uint64_t iter = 0;
    while (delta > opt.mean_eps && iter < opt.mean_max_iter) {
      delta = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        double acc = 1.0, self = 0.0;
        for (std::uint64_t e = q_offsets[i]; e < q_offsets[i + 1]; ++e) {
          if (q_cols[e] == i) self = to_double(q_probs[e]);
          else acc += to_double(q_probs[e]) * steps[q_cols[e]];
        }
        double nv = self < 1.0 ? acc / (1.0 - self) : acc;
        delta = std::max(delta, std::abs(nv - steps[i]));
        steps[i] = nv;
      }
      ++iter;
    }
    if (delta > opt.mean_eps) throw std::runtime_error("expected-sojourn solve did not converge");
    double mean = 0.0;
    for (std::size_t i = 0; i < m; ++i) mean += to_double(entry[i]) * steps[i];
    out.mean = P(mean);
  }

  // Probability mass function by forward iteration of the entry vector.
  out.pmf.push_back(P(0));
  std::vector<P> w = entry;
  std::vector<P> next(m);
  P cdf(0);
  for (std::uint64_t k = 1; k <= opt.max_steps; ++k) {
    P mass(0);
    for (std::size_t i = 0; i < m; ++i) mass += w[i] * exit[i];
    out.pmf.push_back(mass);
    cdf += mass;
    P tail = P(1) - cdf;
    if (to_double(tail) <= opt.tail_eps) {
      out.truncated_tail = tail;
      return out;
    }
    std::fill(next.begin(), next.end(), P(0));
    for (std::size_t i = 0; i < m; ++i) {
      if (w[i] == P(0)) continue;
      for (std::uint64_t e = q_offsets[i]; e < q_offsets[i + 1]; ++e) {
        next[q_cols[e]] += w[i] * q_probs[e];
      }
    }
    std::swap(w, next);
  }
  throw std::runtime_error("waiting-time tail did not fall below tolerance");
}

}  // namespace slmc

#endif  // SLMC_PHASE_TYPE_HPP_
