#ifndef SLMC_MONTECARLO_HPP_
#define SLMC_MONTECARLO_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <vector>

#include "slmc/distribution.hpp"
#include "slmc/process.hpp"

namespace slmc {

// Discrete-event simulation of the full (non-reduced) tick semantics.
// Written directly against the control-flow graphs, independent of the
// model-checking successor code, so solver results can be cross-checked
// against a second implementation path.
struct SimConfig {
  ModelParams<double> params;
  std::uint64_t ticks = 10'000'000;
  std::uint64_t warmup = UINT64_MAX;  // UINT64_MAX: 10% of ticks
  std::uint64_t seed = 1;
  std::uint32_t batches = 32;

  std::uint64_t effective_warmup() const { return warmup == UINT64_MAX ? ticks / 10 : warmup; }

  void validate() const {
    params.validate();
    if (batches < 2) throw std::invalid_argument("need at least two batches");
    if (ticks <= effective_warmup()) throw std::invalid_argument("ticks must exceed warmup");
  }
};

struct SimEstimate {
  double value = 0.0;
  double stderr = 0.0;
};

struct SimulationResult {
  std::map<std::uint32_t, SimEstimate> ncrit_histogram;
  SimEstimate p1_spinning;
  SimEstimate any_spinning;
  std::map<std::uint32_t, SimEstimate> distance_spectrum;
  SimEstimate p_acquire_no_wait;
  SimEstimate expected_wait;
  SimEstimate wait_quantile_95;     // batch-means view of the quantile
  std::uint32_t pooled_wait_quantile_95 = 0;
  std::uint64_t completed_waits = 0;
  std::uint64_t measured_ticks = 0;
};

namespace detail {

class Sampler {
 public:
  explicit Sampler(const DiscreteDistribution<double>& d) {
    double acc = 0.0;
    for (const auto& e : d.entries()) {
      acc += e.prob;
      cdf_.push_back(acc);
      values_.push_back(e.value);
    }
    cdf_.back() = 1.0;
  }

  Ticks operator()(std::mt19937_64& rng) const {
    if (values_.size() == 1) return values_[0];
    double u = std::uniform_real_distribution<double>()(rng);
    for (std::size_t i = 0; i < cdf_.size(); ++i) {
      if (u < cdf_[i]) return values_[i];
    }
    return values_.back();
  }

 private:
  std::vector<double> cdf_;
  std::vector<Ticks> values_;
};

inline SimEstimate batch_estimate(const std::vector<double>& batch_means) {
  const std::size_t b = batch_means.size();
  double mean = 0.0;
  for (double v : batch_means) mean += v;
  mean /= static_cast<double>(b);
  double var = 0.0;
  for (double v : batch_means) var += (v - mean) * (v - mean);
  var /= static_cast<double>(b - 1);
  return {mean, std::sqrt(var / static_cast<double>(b))};
}

}  // namespace detail

inline SimulationResult simulate(const SimConfig& cfg) {
  cfg.validate();
  const std::uint32_t n = cfg.params.n;
  const Ticks max_nu = cfg.params.nu.max_value();
  std::mt19937_64 rng(cfg.seed);
  detail::Sampler sample_nu(cfg.params.nu);
  detail::Sampler sample_g0(cfg.params.gamma0);
  detail::Sampler sample_g1(cfg.params.gamma1);

  std::vector<Loc> loc(n, Loc::Ncrit);
  std::vector<Ticks> t(n);
  for (std::uint32_t i = 0; i < n; ++i) t[i] = sample_nu(rng);
  std::uint32_t lock = 0;

  const std::uint64_t warmup = cfg.effective_warmup();
  const std::uint64_t effective = cfg.ticks - warmup;
  const std::uint64_t batch_len = effective / cfg.batches;
  if (batch_len == 0) throw std::invalid_argument("too few ticks per batch");
  const std::uint64_t measured = batch_len * cfg.batches;

  const std::uint32_t b_count = cfg.batches;
  std::vector<std::vector<double>> hist(b_count, std::vector<double>(n + 1, 0.0));
  std::vector<double> p1w(b_count, 0.0), anyw(b_count, 0.0);
  std::vector<std::vector<double>> dist(b_count, std::vector<double>(max_nu + 1, 0.0));
  std::vector<double> acq_total(b_count, 0.0), acq_nowait(b_count, 0.0);
  std::vector<double> wait_sum(b_count, 0.0), wait_count(b_count, 0.0);
  std::vector<std::map<std::uint32_t, std::uint64_t>> wait_hist(b_count);
  std::map<std::uint32_t, std::uint64_t> pooled_wait_hist;

  std::vector<std::uint32_t> waiters;
  std::vector<std::uint32_t> timer_bins(max_nu + 1);
  std::vector<char> dist_seen(max_nu + 1, false);
  std::uint64_t p1_wait_ticks = 0;  // current wait visit length so far

  for (std::uint64_t tick = 0; tick < cfg.ticks; ++tick) {
    const bool measuring = tick >= warmup && tick < warmup + measured;
    const std::uint32_t batch =
        measuring ? static_cast<std::uint32_t>((tick - warmup) / batch_len) : 0;

    // measure the pre-tick state
    if (measuring) {
      std::uint32_t ncrit = 0;
      bool any_wait = false;
      std::fill(timer_bins.begin(), timer_bins.end(), 0);
      for (std::uint32_t i = 0; i < n; ++i) {
        if (loc[i] == Loc::Ncrit) {
          ++ncrit;
          ++timer_bins[t[i]];
        } else if (loc[i] == Loc::Wait) {
          any_wait = true;
        }
      }
      hist[batch][ncrit] += 1.0;
      if (loc[0] == Loc::Wait) p1w[batch] += 1.0;
      if (any_wait) anyw[batch] += 1.0;
      if (ncrit >= 2) {
        // each distance value counts once per tick, however many pairs hit it
        std::fill(dist_seen.begin(), dist_seen.end(), false);
        std::int64_t prev = -1;
        for (std::uint32_t v = 0; v <= max_nu; ++v) {
          if (timer_bins[v] == 0) continue;
          if (timer_bins[v] >= 2) dist_seen[0] = true;
          if (prev >= 0) dist_seen[v - prev] = true;
          prev = v;
        }
        for (std::uint32_t k = 0; k <= max_nu; ++k) {
          if (dist_seen[k]) dist[batch][k] += 1.0;
        }
      }
    }

    // one synchronous tick, guards on the pre-tick state
    const std::uint32_t pre_lock = lock;
    waiters.clear();
    for (std::uint32_t i = 0; i < n; ++i) {
      if (loc[i] == Loc::Wait) waiters.push_back(i + 1);
    }
    bool releasing =
        pre_lock != 0 && loc[pre_lock - 1] == Loc::Crit && t[pre_lock - 1] == 0;
    if (pre_lock == 0 || releasing) {
      if (waiters.empty()) {
        lock = 0;
      } else if (waiters.size() == 1) {
        lock = waiters[0];
      } else {
        std::uniform_int_distribution<std::size_t> pick(0, waiters.size() - 1);
        lock = waiters[pick(rng)];
      }
    }

    bool p1_acquired = false;
    bool p1_acquired_immediately = false;
    if (loc[0] == Loc::Wait) ++p1_wait_ticks;
    for (std::uint32_t i = 0; i < n; ++i) {
      const bool lock_i = pre_lock == i + 1;
      switch (loc[i]) {
        case Loc::Ncrit:
          if (t[i] > 0) --t[i];
          else loc[i] = Loc::Wait;  // timer stays 0
          break;
        case Loc::Wait:
          if (!lock_i) {
            t[i] = std::min(t[i] + 1, kMaxWaitTimer);
          } else {
            if (i == 0) {
              p1_acquired = true;
              p1_acquired_immediately = t[i] == 1;
            }
            t[i] = t[i] == 1 ? sample_g0(rng) : sample_g1(rng);
            loc[i] = Loc::Crit;
          }
          break;
        case Loc::Crit:
          if (t[i] > 0) --t[i];
          else {
            loc[i] = Loc::Ncrit;
            t[i] = sample_nu(rng);
          }
          break;
      }
    }

    if (p1_acquired && measuring) {
      acq_total[batch] += 1.0;
      if (p1_acquired_immediately) acq_nowait[batch] += 1.0;
      wait_sum[batch] += static_cast<double>(p1_wait_ticks);
      wait_count[batch] += 1.0;
      wait_hist[batch][static_cast<std::uint32_t>(p1_wait_ticks)] += 1;
      pooled_wait_hist[static_cast<std::uint32_t>(p1_wait_ticks)] += 1;
    }
    if (p1_acquired) p1_wait_ticks = 0;
  }

  SimulationResult out;
  out.measured_ticks = measured;
  const double len = static_cast<double>(batch_len);

  std::vector<double> tmp(b_count);
  for (std::uint32_t k = 0; k <= n; ++k) {
    bool seen = false;
    for (std::uint32_t b = 0; b < b_count; ++b) {
      tmp[b] = hist[b][k] / len;
      seen = seen || hist[b][k] > 0;
    }
    if (seen) out.ncrit_histogram[k] = detail::batch_estimate(tmp);
  }
  for (std::uint32_t b = 0; b < b_count; ++b) tmp[b] = p1w[b] / len;
  out.p1_spinning = detail::batch_estimate(tmp);
  for (std::uint32_t b = 0; b < b_count; ++b) tmp[b] = anyw[b] / len;
  out.any_spinning = detail::batch_estimate(tmp);
  for (std::uint32_t k = 0; k <= max_nu; ++k) {
    for (std::uint32_t b = 0; b < b_count; ++b) tmp[b] = dist[b][k] / len;
    out.distance_spectrum[k] = detail::batch_estimate(tmp);
  }

  std::vector<double> ratio, means, quants;
  for (std::uint32_t b = 0; b < b_count; ++b) {
    if (acq_total[b] > 0) ratio.push_back(acq_nowait[b] / acq_total[b]);
    if (wait_count[b] > 0) {
      means.push_back(wait_sum[b] / wait_count[b]);
      std::uint64_t total = 0;
      for (const auto& [k, c] : wait_hist[b]) total += c;
      std::uint64_t acc = 0;
      for (const auto& [k, c] : wait_hist[b]) {
        acc += c;
        if (static_cast<double>(acc) >= 0.95 * static_cast<double>(total)) {
          quants.push_back(static_cast<double>(k));
          break;
        }
      }
    }
  }
  if (ratio.size() >= 2) out.p_acquire_no_wait = detail::batch_estimate(ratio);
  if (means.size() >= 2) out.expected_wait = detail::batch_estimate(means);
  if (quants.size() >= 2) out.wait_quantile_95 = detail::batch_estimate(quants);

  std::uint64_t total = 0;
  for (const auto& [k, c] : pooled_wait_hist) {
    total += c;
    out.completed_waits += c;
  }
  std::uint64_t acc = 0;
  for (const auto& [k, c] : pooled_wait_hist) {
    acc += c;
    if (static_cast<double>(acc) >= 0.95 * static_cast<double>(total)) {
      out.pooled_wait_quantile_95 = k;
      break;
    }
  }
  return out;
}

}  // namespace slmc

#endif  // SLMC_MONTECARLO_HPP_
