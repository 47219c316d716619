#ifndef SLMC_STATIONARY_HPP_
#define SLMC_STATIONARY_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "slmc/bscc.hpp"
#include "slmc/dense_linear.hpp"
#include "slmc/dtmc.hpp"

namespace slmc {

struct StationaryOptions {
  double eps = 1e-10;               // residual tolerance, max-norm of pi*P - pi
  std::uint64_t max_iter = 1'000'000;  // Gauss-Seidel sweeps per bscc
  std::uint32_t check_every = 4;    // residual evaluation cadence
  // Sweeps continue to eps/polish so the solution error, not just the
  // residual, tracks eps; keeps results ordering-independent within ~10 eps
  // for moderately conditioned chains.
  double polish = 100.0;
  bool use_dense = false;           // direct dense solve (forced for Rational)
  std::size_t dense_limit = 20'000;
};

template <class P>
struct SteadyStateResult {
  std::vector<P> pi;        // long-run fraction of time per state
  P residual = P(0);        // max-norm of pi*P - pi
  std::uint64_t iterations = 0;
  bool converged = false;
  BsccDecomposition<P> decomposition;
};

namespace detail {

// Column-compressed view of the submatrix spanned by one bscc. Rows of
// bscc states stay inside the bscc, so no mass is lost.
template <class P>
struct BsccColumns {
  std::vector<std::uint64_t> col_offsets;
  std::vector<std::uint32_t> rows;  // local indices
  std::vector<double> probs;
  std::vector<double> self;  // P(j,j)

  BsccColumns(const SparseDTMC<P>& dtmc, const std::vector<std::uint32_t>& states,
              const std::vector<std::uint32_t>& local) {
    const std::size_t m = states.size();
    std::vector<std::uint64_t> count(m, 0);
    self.assign(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::uint32_t c : dtmc.row_cols(states[i])) count[local[c]]++;
    }
    col_offsets.assign(m + 1, 0);
    for (std::size_t j = 0; j < m; ++j) col_offsets[j + 1] = col_offsets[j] + count[j];
    rows.resize(col_offsets[m]);
    probs.resize(col_offsets[m]);
    std::vector<std::uint64_t> fill(col_offsets.begin(), col_offsets.end() - 1);
    for (std::size_t i = 0; i < m; ++i) {
      auto rc = dtmc.row_cols(states[i]);
      auto rp = dtmc.row_probs(states[i]);
      for (std::size_t e = 0; e < rc.size(); ++e) {
        std::uint32_t j = local[rc[e]];
        double p = to_double(rp[e]);
        if (j == i) self[i] = p;
        rows[fill[j]] = static_cast<std::uint32_t>(i);
        probs[fill[j]] = p;
        ++fill[j];
      }
    }
  }
};

// Balance-equation Gauss-Seidel with periodic renormalisation. Uses the
// incoming-edge structure, so it is correct for periodic chains (the
// result is the long-run time-fraction vector, not a power-iteration
// limit).
template <class P>
bool gauss_seidel_bscc(const SparseDTMC<P>& dtmc, const std::vector<std::uint32_t>& states,
                       const StationaryOptions& opt, std::vector<double>& pi_local,
                       double& residual_out, std::uint64_t& iters_out) {
  const std::size_t m = states.size();
  if (m == 1) {
    pi_local.assign(1, 1.0);
    residual_out = 0.0;
    iters_out = 0;
    return true;
  }
  std::vector<std::uint32_t> local(dtmc.num_states(), UINT32_MAX);
  for (std::size_t i = 0; i < m; ++i) local[states[i]] = static_cast<std::uint32_t>(i);
  BsccColumns<P> cols(dtmc, states, local);

  pi_local.assign(m, 1.0 / static_cast<double>(m));
  const double target = opt.eps / std::max(1.0, opt.polish);
  std::uint64_t sweep = 0;
  double residual = 1.0;
  while (sweep < opt.max_iter) {
    for (std::size_t j = 0; j < m; ++j) {
      double acc = 0.0;
      for (std::uint64_t e = cols.col_offsets[j]; e < cols.col_offsets[j + 1]; ++e) {
        if (cols.rows[e] != j) acc += pi_local[cols.rows[e]] * cols.probs[e];
      }
      double denom = 1.0 - cols.self[j];
      pi_local[j] = denom > 0.0 ? acc / denom : acc;
    }
    double sum = 0.0;
    for (double v : pi_local) sum += v;
    if (sum > 0.0) {
      for (double& v : pi_local) v /= sum;
    }
    ++sweep;
    if (sweep % opt.check_every == 0 || sweep == opt.max_iter) {
      residual = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        double acc = -pi_local[j];
        for (std::uint64_t e = cols.col_offsets[j]; e < cols.col_offsets[j + 1]; ++e) {
          acc += pi_local[cols.rows[e]] * cols.probs[e];
        }
        residual = std::max(residual, std::abs(acc));
      }
      if (residual <= target) break;
    }
  }
  residual_out = residual;
  iters_out = sweep;
  return residual <= opt.eps;
}

// Direct solve of pi * P_B = pi, sum(pi) = 1 via the transposed system;
// exact for Rational.
template <class P>
std::vector<P> dense_stationary_bscc(const SparseDTMC<P>& dtmc,
                                     const std::vector<std::uint32_t>& states) {
  const std::size_t m = states.size();
  std::vector<std::uint32_t> local(dtmc.num_states(), UINT32_MAX);
  for (std::size_t i = 0; i < m; ++i) local[states[i]] = static_cast<std::uint32_t>(i);
  std::vector<std::vector<P>> a(m, std::vector<P>(m, P(0)));
  for (std::size_t i = 0; i < m; ++i) {
    auto rc = dtmc.row_cols(states[i]);
    auto rp = dtmc.row_probs(states[i]);
    for (std::size_t e = 0; e < rc.size(); ++e) {
      a[local[rc[e]]][i] += rp[e];  // transpose
    }
    a[i][i] -= P(1);
  }
  // Replace the last balance equation (redundant) with normalisation.
  for (std::size_t i = 0; i < m; ++i) a[m - 1][i] = P(1);
  std::vector<P> b(m, P(0));
  b[m - 1] = P(1);
  return solve_dense(std::move(a), std::move(b));
}

}  // namespace detail

// Long-run state probabilities: per-bscc stationary vectors weighted by
// the absorption probabilities; zero on transient states.
template <class P>
SteadyStateResult<P> stationary(const SparseDTMC<P>& dtmc, BsccDecomposition<P> dec,
                                const StationaryOptions& opt = {}) {
  if (opt.eps <= 0) throw std::invalid_argument("eps must be positive");
  SteadyStateResult<P> res;
  res.pi.assign(dtmc.num_states(), P(0));
  res.converged = true;

  const bool dense = opt.use_dense || is_rational_v<P>;
  for (std::size_t b = 0; b < dec.bsccs.size(); ++b) {
    const auto& states = dec.bsccs[b];
    if (dense) {
      if (states.size() > opt.dense_limit) {
        throw std::runtime_error("bscc too large for dense stationary solve (" +
                                 std::to_string(states.size()) + " states)");
      }
      std::vector<P> pi_b = detail::dense_stationary_bscc(dtmc, states);
      for (std::size_t i = 0; i < states.size(); ++i) {
        res.pi[states[i]] = dec.reach_prob[b] * pi_b[i];
      }
    } else {
      std::vector<double> pi_b;
      double residual = 0.0;
      std::uint64_t iters = 0;
      bool ok = detail::gauss_seidel_bscc(dtmc, states, opt, pi_b, residual, iters);
      res.converged = res.converged && ok;
      res.iterations += iters;
      res.residual = std::max(to_double(res.residual), residual);
      for (std::size_t i = 0; i < states.size(); ++i) {
        res.pi[states[i]] = dec.reach_prob[b] * P(pi_b[i]);
      }
    }
  }

  if (dense) {
    // exact or pivoted solve: report the true algebraic residual
    P residual(0);
    std::vector<P> acc(dtmc.num_states(), P(0));
    for (std::uint32_t s = 0; s < dtmc.num_states(); ++s) {
      if (res.pi[s] == P(0)) continue;
      auto rc = dtmc.row_cols(s);
      auto rp = dtmc.row_probs(s);
      for (std::size_t e = 0; e < rc.size(); ++e) acc[rc[e]] += res.pi[s] * rp[e];
    }
    for (std::uint32_t s = 0; s < dtmc.num_states(); ++s) {
      P d = acc[s] - res.pi[s];
      if (d < P(0)) d = -d;
      if (dec.is_transient(s)) continue;  // transient rows feed the bsccs once
      residual = std::max(residual, d);
    }
    res.residual = residual;
  }

  res.decomposition = std::move(dec);
  return res;
}

}  // namespace slmc

#endif  // SLMC_STATIONARY_HPP_
