#ifndef SLMC_BSCC_HPP_
#define SLMC_BSCC_HPP_

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "slmc/dense_linear.hpp"
#include "slmc/dtmc.hpp"

namespace slmc {

// Bottom strongly connected components plus the probability of ending up
// in each of them from the initial distribution. Transient states carry
// bscc id UINT32_MAX.
template <class P>
struct BsccDecomposition {
  static constexpr std::uint32_t kTransient = UINT32_MAX;

  std::vector<std::vector<std::uint32_t>> bsccs;  // each sorted ascending
  std::vector<std::uint32_t> state_bscc;          // per state
  std::vector<std::uint32_t> transient_states;    // sorted ascending
  std::vector<P> reach_prob;                      // per bscc, sums to 1

  bool is_transient(std::uint32_t s) const { return state_bscc[s] == kTransient; }
};

struct BsccOptions {
  double reach_eps = 1e-13;
  std::uint64_t reach_max_iter = 1'000'000;
  // rational reach probabilities solve a dense transient system
  std::size_t dense_transient_limit = 200'000;
};

namespace detail {

// Iterative Tarjan over the row structure; no recursion so 10^7-state
// spaces are fine.
inline void tarjan_sccs(const std::vector<std::uint64_t>& row_offsets,
                        const std::vector<std::uint32_t>& cols,
                        std::vector<std::uint32_t>& scc_id, std::uint32_t& scc_count) {
  const std::uint32_t n = static_cast<std::uint32_t>(row_offsets.size() - 1);
  constexpr std::uint32_t kUndef = UINT32_MAX;
  scc_id.assign(n, kUndef);
  scc_count = 0;
  std::vector<std::uint32_t> index(n, kUndef), lowlink(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::uint32_t> stack;
  struct Frame {
    std::uint32_t v;
    std::uint64_t next_edge;
  };
  std::vector<Frame> call;
  std::uint32_t next_index = 0;

  for (std::uint32_t root = 0; root < n; ++root) {
    if (index[root] != kUndef) continue;
    call.push_back({root, row_offsets[root]});
    index[root] = lowlink[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      Frame& f = call.back();
      if (f.next_edge < row_offsets[f.v + 1]) {
        std::uint32_t w = cols[f.next_edge++];
        if (index[w] == kUndef) {
          index[w] = lowlink[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, row_offsets[w]});
        } else if (on_stack[w]) {
          lowlink[f.v] = std::min(lowlink[f.v], index[w]);
        }
      } else {
        std::uint32_t v = f.v;
        call.pop_back();
        if (!call.empty()) {
          lowlink[call.back().v] = std::min(lowlink[call.back().v], lowlink[v]);
        }
        if (lowlink[v] == index[v]) {
          while (true) {
            std::uint32_t w = stack.back();
            stack.pop_back();
            on_stack[w] = false;
            scc_id[w] = scc_count;
            if (w == v) break;
          }
          ++scc_count;
        }
      }
    }
  }
}

}  // namespace detail

template <class P>
BsccDecomposition<P> bscc_decompose(const SparseDTMC<P>& dtmc, const BsccOptions& opt = {}) {
  const std::uint32_t n = dtmc.num_states();
  if (n == 0) throw std::invalid_argument("empty chain");

  std::vector<std::uint32_t> scc_id;
  std::uint32_t scc_count = 0;
  detail::tarjan_sccs(dtmc.row_offsets, dtmc.cols, scc_id, scc_count);

  std::vector<bool> bottom(scc_count, true);
  for (std::uint32_t s = 0; s < n; ++s) {
    for (std::uint32_t c : dtmc.row_cols(s)) {
      if (scc_id[c] != scc_id[s]) bottom[scc_id[s]] = false;
    }
  }

  BsccDecomposition<P> dec;
  dec.state_bscc.assign(n, BsccDecomposition<P>::kTransient);
  std::vector<std::uint32_t> bscc_index(scc_count, UINT32_MAX);
  for (std::uint32_t s = 0; s < n; ++s) {
    if (!bottom[scc_id[s]]) {
      dec.transient_states.push_back(s);
      continue;
    }
    std::uint32_t& bi = bscc_index[scc_id[s]];
    if (bi == UINT32_MAX) {
      bi = static_cast<std::uint32_t>(dec.bsccs.size());
      dec.bsccs.emplace_back();
    }
    dec.state_bscc[s] = bi;
    dec.bsccs[bi].push_back(s);
  }

  // Probability of absorption into each bscc from the initial distribution.
  const std::size_t k = dec.bsccs.size();
  dec.reach_prob.assign(k, P(0));
  if (k == 1) {
    dec.reach_prob[0] = P(1);
    return dec;
  }

  const auto& tr = dec.transient_states;
  if constexpr (is_rational_v<P>) {
    if (tr.size() > opt.dense_transient_limit) {
      throw std::runtime_error("transient set too large for exact absorption solve");
    }
    // (I - Q) x = r_b over the transient states, one RHS per bscc.
    std::vector<std::uint32_t> local(n, UINT32_MAX);
    for (std::size_t i = 0; i < tr.size(); ++i) local[tr[i]] = static_cast<std::uint32_t>(i);
    for (std::size_t b = 0; b < k; ++b) {
      std::vector<std::vector<P>> a(tr.size(), std::vector<P>(tr.size(), P(0)));
      std::vector<P> rhs(tr.size(), P(0));
      for (std::size_t i = 0; i < tr.size(); ++i) {
        a[i][i] = P(1);
        auto rc = dtmc.row_cols(tr[i]);
        auto rp = dtmc.row_probs(tr[i]);
        for (std::size_t e = 0; e < rc.size(); ++e) {
          if (local[rc[e]] != UINT32_MAX) {
            a[i][local[rc[e]]] -= rp[e];
          } else if (dec.state_bscc[rc[e]] == b) {
            rhs[i] += rp[e];
          }
        }
      }
      std::vector<P> x = tr.empty() ? std::vector<P>{} : solve_dense(std::move(a), std::move(rhs));
      P total(0);
      for (const auto& [s, p] : dtmc.initial) {
        if (dec.state_bscc[s] == b) total += p;
        else if (local[s] != UINT32_MAX) total += p * x[local[s]];
      }
      dec.reach_prob[b] = total;
    }
  } else {
    // Gauss-Seidel fixed point x = Qx + r_b on the transient states; the
    // substochastic restriction contracts, so plain sweeps converge.
    std::vector<std::uint32_t> local(n, UINT32_MAX);
    for (std::size_t i = 0; i < tr.size(); ++i) local[tr[i]] = static_cast<std::uint32_t>(i);
    for (std::size_t b = 0; b < k; ++b) {
      std::vector<double> x(tr.size(), 0.0);
      double delta = 1.0;
      std::uint64_t iter = 0;
      while (delta > opt.reach_eps && iter < opt.reach_max_iter) {
        delta = 0.0;
        for (std::size_t i = tr.size(); i-- > 0;) {
          auto rc = dtmc.row_cols(tr[i]);
          auto rp = dtmc.row_probs(tr[i]);
          double acc = 0.0, self = 0.0;
          for (std::size_t e = 0; e < rc.size(); ++e) {
            std::uint32_t li = local[rc[e]];
            if (li == UINT32_MAX) {
              if (dec.state_bscc[rc[e]] == b) acc += to_double(rp[e]);
            } else if (li == i) {
              self = to_double(rp[e]);
            } else {
              acc += to_double(rp[e]) * x[li];
            }
          }
          double nv = self < 1.0 ? acc / (1.0 - self) : acc;
          delta = std::max(delta, std::abs(nv - x[i]));
          x[i] = nv;
        }
        ++iter;
      }
      P total(0);
      for (const auto& [s, p] : dtmc.initial) {
        if (dec.state_bscc[s] == b) total += p;
        else if (local[s] != UINT32_MAX) total += P(x[local[s]]) * p;
      }
      dec.reach_prob[b] = total;
    }
  }
  return dec;
}

}  // namespace slmc

#endif  // SLMC_BSCC_HPP_
