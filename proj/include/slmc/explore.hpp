#ifndef SLMC_EXPLORE_HPP_
#define SLMC_EXPLORE_HPP_

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "slmc/dtmc.hpp"
#include "slmc/encoding.hpp"
#include "slmc/state_table.hpp"
#include "slmc/summary.hpp"

namespace slmc {

template <class Model>
concept ExplorableModel = requires(const Model& m, const typename Model::State& s, Bytes& b) {
  { m.initial() };
  { m.successors(s) };
  { m.encode(s, b) };
  { m.decode(BytesView{}) };
};

template <class Model>
concept SummarisingModel = requires(const Model& m, const typename Model::State& s) {
  { m.summary(s) } -> std::convertible_to<StateSummary>;
};

struct LabelDef {
  std::string name;
  SymmetricPredicate pred;
};

struct ExploreOptions {
  unsigned threads = 1;
  bool keep_decode = false;
  bool collect_features = true;
  std::vector<LabelDef> labels;
  std::uint64_t max_states = UINT32_MAX - 1;
  double row_sum_tol = 1e-12;
  // called after each completed BFS level
  std::function<void(std::uint64_t states, std::uint64_t transitions)> progress;
};

struct ExploreStats {
  std::uint64_t states = 0;
  std::uint64_t transitions = 0;
  std::uint32_t levels = 0;
  double seconds = 0.0;
};

// Breadth-first closure of the reachable state space. State indices are
// assigned level by level, sorted by canonical byte encoding within each
// level, so the produced matrix is byte-identical across runs and thread
// counts. Successor probabilities are checked to sum to one per row.
template <ExplorableModel Model>
SparseDTMC<typename Model::Prob> explore(const Model& model, const ExploreOptions& opt = {},
                                         ExploreStats* stats_out = nullptr) {
  using P = typename Model::Prob;
  using State = typename Model::State;
  const auto t0 = std::chrono::steady_clock::now();

  SparseDTMC<P> dtmc;
  StateTable table;

  const bool want_summaries = opt.collect_features || !opt.labels.empty();
  if constexpr (!SummarisingModel<Model>) {
    if (want_summaries) {
      throw std::invalid_argument("model provides no state summaries; disable features/labels");
    }
  }

  std::vector<Bitset> label_bits(opt.labels.size());
  StateFeatures features;
  std::uint32_t dist_words = 0;
  if (opt.collect_features) {
    if constexpr (requires { model.params(); }) {
      features.dist_bits = model.params().nu.max_value() + 1;
    }
    dist_words = (features.dist_bits + 63) / 64;
    features.dist_words = dist_words;
  }

  // Interns a state (already absent from the table) and collects its
  // labels and features. Must be called in canonical order per level.
  auto register_state = [&](BytesView bytes) -> std::uint32_t {
    std::uint32_t idx = table.insert(bytes);
    if constexpr (SummarisingModel<Model>) {
      if (want_summaries) {
        State st = model.decode(bytes);
        StateSummary sum = model.summary(st);
        for (std::size_t li = 0; li < opt.labels.size(); ++li) {
          label_bits[li].push_back(opt.labels[li].pred(sum));
        }
        if (opt.collect_features) {
          features.ncrit_count.push_back(sum.ncrit_count());
          std::uint8_t flags = 0;
          if (sum.p1.loc == Loc::Wait) flags |= StateFeatures::kP1Wait;
          if (sum.p1.loc == Loc::Crit) flags |= StateFeatures::kP1Crit;
          if (sum.p1.loc == Loc::Ncrit) flags |= StateFeatures::kP1Ncrit;
          if (sum.any_wait()) flags |= StateFeatures::kAnyWait;
          if (sum.lock == LockView::HeldByP1 && sum.p1.loc == Loc::Wait) {
            flags |= StateFeatures::kP1Granted;
            if (sum.p1.t == 1) flags |= StateFeatures::kP1GrantedImmediate;
          }
          features.flags.push_back(flags);
          auto bits = distance_bits(sum, features.dist_bits);
          features.dist.insert(features.dist.end(), bits.begin(), bits.end());
        }
      }
    }
    return idx;
  };

  // Seed with the initial distribution, canonically ordered.
  {
    auto init = model.initial();
    std::vector<std::pair<Bytes, P>> enc;
    enc.reserve(init.size());
    for (auto& [p, s] : init) {
      Bytes b;
      model.encode(s, b);
      enc.emplace_back(std::move(b), p);
    }
    std::sort(enc.begin(), enc.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 0; i < enc.size(); ++i) {
      if (i > 0 && enc[i].first == enc[i - 1].first) {
        dtmc.initial.back().second += enc[i].second;
        continue;
      }
      std::uint32_t idx = register_state(enc[i].first);
      dtmc.initial.emplace_back(idx, enc[i].second);
    }
    // Keep only positive entries (double weights of an extreme multinomial
    // tail can underflow); the states themselves stay explored.
    std::erase_if(dtmc.initial, [](const auto& e) { return !(e.second > P(0)); });
  }

  dtmc.row_offsets.push_back(0);

  struct SuccEntry {
    std::uint32_t col;  // UINT32_MAX while unresolved
    P prob;
    Bytes pending;
  };

  std::uint32_t level_begin = 0;
  std::uint32_t level_end = table.size();
  std::uint32_t levels = 0;

  std::vector<std::vector<SuccEntry>> rows;
  while (level_begin < level_end) {
    ++levels;
    const std::uint32_t count = level_end - level_begin;
    rows.assign(count, {});
    std::vector<Bytes> pending;

    unsigned threads = std::max(1u, opt.threads);
    threads = std::min<unsigned>(threads, count);
    std::mutex merge_mutex;
    std::exception_ptr error;

    auto worker = [&](std::uint32_t from, std::uint32_t to) {
      std::vector<Bytes> local_pending;
      Bytes buf;
      try {
        for (std::uint32_t s = from; s < to; ++s) {
          State st = model.decode(table.key_of(level_begin + s));
          auto succs = model.successors(st);
          P sum(0);
          auto& row = rows[s];
          row.reserve(succs.size());
          for (auto& [p, succ] : succs) {
            sum += p;
            buf.clear();
            model.encode(succ, buf);
            std::uint32_t idx = table.find(buf);
            if (idx != StateTable::npos) {
              row.push_back({idx, p, {}});
            } else {
              row.push_back({UINT32_MAX, p, buf});
              local_pending.push_back(buf);
            }
          }
          bool ok;
          if constexpr (is_rational_v<P>) {
            ok = sum == P(1);
          } else {
            ok = std::abs(to_double(sum) - 1.0) <= opt.row_sum_tol;
          }
          if (!ok) {
            throw std::logic_error("successor probabilities of state " +
                                   std::to_string(level_begin + s) + " sum to " +
                                   format_double(to_double(sum)));
          }
        }
      } catch (...) {
        std::lock_guard lk(merge_mutex);
        if (!error) error = std::current_exception();
        return;
      }
      std::lock_guard lk(merge_mutex);
      pending.insert(pending.end(), std::make_move_iterator(local_pending.begin()),
                     std::make_move_iterator(local_pending.end()));
    };

    if (threads <= 1) {
      worker(0, count);
    } else {
      std::vector<std::thread> pool;
      std::uint32_t chunk = (count + threads - 1) / threads;
      for (unsigned t = 0; t < threads; ++t) {
        std::uint32_t from = t * chunk;
        std::uint32_t to = std::min(count, from + chunk);
        if (from >= to) break;
        pool.emplace_back(worker, from, to);
      }
      for (auto& th : pool) th.join();
    }
    if (error) std::rethrow_exception(error);

    // Deterministic indexing of the next frontier.
    std::sort(pending.begin(), pending.end());
    pending.erase(std::unique(pending.begin(), pending.end()), pending.end());
    for (const Bytes& b : pending) {
      if (table.size() > opt.max_states) {
        throw std::runtime_error("state limit exceeded after exploring " +
                                 std::to_string(table.size()) + " states");
      }
      register_state(b);
    }

    // Emit the rows of the level just expanded.
    for (std::uint32_t s = 0; s < count; ++s) {
      auto& row = rows[s];
      for (auto& e : row) {
        if (e.col == UINT32_MAX) {
          e.col = table.find(e.pending);
          Bytes().swap(e.pending);
        }
      }
      std::sort(row.begin(), row.end(),
                [](const SuccEntry& a, const SuccEntry& b) { return a.col < b.col; });
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i > 0 && row[i].col == dtmc.cols.back() ) {
          dtmc.probs.back() += row[i].prob;
        } else {
          dtmc.cols.push_back(row[i].col);
          dtmc.probs.push_back(row[i].prob);
        }
      }
      dtmc.row_offsets.push_back(dtmc.cols.size());
      std::vector<SuccEntry>().swap(row);
    }

    level_begin = level_end;
    level_end = table.size();
    if (opt.progress) opt.progress(table.size(), dtmc.cols.size());
  }

  for (std::size_t li = 0; li < opt.labels.size(); ++li) {
    dtmc.labels.emplace(opt.labels[li].name, std::move(label_bits[li]));
  }
  if (opt.collect_features) dtmc.features = std::move(features);
  if (opt.keep_decode) {
    StateDecodeTable dec;
    dec.offsets.reserve(table.size() + 1);
    dec.offsets.push_back(0);
    std::uint64_t total = 0;
    for (std::uint32_t i = 0; i < table.size(); ++i) {
      total += table.key_of(i).size();
      dec.offsets.push_back(total);
    }
    dec.bytes.reserve(total);
    for (std::uint32_t i = 0; i < table.size(); ++i) {
      auto k = table.key_of(i);
      dec.bytes.insert(dec.bytes.end(), k.begin(), k.end());
    }
    dtmc.decode = std::move(dec);
  }

  if (stats_out) {
    stats_out->states = table.size();
    stats_out->transitions = dtmc.cols.size();
    stats_out->levels = levels;
    stats_out->seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  return dtmc;
}

}  // namespace slmc

#endif  // SLMC_EXPLORE_HPP_
