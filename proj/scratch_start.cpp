// Scratch: decoration grid search. Per-process (loc, t, w) with reset
// knobs, lock with optional stale pointer, optional start layers.
#include <cstdio>
#include <set>
#include <vector>
#include <algorithm>
#include <cstdint>

using State = std::vector<int>; // [occupied, ptr, (loc,t,w)*n]

static const int NU[] = {40, 50};
static const int G0 = 5, G1 = 6;

struct Var {
  bool two_var = false;     // separate wait counter w; otherwise w aliases t in wait
  bool w_uncapped = false;  // w := w+1 (bounded by domain) instead of min(w+1,2)
  bool w_reset_wait = true; // w := 0 on entering wait
  bool w_reset_crit = false;  // w := 0 on entering crit
  bool w_reset_ncrit = false; // w := 0 on entering ncrit
  bool stale_ptr = false;   // lock pointer keeps last holder after release
  int start_mode = 0;       // 0 none, 1 sync(+1), 2 async interleaved (no ticks)
  int wmax = 50;
};

static void succs(const State& s, int n, const Var& v, std::vector<State>& out) {
  out.clear();
  auto loc = [&](int i) { return s[2 + 3 * i]; };
  auto tim = [&](int i) { return s[3 + 3 * i]; };
  auto wc = [&](int i) { return s[4 + 3 * i]; };
  int occupied = s[0], ptr = s[1];
  int lock = occupied ? ptr : 0;

  bool any_start = false;
  for (int i = 0; i < n; ++i) any_start |= loc(i) == 3;
  if (any_start) {
    if (v.start_mode == 2) {
      for (int i = 0; i < n; ++i) {
        if (loc(i) != 3) continue;
        for (int nu : NU) {
          State t = s;
          t[2 + 3 * i] = 0;
          t[3 + 3 * i] = nu;
          out.push_back(t);
        }
      }
    } else {
      std::vector<State> acc{s};
      for (int i = 0; i < n; ++i) {
        if (loc(i) != 3) continue;
        std::vector<State> next;
        for (const State& a : acc) {
          for (int nu : NU) {
            State t = a;
            t[2 + 3 * i] = 0;
            t[3 + 3 * i] = nu;
            next.push_back(t);
          }
        }
        acc = next;
      }
      for (auto& t : acc) out.push_back(t);
    }
    return;
  }

  std::vector<int> waiters;
  for (int i = 0; i < n; ++i) {
    if (loc(i) == 1) waiters.push_back(i);
  }
  // lock branches: (occupied', ptr')
  std::vector<std::pair<int,int>> lock_next;
  bool releasing = lock != 0 && loc(lock - 1) == 2 && tim(lock - 1) == 0;
  if (lock != 0 && !releasing) {
    lock_next.push_back({1, ptr});
  } else if (waiters.empty()) {
    lock_next.push_back({0, v.stale_ptr ? ptr : 0});
  } else {
    for (int w : waiters) lock_next.push_back({1, w + 1});
  }

  struct PS { int loc, t, w; };
  std::vector<std::vector<PS>> br(n);
  for (int i = 0; i < n; ++i) {
    int L = loc(i), T = tim(i), W = wc(i);
    bool li = lock == i + 1;
    auto wa = [&](int w) { return v.w_uncapped ? std::min(w + 1, v.wmax) : std::min(w + 1, 2); };
    if (L == 0) {
      if (T > 0) br[i].push_back({0, T - 1, W});
      else br[i].push_back({1, T, v.w_reset_wait ? 0 : W});
    } else if (L == 1) {
      if (!li) {
        if (v.two_var) br[i].push_back({1, T, wa(W)});
        else br[i].push_back({1, wa(T), wa(T)});
      } else {
        int sel = v.two_var ? W : T;
        int g = sel == 1 ? G0 : G1;
        br[i].push_back({2, g, v.w_reset_crit ? 0 : W});
      }
    } else {
      if (T > 0) br[i].push_back({2, T - 1, W});
      else for (int nu : NU) br[i].push_back({0, nu, v.w_reset_ncrit ? 0 : W});
    }
  }
  for (auto [oc, pn] : lock_next) {
    std::vector<int> pick(n, 0);
    while (true) {
      State t(2 + 3 * n);
      t[0] = oc;
      t[1] = pn;
      for (int i = 0; i < n; ++i) {
        t[2 + 3 * i] = br[i][pick[i]].loc;
        t[3 + 3 * i] = br[i][pick[i]].t;
        t[4 + 3 * i] = br[i][pick[i]].w;
      }
      out.push_back(t);
      int i = 0;
      for (; i < n; ++i) {
        if (++pick[i] < (int)br[i].size()) break;
        pick[i] = 0;
      }
      if (i == n) break;
    }
  }
}

static size_t count_reachable(int n, const Var& v, size_t cap) {
  std::set<State> seen;
  std::vector<State> frontier;
  if (v.start_mode != 0) {
    State s(2 + 3 * n, 0);
    for (int i = 0; i < n; ++i) s[2 + 3 * i] = 3;
    frontier.push_back(s);
  } else {
    std::vector<int> pick(n, 0);
    while (true) {
      State s(2 + 3 * n, 0);
      for (int i = 0; i < n; ++i) s[3 + 3 * i] = NU[pick[i]];
      frontier.push_back(s);
      int i = 0;
      for (; i < n; ++i) {
        if (++pick[i] < 2) break;
        pick[i] = 0;
      }
      if (i == n) break;
    }
  }
  for (auto& s : frontier) seen.insert(s);
  std::vector<State> out;
  while (!frontier.empty()) {
    std::vector<State> next;
    for (const State& s : frontier) {
      succs(s, n, v, out);
      for (auto& t : out) {
        if (seen.insert(t).second) next.push_back(t);
      }
      if (seen.size() > cap) return SIZE_MAX;
    }
    frontier = std::move(next);
  }
  return seen.size();
}

int main() {
  for (int tv = 0; tv <= 1; ++tv)
  for (int unc = 0; unc <= 1; ++unc)
  for (int rw = 0; rw <= 1; ++rw)
  for (int rc = 0; rc <= 1; ++rc)
  for (int rn = 0; rn <= 1; ++rn)
  for (int sp = 0; sp <= 1; ++sp)
  for (int sm = 0; sm <= 2; ++sm) {
    if (!tv && (rw != 1 || rc != 0 || rn != 0)) continue;  // knobs w/o meaning
    Var v;
    v.two_var = tv;
    v.w_uncapped = unc;
    v.w_reset_wait = rw;
    v.w_reset_crit = rc;
    v.w_reset_ncrit = rn;
    v.stale_ptr = sp;
    v.start_mode = sm;
    size_t c = count_reachable(3, v, 3'000'000);
    bool match = c == 67001;
    std::printf("tv=%d unc=%d rw=%d rc=%d rn=%d stale=%d start=%d -> %zu%s\n", tv, unc, rw,
                rc, rn, sp, sm, c, match ? "  <<<<< MATCH" : "");
    std::fflush(stdout);
  }
  return 0;
}
