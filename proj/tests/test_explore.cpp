#include <doctest.h>

#include "naive_full.hpp"
#include "slmc/explore.hpp"
#include "slmc/full_model.hpp"
#include "slmc/reduced_model.hpp"

using namespace slmc;

namespace {

ModelParams<double> tiny_params(std::uint32_t n) {
  return {n, parse_distribution<double>("4:0.5,6:0.5"), parse_distribution<double>("1:1"),
          parse_distribution<double>("2:1")};
}

}  // namespace

TEST_CASE("one process with point distributions walks a 7-state cycle") {
  // Hand enumeration with nu(2)=1, gamma0(1)=1:
  //   (unlock,ncrit2) -> (unlock,ncrit1) -> (unlock,ncrit0) -> (unlock,wait0)
  //   -> (lock1,wait1) -> (lock1,crit1) -> (lock1,crit0) -> back to start.
  ModelParams<double> p{1, DiscreteDistribution<double>::point(2),
                        DiscreteDistribution<double>::point(1),
                        DiscreteDistribution<double>::point(2)};
  FullModel<double> m(p);
  ExploreStats stats;
  auto dtmc = explore(m, {}, &stats);
  CHECK(dtmc.num_states() == 7);
  CHECK(dtmc.num_transitions() == 7);  // deterministic cycle
  dtmc.validate();
  for (std::uint32_t s = 0; s < 7; ++s) {
    CHECK(dtmc.row_cols(s).size() == 1);
    CHECK(dtmc.row_probs(s)[0] == 1.0);
  }
}

TEST_CASE("explored chains validate structurally") {
  auto dtmc = explore(FullModel<double>(tiny_params(2)));
  dtmc.validate();
  CHECK(dtmc.num_states() > 0);
  // reachability soundness: every referenced column was expanded
  CHECK(dtmc.row_offsets.size() == dtmc.num_states() + 1);
}

TEST_CASE("counts and matrices match a naive second implementation") {
  for (std::uint32_t n : {2u, 3u}) {
    CAPTURE(n);
    auto params = tiny_params(n);
    naive::Reachable oracle = naive::enumerate(params);

    FullModel<double> m(params);
    ExploreOptions opt;
    opt.keep_decode = true;
    opt.collect_features = false;
    auto dtmc = explore(m, opt);
    REQUIRE(dtmc.num_states() == oracle.states.size());

    // per-state successor distributions agree
    for (std::uint32_t s = 0; s < dtmc.num_states(); ++s) {
      FullState fs = m.decode(dtmc.decode->at(s));
      naive::State key{static_cast<int>(fs.lock)};
      for (const auto& pr : fs.procs) {
        key.push_back(static_cast<int>(pr.loc));
        key.push_back(static_cast<int>(pr.t));
      }
      auto it = oracle.rows.find(key);
      REQUIRE(it != oracle.rows.end());
      auto rc = dtmc.row_cols(s);
      auto rp = dtmc.row_probs(s);
      REQUIRE(rc.size() == it->second.size());
      for (std::size_t e = 0; e < rc.size(); ++e) {
        FullState ts = m.decode(dtmc.decode->at(rc[e]));
        naive::State tkey{static_cast<int>(ts.lock)};
        for (const auto& pr : ts.procs) {
          tkey.push_back(static_cast<int>(pr.loc));
          tkey.push_back(static_cast<int>(pr.t));
        }
        auto jt = it->second.find(tkey);
        REQUIRE(jt != it->second.end());
        CHECK(rp[e] == doctest::Approx(jt->second).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("exploration output is byte-reproducible") {
  ReducedModel<double> m(tiny_params(4));
  ExploreOptions opt;
  opt.labels = {{"p1_wait", [](const StateSummary& s) { return s.p1.loc == Loc::Wait; }}};
  auto a = explore(m, opt);
  auto b = explore(m, opt);
  CHECK(a.row_offsets == b.row_offsets);
  CHECK(a.cols == b.cols);
  CHECK(a.probs == b.probs);  // bitwise
  CHECK(a.initial == b.initial);
  CHECK(a.labels.at("p1_wait") == b.labels.at("p1_wait"));
  CHECK(a.features->ncrit_count == b.features->ncrit_count);
}

TEST_CASE("thread count does not change the output") {
  ReducedModel<double> m(tiny_params(5));
  ExploreOptions opt1;
  opt1.threads = 1;
  ExploreOptions opt4 = opt1;
  opt4.threads = 4;
  auto a = explore(m, opt1);
  auto b = explore(m, opt4);
  CHECK(a.row_offsets == b.row_offsets);
  CHECK(a.cols == b.cols);
  CHECK(a.probs == b.probs);
  CHECK(a.initial == b.initial);
}

TEST_CASE("state limit aborts with the explored count") {
  FullModel<double> m(tiny_params(3));
  ExploreOptions opt;
  opt.max_states = 100;
  opt.collect_features = false;
  CHECK_THROWS_WITH_AS(explore(m, opt), doctest::Contains("state limit"), std::runtime_error);
}

TEST_CASE("rational exploration is exact") {
  ModelParams<Rational> p{2, parse_distribution<Rational>("4:1/2,6:1/2"),
                          parse_distribution<Rational>("1:1"),
                          parse_distribution<Rational>("2:1")};
  FullModel<Rational> m(p);
  auto dtmc = explore(m);
  dtmc.validate();
  for (std::uint32_t s = 0; s < dtmc.num_states(); ++s) {
    CHECK(dtmc.row_sum(s) == Rational(1));
  }
}
