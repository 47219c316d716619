#include <doctest.h>

#include "slmc/analyze.hpp"
#include "slmc/bscc.hpp"
#include "slmc/explore.hpp"
#include "slmc/full_model.hpp"
#include "slmc/reduced_model.hpp"
#include "slmc/stationary.hpp"

using namespace slmc;

namespace {

ModelParams<double> tiny_params(std::uint32_t n) {
  return {n, parse_distribution<double>("4:0.5,6:0.5"), parse_distribution<double>("1:1"),
          parse_distribution<double>("2:1")};
}

template <class Model>
std::pair<SparseDTMC<double>, std::vector<double>> solved(const Model& m) {
  auto dtmc = explore(m);
  auto res = stationary(dtmc, bscc_decompose(dtmc));
  REQUIRE(res.converged);
  return {std::move(dtmc), std::move(res.pi)};
}

}  // namespace

TEST_CASE("hand-computed report on the 7-state cycle") {
  // All seven states carry 1/7: ncrit2 ncrit1 ncrit0 | wait0 wait1 | crit1 crit0
  ModelParams<double> p{1, DiscreteDistribution<double>::point(2),
                        DiscreteDistribution<double>::point(1),
                        DiscreteDistribution<double>::point(2)};
  auto [dtmc, pi] = solved(FullModel<double>(p));
  auto report = analyze(dtmc, pi);

  CHECK(report.p1_spinning == doctest::Approx(2.0 / 7.0).epsilon(1e-10));
  CHECK(report.any_spinning == doctest::Approx(2.0 / 7.0).epsilon(1e-10));
  CHECK(report.p_acquire_no_wait == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(to_double(report.expected_wait) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(report.wait_quantile_95 == 2);
  REQUIRE(report.ncrit_histogram.count(0));
  REQUIRE(report.ncrit_histogram.count(1));
  CHECK(report.ncrit_histogram.at(0) == doctest::Approx(4.0 / 7.0).epsilon(1e-10));
  CHECK(report.ncrit_histogram.at(1) == doctest::Approx(3.0 / 7.0).epsilon(1e-10));
  // a single process never has a neighbour in ncrit
  for (const auto& [k, v] : report.distance_spectrum) CHECK(v == 0.0);
}

TEST_CASE("acquiring without waiting is certain when alone") {
  ModelParams<double> p{1, parse_distribution<double>("40:0.5,50:0.5"),
                        parse_distribution<double>("5:1"), parse_distribution<double>("6:1")};
  auto [dtmc, pi] = solved(FullModel<double>(p));
  auto report = analyze(dtmc, pi);
  CHECK(report.p_acquire_no_wait == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("histogram partitions the mass") {
  for (std::uint32_t n : {1u, 2u, 3u}) {
    CAPTURE(n);
    auto [dtmc, pi] = solved(ReducedModel<double>(tiny_params(n)));
    auto hist = ncrit_histogram(dtmc, pi);
    double sum = 0;
    for (const auto& [k, v] : hist) {
      CHECK(k <= n);
      sum += v;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("distance labels read off the ncrit timers") {
  FullModel<double> m({4, parse_distribution<double>("40:0.5,50:0.5"),
                       parse_distribution<double>("5:1"), parse_distribution<double>("6:1")});
  auto bits_of = [&](const FullState& s) {
    return distance_bits(m.summary(s), 51);
  };
  auto has = [](const std::vector<std::uint64_t>& bits, std::uint32_t k) {
    return bits[k >> 6] >> (k & 63) & 1;
  };

  // two processes at 12 and 16, nothing in between: distance 4
  FullState s1{0, {{Loc::Ncrit, 12}, {Loc::Ncrit, 16}, {Loc::Wait, 2}, {Loc::Wait, 2}}};
  auto b1 = bits_of(s1);
  CHECK(has(b1, 4));
  for (std::uint32_t k = 0; k < 51; ++k) {
    if (k != 4) CHECK(!has(b1, k));
  }

  // a third process in between splits the gap
  FullState s2{0, {{Loc::Ncrit, 12}, {Loc::Ncrit, 16}, {Loc::Ncrit, 13}, {Loc::Wait, 2}}};
  auto b2 = bits_of(s2);
  CHECK(has(b2, 1));
  CHECK(has(b2, 3));
  CHECK(!has(b2, 4));

  // duplicated timer value: distance 0
  FullState s3{0, {{Loc::Ncrit, 12}, {Loc::Ncrit, 12}, {Loc::Wait, 2}, {Loc::Wait, 2}}};
  auto b3 = bits_of(s3);
  CHECK(has(b3, 0));

  // fewer than two in ncrit: no distance at all
  FullState s4{0, {{Loc::Ncrit, 12}, {Loc::Wait, 2}, {Loc::Wait, 2}, {Loc::Wait, 2}}};
  auto b4 = bits_of(s4);
  for (std::uint32_t k = 0; k < 51; ++k) CHECK(!has(b4, k));
}

TEST_CASE("full and reduced reports agree") {
  for (std::uint32_t n : {2u, 3u}) {
    CAPTURE(n);
    auto [fd, fpi] = solved(FullModel<double>(tiny_params(n)));
    auto [rd, rpi] = solved(ReducedModel<double>(tiny_params(n)));
    auto fr = analyze(fd, fpi);
    auto rr = analyze(rd, rpi);

    CHECK(std::abs(fr.p1_spinning - rr.p1_spinning) <= 1e-9);
    CHECK(std::abs(fr.any_spinning - rr.any_spinning) <= 1e-9);
    CHECK(std::abs(fr.p_acquire_no_wait - rr.p_acquire_no_wait) <= 1e-9);
    CHECK(std::abs(fr.expected_wait - rr.expected_wait) <= 1e-9);
    CHECK(fr.wait_quantile_95 == rr.wait_quantile_95);
    for (const auto& [k, v] : fr.ncrit_histogram) {
      auto it = rr.ncrit_histogram.find(k);
      double rv = it == rr.ncrit_histogram.end() ? 0.0 : it->second;
      CHECK(std::abs(v - rv) <= 1e-9);
    }
    for (const auto& [k, v] : fr.distance_spectrum) {
      CHECK(std::abs(v - rr.distance_spectrum.at(k)) <= 1e-9);
    }
    CHECK(fr.any_spinning >= fr.p1_spinning);
  }
}

TEST_CASE("exact rational equivalence of full and reduced reports") {
  ModelParams<Rational> p{2, parse_distribution<Rational>("4:1/2,6:1/2"),
                          parse_distribution<Rational>("1:1"),
                          parse_distribution<Rational>("2:1")};
  auto fd = explore(FullModel<Rational>(p));
  auto fres = stationary(fd, bscc_decompose(fd));
  auto rd = explore(ReducedModel<Rational>(p));
  auto rres = stationary(rd, bscc_decompose(rd));
  AnalyzeOptions opt;
  opt.phase_type.tail_eps = 1e-9;
  auto fr = analyze(fd, fres.pi, opt);
  auto rr = analyze(rd, rres.pi, opt);

  CHECK(fr.p1_spinning == rr.p1_spinning);
  CHECK(fr.any_spinning == rr.any_spinning);
  CHECK(fr.p_acquire_no_wait == rr.p_acquire_no_wait);
  CHECK(fr.expected_wait == rr.expected_wait);
  CHECK(fr.wait_quantile_95 == rr.wait_quantile_95);
  for (const auto& [k, v] : fr.ncrit_histogram) {
    auto it = rr.ncrit_histogram.find(k);
    REQUIRE(it != rr.ncrit_histogram.end());
    CHECK(v == it->second);
  }
  for (const auto& [k, v] : fr.distance_spectrum) CHECK(v == rr.distance_spectrum.at(k));
}

TEST_CASE("analyze requires features") {
  ModelParams<double> p = tiny_params(2);
  ExploreOptions opt;
  opt.collect_features = false;
  auto dtmc = explore(FullModel<double>(p), opt);
  auto res = stationary(dtmc, bscc_decompose(dtmc));
  CHECK_THROWS_AS(analyze(dtmc, res.pi), std::invalid_argument);
}
