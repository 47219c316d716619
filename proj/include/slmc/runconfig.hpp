#ifndef SLMC_RUNCONFIG_HPP_
#define SLMC_RUNCONFIG_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>

#include "slmc/distribution.hpp"
#include "slmc/reduced_model.hpp"

namespace slmc {

// "5" or "2..20" (inclusive).
inline std::pair<std::uint32_t, std::uint32_t> parse_n_range(const std::string& text) {
  auto dots = text.find("..");
  try {
    if (dots == std::string::npos) {
      std::size_t used = 0;
      unsigned long v = std::stoul(text, &used);
      if (used != text.size() || v == 0) throw std::invalid_argument(text);
      return {static_cast<std::uint32_t>(v), static_cast<std::uint32_t>(v)};
    }
    std::size_t used = 0;
    std::string lo_str = text.substr(0, dots), hi_str = text.substr(dots + 2);
    unsigned long lo = std::stoul(lo_str, &used);
    if (used != lo_str.size()) throw std::invalid_argument(text);
    unsigned long hi = std::stoul(hi_str, &used);
    if (used != hi_str.size()) throw std::invalid_argument(text);
    if (lo == 0 || hi < lo) throw std::invalid_argument(text);
    return {static_cast<std::uint32_t>(lo), static_cast<std::uint32_t>(hi)};
  } catch (const std::exception&) {
    throw std::invalid_argument("malformed process count or range: '" + text + "'");
  }
}

// One run of the pipeline as configured by flags or a key=value file.
struct RunConfig {
  enum class ModelKind { Full, Reduced };

  ModelKind model = ModelKind::Reduced;
  std::string n_text = "1";
  std::string nu_text = "40:0.5,50:0.5";
  std::string gamma0_text = "5:1";
  std::string gamma1_text = "6:1";
  std::string initial_mode_text = "multinomial";
  double eps = 1e-10;
  std::uint64_t max_iter = 1'000'000;
  std::string mrmc_base;
  std::string csv_path;
  std::string steady_in;
  std::string steady_out;
  std::uint64_t seed = 1;
  std::uint64_t ticks = 10'000'000;
  std::uint64_t warmup = UINT64_MAX;
  unsigned threads = 0;  // 0: hardware concurrency

  std::pair<std::uint32_t, std::uint32_t> n_range() const { return parse_n_range(n_text); }

  std::uint32_t single_n() const {
    auto [lo, hi] = n_range();
    if (lo != hi) {
      throw std::invalid_argument("this subcommand needs a single process count, got range " +
                                  n_text);
    }
    return lo;
  }

  ModelParams<double> params(std::uint32_t n) const {
    ModelParams<double> p{n, parse_distribution<double>(nu_text),
                          parse_distribution<double>(gamma0_text),
                          parse_distribution<double>(gamma1_text)};
    p.validate();
    return p;
  }

  InitialMode initial_mode() const {
    if (initial_mode_text == "multinomial") return InitialMode::Multinomial;
    if (initial_mode_text == "uniform" || initial_mode_text == "uniform-compositions") {
      return InitialMode::UniformCompositions;
    }
    throw std::invalid_argument("unknown initial mode: '" + initial_mode_text + "'");
  }

  unsigned effective_threads() const {
    if (threads != 0) return threads;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
  }
};

}  // namespace slmc

#endif  // SLMC_RUNCONFIG_HPP_
