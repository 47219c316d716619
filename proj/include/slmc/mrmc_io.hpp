#ifndef SLMC_MRMC_IO_HPP_
#define SLMC_MRMC_IO_HPP_

#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "slmc/analyze.hpp"
#include "slmc/dtmc.hpp"
#include "slmc/probability.hpp"

namespace slmc {

namespace detail {

// Shortest round-trip decimal, always with a decimal point ("1.0", "0.5")
// so probability fields are unambiguous in the .tra grammar.
inline std::string tra_prob(double v) {
  std::string s = format_double(v);
  if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
      s.find("inf") == std::string::npos && s.find("nan") == std::string::npos) {
    s += ".0";
  }
  return s;
}

}  // namespace detail

// Textual transition-matrix document in the MRMC input format (verified
// against the MRMC 1.5 grammar): STATES/TRANSITIONS header, then one
// `from to prob` line per nonzero entry, 1-indexed, ascending (from, to).
struct TraFile {
  std::uint32_t num_states = 0;
  std::vector<std::tuple<std::uint32_t, std::uint32_t, double>> transitions;

  template <class P>
  static TraFile from_dtmc(const SparseDTMC<P>& dtmc) {
    TraFile tra;
    tra.num_states = dtmc.num_states();
    tra.transitions.reserve(dtmc.num_transitions());
    for (std::uint32_t s = 0; s < dtmc.num_states(); ++s) {
      auto rc = dtmc.row_cols(s);
      auto rp = dtmc.row_probs(s);
      for (std::size_t e = 0; e < rc.size(); ++e) {
        tra.transitions.emplace_back(s + 1, rc[e] + 1, to_double(rp[e]));
      }
    }
    return tra;
  }

  void write(std::ostream& out) const {
    out << "STATES " << num_states << "\n";
    out << "TRANSITIONS " << transitions.size() << "\n";
    for (const auto& [from, to, p] : transitions) {
      out << from << ' ' << to << ' ' << detail::tra_prob(p) << "\n";
    }
  }

  static TraFile parse(std::istream& in) {
    TraFile tra;
    std::string word;
    std::uint64_t m = 0;
    if (!(in >> word) || word != "STATES" || !(in >> tra.num_states)) {
      throw std::runtime_error("malformed .tra header: expected STATES <n>");
    }
    if (!(in >> word) || word != "TRANSITIONS" || !(in >> m)) {
      throw std::runtime_error("malformed .tra header: expected TRANSITIONS <m>");
    }
    tra.transitions.reserve(m);
    for (std::uint64_t i = 0; i < m; ++i) {
      std::uint32_t from = 0, to = 0;
      std::string prob;
      if (!(in >> from >> to >> prob)) {
        throw std::runtime_error(".tra truncated at transition " + std::to_string(i + 1));
      }
      if (from == 0 || from > tra.num_states || to == 0 || to > tra.num_states) {
        throw std::runtime_error(".tra state index out of range");
      }
      tra.transitions.emplace_back(from, to, parse_probability<double>(prob));
    }
    return tra;
  }

  SparseDTMC<double> to_dtmc() const {
    SparseDTMC<double> dtmc;
    dtmc.row_offsets.assign(num_states + 1, 0);
    for (const auto& [from, to, p] : transitions) dtmc.row_offsets[from]++;
    for (std::uint32_t s = 0; s < num_states; ++s) dtmc.row_offsets[s + 1] += dtmc.row_offsets[s];
    dtmc.cols.resize(transitions.size());
    dtmc.probs.resize(transitions.size());
    std::vector<std::uint64_t> fill(dtmc.row_offsets.begin(), dtmc.row_offsets.end() - 1);
    for (const auto& [from, to, p] : transitions) {
      dtmc.cols[fill[from - 1]] = to - 1;
      dtmc.probs[fill[from - 1]] = p;
      ++fill[from - 1];
    }
    return dtmc;
  }
};

// State labelling document: #DECLARATION / names / #END, then one line per
// state with a nonempty label set, ascending.
struct LabFile {
  std::vector<std::string> declarations;
  std::vector<std::pair<std::uint32_t, std::vector<std::string>>> rows;

  template <class P>
  static LabFile from_dtmc(const SparseDTMC<P>& dtmc) {
    LabFile lab;
    for (const auto& [name, bits] : dtmc.labels) lab.declarations.push_back(name);
    for (std::uint32_t s = 0; s < dtmc.num_states(); ++s) {
      std::vector<std::string> here;
      for (const auto& [name, bits] : dtmc.labels) {
        if (bits.test(s)) here.push_back(name);
      }
      if (!here.empty()) lab.rows.emplace_back(s + 1, std::move(here));
    }
    return lab;
  }

  void write(std::ostream& out) const {
    out << "#DECLARATION\n";
    for (std::size_t i = 0; i < declarations.size(); ++i) {
      if (i) out << ' ';
      out << declarations[i];
    }
    out << "\n#END\n";
    for (const auto& [state, names] : rows) {
      out << state;
      for (const auto& name : names) out << ' ' << name;
      out << "\n";
    }
  }

  static LabFile parse(std::istream& in) {
    LabFile lab;
    std::string line;
    if (!std::getline(in, line) || line != "#DECLARATION") {
      throw std::runtime_error("malformed .lab: expected #DECLARATION");
    }
    if (!std::getline(in, line)) throw std::runtime_error("malformed .lab: missing declarations");
    {
      std::istringstream ss(line);
      std::string name;
      while (ss >> name) lab.declarations.push_back(name);
    }
    if (!std::getline(in, line) || line != "#END") {
      throw std::runtime_error("malformed .lab: expected #END");
    }
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::istringstream ss(line);
      std::uint32_t state = 0;
      if (!(ss >> state) || state == 0) throw std::runtime_error("malformed .lab row: " + line);
      std::vector<std::string> names;
      std::string name;
      while (ss >> name) {
        if (std::find(lab.declarations.begin(), lab.declarations.end(), name) ==
            lab.declarations.end()) {
          throw std::runtime_error("undeclared label: " + name);
        }
        names.push_back(name);
      }
      lab.rows.emplace_back(state, std::move(names));
    }
    return lab;
  }
};

// Writes base_path.tra / base_path.lab.
template <class P>
void export_mrmc(const SparseDTMC<P>& dtmc, const std::string& base_path) {
  {
    std::ofstream out(base_path + ".tra");
    if (!out) throw std::runtime_error("cannot open for writing: " + base_path + ".tra");
    TraFile::from_dtmc(dtmc).write(out);
    if (!out) throw std::runtime_error("write failed: " + base_path + ".tra");
  }
  {
    std::ofstream out(base_path + ".lab");
    if (!out) throw std::runtime_error("cannot open for writing: " + base_path + ".lab");
    LabFile::from_dtmc(dtmc).write(out);
    if (!out) throw std::runtime_error("write failed: " + base_path + ".lab");
  }
}

// Reads `<state> <prob>` pairs (1-indexed, whitespace separated, missing
// states are zero) as produced by an external steady-state run.
inline std::vector<double> import_steady(std::istream& in, std::uint32_t num_states) {
  std::vector<double> pi(num_states, 0.0);
  std::string line;
  std::size_t lineno = 0;
  double sum = 0.0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::uint32_t state = 0;
    std::string prob;
    if (!(ss >> state)) {
      std::string rest;
      if (ss >> rest) throw std::runtime_error("malformed line " + std::to_string(lineno));
      continue;  // blank line
    }
    if (!(ss >> prob)) throw std::runtime_error("malformed line " + std::to_string(lineno));
    std::string extra;
    if (ss >> extra) throw std::runtime_error("trailing junk on line " + std::to_string(lineno));
    if (state == 0 || state > num_states) {
      throw std::runtime_error("state index out of range on line " + std::to_string(lineno));
    }
    pi[state - 1] = parse_probability<double>(prob);
    sum += pi[state - 1];
  }
  if (std::abs(sum - 1.0) > 1e-6) {
    throw std::runtime_error("steady-state vector sums to " + format_double(sum));
  }
  return pi;
}

inline std::vector<double> import_steady(const std::string& path, std::uint32_t num_states) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  return import_steady(in, num_states);
}

inline void write_steady(std::ostream& out, const std::vector<double>& pi) {
  for (std::size_t s = 0; s < pi.size(); ++s) {
    if (pi[s] != 0.0) out << (s + 1) << ' ' << format_double(pi[s]) << "\n";
  }
}

// CSV rows `n,property,key,value`; key empty for scalar properties.
template <class P>
void write_csv_report(std::ostream& out, std::uint32_t n, const PropertyReport<P>& report,
                      bool header = true) {
  if (header) out << "n,property,key,value\n";
  for (const auto& [k, v] : report.ncrit_histogram) {
    out << n << ",ncrit_histogram," << k << ',' << format_probability(v) << "\n";
  }
  out << n << ",p1_spinning,," << format_probability(report.p1_spinning) << "\n";
  out << n << ",any_spinning,," << format_probability(report.any_spinning) << "\n";
  for (const auto& [k, v] : report.distance_spectrum) {
    out << n << ",distance_spectrum," << k << ',' << format_probability(v) << "\n";
  }
  out << n << ",p_acquire_no_wait,," << format_probability(report.p_acquire_no_wait) << "\n";
  out << n << ",expected_wait,," << format_probability(report.expected_wait) << "\n";
  out << n << ",wait_quantile_95,," << report.wait_quantile_95 << "\n";
}

template <class P>
void write_csv_reports(std::ostream& out,
                       const std::vector<std::pair<std::uint32_t, PropertyReport<P>>>& reports) {
  out << "n,property,key,value\n";
  for (const auto& [n, report] : reports) write_csv_report(out, n, report, false);
}

}  // namespace slmc

#endif  // SLMC_MRMC_IO_HPP_
