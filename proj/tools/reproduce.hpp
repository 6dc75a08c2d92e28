#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "grfb/link_sim.hpp"

namespace grfb::cli {

struct Check {
  std::string name;
  std::string expected;
  std::string measured;
  std::string tolerance;
  bool pass = false;
};

struct OutputFile {
  std::string name;
  std::string content;
};

struct Report {
  std::string id;
  std::vector<Check> checks;
  std::vector<OutputFile> files;
  std::vector<std::string> notes;

  bool passed() const;
  void print(std::ostream& out) const;
};

struct ReproduceOptions {
  std::uint64_t seed = 1;
  std::size_t trials = 0;  // 0: the target's default
  unsigned threads = 0;
};

const std::vector<std::string>& reproduce_targets();
/// Throws ConfigError for an unknown target.
Report reproduce(const std::string& target, const ReproduceOptions& opt);

Report reproduce_table5(const ReproduceOptions& opt);
Report reproduce_table6(const ReproduceOptions& opt);
Report reproduce_table7(const ReproduceOptions& opt);
Report reproduce_table8(const ReproduceOptions& opt);
Report reproduce_fig4(const ReproduceOptions& opt);
Report reproduce_fig5(const ReproduceOptions& opt);
Report reproduce_fig6(const ReproduceOptions& opt);

/// The link setups behind the BER figures.
LinkConfig fig5_config(const ReproduceOptions& opt);
LinkConfig fig6_config(const ReproduceOptions& opt);

/// a <= b allowing 3 combined binomial standard errors.
bool ber_not_above(const BerPoint& a, const BerPoint& b);

std::string fmt(double v, int precision = 6);

}  // namespace grfb::cli
