#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "grfb/cxmat.hpp"

namespace grfb::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUsage = 2;

struct GlobalOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::optional<std::string> out_dir;
  unsigned threads = 0;
};

/// Entries are `a+bi` style tokens separated by whitespace, one row per line.
/// Blank lines and lines starting with '#' are skipped.
ComplexMatrix parse_matrix(const std::string& text);
cplx parse_complex(const std::string& token);
std::string format_matrix(const ComplexMatrix& m);

int cmd_reproduce(const std::string& target, const GlobalOptions& g, std::ostream& out);
int cmd_encode(const std::string& path, const std::string& scheme, std::ostream& out);
int cmd_decode(const std::string& hex, const std::string& scheme, const std::string& dims,
               std::optional<std::size_t> bits, std::ostream& out);
int cmd_train(const std::string& dims, std::size_t levels, std::size_t samples, const GlobalOptions& g,
              std::ostream& out);
int cmd_campaign(const std::string& path, const GlobalOptions& g, std::ostream& out);

/// Parses arguments and dispatches; library errors become exit statuses.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace grfb::cli
