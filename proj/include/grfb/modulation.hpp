#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "grfb/cxmat.hpp"

namespace grfb {

enum class Modulation { qpsk, qam16, qam64 };

Modulation parse_modulation(const std::string& name);  // "QPSK", "16QAM", "64QAM"
std::string to_string(Modulation m);

/// Square Gray-mapped QAM with unit average symbol energy. Each axis is an
/// independent Gray-coded PAM carrying half of the bits; the first half of
/// a symbol's bits selects the in-phase level.
class Constellation {
 public:
  explicit Constellation(Modulation m);

  Modulation modulation() const { return mod_; }
  int bits_per_symbol() const { return 2 * bits_per_axis_; }
  /// `bits` holds bits_per_symbol() values in {0, 1}.
  cplx map(std::span<const std::uint8_t> bits) const;
  /// Nearest constellation point, returned as its bit label.
  std::vector<std::uint8_t> detect(cplx z) const;
  cplx nearest_point(cplx z) const;

 private:
  int axis_index(double x) const;
  double axis_level(int index) const;

  Modulation mod_;
  int bits_per_axis_;
  int levels_;
  double scale_;
};

}  // namespace grfb
