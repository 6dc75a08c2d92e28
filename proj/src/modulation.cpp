#include "grfb/modulation.hpp"

#include <algorithm>
#include <cmath>

#include "grfb/error.hpp"

namespace grfb {

namespace {

int gray_encode(int v) { return v ^ (v >> 1); }

int gray_decode(int g) {
  int v = 0;
  for (; g; g >>= 1) v ^= g;
  return v;
}

}  // namespace

Modulation parse_modulation(const std::string& name) {
  std::string up;
  for (char c : name) up.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  if (up == "QPSK" || up == "4QAM") return Modulation::qpsk;
  if (up == "16QAM") return Modulation::qam16;
  if (up == "64QAM") return Modulation::qam64;
  throw ConfigError("unknown modulation '" + name + "'");
}

std::string to_string(Modulation m) {
  switch (m) {
    case Modulation::qpsk: return "QPSK";
    case Modulation::qam16: return "16QAM";
    case Modulation::qam64: return "64QAM";
  }
  return "?";
}

Constellation::Constellation(Modulation m) : mod_(m) {
  switch (m) {
    case Modulation::qpsk: bits_per_axis_ = 1; break;
    case Modulation::qam16: bits_per_axis_ = 2; break;
    case Modulation::qam64: bits_per_axis_ = 3; break;
  }
  levels_ = 1 << bits_per_axis_;
  const double order = static_cast<double>(levels_ * levels_);
  scale_ = 1.0 / std::sqrt(2.0 * (order - 1.0) / 3.0);
}

double Constellation::axis_level(int index) const {
  return static_cast<double>(2 * index - (levels_ - 1)) * scale_;
}

int Constellation::axis_index(double x) const {
  const double pos = std::round((x / scale_ + (levels_ - 1)) / 2.0);
  return static_cast<int>(std::clamp(pos, 0.0, static_cast<double>(levels_ - 1)));
}

cplx Constellation::map(std::span<const std::uint8_t> bits) const {
  if (bits.size() != static_cast<std::size_t>(bits_per_symbol()))
    throw ValidationError("wrong number of bits for " + to_string(mod_));
  int gi = 0, gq = 0;
  for (int b = 0; b < bits_per_axis_; ++b) {
    gi = (gi << 1) | (bits[static_cast<std::size_t>(b)] & 1);
    gq = (gq << 1) | (bits[static_cast<std::size_t>(bits_per_axis_ + b)] & 1);
  }
  return {axis_level(gray_decode(gi)), axis_level(gray_decode(gq))};
}

std::vector<std::uint8_t> Constellation::detect(cplx z) const {
  const int gi = gray_encode(axis_index(z.real()));
  const int gq = gray_encode(axis_index(z.imag()));
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(bits_per_symbol()));
  for (int b = 0; b < bits_per_axis_; ++b) {
    const int shift = bits_per_axis_ - 1 - b;
    bits[static_cast<std::size_t>(b)] = static_cast<std::uint8_t>((gi >> shift) & 1);
    bits[static_cast<std::size_t>(bits_per_axis_ + b)] = static_cast<std::uint8_t>((gq >> shift) & 1);
  }
  return bits;
}

cplx Constellation::nearest_point(cplx z) const {
  return {axis_level(axis_index(z.real())), axis_level(axis_index(z.imag()))};
}

}  // namespace grfb
