#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "grfb/quantizer.hpp"

namespace grfb {

/// Prefix code over symbols 0..n-1. Codewords are canonical: assigned in
/// order of (length, symbol index), so equal-probability ties cannot change
/// the bitstream.
class SymbolTable {
 public:
  std::size_t size() const { return probs_.size(); }
  const std::vector<double>& probabilities() const { return probs_; }
  const std::vector<int>& lengths() const { return lengths_; }
  std::uint32_t code(std::size_t symbol) const { return codes_.at(symbol); }
  /// Codeword as a '0'/'1' string.
  std::string codeword(std::size_t symbol) const;
  double average_length() const;
  double entropy() const;
  double kraft_sum() const;

  /// Canonical code for explicit lengths (must satisfy Kraft <= 1).
  static SymbolTable from_lengths(std::vector<double> probs, std::vector<int> lengths);

 private:
  std::vector<double> probs_;
  std::vector<int> lengths_;
  std::vector<std::uint32_t> codes_;
};

/// Optimal (Huffman) code lengths with canonical codewords. Requires >= 2
/// symbols, all probabilities > 0, summing to 1 within 1e-9.
SymbolTable build_huffman(std::span<const double> probs);

class BitWriter {
 public:
  void write(std::uint32_t value, int width);  // MSB first
  std::size_t size() const { return bits_; }
  std::vector<std::uint8_t> take() { return std::move(bytes_); }
  const std::vector<std::uint8_t>& bytes() const { return bytes_; }

 private:
  std::vector<std::uint8_t> bytes_;
  std::size_t bits_ = 0;
};

class BitReader {
 public:
  BitReader(std::span<const std::uint8_t> bytes, std::size_t bit_length);
  /// Throws CorruptMessage when fewer than `width` bits remain.
  std::uint32_t read(int width);
  std::size_t remaining() const { return length_ - pos_; }
  std::size_t position() const { return pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t length_;
  std::size_t pos_ = 0;
};

/// A complete feedback configuration: how the matrix is quantized and how
/// each field goes on the wire. `policy` empty means unquantized feedback.
struct FeedbackScheme {
  std::string id;
  GrDims dims;
  std::optional<BitAllocationPolicy> policy;
  /// One entry per psi (canonical order); empty entries, or an empty vector,
  /// mean fixed-width psi fields.
  std::vector<std::optional<SymbolTable>> psi_codes;

  bool perfect() const { return !policy.has_value(); }
  /// psi fields go ahead of the phis of their column group when true.
  bool psi_first() const { return policy && policy->is_dynamic(); }
  const SymbolTable* psi_code(std::size_t psi_slot) const;
};

struct FeedbackMessage {
  GrDims dims;
  std::string scheme_id;
  std::vector<std::uint8_t> payload;  // MSB-first, last byte zero-padded
  std::size_t bit_length = 0;

  /// ceil(bit_length / 4) hex digits, trailing pad bits zero.
  std::string hex() const;
  /// '0'/'1' string of exactly bit_length characters.
  std::string bit_string() const;
  static FeedbackMessage from_hex(const GrDims& dims, std::string scheme_id, const std::string& hex,
                                  std::size_t bit_length);
};

/// Serializes the indices field by field. For each column group: phis by
/// ascending l then psis by ascending l, or psis first for dynamic schemes.
/// Fixed fields are big-endian, Huffman fields use the scheme's table.
/// Throws ConfigError when the psi codes or the dynamic rule cannot be
/// encoded or decoded unambiguously.
void validate_scheme(const FeedbackScheme& scheme);

FeedbackMessage encode_message(const QuantizedParams& q, const FeedbackScheme& scheme);

/// Exact inverse of encode_message. Throws CorruptMessage on truncation,
/// an invalid Huffman prefix, or unread trailing bits.
QuantizedParams decode_message(const FeedbackMessage& m, const FeedbackScheme& scheme);

/// Decodes the leading message from `reader` and leaves any remaining bits.
QuantizedParams decode_fields(BitReader& reader, const FeedbackScheme& scheme);

/// Length in bits of the encoding of q, without building the payload.
int message_length(const QuantizedParams& q, const FeedbackScheme& scheme);

/// Expected encoded length under a psi index distribution.
double expected_message_bits(const FeedbackScheme& scheme, const PsiIndexDistribution& dist);

struct PhiWidths {
  int phi11;
  int phi21;
  int phi22;
  friend bool operator==(const PhiWidths&, const PhiWidths&) = default;
};

/// 3x2 entropy-coded scheme phi widths: 3 bits for phi11/phi21 when psi21 is
/// 33.75 or 56.25 degrees and psi31 is 11.25 or 33.75 degrees, 2 otherwise;
/// phi22 always 2. Indices are on the 2-bit psi grid.
PhiWidths scheme_e_phi_bits(std::size_t psi21_index, std::size_t psi31_index);

/// psi level probabilities used to build the Scheme E codes.
std::vector<double> psi21_probabilities();  // also used for psi32
std::vector<double> psi31_probabilities();  // psi31

namespace schemes {

FeedbackScheme fixed(const GrDims& dims, int psi_bits, int phi_bits, std::string id = {});
FeedbackScheme perfect(const GrDims& dims);
FeedbackScheme traditional_3x1();  // psi 1 bit, phi 3 bits: 8 bits
FeedbackScheme proposed_3x1();     // Table-4 policy, 7 or 9 bits
FeedbackScheme scheme_a(const GrDims& dims);
FeedbackScheme scheme_b(const GrDims& dims);  // psi 1 bit, phi 3 bits
FeedbackScheme scheme_c(const GrDims& dims);  // psi 2 bits, phi 2 bits
FeedbackScheme scheme_d(const GrDims& dims);  // psi 2 bits, phi 3 bits
FeedbackScheme scheme_e();                    // 3x2 Huffman psi + dynamic phi

/// Resolves "A".."E", "traditional", "proposed", or "fixed:<bpsi>:<bphi>".
FeedbackScheme by_name(const std::string& name, const GrDims& dims);

}  // namespace schemes

}  // namespace grfb
