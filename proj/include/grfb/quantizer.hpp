#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "grfb/givens.hpp"

namespace grfb {

enum class GridKind { psi, phi };

/// Mid-rise uniform grid over [0, pi/2] (psi) or [0, 2pi) (phi):
///   psi_k = k pi / 2^(b+1) + pi / 2^(b+2)
///   phi_k = k pi / 2^(b-1) + pi / 2^b,    k = 0 .. 2^b - 1
struct UniformGrid {
  GridKind kind = GridKind::psi;
  int bits = 1;

  static UniformGrid psi(int bits);
  static UniformGrid phi(int bits);

  std::size_t size() const { return std::size_t{1} << bits; }
  double level(std::size_t index) const;
  std::vector<double> levels() const;
  double step() const;
};

/// Trained or hand-picked psi reconstruction levels.
struct PsiCodebook {
  std::vector<double> levels;

  /// Throws ValidationError unless levels are strictly ascending in [0, pi/2].
  explicit PsiCodebook(std::vector<double> lv);
  std::size_t size() const { return levels.size(); }
};

using PsiQuantizer = std::variant<UniformGrid, PsiCodebook>;

std::size_t quantizer_size(const PsiQuantizer& q);
double quantizer_level(const PsiQuantizer& q, std::size_t index);
std::vector<double> quantizer_levels(const PsiQuantizer& q);
/// Fixed field width needed to carry an index: ceil(log2(size)), at least 1.
int index_bits(std::size_t size);

/// Index of the closest level. Phi grids use circular distance, psi linear.
/// Ties (within 1e-12 rad) go to the lower index.
std::size_t nearest_level(const UniformGrid& grid, double angle);
std::size_t nearest_level(const PsiCodebook& codebook, double angle);
std::size_t nearest_level(const PsiQuantizer& q, double angle);

/// Maps the tuple of quantized psi indices (canonical psi order) to the bit
/// widths of every phi (canonical phi order). A fixed policy uses the same
/// widths for every tuple.
class BitAllocationPolicy {
 public:
  using PsiTuple = std::vector<std::size_t>;
  using Rule = std::map<PsiTuple, std::vector<int>>;

  static BitAllocationPolicy fixed(const GrDims& dims, PsiQuantizer psi, int phi_bits);
  /// `rule` must cover every psi index tuple.
  static BitAllocationPolicy dynamic(const GrDims& dims, PsiQuantizer psi, Rule rule);

  bool is_dynamic() const { return state_->dynamic; }
  const GrDims& dims() const { return state_->dims; }
  const PsiQuantizer& psi_quantizer() const { return state_->psi; }
  int psi_field_bits() const { return index_bits(quantizer_size(state_->psi)); }
  const Rule& rule() const { return state_->rule; }

  std::vector<int> phi_bits(std::span<const std::size_t> psi_indices) const;
  /// psi fields at fixed width plus the phi widths for this tuple.
  int message_bits(std::span<const std::size_t> psi_indices) const;

 private:
  struct State {
    GrDims dims;
    PsiQuantizer psi;
    bool dynamic = false;
    std::vector<int> fixed_phi_bits;
    Rule rule;
  };
  explicit BitAllocationPolicy(std::shared_ptr<const State> s) : state_(std::move(s)) {}
  std::shared_ptr<const State> state_;
};

struct QuantizedParams {
  GrDims dims;
  std::vector<std::size_t> psi_indices;  // canonical psi order
  std::vector<std::size_t> phi_indices;  // canonical phi order
  std::vector<int> phi_bits;             // width of each phi grid
  BitAllocationPolicy policy;
  int message_bits = 0;  // with fixed-width psi fields

  friend bool operator==(const QuantizedParams& a, const QuantizedParams& b) {
    return a.dims == b.dims && a.psi_indices == b.psi_indices &&
           a.phi_indices == b.phi_indices && a.phi_bits == b.phi_bits;
  }
};

/// Quantizes the psis first, then every phi on the grid the policy assigns
/// for the resulting psi tuple.
QuantizedParams quantize_gr(const GivensParams& p, const BitAllocationPolicy& policy);

/// Builds QuantizedParams from raw indices, checking every index range.
QuantizedParams make_quantized(const BitAllocationPolicy& policy,
                               std::vector<std::size_t> psi_indices,
                               std::vector<std::size_t> phi_indices);

GivensParams dequantize_gr(const QuantizedParams& q);

using PsiIndexDistribution = std::vector<std::pair<std::vector<std::size_t>, double>>;

/// Joint distribution of independent per-psi index marginals.
PsiIndexDistribution product_distribution(const std::vector<std::vector<double>>& marginals);

/// Expected message_bits under `dist`. Throws ValidationError if the
/// probabilities do not sum to 1 within 1e-9.
double average_bits(const BitAllocationPolicy& policy, const PsiIndexDistribution& dist);

/// The 3x1 variable-rate policy: psi codebook {0.2967, 0.8727} rad for both
/// psi21 and psi31, phi21/phi11 widths picked from the psi pair
/// (7 or 9 bits per message, 8 on average).
BitAllocationPolicy variable_rate_policy();
PsiCodebook trained_psi_codebook();

}  // namespace grfb
