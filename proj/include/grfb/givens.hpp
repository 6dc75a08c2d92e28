#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "grfb/cxmat.hpp"

namespace grfb {

/// Shape of a beamforming matrix: n_t transmit antennas, k streams.
struct GrDims {
  int n_t = 0;
  int k = 0;

  /// Throws ConfigError unless 1 <= n_t <= 4 and 1 <= k <= n_t.
  void validate() const;
  /// Number of (phase, rotation) column groups: min(n_t - 1, k).
  int column_groups() const;
  std::size_t phi_count() const;
  std::size_t psi_count() const;
  std::size_t parameter_count() const { return phi_count() + psi_count(); }
  /// "3x2" style label.
  std::string label() const;
  /// Parses "NxK".
  static GrDims parse(const std::string& text);

  friend bool operator==(const GrDims&, const GrDims&) = default;
};

enum class AngleKind { phi, psi };

/// One angle of the parameterization, named by its 1-based (l, i) indices:
/// phi_{l,i} for l = i..n_t-1 and psi_{l,i} for l = i+1..n_t.
struct AngleSlot {
  AngleKind kind;
  int l;
  int i;
  std::string name() const;  // e.g. "phi21", "psi31"
};

/// All angles for `dims` in canonical order: for each column group i,
/// the phis by ascending l followed by the psis by ascending l.
std::vector<AngleSlot> canonical_slots(const GrDims& dims);

struct GrColumn {
  std::vector<double> phis;  // phi_{l,i}, l = i..n_t-1, each in [0, 2pi)
  std::vector<double> psis;  // psi_{l,i}, l = i+1..n_t, each in [0, pi/2]
};

struct GivensParams {
  GrDims dims;
  std::vector<GrColumn> columns;

  /// Angles in canonical order.
  std::vector<double> flat() const;
  /// Only the phis (resp. psis), canonical order across column groups.
  std::vector<double> phis() const;
  std::vector<double> psis() const;
  static GivensParams from_flat(const GrDims& dims, const std::vector<double>& angles);
  /// Builds the column structure from separate phi and psi sequences.
  static GivensParams from_split(const GrDims& dims, const std::vector<double>& phis,
                                 const std::vector<double>& psis);
};

/// Real orthogonal n x n rotation: identity except (i,i) = (l,l) = cos psi,
/// (i,l) = sin psi, (l,i) = -sin psi. Indices are 1-based with i < l.
ComplexMatrix givens_block(int l, int i, double psi, int n);

/// Angles of an n_t x k matrix with orthonormal columns and a real,
/// nonnegative last row (see phase_normalize).
GivensParams gr_decompose(const ComplexMatrix& w, const GrDims& dims);

/// W = prod_i [ D_i prod_{l>i} G_{li}^T(psi_{li}) ] * I_{n_t x k}, where D_i
/// carries e^{j phi_{l,i}} on rows l = i..n_t-1. Phis are wrapped mod 2pi and
/// psis clamped to [0, pi/2].
ComplexMatrix gr_reconstruct(const GivensParams& p);

/// Same product with explicit rotation matrices; slow, kept for cross-checks.
ComplexMatrix gr_reconstruct_dense(const GivensParams& p);

}  // namespace grfb
