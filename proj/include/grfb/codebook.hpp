#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "grfb/givens.hpp"
#include "grfb/quantizer.hpp"

namespace grfb {

struct AngleHistogram {
  std::string parameter;
  std::vector<double> edges;  // bins + 1 ascending edges
  std::vector<std::size_t> counts;
  std::size_t samples = 0;
};

/// Values outside [lo, hi] are clamped into the end bins.
AngleHistogram make_histogram(std::string parameter, std::span<const double> values, double lo,
                              double hi, std::size_t bins);

/// `n` Givens parameter sets from i.i.d. Rayleigh n_t x n_t channels: SVD,
/// first k right singular vectors, phase normalization, decomposition.
/// Sample j depends only on (seed, j).
std::vector<GivensParams> sample_gr_params(const GrDims& dims, std::size_t n, std::uint64_t seed);

/// Column `slot` (canonical order) across a sample set.
std::vector<double> angle_column(const std::vector<GivensParams>& samples, std::size_t slot);

struct TrainedCodebook {
  std::vector<double> levels;         // ascending
  std::vector<double> probabilities;  // fraction of samples per cell
  double distortion = 0.0;            // mean squared angle error
  std::vector<double> history;        // initial distortion, then one entry per iteration
  std::size_t iterations = 0;
};

/// Scalar Lloyd iteration: nearest-level partition, centroid update. Seeded
/// k-means++ initialization; an empty cell is repaired by splitting the
/// cell with the largest distortion. Stops when the relative distortion
/// change drops below 1e-8 or after 200 iterations.
TrainedCodebook lloyd_train_psi(std::span<const double> samples, std::size_t k, std::uint64_t seed);

/// Mean of min_j (x - level_j)^2.
double codebook_distortion(std::span<const double> levels, std::span<const double> samples);

/// Relative frequency of each psi quantizer index, per psi parameter
/// (canonical psi order). Requires n >= 10^4.
std::vector<std::vector<double>> estimate_psi_symbol_probs(const GrDims& dims,
                                                           const PsiQuantizer& quantizer,
                                                           std::size_t n, std::uint64_t seed);

/// Kolmogorov-Smirnov distance between the sample CDF and U[lo, hi).
double ks_uniform(std::span<const double> samples, double lo, double hi);

}  // namespace grfb
