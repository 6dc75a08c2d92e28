#pragma once

#include <cstdint>
#include <random>

#include "grfb/cxmat.hpp"
#include "grfb/givens.hpp"

namespace grfb {

using Rng = std::mt19937_64;

/// Independent generator for substream `stream` of `seed`.
Rng make_rng(std::uint64_t seed, std::uint64_t stream);

/// Circularly symmetric complex Gaussian with E|z|^2 = 1.
cplx complex_gaussian(Rng& rng);

/// n_r x n_t matrix of i.i.d. unit-variance complex Gaussian entries.
ComplexMatrix rayleigh_channel(std::size_t n_r, std::size_t n_t, Rng& rng);

/// Everything the transmitter and receiver derive from one channel draw.
struct Eigenmodes {
  ComplexMatrix u;          // n_r x R left singular vectors
  std::vector<cplx> d_bar;  // R entries of D Sigma
  ComplexMatrix v_bar;      // n_t x R, last row real and nonnegative
  ComplexMatrix w;          // first k columns of v_bar
};

/// SVD of h, phase normalization of V, and the k-stream beamformer.
Eigenmodes eigen_beamformer(const ComplexMatrix& h, int k);

/// One Rayleigh draw (n_r = n_t) reduced to its Givens parameters.
GivensParams sample_gr_param(const GrDims& dims, Rng& rng);

}  // namespace grfb
