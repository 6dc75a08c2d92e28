#include "grfb/channel.hpp"

#include <cmath>

#include "grfb/error.hpp"

namespace grfb {

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    0x67726662U};
  return Rng(seq);
}

cplx complex_gaussian(Rng& rng) {
  std::normal_distribution<double> n(0.0, M_SQRT1_2);
  const double re = n(rng);
  const double im = n(rng);
  return {re, im};
}

ComplexMatrix rayleigh_channel(std::size_t n_r, std::size_t n_t, Rng& rng) {
  ComplexMatrix h(n_r, n_t);
  for (std::size_t r = 0; r < n_r; ++r)
    for (std::size_t c = 0; c < n_t; ++c) h(r, c) = complex_gaussian(rng);
  return h;
}

Eigenmodes eigen_beamformer(const ComplexMatrix& h, int k) {
  SvdResult s = svd(h);
  if (k < 1 || static_cast<std::size_t>(k) > s.d.size())
    throw ConfigError("stream count " + std::to_string(k) + " exceeds the channel rank bound");
  PhaseNormalized pn = phase_normalize(s.v);
  std::vector<cplx> d_bar(s.d.size());
  for (std::size_t i = 0; i < d_bar.size(); ++i) d_bar[i] = s.d[i] * pn.sigma(i, i);
  ComplexMatrix w = pn.v_bar.leading_columns(static_cast<std::size_t>(k));
  return {std::move(s.u), std::move(d_bar), std::move(pn.v_bar), std::move(w)};
}

GivensParams sample_gr_param(const GrDims& dims, Rng& rng) {
  const auto n = static_cast<std::size_t>(dims.n_t);
  const Eigenmodes e = eigen_beamformer(rayleigh_channel(n, n, rng), dims.k);
  return gr_decompose(e.w, dims);
}

}  // namespace grfb
