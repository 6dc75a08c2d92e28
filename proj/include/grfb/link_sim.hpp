#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "grfb/channel.hpp"
#include "grfb/entropy.hpp"
#include "grfb/modulation.hpp"

namespace grfb {

enum class Receiver { parallel, mmse };

Receiver parse_receiver(const std::string& name);
std::string to_string(Receiver r);

/// Closed-loop link setup. SNR is E_s/N_0 per receive antenna with unit total
/// transmit energy per channel use, split equally over the k streams.
struct LinkConfig {
  int n_t = 3;
  int n_r = 3;
  int k = 1;
  std::vector<Modulation> modulations{Modulation::qpsk};  // one per stream
  std::vector<double> snr_db{0.0};
  std::vector<FeedbackScheme> schemes;
  std::size_t trials = 1000;           // channel draws per SNR point
  std::size_t symbols_per_trial = 1;   // channel uses per draw (block fading)
  Receiver receiver = Receiver::parallel;
  std::uint64_t seed = 1;
  unsigned threads = 0;  // 0: hardware concurrency

  GrDims dims() const { return {n_t, k}; }
  /// Throws ConfigError when k > min(n_t, n_r), trials == 0, etc.
  void validate() const;
  /// Stable one-line description used for the config hash.
  std::string describe() const;
};

/// Random draws shared by every scheme for one trial index.
struct TrialInputs {
  ComplexMatrix h;                               // n_r x n_t
  std::vector<std::vector<std::uint8_t>> bits;   // per stream, symbols * bits/symbol
  std::vector<std::vector<cplx>> noise;          // per symbol, n_r unit-variance entries
};

TrialInputs draw_trial_inputs(const LinkConfig& config, Rng& rng);

struct FeedbackOutcome {
  ComplexMatrix w_tilde;
  double bits = 0.0;  // +inf for unquantized feedback
  double mse = 0.0;   // ||W - W~||_F^2
  double mad = 0.0;   // column mean of sqrt(1 - Re(w^H w~)^2)
  double mad_chordal = 0.0;  // column mean of sqrt(1 - |w^H w~|^2)
};

/// Decompose, quantize, measure the encoded length, and reconstruct.
FeedbackOutcome apply_feedback(const ComplexMatrix& w, const FeedbackScheme& scheme);

/// Per-stream soft estimates and hard bit decisions.
struct Detection {
  std::vector<cplx> soft;
  std::vector<std::vector<std::uint8_t>> bits;
  std::vector<bool> erased;
};

/// u^ = U^H y, stream s scaled by 1/gains[s] and sliced on its own; any
/// cross-stream leakage is ignored. Streams with |gain| < 1e-12 are erased.
Detection parallel_decode(std::span<const cplx> y, const ComplexMatrix& u,
                          std::span<const cplx> gains, std::span<const Constellation> constellations);

/// u^ = (G^H G + alpha I)^{-1} G^H y, then per-stream slicing. `symbol_scale`
/// maps the estimate back to the unit-energy constellation.
Detection mmse_decode(std::span<const cplx> y, const ComplexMatrix& g, double alpha,
                      std::span<const Constellation> constellations, double symbol_scale = 1.0);

struct TrialRecord {
  FeedbackOutcome feedback;
  std::vector<std::size_t> bits_sent;   // per stream
  std::vector<std::size_t> bit_errors;  // per stream
  bool failed = false;                  // receiver hit a singular system
};

/// One channel draw through one scheme at one SNR point.
TrialRecord run_trial(const TrialInputs& inputs, const FeedbackScheme& scheme,
                      const LinkConfig& config, double snr_db);

struct BerPoint {
  double snr_db = 0.0;
  int stream = 0;
  std::size_t bits_sent = 0;
  std::size_t bit_errors = 0;
  std::size_t failed_trials = 0;
  double ber() const;
  /// Binomial standard error sqrt(p (1 - p) / n).
  double sigma() const;
};

struct SchemeResult {
  std::string scheme;
  double mse = 0.0;
  double mad = 0.0;
  double mad_chordal = 0.0;
  double avg_feedback_bits = 0.0;
  std::size_t trials = 0;
  std::vector<BerPoint> ber;  // ordered by (snr index, stream)

  const BerPoint& at(std::size_t snr_index, int stream) const;
};

/// Every scheme sees the same channel, data and noise for a given trial
/// index; trial t at every SNR point reuses the same draw.
std::vector<SchemeResult> run_campaign(const LinkConfig& config);

struct QuantizerStats {
  double mse = 0.0;
  double mad = 0.0;
  double mad_chordal = 0.0;
  double avg_bits = 0.0;
  std::size_t samples = 0;
};

/// Monte Carlo distortion over n >= 10^4 Rayleigh channels (n_r = n_t).
QuantizerStats evaluate_quantizer(const GrDims& dims, const FeedbackScheme& scheme, std::size_t n,
                                  std::uint64_t seed);

/// CSV with columns scheme,snr_db,stream,bits_sent,bit_errors,ber,mse,mad,
/// avg_feedback_bits,trials preceded by '#' metadata lines.
void write_campaign_csv(std::ostream& out, const LinkConfig& config,
                        const std::vector<SchemeResult>& results);

std::uint64_t fnv1a64(const std::string& text);

}  // namespace grfb
