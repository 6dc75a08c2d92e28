#include "grfb/link_sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include "grfb/error.hpp"

namespace grfb {

namespace {

constexpr std::size_t kTrialsPerBlock = 64;
constexpr double kErasedGain = 1e-12;

std::vector<Constellation> make_constellations(const LinkConfig& c) {
  std::vector<Constellation> out;
  for (Modulation m : c.modulations) out.emplace_back(m);
  return out;
}

struct Counts {
  std::vector<std::size_t> sent, errors;
  bool failed = false;
};

void count_errors(const Detection& det, const TrialInputs& in, std::size_t symbol,
                  std::span<const Constellation> cons, Counts& c) {
  for (std::size_t s = 0; s < cons.size(); ++s) {
    const auto bps = static_cast<std::size_t>(cons[s].bits_per_symbol());
    c.sent[s] += bps;
    if (det.erased[s]) {
      c.errors[s] += bps / 2;
      continue;
    }
    for (std::size_t b = 0; b < bps; ++b)
      if (det.bits[s][b] != in.bits[s][symbol * bps + b]) ++c.errors[s];
  }
}

// Sends every symbol of the trial through the quantized beamformer.
Counts transmit(const TrialInputs& in, const Eigenmodes& eig, const ComplexMatrix& w_tilde,
                const LinkConfig& config, double snr_db, std::span<const Constellation> cons) {
  const auto k = static_cast<std::size_t>(config.k);
  const double n0 = std::pow(10.0, -snr_db / 10.0);
  const double amp = 1.0 / std::sqrt(static_cast<double>(k));
  const double noise_amp = std::sqrt(n0);
  Counts c{std::vector<std::size_t>(k, 0), std::vector<std::size_t>(k, 0)};

  std::vector<cplx> gains(k);
  for (std::size_t s = 0; s < k; ++s) gains[s] = eig.d_bar[s] * amp;
  ComplexMatrix g;
  if (config.receiver == Receiver::mmse)
    g = ComplexMatrix::diagonal(eig.d_bar) * eig.v_bar.adjoint() * w_tilde;

  std::vector<cplx> u(k);
  for (std::size_t t = 0; t < config.symbols_per_trial; ++t) {
    for (std::size_t s = 0; s < k; ++s) {
      const auto bps = static_cast<std::size_t>(cons[s].bits_per_symbol());
      u[s] = amp * cons[s].map(std::span(in.bits[s]).subspan(t * bps, bps));
    }
    const auto x = w_tilde * std::span<const cplx>(u);
    auto y = in.h * std::span<const cplx>(x);
    for (std::size_t r = 0; r < y.size(); ++r) y[r] += noise_amp * in.noise[t][r];

    if (config.receiver == Receiver::parallel) {
      count_errors(parallel_decode(y, eig.u, gains, cons), in, t, cons, c);
    } else {
      const auto z = eig.u.adjoint() * std::span<const cplx>(y);
      try {
        count_errors(mmse_decode(z, g, n0 / (amp * amp), cons, 1.0 / amp), in, t, cons, c);
      } catch (const NumericalError&) {
        c.failed = true;
        return c;
      }
    }
  }
  return c;
}

Detection slice(std::vector<cplx> soft, std::vector<bool> erased, std::span<const Constellation> cons) {
  Detection d{std::move(soft), {}, std::move(erased)};
  for (std::size_t s = 0; s < cons.size(); ++s)
    d.bits.push_back(d.erased[s] ? std::vector<std::uint8_t>(static_cast<std::size_t>(cons[s].bits_per_symbol()), 0)
                                 : cons[s].detect(d.soft[s]));
  return d;
}

// Everything that affects the wire format, so custom schemes hash distinctly.
std::string describe_scheme(const FeedbackScheme& s) {
  std::ostringstream o;
  o << std::setprecision(17) << s.id;
  if (s.perfect()) return o.str();
  const auto& p = *s.policy;
  o << "[psi=";
  const auto lv = quantizer_levels(p.psi_quantizer());
  for (std::size_t i = 0; i < lv.size(); ++i) o << (i ? " " : "") << lv[i];
  if (p.is_dynamic()) {
    o << ";rule=";
    for (const auto& [tuple, widths] : p.rule()) {
      for (auto t : tuple) o << t;
      o << ':';
      for (int w : widths) o << w;
      o << ' ';
    }
  } else {
    o << ";phi=";
    for (int w : p.phi_bits(std::vector<std::size_t>(s.dims.psi_count(), 0))) o << w;
  }
  o << ";codes=";
  for (const auto& c : s.psi_codes) {
    if (!c) o << '-';
    else
      for (int l : c->lengths()) o << l;
    o << ' ';
  }
  o << ']';
  return o.str();
}

struct SchemeAccumulator {
  double mse = 0.0, mad = 0.0, chordal = 0.0, bits = 0.0;
  std::size_t n = 0;
  std::vector<std::size_t> sent, errors, failed;  // sent/errors: [snr * k + stream]; failed: [snr]
};

}  // namespace

Receiver parse_receiver(const std::string& name) {
  if (name == "parallel") return Receiver::parallel;
  if (name == "mmse") return Receiver::mmse;
  throw ConfigError("unknown receiver '" + name + "' (expected parallel or mmse)");
}

std::string to_string(Receiver r) { return r == Receiver::parallel ? "parallel" : "mmse"; }

void LinkConfig::validate() const {
  if (n_t < 1 || n_t > 4 || n_r < 1 || n_r > 4) throw ConfigError("antenna counts must be in 1..4");
  if (k < 1 || k > std::min(n_t, n_r)) throw ConfigError("streams must satisfy 1 <= k <= min(n_t, n_r)");
  if (modulations.size() != static_cast<std::size_t>(k))
    throw ConfigError("need one modulation per stream");
  if (snr_db.empty()) throw ConfigError("need at least one SNR point");
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (symbols_per_trial < 1) throw ConfigError("symbols_per_trial must be >= 1");
  for (const auto& s : schemes)
    if (!(s.dims == dims()))
      throw ConfigError("scheme '" + s.id + "' is for " + s.dims.label() + ", link is " + dims().label());
}

std::string LinkConfig::describe() const {
  std::ostringstream o;
  o << std::setprecision(17) << "n_t=" << n_t << ";n_r=" << n_r << ";k=" << k << ";mod=";
  for (std::size_t i = 0; i < modulations.size(); ++i) o << (i ? "," : "") << to_string(modulations[i]);
  o << ";snr=";
  for (std::size_t i = 0; i < snr_db.size(); ++i) o << (i ? "," : "") << snr_db[i];
  o << ";schemes=";
  for (std::size_t i = 0; i < schemes.size(); ++i) o << (i ? "," : "") << describe_scheme(schemes[i]);
  o << ";trials=" << trials << ";symbols=" << symbols_per_trial << ";receiver=" << to_string(receiver)
    << ";seed=" << seed;
  return o.str();
}

TrialInputs draw_trial_inputs(const LinkConfig& config, Rng& rng) {
  TrialInputs in;
  in.h = rayleigh_channel(static_cast<std::size_t>(config.n_r), static_cast<std::size_t>(config.n_t), rng);
  std::bernoulli_distribution coin(0.5);
  for (Modulation m : config.modulations) {
    const Constellation c(m);
    std::vector<std::uint8_t> b(config.symbols_per_trial * static_cast<std::size_t>(c.bits_per_symbol()));
    for (auto& bit : b) bit = coin(rng) ? 1 : 0;
    in.bits.push_back(std::move(b));
  }
  for (std::size_t t = 0; t < config.symbols_per_trial; ++t) {
    std::vector<cplx> n(static_cast<std::size_t>(config.n_r));
    for (auto& v : n) v = complex_gaussian(rng);
    in.noise.push_back(std::move(n));
  }
  return in;
}

FeedbackOutcome apply_feedback(const ComplexMatrix& w, const FeedbackScheme& scheme) {
  if (scheme.perfect()) return {w, std::numeric_limits<double>::infinity(), 0.0, 0.0, 0.0};
  const GivensParams p = gr_decompose(w, scheme.dims);
  const QuantizedParams q = quantize_gr(p, *scheme.policy);
  FeedbackOutcome out;
  out.bits = message_length(q, scheme);
  out.w_tilde = gr_reconstruct(dequantize_gr(q));
  out.mse = std::pow((w - out.w_tilde).frobenius_norm(), 2);
  for (std::size_t c = 0; c < w.cols(); ++c) {
    cplx ip{};
    for (std::size_t r = 0; r < w.rows(); ++r) ip += std::conj(w(r, c)) * out.w_tilde(r, c);
    out.mad += std::sqrt(std::max(0.0, 1.0 - ip.real() * ip.real()));
    out.mad_chordal += std::sqrt(std::max(0.0, 1.0 - std::norm(ip)));
  }
  out.mad /= static_cast<double>(w.cols());
  out.mad_chordal /= static_cast<double>(w.cols());
  return out;
}

Detection parallel_decode(std::span<const cplx> y, const ComplexMatrix& u, std::span<const cplx> gains,
                          std::span<const Constellation> constellations) {
  if (gains.size() != constellations.size() || gains.size() > u.cols())
    throw ValidationError("parallel_decode: stream count mismatch");
  const auto z = u.adjoint() * y;
  std::vector<cplx> soft(gains.size());
  std::vector<bool> erased(gains.size(), false);
  for (std::size_t s = 0; s < gains.size(); ++s) {
    if (std::abs(gains[s]) < kErasedGain) {
      erased[s] = true;
      continue;
    }
    soft[s] = z[s] / gains[s];
  }
  return slice(std::move(soft), std::move(erased), constellations);
}

Detection mmse_decode(std::span<const cplx> y, const ComplexMatrix& g, double alpha,
                      std::span<const Constellation> constellations, double symbol_scale) {
  if (g.cols() != constellations.size() || g.rows() != y.size())
    throw ValidationError("mmse_decode: shape mismatch");
  if (alpha < 0.0) throw ValidationError("mmse_decode: alpha must be >= 0");
  const ComplexMatrix gh = g.adjoint();
  ComplexMatrix a = gh * g;
  for (std::size_t i = 0; i < a.rows(); ++i) a(i, i) += alpha;
  auto est = solve(a, gh * y, 1e-13);
  for (auto& e : est) e *= symbol_scale;
  return slice(std::move(est), std::vector<bool>(constellations.size(), false), constellations);
}

TrialRecord run_trial(const TrialInputs& inputs, const FeedbackScheme& scheme, const LinkConfig& config,
                      double snr_db) {
  config.validate();
  const Eigenmodes eig = eigen_beamformer(inputs.h, config.k);
  const auto cons = make_constellations(config);
  TrialRecord rec;
  rec.feedback = apply_feedback(eig.w, scheme);
  Counts c = transmit(inputs, eig, rec.feedback.w_tilde, config, snr_db, cons);
  rec.bits_sent = std::move(c.sent);
  rec.bit_errors = std::move(c.errors);
  rec.failed = c.failed;
  return rec;
}

double BerPoint::ber() const {
  return bits_sent ? static_cast<double>(bit_errors) / static_cast<double>(bits_sent) : 0.0;
}

double BerPoint::sigma() const {
  if (!bits_sent) return 0.0;
  const double p = ber();
  return std::sqrt(p * (1.0 - p) / static_cast<double>(bits_sent));
}

const BerPoint& SchemeResult::at(std::size_t snr_index, int stream) const {
  std::size_t streams = 0;
  for (const auto& b : ber) streams = std::max<std::size_t>(streams, static_cast<std::size_t>(b.stream) + 1);
  return ber.at(snr_index * streams + static_cast<std::size_t>(stream));
}

std::vector<SchemeResult> run_campaign(const LinkConfig& config) {
  config.validate();
  const auto cons = make_constellations(config);
  const std::size_t k = static_cast<std::size_t>(config.k);
  const std::size_t n_snr = config.snr_db.size();
  const std::size_t n_schemes = config.schemes.size();
  const std::size_t n_blocks = (config.trials + kTrialsPerBlock - 1) / kTrialsPerBlock;

  auto fresh = [&] {
    std::vector<SchemeAccumulator> acc(n_schemes);
    for (auto& a : acc) {
      a.sent.assign(n_snr * k, 0);
      a.errors.assign(n_snr * k, 0);
      a.failed.assign(n_snr, 0);
    }
    return acc;
  };
  std::vector<std::vector<SchemeAccumulator>> blocks(n_blocks);

  auto run_block = [&](std::size_t b) {
    auto acc = fresh();
    Rng rng = make_rng(config.seed, b);
    const std::size_t end = std::min(config.trials, (b + 1) * kTrialsPerBlock);
    for (std::size_t t = b * kTrialsPerBlock; t < end; ++t) {
      const TrialInputs in = draw_trial_inputs(config, rng);
      const Eigenmodes eig = eigen_beamformer(in.h, config.k);
      for (std::size_t s = 0; s < n_schemes; ++s) {
        const FeedbackOutcome fb = apply_feedback(eig.w, config.schemes[s]);
        auto& a = acc[s];
        a.mse += fb.mse;
        a.mad += fb.mad;
        a.chordal += fb.mad_chordal;
        a.bits += fb.bits;
        ++a.n;
        for (std::size_t p = 0; p < n_snr; ++p) {
          const Counts c = transmit(in, eig, fb.w_tilde, config, config.snr_db[p], cons);
          if (c.failed) {
            ++a.failed[p];
            continue;
          }
          for (std::size_t st = 0; st < k; ++st) {
            a.sent[p * k + st] += c.sent[st];
            a.errors[p * k + st] += c.errors[st];
          }
        }
      }
    }
    blocks[b] = std::move(acc);
  };

  unsigned threads = config.threads ? config.threads : std::max(1U, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n_blocks));
  if (threads <= 1) {
    for (std::size_t b = 0; b < n_blocks; ++b) run_block(b);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < threads; ++i)
      pool.emplace_back([&] {
        for (std::size_t b = next++; b < n_blocks; b = next++) run_block(b);
      });
  }

  auto total = fresh();
  for (const auto& blk : blocks)
    for (std::size_t s = 0; s < n_schemes; ++s) {
      auto& t = total[s];
      const auto& a = blk[s];
      t.mse += a.mse;
      t.mad += a.mad;
      t.chordal += a.chordal;
      t.bits += a.bits;
      t.n += a.n;
      for (std::size_t i = 0; i < t.sent.size(); ++i) {
        t.sent[i] += a.sent[i];
        t.errors[i] += a.errors[i];
      }
      for (std::size_t i = 0; i < n_snr; ++i) t.failed[i] += a.failed[i];
    }

  std::vector<SchemeResult> out;
  for (std::size_t s = 0; s < n_schemes; ++s) {
    const auto& t = total[s];
    const double n = static_cast<double>(t.n);
    SchemeResult r{config.schemes[s].id, t.mse / n, t.mad / n, t.chordal / n, t.bits / n, t.n, {}};
    for (std::size_t p = 0; p < n_snr; ++p)
      for (std::size_t st = 0; st < k; ++st)
        r.ber.push_back({config.snr_db[p], static_cast<int>(st), t.sent[p * k + st], t.errors[p * k + st],
                         t.failed[p]});
    out.push_back(std::move(r));
  }
  return out;
}

QuantizerStats evaluate_quantizer(const GrDims& dims, const FeedbackScheme& scheme, std::size_t n,
                                  std::uint64_t seed) {
  dims.validate();
  if (!(scheme.dims == dims)) throw ConfigError("scheme dims do not match " + dims.label());
  if (n < 10000) throw ValidationError("evaluate_quantizer needs n >= 10^4");
  QuantizerStats st;
  const auto nt = static_cast<std::size_t>(dims.n_t);
  for (std::size_t j = 0; j < n; ++j) {
    Rng rng = make_rng(seed, j);
    const Eigenmodes eig = eigen_beamformer(rayleigh_channel(nt, nt, rng), dims.k);
    const FeedbackOutcome fb = apply_feedback(eig.w, scheme);
    st.mse += fb.mse;
    st.mad += fb.mad;
    st.mad_chordal += fb.mad_chordal;
    st.avg_bits += fb.bits;
  }
  const double dn = static_cast<double>(n);
  st.mse /= dn;
  st.mad /= dn;
  st.mad_chordal /= dn;
  st.avg_bits /= dn;
  st.samples = n;
  return st;
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void write_campaign_csv(std::ostream& out, const LinkConfig& config, const std::vector<SchemeResult>& results) {
  std::ostringstream hash;
  hash << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(config.describe());
  out << "# config_hash=" << hash.str() << "\n"
      << "# seed=" << config.seed << "\n"
      << "# config=" << config.describe() << "\n"
      << "# snr=Es/N0 per receive antenna, unit total transmit energy split equally over streams\n"
      << "scheme,snr_db,stream,bits_sent,bit_errors,ber,mse,mad,avg_feedback_bits,trials\n";
  out << std::setprecision(10);
  for (const auto& r : results)
    for (const auto& b : r.ber)
      out << r.scheme << ',' << b.snr_db << ',' << b.stream << ',' << b.bits_sent << ',' << b.bit_errors << ','
          << b.ber() << ',' << r.mse << ',' << r.mad << ','
          << (std::isinf(r.avg_feedback_bits) ? std::string("inf") : [&] {
               std::ostringstream o;
               o << std::setprecision(10) << r.avg_feedback_bits;
               return o.str();
             }())
          << ',' << r.trials << '\n';
}

}  // namespace grfb
