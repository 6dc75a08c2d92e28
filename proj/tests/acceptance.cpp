// Acceptance checks. Usage: acceptance [criterion ...]; no argument runs all.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>

#include "grfb/codebook.hpp"
#include "grfb/entropy.hpp"
#include "grfb/error.hpp"
#include "grfb/link_sim.hpp"
#include "reproduce.hpp"

using namespace grfb;
using std::numbers::pi;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string num(double v, int precision = 4) { return cli::fmt(v, precision); }

std::string failed_checks(const cli::Report& r) {
  std::string s;
  for (const auto& c : r.checks)
    if (!c.pass) s += " [" + c.name + ": " + c.measured + " vs " + c.expected + "]";
  return s;
}

Outcome from_report(const cli::Report& r, const std::string& summary) {
  std::ostringstream buf;
  r.print(buf);
  std::cout << buf.str();
  return {r.passed(), summary + (r.passed() ? "" : ";" + failed_checks(r))};
}

// Standard normal tail.
double q_func(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

Outcome gr_roundtrip() {
  const auto t0 = Clock::now();
  const std::vector<std::pair<GrDims, std::size_t>> table{
      {{2, 1}, 2}, {{2, 2}, 2}, {{3, 1}, 4}, {{3, 2}, 6}, {{3, 3}, 6},
      {{4, 1}, 6}, {{4, 2}, 10}, {{4, 3}, 12}, {{4, 4}, 12}};
  double worst = 0.0;
  bool counts_ok = true;
  std::size_t total = 0;
  for (const auto& [dims, count] : table) {
    counts_ok = counts_ok && dims.parameter_count() == count && canonical_slots(dims).size() == count;
    for (std::size_t j = 0; j < 10000; ++j) {
      Rng rng = make_rng(1, j);
      const auto nt = static_cast<std::size_t>(dims.n_t);
      const auto w = eigen_beamformer(rayleigh_channel(nt, nt, rng), dims.k).w;
      const auto p = gr_decompose(w, dims);
      counts_ok = counts_ok && p.flat().size() == count;
      worst = std::max(worst, max_abs_diff(gr_reconstruct(p), w));
      ++total;
    }
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-9 && counts_ok && secs < 10.0,
          "max |W - W~| " + num(worst, 3) + " over " + std::to_string(total) + " matrices, counts " +
              (counts_ok ? "match" : "MISMATCH") + ", " + num(secs, 3) + " s"};
}

Outcome quantizer_grids() {
  double worst = 0.0;
  const std::pair<int, int> table2[] = {{1, 3}, {2, 4}, {3, 5}, {4, 6}};
  for (const auto& [bpsi, bphi] : table2) {
    const auto gp = UniformGrid::psi(bpsi);
    for (std::size_t k = 0; k < gp.size(); ++k)
      worst = std::max(worst, std::abs(gp.level(k) - (static_cast<double>(k) * pi / std::pow(2.0, bpsi + 1) +
                                                       pi / std::pow(2.0, bpsi + 2))));
    const auto gf = UniformGrid::phi(bphi);
    for (std::size_t k = 0; k < gf.size(); ++k)
      worst = std::max(worst, std::abs(gf.level(k) - (static_cast<double>(k) * pi / std::pow(2.0, bphi - 1) +
                                                       pi / std::pow(2.0, bphi))));
  }
  const double deg[] = {11.25, 33.75, 56.25, 78.75};
  const auto two = UniformGrid::psi(2).levels();
  double worst_deg = 0.0;
  for (std::size_t i = 0; i < 4; ++i) worst_deg = std::max(worst_deg, std::abs(two[i] - deg[i] * pi / 180.0));
  return {worst <= 1e-14 && worst_deg <= 1e-14,
          "closed-form deviation " + num(worst, 3) + ", 2-bit psi vs {11.25,33.75,56.25,78.75} deg " +
              num(worst_deg, 3)};
}

Outcome table5() {
  const auto t0 = Clock::now();
  const auto r = cli::reproduce_table5({3, 100000, 0});
  const double secs = seconds_since(t0);
  auto o = from_report(r, "10^5 channels in " + num(secs, 3) + " s");
  o.pass = o.pass && secs < 60.0;
  return o;
}

Outcome tables67() {
  const auto r6 = cli::reproduce_table6({4, 100000, 0});
  const auto r7 = cli::reproduce_table7({4, 100000, 0});
  const auto a = from_report(r6, "");
  const auto b = from_report(r7, "");
  const double avg6 = build_huffman(psi21_probabilities()).average_length();
  const double avg7 = build_huffman(psi31_probabilities()).average_length();
  const bool exact_avg = std::abs(avg6 - 1.93862) < 1e-12 && std::abs(avg7 - 1.77284) < 1e-12;
  return {a.pass && b.pass && exact_avg,
          "probabilities within 0.02, lengths {3,1,2,3} / {2,1,3,3}, averages " + num(avg6, 7) + " / " +
              num(avg7, 7) + a.detail + b.detail};
}

Outcome scheme_e_budget() {
  const auto s = schemes::scheme_e();
  const auto p6 = psi21_probabilities();
  const double analytic = expected_message_bits(s, product_distribution({p6, psi31_probabilities(), p6}));
  const auto st = evaluate_quantizer({3, 2}, s, 100000, 5);
  const bool ok = std::abs(analytic - 12.709) < 5e-4 && std::abs(st.avg_bits - 12.71) <= 0.05;
  return {ok, "analytic " + num(analytic, 7) + " bits, Monte Carlo " + num(st.avg_bits, 6) + " bits"};
}

Outcome bitstream() {
  std::size_t exhaustive = 0, randomized = 0, rejected = 0, attempts = 0;
  bool ok = true;
  auto probe_corruption = [&](const FeedbackMessage& m, const FeedbackScheme& s) {
    for (std::size_t len : {m.bit_length - 1, m.bit_length + 1}) {
      FeedbackMessage bad = m;
      bad.bit_length = len;
      bad.payload.resize((len + 7) / 8, 0);
      ++attempts;
      try {
        decode_message(bad, s);
      } catch (const CorruptMessage&) {
        ++rejected;
      }
    }
  };
  for (const auto& s : {schemes::traditional_3x1(), schemes::proposed_3x1(), schemes::scheme_b({3, 1}),
                        schemes::scheme_c({3, 1}), schemes::scheme_d({3, 1})}) {
    const auto& policy = *s.policy;
    const std::size_t levels = quantizer_size(policy.psi_quantizer());
    for (std::size_t a = 0; a < levels; ++a)
      for (std::size_t b = 0; b < levels; ++b) {
        const std::vector<std::size_t> psi{a, b};
        const auto w = policy.phi_bits(psi);
        for (std::size_t x = 0; x < (std::size_t{1} << w[0]); ++x)
          for (std::size_t y = 0; y < (std::size_t{1} << w[1]); ++y) {
            const auto q = make_quantized(policy, psi, {x, y});
            const auto m = encode_message(q, s);
            const auto back = decode_message(FeedbackMessage::from_hex(s.dims, s.id, m.hex(), m.bit_length), s);
            ok = ok && back == q && static_cast<int>(m.bit_length) == message_length(q, s);
            probe_corruption(m, s);
            ++exhaustive;
          }
      }
  }
  const GrDims d32{3, 2};
  const std::vector<FeedbackScheme> s32{schemes::scheme_b(d32), schemes::scheme_c(d32), schemes::scheme_d(d32),
                                        schemes::scheme_e()};
  Rng rng = make_rng(6, 0);
  for (std::size_t t = 0; t < 100000; ++t) {
    const auto& s = s32[t % s32.size()];
    const auto& policy = *s.policy;
    std::uniform_int_distribution<std::size_t> psi_draw(0, quantizer_size(policy.psi_quantizer()) - 1);
    const std::vector<std::size_t> psi{psi_draw(rng), psi_draw(rng), psi_draw(rng)};
    std::vector<std::size_t> phi;
    for (int w : policy.phi_bits(psi)) phi.push_back(std::uniform_int_distribution<std::size_t>(0, (1u << w) - 1)(rng));
    const auto q = make_quantized(policy, psi, phi);
    const auto m = encode_message(q, s);
    ok = ok && decode_message(m, s) == q;
    probe_corruption(m, s);
    ++randomized;
  }
  ok = ok && rejected == attempts;
  return {ok, std::to_string(exhaustive) + " exhaustive 3x1 and " + std::to_string(randomized) +
                  " random 3x2 round trips, " + std::to_string(rejected) + "/" + std::to_string(attempts) +
                  " corrupted lengths rejected"};
}

Outcome ber_orderings() {
  const auto t0 = Clock::now();
  const auto f5 = from_report(cli::reproduce_fig5({7, 0, 0}), "fig5");
  const auto f6 = from_report(cli::reproduce_fig6({7, 0, 0}), "fig6");
  const double secs = seconds_since(t0);
  return {f5.pass && f6.pass && secs < 600.0, f5.detail + ", " + f6.detail + ", " + num(secs, 3) + " s"};
}

// Parallel receiver with perfect feedback: compare each eigenmode's bit
// errors against Q(|d| / sqrt(k N0)) evaluated on the same channel draw.
Outcome receiver_sanity() {
  bool ok = true;
  std::ostringstream detail;
  // SNR grids keep the expected error count of every mode well above 100.
  const std::map<int, std::vector<double>> grids{{1, {-5.0, 0.0, 3.0}}, {3, {0.0, 4.0, 8.0}}};
  for (const auto& [k, snrs] : grids) {
    LinkConfig c;
    c.n_t = 3;
    c.n_r = 3;
    c.k = k;
    c.modulations.assign(static_cast<std::size_t>(k), Modulation::qpsk);
    c.receiver = Receiver::parallel;
    const auto scheme = schemes::scheme_a({3, k});
    for (double snr : snrs) {
      const double n0 = std::pow(10.0, -snr / 10.0);
      const std::size_t trials = 100000;
      std::vector<double> diff_sum(static_cast<std::size_t>(k), 0.0), diff_sq(static_cast<std::size_t>(k), 0.0),
          err(static_cast<std::size_t>(k), 0.0), oracle(static_cast<std::size_t>(k), 0.0);
      Rng rng = make_rng(8, static_cast<std::uint64_t>(k * 100 + snr));
      for (std::size_t t = 0; t < trials; ++t) {
        const auto in = draw_trial_inputs(c, rng);
        const auto rec = run_trial(in, scheme, c, snr);
        const auto eig = eigen_beamformer(in.h, k);
        for (std::size_t s = 0; s < static_cast<std::size_t>(k); ++s) {
          const double expect = 2.0 * q_func(std::abs(eig.d_bar[s]) / std::sqrt(k * n0));
          const double d = static_cast<double>(rec.bit_errors[s]) - expect;
          diff_sum[s] += d;
          diff_sq[s] += d * d;
          err[s] += static_cast<double>(rec.bit_errors[s]);
          oracle[s] += expect;
        }
      }
      for (std::size_t s = 0; s < static_cast<std::size_t>(k); ++s) {
        const double n = static_cast<double>(trials);
        const double mean = diff_sum[s] / n;
        const double se = std::sqrt(std::max(0.0, diff_sq[s] / n - mean * mean) / n);
        const bool pass = std::abs(mean) <= 3.0 * se;
        ok = ok && pass && oracle[s] >= 100.0;
        detail << " k=" << k << "/mode" << s << "@" << snr << "dB " << num(err[s] / (2 * n), 4) << " vs "
               << num(oracle[s] / (2 * n), 4) << (pass ? "" : "(!)");
      }
    }
  }
  return {ok, "measured vs closed-form BER:" + detail.str()};
}

Outcome distribution_shapes() { return from_report(cli::reproduce_fig4({9, 100000, 0}), "fig4 histograms"); }

std::vector<double> psi_pool_3x1(std::uint64_t seed, std::vector<double>* psi21, std::vector<double>* psi31) {
  const auto samples = sample_gr_params({3, 1}, 100000, seed);
  *psi21 = angle_column(samples, 2);
  *psi31 = angle_column(samples, 3);
  std::vector<double> pooled = *psi21;
  pooled.insert(pooled.end(), psi31->begin(), psi31->end());
  return pooled;
}

Outcome lloyd_monotone() {
  std::vector<double> a, b;
  const std::vector<double> pooled = psi_pool_3x1(10, &a, &b);
  std::size_t runs = 0, steps = 0;
  bool ok = true;
  for (const std::vector<double>* set : {&std::as_const(a), &std::as_const(b), &pooled})
    for (std::size_t k : {2u, 3u, 4u, 8u})
      for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto cb = lloyd_train_psi(*set, k, seed);
        for (std::size_t i = 1; i < cb.history.size(); ++i) {
          ok = ok && cb.history[i] <= cb.history[i - 1];
          ++steps;
        }
        ++runs;
      }
  return {ok, std::to_string(runs) + " trainings, " + std::to_string(steps) + " iterations, no increase"};
}

Outcome lloyd_codebook() {
  std::vector<double> a, b;
  const auto pooled = psi_pool_3x1(10, &a, &b);
  const double target[] = {0.2967, 0.8727};
  const auto cb = lloyd_train_psi(pooled, 2, 1);
  const bool ok = std::abs(cb.levels[0] - target[0]) <= 0.03 && std::abs(cb.levels[1] - target[1]) <= 0.03;
  const auto c21 = lloyd_train_psi(a, 2, 1);
  const auto c31 = lloyd_train_psi(b, 2, 1);
  return {ok, "pooled psi21+psi31 k=2 levels [" + num(cb.levels[0]) + ", " + num(cb.levels[1]) +
                  "] vs [0.2967, 0.8727] +/- 0.03; psi21 alone [" + num(c21.levels[0]) + ", " +
                  num(c21.levels[1]) + "], psi31 alone [" + num(c31.levels[0]) + ", " + num(c31.levels[1]) +
                  "]; distortion at trained " + num(cb.distortion, 5) + " vs target levels " +
                  num(codebook_distortion(std::vector<double>{0.2967, 0.8727}, pooled), 5)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::pair<std::string, std::function<Outcome()>>>> criteria{
      {"1", {"GR roundtrip", gr_roundtrip}},
      {"2", {"quantizer grids", quantizer_grids}},
      {"3", {"MSE/MAD table", table5}},
      {"4", {"psi symbol tables and Huffman codes", tables67}},
      {"5", {"scheme E bit budget", scheme_e_budget}},
      {"6", {"bitstream round trip", bitstream}},
      {"7", {"BER orderings", ber_orderings}},
      {"8", {"receiver sanity", receiver_sanity}},
      {"9", {"distribution shapes", distribution_shapes}},
      {"10a", {"Lloyd distortion monotone", lloyd_monotone}},
      {"10b", {"Lloyd k=2 codebook values", lloyd_codebook}},
  };
  std::vector<std::string> wanted(argv + 1, argv + argc);
  if (wanted.empty())
    for (const auto& c : criteria) wanted.push_back(c.first);

  bool all = true;
  for (const auto& id : wanted) {
    const auto it = std::find_if(criteria.begin(), criteria.end(), [&](const auto& c) { return c.first == id; });
    if (it == criteria.end()) {
      std::cerr << "unknown criterion " << id << '\n';
      return 2;
    }
    Outcome o;
    try {
      o = it->second.second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << " (" << it->second.first << "): " << o.detail
              << std::endl;
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
