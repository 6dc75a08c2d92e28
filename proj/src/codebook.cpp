#include "grfb/codebook.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "grfb/channel.hpp"
#include "grfb/error.hpp"

namespace grfb {

namespace {

constexpr std::size_t kMaxLloydIterations = 200;
constexpr double kLloydRelTol = 1e-8;

// Prefix sums over a sorted sample so every cell statistic is O(1).
struct SortedSamples {
  std::vector<double> x;
  std::vector<double> s1{0.0};
  std::vector<double> s2{0.0};

  explicit SortedSamples(std::span<const double> v) : x(v.begin(), v.end()) {
    std::sort(x.begin(), x.end());
    for (double xi : x) {
      s1.push_back(s1.back() + xi);
      s2.push_back(s2.back() + xi * xi);
    }
  }
  double sum(std::size_t a, std::size_t b) const { return s1[b] - s1[a]; }
  double sq_error(std::size_t a, std::size_t b, double c) const {
    const double n = static_cast<double>(b - a);
    return std::max(0.0, (s2[b] - s2[a]) - 2.0 * c * sum(a, b) + n * c * c);
  }
};

// Cell j spans [cut[j], cut[j+1]); samples on a midpoint go to the lower cell.
std::vector<std::size_t> cell_cuts(const SortedSamples& s, const std::vector<double>& levels) {
  std::vector<std::size_t> cut{0};
  for (std::size_t j = 0; j + 1 < levels.size(); ++j) {
    const double mid = 0.5 * (levels[j] + levels[j + 1]);
    cut.push_back(static_cast<std::size_t>(std::upper_bound(s.x.begin(), s.x.end(), mid) - s.x.begin()));
  }
  cut.push_back(s.x.size());
  return cut;
}

double total_distortion(const SortedSamples& s, const std::vector<double>& levels) {
  const auto cut = cell_cuts(s, levels);
  double d = 0.0;
  for (std::size_t j = 0; j < levels.size(); ++j) d += s.sq_error(cut[j], cut[j + 1], levels[j]);
  return d / static_cast<double>(s.x.size());
}

std::vector<double> kmeanspp_init(const SortedSamples& s, std::size_t k, Rng& rng) {
  std::vector<double> centers;
  std::uniform_int_distribution<std::size_t> pick(0, s.x.size() - 1);
  centers.push_back(s.x[pick(rng)]);
  std::vector<double> d2(s.x.size());
  while (centers.size() < k) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      double best = INFINITY;
      for (double c : centers) best = std::min(best, (s.x[i] - c) * (s.x[i] - c));
      d2[i] = best;
    }
    std::discrete_distribution<std::size_t> draw(d2.begin(), d2.end());
    centers.push_back(s.x[draw(rng)]);
  }
  std::sort(centers.begin(), centers.end());
  return centers;
}

}  // namespace

AngleHistogram make_histogram(std::string parameter, std::span<const double> values, double lo,
                              double hi, std::size_t bins) {
  if (bins == 0 || !(hi > lo)) throw ValidationError("histogram needs bins > 0 and hi > lo");
  AngleHistogram h{std::move(parameter), std::vector<double>(bins + 1), std::vector<std::size_t>(bins, 0),
                   values.size()};
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t b = 0; b <= bins; ++b) h.edges[b] = lo + width * static_cast<double>(b);
  for (double v : values) {
    const double pos = std::floor((v - lo) / width);
    const auto b = static_cast<std::size_t>(std::clamp(pos, 0.0, static_cast<double>(bins - 1)));
    ++h.counts[b];
  }
  return h;
}

std::vector<GivensParams> sample_gr_params(const GrDims& dims, std::size_t n, std::uint64_t seed) {
  dims.validate();
  if (n < 1) throw ValidationError("need at least one sample");
  std::vector<GivensParams> out;
  out.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    Rng rng = make_rng(seed, j);
    out.push_back(sample_gr_param(dims, rng));
  }
  return out;
}

std::vector<double> angle_column(const std::vector<GivensParams>& samples, std::size_t slot) {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& p : samples) out.push_back(p.flat().at(slot));
  return out;
}

double codebook_distortion(std::span<const double> levels, std::span<const double> samples) {
  if (levels.empty() || samples.empty()) throw ValidationError("empty codebook or sample set");
  double d = 0.0;
  for (double x : samples) {
    double best = INFINITY;
    for (double l : levels) best = std::min(best, (x - l) * (x - l));
    d += best;
  }
  return d / static_cast<double>(samples.size());
}

TrainedCodebook lloyd_train_psi(std::span<const double> samples, std::size_t k, std::uint64_t seed) {
  if (k < 1) throw ValidationError("codebook needs at least one level");
  if (samples.empty()) throw ValidationError("no training samples");
  const SortedSamples s(samples);
  std::size_t n_distinct = 1;
  for (std::size_t i = 1; i < s.x.size(); ++i)
    if (s.x[i] != s.x[i - 1]) ++n_distinct;
  if (k > n_distinct)
    throw ValidationError("requested " + std::to_string(k) + " levels but the sample has only " +
                          std::to_string(n_distinct) + " distinct values");

  Rng rng = make_rng(seed, 0x6c6c6f7964ULL);
  std::vector<double> levels = kmeanspp_init(s, k, rng);
  TrainedCodebook out;
  double prev = total_distortion(s, levels);
  out.history.push_back(prev);

  for (std::size_t it = 0; it < kMaxLloydIterations; ++it) {
    const auto cut = cell_cuts(s, levels);
    std::vector<double> next(levels.size());
    std::vector<std::size_t> empty;
    for (std::size_t j = 0; j < levels.size(); ++j) {
      const std::size_t a = cut[j], b = cut[j + 1];
      if (a == b) {
        empty.push_back(j);
        next[j] = levels[j];
      } else {
        next[j] = s.sum(a, b) / static_cast<double>(b - a);
      }
    }
    for (std::size_t e : empty) {
      // Split the worst cell at its centroid; the empty level takes the upper half.
      const auto c2 = cell_cuts(s, next);
      std::size_t worst = 0;
      double worst_d = -1.0;
      for (std::size_t j = 0; j < next.size(); ++j) {
        if (j == e || c2[j + 1] - c2[j] < 2 || s.x[c2[j]] == s.x[c2[j + 1] - 1]) continue;
        const double d = s.sq_error(c2[j], c2[j + 1], next[j]);
        if (d > worst_d) {
          worst_d = d;
          worst = j;
        }
      }
      if (worst_d < 0.0) break;
      const std::size_t a = c2[worst], b = c2[worst + 1];
      const auto split = static_cast<std::size_t>(
          std::upper_bound(s.x.begin() + static_cast<long>(a), s.x.begin() + static_cast<long>(b), next[worst]) -
          s.x.begin());
      const std::size_t mid = std::clamp(split, a + 1, b - 1);
      next[worst] = s.sum(a, mid) / static_cast<double>(mid - a);
      next[e] = s.sum(mid, b) / static_cast<double>(b - mid);
      std::sort(next.begin(), next.end());
    }
    levels = std::move(next);
    const double d = total_distortion(s, levels);
    out.history.push_back(d);
    out.iterations = it + 1;
    const bool converged = prev <= 0.0 || (prev - d) <= kLloydRelTol * prev;
    prev = d;
    if (converged) break;
  }

  out.levels = levels;
  out.distortion = total_distortion(s, levels);
  const auto cut = cell_cuts(s, levels);
  for (std::size_t j = 0; j < levels.size(); ++j)
    out.probabilities.push_back(static_cast<double>(cut[j + 1] - cut[j]) / static_cast<double>(s.x.size()));
  return out;
}

std::vector<std::vector<double>> estimate_psi_symbol_probs(const GrDims& dims,
                                                           const PsiQuantizer& quantizer,
                                                           std::size_t n, std::uint64_t seed) {
  if (n < 10000) throw ValidationError("symbol probability estimates need n >= 10^4");
  const auto samples = sample_gr_params(dims, n, seed);
  std::vector<std::vector<double>> probs(dims.psi_count(),
                                         std::vector<double>(quantizer_size(quantizer), 0.0));
  for (const auto& p : samples) {
    const auto psis = p.psis();
    for (std::size_t j = 0; j < psis.size(); ++j) probs[j][nearest_level(quantizer, psis[j])] += 1.0;
  }
  for (auto& row : probs)
    for (double& v : row) v /= static_cast<double>(n);
  return probs;
}

double ks_uniform(std::span<const double> samples, double lo, double hi) {
  if (samples.empty() || !(hi > lo)) throw ValidationError("KS test needs samples and hi > lo");
  std::vector<double> x(samples.begin(), samples.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = std::clamp((x[i] - lo) / (hi - lo), 0.0, 1.0);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

}  // namespace grfb
