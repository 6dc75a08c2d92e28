#include "grfb/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "grfb/error.hpp"

namespace grfb {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTieTol = 1e-12;

template <typename DistanceFn>
std::size_t argmin_level(std::span<const double> levels, DistanceFn dist) {
  std::size_t best = 0;
  double best_d = dist(levels[0]);
  for (std::size_t i = 1; i < levels.size(); ++i) {
    const double d = dist(levels[i]);
    if (d < best_d - kTieTol) {
      best = i;
      best_d = d;
    }
  }
  return best;
}

void check_tuple_ranges(const PsiQuantizer& q, std::span<const std::size_t> idx) {
  const std::size_t n = quantizer_size(q);
  for (std::size_t v : idx)
    if (v >= n)
      throw ValidationError("psi index " + std::to_string(v) + " out of range for " +
                            std::to_string(n) + " levels");
}

// All index tuples of the given length over [0, radix).
std::vector<std::vector<std::size_t>> all_tuples(std::size_t length, std::size_t radix) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> t(length, 0);
  while (true) {
    out.push_back(t);
    std::size_t pos = length;
    while (pos > 0) {
      --pos;
      if (++t[pos] < radix) break;
      t[pos] = 0;
      if (pos == 0) return out;
    }
    if (length == 0) return out;
  }
}

}  // namespace

UniformGrid UniformGrid::psi(int bits) {
  if (bits < 1 || bits > 4) throw ConfigError("psi grid bits must be in 1..4");
  return {GridKind::psi, bits};
}

UniformGrid UniformGrid::phi(int bits) {
  if (bits < 2 || bits > 6) throw ConfigError("phi grid bits must be in 2..6");
  return {GridKind::phi, bits};
}

double UniformGrid::step() const {
  return kind == GridKind::psi ? kPi / std::ldexp(1.0, bits + 1) : kPi / std::ldexp(1.0, bits - 1);
}

double UniformGrid::level(std::size_t index) const {
  const double k = static_cast<double>(index);
  if (kind == GridKind::psi) return k * kPi / std::ldexp(1.0, bits + 1) + kPi / std::ldexp(1.0, bits + 2);
  return k * kPi / std::ldexp(1.0, bits - 1) + kPi / std::ldexp(1.0, bits);
}

std::vector<double> UniformGrid::levels() const {
  std::vector<double> out(size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = level(i);
  return out;
}

PsiCodebook::PsiCodebook(std::vector<double> lv) : levels(std::move(lv)) {
  if (levels.empty()) throw ValidationError("psi codebook needs at least one level");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (!(levels[i] >= 0.0 && levels[i] <= 0.5 * kPi))
      throw ValidationError("psi codebook level outside [0, pi/2]");
    if (i > 0 && !(levels[i] > levels[i - 1]))
      throw ValidationError("psi codebook levels must be strictly ascending");
  }
}

std::size_t quantizer_size(const PsiQuantizer& q) {
  return std::visit([](const auto& x) { return x.size(); }, q);
}

double quantizer_level(const PsiQuantizer& q, std::size_t index) {
  if (const auto* g = std::get_if<UniformGrid>(&q)) return g->level(index);
  return std::get<PsiCodebook>(q).levels.at(index);
}

std::vector<double> quantizer_levels(const PsiQuantizer& q) {
  if (const auto* g = std::get_if<UniformGrid>(&q)) return g->levels();
  return std::get<PsiCodebook>(q).levels;
}

int index_bits(std::size_t size) {
  int b = 1;
  while ((std::size_t{1} << b) < size) ++b;
  return b;
}

std::size_t nearest_level(const UniformGrid& grid, double angle) {
  const auto lv = grid.levels();
  if (grid.kind == GridKind::phi) {
    return argmin_level(lv, [angle](double level) {
      const double d = std::abs(angle - level);
      return std::min(d, 2.0 * kPi - d);
    });
  }
  return argmin_level(lv, [angle](double level) { return std::abs(angle - level); });
}

std::size_t nearest_level(const PsiCodebook& codebook, double angle) {
  return argmin_level(codebook.levels, [angle](double level) { return std::abs(angle - level); });
}

std::size_t nearest_level(const PsiQuantizer& q, double angle) {
  return std::visit([angle](const auto& x) { return nearest_level(x, angle); }, q);
}

BitAllocationPolicy BitAllocationPolicy::fixed(const GrDims& dims, PsiQuantizer psi, int phi_bits) {
  dims.validate();
  UniformGrid::phi(phi_bits);
  auto s = std::make_shared<State>();
  s->dims = dims;
  s->psi = std::move(psi);
  s->fixed_phi_bits.assign(dims.phi_count(), phi_bits);
  return BitAllocationPolicy(std::move(s));
}

BitAllocationPolicy BitAllocationPolicy::dynamic(const GrDims& dims, PsiQuantizer psi, Rule rule) {
  dims.validate();
  const std::size_t levels = quantizer_size(psi);
  for (const auto& t : all_tuples(dims.psi_count(), levels)) {
    const auto it = rule.find(t);
    if (it == rule.end()) throw ConfigError("dynamic bit rule misses a psi index tuple");
    if (it->second.size() != dims.phi_count())
      throw ConfigError("dynamic bit rule entry has the wrong number of phi widths");
    for (int b : it->second) UniformGrid::phi(b);
  }
  if (rule.size() != all_tuples(dims.psi_count(), levels).size())
    throw ConfigError("dynamic bit rule has entries for psi tuples that cannot occur");
  auto s = std::make_shared<State>();
  s->dims = dims;
  s->psi = std::move(psi);
  s->dynamic = true;
  s->rule = std::move(rule);
  return BitAllocationPolicy(std::move(s));
}

std::vector<int> BitAllocationPolicy::phi_bits(std::span<const std::size_t> psi_indices) const {
  if (psi_indices.size() != state_->dims.psi_count())
    throw ValidationError("psi tuple length does not match " + state_->dims.label());
  check_tuple_ranges(state_->psi, psi_indices);
  if (!state_->dynamic) return state_->fixed_phi_bits;
  return state_->rule.at(PsiTuple(psi_indices.begin(), psi_indices.end()));
}

int BitAllocationPolicy::message_bits(std::span<const std::size_t> psi_indices) const {
  const auto bits = phi_bits(psi_indices);
  return static_cast<int>(psi_indices.size()) * psi_field_bits() +
         std::accumulate(bits.begin(), bits.end(), 0);
}

QuantizedParams quantize_gr(const GivensParams& p, const BitAllocationPolicy& policy) {
  if (!(p.dims == policy.dims()))
    throw ConfigError("parameters are " + p.dims.label() + " but the policy is for " +
                      policy.dims().label());
  std::vector<std::size_t> psi_idx;
  for (double psi : p.psis()) psi_idx.push_back(nearest_level(policy.psi_quantizer(), psi));
  auto bits = policy.phi_bits(psi_idx);
  const auto phis = p.phis();
  std::vector<std::size_t> phi_idx(phis.size());
  for (std::size_t j = 0; j < phis.size(); ++j)
    phi_idx[j] = nearest_level(UniformGrid::phi(bits[j]), phis[j]);
  const int total = policy.message_bits(psi_idx);
  return {p.dims, std::move(psi_idx), std::move(phi_idx), std::move(bits), policy, total};
}

QuantizedParams make_quantized(const BitAllocationPolicy& policy,
                               std::vector<std::size_t> psi_indices,
                               std::vector<std::size_t> phi_indices) {
  auto bits = policy.phi_bits(psi_indices);
  if (phi_indices.size() != bits.size())
    throw ValidationError("phi index count does not match " + policy.dims().label());
  for (std::size_t j = 0; j < bits.size(); ++j)
    if (phi_indices[j] >= (std::size_t{1} << bits[j]))
      throw ValidationError("phi index " + std::to_string(phi_indices[j]) + " exceeds " +
                            std::to_string(bits[j]) + "-bit field");
  const int total = policy.message_bits(psi_indices);
  return {policy.dims(), std::move(psi_indices), std::move(phi_indices), std::move(bits), policy,
          total};
}

GivensParams dequantize_gr(const QuantizedParams& q) {
  std::vector<double> psis(q.psi_indices.size());
  for (std::size_t j = 0; j < psis.size(); ++j)
    psis[j] = quantizer_level(q.policy.psi_quantizer(), q.psi_indices[j]);
  std::vector<double> phis(q.phi_indices.size());
  for (std::size_t j = 0; j < phis.size(); ++j)
    phis[j] = UniformGrid::phi(q.phi_bits[j]).level(q.phi_indices[j]);
  return GivensParams::from_split(q.dims, phis, psis);
}

PsiIndexDistribution product_distribution(const std::vector<std::vector<double>>& marginals) {
  PsiIndexDistribution out{{{}, 1.0}};
  for (const auto& m : marginals) {
    PsiIndexDistribution next;
    for (const auto& [tuple, p] : out)
      for (std::size_t i = 0; i < m.size(); ++i) {
        auto t = tuple;
        t.push_back(i);
        next.emplace_back(std::move(t), p * m[i]);
      }
    out = std::move(next);
  }
  return out;
}

double average_bits(const BitAllocationPolicy& policy, const PsiIndexDistribution& dist) {
  double total = 0.0;
  double mass = 0.0;
  for (const auto& [tuple, p] : dist) {
    if (p < 0.0) throw ValidationError("negative probability in psi index distribution");
    mass += p;
    total += p * policy.message_bits(tuple);
  }
  if (std::abs(mass - 1.0) > 1e-9)
    throw ValidationError("psi index distribution sums to " + std::to_string(mass));
  return total;
}

PsiCodebook trained_psi_codebook() { return PsiCodebook({0.2967, 0.8727}); }

BitAllocationPolicy variable_rate_policy() {
  // Keys are (psi21, psi31) indices; values are (phi11, phi21) widths.
  BitAllocationPolicy::Rule rule{
      {{0, 0}, {4, 3}},
      {{1, 0}, {3, 4}},
      {{0, 1}, {3, 2}},
      {{1, 1}, {2, 3}},
  };
  return BitAllocationPolicy::dynamic({3, 1}, trained_psi_codebook(), std::move(rule));
}

}  // namespace grfb
