#include "grfb/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

#include "grfb/error.hpp"

namespace grfb {

namespace {

constexpr int kMaxCodeLength = 31;

std::vector<std::uint32_t> canonical_codes(const std::vector<int>& lengths) {
  std::vector<std::size_t> order(lengths.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return lengths[a] < lengths[b]; });
  std::vector<std::uint32_t> codes(lengths.size());
  std::uint64_t code = 0;
  int prev = lengths[order[0]];
  for (std::size_t n = 0; n < order.size(); ++n) {
    const std::size_t s = order[n];
    if (n > 0) {
      ++code;
      code <<= (lengths[s] - prev);
    }
    prev = lengths[s];
    codes[s] = static_cast<std::uint32_t>(code);
  }
  return codes;
}

void check_probabilities(std::span<const double> probs) {
  double sum = 0.0;
  for (double p : probs) {
    if (!(p > 0.0) || !std::isfinite(p))
      throw ValidationError("symbol probabilities must be finite and > 0");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw ValidationError("symbol probabilities sum to " + std::to_string(sum) + ", not 1");
}

struct GroupRange {
  std::size_t phi_begin, psi_begin, count;
};

std::vector<GroupRange> group_ranges(const GrDims& dims) {
  std::vector<GroupRange> out;
  std::size_t off = 0;
  for (int c = 0; c < dims.column_groups(); ++c) {
    const auto n = static_cast<std::size_t>(dims.n_t - 1 - c);
    out.push_back({off, off, n});
    off += n;
  }
  return out;
}

std::uint32_t read_symbol(BitReader& r, const SymbolTable& t) {
  std::uint32_t code = 0;
  const int max_len = *std::max_element(t.lengths().begin(), t.lengths().end());
  for (int len = 1; len <= max_len; ++len) {
    code = (code << 1) | r.read(1);
    for (std::size_t s = 0; s < t.size(); ++s)
      if (t.lengths()[s] == len && t.code(s) == code) return static_cast<std::uint32_t>(s);
  }
  throw CorruptMessage("invalid Huffman prefix");
}

void require_quantized_scheme(const FeedbackScheme& s) {
  if (s.perfect()) throw ConfigError("scheme '" + s.id + "' sends unquantized feedback; nothing to encode");
}

int psi_field_length(const FeedbackScheme& s, std::size_t slot, std::size_t index) {
  if (const SymbolTable* t = s.psi_code(slot)) return t->lengths().at(index);
  return s.policy->psi_field_bits();
}

// For dynamic schemes the decoder only knows the psis of the groups read so
// far; later psis are looked up as zero.
std::vector<int> phi_widths_known_prefix(const FeedbackScheme& s,
                                         const std::vector<std::size_t>& psi_prefix) {
  std::vector<std::size_t> t = psi_prefix;
  t.resize(s.dims.psi_count(), 0);
  return s.policy->phi_bits(t);
}

void check_scheme(const FeedbackScheme& s) {
  s.dims.validate();
  if (s.perfect()) return;
  if (!(s.policy->dims() == s.dims)) throw ConfigError("scheme dims do not match its policy");
  if (!s.psi_codes.empty() && s.psi_codes.size() != s.dims.psi_count())
    throw ConfigError("scheme needs one psi code entry per psi");
  for (const auto& c : s.psi_codes)
    if (c && c->size() != quantizer_size(s.policy->psi_quantizer()))
      throw ConfigError("psi code size does not match the psi quantizer");
  if (!s.psi_first()) return;
  // Each group's phi widths may only depend on psis already on the wire.
  const auto groups = group_ranges(s.dims);
  for (const auto& [tuple, widths] : s.policy->rule()) {
    for (const auto& g : groups) {
      std::vector<std::size_t> prefix(tuple.begin(), tuple.begin() + static_cast<long>(g.psi_begin + g.count));
      const auto w = phi_widths_known_prefix(s, prefix);
      if (!std::equal(w.begin() + static_cast<long>(g.phi_begin),
                      w.begin() + static_cast<long>(g.phi_begin + g.count),
                      widths.begin() + static_cast<long>(g.phi_begin)))
        throw ConfigError("dynamic rule of scheme '" + s.id +
                          "' makes phi widths depend on psis sent later");
    }
  }
}

void check_indices(const QuantizedParams& q, const FeedbackScheme& s) {
  if (!(q.dims == s.dims))
    throw ValidationError("parameters are " + q.dims.label() + " but scheme '" + s.id + "' is " +
                          s.dims.label());
  const std::size_t levels = quantizer_size(s.policy->psi_quantizer());
  if (q.psi_indices.size() != s.dims.psi_count() || q.phi_indices.size() != s.dims.phi_count())
    throw ValidationError("index counts do not match " + s.dims.label());
  for (std::size_t v : q.psi_indices)
    if (v >= levels) throw ValidationError("psi index " + std::to_string(v) + " exceeds field range");
  const auto widths = s.policy->phi_bits(q.psi_indices);
  for (std::size_t j = 0; j < widths.size(); ++j)
    if (q.phi_indices[j] >= (std::size_t{1} << widths[j]))
      throw ValidationError("phi index " + std::to_string(q.phi_indices[j]) + " exceeds its " +
                            std::to_string(widths[j]) + "-bit field");
}

}  // namespace

void validate_scheme(const FeedbackScheme& scheme) { check_scheme(scheme); }

std::string SymbolTable::codeword(std::size_t symbol) const {
  std::string out;
  const int len = lengths_.at(symbol);
  for (int b = len - 1; b >= 0; --b) out.push_back(((codes_[symbol] >> b) & 1U) ? '1' : '0');
  return out;
}

double SymbolTable::average_length() const {
  double s = 0.0;
  for (std::size_t i = 0; i < probs_.size(); ++i) s += probs_[i] * lengths_[i];
  return s;
}

double SymbolTable::entropy() const {
  double h = 0.0;
  for (double p : probs_)
    if (p > 0.0) h -= p * std::log2(p);
  return h;
}

double SymbolTable::kraft_sum() const {
  double s = 0.0;
  for (int l : lengths_) s += std::ldexp(1.0, -l);
  return s;
}

SymbolTable SymbolTable::from_lengths(std::vector<double> probs, std::vector<int> lengths) {
  if (lengths.empty() || probs.size() != lengths.size())
    throw ValidationError("need one code length per symbol");
  double kraft = 0.0;
  for (int l : lengths) {
    if (l < 1 || l > kMaxCodeLength) throw ValidationError("code length out of range");
    kraft += std::ldexp(1.0, -l);
  }
  if (kraft > 1.0 + 1e-12) throw ValidationError("code lengths violate the Kraft inequality");
  SymbolTable t;
  t.probs_ = std::move(probs);
  t.lengths_ = std::move(lengths);
  t.codes_ = canonical_codes(t.lengths_);
  return t;
}

SymbolTable build_huffman(std::span<const double> probs) {
  if (probs.size() < 2) throw ValidationError("Huffman coding needs at least two symbols");
  check_probabilities(probs);

  struct Node {
    double p;
    std::size_t id;  // creation order; leaves first, so ties resolve by symbol
    int left = -1, right = -1;
  };
  std::vector<Node> nodes;
  for (std::size_t i = 0; i < probs.size(); ++i) nodes.push_back({probs[i], i});
  auto cmp = [&](std::size_t a, std::size_t b) {
    if (nodes[a].p != nodes[b].p) return nodes[a].p > nodes[b].p;
    return nodes[a].id > nodes[b].id;
  };
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(cmp)> heap(cmp);
  for (std::size_t i = 0; i < nodes.size(); ++i) heap.push(i);
  while (heap.size() > 1) {
    const std::size_t a = heap.top();
    heap.pop();
    const std::size_t b = heap.top();
    heap.pop();
    nodes.push_back({nodes[a].p + nodes[b].p, nodes.size(), static_cast<int>(a), static_cast<int>(b)});
    heap.push(nodes.size() - 1);
  }

  std::vector<int> lengths(probs.size(), 0);
  std::vector<std::pair<std::size_t, int>> stack{{heap.top(), 0}};
  while (!stack.empty()) {
    auto [n, depth] = stack.back();
    stack.pop_back();
    if (nodes[n].left < 0) {
      lengths[n] = depth;
      continue;
    }
    stack.emplace_back(static_cast<std::size_t>(nodes[n].left), depth + 1);
    stack.emplace_back(static_cast<std::size_t>(nodes[n].right), depth + 1);
  }
  if (*std::max_element(lengths.begin(), lengths.end()) > kMaxCodeLength)
    throw ValidationError("Huffman code too deep");
  return SymbolTable::from_lengths(std::vector<double>(probs.begin(), probs.end()), std::move(lengths));
}

void BitWriter::write(std::uint32_t value, int width) {
  if (width < 0 || width > 32) throw ValidationError("bit field width out of range");
  if (width < 32 && (static_cast<std::uint64_t>(value) >> width) != 0)
    throw ValidationError("value " + std::to_string(value) + " does not fit in " +
                          std::to_string(width) + " bits");
  for (int b = width - 1; b >= 0; --b) {
    if (bits_ % 8 == 0) bytes_.push_back(0);
    if ((value >> b) & 1U) bytes_.back() |= static_cast<std::uint8_t>(0x80U >> (bits_ % 8));
    ++bits_;
  }
}

BitReader::BitReader(std::span<const std::uint8_t> bytes, std::size_t bit_length)
    : bytes_(bytes), length_(bit_length) {
  if (bit_length > bytes.size() * 8) throw CorruptMessage("bit length exceeds payload size");
}

std::uint32_t BitReader::read(int width) {
  if (width < 0 || width > 32) throw ValidationError("bit field width out of range");
  if (static_cast<std::size_t>(width) > remaining())
    throw CorruptMessage("truncated payload: needed " + std::to_string(width) + " bits at offset " +
                         std::to_string(pos_) + ", " + std::to_string(remaining()) + " left");
  std::uint32_t v = 0;
  for (int i = 0; i < width; ++i, ++pos_)
    v = (v << 1) | ((bytes_[pos_ / 8] >> (7 - pos_ % 8)) & 1U);
  return v;
}

const SymbolTable* FeedbackScheme::psi_code(std::size_t psi_slot) const {
  if (psi_slot >= psi_codes.size() || !psi_codes[psi_slot]) return nullptr;
  return &*psi_codes[psi_slot];
}

std::string FeedbackMessage::hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  const std::size_t nibbles = (bit_length + 3) / 4;
  for (std::size_t n = 0; n < nibbles; ++n) {
    const std::uint8_t byte = payload[n / 2];
    out.push_back(kDigits[n % 2 == 0 ? byte >> 4 : byte & 0xF]);
  }
  return out;
}

std::string FeedbackMessage::bit_string() const {
  std::string out;
  for (std::size_t i = 0; i < bit_length; ++i)
    out.push_back(((payload[i / 8] >> (7 - i % 8)) & 1U) ? '1' : '0');
  return out;
}

FeedbackMessage FeedbackMessage::from_hex(const GrDims& dims, std::string scheme_id,
                                          const std::string& hex, std::size_t bit_length) {
  if (hex.size() != (bit_length + 3) / 4)
    throw CorruptMessage("hex payload has " + std::to_string(hex.size()) + " digits but " +
                         std::to_string(bit_length) + " bits were declared");
  FeedbackMessage m{dims, std::move(scheme_id), std::vector<std::uint8_t>((hex.size() + 1) / 2, 0),
                    bit_length};
  for (std::size_t n = 0; n < hex.size(); ++n) {
    const char ch = hex[n];
    unsigned v;
    if (ch >= '0' && ch <= '9') v = static_cast<unsigned>(ch - '0');
    else if (ch >= 'a' && ch <= 'f') v = static_cast<unsigned>(ch - 'a' + 10);
    else if (ch >= 'A' && ch <= 'F') v = static_cast<unsigned>(ch - 'A' + 10);
    else throw CorruptMessage(std::string("invalid hex digit '") + ch + "'");
    m.payload[n / 2] |= static_cast<std::uint8_t>(n % 2 == 0 ? v << 4 : v);
  }
  for (std::size_t i = bit_length; i < hex.size() * 4; ++i)
    if ((m.payload[i / 8] >> (7 - i % 8)) & 1U) throw CorruptMessage("nonzero padding bits");
  return m;
}

FeedbackMessage encode_message(const QuantizedParams& q, const FeedbackScheme& scheme) {
  require_quantized_scheme(scheme);
  check_scheme(scheme);
  check_indices(q, scheme);
  const auto widths = scheme.policy->phi_bits(q.psi_indices);
  const int psi_bits = scheme.policy->psi_field_bits();
  BitWriter w;
  auto put_psis = [&](const GroupRange& g) {
    for (std::size_t j = g.psi_begin; j < g.psi_begin + g.count; ++j) {
      if (const SymbolTable* t = scheme.psi_code(j))
        w.write(t->code(q.psi_indices[j]), t->lengths()[q.psi_indices[j]]);
      else
        w.write(static_cast<std::uint32_t>(q.psi_indices[j]), psi_bits);
    }
  };
  auto put_phis = [&](const GroupRange& g) {
    for (std::size_t j = g.phi_begin; j < g.phi_begin + g.count; ++j)
      w.write(static_cast<std::uint32_t>(q.phi_indices[j]), widths[j]);
  };
  for (const auto& g : group_ranges(scheme.dims)) {
    if (scheme.psi_first()) {
      put_psis(g);
      put_phis(g);
    } else {
      put_phis(g);
      put_psis(g);
    }
  }
  const std::size_t bits = w.size();
  return {scheme.dims, scheme.id, w.take(), bits};
}

QuantizedParams decode_fields(BitReader& r, const FeedbackScheme& scheme) {
  require_quantized_scheme(scheme);
  check_scheme(scheme);
  const auto& policy = *scheme.policy;
  const int psi_bits = policy.psi_field_bits();
  const std::size_t levels = quantizer_size(policy.psi_quantizer());
  std::vector<std::size_t> psi(scheme.dims.psi_count());
  std::vector<std::size_t> phi(scheme.dims.phi_count());
  std::vector<std::size_t> psi_known;

  auto get_psis = [&](const GroupRange& g) {
    for (std::size_t j = g.psi_begin; j < g.psi_begin + g.count; ++j) {
      if (const SymbolTable* t = scheme.psi_code(j)) {
        psi[j] = read_symbol(r, *t);
      } else {
        psi[j] = r.read(psi_bits);
        if (psi[j] >= levels) throw CorruptMessage("psi field value exceeds the quantizer size");
      }
      psi_known.push_back(psi[j]);
    }
  };
  const auto groups = group_ranges(scheme.dims);
  if (scheme.psi_first()) {
    for (const auto& g : groups) {
      get_psis(g);
      const auto widths = phi_widths_known_prefix(scheme, psi_known);
      for (std::size_t j = g.phi_begin; j < g.phi_begin + g.count; ++j) phi[j] = r.read(widths[j]);
    }
  } else {
    const auto widths = policy.phi_bits(std::vector<std::size_t>(psi.size(), 0));
    for (const auto& g : groups) {
      for (std::size_t j = g.phi_begin; j < g.phi_begin + g.count; ++j) phi[j] = r.read(widths[j]);
      get_psis(g);
    }
  }
  return make_quantized(policy, std::move(psi), std::move(phi));
}

QuantizedParams decode_message(const FeedbackMessage& m, const FeedbackScheme& scheme) {
  if (!(m.dims == scheme.dims)) throw ValidationError("message dims do not match the scheme");
  if (m.bit_length == 0) throw CorruptMessage("empty payload");
  BitReader r(m.payload, m.bit_length);
  QuantizedParams q = decode_fields(r, scheme);
  if (r.remaining() != 0)
    throw CorruptMessage(std::to_string(r.remaining()) + " trailing bits after the last field");
  return q;
}

int message_length(const QuantizedParams& q, const FeedbackScheme& scheme) {
  require_quantized_scheme(scheme);
  check_indices(q, scheme);
  int bits = 0;
  for (std::size_t j = 0; j < q.psi_indices.size(); ++j) bits += psi_field_length(scheme, j, q.psi_indices[j]);
  for (int w : scheme.policy->phi_bits(q.psi_indices)) bits += w;
  return bits;
}

double expected_message_bits(const FeedbackScheme& scheme, const PsiIndexDistribution& dist) {
  require_quantized_scheme(scheme);
  double mass = 0.0, total = 0.0;
  for (const auto& [tuple, p] : dist) {
    if (p < 0.0) throw ValidationError("negative probability in psi index distribution");
    mass += p;
    int bits = 0;
    for (std::size_t j = 0; j < tuple.size(); ++j) bits += psi_field_length(scheme, j, tuple[j]);
    for (int w : scheme.policy->phi_bits(tuple)) bits += w;
    total += p * bits;
  }
  if (std::abs(mass - 1.0) > 1e-9)
    throw ValidationError("psi index distribution sums to " + std::to_string(mass));
  return total;
}

PhiWidths scheme_e_phi_bits(std::size_t psi21_index, std::size_t psi31_index) {
  const bool psi21_mid = psi21_index == 1 || psi21_index == 2;
  const bool psi31_low = psi31_index == 0 || psi31_index == 1;
  const int w = (psi21_mid && psi31_low) ? 3 : 2;
  return {w, w, 2};
}

std::vector<double> psi21_probabilities() { return {0.14714, 0.35496, 0.35146, 0.14644}; }

std::vector<double> psi31_probabilities() { return {0.2722, 0.47748, 0.2299, 0.02042}; }

namespace schemes {

FeedbackScheme fixed(const GrDims& dims, int psi_bits, int phi_bits, std::string id) {
  if (id.empty()) id = "fixed:" + std::to_string(psi_bits) + ":" + std::to_string(phi_bits);
  FeedbackScheme s{std::move(id), dims,
                   BitAllocationPolicy::fixed(dims, UniformGrid::psi(psi_bits), phi_bits), {}};
  check_scheme(s);
  return s;
}

FeedbackScheme perfect(const GrDims& dims) {
  dims.validate();
  return {"A", dims, std::nullopt, {}};
}

FeedbackScheme traditional_3x1() { return fixed({3, 1}, 1, 3, "traditional"); }

FeedbackScheme proposed_3x1() {
  FeedbackScheme s{"proposed", {3, 1}, variable_rate_policy(), {}};
  check_scheme(s);
  return s;
}

FeedbackScheme scheme_a(const GrDims& dims) { return perfect(dims); }
FeedbackScheme scheme_b(const GrDims& dims) { return fixed(dims, 1, 3, "B"); }
FeedbackScheme scheme_c(const GrDims& dims) { return fixed(dims, 2, 2, "C"); }
FeedbackScheme scheme_d(const GrDims& dims) { return fixed(dims, 2, 3, "D"); }

FeedbackScheme scheme_e() {
  const GrDims dims{3, 2};
  BitAllocationPolicy::Rule rule;
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = 0; b < 4; ++b)
      for (std::size_t c = 0; c < 4; ++c) {
        const PhiWidths w = scheme_e_phi_bits(a, b);
        rule[{a, b, c}] = {w.phi11, w.phi21, w.phi22};
      }
  const SymbolTable t6 = build_huffman(psi21_probabilities());
  const SymbolTable t7 = build_huffman(psi31_probabilities());
  FeedbackScheme s{"E", dims, BitAllocationPolicy::dynamic(dims, UniformGrid::psi(2), std::move(rule)),
                   {t6, t7, t6}};
  check_scheme(s);
  return s;
}

FeedbackScheme by_name(const std::string& name, const GrDims& dims) {
  dims.validate();
  if (name == "A") return scheme_a(dims);
  if (name == "B") return scheme_b(dims);
  if (name == "C") return scheme_c(dims);
  if (name == "D") return scheme_d(dims);
  auto need = [&](const GrDims& want) {
    if (!(dims == want))
      throw ConfigError("scheme '" + name + "' is defined for " + want.label() + " only");
  };
  if (name == "E") {
    need({3, 2});
    return scheme_e();
  }
  if (name == "traditional") {
    need({3, 1});
    return traditional_3x1();
  }
  if (name == "proposed") {
    need({3, 1});
    return proposed_3x1();
  }
  if (name.rfind("fixed:", 0) == 0) {
    const auto colon = name.find(':', 6);
    try {
      if (colon == std::string::npos) throw std::invalid_argument("format");
      return fixed(dims, std::stoi(name.substr(6, colon - 6)), std::stoi(name.substr(colon + 1)));
    } catch (const std::logic_error&) {
      throw ConfigError("fixed scheme must be written fixed:<psi bits>:<phi bits>");
    }
  }
  throw ConfigError("unknown scheme '" + name + "'");
}

}  // namespace schemes

}  // namespace grfb
