#include "commands.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "campaign_config.hpp"
#include "grfb/codebook.hpp"
#include "grfb/entropy.hpp"
#include "grfb/error.hpp"
#include "reproduce.hpp"

namespace grfb::cli {

namespace {

constexpr double kUnitaryTol = 1e-6;
constexpr std::size_t kMinTrainSamples = 10000;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::filesystem::path output_dir(const GlobalOptions& g, const std::string& fallback) {
  std::filesystem::path dir = g.out_dir.value_or(fallback);
  std::filesystem::create_directories(dir);
  return dir;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + path.string() + "'");
  f << content;
}

template <typename T>
std::string list(const std::vector<T>& v) {
  std::ostringstream o;
  o << std::setprecision(10);
  for (std::size_t i = 0; i < v.size(); ++i) o << (i ? " " : "") << v[i];
  return o.str();
}

void print_quantized(std::ostream& out, const QuantizedParams& q) {
  out << "psi_indices " << list(q.psi_indices) << '\n'
      << "phi_indices " << list(q.phi_indices) << '\n'
      << "phi_bits " << list(q.phi_bits) << '\n';
}

// Nearest matrix with exactly orthonormal columns (the polar factor).
ComplexMatrix orthonormalize(const ComplexMatrix& w) {
  const auto s = svd(w);
  return s.u * s.v.adjoint();
}

}  // namespace

cplx parse_complex(const std::string& token) {
  auto fail = [&] { return ValidationError("cannot parse complex entry '" + token + "'"); };
  if (token.empty()) throw fail();
  auto number = [&](const std::string& s, bool imaginary) {
    if (imaginary && (s.empty() || s == "+")) return 1.0;
    if (imaginary && s == "-") return -1.0;
    std::size_t used = 0;
    double v;
    try {
      v = std::stod(s, &used);
    } catch (const std::logic_error&) {
      throw fail();
    }
    if (used != s.size() || !std::isfinite(v)) throw fail();
    return v;
  };
  const char last = token.back();
  if (last != 'i' && last != 'j') return {number(token, false), 0.0};
  const std::string body = token.substr(0, token.size() - 1);
  // Split at the last sign that is not leading and not part of an exponent.
  std::size_t split = std::string::npos;
  for (std::size_t p = body.size(); p-- > 1;)
    if ((body[p] == '+' || body[p] == '-') && body[p - 1] != 'e' && body[p - 1] != 'E') {
      split = p;
      break;
    }
  if (split == std::string::npos) return {0.0, number(body, true)};
  return {number(body.substr(0, split), false), number(body.substr(split), true)};
}

ComplexMatrix parse_matrix(const std::string& text) {
  std::vector<std::vector<cplx>> rows;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream tokens(line);
    std::vector<cplx> row;
    for (std::string t; tokens >> t;) row.push_back(parse_complex(t));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ValidationError("matrix file has no rows");
  std::vector<cplx> entries;
  for (const auto& r : rows) {
    if (r.size() != rows.front().size()) throw ValidationError("matrix rows have different lengths");
    entries.insert(entries.end(), r.begin(), r.end());
  }
  return {rows.size(), rows.front().size(), std::move(entries)};
}

std::string format_matrix(const ComplexMatrix& m) {
  std::ostringstream o;
  o << std::setprecision(12);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      const cplx z = m(r, c);
      o << (c ? " " : "") << z.real() << (std::signbit(z.imag()) ? "-" : "+") << std::abs(z.imag()) << 'i';
    }
    o << '\n';
  }
  return o.str();
}

int cmd_reproduce(const std::string& target, const GlobalOptions& g, std::ostream& out) {
  ReproduceOptions opt;
  opt.seed = g.seed.value_or(1);
  opt.trials = g.trials.value_or(0);
  opt.threads = g.threads;
  const Report r = reproduce(target, opt);
  const auto dir = output_dir(g, "grfb-out");
  for (const auto& f : r.files) write_file(dir / f.name, f.content);
  r.print(out);
  out << "wrote " << r.files.size() << " file(s) to " << dir.string() << '\n';
  return r.passed() ? kExitPass : kExitFail;
}

int cmd_encode(const std::string& path, const std::string& scheme_name, std::ostream& out) {
  ComplexMatrix w = parse_matrix(read_file(path));
  if (w.cols() > w.rows()) throw ValidationError("matrix has more columns than rows");
  const GrDims dims{static_cast<int>(w.rows()), static_cast<int>(w.cols())};
  dims.validate();
  const double residual = gram_residual(w);
  if (!(residual <= kUnitaryTol)) {
    std::ostringstream msg;
    msg << "matrix columns are not orthonormal: Gram residual " << std::setprecision(6) << residual
        << " exceeds " << kUnitaryTol;
    throw ValidationError(msg.str());
  }
  const auto scheme = schemes::by_name(scheme_name, dims);
  if (scheme.perfect()) throw ConfigError("scheme '" + scheme.id + "' sends unquantized feedback");

  const ComplexMatrix w_bar = phase_normalize(residual > 1e-12 ? orthonormalize(w) : w).v_bar;
  const QuantizedParams q = quantize_gr(gr_decompose(w_bar, dims), *scheme.policy);
  const FeedbackMessage m = encode_message(q, scheme);
  const QuantizedParams back = decode_message(m, scheme);
  if (!(back == q)) throw Error("internal round trip mismatch");
  const ComplexMatrix w_tilde = gr_reconstruct(dequantize_gr(back));

  out << "dims " << dims.label() << '\n'
      << "scheme " << scheme.id << '\n'
      << "gram_residual " << std::setprecision(3) << residual << '\n';
  print_quantized(out, q);
  out << "bits " << m.bit_length << '\n'
      << "hex " << m.hex() << '\n'
      << "bitstring " << m.bit_string() << '\n'
      << "reconstruction_mse " << std::setprecision(10) << std::pow((w_bar - w_tilde).frobenius_norm(), 2) << '\n'
      << "roundtrip ok\n";
  return kExitPass;
}

int cmd_decode(const std::string& hex, const std::string& scheme_name, const std::string& dims_text,
               std::optional<std::size_t> bits, std::ostream& out) {
  const GrDims dims = GrDims::parse(dims_text);
  const auto scheme = schemes::by_name(scheme_name, dims);
  if (scheme.perfect()) throw ConfigError("scheme '" + scheme.id + "' sends unquantized feedback");

  QuantizedParams q = [&] {
    if (bits) return decode_message(FeedbackMessage::from_hex(dims, scheme.id, hex, *bits), scheme);
    // Without a declared length the last nibble may carry up to three zero pad bits.
    const auto m = FeedbackMessage::from_hex(dims, scheme.id, hex, hex.size() * 4);
    if (m.bit_length == 0) throw CorruptMessage("empty payload");
    BitReader r(m.payload, m.bit_length);
    auto decoded = decode_fields(r, scheme);
    if (r.remaining() >= 4) throw CorruptMessage(std::to_string(r.remaining()) + " trailing bits");
    while (r.remaining() > 0)
      if (r.read(1) != 0) throw CorruptMessage("nonzero trailing bits");
    return decoded;
  }();
  const GivensParams p = dequantize_gr(q);

  out << "dims " << dims.label() << '\n' << "scheme " << scheme.id << '\n';
  out << "bits " << message_length(q, scheme) << '\n';
  print_quantized(out, q);
  const auto slots = canonical_slots(dims);
  const auto angles = p.flat();
  out << std::setprecision(10);
  for (std::size_t j = 0; j < slots.size(); ++j) out << slots[j].name() << ' ' << angles[j] << '\n';
  out << "matrix\n" << format_matrix(gr_reconstruct(p));
  return kExitPass;
}

int cmd_train(const std::string& dims_text, std::size_t levels, std::size_t samples, const GlobalOptions& g,
              std::ostream& out) {
  const GrDims dims = GrDims::parse(dims_text);
  if (levels < 1) throw ConfigError("--levels must be >= 1");
  if (samples < kMinTrainSamples) throw ConfigError("--samples must be >= " + std::to_string(kMinTrainSamples));
  const std::uint64_t seed = g.seed.value_or(1);
  const auto params = sample_gr_params(dims, samples, seed);
  const auto slots = canonical_slots(dims);

  std::vector<std::pair<std::string, std::vector<double>>> sets;
  std::vector<double> pooled;
  for (std::size_t j = 0; j < slots.size(); ++j)
    if (slots[j].kind == AngleKind::psi) {
      auto col = angle_column(params, j);
      pooled.insert(pooled.end(), col.begin(), col.end());
      sets.emplace_back(slots[j].name(), std::move(col));
    }
  if (sets.size() > 1) sets.emplace_back("pooled", std::move(pooled));

  const bool grid_comparable = levels >= 2 && levels <= 16 && (levels & (levels - 1)) == 0;
  std::ostringstream csv;
  csv << std::setprecision(10)
      << "parameter,index,level,probability,codeword_length,distortion,uniform_grid_distortion,iterations\n";
  out << "training " << levels << "-level psi codebooks for " << dims.label() << " on " << samples
      << " samples (seed " << seed << ")\n";
  for (const auto& [name, values] : sets) {
    const TrainedCodebook cb = lloyd_train_psi(values, levels, seed);
    std::vector<int> lengths(levels, 0);
    if (levels >= 2) {
      try {
        lengths = build_huffman(cb.probabilities).lengths();
      } catch (const ValidationError&) {
        lengths.assign(levels, index_bits(levels));
      }
    }
    double uniform = NAN;
    if (grid_comparable) uniform = codebook_distortion(UniformGrid::psi(index_bits(levels)).levels(), values);
    for (std::size_t i = 0; i < levels; ++i)
      csv << name << ',' << i << ',' << cb.levels[i] << ',' << cb.probabilities[i] << ',' << lengths[i] << ','
          << cb.distortion << ',' << (grid_comparable ? fmt(uniform, 10) : std::string()) << ',' << cb.iterations
          << '\n';
    out << "  " << name << ": levels [" << list(cb.levels) << "] distortion " << fmt(cb.distortion)
        << (grid_comparable ? " (uniform grid " + fmt(uniform) + ")" : std::string()) << ", " << cb.iterations
        << " iterations\n";
  }
  const auto dir = output_dir(g, "grfb-out");
  const auto file = dir / ("codebook_" + dims.label() + "_k" + std::to_string(levels) + ".csv");
  write_file(file, csv.str());
  out << "wrote " << file.string() << '\n';
  return kExitPass;
}

int cmd_campaign(const std::string& path, const GlobalOptions& g, std::ostream& out) {
  CampaignConfig c = load_campaign(path);
  if (g.seed) c.link.seed = *g.seed;
  if (g.trials) c.link.trials = *g.trials;
  if (g.threads) c.link.threads = g.threads;
  c.link.validate();
  const auto results = run_campaign(c.link);

  std::ostringstream csv;
  write_campaign_csv(csv, c.link, results);
  GlobalOptions where = g;
  if (!where.out_dir) where.out_dir = c.out_dir;
  const auto file = output_dir(where, ".") / (c.name + ".csv");
  write_file(file, csv.str());

  out << c.name << ": " << c.link.describe() << '\n';
  for (const auto& r : results) {
    out << "  " << r.scheme << ": bits " << fmt(r.avg_feedback_bits, 5) << ", MSE " << fmt(r.mse, 4) << ", MAD "
        << fmt(r.mad, 4) << '\n';
    for (const auto& b : r.ber)
      out << "    snr " << fmt(b.snr_db) << " dB stream " << b.stream << ": BER " << fmt(b.ber(), 4) << " ("
          << b.bit_errors << " errors)" << (b.failed_trials ? ", " + std::to_string(b.failed_trials) + " failed" : "")
          << '\n';
  }
  out << "wrote " << file.string() << '\n';
  return kExitPass;
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Givens-rotation beamforming feedback: codec tools and reproduction campaigns", "grfb"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  std::uint64_t seed = 1;
  std::size_t trials = 0;
  std::string out_dir;
  auto* seed_opt = app.add_option("--seed", seed, "Random seed");
  auto* trials_opt = app.add_option("--trials", trials, "Trial / sample count override")->check(CLI::PositiveNumber);
  auto* out_opt = app.add_option("--out", out_dir, "Output directory for CSV files");
  app.add_option("--threads", g.threads, "Worker threads (0: all cores)");

  std::string target;
  auto* rep = app.add_subcommand("reproduce", "Rerun a reference table or figure and check it");
  rep->add_option("target", target, "table5|table6|table7|table8|fig4|fig5|fig6")
      ->required()
      ->check(CLI::IsMember(reproduce_targets()));

  std::string matrix_file, scheme = "B";
  auto* enc = app.add_subcommand("encode", "Quantize and encode a beamforming matrix");
  enc->add_option("file", matrix_file, "Matrix text file")->required();
  enc->add_option("--scheme", scheme, "A-E, traditional, proposed or fixed:<psi bits>:<phi bits>")->required();

  std::string hex, dims = "3x2";
  std::optional<std::size_t> bits;
  auto* dec = app.add_subcommand("decode", "Decode a hex feedback payload");
  dec->add_option("hex", hex, "Payload as hex digits")->required();
  dec->add_option("--scheme", scheme, "Scheme id")->required();
  dec->add_option("--dims", dims, "Matrix shape NxK")->required();
  dec->add_option("--bits", bits, "Exact payload length in bits");

  std::size_t levels = 2, samples = 100000;
  auto* train = app.add_subcommand("train", "Train Lloyd codebooks for the psi angles");
  train->add_option("--dims", dims, "Matrix shape NxK")->required();
  train->add_option("--levels", levels, "Codebook size k");
  train->add_option("--samples", samples, "Training samples (>= 10000)");

  std::string config;
  auto* camp = app.add_subcommand("campaign", "Run a link campaign from a YAML config");
  camp->add_option("config", config, "Config file")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kExitPass : kExitUsage;
  }
  if (*seed_opt) g.seed = seed;
  if (*trials_opt) g.trials = trials;
  if (*out_opt) g.out_dir = out_dir;

  try {
    if (*rep) return cmd_reproduce(target, g, out);
    if (*enc) return cmd_encode(matrix_file, scheme, out);
    if (*dec) return cmd_decode(hex, scheme, dims, bits, out);
    if (*train) return cmd_train(dims, levels, samples, g, out);
    if (*camp) return cmd_campaign(config, g, out);
  } catch (const ConfigError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << '\n';
    return kExitFail;
  } catch (const CorruptMessage& e) {
    err << "corrupt message: " << e.what() << '\n';
    return kExitFail;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFail;
  }
  return kExitUsage;
}

}  // namespace grfb::cli
