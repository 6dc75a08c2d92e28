#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "grfb/codebook.hpp"
#include "grfb/entropy.hpp"
#include "grfb/error.hpp"
#include "grfb/link_sim.hpp"

namespace py = pybind11;
using namespace grfb;

namespace {

using CArray = py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>;

ComplexMatrix to_matrix(const CArray& a) {
  if (a.ndim() != 2) throw py::value_error("expected a 2-D array");
  const auto r = static_cast<std::size_t>(a.shape(0)), c = static_cast<std::size_t>(a.shape(1));
  return {r, c, std::vector<cplx>(a.data(), a.data() + r * c)};
}

CArray to_array(const ComplexMatrix& m) {
  CArray out({m.rows(), m.cols()});
  std::copy(m.entries().begin(), m.entries().end(), out.mutable_data());
  return out;
}

GrDims dims_of(const ComplexMatrix& w) { return {static_cast<int>(w.rows()), static_cast<int>(w.cols())}; }

py::dict quantized_dict(const QuantizedParams& q) {
  py::dict d;
  d["psi_indices"] = q.psi_indices;
  d["phi_indices"] = q.phi_indices;
  d["phi_bits"] = q.phi_bits;
  return d;
}

}  // namespace

PYBIND11_MODULE(_grfb, m) {
  m.doc() = "Givens-rotation beamforming feedback quantization";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<CorruptMessage>(m, "CorruptMessage", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  m.def("svd", [](const CArray& a) {
    const auto s = svd(to_matrix(a));
    return py::make_tuple(to_array(s.u), s.d, to_array(s.v));
  });

  m.def("phase_normalize", [](const CArray& v) { return to_array(phase_normalize(to_matrix(v)).v_bar); });

  m.def("parameter_names", [](int n_t, int k) {
    std::vector<std::string> names;
    for (const auto& s : canonical_slots({n_t, k})) names.push_back(s.name());
    return names;
  });

  m.def("gr_decompose", [](const CArray& w) {
    const auto mat = to_matrix(w);
    return gr_decompose(mat, dims_of(mat)).flat();
  }, "Angles in canonical order for a phase-normalized matrix.");

  m.def("gr_reconstruct", [](const std::vector<double>& angles, int n_t, int k) {
    return to_array(gr_reconstruct(GivensParams::from_flat({n_t, k}, angles)));
  });

  m.def("psi_grid", [](int bits) { return UniformGrid::psi(bits).levels(); });
  m.def("phi_grid", [](int bits) { return UniformGrid::phi(bits).levels(); });

  m.def("huffman_lengths", [](const std::vector<double>& probs) { return build_huffman(probs).lengths(); });
  m.def("huffman_codewords", [](const std::vector<double>& probs) {
    const auto t = build_huffman(probs);
    std::vector<std::string> out;
    for (std::size_t i = 0; i < t.size(); ++i) out.push_back(t.codeword(i));
    return out;
  });

  m.def("encode", [](const CArray& w, const std::string& scheme) {
    const auto mat = phase_normalize(to_matrix(w)).v_bar;
    const auto s = schemes::by_name(scheme, dims_of(mat));
    if (s.perfect()) throw ConfigError("scheme '" + s.id + "' sends unquantized feedback");
    const auto q = quantize_gr(gr_decompose(mat, s.dims), *s.policy);
    const auto msg = encode_message(q, s);
    py::dict d = quantized_dict(q);
    d["hex"] = msg.hex();
    d["bits"] = msg.bit_length;
    d["reconstruction"] = to_array(gr_reconstruct(dequantize_gr(q)));
    return d;
  }, py::arg("w"), py::arg("scheme"));

  m.def("decode", [](const std::string& hex, const std::string& scheme, const std::string& dims,
                     std::size_t bits) {
    const auto s = schemes::by_name(scheme, GrDims::parse(dims));
    if (s.perfect()) throw ConfigError("scheme '" + s.id + "' sends unquantized feedback");
    const auto q = decode_message(FeedbackMessage::from_hex(s.dims, s.id, hex, bits), s);
    py::dict d = quantized_dict(q);
    d["matrix"] = to_array(gr_reconstruct(dequantize_gr(q)));
    return d;
  }, py::arg("hex"), py::arg("scheme"), py::arg("dims"), py::arg("bits"));

  m.def("evaluate_quantizer", [](const std::string& dims, const std::string& scheme, std::size_t n,
                                 std::uint64_t seed) {
    const auto d = GrDims::parse(dims);
    const auto st = evaluate_quantizer(d, schemes::by_name(scheme, d), n, seed);
    py::dict out;
    out["mse"] = st.mse;
    out["mad"] = st.mad;
    out["mad_chordal"] = st.mad_chordal;
    out["avg_bits"] = st.avg_bits;
    return out;
  }, py::arg("dims"), py::arg("scheme"), py::arg("n") = 100000, py::arg("seed") = 1);

  m.def("sample_angles", [](const std::string& dims, std::size_t n, std::uint64_t seed) {
    const auto d = GrDims::parse(dims);
    const auto samples = sample_gr_params(d, n, seed);
    py::array_t<double> out({n, d.parameter_count()});
    auto* p = out.mutable_data();
    for (const auto& s : samples)
      for (double a : s.flat()) *p++ = a;
    return out;
  }, py::arg("dims"), py::arg("n"), py::arg("seed") = 1);

  m.def("lloyd_train", [](const std::vector<double>& samples, std::size_t k, std::uint64_t seed) {
    const auto cb = lloyd_train_psi(samples, k, seed);
    py::dict out;
    out["levels"] = cb.levels;
    out["probabilities"] = cb.probabilities;
    out["distortion"] = cb.distortion;
    out["history"] = cb.history;
    return out;
  }, py::arg("samples"), py::arg("k"), py::arg("seed") = 1);

  m.def("run_campaign", [](int n_t, int n_r, const std::vector<std::string>& modulations,
                           const std::vector<double>& snr_db, const std::vector<std::string>& scheme_names,
                           std::size_t trials, const std::string& receiver, std::uint64_t seed) {
    LinkConfig c;
    c.n_t = n_t;
    c.n_r = n_r;
    c.k = static_cast<int>(modulations.size());
    c.modulations.clear();
    for (const auto& mod : modulations) c.modulations.push_back(parse_modulation(mod));
    c.snr_db = snr_db;
    for (const auto& name : scheme_names) c.schemes.push_back(schemes::by_name(name, c.dims()));
    c.trials = trials;
    c.receiver = parse_receiver(receiver);
    c.seed = seed;
    std::vector<SchemeResult> results;
    {
      py::gil_scoped_release release;
      results = run_campaign(c);
    }
    py::list rows;
    for (const auto& r : results)
      for (const auto& b : r.ber) {
        py::dict row;
        row["scheme"] = r.scheme;
        row["snr_db"] = b.snr_db;
        row["stream"] = b.stream;
        row["bits_sent"] = b.bits_sent;
        row["bit_errors"] = b.bit_errors;
        row["ber"] = b.ber();
        row["mse"] = r.mse;
        row["avg_feedback_bits"] = r.avg_feedback_bits;
        rows.append(row);
      }
    return rows;
  }, py::arg("n_t"), py::arg("n_r"), py::arg("modulations"), py::arg("snr_db"), py::arg("schemes"),
     py::arg("trials") = 1000, py::arg("receiver") = "parallel", py::arg("seed") = 1);
}
