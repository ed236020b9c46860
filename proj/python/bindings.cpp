// Python bindings. Sources and reports cross the boundary as JSON text and
// rationals as "p/q" strings, so nothing is rounded on the way.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gsv/classifier.hpp"
#include "gsv/error.hpp"
#include "gsv/extractors.hpp"
#include "gsv/json_io.hpp"
#include "gsv/oracle.hpp"
#include "gsv/presets.hpp"

namespace py = pybind11;
using namespace gsv;

namespace {

RationalVector parse_all(const std::vector<std::string>& values) {
  RationalVector out;
  for (const auto& v : values) out.push_back(parse_rational(v));
  return out;
}

std::string preset_json(const std::string& name) {
  auto spec = find_preset(name);
  if (!spec) throw GsvError(ErrorCode::kInvalidArgument, "unknown preset " + name);
  return json_io::source_to_json(*spec).dump();
}

std::string classify_json(const std::string& source, std::optional<std::string> epsilon) {
  auto spec = json_io::parse_source(source);
  auto report = classify(spec);
  auto doc = json_io::report_to_json(report, spec);
  if (epsilon && report.hnk.holds) {
    doc["mvr_witness"] = json_io::witness_to_json(mvr_witness(spec, parse_rational(*epsilon)));
  }
  return doc.dump();
}

std::vector<std::vector<std::string>> kernel(const std::string& source) {
  std::vector<std::vector<std::string>> out;
  for (const auto& v : kernel_basis(json_io::parse_source(source)).basis) out.push_back(to_strings(v));
  return out;
}

std::string exact_bias_json(const std::string& source, const std::vector<std::int64_t>& outputs) {
  auto spec = json_io::parse_source(source);
  std::size_t n = 0;
  std::uint64_t leaves = 1;
  while (leaves < outputs.size()) {
    leaves *= spec.num_faces();
    ++n;
  }
  if (leaves != outputs.size()) throw GsvError(ErrorCode::kInvalidArgument, "table size is not a power of |F|");
  auto table = ExtractorTable::lookup(n, spec.num_faces(), OutputKind::kSign, 1, outputs);
  return json_io::bias_to_json(exact_extremes(spec, table), spec).dump();
}

}  // namespace

PYBIND11_MODULE(_gsv, m) {
  m.doc() = "exact classification and extraction for GSV sources";

  static py::exception<GsvError> error(m, "GsvError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const GsvError& e) {
      py::set_error(error, e.what());
    }
  });

  m.def("preset", &preset_json, py::arg("name"));
  m.def("classify", &classify_json, py::arg("source"), py::arg("epsilon") = std::nullopt);
  m.def("kernel_basis", &kernel, py::arg("source"));
  m.def("exact_bias", &exact_bias_json, py::arg("source"), py::arg("outputs"));
  m.def(
      "threshold_extract",
      [](const std::vector<std::string>& psi, const std::string& eps, const std::vector<FaceIndex>& faces) {
        return threshold_extract(parse_all(psi), parse_rational(eps), faces);
      },
      py::arg("psi"), py::arg("epsilon"), py::arg("faces"));
  m.def(
      "bit_extract_exp",
      [](const std::vector<std::string>& psi, const std::vector<FaceIndex>& faces) {
        return bit_extract_exp(parse_all(psi), faces);
      },
      py::arg("psi"), py::arg("faces"));
  m.def(
      "multibit_extract",
      [](const std::vector<std::string>& psi, const std::vector<FaceIndex>& faces, unsigned bits, bool fast) {
        const auto values = parse_all(psi);
        return fast ? multibit_extract_fast(values, faces, bits) : multibit_extract_naive(values, faces, bits);
      },
      py::arg("psi"), py::arg("faces"), py::arg("m"), py::arg("fast") = true);
}
