#include "usdkit/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "usdkit/error.hpp"

namespace usdkit::io {

namespace {

Complex complex_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    fail(ErrorCode::ParseError, "complex scalar must be a [re, im] pair");
  }
  const double re = j[0].get<double>();
  const double im = j[1].get<double>();
  if (!std::isfinite(re) || !std::isfinite(im)) {
    fail(ErrorCode::NonFinite, "complex scalar must be finite");
  }
  return {re, im};
}

Json complex_to_json(const Complex& z) { return Json::array({z.real(), z.imag()}); }

Json load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ParseError, "cannot open file: " + path);
  Json j = Json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) fail(ErrorCode::ParseError, "invalid JSON in " + path);
  return j;
}

std::string format_double(double v) {
  char buf[64];
  if (v == 0.0) v = 0.0;  // normalize -0
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void dump_impl(const Json& j, std::string& out, int indent, int depth) {
  const std::string pad(static_cast<size_t>(indent) * depth, ' ');
  const std::string pad_in(static_cast<size_t>(indent) * (depth + 1), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out += ",\n";
        first = false;
        out += pad_in + "\"" + key + "\": ";
        dump_impl(value, out, indent, depth + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Flat arrays of numbers stay on one line.
      bool scalar_only = true;
      for (const auto& el : j) {
        if (el.is_structured()) {
          scalar_only = false;
          break;
        }
      }
      if (scalar_only) {
        out += "[";
        bool first = true;
        for (const auto& el : j) {
          if (!first) out += ", ";
          first = false;
          dump_impl(el, out, indent, depth);
        }
        out += "]";
        return;
      }
      out += "[\n";
      bool first = true;
      for (const auto& el : j) {
        if (!first) out += ",\n";
        first = false;
        out += pad_in;
        dump_impl(el, out, indent, depth + 1);
      }
      out += "\n" + pad + "]";
      return;
    }
    case Json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    default:
      out += j.dump();
      return;
  }
}

}  // namespace

Json matrix_to_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  Json out;
  out["rows"] = m.rows();
  out["cols"] = m.cols();
  out["data"] = std::move(rows);
  return out;
}

ComplexMatrix matrix_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("data")) {
    fail(ErrorCode::ParseError, "matrix JSON requires rows, cols, data");
  }
  const int rows = j["rows"].get<int>();
  const int cols = j["cols"].get<int>();
  if (rows <= 0 || cols <= 0) fail(ErrorCode::DimensionMismatch, "rows/cols must be positive");
  const Json& data = j["data"];
  if (!data.is_array() || static_cast<int>(data.size()) != rows) {
    fail(ErrorCode::DimensionMismatch, "data must have `rows` rows");
  }
  ComplexMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    const Json& row = data[i];
    if (!row.is_array() || static_cast<int>(row.size()) != cols) {
      fail(ErrorCode::DimensionMismatch, "each row must have `cols` entries");
    }
    for (int c = 0; c < cols; ++c) m(i, c) = complex_from_json(row[c]);
  }
  return m;
}

Json state_set_to_json(const StateSet& s) {
  Json states = Json::array();
  for (int i = 0; i < s.count(); ++i) {
    Json vec = Json::array();
    for (const Complex& z : s.state(i)) vec.push_back(complex_to_json(z));
    states.push_back(std::move(vec));
  }
  Json out;
  out["dim"] = s.dim();
  out["states"] = std::move(states);
  if (s.priors()) out["priors"] = *s.priors();
  return out;
}

StateSet state_set_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("states")) {
    fail(ErrorCode::ParseError, "state set JSON requires dim and states");
  }
  const int dim = j["dim"].get<int>();
  if (dim <= 0) fail(ErrorCode::DimensionMismatch, "dim must be positive");
  const Json& states = j["states"];
  if (!states.is_array() || states.empty()) {
    fail(ErrorCode::DimensionMismatch, "states must be a non-empty array");
  }
  ComplexMatrix m(dim, static_cast<int>(states.size()));
  for (int s = 0; s < static_cast<int>(states.size()); ++s) {
    const Json& vec = states[s];
    if (!vec.is_array() || static_cast<int>(vec.size()) != dim) {
      fail(ErrorCode::DimensionMismatch, "each state must have `dim` entries");
    }
    for (int i = 0; i < dim; ++i) m(i, s) = complex_from_json(vec[i]);
  }
  if (j.contains("priors")) {
    return StateSet(std::move(m), j["priors"].get<std::vector<double>>());
  }
  return StateSet(std::move(m));
}

ComplexMatrix read_matrix_file(const std::string& path) {
  return matrix_from_json(load_file(path));
}

StateSet read_state_set_file(const std::string& path) {
  return state_set_from_json(load_file(path));
}

BipartiteState read_bipartite_file(const std::string& path) {
  return BipartiteState(matrix_from_json(load_file(path)));
}

std::string dump(const Json& j, int indent) {
  std::string out;
  dump_impl(j, out, indent, 0);
  out += "\n";
  return out;
}

}  // namespace usdkit::io
