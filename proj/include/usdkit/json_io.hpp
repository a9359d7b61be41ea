#pragma once

#include <string>

#include <json.hpp>

#include "usdkit/distill.hpp"
#include "usdkit/lossy_operator.hpp"

namespace usdkit::io {

using Json = nlohmann::ordered_json;

// Matrix file schema: {"rows": R, "cols": C, "data": [[[re, im], ...], ...]}
// with data row-major, complex scalars as two-element arrays.
Json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const Json& j);

// State set schema: {"dim": N, "states": [[[re, im], ...], ...],
// "priors": [p_0, ...]} with one array of length dim per state; priors
// optional.
Json state_set_to_json(const StateSet& s);
StateSet state_set_from_json(const Json& j);

ComplexMatrix read_matrix_file(const std::string& path);
StateSet read_state_set_file(const std::string& path);
BipartiteState read_bipartite_file(const std::string& path);

/// Serializes with stable key order and every floating-point number printed
/// with 12 significant digits, so identical inputs give identical bytes.
std::string dump(const Json& j, int indent = 2);

}  // namespace usdkit::io
