#pragma once

#include "ffkyp/core_model.hpp"

#include "json.hpp"

#include <string>

namespace ffkyp {

using Json = nlohmann::ordered_json;

/// Reads a matrix given either as nested rows or as a flat row-major array.
Matrix matrix_from_json(const Json& j, Eigen::Index rows, Eigen::Index cols, const std::string& what);
/// Nested rows.
Json matrix_to_json(const Matrix& m);
Json vector_to_json(const Vector& v);

/// System description: keys n, inputs, outputs, params, A0, A, B0, B, C0, C,
/// D0, D, p_lower, p_upper, rate_lower, rate_upper (plus optional name and
/// description). Unknown keys are rejected.
LpvSystem system_from_json(const Json& j);
Json system_to_json(const LpvSystem& system, const std::string& name = "");

LpvSystem load_system(const std::string& path);
void save_json(const Json& j, const std::string& path);
Json load_json(const std::string& path);

/// The built-in affine LPV counterexample with its nominal parameter and rate box.
LpvSystem example1_system();
/// Same matrices with the rate box [-0.2, 0.2], which the 0.15 + 0.05 sin(4t)
/// schedule respects.
LpvSystem example1_consistent_system();

}  // namespace ffkyp
