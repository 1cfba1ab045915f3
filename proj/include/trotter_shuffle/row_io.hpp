#pragma once

#include <string>

#include <json.hpp>

#include "trotter_shuffle/arrays.hpp"

namespace trotter_shuffle {

/// {"n": n, "d": d, "elements": [[re, im], ...]} with the n d x d elements
/// flattened row-major, element after element. Doubles round-trip exactly.
nlohmann::json row_to_json(const ArrayRow &row);
ArrayRow       row_from_json(const nlohmann::json &doc);

/// Matrix literal: a name ("E12", "identity", "sigma_x", ...) resolved in
/// dimension d, or an array of rows whose entries are numbers or [re, im].
CMatrix        matrix_from_json(const nlohmann::json &value, Eigen::Index d);
nlohmann::json matrix_to_json(const CMatrix &M);

} // namespace trotter_shuffle
