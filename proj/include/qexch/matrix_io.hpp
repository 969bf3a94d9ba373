#pragma once

#include <string>

#include "json.hpp"
#include "qexch/leg_matrix.hpp"

namespace qexch {

// [re_num, re_den, im_num, im_den]; integers beyond int64 are written as decimal strings.
nlohmann::json scalar_to_json(const ExactScalar& s);
ExactScalar scalar_from_json(const nlohmann::json& j);

// {legs: [{id, dim}], entries: [[re_num, re_den, im_num, im_den], ...]} row-major.
nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);

nlohmann::json legs_to_json(const IndexSet& legs);
IndexSet legs_from_json(const nlohmann::json& j);

std::string dump_json(const nlohmann::json& j);  // stable formatting
nlohmann::json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace qexch
