#pragma once

#include <string>
#include <string_view>

#include "stackik/model.hpp"

namespace stackik {

/// Parses a model document (JSON; schema in docs/model_format.md).
/// Joint order in the document becomes index order. Throws ModelError.
ChainModel parse_model(std::string_view text);

/// Serializes a model back into the document format. Origins are written
/// as xyz + rpy.
std::string emit_model_document(const ChainModel& model);

/// Field-by-field comparison with a tolerance on every real number.
bool structurally_equal(const ChainModel& a, const ChainModel& b, double tol = 1e-12);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);

}  // namespace stackik
