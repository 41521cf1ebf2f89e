#pragma once

// Matrix files: {"n": N, "re": [[...] x N] x N, "im": optional, same shape}.
// Vector files (for form-p): {"n": N, "re": [N reals], "im": optional}.

#include <filesystem>
#include <string>
#include <vector>

#include <pwcalc/matrix.hpp>

#include "report_json.hpp"

namespace pwcalc::cli {

Matrix matrix_from_json(const Json& j, const std::string& what);
std::vector<cplx> vector_from_json(const Json& j, const std::string& what);

Json matrix_to_json(const Matrix& m);
Json vector_to_json(const std::vector<double>& v);

struct LoadedFile {
    std::string path;
    std::string sha256;
    Json content;
};

/// Reads and parses a JSON file; input error when missing or malformed.
LoadedFile load_json_file(const std::string& path);

std::string sha256_hex(const std::string& bytes);

} // namespace pwcalc::cli
