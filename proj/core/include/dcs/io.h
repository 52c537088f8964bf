#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "dcs/linalg.h"

namespace dcs {

// %.17g, with "nan"/"inf" spelled out for CSV.
std::string FormatNumber(double v);

// One row per line, comma separated, no header.
std::string MatrixToCsv(const Matrix& m);
// Rejects ragged rows, empty input and non-numeric fields (FormatError).
Matrix MatrixFromCsv(const std::string& text);

// JSON text with every floating-point number printed to 17 significant
// digits. Object keys are sorted; arrays of scalars stay on one line.
std::string DumpJson(const nlohmann::json& j);

// Plain PGM (P2, maxval 255); entries are clamped to [0, 1] and mapped
// linearly to 0..255.
std::string MatrixToPgm(const Matrix& m);

std::string ReadFile(const std::string& path);
// Creates parent directories as needed.
void WriteFile(const std::string& path, const std::string& contents);

Matrix ReadMatrixCsv(const std::string& path);
void WriteMatrixCsv(const std::string& path, const Matrix& m);
nlohmann::json ReadJsonFile(const std::string& path);
void WriteJsonFile(const std::string& path, const nlohmann::json& j);

}  // namespace dcs
