#include "dcs/io.h"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "dcs/error.h"

namespace dcs {
namespace {

bool IsScalar(const nlohmann::json& j) { return !j.is_array() && !j.is_object(); }

void DumpValue(const nlohmann::json& j, int indent, std::string* out) {
  const std::string pad(indent, ' ');
  const std::string inner(indent + 2, ' ');
  if (j.is_object()) {
    if (j.empty()) {
      *out += "{}";
      return;
    }
    *out += "{\n";
    bool first = true;
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!first) *out += ",\n";
      first = false;
      *out += inner + nlohmann::json(it.key()).dump() + ": ";
      DumpValue(it.value(), indent + 2, out);
    }
    *out += "\n" + pad + "}";
  } else if (j.is_array()) {
    bool flat = true;
    for (const auto& v : j) flat = flat && IsScalar(v);
    if (flat) {
      *out += "[";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) *out += ", ";
        DumpValue(j[i], indent, out);
      }
      *out += "]";
      return;
    }
    *out += "[\n";
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (i) *out += ",\n";
      *out += inner;
      DumpValue(j[i], indent + 2, out);
    }
    *out += "\n" + pad + "]";
  } else if (j.is_number_float()) {
    const double v = j.get<double>();
    *out += std::isfinite(v) ? FormatNumber(v) : "null";
  } else {
    *out += j.dump();
  }
}

}  // namespace

std::string FormatNumber(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string MatrixToCsv(const Matrix& m) {
  std::string out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out += ',';
      out += FormatNumber(m(i, j));
    }
    out += '\n';
  }
  return out;
}

Matrix MatrixFromCsv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) {
      const char* begin = field.c_str();
      char* end = nullptr;
      errno = 0;
      const double v = std::strtod(begin, &end);
      while (*end == ' ' || *end == '\t') ++end;
      if (end == begin || *end != '\0' || errno == ERANGE) {
        std::ostringstream msg;
        msg << "line " << line_no << ": '" << field << "' is not a number";
        throw FormatError(msg.str());
      }
      row.push_back(v);
    }
    if (line.back() == ',') {
      std::ostringstream msg;
      msg << "line " << line_no << ": trailing empty field";
      throw FormatError(msg.str());
    }
    if (!rows.empty() && row.size() != rows[0].size()) {
      std::ostringstream msg;
      msg << "line " << line_no << " has " << row.size() << " fields, expected " << rows[0].size();
      throw FormatError(msg.str());
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw FormatError("CSV matrix is empty");
  Matrix m(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

std::string DumpJson(const nlohmann::json& j) {
  std::string out;
  DumpValue(j, 0, &out);
  out += '\n';
  return out;
}

std::string MatrixToPgm(const Matrix& m) {
  std::ostringstream out;
  out << "P2\n" << m.cols() << " " << m.rows() << "\n255\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double v = std::min(1.0, std::max(0.0, m(i, j)));
      if (j) out << ' ';
      out << static_cast<int>(std::lround(v * 255.0));
    }
    out << '\n';
  }
  return out.str();
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const std::string& path, const std::string& contents) {
  const std::filesystem::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  if (ec) throw IoError("cannot create " + p.parent_path().string() + ": " + ec.message());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << contents;
}

Matrix ReadMatrixCsv(const std::string& path) {
  try {
    return MatrixFromCsv(ReadFile(path));
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

void WriteMatrixCsv(const std::string& path, const Matrix& m) { WriteFile(path, MatrixToCsv(m)); }

nlohmann::json ReadJsonFile(const std::string& path) {
  try {
    return nlohmann::json::parse(ReadFile(path));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path + ": " + e.what());
  }
}

void WriteJsonFile(const std::string& path, const nlohmann::json& j) { WriteFile(path, DumpJson(j)); }

}  // namespace dcs
