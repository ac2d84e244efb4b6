// Artifact writing: CSV tables, JSON documents, checksums.
#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rmkac/ensembles.hpp"

namespace rmkac {

// Fixed formatting for every number written to an artifact.
std::string format_number(double x);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns);
  CsvTable& row(const std::vector<double>& values);
  // mixed rows; strings must not contain commas, quotes or newlines
  CsvTable& row(const std::vector<std::string>& cells);
  std::size_t size() const { return rows_.size(); }
  std::string str() const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

void write_text(const std::filesystem::path& path, std::string_view text);
void write_csv(const std::filesystem::path& path, const CsvTable& table);
// two-space indentation, trailing newline
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

// lowercase hex SHA-256
std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

// one row per member, upper-triangle entries s_ij (i <= j)
CsvTable matrix_ensemble_table(const MatrixEnsemble& ens);
CsvTable velocity_ensemble_table(const VelocityEnsemble& ens);

}  // namespace rmkac
