#include "rmkac/io.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <fmt/format.h>
#include <openssl/evp.h>

namespace rmkac {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return "0";  // no negative zero
  return fmt::format("{:.12g}", x);
}

CsvTable::CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

CsvTable& CsvTable::row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_number(v));
  return row(cells);
}

CsvTable& CsvTable::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_.size())
    throw std::invalid_argument(fmt::format("csv row has {} cells, expected {}", cells.size(), columns_.size()));
  for (const auto& c : cells)
    if (c.find_first_of(",\"\n") != std::string::npos) throw std::invalid_argument("csv cell needs quoting: " + c);
  rows_.push_back(cells);
  return *this;
}

std::string CsvTable::str() const {
  std::string out = fmt::format("{}\n", fmt::join(columns_, ","));
  for (const auto& r : rows_) out += fmt::format("{}\n", fmt::join(r, ","));
  return out;
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) { write_text(path, table.str()); }

void write_json(const std::filesystem::path& path, const nlohmann::json& doc) { write_text(path, doc.dump(2) + "\n"); }

namespace {

std::string to_hex(const unsigned char* d, unsigned n) {
  std::string s;
  for (unsigned i = 0; i < n; ++i) s += fmt::format("{:02x}", d[i]);
  return s;
}

struct Digest {
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  Digest() {
    if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) throw std::runtime_error("sha256 init failed");
  }
  ~Digest() { EVP_MD_CTX_free(ctx); }
  void update(const void* p, std::size_t n) {
    if (EVP_DigestUpdate(ctx, p, n) != 1) throw std::runtime_error("sha256 update failed");
  }
  std::string hex() {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned len = 0;
    if (EVP_DigestFinal_ex(ctx, md, &len) != 1) throw std::runtime_error("sha256 final failed");
    return to_hex(md, len);
  }
};

}  // namespace

std::string sha256_hex(std::string_view data) {
  Digest d;
  d.update(data.data(), data.size());
  return d.hex();
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path.string());
  Digest d;
  std::vector<char> buf(1 << 16);
  while (f) {
    f.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    d.update(buf.data(), static_cast<std::size_t>(f.gcount()));
  }
  return d.hex();
}

CsvTable matrix_ensemble_table(const MatrixEnsemble& ens) {
  const int d = ens.dim();
  std::vector<std::string> cols;
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) cols.push_back(fmt::format("s{}{}", i + 1, j + 1));
  CsvTable t(cols);
  std::vector<double> row;
  for (std::size_t k = 0; k < ens.size(); ++k) {
    auto s = ens.raw(k);
    row.clear();
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) row.push_back(s[static_cast<std::size_t>(i * d + j)]);
    t.row(row);
  }
  return t;
}

CsvTable velocity_ensemble_table(const VelocityEnsemble& ens) {
  std::vector<std::string> cols;
  for (int i = 0; i < ens.dim(); ++i) cols.push_back(fmt::format("v{}", i + 1));
  if (ens.weighted()) cols.push_back("weight");
  CsvTable t(cols);
  for (std::size_t k = 0; k < ens.size(); ++k) {
    auto r = ens.row(k);
    std::vector<double> row(r.begin(), r.end());
    if (ens.weighted()) row.push_back(ens.weight(k));
    t.row(row);
  }
  return t;
}

}  // namespace rmkac
