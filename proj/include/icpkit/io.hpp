#pragma once

/// @file io.hpp
/// @brief On-disk formats: Matrix Market coordinate files for matrices,
///        one-value-per-line text for vectors, and flat "key = value"
///        manifests. All writes go through a temp-file-plus-rename so a
///        crashed run never leaves a half-written file behind.

#include "icpkit/matrix.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace icpkit {

// ---------------------------------------------------------------------------
// Atomic file writes
// ---------------------------------------------------------------------------

/// Write content to path via a sibling temp file and an atomic rename.
inline void atomic_write_file(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

namespace detail {

inline std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.16e", v);
  return buf;
}

inline std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return s;
}

inline std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Matrix Market coordinate format
// ---------------------------------------------------------------------------

/// Read a square "matrix coordinate real general" file into CSR storage.
/// Duplicate coordinates are rejected (the CSR invariant forbids them).
inline Matrix read_matrix_market(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": empty file");
  std::istringstream header(line);
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket" || detail::lowercase(object) != "matrix" ||
      detail::lowercase(format) != "coordinate" || detail::lowercase(field) != "real" ||
      detail::lowercase(symmetry) != "general")
    throw std::runtime_error(path.string() +
                             ": expected '%%MatrixMarket matrix coordinate real general'");
  while (std::getline(in, line)) {
    const std::string t = detail::trim(line);
    if (!t.empty() && t[0] != '%') break;
  }
  std::istringstream size_line(line);
  long rows = 0, cols = 0, nnz = 0;
  if (!(size_line >> rows >> cols >> nnz))
    throw std::runtime_error(path.string() + ": malformed size line");
  if (rows != cols) throw std::runtime_error(path.string() + ": matrix must be square");
  if (rows <= 0 || nnz < 0) throw std::runtime_error(path.string() + ": bad dimensions");
  std::vector<Triplet> ts;
  ts.reserve(static_cast<std::size_t>(nnz));
  for (long k = 0; k < nnz; ++k) {
    long i = 0, j = 0;
    double v = 0.0;
    if (!(in >> i >> j >> v))
      throw std::runtime_error(path.string() + ": truncated entry list");
    if (i < 1 || i > rows || j < 1 || j > cols)
      throw std::runtime_error(path.string() + ": entry index out of range");
    ts.push_back({static_cast<int>(i - 1), static_cast<int>(j - 1), v});
  }
  try {
    return Matrix::from_triplets(static_cast<int>(rows), std::move(ts));
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

/// Write the stored entries of a matrix (dense storage writes its nonzeros).
inline void write_matrix_market(const std::filesystem::path& path, const Matrix& a) {
  std::vector<Triplet> ts;
  a.for_each_entry([&](int i, int j, double v) {
    if (a.is_csr() || v != 0.0) ts.push_back({i, j, v});
  });
  std::string out = "%%MatrixMarket matrix coordinate real general\n";
  out += std::to_string(a.n()) + " " + std::to_string(a.n()) + " " +
         std::to_string(ts.size()) + "\n";
  for (const Triplet& t : ts)
    out += std::to_string(t.row + 1) + " " + std::to_string(t.col + 1) + " " +
           detail::format_full(t.value) + "\n";
  atomic_write_file(path, out);
}

// ---------------------------------------------------------------------------
// Vector files
// ---------------------------------------------------------------------------

/// Whitespace-separated doubles; the canonical layout is one value per line.
inline Vec read_vector(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  Vec v;
  double x = 0.0;
  while (in >> x) v.push_back(x);
  if (!in.eof()) throw std::runtime_error(path.string() + ": malformed vector entry");
  if (v.empty()) throw std::runtime_error(path.string() + ": empty vector file");
  return v;
}

inline void write_vector(const std::filesystem::path& path, std::span<const double> v) {
  std::string out;
  for (double x : v) out += detail::format_full(x) + "\n";
  atomic_write_file(path, out);
}

// ---------------------------------------------------------------------------
// Manifests: flat "key = value" text
// ---------------------------------------------------------------------------

using ManifestEntries = std::vector<std::pair<std::string, std::string>>;

/// Parse "key = value" lines; '#' starts a comment, blank lines are skipped.
/// Later duplicates of a key win.
inline std::map<std::string, std::string> parse_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::map<std::string, std::string> out;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                               ": expected 'key = value'");
    const std::string key = detail::trim(t.substr(0, eq));
    const std::string value = detail::trim(t.substr(eq + 1));
    if (key.empty())
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": empty key");
    out[key] = value;
  }
  return out;
}

/// Serialize entries in the given order.
inline std::string render_manifest(const ManifestEntries& entries) {
  std::string out;
  for (const auto& [k, v] : entries) out += k + " = " + v + "\n";
  return out;
}

inline void write_manifest(const std::filesystem::path& path, const ManifestEntries& entries) {
  atomic_write_file(path, render_manifest(entries));
}

}  // namespace icpkit
