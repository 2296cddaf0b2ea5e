#pragma once

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "covsel/linalg.hpp"

namespace covsel {

// File system failures (missing file, unwritable directory).
class IoError : public Error {
 public:
  using Error::Error;
};

/// 17 significant digits, enough to round-trip any double.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline double parse_double(const std::string& tok, const std::string& where) {
  const char* begin = tok.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || errno == ERANGE || !std::isfinite(v))
    throw InvalidInput(where + ": bad number '" + tok + "'");
  return v;
}

inline long parse_long(const std::string& tok, const std::string& where) {
  const char* begin = tok.c_str();
  char* end = nullptr;
  errno = 0;
  const long v = std::strtol(begin, &end, 10);
  if (end == begin || *end != '\0' || errno == ERANGE) throw InvalidInput(where + ": bad integer '" + tok + "'");
  return v;
}

inline std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  for (std::string t; is >> t;) out.push_back(t);
  return out;
}

inline std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

inline bool is_blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); });
}

}  // namespace detail

/// MatrixMarket coordinate real symmetric: lower triangle, 1-based, every entry
/// whose bit pattern is not +0.0.
inline void write_matrix_market(std::ostream& os, const SymMatrix& m) {
  const Index n = m.size();
  std::vector<std::pair<Index, Index>> entries;
  for (Index j = 0; j < n; ++j)
    for (Index i = j; i < n; ++i)
      if (m(i, j) != 0.0 || std::signbit(m(i, j))) entries.emplace_back(i, j);
  os << "%%MatrixMarket matrix coordinate real symmetric\n";
  os << n << ' ' << n << ' ' << entries.size() << '\n';
  for (auto [i, j] : entries) os << i + 1 << ' ' << j + 1 << ' ' << format_double(m(i, j)) << '\n';
}

inline SymMatrix read_matrix_market(std::istream& is) {
  const std::string where = "matrix market";
  std::string line;
  if (!std::getline(is, line)) throw InvalidInput(where + ": empty input");
  const auto banner = detail::split_ws(detail::lower(line));
  if (banner.size() != 5 || banner[0] != "%%matrixmarket" || banner[1] != "matrix" || banner[2] != "coordinate" ||
      banner[3] != "real" || banner[4] != "symmetric")
    throw InvalidInput(where + ": expected '%%MatrixMarket matrix coordinate real symmetric'");

  while (std::getline(is, line))
    if (!line.empty() && line[0] != '%' && !detail::is_blank(line)) break;
  const auto dims = detail::split_ws(line);
  if (dims.size() != 3) throw InvalidInput(where + ": missing size line");
  const long rows = detail::parse_long(dims[0], where);
  const long cols = detail::parse_long(dims[1], where);
  const long nnz = detail::parse_long(dims[2], where);
  if (rows < 1 || rows != cols) throw InvalidInput(where + ": matrix must be square with n >= 1");
  if (nnz < 0 || nnz > rows * (rows + 1) / 2) throw InvalidInput(where + ": bad entry count");

  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows, rows);
  std::set<std::pair<long, long>> seen;
  long read = 0;
  while (read < nnz && std::getline(is, line)) {
    if (line.empty() || line[0] == '%' || detail::is_blank(line)) continue;
    const auto tok = detail::split_ws(line);
    if (tok.size() != 3) throw InvalidInput(where + ": malformed entry line");
    long i = detail::parse_long(tok[0], where);
    long j = detail::parse_long(tok[1], where);
    const double v = detail::parse_double(tok[2], where);
    if (i < 1 || j < 1 || i > rows || j > rows) throw InvalidInput(where + ": index out of range");
    if (i < j) std::swap(i, j);
    if (!seen.insert({i, j}).second) throw InvalidInput(where + ": duplicate entry");
    m(i - 1, j - 1) = v;
    m(j - 1, i - 1) = v;
    ++read;
  }
  if (read != nnz) throw InvalidInput(where + ": fewer entries than declared");
  while (std::getline(is, line))
    if (!line.empty() && line[0] != '%' && !detail::is_blank(line)) throw InvalidInput(where + ": trailing data");
  return SymMatrix::from_dense(m);
}

/// Header "n <dim>", then one 1-based "i j" per line, both orientations.
inline void write_pairs(std::ostream& os, Index n, const PairSet& s) {
  s.check_dimension(n);
  os << "n " << n << '\n';
  for (auto [i, j] : s.pairs()) os << i + 1 << ' ' << j + 1 << '\n';
}

struct PairsFile {
  Index n = 0;
  PairSet pairs;
};

/// Rejects files where some (i,j) appears without (j,i).
inline PairsFile read_pairs(std::istream& is) {
  const std::string where = "pairs";
  std::string line;
  while (std::getline(is, line))
    if (!detail::is_blank(line)) break;
  const auto head = detail::split_ws(line);
  if (head.size() != 2 || head[0] != "n") throw InvalidInput(where + ": expected header 'n <dim>'");
  const long n = detail::parse_long(head[1], where);
  if (n < 1) throw InvalidInput(where + ": dimension must be >= 1");

  std::vector<PairSet::Pair> raw;
  while (std::getline(is, line)) {
    if (detail::is_blank(line)) continue;
    const auto tok = detail::split_ws(line);
    if (tok.size() != 2) throw InvalidInput(where + ": malformed pair line");
    const long i = detail::parse_long(tok[0], where);
    const long j = detail::parse_long(tok[1], where);
    if (i < 1 || j < 1 || i > n || j > n) throw InvalidInput(where + ": index out of range");
    raw.emplace_back(i - 1, j - 1);
  }
  return {n, PairSet::from_ordered(raw)};
}

/// Plain PBM (P1): pixel (i,j) is 1 iff |M_ij| > threshold.
inline void write_pbm(std::ostream& os, const SymMatrix& m, double threshold) {
  const Index n = m.size();
  os << "P1\n" << n << ' ' << n << '\n';
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (j) os << ' ';
      os << (std::abs(m(i, j)) > threshold ? '1' : '0');
    }
    os << '\n';
  }
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + p.string());
  out << content;
  if (!out) throw IoError("write failed for " + p.string());
}

inline SymMatrix load_matrix(const std::filesystem::path& p) {
  std::istringstream is(read_file(p));
  return read_matrix_market(is);
}

inline PairsFile load_pairs(const std::filesystem::path& p) {
  std::istringstream is(read_file(p));
  return read_pairs(is);
}

inline std::string matrix_to_string(const SymMatrix& m) {
  std::ostringstream os;
  write_matrix_market(os, m);
  return os.str();
}

inline std::string pairs_to_string(Index n, const PairSet& s) {
  std::ostringstream os;
  write_pairs(os, n, s);
  return os.str();
}

}  // namespace covsel
