#pragma once

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "matsketch/errors.hpp"
#include "matsketch/format.hpp"
#include "matsketch/linear.hpp"
#include "matsketch/matrix.hpp"
#include "matsketch/regression.hpp"
#include "matsketch/sampling.hpp"

namespace matsketch {

enum class MatrixFormat : std::uint8_t { MatrixMarket = 0, DenseCsv = 1 };

namespace detail {

inline std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

inline std::string strip(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline std::vector<std::string> whitespace_fields(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream iss(line);
  std::string tok;
  while (iss >> tok) out.push_back(tok);
  return out;
}

}  // namespace detail

// MatrixMarket coordinate format, 1-based indices; duplicate entries are
// summed and explicit zeros dropped by the matrix constructor.
inline SparseMatrix load_matrix_market(std::istream& in, const std::string& name) {
  std::string line;
  if (!std::getline(in, line)) throw io_error(name + ": empty file");
  std::string header = line;
  std::transform(header.begin(), header.end(), header.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (header.rfind("%%matrixmarket", 0) != 0 ||
      header.find("matrix") == std::string::npos ||
      header.find("coordinate") == std::string::npos ||
      header.find("real") == std::string::npos ||
      header.find("general") == std::string::npos)
    throw io_error(name + ": expected '%%MatrixMarket matrix coordinate real general' header");

  std::size_t lineno = 1;
  std::size_t n_rows = 0, n_cols = 0, nnz = 0;
  bool have_dims = false;
  std::vector<Triplet> triplets;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = detail::strip(line);
    if (t.empty() || t[0] == '%') continue;
    const auto fields = detail::whitespace_fields(t);
    const std::string at = name + " line " + format_size(lineno);
    if (!have_dims) {
      if (fields.size() != 3) throw io_error(at + ": expected 'rows cols nnz'");
      n_rows = parse_size(fields[0], at);
      n_cols = parse_size(fields[1], at);
      nnz = parse_size(fields[2], at);
      have_dims = true;
      triplets.reserve(nnz);
      continue;
    }
    if (fields.size() != 3) throw io_error(at + ": expected 'row col value'");
    const std::size_t i = parse_size(fields[0], at);
    const std::size_t j = parse_size(fields[1], at);
    const double v = parse_double(fields[2], at);
    if (i == 0 || i > n_rows || j == 0 || j > n_cols)
      throw io_error(at + ": index out of range");
    triplets.push_back(Triplet{i - 1, j - 1, v});
  }
  if (!have_dims) throw io_error(name + ": missing dimension line");
  if (triplets.size() != nnz)
    throw io_error(name + ": entry count " + format_size(triplets.size()) +
                   " does not match declared nnz " + format_size(nnz));
  return SparseMatrix::from_triplets(n_rows, n_cols, triplets);
}

// Dense CSV: one row per line, comma-separated reals; zeros are dropped when
// the values become a sparse matrix.
inline SparseMatrix load_dense_csv(std::istream& in, const std::string& name) {
  std::vector<std::vector<Entry>> rows;
  std::size_t n_cols = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() && in.peek() == std::char_traits<char>::eof() && !rows.empty())
      break;  // trailing newline
    const auto fields = detail::split(line, ',');
    const std::string at = name + " line " + format_size(lineno);
    if (rows.empty()) {
      n_cols = fields.size();
      if (n_cols == 0 || (n_cols == 1 && detail::strip(fields[0]).empty()))
        throw io_error(at + ": empty row");
    } else if (fields.size() != n_cols) {
      throw io_error(at + ": expected " + format_size(n_cols) + " columns, got " +
                     format_size(fields.size()));
    }
    std::vector<Entry> row;
    for (std::size_t j = 0; j < fields.size(); ++j) {
      const double v = parse_double(detail::strip(fields[j]), at);
      if (v != 0.0) row.push_back(Entry{static_cast<std::uint32_t>(j), v});
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw io_error(name + ": empty file");
  const std::size_t n_rows = rows.size();
  return SparseMatrix(n_rows, n_cols, std::move(rows));
}

inline SparseMatrix load_matrix(const std::string& path, MatrixFormat format) {
  std::ifstream in(path);
  if (!in) throw io_error(path + ": cannot open for reading");
  return format == MatrixFormat::MatrixMarket ? load_matrix_market(in, path)
                                              : load_dense_csv(in, path);
}

inline void save_matrix_market(std::ostream& os, const SparseMatrix& a) {
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << format_size(a.n_rows()) << ' ' << format_size(a.n_cols()) << ' ' << format_size(a.nnz())
     << '\n';
  for (std::size_t i = 0; i < a.n_rows(); ++i)
    for (const auto& e : a.row(i))
      os << format_size(i + 1) << ' ' << format_size(e.col + 1) << ' ' << format_double(e.value)
         << '\n';
}

inline void save_dense_csv(std::ostream& os, const DenseMatrix& a) {
  for (std::size_t i = 0; i < a.n_rows(); ++i) {
    for (std::size_t j = 0; j < a.n_cols(); ++j) {
      if (j) os << ',';
      os << format_double(a(i, j));
    }
    os << '\n';
  }
}

inline void save_matrix(const std::string& path, const SparseMatrix& a, MatrixFormat format) {
  std::ofstream os(path, std::ios::binary);  // binary: keep LF on every platform
  if (!os) throw io_error(path + ": cannot open for writing");
  if (format == MatrixFormat::MatrixMarket)
    save_matrix_market(os, a);
  else
    save_dense_csv(os, to_dense(a));
  if (!os) throw io_error(path + ": write failed");
}

// ---------------------------------------------------------------------------
// Binary sketch container: 8-byte magic, u32 version, u8 class tag, payload.
// All integers little-endian, doubles as raw IEEE-754 bits (so tau = +inf
// round-trips bit-exactly).

inline constexpr char kSketchMagic[8] = {'M', 'S', 'K', 'E', 'T', 'C', 'H', '1'};
inline constexpr std::uint32_t kSketchVersion = 1;

namespace detail {

enum class SketchClass : std::uint8_t { Sample = 0, Linear = 1, Regression = 2 };

struct ByteWriter {
  std::ostream& os;
  void u8(std::uint8_t v) { os.put(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
};

struct ByteReader {
  std::istream& is;
  const std::string& name;
  std::uint8_t u8() {
    const int c = is.get();
    if (c == std::char_traits<char>::eof()) throw io_error(name + ": truncated sketch file");
    return static_cast<std::uint8_t>(c);
  }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(u8()) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(u8()) << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
};

inline void write_sample_payload(ByteWriter& w, const SampleSketch& s) {
  w.u8(static_cast<std::uint8_t>(s.kind));
  w.u8(static_cast<std::uint8_t>(s.weight_mode));
  w.u64(s.k);
  w.u64(s.seed);
  w.u64(s.n_rows);
  w.u64(s.n_cols);
  w.f64(s.tau);
  w.u64(s.indices.size());
  for (std::size_t r = 0; r < s.indices.size(); ++r) {
    w.u64(s.indices[r]);
    w.u32(static_cast<std::uint32_t>(s.rows[r].size()));
    for (const auto& e : s.rows[r]) {
      w.u32(e.col);
      w.f64(e.value);
    }
  }
}

inline SampleSketch read_sample_payload(ByteReader& r) {
  SampleSketch s;
  const std::uint8_t kind = r.u8();
  if (kind > 1) throw io_error(r.name + ": bad sampler kind");
  s.kind = static_cast<SampleKind>(kind);
  const std::uint8_t mode = r.u8();
  if (mode > 1) throw io_error(r.name + ": bad weight mode");
  s.weight_mode = static_cast<WeightMode>(mode);
  s.k = r.u64();
  s.seed = r.u64();
  s.n_rows = r.u64();
  s.n_cols = r.u64();
  s.tau = r.f64();
  const std::uint64_t count = r.u64();
  s.indices.reserve(count);
  s.rows.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    s.indices.push_back(r.u64());
    const std::uint32_t nnz = r.u32();
    std::vector<Entry> row;
    row.reserve(nnz);
    for (std::uint32_t j = 0; j < nnz; ++j) {
      Entry e;
      e.col = r.u32();
      e.value = r.f64();
      row.push_back(e);
    }
    s.rows.push_back(std::move(row));
  }
  return s;
}

inline void write_dense(ByteWriter& w, const DenseMatrix& m) {
  w.u64(m.n_rows());
  w.u64(m.n_cols());
  for (double v : m.data()) w.f64(v);
}

inline DenseMatrix read_dense(ByteReader& r) {
  const std::uint64_t rows = r.u64();
  const std::uint64_t cols = r.u64();
  DenseMatrix m(rows, cols);
  for (double& v : m.data()) v = r.f64();
  return m;
}

}  // namespace detail

using AnySketch = std::variant<SampleSketch, LinearSketch, RegressionSketch>;

inline void save_sketch(std::ostream& os, const AnySketch& sketch) {
  detail::ByteWriter w{os};
  os.write(kSketchMagic, sizeof(kSketchMagic));
  w.u32(kSketchVersion);
  if (const auto* s = std::get_if<SampleSketch>(&sketch)) {
    w.u8(static_cast<std::uint8_t>(detail::SketchClass::Sample));
    detail::write_sample_payload(w, *s);
  } else if (const auto* l = std::get_if<LinearSketch>(&sketch)) {
    w.u8(static_cast<std::uint8_t>(detail::SketchClass::Linear));
    w.u8(static_cast<std::uint8_t>(l->kind));
    w.u64(l->k);
    w.u64(l->seed);
    w.u64(l->n_rows);
    detail::write_dense(w, l->data);
  } else {
    const auto& g = std::get<RegressionSketch>(sketch);
    w.u8(static_cast<std::uint8_t>(detail::SketchClass::Regression));
    w.u8(static_cast<std::uint8_t>(g.gram_mode));
    detail::write_sample_payload(w, g.sample);
    w.u64(g.sampled_scores.size());
    for (double v : g.sampled_scores) w.f64(v);
    detail::write_dense(w, g.gram);
    w.u64(g.row_scales.size());
    for (double v : g.row_scales) w.f64(v);
  }
}

inline AnySketch load_sketch(std::istream& is, const std::string& name) {
  char magic[8];
  is.read(magic, sizeof(magic));
  if (is.gcount() != sizeof(magic) || !std::equal(magic, magic + 8, kSketchMagic))
    throw io_error(name + ": not a sketch file (bad magic)");
  detail::ByteReader r{is, name};
  const std::uint32_t version = r.u32();
  if (version != kSketchVersion)
    throw io_error(name + ": unsupported sketch version " + format_size(version));
  const std::uint8_t cls = r.u8();
  switch (static_cast<detail::SketchClass>(cls)) {
    case detail::SketchClass::Sample:
      return detail::read_sample_payload(r);
    case detail::SketchClass::Linear: {
      LinearSketch l;
      const std::uint8_t kind = r.u8();
      if (kind > 2) throw io_error(name + ": bad projection kind");
      l.kind = static_cast<ProjectionKind>(kind);
      l.k = r.u64();
      l.seed = r.u64();
      l.n_rows = r.u64();
      l.data = detail::read_dense(r);
      return l;
    }
    case detail::SketchClass::Regression: {
      RegressionSketch g;
      const std::uint8_t mode = r.u8();
      if (mode > 1) throw io_error(name + ": bad gram mode");
      g.gram_mode = static_cast<GramMode>(mode);
      g.sample = detail::read_sample_payload(r);
      const std::uint64_t ns = r.u64();
      g.sampled_scores.reserve(ns);
      for (std::uint64_t i = 0; i < ns; ++i) g.sampled_scores.push_back(r.f64());
      g.gram = detail::read_dense(r);
      const std::uint64_t nr = r.u64();
      g.row_scales.reserve(nr);
      for (std::uint64_t i = 0; i < nr; ++i) g.row_scales.push_back(r.f64());
      return g;
    }
    default:
      throw io_error(name + ": unknown sketch class " + format_size(cls));
  }
}

inline void save_sketch_file(const std::string& path, const AnySketch& sketch) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw io_error(path + ": cannot open for writing");
  save_sketch(os, sketch);
  if (!os) throw io_error(path + ": write failed");
}

inline AnySketch load_sketch_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw io_error(path + ": cannot open for reading");
  return load_sketch(is, path);
}

}  // namespace matsketch
