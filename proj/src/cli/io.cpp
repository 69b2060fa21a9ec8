#include "laros/cli/io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <utility>
#include <vector>

#include "laros/errors.hpp"

namespace laros::cli {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t' || s[pos] == '\r')) ++pos;
    if (pos >= s.size()) break;
    std::size_t end = pos;
    while (end < s.size() && s[end] != ' ' && s[end] != '\t' && s[end] != '\r') ++end;
    out.push_back(s.substr(pos, end - pos));
    pos = end;
  }
  return out;
}

double to_double(std::string_view tok, std::size_t line) {
  tok = trim(tok);
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError("non-numeric token '" + std::string(tok) + "'", line);
  }
  if (!std::isfinite(value)) {
    throw ParseError("non-finite value '" + std::string(tok) + "'", line);
  }
  return value;
}

long long to_index(std::string_view tok, std::size_t line) {
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError("expected an integer, got '" + std::string(tok) + "'", line);
  }
  return value;
}

struct Line {
  std::string text;
  std::size_t number;
};

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  /// Next line that is neither blank nor a '%' comment.
  std::optional<Line> next_data() {
    std::string text;
    while (std::getline(in_, text)) {
      ++number_;
      const auto t = trim(text);
      if (t.empty() || t.front() == '%') continue;
      return Line{std::string(t), number_};
    }
    return std::nullopt;
  }

  std::optional<Line> next_raw() {
    std::string text;
    if (!std::getline(in_, text)) return std::nullopt;
    ++number_;
    return Line{text, number_};
  }

  std::size_t number() const { return number_; }

 private:
  std::istream& in_;
  std::size_t number_ = 0;
};

struct Header {
  bool coordinate = false;
  bool pattern = false;
  bool symmetric = false;
  bool skew = false;
};

Header parse_header(const std::string& text, std::size_t line) {
  const auto tokens = split_ws(text);
  if (tokens.size() != 5 || lower(tokens[0]) != "%%matrixmarket" ||
      lower(tokens[1]) != "matrix") {
    throw ParseError("malformed MatrixMarket header", line);
  }
  Header h;
  const std::string layout = lower(tokens[2]);
  const std::string field = lower(tokens[3]);
  const std::string symmetry = lower(tokens[4]);
  if (layout == "coordinate") {
    h.coordinate = true;
  } else if (layout != "array") {
    throw ParseError("unknown layout '" + layout + "'", line);
  }
  if (field == "pattern") {
    if (!h.coordinate) throw ParseError("pattern field requires coordinate layout", line);
    h.pattern = true;
  } else if (field != "real" && field != "double" && field != "integer") {
    throw ParseError("unsupported field '" + field + "'", line);
  }
  if (symmetry == "symmetric") {
    h.symmetric = true;
  } else if (symmetry == "skew-symmetric") {
    h.skew = true;
  } else if (symmetry != "general") {
    throw ParseError("unsupported symmetry '" + symmetry + "'", line);
  }
  return h;
}

DenseMatrix read_matrix_market(LineReader& reader, const Header& h,
                               std::size_t header_line) {
  const auto size_line = reader.next_data();
  if (!size_line) throw ParseError("missing size line", header_line + 1);
  const auto dims = split_ws(size_line->text);
  const std::size_t want = h.coordinate ? 3 : 2;
  if (dims.size() != want) {
    throw ParseError("size line needs " + std::to_string(want) + " integers",
                     size_line->number);
  }
  const long long m = to_index(dims[0], size_line->number);
  const long long n = to_index(dims[1], size_line->number);
  if (m < 1 || n < 1) throw ParseError("dimensions must be positive", size_line->number);
  if ((h.symmetric || h.skew) && m != n) {
    throw ParseError("symmetric storage needs a square matrix", size_line->number);
  }
  Matrix a = Matrix::Zero(m, n);

  if (h.coordinate) {
    const long long nnz = to_index(dims[2], size_line->number);
    if (nnz < 0) throw ParseError("negative entry count", size_line->number);
    std::vector<bool> seen(static_cast<std::size_t>(m * n), false);
    for (long long k = 0; k < nnz; ++k) {
      const auto entry = reader.next_data();
      if (!entry) {
        throw ParseError("expected " + std::to_string(nnz) + " entries, found " +
                             std::to_string(k),
                         reader.number());
      }
      const auto tok = split_ws(entry->text);
      const std::size_t need = h.pattern ? 2 : 3;
      if (tok.size() != need) {
        throw ParseError("entry needs " + std::to_string(need) + " fields", entry->number);
      }
      const long long i = to_index(tok[0], entry->number);
      const long long j = to_index(tok[1], entry->number);
      if (i < 1 || i > m || j < 1 || j > n) {
        throw ParseError("entry index out of range", entry->number);
      }
      const double value = h.pattern ? 1.0 : to_double(tok[2], entry->number);
      const auto flat = static_cast<std::size_t>((j - 1) * m + (i - 1));
      if (seen[flat]) throw ParseError("duplicate entry", entry->number);
      seen[flat] = true;
      a(i - 1, j - 1) = value;
      if (i != j && h.symmetric) a(j - 1, i - 1) = value;
      if (i != j && h.skew) a(j - 1, i - 1) = -value;
    }
  } else {
    std::vector<std::pair<long long, long long>> slots;
    for (long long j = 0; j < n; ++j) {
      for (long long i = 0; i < m; ++i) {
        if (h.symmetric && i < j) continue;
        if (h.skew && i <= j) continue;
        slots.emplace_back(i, j);
      }
    }
    std::size_t filled = 0;
    while (filled < slots.size()) {
      const auto entry = reader.next_data();
      if (!entry) {
        throw ParseError("expected " + std::to_string(slots.size()) +
                             " values, found " + std::to_string(filled),
                         reader.number());
      }
      for (auto tok : split_ws(entry->text)) {
        if (filled == slots.size()) throw ParseError("too many values", entry->number);
        const auto [i, j] = slots[filled++];
        const double value = to_double(tok, entry->number);
        a(i, j) = value;
        if (h.symmetric) a(j, i) = value;
        if (h.skew) a(j, i) = -value;
      }
    }
  }
  if (const auto extra = reader.next_data()) {
    throw ParseError("unexpected trailing data", extra->number);
  }
  return DenseMatrix(std::move(a));
}

DenseMatrix read_csv(LineReader& reader, std::optional<Line> first) {
  std::vector<std::vector<double>> rows;
  std::size_t width = 0;
  auto take = [&](const Line& line) {
    const auto t = trim(line.text);
    if (t.empty()) return;
    std::vector<double> row;
    std::size_t pos = 0;
    while (true) {
      const auto comma = t.find(',', pos);
      const auto tok = t.substr(pos, comma == std::string_view::npos ? t.size() - pos : comma - pos);
      row.push_back(to_double(tok, line.number));
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    if (rows.empty()) {
      width = row.size();
    } else if (row.size() != width) {
      throw ParseError("expected " + std::to_string(width) + " columns, found " +
                           std::to_string(row.size()),
                       line.number);
    }
    rows.push_back(std::move(row));
  };
  if (first) take(*first);
  while (const auto line = reader.next_raw()) take(*line);
  if (rows.empty()) throw ParseError("no data rows", reader.number());
  Matrix a(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < width; ++j)
      a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return DenseMatrix(std::move(a));
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

MatrixFormat parse_format(std::string_view name) {
  const std::string s = lower(name);
  if (s == "auto") return MatrixFormat::kAuto;
  if (s == "matrixmarket-array" || s == "mm-array") return MatrixFormat::kMatrixMarketArray;
  if (s == "matrixmarket-coordinate" || s == "mm-coordinate") {
    return MatrixFormat::kMatrixMarketCoordinate;
  }
  if (s == "csv") return MatrixFormat::kCsv;
  throw InvalidParameter("unknown matrix format '" + std::string(name) + "'");
}

std::string to_string(MatrixFormat format) {
  switch (format) {
    case MatrixFormat::kAuto:
      return "auto";
    case MatrixFormat::kMatrixMarketArray:
      return "matrixmarket-array";
    case MatrixFormat::kMatrixMarketCoordinate:
      return "matrixmarket-coordinate";
    case MatrixFormat::kCsv:
      return "csv";
  }
  return "auto";
}

DenseMatrix read_matrix(std::istream& in, MatrixFormat format) {
  LineReader reader(in);
  if (format == MatrixFormat::kCsv) return read_csv(reader, std::nullopt);

  std::optional<Line> first;
  while ((first = reader.next_raw())) {
    if (!trim(first->text).empty()) break;
  }
  if (!first) throw ParseError("empty input", reader.number());
  const bool has_header = lower(trim(first->text)).rfind("%%matrixmarket", 0) == 0;

  if (format == MatrixFormat::kAuto && !has_header) return read_csv(reader, first);
  if (!has_header) throw ParseError("missing %%MatrixMarket header", first->number);
  const Header h = parse_header(std::string(trim(first->text)), first->number);
  if (format == MatrixFormat::kMatrixMarketArray && h.coordinate) {
    throw ParseError("expected array layout, found coordinate", first->number);
  }
  if (format == MatrixFormat::kMatrixMarketCoordinate && !h.coordinate) {
    throw ParseError("expected coordinate layout, found array", first->number);
  }
  return read_matrix_market(reader, h, first->number);
}

DenseMatrix parse_matrix(const std::filesystem::path& path, MatrixFormat format) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path.string() + "'");
  return read_matrix(in, format);
}

void write_matrix(std::ostream& out, const DenseMatrix& a, MatrixFormat format) {
  const Matrix& v = a.values();
  switch (format) {
    case MatrixFormat::kAuto:
    case MatrixFormat::kMatrixMarketArray:
      out << "%%MatrixMarket matrix array real general\n"
          << v.rows() << ' ' << v.cols() << '\n';
      for (Eigen::Index j = 0; j < v.cols(); ++j)
        for (Eigen::Index i = 0; i < v.rows(); ++i) out << fmt17(v(i, j)) << '\n';
      break;
    case MatrixFormat::kMatrixMarketCoordinate: {
      Eigen::Index nnz = 0;
      for (Eigen::Index k = 0; k < v.size(); ++k) nnz += v.data()[k] != 0.0;
      out << "%%MatrixMarket matrix coordinate real general\n"
          << v.rows() << ' ' << v.cols() << ' ' << nnz << '\n';
      for (Eigen::Index j = 0; j < v.cols(); ++j)
        for (Eigen::Index i = 0; i < v.rows(); ++i)
          if (v(i, j) != 0.0) out << i + 1 << ' ' << j + 1 << ' ' << fmt17(v(i, j)) << '\n';
      break;
    }
    case MatrixFormat::kCsv:
      for (Eigen::Index i = 0; i < v.rows(); ++i) {
        for (Eigen::Index j = 0; j < v.cols(); ++j) {
          if (j > 0) out << ',';
          out << fmt17(v(i, j));
        }
        out << '\n';
      }
      break;
  }
}

void write_matrix(const std::filesystem::path& path, const DenseMatrix& a,
                  MatrixFormat format) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write '" + path.string() + "'");
  write_matrix(out, a, format);
}

}  // namespace laros::cli
