#include "sharpcs/textio.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "sharpcs/error.hpp"

namespace sharpcs {

namespace {

struct Token {
  std::string_view text;
  std::size_t line;
  std::size_t column;
};

class Tokenizer {
 public:
  Tokenizer(std::string_view text, std::string_view name) : text_(text), name_(name) {}

  bool next(Token& out) {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) advance();
    if (pos_ >= text_.size()) return false;
    const std::size_t start = pos_;
    out.line = line_;
    out.column = column_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_]))) advance();
    out.text = text_.substr(start, pos_ - start);
    return true;
  }

  [[noreturn]] void error(std::size_t line, std::size_t column, const std::string& message) const {
    fail(ErrorCode::kParse, std::string(name_) + ":" + std::to_string(line) + ":" +
                                std::to_string(column) + ": " + message);
  }

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  std::string_view text_;
  std::string_view name_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

std::size_t parse_count(const Tokenizer& tok, const Token& t) {
  std::size_t value = 0;
  const auto* end = t.text.data() + t.text.size();
  const auto [ptr, ec] = std::from_chars(t.text.data(), end, value);
  if (ec != std::errc() || ptr != end || value == 0) {
    tok.error(t.line, t.column, "expected a positive dimension, got '" + std::string(t.text) + "'");
  }
  return value;
}

double parse_value(const Tokenizer& tok, const Token& t) {
  // strtod accepts the full decimal/exponent grammar; reject trailing junk and non-finite values.
  const std::string s(t.text);
  char* end = nullptr;
  const double value = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || !std::isfinite(value)) {
    tok.error(t.line, t.column, "expected a finite number, got '" + s + "'");
  }
  return value;
}

}  // namespace

DenseMatrix parse_matrix(std::string_view text, std::string_view source_name) {
  Tokenizer tok(text, source_name);
  Token t;
  if (!tok.next(t)) tok.error(tok.line(), tok.column(), "missing header \"n p\"");
  const std::size_t rows = parse_count(tok, t);
  const std::size_t header_line = t.line;
  if (!tok.next(t)) tok.error(tok.line(), tok.column(), "missing column count in header");
  if (t.line != header_line) tok.error(t.line, t.column, "header must be \"n p\" on one line");
  const std::size_t cols = parse_count(tok, t);

  std::vector<double> values;
  values.reserve(rows * cols);
  while (tok.next(t)) {
    if (values.size() == rows * cols) tok.error(t.line, t.column, "more values than n*p");
    values.push_back(parse_value(tok, t));
  }
  if (values.size() != rows * cols) {
    tok.error(tok.line(), tok.column(),
              "expected " + std::to_string(rows * cols) + " values, found " +
                  std::to_string(values.size()));
  }
  return DenseMatrix(rows, cols, std::move(values));
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::kIo, "cannot write '" + path.string() + "'");
    out << contents;
    if (!out) fail(ErrorCode::kIo, "write failed for '" + path.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) fail(ErrorCode::kIo, "cannot move '" + tmp.string() + "' into place: " + ec.message());
}

DenseMatrix read_matrix_file(const std::filesystem::path& path) {
  return parse_matrix(read_text_file(path), path.string());
}

Vector read_vector_file(const std::filesystem::path& path) {
  const DenseMatrix m = read_matrix_file(path);
  if (m.rows() != 1 && m.cols() != 1) {
    fail(ErrorCode::kParse, path.string() + ":1:1: expected a vector (n x 1 or 1 x n)");
  }
  return Vector(m.values().begin(), m.values().end());
}

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::string format_matrix(const DenseMatrix& a) {
  std::string out = std::to_string(a.rows()) + " " + std::to_string(a.cols()) + "\n";
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (j) out += ' ';
      out += format_double(a(i, j));
    }
    out += '\n';
  }
  return out;
}

void write_matrix_file(const std::filesystem::path& path, const DenseMatrix& a) {
  write_text_file(path, format_matrix(a));
}

void write_vector_file(const std::filesystem::path& path, std::span<const double> v) {
  write_matrix_file(path, DenseMatrix(v.size(), 1, Vector(v.begin(), v.end())));
}

}  // namespace sharpcs
