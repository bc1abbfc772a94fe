#include "hce/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <string_view>

#include "hce/error.hpp"

namespace hce::io {

namespace {

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

[[noreturn]] void parse_error(const fs::path& path, std::size_t line, const std::string& what) {
  throw Error(ErrorCode::Parse, path.string() + ":" + std::to_string(line) + ": " + what,
              line);
}

struct Line {
  std::size_t number = 0;
  std::vector<std::string_view> fields;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

// Splits text into non-empty, non-comment lines of fields.
std::vector<Line> split_lines(const std::string& text, char sep) {
  std::vector<Line> lines;
  std::size_t number = 0, pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    ++number;
    const std::string_view raw = trim(std::string_view(text).substr(pos, end - pos));
    pos = end + 1;
    if (raw.empty() || raw.front() == '#') continue;
    Line line{number, {}};
    std::size_t start = 0;
    while (true) {
      const std::size_t cut = raw.find(sep, start);
      line.fields.push_back(trim(raw.substr(start, cut - start)));
      if (cut == std::string_view::npos) break;
      start = cut + 1;
    }
    lines.push_back(std::move(line));
  }
  return lines;
}

bool parse_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool parse_size(std::string_view s, std::size_t& out) {
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

double need_double(const fs::path& path, const Line& line, std::size_t col) {
  double v = 0.0;
  if (col >= line.fields.size() || !parse_double(line.fields[col], v)) {
    parse_error(path, line.number, "column " + std::to_string(col + 1) + " is not a number");
  }
  return v;
}

std::size_t need_size(const fs::path& path, const Line& line, std::size_t col) {
  std::size_t v = 0;
  if (col >= line.fields.size() || !parse_size(line.fields[col], v)) {
    parse_error(path, line.number,
                "column " + std::to_string(col + 1) + " is not a non-negative integer");
  }
  return v;
}

// Drops a leading header row (first field not numeric).
void skip_header(std::vector<Line>& lines) {
  double v = 0.0;
  if (!lines.empty() && !parse_double(lines.front().fields.front(), v)) {
    lines.erase(lines.begin());
  }
}

void require_columns(const fs::path& path, const Line& line, std::size_t n) {
  if (line.fields.size() < n) {
    parse_error(path, line.number,
                "expected " + std::to_string(n) + " columns, found " +
                    std::to_string(line.fields.size()));
  }
}

std::string read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

template <typename T>
T get_le(const std::string& bytes, std::size_t offset) {
  T v;
  std::memcpy(&v, bytes.data() + offset, sizeof(T));
  return v;
}

template <typename T>
void put_le(std::string& bytes, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  bytes.append(buf, sizeof(T));
}

std::string binary_matrix(const char* magic, std::uint32_t a, std::uint32_t b,
                          std::span<const double> values, std::size_t padding = 0) {
  std::string bytes(magic, 4);
  put_le(bytes, a);
  put_le(bytes, b);
  bytes.append(padding, '\0');
  const std::size_t header = bytes.size();
  bytes.resize(header + values.size() * sizeof(double));
  std::memcpy(bytes.data() + header, values.data(), values.size() * sizeof(double));
  return bytes;
}

std::uint32_t checked_u32(std::size_t v, const char* what) {
  if (v > UINT32_MAX) {
    throw Error(ErrorCode::InvalidConfig, std::string(what) + " does not fit the header");
  }
  return static_cast<std::uint32_t>(v);
}

DenseMatrix matrix_from_lines(const fs::path& path, const std::vector<Line>& lines) {
  DenseMatrix m;
  if (lines.empty()) return m;
  m.cols = lines.front().fields.size();
  m.rows = lines.size();
  m.values.reserve(m.rows * m.cols);
  for (const Line& line : lines) {
    if (line.fields.size() != m.cols) {
      parse_error(path, line.number,
                  "row has " + std::to_string(line.fields.size()) + " values, expected " +
                      std::to_string(m.cols));
    }
    for (std::size_t c = 0; c < m.cols; ++c) m.values.push_back(need_double(path, line, c));
  }
  return m;
}

}  // namespace

std::string read_text(const fs::path& path) { return read_bytes(path); }

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::Io, "failed writing " + path.string());
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Linkage read_linkage_csv(const fs::path& path) {
  const std::string text = read_bytes(path);
  auto lines = split_lines(text, ',');
  skip_header(lines);
  std::vector<RawMerge> rows;
  rows.reserve(lines.size());
  for (const Line& line : lines) {
    require_columns(path, line, 3);
    RawMerge r;
    r.left = need_size(path, line, 0);
    r.right = need_size(path, line, 1);
    r.distance = need_double(path, line, 2);
    if (line.fields.size() > 3) r.size = need_size(path, line, 3);
    rows.push_back(r);
  }
  try {
    return Linkage::validate(rows, rows.size() + 1);
  } catch (const Error& e) {
    const std::size_t row = e.index().value_or(0);
    const std::size_t line = row < lines.size() ? lines[row].number : 0;
    throw Error(e.code(), path.string() + ":" + std::to_string(line) + ": " + e.detail(),
                e.index());
  }
}

std::string linkage_csv(const Linkage& linkage) {
  std::string out = "left,right,distance,size\n";
  for (const MergeRecord& m : linkage.merges()) {
    out += std::to_string(m.left) + "," + std::to_string(m.right) + "," +
           format_double(m.distance) + "," + std::to_string(m.size) + "\n";
  }
  return out;
}

void write_linkage_csv(const fs::path& path, const Linkage& linkage) {
  write_text(path, linkage_csv(linkage));
}

Partition read_partition_csv(const fs::path& path) {
  const std::string text = read_bytes(path);
  auto lines = split_lines(text, ',');
  skip_header(lines);
  std::vector<std::size_t> labels(lines.size());
  std::vector<bool> seen(lines.size(), false);
  for (const Line& line : lines) {
    require_columns(path, line, 2);
    const std::size_t node = need_size(path, line, 0);
    if (node >= lines.size() || seen[node]) {
      parse_error(path, line.number,
                  "node ids must be 0.." + std::to_string(lines.size() - 1) +
                      ", each listed once");
    }
    seen[node] = true;
    labels[node] = need_size(path, line, 1);
  }
  return Partition(labels);
}

std::string partition_csv(const Partition& p, std::span<const std::size_t> node_ids) {
  std::string out = "node,label\n";
  for (std::size_t i = 0; i < p.size(); ++i) {
    out += std::to_string(node_ids.empty() ? i : node_ids[i]) + "," +
           std::to_string(p.label(i)) + "\n";
  }
  return out;
}

void write_partition_csv(const fs::path& path, const Partition& p,
                         std::span<const std::size_t> node_ids) {
  write_text(path, partition_csv(p, node_ids));
}

EdgeList read_edge_list(const fs::path& path, bool log1p) {
  const std::string text = read_bytes(path);
  const auto lines = split_lines(text, '\t');
  EdgeList out;
  for (const Line& line : lines) {
    require_columns(path, line, 2);
    WeightedEdge e;
    e.src = need_size(path, line, 0);
    e.dst = need_size(path, line, 1);
    e.weight = line.fields.size() > 2 ? need_double(path, line, 2) : 1.0;
    if (!std::isfinite(e.weight) || e.weight < 0.0) {
      parse_error(path, line.number, "weight must be finite and non-negative");
    }
    if (log1p) e.weight = std::log1p(e.weight);
    out.n_nodes = std::max({out.n_nodes, e.src + 1, e.dst + 1});
    out.edges.push_back(e);
  }
  return out;
}

void write_edge_list(const fs::path& path,
                     std::span<const std::pair<std::size_t, std::size_t>> edges) {
  std::string out;
  out.reserve(edges.size() * 12);
  for (const auto& [u, v] : edges) {
    out += std::to_string(u) + "\t" + std::to_string(v) + "\t1\n";
  }
  write_text(path, out);
}

DenseMatrix read_numeric_csv(const fs::path& path) {
  const std::string text = read_bytes(path);
  return matrix_from_lines(path, split_lines(text, ','));
}

void write_numeric_csv(const fs::path& path, const DenseMatrix& m) {
  std::string out;
  for (std::size_t r = 0; r < m.rows; ++r) {
    for (std::size_t c = 0; c < m.cols; ++c) {
      if (c) out += ',';
      out += format_double(m(r, c));
    }
    out += '\n';
  }
  write_text(path, out);
}

DenseMatrix read_dense_matrix(const fs::path& path) {
  const std::string bytes = read_bytes(path);
  if (bytes.compare(0, 4, "HCEM") == 0) {
    if (bytes.size() < 16) throw Error(ErrorCode::Parse, path.string() + ": truncated header");
    const std::size_t n = get_le<std::uint32_t>(bytes, 4);
    const std::uint32_t dtype = get_le<std::uint32_t>(bytes, 8);
    if (dtype != 8 && dtype != 4) {
      throw Error(ErrorCode::Parse,
                  path.string() + ": unknown dtype tag " + std::to_string(dtype));
    }
    if (bytes.size() != 16 + n * n * dtype) {
      throw Error(ErrorCode::Parse, path.string() + ": expected " +
                                        std::to_string(16 + n * n * dtype) +
                                        " bytes, found " + std::to_string(bytes.size()));
    }
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n * n; ++i) {
      m.values[i] = dtype == 8 ? get_le<double>(bytes, 16 + 8 * i)
                               : static_cast<double>(get_le<float>(bytes, 16 + 4 * i));
    }
    return m;
  }
  DenseMatrix m = matrix_from_lines(path, split_lines(bytes, ','));
  if (m.rows != m.cols) {
    throw Error(ErrorCode::Parse, path.string() + ": matrix is " + std::to_string(m.rows) +
                                      " x " + std::to_string(m.cols) + ", not square");
  }
  return m;
}

void write_dense_matrix_binary(const fs::path& path, const DenseMatrix& m) {
  if (m.rows != m.cols) throw Error(ErrorCode::InvalidConfig, "matrix is not square");
  std::string bytes = binary_matrix("HCEM", checked_u32(m.rows, "matrix size"), 8, m.values, 4);
  write_text(path, bytes);
}

DenseMatrix read_time_series(const fs::path& path) {
  const std::string bytes = read_bytes(path);
  if (bytes.compare(0, 4, "HCET") == 0) {
    if (bytes.size() < 12) throw Error(ErrorCode::Parse, path.string() + ": truncated header");
    const std::size_t rows = get_le<std::uint32_t>(bytes, 4);
    const std::size_t cols = get_le<std::uint32_t>(bytes, 8);
    if (bytes.size() != 12 + rows * cols * 8) {
      throw Error(ErrorCode::Parse, path.string() + ": expected " +
                                        std::to_string(12 + rows * cols * 8) +
                                        " bytes, found " + std::to_string(bytes.size()));
    }
    DenseMatrix m(rows, cols);
    std::memcpy(m.values.data(), bytes.data() + 12, rows * cols * 8);
    return m;
  }
  return matrix_from_lines(path, split_lines(bytes, ','));
}

void write_time_series_binary(const fs::path& path, const DenseMatrix& m) {
  write_text(path, binary_matrix("HCET", checked_u32(m.rows, "row count"),
                                 checked_u32(m.cols, "column count"), m.values));
}

DenseMatrix read_coordinates_csv(const fs::path& path) {
  const std::string text = read_bytes(path);
  auto lines = split_lines(text, ',');
  skip_header(lines);
  DenseMatrix m(lines.size(), 3);
  std::vector<bool> seen(lines.size(), false);
  for (const Line& line : lines) {
    require_columns(path, line, 4);
    const std::size_t roi = need_size(path, line, 0);
    if (roi >= lines.size() || seen[roi]) {
      parse_error(path, line.number, "roi ids must be 0..n-1, each listed once");
    }
    seen[roi] = true;
    for (std::size_t c = 0; c < 3; ++c) m(roi, c) = need_double(path, line, c + 1);
  }
  return m;
}

std::vector<Region> read_regions_csv(const fs::path& path) {
  const std::string text = read_bytes(path);
  auto lines = split_lines(text, ',');
  if (!lines.empty() && lines.front().fields.size() >= 2 &&
      lines.front().fields[0] == "roi") {
    lines.erase(lines.begin());
  }
  std::vector<Region> regions;
  std::map<std::string, std::size_t, std::less<>> index;
  for (const Line& line : lines) {
    require_columns(path, line, 2);
    const std::size_t roi = need_size(path, line, 0);
    const std::string name(line.fields[1]);
    auto [it, fresh] = index.emplace(name, regions.size());
    if (fresh) regions.push_back({name, {}});
    regions[it->second].nodes.push_back(roi);
  }
  return regions;
}

ConsensusTree read_consensus_tree(const fs::path& tree_path, const fs::path& sc_path) {
  ConsensusTree tree;
  const std::string text = read_bytes(tree_path);
  auto lines = split_lines(text, ',');
  skip_header(lines);
  for (const Line& line : lines) {
    require_columns(tree_path, line, 3);
    tree.edges.push_back({need_size(tree_path, line, 0), need_size(tree_path, line, 1),
                          need_double(tree_path, line, 2)});
  }
  const std::string sc_text = read_bytes(sc_path);
  auto sc_lines = split_lines(sc_text, ',');
  skip_header(sc_lines);
  tree.s_c.assign(sc_lines.size(), 0);
  std::vector<bool> seen(sc_lines.size(), false);
  for (const Line& line : sc_lines) {
    require_columns(sc_path, line, 2);
    const std::size_t node = need_size(sc_path, line, 0);
    if (node >= sc_lines.size() || seen[node]) {
      parse_error(sc_path, line.number, "node ids must be 0..n-1, each listed once");
    }
    seen[node] = true;
    tree.s_c[node] = need_size(sc_path, line, 1);
  }
  return tree;
}

}  // namespace hce::io
