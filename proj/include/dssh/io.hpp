#pragma once

// Tabular output: CSV with '#'-prefixed metadata lines or a JSON object of
// column arrays, written atomically (temporary file + rename) so a failed run
// never leaves a truncated file behind.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <variant>
#include <vector>

#include <json.hpp>

#include "linalg.hpp"

namespace dssh {

/// Shortest decimal representation that round-trips to the same double.
inline std::string format_double(double v) {
  if (v == 0.0) return "0";  // also folds -0
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  if (res.ec != std::errc{}) throw std::runtime_error("format_double failed");
  return {buf, res.ptr};
}

using Cell = std::variant<double, std::int64_t, std::string>;

struct Table {
  std::vector<std::string> comments;  // metadata, one per line
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw std::logic_error("row width does not match the header");
    rows.push_back(std::move(row));
  }
};

enum class Format { csv, json };

inline Format parse_format(const std::string& s) {
  if (s == "csv") return Format::csv;
  if (s == "json") return Format::json;
  throw std::invalid_argument("unknown format '" + s + "' (expected csv|json)");
}

inline std::string cell_text(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

inline std::string to_csv(const Table& t) {
  std::ostringstream os;
  for (const auto& c : t.comments) os << "# " << c << '\n';
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << cell_text(row[i]);
    os << '\n';
  }
  return os.str();
}

inline nlohmann::ordered_json to_json_value(const Table& t) {
  nlohmann::ordered_json j;
  j["meta"] = t.comments;
  nlohmann::ordered_json cols = nlohmann::ordered_json::object();
  for (std::size_t c = 0; c < t.columns.size(); ++c) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) std::visit([&](const auto& v) { arr.push_back(v); }, row[c]);
    cols[t.columns[c]] = std::move(arr);
  }
  j["columns"] = std::move(cols);
  return j;
}

inline std::string render(const Table& t, Format f) {
  return f == Format::csv ? to_csv(t) : to_json_value(t).dump(1) + "\n";
}

namespace detail {

inline std::filesystem::path temp_sibling(const std::filesystem::path& target) {
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  return tmp;
}

// Writes `content` next to `target` and returns the temporary path.
inline std::filesystem::path write_temp(const std::filesystem::path& target, const std::string& content) {
  namespace fs = std::filesystem;
  if (target.has_parent_path() && !fs::exists(target.parent_path()))
    throw std::runtime_error("output directory does not exist: " + target.parent_path().string());
  const fs::path tmp = temp_sibling(target);
  std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
  out << content;
  out.flush();
  if (!out) {
    out.close();
    std::error_code ec;
    fs::remove(tmp, ec);
    throw std::runtime_error("write failed: " + tmp.string());
  }
  return tmp;
}

}  // namespace detail

/// Stages several outputs ("-" = stdout) and publishes them only once every
/// file has been written in full: temporaries first, then renames.
class OutputSet {
 public:
  void add(std::string path, std::string content) { items_.push_back({std::move(path), std::move(content)}); }

  void commit() const {
    namespace fs = std::filesystem;
    std::vector<std::pair<fs::path, fs::path>> staged;  // (tmp, target)
    auto discard = [&] {
      std::error_code ec;
      for (const auto& [tmp, target] : staged) fs::remove(tmp, ec);
    };
    try {
      for (const auto& [p, c] : items_)
        if (!p.empty() && p != "-") staged.push_back({detail::write_temp(p, c), fs::path(p)});
    } catch (...) {
      discard();
      throw;
    }
    for (const auto& [tmp, target] : staged) {
      std::error_code ec;
      fs::rename(tmp, target, ec);
      if (ec) {
        discard();
        throw std::runtime_error("cannot move output into place: " + target.string());
      }
    }
    for (const auto& [p, c] : items_)
      if (p.empty() || p == "-") std::cout << c << std::flush;
  }

 private:
  std::vector<std::pair<std::string, std::string>> items_;
};

/// Writes `content` to `path` ("-" = stdout) via a temporary sibling and rename.
inline void write_atomic(const std::string& path, const std::string& content) {
  OutputSet out;
  out.add(path, content);
  out.commit();
}

/// "dir/name.csv" + "analytic" -> "dir/name.analytic.csv".
inline std::string sibling_path(const std::string& path, const std::string& tag) {
  std::filesystem::path p(path);
  const auto ext = p.extension().string();
  p.replace_extension();
  return p.string() + "." + tag + ext;
}

/// n x n complex matrix as nested arrays of [re, im] pairs.
inline nlohmann::json complex_matrix_json(const MatrixXcd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace dssh
