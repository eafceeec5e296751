#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace fsoacq {

/// CSV table; cells are already formatted strings.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);
  std::size_t column(const std::string& name) const;  // throws if absent
};

/// Shortest %g form that parses back to the same double.
std::string format_number(double v);

std::string to_csv(const Table& t);
Table parse_csv(const std::string& text);
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

struct PlotSpec {
  std::string title;
  std::string x_column;
  std::string y_column;
  std::string series_column;  // empty: one series
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = true;
};

/// Line plot of a CSV table as a standalone SVG document. Depends on the table
/// contents only, so rendering the written CSV reproduces the plot exactly.
std::string render_svg(const Table& t, const PlotSpec& spec);

/// Git blob object id: SHA-1 of "blob <len>\0" + content.
std::string git_blob_sha1(const std::string& content);

inline constexpr const char* kToolVersion = "1.0.0";

/// Run manifest skeleton: command, version, seed, config path and hash.
nlohmann::ordered_json make_manifest(const std::string& command, const std::string& config_path,
                                     const std::string& config_text, unsigned long long seed);

}  // namespace fsoacq
