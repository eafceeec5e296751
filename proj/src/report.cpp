#include "fsoacq/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include <openssl/sha.h>

namespace fsoacq {

void Table::add_row(std::vector<std::string> row) {
  if (row.size() != columns.size()) throw std::invalid_argument("row width does not match columns");
  rows.push_back(std::move(row));
}

std::size_t Table::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw std::invalid_argument("no column '" + name + "'");
  return std::size_t(it - columns.begin());
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  for (int prec = 6; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

std::string to_csv(const Table& t) {
  std::ostringstream out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (cells[i].find_first_of(",\"\n") != std::string::npos)
        throw std::invalid_argument("CSV cells may not contain commas, quotes or newlines");
      out << (i ? "," : "") << cells[i];
    }
    out << '\n';
  };
  line(t.columns);
  for (const auto& r : t.rows) line(r);
  return out.str();
}

Table parse_csv(const std::string& text) {
  Table t;
  std::istringstream in(text);
  std::string row;
  bool header = true;
  while (std::getline(in, row)) {
    if (row.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream rs(row);
    while (std::getline(rs, cell, ',')) cells.push_back(cell);
    if (row.back() == ',') cells.emplace_back();
    if (header) {
      t.columns = std::move(cells);
      header = false;
    } else {
      t.add_row(std::move(cells));
    }
  }
  return t;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

namespace {

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#17becf"};

}  // namespace

std::string render_svg(const Table& t, const PlotSpec& spec) {
  const std::size_t xc = t.column(spec.x_column);
  const std::size_t yc = t.column(spec.y_column);
  const bool grouped = !spec.series_column.empty();
  const std::size_t sc = grouped ? t.column(spec.series_column) : 0;

  // Series in first-appearance order; points that cannot be drawn are skipped.
  std::vector<std::string> order;
  std::map<std::string, std::vector<std::pair<double, double>>> series;
  auto usable = [](double v, bool log) { return std::isfinite(v) && (!log || v > 0); };
  for (const auto& r : t.rows) {
    const double x = std::strtod(r[xc].c_str(), nullptr);
    const double y = std::strtod(r[yc].c_str(), nullptr);
    const std::string key = grouped ? r[sc] : spec.y_column;
    if (!series.count(key)) order.push_back(key);
    auto& pts = series[key];
    if (usable(x, spec.log_x) && usable(y, spec.log_y)) pts.emplace_back(x, y);
  }

  auto tx = [&](double v) { return spec.log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return spec.log_y ? std::log10(v) : v; };
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& [k, pts] : series)
    for (const auto& [x, y] : pts) {
      x0 = std::min(x0, tx(x));
      x1 = std::max(x1, tx(x));
      y0 = std::min(y0, ty(y));
      y1 = std::max(y1, ty(y));
    }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (spec.log_y) y0 = std::floor(y0), y1 = std::ceil(y1);
  if (x1 <= x0) x1 = x0 + 1;
  if (y1 <= y0) y1 = y0 + 1;

  constexpr double W = 640, H = 420, L = 80, R = 170, T = 40, B = 60;
  auto X = [&](double v) { return L + (tx(v) - x0) / (x1 - x0) * (W - L - R); };
  auto Y = [&](double v) { return H - B - (ty(v) - y0) / (y1 - y0) * (H - T - B); };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << px(W / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
    << escape_xml(spec.title) << "</text>\n";
  o << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
    << "\" fill=\"none\" stroke=\"black\"/>\n";

  // y ticks: decades on a log axis, five steps otherwise
  const int yticks = spec.log_y ? int(y1 - y0) : 5;
  for (int i = 0; i <= yticks; ++i) {
    const double tv = y0 + (y1 - y0) * i / yticks;
    const double yy = H - B - (tv - y0) / (y1 - y0) * (H - T - B);
    const std::string label = spec.log_y ? "1e" + std::to_string(int(std::lround(tv))) : format_number(tv);
    o << "<line x1=\"" << L << "\" y1=\"" << px(yy) << "\" x2=\"" << W - R << "\" y2=\"" << px(yy)
      << "\" stroke=\"#ddd\"/>\n";
    o << "<text x=\"" << L - 6 << "\" y=\"" << px(yy + 4) << "\" text-anchor=\"end\">" << label << "</text>\n";
  }
  for (int i = 0; i <= 5; ++i) {
    const double tv = x0 + (x1 - x0) * i / 5;
    const double xx = L + (tv - x0) / (x1 - x0) * (W - L - R);
    char label[32];
    std::snprintf(label, sizeof label, "%.3g", spec.log_x ? std::pow(10.0, tv) : tv);
    o << "<text x=\"" << px(xx) << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\">" << label
      << "</text>\n";
  }
  o << "<text x=\"" << px(L + (W - L - R) / 2) << "\" y=\"" << H - 16 << "\" text-anchor=\"middle\">"
    << escape_xml(spec.x_label) << "</text>\n";
  o << "<text transform=\"translate(18," << px(T + (H - T - B) / 2)
    << ") rotate(-90)\" text-anchor=\"middle\">" << escape_xml(spec.y_label) << "</text>\n";

  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& pts = series[order[i]];
    const char* color = kPalette[i % std::size(kPalette)];
    if (!pts.empty()) {
      o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t j = 0; j < pts.size(); ++j)
        o << (j ? " " : "") << px(X(pts[j].first)) << "," << px(Y(pts[j].second));
      o << "\"/>\n";
    }
    const double ly = T + 14 + 18 * double(i);
    o << "<line x1=\"" << W - R + 10 << "\" y1=\"" << px(ly - 4) << "\" x2=\"" << W - R + 30 << "\" y2=\""
      << px(ly - 4) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << W - R + 36 << "\" y=\"" << px(ly) << "\">" << escape_xml(order[i]) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

std::string git_blob_sha1(const std::string& content) {
  const std::string blob = "blob " + std::to_string(content.size()) + '\0' + content;
  unsigned char md[SHA_DIGEST_LENGTH];
  SHA1(reinterpret_cast<const unsigned char*>(blob.data()), blob.size(), md);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned char c : md) {
    out += hex[c >> 4];
    out += hex[c & 15];
  }
  return out;
}

nlohmann::ordered_json make_manifest(const std::string& command, const std::string& config_path,
                                     const std::string& config_text, unsigned long long seed) {
  nlohmann::ordered_json m;
  m["tool"] = "fsoacq";
  m["version"] = kToolVersion;
  m["command"] = command;
  m["config_path"] = config_path;
  m["config_sha1"] = git_blob_sha1(config_text);
  m["seed"] = seed;
  return m;
}

}  // namespace fsoacq
