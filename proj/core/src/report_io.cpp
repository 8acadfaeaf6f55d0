#include "stochblow/report_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace stochblow {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

CsvTable::CsvTable(std::string config_hash, std::vector<std::string> columns)
    : hash_(std::move(config_hash)), columns_(std::move(columns)) {}

void CsvTable::add_row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_.size()) throw std::invalid_argument("CSV row width does not match the header");
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += cells[i];
  }
  rows_.push_back(std::move(line));
}

void CsvTable::add_numbers(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_number(v));
  add_row(cells);
}

std::string CsvTable::str() const {
  std::string out = "# config_hash=" + hash_ + ",schema_version=1\n";
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (i) out += ',';
    out += columns_[i];
  }
  out += '\n';
  for (const auto& r : rows_) {
    out += r;
    out += '\n';
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

std::string label(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

}  // namespace

std::string render_svg(const SvgSeries& s) {
  constexpr double W = 720, H = 440, left = 80, right = 30, top = 40, bottom = 60;
  const double pw = W - left - right, ph = H - top - bottom;

  auto ty = [&](double y) { return s.log_scale ? std::log10(y) : y; };
  auto usable = [&](double y) { return std::isfinite(y) && (!s.log_scale || y > 0.0); };

  double t0 = s.times.empty() ? 0.0 : s.times.front();
  double t1 = s.times.empty() ? 1.0 : s.times.back();
  if (s.marker && std::isfinite(*s.marker)) t1 = std::max(t1, *s.marker);
  if (!(t1 > t0)) t1 = t0 + 1.0;
  double y0 = std::numeric_limits<double>::infinity(), y1 = -y0;
  auto extend = [&](const std::vector<double>& v) {
    for (double y : v)
      if (usable(y)) {
        y0 = std::min(y0, ty(y));
        y1 = std::max(y1, ty(y));
      }
  };
  extend(s.mean);
  extend(s.lower);
  extend(s.upper);
  if (!std::isfinite(y0)) {
    y0 = 0.0;
    y1 = 1.0;
  }
  if (!(y1 > y0)) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  auto px = [&](double t) { return left + (t - t0) / (t1 - t0) * pw; };
  auto py = [&](double y) { return top + (1.0 - (ty(y) - y0) / (y1 - y0)) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
    << ' ' << H << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
    << s.title << "</text>\n";
  o << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"#444\"/>\n";

  for (int i = 0; i <= 5; ++i) {
    const double t = t0 + (t1 - t0) * i / 5.0;
    const double x = px(t);
    o << "<line x1=\"" << num(x) << "\" y1=\"" << top + ph << "\" x2=\"" << num(x) << "\" y2=\"" << top + ph + 5
      << "\" stroke=\"#444\"/>\n";
    o << "<text x=\"" << num(x) << "\" y=\"" << top + ph + 20
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << label(t) << "</text>\n";
    const double yv = y0 + (y1 - y0) * i / 5.0;
    const double y = top + (1.0 - i / 5.0) * ph;
    o << "<line x1=\"" << left - 5 << "\" y1=\"" << num(y) << "\" x2=\"" << left << "\" y2=\"" << num(y)
      << "\" stroke=\"#444\"/>\n";
    o << "<text x=\"" << left - 8 << "\" y=\"" << num(y + 4)
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
      << (s.log_scale ? "1e" + label(yv) : label(yv)) << "</text>\n";
  }
  o << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 15
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">t</text>\n";
  o << "<text x=\"18\" y=\"" << top + ph / 2 << "\" transform=\"rotate(-90 18 " << top + ph / 2
    << ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << s.y_label << "</text>\n";

  if (s.lower.size() == s.mean.size() && s.upper.size() == s.mean.size() && !s.mean.empty()) {
    std::string upper_pts, lower_pts;
    for (std::size_t k = 0; k < s.mean.size(); ++k) {
      if (!usable(s.upper[k])) continue;
      upper_pts += num(px(s.times[k])) + "," + num(py(s.upper[k])) + " ";
    }
    for (std::size_t k = s.mean.size(); k-- > 0;) {
      const double lo = usable(s.lower[k]) ? s.lower[k] : (s.log_scale ? std::pow(10.0, y0) : y0);
      if (!usable(s.upper[k])) continue;
      lower_pts += num(px(s.times[k])) + "," + num(py(lo)) + " ";
    }
    if (!upper_pts.empty())
      o << "<polygon points=\"" << upper_pts << lower_pts << "\" fill=\"#9ecae1\" fill-opacity=\"0.5\" stroke=\"none\"/>\n";
  }

  std::string line;
  for (std::size_t k = 0; k < s.mean.size() && k < s.times.size(); ++k)
    if (usable(s.mean[k])) line += num(px(s.times[k])) + "," + num(py(s.mean[k])) + " ";
  if (!line.empty()) o << "<polyline points=\"" << line << "\" fill=\"none\" stroke=\"#08519c\" stroke-width=\"1.5\"/>\n";

  if (s.marker && std::isfinite(*s.marker)) {
    const double x = px(*s.marker);
    o << "<line x1=\"" << num(x) << "\" y1=\"" << top << "\" x2=\"" << num(x) << "\" y2=\"" << top + ph
      << "\" stroke=\"#cb181d\" stroke-dasharray=\"6,4\"/>\n";
    o << "<text x=\"" << num(x - 4) << "\" y=\"" << top + 14
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#cb181d\">" << s.marker_label
      << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace stochblow
