#include "ritzgn/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace ritzgn {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::string>& header)
    : out_(out), columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
  out_ << '\n';
}

CsvWriter& CsvWriter::cell(double v) { return cell(format_double(v)); }

CsvWriter& CsvWriter::cell(long long v) { return cell(std::to_string(v)); }

CsvWriter& CsvWriter::cell(const std::string& v) {
  if (filled_ == columns_) throw DimensionError("CSV row has more cells than the header");
  out_ << (filled_ ? "," : "") << v;
  ++filled_;
  return *this;
}

void CsvWriter::end_row() {
  if (filled_ != columns_) throw DimensionError("CSV row has fewer cells than the header");
  out_ << '\n';
  filled_ = 0;
}

void write_trace_csv(std::ostream& out, const IterTrace& trace) {
  CsvWriter csv(out, {"iter", "loss", "grad_norm", "step_norm", "rank", "l2_err", "h1_err", "ms"});
  for (const auto& r : trace.records) {
    csv.cell(r.iter).cell(r.loss).cell(r.grad_norm).cell(r.step_norm).cell(r.rank).cell(r.l2_err).cell(r.h1_err).cell(
        r.ms);
    csv.end_row();
  }
}

void write_errors_csv(std::ostream& out, const ErrorReport& e) {
  CsvWriter csv(out, {"quantity", "value"});
  csv.cell(std::string("l2")).cell(e.l2).end_row();
  csv.cell(std::string("h1_semi")).cell(e.h1_semi).end_row();
  csv.cell(std::string("h1")).cell(e.h1).end_row();
  csv.cell(std::string("energy_norm")).cell(e.energy_norm).end_row();
  csv.cell(std::string("energy_gap")).cell(e.energy_gap).end_row();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << content;
  if (!out) throw Error("failed writing '" + path + "'");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void ensure_directory(const std::string& dir) {
  if (dir.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create directory '" + dir + "': " + ec.message());
}

std::string svg_plot(const std::vector<Series>& series, const std::string& title, const std::string& y_label,
                     bool log_y) {
  constexpr double W = 640, H = 400, L = 70, R = 150, T = 30, B = 40;
  const auto ty = [&](double y) { return log_y ? std::log10(y) : y; };
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.y[i]) || (log_y && s.y[i] <= 0.0)) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, ty(s.y[i]));
      y1 = std::max(y1, ty(s.y[i]));
    }
  }
  if (!(x1 >= x0)) x0 = 0, x1 = 1;
  if (!(y1 >= y0)) y0 = 0, y1 = 1;
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  const auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  const auto py = [&](double y) { return H - B - (ty(y) - y0) / (y1 - y0) * (H - T - B); };
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"18\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n";
  o << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
    << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  const auto label_y = [&](double v) { return log_y ? "1e" + format_double(std::round(v * 100) / 100) : format_double(v); };
  o << "<text x=\"" << L - 5 << "\" y=\"" << H - B << "\" text-anchor=\"end\" font-size=\"10\">" << label_y(y0)
    << "</text>\n";
  o << "<text x=\"" << L - 5 << "\" y=\"" << T + 10 << "\" text-anchor=\"end\" font-size=\"10\">" << label_y(y1)
    << "</text>\n";
  o << "<text x=\"" << L << "\" y=\"" << H - B + 15 << "\" font-size=\"10\">" << format_double(x0) << "</text>\n";
  o << "<text x=\"" << W - R << "\" y=\"" << H - B + 15 << "\" text-anchor=\"end\" font-size=\"10\">"
    << format_double(x1) << "</text>\n";
  o << "<text x=\"15\" y=\"" << (T + H - B) / 2 << "\" font-size=\"11\" transform=\"rotate(-90 15 " << (T + H - B) / 2
    << ")\" text-anchor=\"middle\">" << y_label << "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = colors[k % 6];
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.y[i]) || (log_y && s.y[i] <= 0.0)) continue;
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(s.x[i]), py(s.y[i]));
      o << buf;
    }
    o << "\"/>\n";
    o << "<text x=\"" << W - R + 10 << "\" y=\"" << T + 15 * (k + 1) << "\" font-size=\"11\" fill=\"" << color
      << "\">" << s.label << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

void write_theta(const std::string& path, const ParamVector& theta) {
  std::ostringstream o;
  for (Index i = 0; i < theta.size(); ++i) o << format_double(theta[i]) << '\n';
  write_text_file(path, o.str());
}

ParamVector read_theta(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    char* end = nullptr;
    const double v = std::strtod(line.c_str(), &end);
    if (end == line.c_str()) throw ConfigError("bad parameter value '" + line + "' in " + path);
    values.push_back(v);
  }
  ParamVector theta(static_cast<Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) theta[static_cast<Index>(i)] = values[i];
  return theta;
}

}  // namespace ritzgn
