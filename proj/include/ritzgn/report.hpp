#pragma once

// CSV and SVG emission. CSV: header row, comma separated, LF endings,
// doubles printed with %.17g.

#include "ritzgn/metrics.hpp"
#include "ritzgn/optimize.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace ritzgn {

[[nodiscard]] std::string format_double(double v);

class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::vector<std::string>& header);
  CsvWriter& cell(double v);
  CsvWriter& cell(long long v);
  CsvWriter& cell(int v) { return cell(static_cast<long long>(v)); }
  CsvWriter& cell(std::size_t v) { return cell(static_cast<long long>(v)); }
  CsvWriter& cell(const std::string& v);
  void end_row();

 private:
  std::ostream& out_;
  std::size_t columns_;
  std::size_t filled_ = 0;
};

/// iter,loss,grad_norm,step_norm,rank,l2_err,h1_err,ms
void write_trace_csv(std::ostream& out, const IterTrace& trace);

/// quantity,value rows for every ErrorReport field.
void write_errors_csv(std::ostream& out, const ErrorReport& e);

void write_text_file(const std::string& path, const std::string& content);
[[nodiscard]] std::string read_text_file(const std::string& path);

/// Creates the directory (and parents) if needed.
void ensure_directory(const std::string& dir);

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Minimal line plot: axes, min/max tick labels, one polyline per series.
/// Non-positive values are dropped when log_y is set.
[[nodiscard]] std::string svg_plot(const std::vector<Series>& series, const std::string& title,
                                   const std::string& y_label, bool log_y);

/// θ as one %.17g value per line.
void write_theta(const std::string& path, const ParamVector& theta);
[[nodiscard]] ParamVector read_theta(const std::string& path);

}  // namespace ritzgn
