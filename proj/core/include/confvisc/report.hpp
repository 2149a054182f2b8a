#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "confvisc/types.hpp"

namespace confvisc {

/// %.17g; enough digits for strtod to give back the same double.
std::string format_double(double v);

/// Plain CSV builder. Every row must have as many cells as the header.
class CsvTable {
public:
  explicit CsvTable(std::vector<std::string> header);

  CsvTable& row();
  CsvTable& cell(double v);
  CsvTable& cell(long long v);
  CsvTable& cell(int v) { return cell(static_cast<long long>(v)); }
  CsvTable& cell(std::size_t v) { return cell(static_cast<long long>(v)); }
  CsvTable& cell(std::string_view v);
  /// One cell per component.
  CsvTable& cells(const Vec& v);

  std::string str() const;

private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Header names prefix0 .. prefix{n-1}.
std::vector<std::string> axis_columns(std::string_view prefix, int n);

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
};

/// Self-contained SVG line chart.
std::string svg_line_plot(const PlotSpec& spec, const std::vector<PlotSeries>& series);

void write_text(const std::filesystem::path& path, std::string_view content);
std::string read_text(const std::filesystem::path& path);

}  // namespace confvisc
