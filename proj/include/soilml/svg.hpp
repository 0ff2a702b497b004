#pragma once

#include <string>
#include <vector>

namespace soilml::svg {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct Bar {
  std::string label;
  double value = 0.0;
  double error = 0.0;  // half-length of the whisker; 0 draws none
};

/// Polyline chart with axes, ticks, and a legend. Pure text out, no
/// external references, byte-stable for identical input.
std::string line_chart(const std::string& title, const std::string& x_label,
                       const std::string& y_label,
                       const std::vector<Series>& series, int width = 720,
                       int height = 480);

/// Vertical bars with optional error whiskers.
std::string bar_chart(const std::string& title, const std::string& y_label,
                      const std::vector<Bar>& bars, int width = 720,
                      int height = 480);

void write_file(const std::string& path, const std::string& content);

}  // namespace soilml::svg
