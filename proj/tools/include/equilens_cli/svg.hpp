#pragma once

#include <optional>
#include <string>
#include <vector>

namespace equilens::cli {

struct ScatterPoint {
  double x = 0.0;
  double y = 0.0;
  double value = 0.0;  // colour source
};

enum class ColorScale {
  continuous,  // 8-stop viridis, linear between stops over [min, max] of the values
  categorical  // values rounded to integers, fixed 10-colour cycle
};

struct ScatterOptions {
  std::string title;
  std::string x_label = "PC1";
  std::string y_label = "PC2";
  std::string color_label;
  ColorScale scale = ColorScale::continuous;
};

// "#rrggbb" for a position t in [0, 1] on the continuous scale.
std::string viridis(double t);
// Colour of category `index` on the categorical cycle.
std::string category_color(long long index);

// Standalone SVG. Output bytes depend only on the inputs. The data range is
// padded by 5% on each side; a degenerate range becomes a unit box around
// its centre.
std::string svg_scatter(const std::vector<ScatterPoint>& points, const ScatterOptions& options);

}  // namespace equilens::cli
