// Copyright 2026 The cvdrisk Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "cvdrisk/svg.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "cvdrisk/error.h"

namespace cvdrisk::svg {
namespace {

// Fixed-precision numbers keep output byte-stable across platforms.
std::string Num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string Header(double width, double height) {
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + Num(width) + "\" height=\"" +
         Num(height) + "\" viewBox=\"0 0 " + Num(width) + " " + Num(height) + "\">\n"
         "<rect x=\"0\" y=\"0\" width=\"" + Num(width) + "\" height=\"" + Num(height) +
         "\" fill=\"#ffffff\"/>\n";
}

std::string Text(double x, double y, std::string_view anchor, std::string_view body,
                 int size = 12) {
  return "<text x=\"" + Num(x) + "\" y=\"" + Num(y) + "\" font-family=\"sans-serif\" font-size=\"" +
         std::to_string(size) + "\" text-anchor=\"" + std::string(anchor) + "\">" +
         EscapeXml(body) + "</text>\n";
}

std::string Rect(double x, double y, double w, double h, std::string_view fill) {
  return "<rect x=\"" + Num(x) + "\" y=\"" + Num(y) + "\" width=\"" + Num(w) + "\" height=\"" +
         Num(h) + "\" fill=\"" + std::string(fill) + "\" stroke=\"#333333\"/>\n";
}

}  // namespace

std::string EscapeXml(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string BarChart(std::string_view title,
                     const std::vector<std::pair<std::string, double>>& bars) {
  double max_value = 0.0;
  for (const auto& [label, v] : bars) {
    if (!std::isfinite(v) || v < 0.0) {
      throw Error(ErrorCode::kInvalidArgument, "svg: bar values must be finite and >= 0");
    }
    max_value = std::max(max_value, v);
  }
  const double left = 60, top = 40, plot_h = 240, bar_w = 40, gap = 12;
  const double plot_w = std::max(1.0, static_cast<double>(bars.size())) * (bar_w + gap) + gap;
  const double width = left + plot_w + 20, height = top + plot_h + 50;

  std::string out = Header(width, height);
  out += Text(width / 2, 24, "middle", title, 14);
  out += "<line x1=\"" + Num(left) + "\" y1=\"" + Num(top + plot_h) + "\" x2=\"" +
         Num(left + plot_w) + "\" y2=\"" + Num(top + plot_h) + "\" stroke=\"#333333\"/>\n";
  out += Text(left - 6, top + plot_h, "end", "0");
  out += Text(left - 6, top + 10, "end", Num(max_value));
  for (size_t i = 0; i < bars.size(); ++i) {
    const auto& [label, v] = bars[i];
    const double h = max_value > 0 ? plot_h * v / max_value : 0.0;
    const double x = left + gap + static_cast<double>(i) * (bar_w + gap);
    out += Rect(x, top + plot_h - h, bar_w, h, "#4477aa");
    out += Text(x + bar_w / 2, top + plot_h + 16, "middle", label, 10);
  }
  out += "</svg>\n";
  return out;
}

std::string ConfusionHeatmap(const ConfusionMatrix& cm) {
  const uint64_t cells[2][2] = {{cm.tp, cm.fn}, {cm.fp, cm.tn}};
  const uint64_t peak = std::max({cm.tp, cm.fn, cm.fp, cm.tn, uint64_t{1}});
  const double left = 100, top = 60, cell = 100;
  const double width = left + 2 * cell + 20, height = top + 2 * cell + 40;

  std::string out = Header(width, height);
  out += Text(width / 2, 24, "middle", "Confusion matrix", 14);
  const char* names[2] = {"high (1)", "low (0)"};
  for (int i = 0; i < 2; ++i) {
    out += Text(left + cell * i + cell / 2, top - 8, "middle", std::string("pred ") + names[i]);
    out += Text(left - 8, top + cell * i + cell / 2 + 4, "end", std::string("true ") + names[i]);
  }
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      const double t = static_cast<double>(cells[r][c]) / static_cast<double>(peak);
      // White to dark blue.
      const int red = static_cast<int>(std::lround(255 - t * (255 - 0x22)));
      const int green = static_cast<int>(std::lround(255 - t * (255 - 0x55)));
      const int blue = static_cast<int>(std::lround(255 - t * (255 - 0x99)));
      char fill[8];
      std::snprintf(fill, sizeof(fill), "#%02x%02x%02x", red, green, blue);
      const double x = left + cell * c, y = top + cell * r;
      out += Rect(x, y, cell, cell, fill);
      out += Text(x + cell / 2, y + cell / 2 + 6, "middle", std::to_string(cells[r][c]), 18);
    }
  }
  out += "</svg>\n";
  return out;
}

}  // namespace cvdrisk::svg
