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


// Minimal hand-written SVG figures: a bar chart and a 2x2 confusion heatmap.

#ifndef CVDRISK_SVG_H_
#define CVDRISK_SVG_H_

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cvdrisk/metrics.h"

namespace cvdrisk::svg {

// Escapes &, <, >, " and ' for use in text nodes and attributes.
std::string EscapeXml(std::string_view text);

// One bar per (label, value). Values must be finite and >= 0.
std::string BarChart(std::string_view title,
                     const std::vector<std::pair<std::string, double>>& bars);

// Rows are the true class, columns the predicted class, positive first.
std::string ConfusionHeatmap(const ConfusionMatrix& cm);

}  // namespace cvdrisk::svg

#endif  // CVDRISK_SVG_H_
