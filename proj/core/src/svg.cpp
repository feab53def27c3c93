// Copyright 2026 The Decoy Authors
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

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "decoy/bench.hpp"
#include "decoy/io.hpp"

// Hand-written SVG; fixed canvas so identical rows give identical bytes.

namespace decoy {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 180.0;  // legend column
constexpr double kTop = 40.0;
constexpr double kBottom = 55.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v == 0.0 ? 0.0 : v);
  return buf;
}

std::string escape(const std::string& s) {
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

struct Series {
  std::string name;
  std::string color;
  bool dashed = false;
  std::vector<std::pair<double, double>> points;
};

// Mean of `field` per threshold, over every row that has both values.
template <typename Get>
std::vector<std::pair<double, double>> averaged(const std::vector<const ResultRow*>& rows, Get get) {
  std::map<double, std::pair<double, int>> acc;
  for (const ResultRow* r : rows) {
    const std::optional<double> y = get(*r);
    if (!r->threshold_frac || !y || !std::isfinite(*y)) continue;
    auto& slot = acc[*r->threshold_frac];
    slot.first += *y;
    slot.second += 1;
  }
  std::vector<std::pair<double, double>> out;
  for (const auto& [x, s] : acc) out.emplace_back(x, s.first / s.second);
  return out;
}

}  // namespace

std::string render_svg(const std::vector<ResultRow>& rows, const std::string& title) {
  std::vector<const ResultRow*> ok;
  for (const ResultRow& r : rows) {
    if (r.error.empty()) ok.push_back(&r);
  }

  std::vector<Series> series;
  // The threshold line is observer-independent; take it from the first observer only.
  std::set<std::string> observers;
  for (const ResultRow* r : ok) observers.insert(r->observer);
  std::vector<const ResultRow*> first_observer;
  if (!observers.empty()) {
    for (const ResultRow* r : ok) {
      if (r->observer == *observers.begin()) first_observer.push_back(r);
    }
  }
  series.push_back({"Reward Threshold", kPalette[0], false,
                    averaged(first_observer, [](const ResultRow& r) { return r.achieved_return; })});
  std::size_t color = 1;
  for (const std::string& obs : observers) {
    std::vector<const ResultRow*> subset;
    for (const ResultRow* r : ok) {
      if (r->observer == obs) subset.push_back(r);
    }
    series.push_back({"IRL (" + obs + ")", kPalette[color++ % std::size(kPalette)], false,
                      averaged(subset, [](const ResultRow& r) { return r.irl_rollout_return; })});
  }
  double e_star_sum = 0.0;
  int e_star_n = 0;
  for (const ResultRow* r : first_observer) {
    if (r->e_star) {
      e_star_sum += *r->e_star;
      ++e_star_n;
    }
  }
  std::optional<double> e_star;
  if (e_star_n > 0) e_star = e_star_sum / e_star_n;

  double y_lo = std::numeric_limits<double>::infinity();
  double y_hi = -std::numeric_limits<double>::infinity();
  for (const Series& s : series) {
    for (const auto& p : s.points) {
      y_lo = std::min(y_lo, p.second);
      y_hi = std::max(y_hi, p.second);
    }
  }
  if (e_star) {
    y_lo = std::min(y_lo, *e_star);
    y_hi = std::max(y_hi, *e_star);
  }
  if (!std::isfinite(y_lo)) {
    y_lo = 0.0;
    y_hi = 1.0;
  }
  if (y_hi - y_lo < 1e-12) {
    y_lo -= 0.5;
    y_hi += 0.5;
  }
  const double pad = 0.05 * (y_hi - y_lo);
  y_lo -= pad;
  y_hi += pad;

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + x * plot_w; };
  auto py = [&](double y) { return kTop + (y_hi - y) / (y_hi - y_lo) * plot_h; };

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " + fmt("%.0f", kWidth) + " " +
         fmt("%.0f", kHeight) + "\" width=\"" + fmt("%.0f", kWidth) + "\" height=\"" + fmt("%.0f", kHeight) +
         "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out += "<rect x=\"0\" y=\"0\" width=\"" + fmt("%.0f", kWidth) + "\" height=\"" + fmt("%.0f", kHeight) +
         "\" fill=\"white\"/>\n";
  out += "<text x=\"" + fmt("%.1f", kLeft + plot_w / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" +
         escape(title) + "</text>\n";

  // Axes and ticks.
  out += "<g stroke=\"#333\" fill=\"none\">\n";
  out += "<rect x=\"" + fmt("%.1f", kLeft) + "\" y=\"" + fmt("%.1f", kTop) + "\" width=\"" + fmt("%.1f", plot_w) +
         "\" height=\"" + fmt("%.1f", plot_h) + "\"/>\n";
  out += "</g>\n<g fill=\"#333\">\n";
  for (int i = 0; i <= 5; ++i) {
    const double x = i / 5.0;
    out += "<line x1=\"" + fmt("%.1f", px(x)) + "\" y1=\"" + fmt("%.1f", kTop + plot_h) + "\" x2=\"" +
           fmt("%.1f", px(x)) + "\" y2=\"" + fmt("%.1f", kTop + plot_h + 5) + "\" stroke=\"#333\"/>\n";
    out += "<text x=\"" + fmt("%.1f", px(x)) + "\" y=\"" + fmt("%.1f", kTop + plot_h + 18) +
           "\" text-anchor=\"middle\">" + fmt("%.1f", x) + "</text>\n";
    const double y = y_lo + (y_hi - y_lo) * i / 5.0;
    out += "<line x1=\"" + fmt("%.1f", kLeft - 5) + "\" y1=\"" + fmt("%.1f", py(y)) + "\" x2=\"" +
           fmt("%.1f", kLeft) + "\" y2=\"" + fmt("%.1f", py(y)) + "\" stroke=\"#333\"/>\n";
    out += "<text x=\"" + fmt("%.1f", kLeft - 8) + "\" y=\"" + fmt("%.1f", py(y) + 4) + "\" text-anchor=\"end\">" +
           fmt("%.3g", y) + "</text>\n";
  }
  out += "<text x=\"" + fmt("%.1f", kLeft + plot_w / 2) + "\" y=\"" + fmt("%.1f", kHeight - 12) +
         "\" text-anchor=\"middle\">Reward threshold (fraction of range)</text>\n";
  out += "<text x=\"16\" y=\"" + fmt("%.1f", kTop + plot_h / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
         fmt("%.1f", kTop + plot_h / 2) + ")\">Expected reward</text>\n";
  out += "</g>\n";

  if (e_star) {
    out += "<line x1=\"" + fmt("%.1f", kLeft) + "\" y1=\"" + fmt("%.2f", py(*e_star)) + "\" x2=\"" +
           fmt("%.1f", kLeft + plot_w) + "\" y2=\"" + fmt("%.2f", py(*e_star)) +
           "\" stroke=\"#555\" stroke-dasharray=\"6 4\"/>\n";
  }
  for (const Series& s : series) {
    if (s.points.empty()) continue;
    std::string pts;
    for (const auto& p : s.points) pts += (pts.empty() ? "" : " ") + fmt("%.2f", px(p.first)) + "," + fmt("%.2f", py(p.second));
    out += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"2\" points=\"" + pts + "\"/>\n";
    for (const auto& p : s.points) {
      out += "<circle cx=\"" + fmt("%.2f", px(p.first)) + "\" cy=\"" + fmt("%.2f", py(p.second)) + "\" r=\"3\" fill=\"" +
             s.color + "\"/>\n";
    }
  }

  // Legend.
  double ly = kTop + 10;
  const double lx = kLeft + plot_w + 15;
  auto legend = [&](const std::string& name, const std::string& color, bool dashed) {
    out += "<line x1=\"" + fmt("%.1f", lx) + "\" y1=\"" + fmt("%.1f", ly) + "\" x2=\"" + fmt("%.1f", lx + 22) +
           "\" y2=\"" + fmt("%.1f", ly) + "\" stroke=\"" + color + "\" stroke-width=\"2\"" +
           (dashed ? " stroke-dasharray=\"6 4\"" : "") + "/>\n";
    out += "<text x=\"" + fmt("%.1f", lx + 28) + "\" y=\"" + fmt("%.1f", ly + 4) + "\">" + escape(name) + "</text>\n";
    ly += 20;
  };
  for (const Series& s : series) legend(s.name, s.color, s.dashed);
  if (e_star) legend("Optimal (E*)", "#555", true);
  out += "</svg>\n";
  return out;
}

std::vector<std::string> render_plot(const std::vector<ResultRow>& rows, const std::string& out_dir) {
  // Group keys in first-appearance order. The anti-reward is part of the
  // planner's identity: mm with two kinds gives two plots.
  using Key = std::pair<std::string, std::string>;
  std::vector<Key> keys;
  std::map<Key, std::vector<ResultRow>> groups;
  for (const ResultRow& r : rows) {
    const Key key{r.env_name, r.antireward_kind.empty() ? r.planner : r.planner + "_" + r.antireward_kind};
    if (!groups.count(key)) keys.push_back(key);
    groups[key].push_back(r);
  }
  std::vector<std::string> written;
  for (const auto& key : keys) {
    std::string stem = key.first + "__" + key.second;
    for (char& c : stem) {
      if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-') c = '_';
    }
    const std::string path = out_dir + "/" + stem + ".svg";
    io::write_file(path, render_svg(groups[key], key.first + " / " + key.second));
    written.push_back(path);
  }
  return written;
}

}  // namespace decoy
