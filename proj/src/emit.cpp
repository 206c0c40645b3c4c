// SPDX-License-Identifier: Apache-2.0
//
// milac-chanest: MIMO channel estimation with microwave linear analog
// computers (MiLACs).

#include "milac/sim/emit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>

namespace milac::sim {

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v + 0.0);
  return buf;
}

// One polyline per scheme and size; when n_rx is the x axis it must not be
// part of the grouping key or every sample would become its own series.
std::string series_label(const ResultRow& r, PlotAxis x_axis) {
  if (x_axis == PlotAxis::n_rx)
    return r.scheme + " n_tx=" + std::to_string(r.n_tx);
  return r.scheme + " " + std::to_string(r.n_tx) + "x" +
         std::to_string(r.n_rx);
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace

std::string to_csv(const std::vector<ResultRow>& rows) {
  if (rows.empty()) throw std::invalid_argument("to_csv: empty result table");
  std::string csv = "scheme,n_tx,n_rx,snr_db,metric,value,trials,stderr\n";
  for (const auto& r : rows) {
    csv += r.scheme;
    csv += ',' + std::to_string(r.n_tx);
    csv += ',' + std::to_string(r.n_rx);
    csv += ',' + g17(r.snr_db);
    csv += ',' + r.metric;
    csv += ',' + g17(r.value);
    csv += ',' + std::to_string(r.trials);
    csv += ',' + g17(r.std_error);
    csv += '\n';
  }
  return csv;
}

std::string to_svg(const std::vector<ResultRow>& rows,
                   const std::string& metric, PlotAxis x_axis,
                   const std::string& title) {
  std::map<std::string, std::vector<std::pair<double, double>>> series;
  double x_min = 0, x_max = 0, y_min_pos = 0, y_max = 0;
  bool first = true;
  bool has_positive = false;
  for (const auto& r : rows) {
    if (r.metric != metric) continue;
    const double x =
        x_axis == PlotAxis::snr_db ? r.snr_db : static_cast<double>(r.n_rx);
    series[series_label(r, x_axis)].emplace_back(x, r.value);
    if (first || x < x_min) x_min = x;
    if (first || x > x_max) x_max = x;
    if (r.value > 0) {
      if (!has_positive || r.value < y_min_pos) y_min_pos = r.value;
      if (!has_positive || r.value > y_max) y_max = r.value;
      has_positive = true;
    }
    first = false;
  }
  if (series.empty())
    throw std::invalid_argument("to_svg: no rows carry metric '" + metric + "'");
  if (!has_positive) {
    y_min_pos = 1.0;
    y_max = 10.0;
  }
  if (x_max == x_min) x_max = x_min + 1.0;

  // Zero values cannot sit on a log axis; draw them one decade below the
  // smallest positive value (the legend keeps the honest number in the CSV).
  const double y_floor = y_min_pos / 10.0;
  const double ly_min = std::floor(std::log10(y_floor));
  const double ly_max = std::ceil(std::log10(y_max * 1.0000001));

  const double width = 720, height = 480;
  const double ml = 80, mr = 200, mt = 50, mb = 60;
  const double pw = width - ml - mr, ph = height - mt - mb;
  const auto sx = [&](double x) { return ml + (x - x_min) / (x_max - x_min) * pw; };
  const auto sy = [&](double v) {
    const double ly = std::log10(std::max(v, y_floor));
    return mt + (ly_max - ly) / (ly_max - ly_min) * ph;
  };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + g17(width) +
         "\" height=\"" + g17(height) + "\" viewBox=\"0 0 " + g17(width) +
         " " + g17(height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + g17(ml) + "\" y=\"28\" font-family=\"sans-serif\" "
         "font-size=\"16\">" + title + "</text>\n";

  // axes
  svg += "<line x1=\"" + g17(ml) + "\" y1=\"" + g17(mt + ph) + "\" x2=\"" +
         g17(ml + pw) + "\" y2=\"" + g17(mt + ph) +
         "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + g17(ml) + "\" y1=\"" + g17(mt) + "\" x2=\"" + g17(ml) +
         "\" y2=\"" + g17(mt + ph) + "\" stroke=\"black\"/>\n";

  // y decade gridlines
  for (double ly = ly_min; ly <= ly_max + 1e-9; ly += 1.0) {
    const double y = mt + (ly_max - ly) / (ly_max - ly_min) * ph;
    svg += "<line x1=\"" + g17(ml) + "\" y1=\"" + g17(y) + "\" x2=\"" +
           g17(ml + pw) + "\" y2=\"" + g17(y) +
           "\" stroke=\"#dddddd\"/>\n";
    char label[32];
    std::snprintf(label, sizeof(label), "1e%+03d", static_cast<int>(ly));
    svg += "<text x=\"" + g17(ml - 8) + "\" y=\"" + g17(y + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"11\">" + label + "</text>\n";
  }

  // x ticks: use the union of sample positions (bounded count)
  std::vector<double> xticks;
  for (const auto& [key, pts] : series)
    for (const auto& [x, y] : pts) xticks.push_back(x);
  std::sort(xticks.begin(), xticks.end());
  xticks.erase(std::unique(xticks.begin(), xticks.end()), xticks.end());
  if (xticks.size() > 12) {
    std::vector<double> sparse;
    const std::size_t step = (xticks.size() + 11) / 12;
    for (std::size_t i = 0; i < xticks.size(); i += step)
      sparse.push_back(xticks[i]);
    xticks = sparse;
  }
  for (double x : xticks) {
    const double px = sx(x);
    svg += "<line x1=\"" + g17(px) + "\" y1=\"" + g17(mt + ph) + "\" x2=\"" +
           g17(px) + "\" y2=\"" + g17(mt + ph + 5) + "\" stroke=\"black\"/>\n";
    char label[32];
    std::snprintf(label, sizeof(label), "%g", x);
    svg += "<text x=\"" + g17(px) + "\" y=\"" + g17(mt + ph + 20) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"11\">" + label + "</text>\n";
  }
  svg += "<text x=\"" + g17(ml + pw / 2) + "\" y=\"" + g17(height - 16) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\">" +
         (x_axis == PlotAxis::snr_db ? std::string("SNR [dB]")
                                     : std::string("receive antennas")) +
         "</text>\n";

  // series
  int color = 0;
  double legend_y = mt + 10;
  for (auto& [label, pts] : series) {
    std::sort(pts.begin(), pts.end());
    const char* stroke = kPalette[color % 8];
    std::string points;
    for (const auto& [x, v] : pts)
      points += g17(sx(x)) + "," + g17(sy(v)) + " ";
    svg += "<polyline fill=\"none\" stroke=\"" + std::string(stroke) +
           "\" stroke-width=\"2\" points=\"" + points + "\"/>\n";
    for (const auto& [x, v] : pts)
      svg += "<circle cx=\"" + g17(sx(x)) + "\" cy=\"" + g17(sy(v)) +
             "\" r=\"3\" fill=\"" + stroke + "\"/>\n";
    svg += "<rect x=\"" + g17(ml + pw + 14) + "\" y=\"" + g17(legend_y - 9) +
           "\" width=\"14\" height=\"4\" fill=\"" + stroke + "\"/>\n";
    const bool all_zero = std::all_of(pts.begin(), pts.end(),
                                      [](const auto& p) { return p.second == 0; });
    svg += "<text x=\"" + g17(ml + pw + 34) + "\" y=\"" + g17(legend_y - 3) +
           "\" font-family=\"sans-serif\" font-size=\"12\">" + label +
           (all_zero ? " (= 0)" : "") + "</text>\n";
    legend_y += 18;
    ++color;
  }
  svg += "</svg>\n";
  return svg;
}

std::vector<std::string> emit_results(const std::vector<ResultRow>& rows,
                                      const std::string& out_dir,
                                      OutputFormat format,
                                      const std::string& base_name,
                                      const std::string& plot_metric,
                                      PlotAxis x_axis) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::string> written;
  if (format == OutputFormat::csv || format == OutputFormat::both) {
    const std::string path = out_dir + "/" + base_name + ".csv";
    write_file(path, to_csv(rows));
    written.push_back(path);
  }
  if (format == OutputFormat::svg || format == OutputFormat::both) {
    const std::string path = out_dir + "/" + base_name + ".svg";
    write_file(path, to_svg(rows, plot_metric, x_axis, base_name));
    written.push_back(path);
  }
  return written;
}

}  // namespace milac::sim
