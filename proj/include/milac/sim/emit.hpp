// SPDX-License-Identifier: Apache-2.0
//
// milac-chanest: MIMO channel estimation with microwave linear analog
// computers (MiLACs).
//
// Result emission: deterministic CSV tables and self-contained SVG line
// plots.

#pragma once

#include <string>
#include <vector>

#include "milac/sim/experiment.hpp"

namespace milac::sim {

enum class PlotAxis { snr_db, n_rx };

/// CSV text: header `scheme,n_tx,n_rx,snr_db,metric,value,trials,stderr`,
/// UTF-8, LF line endings, 17 significant digits.
std::string to_csv(const std::vector<ResultRow>& rows);

/// Log-y line plot of one metric, one polyline per (scheme, size) series.
std::string to_svg(const std::vector<ResultRow>& rows,
                   const std::string& metric, PlotAxis x_axis,
                   const std::string& title);

/// Writes `<out_dir>/<base_name>.csv` / `.svg` per the requested format and
/// returns the written paths.
std::vector<std::string> emit_results(const std::vector<ResultRow>& rows,
                                      const std::string& out_dir,
                                      OutputFormat format,
                                      const std::string& base_name,
                                      const std::string& plot_metric,
                                      PlotAxis x_axis);

}  // namespace milac::sim
