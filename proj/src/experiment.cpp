// SPDX-License-Identifier: Apache-2.0
//
// milac-chanest: MIMO channel estimation with microwave linear analog
// computers (MiLACs).

#include "milac/sim/experiment.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace milac::sim {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream stream(s);
  std::string item;
  while (std::getline(stream, item, sep)) parts.push_back(trim(item));
  return parts;
}

std::int64_t to_int(const std::string& field, const std::string& text) {
  std::int64_t v = 0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw ConfigError(field, "expected an integer, got '" + text + "'");
  return v;
}

std::uint64_t to_uint(const std::string& field, const std::string& text) {
  std::uint64_t v = 0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw ConfigError(field, "expected an unsigned integer, got '" + text + "'");
  return v;
}

double to_double(const std::string& field, const std::string& text) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(field, "expected a number, got '" + text + "'");
  }
}

std::vector<double> default_snr_grid() {
  std::vector<double> grid;
  for (double snr = -10.0; snr <= 30.0 + 1e-9; snr += 5.0) grid.push_back(snr);
  return grid;
}

}  // namespace

ExperimentConfig ExperimentConfig::defaults_for(SweepKind kind) {
  ExperimentConfig config;
  config.kind = kind;
  config.snr_db = default_snr_grid();
  switch (kind) {
    case SweepKind::nmse_vs_snr:
      config.sizes = {{8, 8}, {16, 16}};
      break;
    case SweepKind::complexity_vs_nrx:
      for (Index n_tx : {Index(16), Index(64)})
        for (Index n_rx : {Index(256), Index(512), Index(1024), Index(2048)})
          config.sizes.emplace_back(n_tx, n_rx);
      break;
    case SweepKind::papr:
      config.sizes = {{16, 16}};
      break;
    case SweepKind::verify:
      config.sizes = {{8, 8}};
      config.snr_db = {0.0, 10.0};
      break;
  }
  return config;
}

void ExperimentConfig::validate() const {
  if (sizes.empty()) throw ConfigError("sizes", "at least one NTxNR pair");
  for (const auto& [n_tx, n_rx] : sizes) {
    if (n_tx < 1 || n_rx < 1)
      throw ConfigError("sizes", "antenna counts must be >= 1");
    if (l_tx > n_tx)
      throw ConfigError("l_tx", "must not exceed the smallest n_tx in sizes");
  }
  if (l_tx < 1) throw ConfigError("l_tx", "must be >= 1");
  if (kind != SweepKind::complexity_vs_nrx) {
    if (snr_db.empty()) throw ConfigError("snr", "SNR grid must be nonempty");
    for (double s : snr_db)
      if (!std::isfinite(s)) throw ConfigError("snr", "SNR values must be finite");
  }
  if (trials < 1) throw ConfigError("trials", "must be >= 1");
  if (schemes.empty()) throw ConfigError("schemes", "must be nonempty");
  if (!(eps_tx >= 0.0 && eps_tx < 1.0))
    throw ConfigError("eps_tx", "must lie in [0, 1)");
  if (!(eps_rx >= 0.0 && eps_rx < 1.0))
    throw ConfigError("eps_rx", "must lie in [0, 1)");
  if (!(p_tx > 0.0)) throw ConfigError("p_tx", "must be > 0");
  if (workers < 0) throw ConfigError("workers", "must be >= 0");
  if (out_dir.empty()) throw ConfigError("out", "output directory is empty");
}

std::vector<std::pair<Index, Index>> parse_sizes(const std::string& text) {
  std::vector<std::pair<Index, Index>> sizes;
  for (const auto& part : split(text, ',')) {
    if (part.empty()) continue;
    const auto x = part.find('x');
    if (x == std::string::npos)
      throw ConfigError("sizes", "expected NTxNR (e.g. 16x16), got '" + part + "'");
    sizes.emplace_back(
        static_cast<Index>(to_int("sizes", trim(part.substr(0, x)))),
        static_cast<Index>(to_int("sizes", trim(part.substr(x + 1)))));
  }
  if (sizes.empty()) throw ConfigError("sizes", "empty size list");
  return sizes;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> values;
  for (const auto& part : split(text, ','))
    if (!part.empty()) values.push_back(to_double("snr", part));
  return values;
}

std::vector<Scheme> parse_scheme_list(const std::string& text) {
  std::vector<Scheme> schemes;
  for (const auto& part : split(text, ',')) {
    if (part.empty()) continue;
    try {
      schemes.push_back(parse_scheme(part));
    } catch (const std::invalid_argument& e) {
      throw ConfigError("schemes", e.what());
    }
  }
  return schemes;
}

OutputFormat parse_format(const std::string& text) {
  if (text == "csv") return OutputFormat::csv;
  if (text == "svg") return OutputFormat::svg;
  if (text == "both") return OutputFormat::both;
  throw ConfigError("format", "expected csv, svg or both, got '" + text + "'");
}

void apply_key_value(ExperimentConfig& config, const std::string& key,
                     const std::string& value) {
  if (key == "trials")
    config.trials = static_cast<Index>(to_int(key, value));
  else if (key == "seed")
    config.base_seed = to_uint(key, value);
  else if (key == "out")
    config.out_dir = value;
  else if (key == "schemes")
    config.schemes = parse_scheme_list(value);
  else if (key == "snr")
    config.snr_db = parse_double_list(value);
  else if (key == "sizes" || key == "size")
    config.sizes = parse_sizes(value);
  else if (key == "workers")
    config.workers = static_cast<Index>(to_int(key, value));
  else if (key == "format")
    config.format = parse_format(value);
  else if (key == "eps_tx")
    config.eps_tx = to_double(key, value);
  else if (key == "eps_rx")
    config.eps_rx = to_double(key, value);
  else if (key == "p_tx")
    config.p_tx = to_double(key, value);
  else if (key == "l_tx")
    config.l_tx = static_cast<Index>(to_int(key, value));
  else
    throw ConfigError(key, "unknown configuration key");
}

void apply_config_file(ExperimentConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("config", "cannot open config file '" + path + "'");
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config", "line " + std::to_string(line_no) +
                                      ": expected key = value");
    apply_key_value(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

}  // namespace milac::sim
