#include "matra/config.hpp"

#include <functional>
#include <map>

#include "matra/textio.hpp"

namespace matra {
namespace {

std::string join_doubles(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ",";
    out += format_double(values[i], 6);
  }
  return out;
}

std::vector<double> parse_double_list(std::string_view value, std::string_view key) {
  std::vector<double> out;
  for (const std::string& tok : split_csv_line(value)) {
    if (tok.empty()) raise(Errc::ConfigBadValue, std::string(key) + ": empty list entry");
    out.push_back(parse_double(tok, key));
  }
  return out;
}

std::string join_bands(const std::vector<std::pair<double, double>>& bands) {
  std::string out;
  for (std::size_t i = 0; i < bands.size(); ++i) {
    if (i) out += ",";
    out += format_double(bands[i].first, 1) + "-" + format_double(bands[i].second, 1);
  }
  return out;
}

std::vector<std::pair<double, double>> parse_bands(std::string_view value, std::string_view key) {
  std::vector<std::pair<double, double>> out;
  for (const std::string& tok : split_csv_line(value)) {
    const std::size_t dash = tok.find('-');
    if (dash == std::string::npos)
      raise(Errc::ConfigBadValue, std::string(key) + ": bands look like LO-HI, got '" + tok + "'");
    out.emplace_back(parse_double(tok.substr(0, dash), key),
                     parse_double(tok.substr(dash + 1), key));
  }
  return out;
}

struct KeyHandler {
  std::function<void(PipelineConfig&, std::string_view)> set;
  std::function<std::string(const PipelineConfig&)> get;
};

const std::vector<std::pair<std::string, KeyHandler>>& handlers() {
  auto num = [](double PipelineConfig::* member, int decimals = 6) {
    return KeyHandler{
        [member](PipelineConfig& c, std::string_view v) { c.*member = parse_double(v, "config"); },
        [member, decimals](const PipelineConfig& c) { return format_double(c.*member, decimals); }};
  };
  auto integer = [](int PipelineConfig::* member) {
    return KeyHandler{[member](PipelineConfig& c, std::string_view v) {
                        c.*member = static_cast<int>(parse_long(v, "config"));
                      },
                      [member](const PipelineConfig& c) { return std::to_string(c.*member); }};
  };
  static const std::vector<std::pair<std::string, KeyHandler>> table = {
      {"frame_len", num(&PipelineConfig::frame_len)},
      {"hop", num(&PipelineConfig::hop)},
      {"bands",
       {[](PipelineConfig& c, std::string_view v) { c.bands = parse_bands(v, "bands"); },
        [](const PipelineConfig& c) { return join_bands(c.bands); }}},
      {"band_weights",
       {[](PipelineConfig& c, std::string_view v) {
          c.band_weights = parse_double_list(v, "band_weights");
        },
        [](const PipelineConfig& c) { return join_doubles(c.band_weights); }}},
      {"n_mels", integer(&PipelineConfig::n_mels)},
      {"n_mfcc", integer(&PipelineConfig::n_mfcc)},
      {"rise_sigma", num(&PipelineConfig::rise_sigma)},
      {"fall_sigma", num(&PipelineConfig::fall_sigma)},
      {"separation", num(&PipelineConfig::separation)},
      {"peak_threshold", num(&PipelineConfig::peak_threshold)},
      {"peak_threshold_rel", num(&PipelineConfig::peak_threshold_rel)},
      {"min_separation", num(&PipelineConfig::min_separation)},
      {"tolerance", num(&PipelineConfig::tolerance)},
      {"target_recall", num(&PipelineConfig::target_recall)},
      {"gap_penalty", num(&PipelineConfig::gap_penalty)},
      {"shift_weight", num(&PipelineConfig::shift_weight)},
      {"max_shift", num(&PipelineConfig::max_shift)},
      {"resample_rate", num(&PipelineConfig::resample_rate, 1)},
      {"model",
       {[](PipelineConfig& c, std::string_view v) { c.model = trim(v); },
        [](const PipelineConfig& c) { return c.model; }}},
  };
  return table;
}

}  // namespace

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [key, handler] : handlers()) keys.push_back(key);
  return keys;
}

void apply_config_value(PipelineConfig& config, std::string_view key, std::string_view value) {
  const std::string k = trim(key);
  for (const auto& [name, handler] : handlers()) {
    if (name == k) {
      try {
        handler.set(config, trim(value));
      } catch (const Error& e) {
        if (e.code() == Errc::ConfigBadValue) throw;
        raise(Errc::ConfigBadValue, k + " = '" + std::string(trim(value)) + "'");
      }
      return;
    }
  }
  raise(Errc::ConfigUnknownKey, "unknown config key '" + k + "'");
}

void validate(const PipelineConfig& c) {
  auto want = [&](bool ok, const std::string& msg) {
    if (!ok) raise(Errc::ConfigBadValue, msg);
  };
  want(c.hop > 0, "hop must be > 0");
  want(c.frame_len >= c.hop, "frame_len must be >= hop");
  want(!c.bands.empty(), "bands must not be empty");
  for (const auto& [lo, hi] : c.bands) want(lo >= 0 && lo < hi, "each band needs 0 <= lo < hi");
  want(c.band_weights.empty() || c.band_weights.size() == c.bands.size(),
       "band_weights must match the number of bands");
  for (double w : c.band_weights) want(w >= 0, "band weights must be >= 0");
  want(c.n_mels >= 2, "n_mels must be >= 2");
  want(c.n_mfcc >= 1 && c.n_mfcc <= c.n_mels, "n_mfcc must lie in [1, n_mels]");
  want(c.rise_sigma > 0 && c.fall_sigma > 0 && c.separation > 0,
       "kernel parameters must be > 0");
  want(c.peak_threshold_rel >= 0 && c.peak_threshold_rel <= 1,
       "peak_threshold_rel must lie in [0, 1]");
  want(c.min_separation >= c.hop, "min_separation must be >= hop");
  want(c.tolerance >= 0, "tolerance must be >= 0");
  want(c.target_recall > 0 && c.target_recall <= 1, "target_recall must lie in (0, 1]");
  want(c.gap_penalty >= 0, "gap_penalty must be >= 0");
  want(c.shift_weight >= 0, "shift_weight must be >= 0");
  want(c.max_shift > 0, "max_shift must be > 0");
  want(c.resample_rate >= 4000, "resample_rate must be >= 4000 Hz");
  want(c.model == "subband" || c.model == "mfcc", "model must be 'subband' or 'mfcc'");
}

PipelineConfig parse_config(const std::string& text) {
  PipelineConfig config;
  const std::vector<std::string> lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string line = trim(lines[i]);
    if (line.empty() || line[0] == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      raise(Errc::MalformedInput,
            "config line " + std::to_string(i + 1) + " is not 'key = value'");
    apply_config_value(config, line.substr(0, eq), line.substr(eq + 1));
  }
  validate(config);
  return config;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_text_file(path));
}

std::string dump_config(const PipelineConfig& config) {
  std::string out;
  for (const auto& [key, handler] : handlers())
    out += key + " = " + handler.get(config) + "\n";
  return out;
}

}  // namespace matra
