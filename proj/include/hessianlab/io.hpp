// Report serialization: GapReport / SearchResult JSON, frontier CSV, a
// minimal SVG line plot and the flat key = value run-config format.
#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "hessianlab/concavity.hpp"
#include "hessianlab/search.hpp"

namespace hessianlab {

nlohmann::json gap_report_to_json(const GapReport& rep);
GapReport gap_report_from_json(const nlohmann::json& j);

// recomputes the gap of a serialized witness from scratch
double recheck_gap(const GapReport& rep);

nlohmann::json search_result_to_json(const SearchResult& result);
nlohmann::json threshold_scan_to_json(const ThresholdScanResult& scan);

std::string frontier_csv(const ThresholdScanResult& scan);

// single-polyline SVG plot; ys on a symlog-ish scale are the caller's job
std::string svg_line_plot(const std::vector<double>& xs,
                          const std::vector<double>& ys, const std::string& title);

// flat "key = value" configuration with optional [section] headers that
// prefix keys as "section.key"; comments start with '#'
using Config = std::map<std::string, std::string>;

Config parse_config(const std::string& text);
std::string serialize_config(const Config& cfg);

double cfg_num(const Config& c, const std::string& key, double fallback);
long cfg_int(const Config& c, const std::string& key, long fallback);
std::string cfg_str(const Config& c, const std::string& key,
                    const std::string& fallback);
bool cfg_bool(const Config& c, const std::string& key, bool fallback);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace hessianlab
