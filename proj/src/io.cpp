#include "hessianlab/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace hessianlab {

using nlohmann::json;

json gap_report_to_json(const GapReport& rep) {
  json j;
  j["inequality"] = rep.inequality_id;
  j["lambda"] = std::vector<double>(rep.lambda.values().data(),
                                    rep.lambda.values().data() + rep.lambda.n());
  j["xi"] = std::vector<double>(rep.xi.data(), rep.xi.data() + rep.xi.size());
  j["params"] = rep.params;
  j["gap"] = rep.gap;
  j["scale"] = rep.scale;
  j["hypothesis_met"] = rep.hypothesis_met;
  if (!rep.note.empty()) j["note"] = rep.note;
  return j;
}

GapReport gap_report_from_json(const json& j) {
  std::vector<double> lam = j.at("lambda").get<std::vector<double>>();
  std::vector<double> xi = j.at("xi").get<std::vector<double>>();
  GapReport rep;
  rep.inequality_id = j.at("inequality").get<std::string>();
  rep.lambda = Spectrum(Eigen::Map<VectorXd>(lam.data(), long(lam.size())));
  rep.xi = Eigen::Map<VectorXd>(xi.data(), long(xi.size()));
  rep.params = j.at("params").get<std::map<std::string, double>>();
  rep.gap = j.at("gap").get<double>();
  rep.scale = j.at("scale").get<double>();
  rep.hypothesis_met = j.value("hypothesis_met", true);
  rep.note = j.value("note", std::string());
  return rep;
}

double recheck_gap(const GapReport& rep) {
  IneqParams p;
  auto get = [&](const char* key, double fallback) {
    auto it = rep.params.find(key);
    return it == rep.params.end() ? fallback : it->second;
  };
  p.K = get("K", 0.0);
  p.A = get("A", 0.0);
  p.delta0 = get("delta0", 0.0);
  p.epsilon = get("epsilon", 0.0);
  p.delta = get("delta", 0.0);
  p.delta_prime = get("delta_prime", 0.0);
  p.l = int(get("l", 1));
  p.i = int(get("i", 1));
  int k = int(get("k", 2));
  GapReport fresh = evaluate_gap(ineq_from_name(rep.inequality_id), rep.lambda,
                                 rep.xi, k, p);
  return fresh.gap;
}

json search_result_to_json(const SearchResult& result) {
  json j;
  j["converged"] = result.converged;
  std::vector<json> trace;
  for (double t : result.trace)
    trace.push_back(std::isfinite(t) ? json(t) : json("infeasible"));
  j["trace"] = trace;
  if (result.best) j["best"] = gap_report_to_json(*result.best);
  if (result.threshold_estimate) j["threshold_estimate"] = *result.threshold_estimate;
  return j;
}

json threshold_scan_to_json(const ThresholdScanResult& scan) {
  json j;
  j["tolerance_rel"] = scan.tolerance_rel;
  j["monotone"] = scan.monotone;
  if (scan.threshold) j["threshold"] = *scan.threshold;
  std::vector<json> pts;
  for (const FrontierPoint& fp : scan.curve) {
    json p;
    p["lambda1"] = fp.lambda1;
    p["feasible"] = fp.feasible;
    if (fp.feasible) {
      p["min_gap"] = fp.min_gap;
      p["scale"] = fp.scale;
    }
    pts.push_back(p);
  }
  j["curve"] = pts;
  return j;
}

std::string frontier_csv(const ThresholdScanResult& scan) {
  std::ostringstream os;
  os.precision(17);
  os << "lambda1,min_gap,scale,feasible\n";
  for (const FrontierPoint& fp : scan.curve)
    os << fp.lambda1 << "," << fp.min_gap << "," << fp.scale << ","
       << (fp.feasible ? 1 : 0) << "\n";
  return os.str();
}

std::string svg_line_plot(const std::vector<double>& xs,
                          const std::vector<double>& ys, const std::string& title) {
  const int W = 640, H = 400, M = 48;
  double xmin = xs.empty() ? 0 : xs[0], xmax = xmin, ymin = ys.empty() ? 0 : ys[0],
         ymax = ymin;
  for (double x : xs) {
    xmin = std::min(xmin, x);
    xmax = std::max(xmax, x);
  }
  for (double y : ys) {
    ymin = std::min(ymin, y);
    ymax = std::max(ymax, y);
  }
  if (xmax == xmin) xmax = xmin + 1.0;
  if (ymax == ymin) ymax = ymin + 1.0;
  auto px = [&](double x) { return M + (x - xmin) / (xmax - xmin) * (W - 2 * M); };
  auto py = [&](double y) { return H - M - (y - ymin) / (ymax - ymin) * (H - 2 * M); };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\""
     << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << M << "\" y=\"24\" font-family=\"monospace\">" << title
     << "</text>\n";
  os << "<polyline fill=\"none\" stroke=\"black\" points=\"";
  for (size_t i = 0; i < xs.size(); ++i) os << px(xs[i]) << "," << py(ys[i]) << " ";
  os << "\"/>\n";
  if (ymin < 0.0 && ymax > 0.0)
    os << "<line x1=\"" << M << "\" y1=\"" << py(0.0) << "\" x2=\"" << W - M
       << "\" y2=\"" << py(0.0) << "\" stroke=\"gray\" stroke-dasharray=\"4\"/>\n";
  os << "</svg>\n";
  return os.str();
}

Config parse_config(const std::string& text) {
  Config cfg;
  std::istringstream is(text);
  std::string line, section;
  while (std::getline(is, line)) {
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto trim = [](std::string s) {
      size_t a = s.find_first_not_of(" \t\r");
      size_t b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: expected key = value: " + line);
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config: empty key");
    cfg[section.empty() ? key : section + "." + key] = val;
  }
  return cfg;
}

std::string serialize_config(const Config& cfg) {
  std::ostringstream os;
  for (const auto& [k, v] : cfg) os << k << " = " << v << "\n";
  return os.str();
}

double cfg_num(const Config& c, const std::string& key, double fallback) {
  auto it = c.find(key);
  if (it == c.end()) return fallback;
  try {
    return std::stod(it->second);
  } catch (...) {
    throw ConfigError("config: expected number for " + key + ", got '" + it->second +
                      "'");
  }
}

long cfg_int(const Config& c, const std::string& key, long fallback) {
  auto it = c.find(key);
  if (it == c.end()) return fallback;
  try {
    return std::stol(it->second);
  } catch (...) {
    throw ConfigError("config: expected integer for " + key + ", got '" + it->second +
                      "'");
  }
}

std::string cfg_str(const Config& c, const std::string& key,
                    const std::string& fallback) {
  auto it = c.find(key);
  return it == c.end() ? fallback : it->second;
}

bool cfg_bool(const Config& c, const std::string& key, bool fallback) {
  auto it = c.find(key);
  if (it == c.end()) return fallback;
  if (it->second == "true" || it->second == "1") return true;
  if (it->second == "false" || it->second == "0") return false;
  throw ConfigError("config: expected bool for " + key);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << content;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace hessianlab
