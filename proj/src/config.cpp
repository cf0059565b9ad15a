#include "cwdyn/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace cwdyn {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_num(const std::string& v, const std::string& key, const std::string& origin, int line) {
  T out{};
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ConfigError(origin, line, "bad value '" + v + "' for " + key);
  return out;
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void set_config_key(ExperimentConfig& cfg, const std::string& key, const std::string& value,
                    const std::string& origin, int line) {
  auto bad = [&](const std::string& why) { throw ConfigError(origin, line, key + ": " + why); };
  if (key == "model.kind") {
    try {
      parse_model_kind(value);
    } catch (const CwError&) {
      bad("unknown model '" + value + "'");
    }
    cfg.model_kind = model_name(parse_model_kind(value));
  } else if (key == "model.matrix") {
    std::array<std::int64_t, 4> m{};
    std::stringstream ss(value);
    std::string tok;
    int k = 0;
    while (std::getline(ss, tok, ',')) {
      if (k == 4) bad("expected 4 integers");
      m[k++] = parse_num<std::int64_t>(trim(tok), key, origin, line);
    }
    if (k != 4) bad("expected 4 integers");
    cfg.matrix = m;
  } else if (key == "model.c") {
    cfg.c = parse_num<double>(value, key, origin, line);
    if (!(cfg.c > 0 && cfg.c < 0.5)) bad("must lie in (0, 0.5)");
  } else if (key == "discretization.resolution") {
    cfg.resolution = parse_num<int>(value, key, origin, line);
    if (cfg.resolution < 2) bad("must be >= 2");
  } else if (key == "discretization.depth") {
    cfg.depth = parse_num<int>(value, key, origin, line);
    if (cfg.depth < 0 || cfg.depth > 20) bad("must lie in [0, 20]");
  } else if (key == "discretization.horizon") {
    cfg.horizon = parse_num<int>(value, key, origin, line);
    if (cfg.horizon < 1) bad("must be >= 1");
  } else if (key == "calibration.sample_budget") {
    cfg.sample_budget = parse_num<long>(value, key, origin, line);
    if (cfg.sample_budget < 1) bad("must be >= 1");
  } else if (key == "calibration.mode") {
    if (value != "full" && value != "structured") bad("expected full or structured");
    cfg.calibration_mode = value;
  } else if (key == "run.seed") {
    cfg.seed = parse_num<std::uint64_t>(value, key, origin, line);
  } else if (key == "output.dir") {
    cfg.output_dir = value;
  } else {
    throw ConfigError(origin, line, "unknown key '" + key + "'");
  }
}

ExperimentConfig parse_config(const std::string& text, const std::string& origin,
                              ExperimentConfig base) {
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    auto hash = raw.find('#');
    std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(origin, line, "expected key = value");
    std::string key = trim(s.substr(0, eq)), value = trim(s.substr(eq + 1));
    if (key.empty()) throw ConfigError(origin, line, "missing key");
    if (value.empty()) throw ConfigError(origin, line, "missing value for " + key);
    set_config_key(base, key, value, origin, line);
  }
  return base;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
  std::ifstream f(path);
  if (!f) throw ConfigError(path, 0, "cannot open");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), path, std::move(base));
}

std::string canonical_text(const ExperimentConfig& cfg) {
  std::ostringstream o;
  o << "calibration.mode = " << cfg.calibration_mode << "\n";
  o << "calibration.sample_budget = " << cfg.sample_budget << "\n";
  o << "discretization.depth = " << cfg.depth << "\n";
  o << "discretization.horizon = " << cfg.horizon << "\n";
  o << "discretization.resolution = " << cfg.resolution << "\n";
  o << "model.c = " << fmt_double(cfg.c) << "\n";
  o << "model.kind = " << cfg.model_kind << "\n";
  o << "model.matrix = " << cfg.matrix[0] << "," << cfg.matrix[1] << "," << cfg.matrix[2] << ","
    << cfg.matrix[3] << "\n";
  o << "run.seed = " << cfg.seed << "\n";
  return o.str();
}

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string config_hash(const ExperimentConfig& cfg) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canonical_text(cfg))));
  return buf;
}

SystemModel make_system(const ExperimentConfig& cfg) {
  SystemModel s;
  try {
    s = make_model(parse_model_kind(cfg.model_kind), cfg.matrix, cfg.c);
  } catch (const CwError& e) {
    throw ConfigError("<config>", 0, e.what());
  }
  s.resolution = cfg.resolution;
  s.horizon = cfg.horizon;
  return s;
}

nlohmann::json to_json(const Point& p) { return nlohmann::json::array({p.c.x, p.c.y}); }

nlohmann::json to_json(const MarkedContinuum& C) {
  nlohmann::json v = nlohmann::json::array();
  for (const auto& p : C.vertices) v.push_back(to_json(p));
  return {{"chart", chart_name(C.chart())}, {"vertices", v}, {"mark_p", C.mark_p}, {"mark_q", C.mark_q}};
}

MarkedContinuum continuum_from_json(const SystemModel& sys, const nlohmann::json& j,
                                    const std::string& origin) {
  try {
    if (j.contains("chart") && j.at("chart").get<std::string>() != chart_name(sys.chart()))
      throw ConfigError(origin, 0, "chart does not match the model");
    std::vector<Point> pts;
    for (const auto& v : j.at("vertices")) pts.push_back(make_point(sys, v.at(0).get<double>(), v.at(1).get<double>()));
    if (pts.empty()) throw ConfigError(origin, 0, "no vertices");
    std::size_t mp = j.value("mark_p", std::size_t(0));
    std::size_t mq = j.value("mark_q", pts.size() - 1);
    if (mp >= pts.size() || mq >= pts.size()) throw ConfigError(origin, 0, "mark index out of range");
    return polyline(std::move(pts), mp, mq);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(origin, 0, e.what());
  }
}

MarkedContinuum load_continuum(const SystemModel& sys, const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError(path, 0, "cannot open");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(f);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path, 0, "byte " + std::to_string(e.byte) + ": " + e.what());
  }
  return continuum_from_json(sys, j, path);
}

ReportWriter::ReportWriter(std::ostream& os, const ExperimentConfig& cfg, std::string command)
    : os_(os), cfg_(cfg), command_(std::move(command)), hash_(config_hash(cfg)) {}

void ReportWriter::header(const std::string& timestamp) {
  nlohmann::json h = {{"type", "header"}, {"command", command_}, {"config_hash", hash_},
                      {"config", canonical_text(cfg_)}, {"timestamp", timestamp}};
  os_ << h.dump() << "\n";
}

void ReportWriter::record(const std::string& type, nlohmann::json body) {
  nlohmann::json r = {{"type", type}, {"config_hash", hash_}};
  for (auto& [k, v] : body.items()) r[k] = v;
  lines_.push_back(r.dump());
  os_ << lines_.back() << "\n";
}

}  // namespace cwdyn
