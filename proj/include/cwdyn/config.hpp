#pragma once
#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cwdyn/continua.hpp"
#include "json.hpp"

namespace cwdyn {

struct ExperimentConfig {
  std::string model_kind = "cat-map";
  std::array<std::int64_t, 4> matrix{2, 1, 1, 1};
  double c = 0.25;
  int resolution = 64;
  int depth = 3;
  int horizon = 60;
  long sample_budget = 2000;
  std::string calibration_mode = "full";
  std::uint64_t seed = 1;
  std::string output_dir;
};

// config error with a 1-based line number (0 when not tied to a line)
class ConfigError : public CwError {
 public:
  ConfigError(std::string origin, int line, const std::string& msg)
      : CwError(ErrorKind::config, origin + (line > 0 ? ":" + std::to_string(line) : "") + ": " + msg),
        origin_(std::move(origin)),
        line_(line) {}
  const std::string& origin() const { return origin_; }
  int line() const { return line_; }

 private:
  std::string origin_;
  int line_;
};

// "key = value" lines, '#' comments; later lines override earlier ones
ExperimentConfig parse_config(const std::string& text, const std::string& origin = "<config>",
                              ExperimentConfig base = {});
ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {});
// apply one key/value, as from a command-line override
void set_config_key(ExperimentConfig& cfg, const std::string& key, const std::string& value,
                    const std::string& origin = "<flag>", int line = 0);

std::string canonical_text(const ExperimentConfig& cfg);
std::uint64_t fnv1a64(const std::string& s);
std::string config_hash(const ExperimentConfig& cfg);

SystemModel make_system(const ExperimentConfig& cfg);

nlohmann::json to_json(const Point& p);
nlohmann::json to_json(const MarkedContinuum& C);
MarkedContinuum continuum_from_json(const SystemModel& sys, const nlohmann::json& j,
                                    const std::string& origin = "<continuum>");
MarkedContinuum load_continuum(const SystemModel& sys, const std::string& path);

// line-delimited records; the header line alone carries the timestamp
class ReportWriter {
 public:
  ReportWriter(std::ostream& os, const ExperimentConfig& cfg, std::string command);
  void header(const std::string& timestamp);
  void record(const std::string& type, nlohmann::json body);
  const std::vector<std::string>& body_lines() const { return lines_; }

 private:
  std::ostream& os_;
  ExperimentConfig cfg_;
  std::string command_;
  std::string hash_;
  std::vector<std::string> lines_;
};

}  // namespace cwdyn
