#pragma once
#include <cstdint>
#include <map>
#include <vector>

#include "cwdyn/continua.hpp"

namespace cwdyn {

struct MetricConstants {
  double c = 0.25;
  int m = 1;
  double alpha = 2.0;
  int n0 = 3;
  double k = 2.0;
  double lambda = 1.2599210498948732;
  double xi = 0.0;
  int horizon = 0;
};

// alpha = 2^(1/m), n0 = 2m + 1 (smallest with alpha^n0 / 4 > 1), k = alpha^n0 / 4,
// lambda = k^(1/n0), xi = 1 / (4 alpha lambda^(n0-1)), lambda^-horizon < 1e-12
MetricConstants constants_from(double c, int m);

enum class CalibrationMode { full, structured };

struct CalibrationResult {
  MetricConstants consts;
  int samples = 0;
  int structured_m = 0;
  int random_m = 0;
};

CalibrationResult calibrate_report(const SystemModel& sys, double c, int sample_budget,
                                   std::uint64_t seed = 1,
                                   CalibrationMode mode = CalibrationMode::full);
MetricConstants calibrate(const SystemModel& sys, double c, int sample_budget,
                          std::uint64_t seed = 1, CalibrationMode mode = CalibrationMode::full);

struct NValue {
  long n = 0;
  bool infinite = false;  // singleton
  bool horizon = false;   // no exit within the horizon, used as infinity
};

struct DResult {
  double value = 0.0;
  long achieved_index = 0;
  double tail_bound = 0.0;
  bool horizon_hit = false;
};

// Precomputed small-time windows for every sub-arc between dyadic cut points of C.
// Time shifts evaluate the same quantities for f^i(C).
class MetricEvaluator {
 public:
  MetricEvaluator(const SystemModel& sys, const MarkedContinuum& C, const MetricConstants& k,
                  int depth);

  std::size_t cut_count() const { return M_; }
  bool degenerate() const { return degenerate_; }

  NValue piece_n(std::size_t s, std::size_t t, long shift) const;
  double piece_rho(std::size_t s, std::size_t t, long shift) const;
  NValue whole_n(long shift = 0) const { return piece_n(0, M_ - 1, shift); }

  double p(long shift = 0);
  double d_prime(long shift = 0);
  DResult d(long shift = 0);

 private:
  bool small_at(std::size_t s, std::size_t t, long n) const;
  std::size_t at(std::size_t s, std::size_t t) const { return s * M_ + t; }

  const SystemModel* sys_;
  MetricConstants k_;
  std::size_t M_ = 1;
  std::size_t a_ = 0, b_ = 0;  // ordered marks as cut indices
  bool degenerate_ = false;
  bool quotient_ = false;
  int lo_min_ = 0, hi_max_ = 0;
  std::vector<int> lo_, hi_;
  std::vector<int> lo2_;
  std::vector<std::uint64_t> mask_;
  std::vector<double> pow_alpha_;
  std::map<long, double> p_cache_;
  std::map<long, double> dp_cache_;
};

NValue capital_n(const SystemModel& sys, const MarkedContinuum& C, const MetricConstants& k);
double rho(const SystemModel& sys, const MarkedContinuum& C, const MetricConstants& k);
double p_metric(const SystemModel& sys, const MarkedContinuum& C, const MetricConstants& k,
                int depth);
double d_prime(const SystemModel& sys, const MarkedContinuum& C, const MetricConstants& k,
               int depth);
DResult d_metric(const SystemModel& sys, const MarkedContinuum& C, const MetricConstants& k,
                 int depth);

}  // namespace cwdyn
