#pragma once
#include <optional>
#include <string>
#include <vector>

#include "cwdyn/continua.hpp"

namespace cwdyn {

struct SectorRecord {
  MarkedContinuum boundary_s;  // stable arc a1 -> a2
  MarkedContinuum boundary_u;  // unstable arc a1 -> a2
  MarkedContinuum ext_s;       // stable arc carrying boundary_s and its continuations
  MarkedContinuum ext_u;
  Point a1, a2;
  bool regular = false;
  std::optional<Point> spine;
};

struct Region {
  double x0 = 0, y0 = 0, x1 = 1, y1 = 1;
};

struct SectorSearch {
  std::vector<SectorRecord> sectors;
  long pairs = 0;
  long max_multiplicity = 0;
  bool partial = false;
};

SectorSearch find_sectors(const SystemModel& sys, const Region& region, double eps, long budget,
                          int seed_res = 32);

// spines of sys on a grid of even resolution, clustered
std::vector<Point> enumerate_spines(const SystemModel& sys, double eps, int grid_res);

// boundary and continuation arcs from two crossing arcs; nullopt unless exactly two crossings
std::optional<SectorRecord> make_sector(const SystemModel& sys, const MarkedContinuum& s_arc,
                                        const MarkedContinuum& u_arc, double tol = kDefaultTol);
// the rectangle [-A, A] x [-B, B] in eigen-coordinates about spine h
SectorRecord spine_sector(const SystemModel& sys, const Point& h, double A, double B);

enum class SectorKind { regular, non_regular };
SectorKind classify_sector(const SystemModel& sys, const SectorRecord& s);

// inside the disc bounded by the two arcs
bool sector_contains(const SystemModel& sys, const SectorRecord& s, const Point& x);
double sector_area(const SystemModel& sys, const SectorRecord& s);
// smallest sector per spine
std::vector<SectorRecord> minimal_sectors(const SystemModel& sys, const std::vector<SectorRecord>& all,
                                          const std::vector<Point>& spines);

struct ParametrizationReport {
  int grid = 0;
  std::vector<Point> f1, f2;  // row-major, t outer, s inner
  double max_modulus = 0.0;   // largest jump between neighbouring samples
  long monotone_violations = 0;
  long duplicates = 0;
  long missing = 0;
};
ParametrizationReport sector_parametrization(const SystemModel& sys, const SectorRecord& s,
                                             int grid);

struct EnclosingResult {
  bool found = false;
  SectorRecord sector;
  double clearance = 0.0;
  int attempts = 0;
  std::string report;
};
EnclosingResult enclosing_sector(const SystemModel& sys, const SectorRecord& s, int margin_budget);

}  // namespace cwdyn
