#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <vector>

#include "courttrack/regain.hpp"

namespace courttrack {

// Per-frame speed along a trajectory: central differences inside, one-sided
// at the ends, then a centered moving average of odd width `window` (shrunk
// near the ends). Empty for fewer than two positions.
std::vector<double> smoothed_speeds(const std::vector<Eigen::Vector3d>& positions,
                                    double dt, int window = 5);

struct PlayerStats {
  double playing_time = 0.0;     // frames * dt
  double distance = 0.0;         // integral of smoothed speed
  double sprint_time = 0.0;      // frames above the sprint threshold
  double sprint_distance = 0.0;
  double jog_time = 0.0;         // frames below the jog threshold
  double top_speed = 0.0;
};

PlayerStats player_stats(const std::vector<Eigen::Vector3d>& positions,
                         double dt, int window = 5,
                         double sprint_threshold = 6.0,
                         double jog_threshold = 1.0);

/** Occupancy counts over the field on a square-cell grid. */
struct HeatmapGrid {
  int nx = 0, ny = 0;
  double cell = 0.5;
  double x_min = 0.0, y_min = 0.0;
  std::vector<long> counts;  // row-major, x fastest
  long spill = 0;            // positions outside the field

  long at(int ix, int iy) const { return counts[static_cast<size_t>(iy) * nx + ix]; }
  long total() const;
};

HeatmapGrid occupancy_heatmap(const std::vector<Eigen::Vector3d>& positions,
                              const FieldModel& field, double cell = 0.5);

// grayscale PGM (P2), counts scaled so the densest cell is white
void write_heatmap_pgm(const HeatmapGrid& grid, std::ostream& os);
// one CSV row per grid row, y ascending
void write_heatmap_csv(const HeatmapGrid& grid, std::ostream& os);

}  // namespace courttrack
