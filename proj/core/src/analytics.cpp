#include "courttrack/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace courttrack {

std::vector<double> smoothed_speeds(const std::vector<Eigen::Vector3d>& positions,
                                    double dt, int window) {
  if (!(dt > 0.0)) throw std::invalid_argument("smoothed_speeds: dt must be positive");
  if (window < 1 || window % 2 == 0)
    throw std::invalid_argument("smoothed_speeds: window must be odd and positive");
  const int n = static_cast<int>(positions.size());
  if (n < 2) return {};

  std::vector<double> raw(n);
  raw[0] = (positions[1] - positions[0]).norm() / dt;
  raw[n - 1] = (positions[n - 1] - positions[n - 2]).norm() / dt;
  for (int i = 1; i + 1 < n; ++i)
    raw[i] = (positions[i + 1] - positions[i - 1]).norm() / (2.0 * dt);

  const int half = window / 2;
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - half);
    const int hi = std::min(n - 1, i + half);
    const double sum = std::accumulate(raw.begin() + lo, raw.begin() + hi + 1, 0.0);
    out[i] = sum / static_cast<double>(hi - lo + 1);
  }
  return out;
}

PlayerStats player_stats(const std::vector<Eigen::Vector3d>& positions,
                         double dt, int window, double sprint_threshold,
                         double jog_threshold) {
  PlayerStats s;
  s.playing_time = static_cast<double>(positions.size()) * dt;
  if (positions.size() < 2) return s;

  const std::vector<double> v = smoothed_speeds(positions, dt, window);
  for (double speed : v) {
    s.distance += speed * dt;
    s.top_speed = std::max(s.top_speed, speed);
    if (speed > sprint_threshold) {
      s.sprint_time += dt;
      s.sprint_distance += speed * dt;
    }
    if (speed < jog_threshold) s.jog_time += dt;
  }
  return s;
}

long HeatmapGrid::total() const {
  return std::accumulate(counts.begin(), counts.end(), 0L);
}

HeatmapGrid occupancy_heatmap(const std::vector<Eigen::Vector3d>& positions,
                              const FieldModel& field, double cell) {
  field.validate();
  if (!(cell > 0.0))
    throw std::invalid_argument("occupancy_heatmap: cell must be positive");

  HeatmapGrid grid;
  grid.cell = cell;
  grid.x_min = field.x_min;
  grid.y_min = field.y_min;
  grid.nx = static_cast<int>(std::ceil((field.x_max - field.x_min) / cell));
  grid.ny = static_cast<int>(std::ceil((field.y_max - field.y_min) / cell));
  grid.counts.assign(static_cast<size_t>(grid.nx) * grid.ny, 0);

  for (const auto& p : positions) {
    if (!field.contains(p.x(), p.y())) {
      grid.spill += 1;
      continue;
    }
    // the far boundary folds into the last cell
    const int ix = std::min(grid.nx - 1,
                            static_cast<int>((p.x() - field.x_min) / cell));
    const int iy = std::min(grid.ny - 1,
                            static_cast<int>((p.y() - field.y_min) / cell));
    grid.counts[static_cast<size_t>(iy) * grid.nx + ix] += 1;
  }
  return grid;
}

void write_heatmap_pgm(const HeatmapGrid& grid, std::ostream& os) {
  const long peak = grid.counts.empty()
                        ? 0
                        : *std::max_element(grid.counts.begin(), grid.counts.end());
  os << "P2\n" << grid.nx << " " << grid.ny << "\n255\n";
  // image rows run top to bottom, so y descends
  for (int iy = grid.ny - 1; iy >= 0; --iy) {
    for (int ix = 0; ix < grid.nx; ++ix) {
      const long c = grid.at(ix, iy);
      const long v = peak > 0 ? (c * 255 + peak / 2) / peak : 0;
      os << v << (ix + 1 < grid.nx ? ' ' : '\n');
    }
  }
}

void write_heatmap_csv(const HeatmapGrid& grid, std::ostream& os) {
  for (int iy = 0; iy < grid.ny; ++iy) {
    for (int ix = 0; ix < grid.nx; ++ix)
      os << grid.at(ix, iy) << (ix + 1 < grid.nx ? ',' : '\n');
  }
}

}  // namespace courttrack
