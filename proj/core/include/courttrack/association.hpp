#pragma once

#include <Eigen/Dense>

#include <deque>
#include <utility>
#include <vector>

#include "courttrack/geometry.hpp"

namespace courttrack {

/** Appearance embedding from one camera view at one frame. */
struct Feature {
  Eigen::VectorXd vec;
  int view = 0;
  long frame = 0;
};

/**
 * Per-track store of recent appearance features. Holds at most `capacity`
 * entries, all within `window` frames of the newest entry; eviction is
 * oldest-first. Stored vectors are normalized to unit length on entry.
 */
class FeatureMemoryBank {
 public:
  explicit FeatureMemoryBank(int capacity = 60, int window = 30);

  // throws std::invalid_argument on a zero-norm or non-finite feature
  void add(Feature f);

  const std::deque<Feature>& entries() const { return entries_; }
  int size() const { return static_cast<int>(entries_.size()); }
  bool empty() const { return entries_.empty(); }
  long newest_frame() const;
  int capacity() const { return capacity_; }
  int window() const { return window_; }

 private:
  int capacity_;
  int window_;
  std::deque<Feature> entries_;
};

// rows are tracks, columns are detections; entries live in [0, 1]
using AffinityMatrix = Eigen::MatrixXd;

// cosine similarity; throws std::invalid_argument on zero-norm input
double cosine(const Feature& a, const Feature& b);

// pairwise diou3d of predicted track boxes against detections
AffinityMatrix geometry_affinity(const std::vector<Box3D>& tracks,
                                 const std::vector<Box3D>& detections);

// Appearance score for one track-detection pair: cosines of every valid
// detection feature against every bank entry, clamped at zero, the top_k per
// detection feature averaged. Falls back to `fallback` when the detection has
// no valid features or the bank holds fewer than top_k entries.
double appearance_score(const std::vector<Feature>& det_features,
                        const FeatureMemoryBank& bank, int top_k,
                        double fallback);

AffinityMatrix appearance_affinity(
    const std::vector<std::vector<Feature>>& det_features,
    const std::vector<const FeatureMemoryBank*>& banks, int top_k,
    const AffinityMatrix& fallback);

// convex blend alpha * geometry + (1 - alpha) * appearance;
// throws std::invalid_argument on shape mismatch or alpha outside [0, 1]
AffinityMatrix fuse_affinity(const AffinityMatrix& geometry,
                             const AffinityMatrix& appearance, double alpha);

struct Assignment {
  std::vector<std::pair<int, int>> matches;  // (row, column), sorted by row
  std::vector<int> unmatched_rows;
  std::vector<int> unmatched_cols;
};

// Maximum-total-score bipartite assignment (Hungarian algorithm). Rectangular
// inputs are padded internally; matches scoring below min_score dissolve into
// the unmatched sets.
Assignment assign(const AffinityMatrix& scores, double min_score);

// row -> column (or -1) maximizing the total score of a square matrix
std::vector<int> hungarian_max(const Eigen::MatrixXd& scores);

}  // namespace courttrack
