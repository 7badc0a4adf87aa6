#pragma once

#include <optional>
#include <vector>

#include "courttrack/association.hpp"
#include "courttrack/geometry.hpp"
#include "courttrack/motion.hpp"
#include "courttrack/regain.hpp"

namespace courttrack {

enum class TrackStatus { Tentative, Active, Broken, Exited };

struct TrackerConfig {
  double alpha = 0.5;  // geometry weight in the fused affinity
  int top_k = 5;
  int bank_capacity = 60;
  int bank_window = 30;
  double min_score = 0.2;
  double regain_threshold = 0.5;
  double r0 = 1.0;
  double v_max = 10.0;
  int hit_confirm = 2;
  int max_broken_age = 100;
  double confidence_gate = 0.0;
  bool enable_regain = true;
  bool enable_geometry_constraint = true;
  double frame_rate = 10.0;
  FieldModel field;
  KalmanParams kalman;

  double dt() const { return 1.0 / frame_rate; }
  // throws std::invalid_argument on out-of-range values
  void validate() const;
};

struct DetectionFeature {
  Feature feature;
  bool valid = true;
};

struct Detection {
  Box3D box;
  double confidence = 1.0;
  std::vector<DetectionFeature> features;  // one entry per camera view seen
};

struct FrameInput {
  long frame = 0;
  std::vector<Detection> detections;
};

struct TrackOutput {
  int id = 0;
  Box3D box;
  TrackStatus status = TrackStatus::Active;
  bool interpolated = false;  // regain gap fill rather than a detection match
};

struct Track {
  int id = 0;
  TrackStatus status = TrackStatus::Tentative;
  KalmanState kalman;
  FeatureMemoryBank bank;
  int hits = 0;
  long born_frame = 0;
  long last_update_frame = 0;
  Box3D last_confirmed_box;
  std::optional<Edge> exit_class;
  long broken_at = -1;
  int regains = 0;
};

struct TrackSummary {
  int id = 0;
  long first_frame = 0;
  long last_frame = 0;
  long frames = 0;
  int regains = 0;
};

struct TrajectorySet {
  std::vector<std::pair<long, std::vector<TrackOutput>>> frames;
  std::vector<TrackSummary> tracks;
};

/**
 * Tracking-by-detection over 3D boxes with appearance memory. Each frame:
 * predict, associate on the fused geometry/appearance affinity, update
 * matched tracks, break unmatched ones with an exit classification, try to
 * regain broken tracks, then spawn tentatives from leftover detections.
 */
class Tracker {
 public:
  explicit Tracker(TrackerConfig config = {});

  // throws std::invalid_argument when frames do not advance strictly
  std::vector<TrackOutput> step(const FrameInput& input);

  // gap fills produced by regains since the last call; frames precede the
  // current one, so callers splice them into already-emitted output
  std::vector<std::pair<long, TrackOutput>> take_gap_fills();

  const std::vector<Track>& tracks() const { return tracks_; }
  const TrackerConfig& config() const { return config_; }

 private:
  TrackerConfig config_;
  std::vector<Track> tracks_;
  std::vector<std::pair<long, TrackOutput>> gap_fills_;
  int next_id_ = 1;
  long last_frame_ = -1;
  bool started_ = false;
};

// runs a fresh tracker over the sequence and assembles per-frame outputs
// (gap fills spliced in, each frame sorted by id) plus per-track summaries
TrajectorySet run_tracker(const TrackerConfig& config,
                          const std::vector<FrameInput>& sequence);

}  // namespace courttrack
