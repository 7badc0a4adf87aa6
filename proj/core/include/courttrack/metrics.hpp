#pragma once

#include <array>
#include <vector>

#include "courttrack/geometry.hpp"

namespace courttrack {

struct LabeledBox {
  int id = 0;
  Box3D box;
};

struct LabeledFrame {
  long frame = 0;
  std::vector<LabeledBox> objects;  // ids must be unique within the frame
};

struct ClearMotResult {
  double mota = 0.0;
  double motp = 0.0;  // mean diou3d over matched pairs
  long id_switches = 0;
  long fragmentations = 0;
  long false_positives = 0;
  long false_negatives = 0;
  long gt_count = 0;
};

// CLEAR-MOT on diou3d similarity. Matches persist frame to frame while they
// stay above the gate; the remainder is re-matched each frame by maximum
// total similarity. Throws on misaligned frame ranges or duplicate ids.
ClearMotResult clear_mot(const std::vector<LabeledFrame>& gt,
                         const std::vector<LabeledFrame>& pred,
                         double gate = 0.25);

inline constexpr int kHotaThresholds = 19;  // 0.05, 0.10, ..., 0.95

struct HotaResult {
  double hota = 0.0;
  double deta = 0.0;
  double assa = 0.0;
  std::array<double, kHotaThresholds> hota_at{};
  std::array<double, kHotaThresholds> deta_at{};
  std::array<double, kHotaThresholds> assa_at{};
};

// Higher-order tracking accuracy with diou3d as the localization similarity,
// evaluated at 19 thresholds and averaged. Per threshold, detections match by
// Hungarian assignment weighted by the global gt/pred co-occurrence score;
// HOTA_a is the geometric mean of DetA_a and AssA_a.
HotaResult hota(const std::vector<LabeledFrame>& gt,
                const std::vector<LabeledFrame>& pred);

struct MetricsReport {
  ClearMotResult clear;
  HotaResult hota;
};

MetricsReport evaluate(const std::vector<LabeledFrame>& gt,
                       const std::vector<LabeledFrame>& pred,
                       double clear_gate = 0.25);

}  // namespace courttrack
