#include "courttrack/tracker.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace courttrack {

void TrackerConfig::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw std::invalid_argument("TrackerConfig: alpha outside [0, 1]");
  if (top_k <= 0 || bank_capacity <= 0 || bank_window <= 0)
    throw std::invalid_argument("TrackerConfig: bank parameters must be positive");
  if (hit_confirm < 1) throw std::invalid_argument("TrackerConfig: hit_confirm < 1");
  if (max_broken_age < 0) throw std::invalid_argument("TrackerConfig: max_broken_age < 0");
  if (!(frame_rate > 0.0)) throw std::invalid_argument("TrackerConfig: frame_rate <= 0");
  if (!(r0 >= 0.0) || !(v_max >= 0.0))
    throw std::invalid_argument("TrackerConfig: negative regain radius parameters");
  field.validate();
}

Tracker::Tracker(TrackerConfig config) : config_(std::move(config)) {
  config_.validate();
}

std::vector<TrackOutput> Tracker::step(const FrameInput& input) {
  if (started_ && input.frame <= last_frame_)
    throw std::invalid_argument("Tracker::step: frame index must increase");
  started_ = true;
  last_frame_ = input.frame;
  const long frame = input.frame;
  const double dt = config_.dt();

  // 1. motion prediction; edge-exited breaks stay frozen at the boundary
  for (Track& t : tracks_) {
    if (t.status == TrackStatus::Exited) continue;
    if (t.status == TrackStatus::Broken && t.exit_class) continue;
    t.kalman = predict(t.kalman, dt, config_.kalman);
    if (t.status == TrackStatus::Broken) {
      auto& m = t.kalman.mean;
      const bool inside = config_.field.contains(m(0), m(1));
      if (!inside) {
        m(0) = std::clamp(m(0), config_.field.x_min, config_.field.x_max);
        m(1) = std::clamp(m(1), config_.field.y_min, config_.field.y_max);
        m.tail<3>().setZero();
      }
    }
  }

  // detections passing the confidence gate, with their valid features
  std::vector<int> det_idx;
  for (size_t d = 0; d < input.detections.size(); ++d)
    if (input.detections[d].confidence >= config_.confidence_gate)
      det_idx.push_back(static_cast<int>(d));

  std::vector<std::vector<Feature>> det_feats(det_idx.size());
  for (size_t c = 0; c < det_idx.size(); ++c) {
    for (const DetectionFeature& df : input.detections[det_idx[c]].features) {
      if (!df.valid || df.feature.vec.size() == 0) continue;
      Feature f = df.feature;
      f.frame = frame;
      det_feats[c].push_back(std::move(f));
    }
  }

  // 2. fused affinity over tentative and active tracks
  std::vector<size_t> rows;
  for (size_t i = 0; i < tracks_.size(); ++i)
    if (tracks_[i].status == TrackStatus::Tentative ||
        tracks_[i].status == TrackStatus::Active)
      rows.push_back(i);

  std::vector<Box3D> row_boxes;
  std::vector<const FeatureMemoryBank*> row_banks;
  row_boxes.reserve(rows.size());
  for (size_t i : rows) {
    row_boxes.push_back(tracks_[i].kalman.to_box());
    row_banks.push_back(&tracks_[i].bank);
  }
  std::vector<Box3D> det_boxes;
  det_boxes.reserve(det_idx.size());
  for (int d : det_idx) det_boxes.push_back(input.detections[d].box);

  const AffinityMatrix s_ge = geometry_affinity(row_boxes, det_boxes);
  const AffinityMatrix s_ap =
      appearance_affinity(det_feats, row_banks, config_.top_k, s_ge);
  const AffinityMatrix fused = fuse_affinity(s_ge, s_ap, config_.alpha);

  // 3. assignment with the weak-match gate
  const Assignment assignment = assign(fused, config_.min_score);

  // 4. measurement updates
  std::vector<char> det_taken(det_idx.size(), 0);
  for (const auto& [r, c] : assignment.matches) {
    Track& t = tracks_[rows[r]];
    const Detection& det = input.detections[det_idx[c]];
    t.kalman = update(t.kalman, det.box, config_.kalman);
    for (const Feature& f : det_feats[c]) t.bank.add(f);
    t.hits += 1;
    t.last_update_frame = frame;
    t.last_confirmed_box = t.kalman.to_box();
    if (t.status == TrackStatus::Tentative && t.hits >= config_.hit_confirm)
      t.status = TrackStatus::Active;
    det_taken[c] = 1;
  }

  // 5. unmatched active tracks break; unmatched tentatives die
  std::vector<char> dead(tracks_.size(), 0);
  for (int r : assignment.unmatched_rows) {
    Track& t = tracks_[rows[r]];
    if (t.status == TrackStatus::Active) {
      t.status = TrackStatus::Broken;
      t.broken_at = frame;
      t.exit_class = classify_exit(t.last_confirmed_box.center, config_.field);
    } else {
      dead[rows[r]] = 1;
    }
  }

  // 6. regain broken tracks from leftover detections
  if (config_.enable_regain) {
    std::vector<int> free_cols;
    for (size_t c = 0; c < det_idx.size(); ++c)
      if (!det_taken[c]) free_cols.push_back(static_cast<int>(c));

    std::vector<Box3D> free_boxes;
    std::vector<std::vector<Feature>> free_feats;
    for (int c : free_cols) {
      free_boxes.push_back(input.detections[det_idx[c]].box);
      free_feats.push_back(det_feats[c]);
    }

    std::vector<BrokenTrack> broken;
    std::vector<size_t> broken_track_index;
    for (size_t i = 0; i < tracks_.size(); ++i) {
      Track& t = tracks_[i];
      if (t.status != TrackStatus::Broken) continue;
      broken.push_back({t.id, t.exit_class, t.last_confirmed_box.center,
                        t.broken_at, t.kalman.to_box(), &t.bank});
      broken_track_index.push_back(i);
    }

    const auto matches =
        regain(free_boxes, free_feats, broken, config_.field, frame, dt,
               config_.alpha, config_.top_k, config_.regain_threshold,
               config_.v_max, config_.r0, config_.enable_geometry_constraint);

    for (const RegainMatch& m : matches) {
      size_t ti = 0;
      for (size_t b = 0; b < broken.size(); ++b)
        if (broken[b].id == m.track) ti = broken_track_index[b];
      Track& t = tracks_[ti];
      const int c = free_cols[m.detection];
      const Detection& det = input.detections[det_idx[c]];

      // out-of-field gaps stay empty; only breaks inside the field are filled
      if (!t.exit_class && frame - t.last_update_frame > 1) {
        for (auto& [f, box] :
             interpolate_gap(t.last_update_frame, t.last_confirmed_box, frame,
                             det.box))
          gap_fills_.push_back({f, {t.id, box, TrackStatus::Active, true}});
      }

      // the stale motion state is replaced outright by the claiming detection
      t.kalman = KalmanState::from_box(det.box, config_.kalman);
      t.status = TrackStatus::Active;
      t.hits = std::max(t.hits, config_.hit_confirm);
      t.last_update_frame = frame;
      t.last_confirmed_box = det.box;
      t.exit_class.reset();
      t.broken_at = -1;
      t.regains += 1;
      for (const Feature& f : det_feats[c]) t.bank.add(f);
      det_taken[c] = 1;
    }
  }

  // 7. leftover detections seed tentative tracks
  for (size_t c = 0; c < det_idx.size(); ++c) {
    if (det_taken[c]) continue;
    const Detection& det = input.detections[det_idx[c]];
    Track t;
    t.id = next_id_++;
    t.status = config_.hit_confirm <= 1 ? TrackStatus::Active
                                        : TrackStatus::Tentative;
    t.kalman = KalmanState::from_box(det.box, config_.kalman);
    t.bank = FeatureMemoryBank(config_.bank_capacity, config_.bank_window);
    t.hits = 1;
    t.born_frame = frame;
    t.last_update_frame = frame;
    t.last_confirmed_box = det.box;
    for (const Feature& f : det_feats[c]) t.bank.add(f);
    tracks_.push_back(std::move(t));
  }

  // 8. retire overdue breaks, drop dead tentatives
  for (Track& t : tracks_)
    if (t.status == TrackStatus::Broken &&
        frame - t.broken_at > config_.max_broken_age)
      t.status = TrackStatus::Exited;
  for (size_t i = dead.size(); i-- > 0;)
    if (dead[i]) tracks_.erase(tracks_.begin() + static_cast<long>(i));

  std::vector<TrackOutput> out;
  for (const Track& t : tracks_)
    if (t.status == TrackStatus::Active)
      out.push_back({t.id, t.kalman.to_box(), t.status, false});
  return out;
}

std::vector<std::pair<long, TrackOutput>> Tracker::take_gap_fills() {
  return std::exchange(gap_fills_, {});
}

TrajectorySet run_tracker(const TrackerConfig& config,
                          const std::vector<FrameInput>& sequence) {
  Tracker tracker(config);
  TrajectorySet out;
  std::map<long, size_t> frame_slot;
  for (const FrameInput& input : sequence) {
    auto emitted = tracker.step(input);
    frame_slot[input.frame] = out.frames.size();
    out.frames.emplace_back(input.frame, std::move(emitted));
    for (auto& [f, fill] : tracker.take_gap_fills()) {
      const auto slot = frame_slot.find(f);
      if (slot != frame_slot.end())
        out.frames[slot->second].second.push_back(fill);
    }
  }

  std::map<int, TrackSummary> summaries;
  for (auto& [frame, outputs] : out.frames) {
    std::sort(outputs.begin(), outputs.end(),
              [](const TrackOutput& a, const TrackOutput& b) { return a.id < b.id; });
    for (const TrackOutput& o : outputs) {
      auto [it, fresh] = summaries.try_emplace(
          o.id, TrackSummary{o.id, frame, frame, 0, 0});
      it->second.first_frame = std::min(it->second.first_frame, frame);
      it->second.last_frame = std::max(it->second.last_frame, frame);
      it->second.frames += 1;
    }
  }
  for (const Track& t : tracker.tracks()) {
    auto it = summaries.find(t.id);
    if (it != summaries.end()) it->second.regains = t.regains;
  }
  out.tracks.reserve(summaries.size());
  for (auto& [id, s] : summaries) out.tracks.push_back(s);
  return out;
}

}  // namespace courttrack
