#include "courttrack/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "courttrack/association.hpp"

namespace courttrack {

namespace {

void check_frames(const std::vector<LabeledFrame>& gt,
                  const std::vector<LabeledFrame>& pred) {
  if (gt.size() != pred.size())
    throw std::invalid_argument("metrics: frame ranges differ");
  for (size_t k = 0; k < gt.size(); ++k) {
    if (gt[k].frame != pred[k].frame)
      throw std::invalid_argument("metrics: frame ranges differ");
    if (k > 0 && gt[k].frame <= gt[k - 1].frame)
      throw std::invalid_argument("metrics: frames must increase");
  }
  for (const auto* seq : {&gt, &pred}) {
    for (const LabeledFrame& f : *seq) {
      std::set<int> ids;
      for (const LabeledBox& o : f.objects)
        if (!ids.insert(o.id).second)
          throw std::invalid_argument("metrics: duplicate id within a frame");
    }
  }
}

Eigen::MatrixXd similarity(const LabeledFrame& gt, const LabeledFrame& pred) {
  Eigen::MatrixXd sim(gt.objects.size(), pred.objects.size());
  for (Eigen::Index i = 0; i < sim.rows(); ++i)
    for (Eigen::Index j = 0; j < sim.cols(); ++j)
      sim(i, j) = diou3d(gt.objects[i].box, pred.objects[j].box);
  return sim;
}

}  // namespace

ClearMotResult clear_mot(const std::vector<LabeledFrame>& gt,
                         const std::vector<LabeledFrame>& pred, double gate) {
  check_frames(gt, pred);

  ClearMotResult out;
  double motp_sum = 0.0;
  long matched_total = 0;

  std::map<int, int> last_pred;               // gt id -> most recent pred id
  std::map<int, int> continuity;              // matches carried from last frame
  enum { kNever = 0, kTracked, kInterrupted };
  std::map<int, int> frag_state;

  for (size_t k = 0; k < gt.size(); ++k) {
    const auto& g = gt[k].objects;
    const auto& p = pred[k].objects;
    const Eigen::MatrixXd sim = similarity(gt[k], pred[k]);

    std::map<int, int> gt_index, pred_index;
    for (size_t i = 0; i < g.size(); ++i) gt_index[g[i].id] = static_cast<int>(i);
    for (size_t j = 0; j < p.size(); ++j) pred_index[p[j].id] = static_cast<int>(j);

    std::vector<char> g_used(g.size(), 0), p_used(p.size(), 0);
    std::vector<std::pair<int, int>> matches;

    // keep last frame's pairs while they still overlap above the gate
    for (const auto& [gt_id, pred_id] : continuity) {
      const auto gi = gt_index.find(gt_id);
      const auto pj = pred_index.find(pred_id);
      if (gi == gt_index.end() || pj == pred_index.end()) continue;
      if (sim(gi->second, pj->second) < gate) continue;
      matches.emplace_back(gi->second, pj->second);
      g_used[gi->second] = 1;
      p_used[pj->second] = 1;
    }

    // maximum-similarity assignment over the remainder
    std::vector<int> free_g, free_p;
    for (size_t i = 0; i < g.size(); ++i)
      if (!g_used[i]) free_g.push_back(static_cast<int>(i));
    for (size_t j = 0; j < p.size(); ++j)
      if (!p_used[j]) free_p.push_back(static_cast<int>(j));
    if (!free_g.empty() && !free_p.empty()) {
      Eigen::MatrixXd sub(free_g.size(), free_p.size());
      for (size_t a = 0; a < free_g.size(); ++a)
        for (size_t b = 0; b < free_p.size(); ++b)
          sub(a, b) = sim(free_g[a], free_p[b]);
      for (const auto& [a, b] : assign(sub, gate).matches)
        matches.emplace_back(free_g[a], free_p[b]);
    }

    continuity.clear();
    std::set<int> matched_gt_ids;
    for (const auto& [gi, pj] : matches) {
      const int gt_id = g[gi].id;
      const int pred_id = p[pj].id;
      motp_sum += sim(gi, pj);
      matched_total += 1;

      const auto prev = last_pred.find(gt_id);
      if (prev != last_pred.end() && prev->second != pred_id)
        out.id_switches += 1;
      last_pred[gt_id] = pred_id;

      if (frag_state[gt_id] == kInterrupted) out.fragmentations += 1;
      frag_state[gt_id] = kTracked;

      continuity[gt_id] = pred_id;
      matched_gt_ids.insert(gt_id);
    }
    for (const LabeledBox& o : g)
      if (!matched_gt_ids.count(o.id) && frag_state[o.id] == kTracked)
        frag_state[o.id] = kInterrupted;

    out.gt_count += static_cast<long>(g.size());
    out.false_negatives += static_cast<long>(g.size() - matches.size());
    out.false_positives += static_cast<long>(p.size() - matches.size());
  }

  const double denom = static_cast<double>(std::max<long>(out.gt_count, 1));
  out.mota = 1.0 - static_cast<double>(out.false_negatives +
                                       out.false_positives + out.id_switches) /
                       denom;
  out.motp = matched_total > 0 ? motp_sum / static_cast<double>(matched_total)
                               : 0.0;
  return out;
}

HotaResult hota(const std::vector<LabeledFrame>& gt,
                const std::vector<LabeledFrame>& pred) {
  check_frames(gt, pred);

  // dense id tables, ordered so results cannot depend on id magnitudes
  std::map<int, int> gt_dense, pred_dense;
  long gt_total = 0, pred_total = 0;
  for (const LabeledFrame& f : gt)
    for (const LabeledBox& o : f.objects) {
      gt_dense.emplace(o.id, 0);
      ++gt_total;
    }
  for (const LabeledFrame& f : pred)
    for (const LabeledBox& o : f.objects) {
      pred_dense.emplace(o.id, 0);
      ++pred_total;
    }
  int next = 0;
  for (auto& [id, dense] : gt_dense) dense = next++;
  next = 0;
  for (auto& [id, dense] : pred_dense) dense = next++;
  const int ng = static_cast<int>(gt_dense.size());
  const int np = static_cast<int>(pred_dense.size());

  HotaResult out;
  if (gt_total + pred_total == 0) {
    out.hota = out.deta = out.assa = 1.0;
    out.hota_at.fill(1.0);
    out.deta_at.fill(1.0);
    out.assa_at.fill(1.0);
    return out;
  }

  struct FrameCache {
    std::vector<int> g_ids, p_ids;  // dense
    Eigen::MatrixXd sim;
  };
  std::vector<FrameCache> cache(gt.size());

  Eigen::VectorXd gt_count = Eigen::VectorXd::Zero(ng);
  Eigen::VectorXd pred_count = Eigen::VectorXd::Zero(np);
  Eigen::MatrixXd potential = Eigen::MatrixXd::Zero(ng, np);

  for (size_t k = 0; k < gt.size(); ++k) {
    FrameCache& fc = cache[k];
    for (const LabeledBox& o : gt[k].objects) {
      fc.g_ids.push_back(gt_dense[o.id]);
      gt_count(gt_dense[o.id]) += 1.0;
    }
    for (const LabeledBox& o : pred[k].objects) {
      fc.p_ids.push_back(pred_dense[o.id]);
      pred_count(pred_dense[o.id]) += 1.0;
    }
    fc.sim = similarity(gt[k], pred[k]);
    if (fc.sim.size() == 0) continue;
    const Eigen::VectorXd row_sum = fc.sim.rowwise().sum();
    const Eigen::VectorXd col_sum = fc.sim.colwise().sum();
    for (Eigen::Index i = 0; i < fc.sim.rows(); ++i) {
      for (Eigen::Index j = 0; j < fc.sim.cols(); ++j) {
        const double denom = row_sum(i) + col_sum(j) - fc.sim(i, j);
        if (denom > 1e-12)
          potential(fc.g_ids[i], fc.p_ids[j]) += fc.sim(i, j) / denom;
      }
    }
  }

  Eigen::MatrixXd alignment = Eigen::MatrixXd::Zero(ng, np);
  for (int i = 0; i < ng; ++i)
    for (int j = 0; j < np; ++j) {
      const double denom = gt_count(i) + pred_count(j) - potential(i, j);
      if (denom > 1e-12) alignment(i, j) = potential(i, j) / denom;
    }

  // one assignment per frame, reused across thresholds
  std::vector<Eigen::MatrixXd> match_count(
      kHotaThresholds, Eigen::MatrixXd::Zero(ng, np));
  std::array<long, kHotaThresholds> tp{};
  for (const FrameCache& fc : cache) {
    if (fc.g_ids.empty() || fc.p_ids.empty()) continue;
    Eigen::MatrixXd score(fc.g_ids.size(), fc.p_ids.size());
    for (Eigen::Index i = 0; i < score.rows(); ++i)
      for (Eigen::Index j = 0; j < score.cols(); ++j)
        score(i, j) = alignment(fc.g_ids[i], fc.p_ids[j]) * fc.sim(i, j);
    for (const auto& [i, j] : assign(score, -1.0).matches) {
      for (int a = 0; a < kHotaThresholds; ++a) {
        const double threshold = 0.05 * (a + 1);
        if (fc.sim(i, j) >= threshold - 1e-12) {
          match_count[a](fc.g_ids[i], fc.p_ids[j]) += 1.0;
          tp[a] += 1;
        }
      }
    }
  }

  for (int a = 0; a < kHotaThresholds; ++a) {
    const long fn = gt_total - tp[a];
    const long fp = pred_total - tp[a];
    out.deta_at[a] =
        static_cast<double>(tp[a]) / static_cast<double>(tp[a] + fn + fp);
    double ass_sum = 0.0;
    for (int i = 0; i < ng; ++i)
      for (int j = 0; j < np; ++j) {
        const double c = match_count[a](i, j);
        if (c <= 0.0) continue;
        ass_sum += c * (c / (gt_count(i) + pred_count(j) - c));
      }
    out.assa_at[a] = tp[a] > 0 ? ass_sum / static_cast<double>(tp[a]) : 0.0;
    out.hota_at[a] = std::sqrt(out.deta_at[a] * out.assa_at[a]);
    out.deta += out.deta_at[a];
    out.assa += out.assa_at[a];
    out.hota += out.hota_at[a];
  }
  out.deta /= kHotaThresholds;
  out.assa /= kHotaThresholds;
  out.hota /= kHotaThresholds;
  return out;
}

MetricsReport evaluate(const std::vector<LabeledFrame>& gt,
                       const std::vector<LabeledFrame>& pred,
                       double clear_gate) {
  return {clear_mot(gt, pred, clear_gate), hota(gt, pred)};
}

}  // namespace courttrack
