#include "courttrack/association.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace courttrack {

namespace {

bool finite(const Eigen::VectorXd& v) { return v.allFinite(); }

// score applied to padding cells; every completion of the padded matrix uses
// the same number of them, so the real optimum is unaffected
constexpr double kPadScore = -1.0;

}  // namespace

FeatureMemoryBank::FeatureMemoryBank(int capacity, int window)
    : capacity_(capacity), window_(window) {
  if (capacity <= 0 || window <= 0)
    throw std::invalid_argument("FeatureMemoryBank: capacity and window must be positive");
}

void FeatureMemoryBank::add(Feature f) {
  if (!finite(f.vec)) throw std::invalid_argument("FeatureMemoryBank: non-finite feature");
  const double n = f.vec.norm();
  if (n <= 0.0) throw std::invalid_argument("FeatureMemoryBank: zero-norm feature");
  f.vec /= n;
  entries_.push_back(std::move(f));
  const long newest = entries_.back().frame;
  while (!entries_.empty() && newest - entries_.front().frame >= window_)
    entries_.pop_front();
  while (static_cast<int>(entries_.size()) > capacity_) entries_.pop_front();
}

long FeatureMemoryBank::newest_frame() const {
  return entries_.empty() ? -1 : entries_.back().frame;
}

double cosine(const Feature& a, const Feature& b) {
  if (a.vec.size() != b.vec.size())
    throw std::invalid_argument("cosine: dimension mismatch");
  const double na = a.vec.norm();
  const double nb = b.vec.norm();
  if (na <= 0.0 || nb <= 0.0)
    throw std::invalid_argument("cosine: zero-norm feature");
  return a.vec.dot(b.vec) / (na * nb);
}

AffinityMatrix geometry_affinity(const std::vector<Box3D>& tracks,
                                 const std::vector<Box3D>& detections) {
  AffinityMatrix m(tracks.size(), detections.size());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      m(i, j) = diou3d(tracks[i], detections[j]);
  return m;
}

double appearance_score(const std::vector<Feature>& det_features,
                        const FeatureMemoryBank& bank, int top_k,
                        double fallback) {
  if (top_k <= 0) throw std::invalid_argument("appearance_score: top_k must be positive");
  if (det_features.empty() || bank.size() < top_k) return fallback;

  std::vector<double> sims(bank.size());
  double total = 0.0;
  for (const Feature& f : det_features) {
    const double n = f.vec.norm();
    if (n <= 0.0) throw std::invalid_argument("appearance_score: zero-norm feature");
    int idx = 0;
    for (const Feature& entry : bank.entries()) {
      // bank entries are unit norm already
      sims[idx++] = std::max(0.0, entry.vec.dot(f.vec) / n);
    }
    std::partial_sort(sims.begin(), sims.begin() + top_k, sims.end(),
                      std::greater<double>());
    for (int k = 0; k < top_k; ++k) total += sims[k];
  }
  const double avg = total / (static_cast<double>(det_features.size()) * top_k);
  return std::clamp(avg, 0.0, 1.0);
}

AffinityMatrix appearance_affinity(
    const std::vector<std::vector<Feature>>& det_features,
    const std::vector<const FeatureMemoryBank*>& banks, int top_k,
    const AffinityMatrix& fallback) {
  const auto rows = static_cast<Eigen::Index>(banks.size());
  const auto cols = static_cast<Eigen::Index>(det_features.size());
  if (fallback.rows() != rows || fallback.cols() != cols)
    throw std::invalid_argument("appearance_affinity: fallback shape mismatch");
  AffinityMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j)
      m(i, j) = appearance_score(det_features[j], *banks[i], top_k, fallback(i, j));
  return m;
}

AffinityMatrix fuse_affinity(const AffinityMatrix& geometry,
                             const AffinityMatrix& appearance, double alpha) {
  if (geometry.rows() != appearance.rows() || geometry.cols() != appearance.cols())
    throw std::invalid_argument("fuse_affinity: shape mismatch");
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw std::invalid_argument("fuse_affinity: alpha outside [0, 1]");
  return alpha * geometry + (1.0 - alpha) * appearance;
}

std::vector<int> hungarian_max(const Eigen::MatrixXd& scores) {
  const int n = static_cast<int>(scores.rows());
  if (scores.cols() != n)
    throw std::invalid_argument("hungarian_max: matrix must be square");
  if (n == 0) return {};

  // shortest-augmenting-path formulation on costs, O(n^3); 1-based arrays,
  // column 0 is the virtual start
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      int j1 = -1;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = -scores(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= n; ++j)
    if (p[j] >= 1) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

Assignment assign(const AffinityMatrix& scores, double min_score) {
  const int rows = static_cast<int>(scores.rows());
  const int cols = static_cast<int>(scores.cols());
  Assignment out;

  const int n = std::max(rows, cols);
  if (n > 0) {
    Eigen::MatrixXd padded = Eigen::MatrixXd::Constant(n, n, kPadScore);
    padded.topLeftCorner(rows, cols) = scores;
    const std::vector<int> row_to_col = hungarian_max(padded);

    std::vector<char> col_matched(cols, 0);
    for (int i = 0; i < rows; ++i) {
      const int j = row_to_col[i];
      if (j >= 0 && j < cols && scores(i, j) >= min_score) {
        out.matches.emplace_back(i, j);
        col_matched[j] = 1;
      } else {
        out.unmatched_rows.push_back(i);
      }
    }
    for (int j = 0; j < cols; ++j)
      if (!col_matched[j]) out.unmatched_cols.push_back(j);
  }
  return out;
}

}  // namespace courttrack
