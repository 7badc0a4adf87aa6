#include "courttrack/regain.hpp"

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

namespace courttrack {
namespace {

FieldModel court() {
  FieldModel f;
  f.x_min = 0.0;
  f.x_max = 28.0;
  f.y_min = 0.0;
  f.y_max = 15.0;
  f.margin = 1.0;
  return f;
}

TEST(FieldModel, ValidatesExtentAndMargin) {
  FieldModel f = court();
  EXPECT_NO_THROW(f.validate());
  f.margin = 0.0;
  EXPECT_THROW(f.validate(), std::invalid_argument);
  f = court();
  f.x_max = f.x_min;
  EXPECT_THROW(f.validate(), std::invalid_argument);
}

TEST(ClassifyExit, EachMarginBand) {
  const FieldModel f = court();
  EXPECT_EQ(classify_exit({14.0, 14.5, 0.9}, f), Edge::North);
  EXPECT_EQ(classify_exit({14.0, 0.5, 0.9}, f), Edge::South);
  EXPECT_EQ(classify_exit({27.5, 7.5, 0.9}, f), Edge::East);
  EXPECT_EQ(classify_exit({0.5, 7.5, 0.9}, f), Edge::West);
}

TEST(ClassifyExit, CenterIsNoExit) {
  EXPECT_FALSE(classify_exit({14.0, 7.5, 0.9}, court()).has_value());
}

TEST(ClassifyExit, NearestEdgeWinsInCorners) {
  const FieldModel f = court();
  // 0.3 from West, 0.6 from South: West is nearer
  EXPECT_EQ(classify_exit({0.3, 0.6, 0.9}, f), Edge::West);
  // 0.6 from West, 0.3 from South
  EXPECT_EQ(classify_exit({0.6, 0.3, 0.9}, f), Edge::South);
}

TEST(ClassifyExit, ExactCornerTieFollowsFixedOrder) {
  const FieldModel f = court();
  // equidistant from South and West: S precedes W in the tie order
  EXPECT_EQ(classify_exit({0.5, 0.5, 0.9}, f), Edge::South);
  // equidistant from North and East: N wins
  EXPECT_EQ(classify_exit({27.5, 14.5, 0.9}, f), Edge::North);
  // equidistant from North and South only happens on degenerate fields;
  // points beyond the field edge still classify by the same rule
  EXPECT_EQ(classify_exit({14.0, 15.3, 0.9}, f), Edge::North);
}

TEST(LocalAreaRadius, GrowsLinearlyWithGap) {
  // r = r0 + v_max * elapsed frames * dt
  EXPECT_DOUBLE_EQ(local_area_radius(0, 0, 0.1, 10.0, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(local_area_radius(0, 10, 0.1, 10.0, 1.0), 1.0 + 10.0);
  EXPECT_DOUBLE_EQ(local_area_radius(5, 8, 0.5, 2.0, 0.5), 0.5 + 3.0);
}

BrokenTrack inside_break(const Eigen::Vector3d& pos, long at) {
  BrokenTrack b;
  b.id = 1;
  b.exit = std::nullopt;
  b.last_position = pos;
  b.broken_at = at;
  b.predicted = Box3D(pos, {0.6, 0.6, 1.8}, 0.0);
  return b;
}

BrokenTrack edge_break(Edge e, const Eigen::Vector3d& pos, long at) {
  BrokenTrack b = inside_break(pos, at);
  b.exit = e;
  return b;
}

TEST(GeometryConstraint, InsideBreakUsesGrowingRadius) {
  const FieldModel f = court();
  const BrokenTrack b = inside_break({10.0, 7.0, 0.9}, 0);
  const Box3D near({11.5, 7.0, 0.9}, {0.6, 0.6, 1.8}, 0.0);
  const Box3D far({18.0, 7.0, 0.9}, {0.6, 0.6, 1.8}, 0.0);
  // radius at frame 1: 1 + 10 * 0.1 = 2
  EXPECT_TRUE(geometry_constraint(near, b, f, 1, 0.1, 10.0, 1.0));
  EXPECT_FALSE(geometry_constraint(far, b, f, 1, 0.1, 10.0, 1.0));
  // by frame 8 the radius reaches 9 and the far box qualifies
  EXPECT_TRUE(geometry_constraint(far, b, f, 8, 0.1, 10.0, 1.0));
}

TEST(GeometryConstraint, EdgeExitDemandsSameBand) {
  const FieldModel f = court();
  const BrokenTrack b = edge_break(Edge::East, {27.5, 7.5, 0.9}, 0);
  const Box3D east_band({27.4, 9.0, 0.9}, {0.6, 0.6, 1.8}, 0.0);
  const Box3D center({14.0, 7.5, 0.9}, {0.6, 0.6, 1.8}, 0.0);
  const Box3D west_band({0.5, 7.5, 0.9}, {0.6, 0.6, 1.8}, 0.0);
  EXPECT_TRUE(geometry_constraint(east_band, b, f, 3, 0.1, 10.0, 1.0));
  EXPECT_FALSE(geometry_constraint(center, b, f, 3, 0.1, 10.0, 1.0));
  EXPECT_FALSE(geometry_constraint(west_band, b, f, 3, 0.1, 10.0, 1.0));
}

Feature unit_x() {
  Feature f;
  f.vec = Eigen::Vector3d(1.0, 0.0, 0.0);
  return f;
}

TEST(RegainScore, FailedConstraintIsSentinel) {
  const BrokenTrack b = inside_break({10, 7, 0.9}, 0);
  const Box3D det({10.5, 7, 0.9}, {0.6, 0.6, 1.8}, 0.0);
  EXPECT_DOUBLE_EQ(regain_score(det, {unit_x()}, b, 0.5, 1, false), -1.0);
}

TEST(RegainScore, EdgeExitScoresAppearanceAlone) {
  FeatureMemoryBank bank(10, 1000);
  Feature fx = unit_x();
  fx.frame = 0;
  bank.add(fx);
  BrokenTrack b = edge_break(Edge::East, {27.5, 7.5, 0.9}, 0);
  b.bank = &bank;
  // detection feature at 36.87 deg from the bank entry: cosine 0.8
  Feature det_f;
  det_f.vec = Eigen::Vector3d(0.8, 0.6, 0.0);
  const Box3D det({27.4, 9.0, 0.9}, {0.6, 0.6, 1.8}, 0.0);
  const double score = regain_score(det, {det_f}, b, 0.5, 1, true);
  EXPECT_NEAR(score, 0.8, 1e-12);
}

TEST(RegainScore, InsideBreakBlendsGeometryAndAppearance) {
  FeatureMemoryBank bank(10, 1000);
  Feature fx = unit_x();
  fx.frame = 0;
  bank.add(fx);
  BrokenTrack b = inside_break({10, 7, 0.9}, 0);
  b.bank = &bank;
  const Box3D det({10.2, 7, 0.9}, {0.6, 0.6, 1.8}, 0.0);
  const double g = diou3d(b.predicted, det);
  Feature det_f;
  det_f.vec = Eigen::Vector3d(0.8, 0.6, 0.0);
  const double score = regain_score(det, {det_f}, b, 0.5, 1, true);
  EXPECT_NEAR(score, 0.5 * g + 0.5 * 0.8, 1e-12);
}

TEST(Regain, GreedyPicksBestScoreFirst) {
  const FieldModel f = court();
  FeatureMemoryBank bank_a(10, 1000), bank_b(10, 1000);
  Feature fa, fb;
  fa.vec = Eigen::Vector3d(1.0, 0.0, 0.0);
  fb.vec = Eigen::Vector3d(0.0, 1.0, 0.0);
  bank_a.add(fa);
  bank_b.add(fb);

  BrokenTrack ta = inside_break({10, 7, 0.9}, 0);
  ta.id = 1;
  ta.bank = &bank_a;
  BrokenTrack tb = inside_break({12, 7, 0.9}, 0);
  tb.id = 2;
  tb.bank = &bank_b;

  // one detection equally near both; appearance decides for track b
  const Box3D det({11, 7, 0.9}, {0.6, 0.6, 1.8}, 0.0);
  std::vector<Feature> det_f = {fb};
  const auto matches =
      regain({det}, {det_f}, {ta, tb}, f, 2, 0.1, 0.5, 1, 0.2, 10.0, 1.0);
  ASSERT_EQ(matches.size(), 1u);
  EXPECT_EQ(matches[0].track, 2);
  EXPECT_EQ(matches[0].detection, 0);
}

TEST(Regain, ThresholdBlocksWeakPairs) {
  const FieldModel f = court();
  FeatureMemoryBank bank(10, 1000);
  Feature fa;
  fa.vec = Eigen::Vector3d(1.0, 0.0, 0.0);
  bank.add(fa);
  BrokenTrack t = inside_break({10, 7, 0.9}, 0);
  t.bank = &bank;
  // detection far enough that the blended score is tiny but constraint holds
  const Box3D det({11.8, 7, 0.9}, {0.6, 0.6, 1.8}, 0.0);
  Feature orth;
  orth.vec = Eigen::Vector3d(0.0, 1.0, 0.0);
  const auto none =
      regain({det}, {{orth}}, {t}, f, 1, 0.1, 0.5, 1, 0.5, 10.0, 1.0);
  EXPECT_TRUE(none.empty());
  const auto some =
      regain({det}, {{fa}}, {t}, f, 1, 0.1, 0.5, 1, 0.2, 10.0, 1.0);
  EXPECT_EQ(some.size(), 1u);
}

TEST(Regain, EachSideMatchesAtMostOnce) {
  const FieldModel f = court();
  FeatureMemoryBank bank(10, 1000);
  Feature fa;
  fa.vec = Eigen::Vector3d(1.0, 0.0, 0.0);
  bank.add(fa);
  BrokenTrack t1 = inside_break({10, 7, 0.9}, 0);
  t1.id = 1;
  t1.bank = &bank;
  BrokenTrack t2 = inside_break({10.4, 7, 0.9}, 0);
  t2.id = 2;
  t2.bank = &bank;
  const Box3D d0({10.1, 7, 0.9}, {0.6, 0.6, 1.8}, 0.0);
  const Box3D d1({10.3, 7, 0.9}, {0.6, 0.6, 1.8}, 0.0);
  const auto matches = regain({d0, d1}, {{fa}, {fa}}, {t1, t2}, f, 1, 0.1, 0.5,
                              1, 0.2, 10.0, 1.0);
  ASSERT_EQ(matches.size(), 2u);
  EXPECT_NE(matches[0].track, matches[1].track);
  EXPECT_NE(matches[0].detection, matches[1].detection);
}

TEST(Regain, ConstraintToggleAdmitsDistantDetection) {
  const FieldModel f = court();
  FeatureMemoryBank bank(10, 1000);
  Feature fa;
  fa.vec = Eigen::Vector3d(1.0, 0.0, 0.0);
  bank.add(fa);
  BrokenTrack t = inside_break({2, 7, 0.9}, 0);
  t.bank = &bank;
  const Box3D det({26, 7, 0.9}, {0.6, 0.6, 1.8}, 0.0);  // 24 m away
  const auto gated =
      regain({det}, {{fa}}, {t}, f, 1, 0.1, 0.5, 1, 0.2, 10.0, 1.0, true);
  EXPECT_TRUE(gated.empty());
  const auto open =
      regain({det}, {{fa}}, {t}, f, 1, 0.1, 0.5, 1, 0.2, 10.0, 1.0, false);
  EXPECT_EQ(open.size(), 1u);
}

TEST(InterpolateGap, LinearInteriorFill) {
  const Box3D b0({0, 0, 0.9}, {0.6, 0.6, 1.8}, 0.0);
  const Box3D b1({4, 2, 0.9}, {0.6, 0.6, 1.8}, 0.0);
  const auto fill = interpolate_gap(10, b0, 14, b1);
  ASSERT_EQ(fill.size(), 3u);
  EXPECT_EQ(fill[0].first, 11);
  EXPECT_EQ(fill[2].first, 13);
  EXPECT_NEAR(fill[0].second.center.x(), 1.0, 1e-12);
  EXPECT_NEAR(fill[1].second.center.x(), 2.0, 1e-12);
  EXPECT_NEAR(fill[1].second.center.y(), 1.0, 1e-12);
}

TEST(InterpolateGap, AdjacentFramesProduceNothing) {
  const Box3D b({0, 0, 0.9}, {0.6, 0.6, 1.8}, 0.0);
  EXPECT_TRUE(interpolate_gap(10, b, 11, b).empty());
}

TEST(InterpolateGap, YawTakesShortArc) {
  constexpr double kPi = std::numbers::pi;
  const Box3D b0({0, 0, 0.9}, {0.6, 0.6, 1.8}, kPi - 0.1);
  const Box3D b1({0, 0, 0.9}, {0.6, 0.6, 1.8}, -kPi + 0.1);
  const auto fill = interpolate_gap(0, b0, 2, b1);
  ASSERT_EQ(fill.size(), 1u);
  // midpoint of the short arc crosses the seam, never zero
  EXPECT_GT(std::abs(fill[0].second.yaw), kPi - 0.2);
}

}  // namespace
}  // namespace courttrack
