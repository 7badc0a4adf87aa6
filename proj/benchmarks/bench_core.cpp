#include <benchmark/benchmark.h>

#include "courttrack/association.hpp"
#include "courttrack/geometry.hpp"
#include "courttrack/metrics.hpp"
#include "courttrack/pose_prior.hpp"
#include "courttrack/rng.hpp"
#include "courttrack/simulator.hpp"
#include "courttrack/tracker.hpp"

namespace courttrack {
namespace {

Box3D random_box(Rng& rng, double span) {
  return Box3D({rng.uniform(-span, span), rng.uniform(-span, span),
                rng.uniform(-1.0, 1.0)},
               {rng.uniform(0.3, 2.0), rng.uniform(0.3, 2.0),
                rng.uniform(0.5, 2.0)},
               rng.uniform(-3.0, 3.0));
}

void BM_Diou3d(benchmark::State& state) {
  Rng rng(1);
  std::vector<std::pair<Box3D, Box3D>> pairs;
  for (int i = 0; i < 256; ++i) {
    Box3D a = random_box(rng, 3.0);
    Box3D b(a.center + Eigen::Vector3d(rng.uniform(-1, 1), rng.uniform(-1, 1),
                                       rng.uniform(-0.3, 0.3)),
            a.dims, rng.uniform(-3.0, 3.0));
    pairs.emplace_back(a, b);
  }
  size_t i = 0;
  for (auto _ : state) {
    const auto& [a, b] = pairs[i++ & 255];
    benchmark::DoNotOptimize(diou3d(a, b));
  }
}
BENCHMARK(BM_Diou3d);

void BM_HungarianMax(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(2);
  Eigen::MatrixXd scores(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) scores(r, c) = rng.uniform01();
  for (auto _ : state) benchmark::DoNotOptimize(hungarian_max(scores));
}
BENCHMARK(BM_HungarianMax)->Arg(8)->Arg(16)->Arg(32);

void BM_AppearanceAffinity(benchmark::State& state) {
  const int tracks = 12, dets = 12, dim = 128;
  Rng rng(3);
  const auto unit = [&] {
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i) v[i] = rng.normal();
    return Eigen::VectorXd(v.normalized());
  };
  std::vector<FeatureMemoryBank> banks;
  for (int t = 0; t < tracks; ++t) {
    FeatureMemoryBank bank(60, 1000);
    for (int k = 0; k < 60; ++k) bank.add({unit(), 0, k});
    banks.push_back(std::move(bank));
  }
  std::vector<const FeatureMemoryBank*> bank_ptrs;
  for (const FeatureMemoryBank& b : banks) bank_ptrs.push_back(&b);
  std::vector<std::vector<Feature>> det_features(dets);
  for (auto& fs : det_features)
    for (int v = 0; v < 3; ++v) fs.push_back({unit(), v, 1000});
  const Eigen::MatrixXd fallback = Eigen::MatrixXd::Zero(tracks, dets);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        appearance_affinity(det_features, bank_ptrs, 5, fallback));
}
BENCHMARK(BM_AppearanceAffinity);

ScenarioConfig bench_scenario() {
  ScenarioConfig c;
  c.seed = 5;
  c.duration = 30.0;
  c.embedding_dim = 128;
  c.cameras = {make_lookat_camera({14, -12, 7}, {14, 7.5, 1}, 500, 500, 1280, 720)};
  Rng layout(99);
  for (int i = 0; i < 10; ++i) {
    AgentScript a;
    for (int w = 0; w < 4; ++w)
      a.waypoints.push_back({layout.uniform(2.0, 26.0), layout.uniform(2.0, 13.0)});
    a.speeds = {layout.uniform(1.5, 5.0)};
    c.agents.push_back(std::move(a));
  }
  return c;
}

void BM_TrackerStep(benchmark::State& state) {
  const ScenarioConfig scenario = bench_scenario();
  const GroundTruth gt = generate(scenario);
  const std::vector<FrameInput> frames = render_detections(gt, scenario);
  TrackerConfig cfg;
  for (auto _ : state) {
    state.PauseTiming();
    Tracker tracker(cfg);
    state.ResumeTiming();
    for (const FrameInput& f : frames) benchmark::DoNotOptimize(tracker.step(f));
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<long>(frames.size()));
}
BENCHMARK(BM_TrackerStep)->Unit(benchmark::kMillisecond);

void BM_Hota(benchmark::State& state) {
  const ScenarioConfig scenario = bench_scenario();
  const GroundTruth gt = generate(scenario);
  const std::vector<FrameInput> frames = render_detections(gt, scenario);
  const TrajectorySet result = run_tracker(TrackerConfig{}, frames);
  std::vector<LabeledFrame> pred;
  for (const auto& [frame, outputs] : result.frames) {
    LabeledFrame f;
    f.frame = frame;
    for (const TrackOutput& t : outputs) f.objects.push_back({t.id, t.box});
    pred.push_back(std::move(f));
  }
  for (auto _ : state) benchmark::DoNotOptimize(hota(gt.frames, pred));
}
BENCHMARK(BM_Hota)->Unit(benchmark::kMillisecond);

void BM_SoftArgmax(benchmark::State& state) {
  const int n = 64;
  Heatmap3D h(n, n, n, {0, 0, 0}, 0.05);
  Rng rng(7);
  for (double& v : h.values) v = rng.uniform01();
  const Heatmap3D normalized = normalize(h);
  for (auto _ : state) benchmark::DoNotOptimize(soft_argmax(normalized));
}
BENCHMARK(BM_SoftArgmax)->Unit(benchmark::kMicrosecond);

void BM_PriorGrad(benchmark::State& state) {
  const SkeletonDef sk = SkeletonDef::coco17();
  Rng rng(8);
  Pose3D p;
  p.joints = {
      {-0.05, 0.00, 1.65},
      {-0.02, 0.04, 1.72},  {-0.02, -0.04, 1.72},
      {-0.06, 0.08, 1.70},  {-0.06, -0.08, 1.70},
      {0.00, 0.20, 1.50},   {0.00, -0.20, 1.50},
      {0.00, 0.25, 1.20},   {0.00, -0.25, 1.20},
      {0.00, 0.25, 0.93},   {0.00, -0.25, 0.93},
      {0.00, 0.15, 1.00},   {0.00, -0.15, 1.00},
      {0.03, 0.15, 0.55},   {0.03, -0.15, 0.55},
      {0.00, 0.15, 0.10},   {0.00, -0.15, 0.10},
  };
  for (auto& j : p.joints)
    j += Eigen::Vector3d(rng.normal(0, 0.03), rng.normal(0, 0.03),
                         rng.normal(0, 0.03));
  for (auto _ : state) benchmark::DoNotOptimize(prior_grad(p, sk));
}
BENCHMARK(BM_PriorGrad);

}  // namespace
}  // namespace courttrack

BENCHMARK_MAIN();
