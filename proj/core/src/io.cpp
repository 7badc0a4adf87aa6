#include "courttrack/io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace courttrack {

namespace {

void check_version(const nlohmann::json& j) {
  if (!j.contains("v") || !j["v"].is_number_integer() ||
      j["v"].get<long>() != kSchemaVersion)
    throw std::runtime_error("unsupported schema version");
}

Eigen::Vector3d vec3_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 3)
    throw std::runtime_error("expected a 3-element array");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

nlohmann::json vec3_to_json(const Eigen::Vector3d& v) {
  return nlohmann::json::array({json_num(v.x()), json_num(v.y()),
                                json_num(v.z())});
}

// applies fn to every non-blank line, rewrapping errors with the line number
template <typename Fn>
void for_each_line(std::istream& is, const char* what, Fn&& fn) {
  std::string line;
  long line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      fn(nlohmann::json::parse(line));
    } catch (const std::exception& e) {
      throw std::runtime_error(std::string(what) + " line " +
                               std::to_string(line_no) + ": " + e.what());
    }
  }
}

nlohmann::json field_to_json(const FieldModel& f) {
  return {{"x_min", json_num(f.x_min)}, {"x_max", json_num(f.x_max)},
          {"y_min", json_num(f.y_min)}, {"y_max", json_num(f.y_max)},
          {"margin", json_num(f.margin)}};
}

FieldModel field_from_json(const nlohmann::json& j) {
  FieldModel f;
  f.x_min = j.value("x_min", f.x_min);
  f.x_max = j.value("x_max", f.x_max);
  f.y_min = j.value("y_min", f.y_min);
  f.y_max = j.value("y_max", f.y_max);
  f.margin = j.value("margin", f.margin);
  return f;
}

nlohmann::json camera_to_json(const CameraModel& cam) {
  nlohmann::json rot = nlohmann::json::array();
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) rot.push_back(json_num(cam.rotation(r, c)));
  return {{"fx", json_num(cam.fx)},       {"fy", json_num(cam.fy)},
          {"cx", json_num(cam.cx)},       {"cy", json_num(cam.cy)},
          {"width", json_num(cam.width)}, {"height", json_num(cam.height)},
          {"rotation", rot},              {"translation", vec3_to_json(cam.translation)}};
}

CameraModel camera_from_json(const nlohmann::json& j) {
  CameraModel cam;
  cam.fx = j.at("fx").get<double>();
  cam.fy = j.at("fy").get<double>();
  cam.cx = j.at("cx").get<double>();
  cam.cy = j.at("cy").get<double>();
  cam.width = j.at("width").get<double>();
  cam.height = j.at("height").get<double>();
  const auto& rot = j.at("rotation");
  if (!rot.is_array() || rot.size() != 9)
    throw std::runtime_error("camera rotation must have 9 entries");
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) cam.rotation(r, c) = rot[r * 3 + c].get<double>();
  cam.translation = vec3_from_json(j.at("translation"));
  cam.validate();
  return cam;
}

nlohmann::json labeled_object_json(int id, const Box3D& box, bool interp) {
  nlohmann::json ob{{"id", id}, {"box", box_to_json(box)}};
  if (interp) ob["interp"] = true;
  return ob;
}

}  // namespace

nlohmann::json json_num(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("json_num: non-finite value");
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", x);
  return nlohmann::json::parse(buf);
}

nlohmann::json box_to_json(const Box3D& box) {
  return {{"c", vec3_to_json(box.center)},
          {"d", vec3_to_json(box.dims)},
          {"yaw", json_num(box.yaw)}};
}

Box3D box_from_json(const nlohmann::json& j) {
  return Box3D(vec3_from_json(j.at("c")), vec3_from_json(j.at("d")),
               j.at("yaw").get<double>());
}

void write_detections_jsonl(std::ostream& os,
                            const std::vector<FrameInput>& frames) {
  for (const FrameInput& f : frames) {
    nlohmann::json dets = nlohmann::json::array();
    for (const Detection& d : f.detections) {
      nlohmann::json feats = nlohmann::json::array();
      for (const DetectionFeature& df : d.features) {
        nlohmann::json vec = nlohmann::json::array();
        for (int i = 0; i < df.feature.vec.size(); ++i)
          vec.push_back(json_num(df.feature.vec[i]));
        feats.push_back({{"view", df.feature.view},
                         {"valid", df.valid},
                         {"vec", std::move(vec)}});
      }
      dets.push_back({{"box", box_to_json(d.box)},
                      {"conf", json_num(d.confidence)},
                      {"features", std::move(feats)}});
    }
    const nlohmann::json line{
        {"v", kSchemaVersion}, {"frame", f.frame}, {"detections", std::move(dets)}};
    os << line.dump() << '\n';
  }
}

std::vector<FrameInput> read_detections_jsonl(std::istream& is) {
  std::vector<FrameInput> frames;
  for_each_line(is, "detections", [&](const nlohmann::json& j) {
    check_version(j);
    FrameInput f;
    f.frame = j.at("frame").get<long>();
    for (const nlohmann::json& dj : j.at("detections")) {
      Detection d;
      d.box = box_from_json(dj.at("box"));
      d.confidence = dj.value("conf", 1.0);
      if (dj.contains("features")) {
        for (const nlohmann::json& fj : dj.at("features")) {
          DetectionFeature df;
          const auto& vec = fj.at("vec");
          df.feature.vec.resize(static_cast<long>(vec.size()));
          for (size_t i = 0; i < vec.size(); ++i)
            df.feature.vec[static_cast<long>(i)] = vec[i].get<double>();
          df.feature.view = fj.value("view", 0);
          df.feature.frame = f.frame;
          df.valid = fj.value("valid", true);
          d.features.push_back(std::move(df));
        }
      }
      f.detections.push_back(std::move(d));
    }
    frames.push_back(std::move(f));
  });
  return frames;
}

void write_labeled_jsonl(std::ostream& os,
                         const std::vector<LabeledFrame>& frames) {
  for (const LabeledFrame& f : frames) {
    nlohmann::json objects = nlohmann::json::array();
    for (const LabeledBox& ob : f.objects)
      objects.push_back(labeled_object_json(ob.id, ob.box, false));
    const nlohmann::json line{
        {"v", kSchemaVersion}, {"frame", f.frame}, {"objects", std::move(objects)}};
    os << line.dump() << '\n';
  }
}

void write_trajectories_jsonl(std::ostream& os, const TrajectorySet& result) {
  for (const auto& [frame, outputs] : result.frames) {
    nlohmann::json objects = nlohmann::json::array();
    for (const TrackOutput& t : outputs)
      objects.push_back(labeled_object_json(t.id, t.box, t.interpolated));
    const nlohmann::json line{
        {"v", kSchemaVersion}, {"frame", frame}, {"objects", std::move(objects)}};
    os << line.dump() << '\n';
  }
}

std::vector<LabeledFrame> read_labeled_jsonl(std::istream& is) {
  std::vector<LabeledFrame> frames;
  for_each_line(is, "labeled frames", [&](const nlohmann::json& j) {
    check_version(j);
    LabeledFrame f;
    f.frame = j.at("frame").get<long>();
    for (const nlohmann::json& oj : j.at("objects"))
      f.objects.push_back({oj.at("id").get<int>(), box_from_json(oj.at("box"))});
    frames.push_back(std::move(f));
  });
  return frames;
}

nlohmann::json scenario_to_json(const ScenarioConfig& config) {
  nlohmann::json agents = nlohmann::json::array();
  for (const AgentScript& a : config.agents) {
    nlohmann::json wps = nlohmann::json::array();
    for (const Eigen::Vector2d& w : a.waypoints)
      wps.push_back({json_num(w.x()), json_num(w.y())});
    nlohmann::json speeds = nlohmann::json::array();
    for (double s : a.speeds) speeds.push_back(json_num(s));
    agents.push_back({{"waypoints", std::move(wps)},
                      {"speeds", std::move(speeds)},
                      {"dims", vec3_to_json(a.dims)},
                      {"team", a.team}});
  }
  nlohmann::json cameras = nlohmann::json::array();
  for (const CameraModel& cam : config.cameras) cameras.push_back(camera_to_json(cam));
  nlohmann::json lidars = nlohmann::json::array();
  for (const LidarModel& l : config.lidars)
    lidars.push_back({{"center", {json_num(l.center.x()), json_num(l.center.y())}},
                      {"alpha", json_num(l.alpha)},
                      {"scale", json_num(l.scale)},
                      {"theta0", json_num(l.theta0)}});
  return {{"v", kSchemaVersion},
          {"seed", config.seed},
          {"field", field_to_json(config.field)},
          {"agents", std::move(agents)},
          {"cameras", std::move(cameras)},
          {"lidars", std::move(lidars)},
          {"frame_rate", json_num(config.frame_rate)},
          {"duration", json_num(config.duration)},
          {"noise",
           {{"pos_sigma", json_num(config.noise.pos_sigma)},
            {"feat_sigma", json_num(config.noise.feat_sigma)},
            {"merge_dist", json_num(config.noise.merge_dist)},
            {"min_points", config.noise.min_points},
            {"dropout", json_num(config.noise.dropout)},
            {"occlusion_iou", json_num(config.noise.occlusion_iou)}}},
          {"embedding_dim", config.embedding_dim},
          {"team_mix", json_num(config.team_mix)}};
}

ScenarioConfig scenario_from_json(const nlohmann::json& j) {
  check_version(j);
  ScenarioConfig config;
  config.seed = j.value("seed", config.seed);
  if (j.contains("field")) config.field = field_from_json(j.at("field"));
  for (const nlohmann::json& aj : j.value("agents", nlohmann::json::array())) {
    AgentScript a;
    for (const nlohmann::json& wj : aj.at("waypoints")) {
      if (!wj.is_array() || wj.size() != 2)
        throw std::runtime_error("waypoint must be [x, y]");
      a.waypoints.emplace_back(wj[0].get<double>(), wj[1].get<double>());
    }
    for (const nlohmann::json& sj : aj.value("speeds", nlohmann::json::array()))
      a.speeds.push_back(sj.get<double>());
    if (aj.contains("dims")) a.dims = vec3_from_json(aj.at("dims"));
    a.team = aj.value("team", -1);
    config.agents.push_back(std::move(a));
  }
  for (const nlohmann::json& cj : j.value("cameras", nlohmann::json::array()))
    config.cameras.push_back(camera_from_json(cj));
  for (const nlohmann::json& lj : j.value("lidars", nlohmann::json::array())) {
    LidarModel l;
    if (lj.contains("center")) {
      const auto& c = lj.at("center");
      if (!c.is_array() || c.size() != 2)
        throw std::runtime_error("lidar center must be [x, y]");
      l.center = {c[0].get<double>(), c[1].get<double>()};
    }
    l.alpha = lj.value("alpha", l.alpha);
    l.scale = lj.value("scale", l.scale);
    l.theta0 = lj.value("theta0", l.theta0);
    config.lidars.push_back(l);
  }
  config.frame_rate = j.value("frame_rate", config.frame_rate);
  config.duration = j.value("duration", config.duration);
  if (j.contains("noise")) {
    const nlohmann::json& nj = j.at("noise");
    config.noise.pos_sigma = nj.value("pos_sigma", config.noise.pos_sigma);
    config.noise.feat_sigma = nj.value("feat_sigma", config.noise.feat_sigma);
    config.noise.merge_dist = nj.value("merge_dist", config.noise.merge_dist);
    config.noise.min_points = nj.value("min_points", config.noise.min_points);
    config.noise.dropout = nj.value("dropout", config.noise.dropout);
    config.noise.occlusion_iou = nj.value("occlusion_iou", config.noise.occlusion_iou);
  }
  config.embedding_dim = j.value("embedding_dim", config.embedding_dim);
  config.team_mix = j.value("team_mix", config.team_mix);
  config.validate();
  return config;
}

nlohmann::json run_config_to_json(const RunConfig& config) {
  const TrackerConfig& t = config.tracker;
  const KalmanParams& k = t.kalman;
  return {{"v", kSchemaVersion},
          {"alpha", json_num(t.alpha)},
          {"top_k", t.top_k},
          {"bank_capacity", t.bank_capacity},
          {"bank_window", t.bank_window},
          {"min_score", json_num(t.min_score)},
          {"regain_threshold", json_num(t.regain_threshold)},
          {"r0", json_num(t.r0)},
          {"v_max", json_num(t.v_max)},
          {"hit_confirm", t.hit_confirm},
          {"max_broken_age", t.max_broken_age},
          {"confidence_gate", json_num(t.confidence_gate)},
          {"enable_regain", t.enable_regain},
          {"enable_geometry_constraint", t.enable_geometry_constraint},
          {"frame_rate", json_num(t.frame_rate)},
          {"field", field_to_json(t.field)},
          {"kalman",
           {{"process_var_pos", json_num(k.process_var_pos)},
            {"process_var_vel", json_num(k.process_var_vel)},
            {"process_var_shape", json_num(k.process_var_shape)},
            {"meas_std_pos", json_num(k.meas_std_pos)},
            {"meas_std_dims", json_num(k.meas_std_dims)},
            {"meas_std_yaw", json_num(k.meas_std_yaw)},
            {"init_var_pos", json_num(k.init_var_pos)},
            {"init_var_vel", json_num(k.init_var_vel)},
            {"init_var_shape", json_num(k.init_var_shape)}}},
          {"metric_gate", json_num(config.metric_gate)},
          {"occlusion_iou", json_num(config.occlusion_iou)}};
}

RunConfig run_config_from_json(const nlohmann::json& j) {
  check_version(j);
  RunConfig config;
  TrackerConfig& t = config.tracker;
  t.alpha = j.value("alpha", t.alpha);
  t.top_k = j.value("top_k", t.top_k);
  t.bank_capacity = j.value("bank_capacity", t.bank_capacity);
  t.bank_window = j.value("bank_window", t.bank_window);
  t.min_score = j.value("min_score", t.min_score);
  t.regain_threshold = j.value("regain_threshold", t.regain_threshold);
  t.r0 = j.value("r0", t.r0);
  t.v_max = j.value("v_max", t.v_max);
  t.hit_confirm = j.value("hit_confirm", t.hit_confirm);
  t.max_broken_age = j.value("max_broken_age", t.max_broken_age);
  t.confidence_gate = j.value("confidence_gate", t.confidence_gate);
  t.enable_regain = j.value("enable_regain", t.enable_regain);
  t.enable_geometry_constraint =
      j.value("enable_geometry_constraint", t.enable_geometry_constraint);
  t.frame_rate = j.value("frame_rate", t.frame_rate);
  if (j.contains("field")) t.field = field_from_json(j.at("field"));
  if (j.contains("kalman")) {
    const nlohmann::json& kj = j.at("kalman");
    KalmanParams& k = t.kalman;
    k.process_var_pos = kj.value("process_var_pos", k.process_var_pos);
    k.process_var_vel = kj.value("process_var_vel", k.process_var_vel);
    k.process_var_shape = kj.value("process_var_shape", k.process_var_shape);
    k.meas_std_pos = kj.value("meas_std_pos", k.meas_std_pos);
    k.meas_std_dims = kj.value("meas_std_dims", k.meas_std_dims);
    k.meas_std_yaw = kj.value("meas_std_yaw", k.meas_std_yaw);
    k.init_var_pos = kj.value("init_var_pos", k.init_var_pos);
    k.init_var_vel = kj.value("init_var_vel", k.init_var_vel);
    k.init_var_shape = kj.value("init_var_shape", k.init_var_shape);
  }
  config.metric_gate = j.value("metric_gate", config.metric_gate);
  config.occlusion_iou = j.value("occlusion_iou", config.occlusion_iou);
  t.validate();
  if (!(config.metric_gate >= 0.0 && config.metric_gate <= 1.0))
    throw std::runtime_error("metric_gate must be in [0, 1]");
  return config;
}

nlohmann::json report_to_json(const MetricsReport& report) {
  auto arr = [](const std::array<double, kHotaThresholds>& a) {
    nlohmann::json out = nlohmann::json::array();
    for (double v : a) out.push_back(json_num(v));
    return out;
  };
  return {{"v", kSchemaVersion},
          {"clear",
           {{"mota", json_num(report.clear.mota)},
            {"motp", json_num(report.clear.motp)},
            {"id_switches", report.clear.id_switches},
            {"fragmentations", report.clear.fragmentations},
            {"false_positives", report.clear.false_positives},
            {"false_negatives", report.clear.false_negatives},
            {"gt_count", report.clear.gt_count}}},
          {"hota",
           {{"hota", json_num(report.hota.hota)},
            {"deta", json_num(report.hota.deta)},
            {"assa", json_num(report.hota.assa)},
            {"hota_at", arr(report.hota.hota_at)},
            {"deta_at", arr(report.hota.deta_at)},
            {"assa_at", arr(report.hota.assa_at)}}}};
}

std::string report_to_text(const MetricsReport& report) {
  auto num = [](double x) { return json_num(x).dump(); };
  std::ostringstream os;
  os << "MOTA=" << num(report.clear.mota) << '\n'
     << "MOTP=" << num(report.clear.motp) << '\n'
     << "IDS=" << report.clear.id_switches << '\n'
     << "FRAG=" << report.clear.fragmentations << '\n'
     << "FP=" << report.clear.false_positives << '\n'
     << "FN=" << report.clear.false_negatives << '\n'
     << "GT=" << report.clear.gt_count << '\n'
     << "HOTA=" << num(report.hota.hota) << '\n'
     << "DetA=" << num(report.hota.deta) << '\n'
     << "AssA=" << num(report.hota.assa) << '\n';
  return os.str();
}

nlohmann::json stats_to_json(const PlayerStats& stats, int track_id) {
  return {{"v", kSchemaVersion},
          {"track", track_id},
          {"playing_time", json_num(stats.playing_time)},
          {"distance", json_num(stats.distance)},
          {"sprint_time", json_num(stats.sprint_time)},
          {"sprint_distance", json_num(stats.sprint_distance)},
          {"jog_time", json_num(stats.jog_time)},
          {"top_speed", json_num(stats.top_speed)}};
}

nlohmann::json pose_to_json(const Pose3D& pose) {
  nlohmann::json joints = nlohmann::json::array();
  for (const Eigen::Vector3d& j : pose.joints) joints.push_back(vec3_to_json(j));
  return {{"v", kSchemaVersion}, {"joints", std::move(joints)}};
}

Pose3D pose_from_json(const nlohmann::json& j) {
  check_version(j);
  Pose3D pose;
  for (const nlohmann::json& jj : j.at("joints"))
    pose.joints.push_back(vec3_from_json(jj));
  return pose;
}

nlohmann::json cameras_to_json(const std::vector<CameraModel>& cams) {
  nlohmann::json arr = nlohmann::json::array();
  for (const CameraModel& cam : cams) arr.push_back(camera_to_json(cam));
  return {{"v", kSchemaVersion}, {"cameras", std::move(arr)}};
}

std::vector<CameraModel> cameras_from_json(const nlohmann::json& j) {
  check_version(j);
  std::vector<CameraModel> cams;
  for (const nlohmann::json& cj : j.at("cameras"))
    cams.push_back(camera_from_json(cj));
  return cams;
}

nlohmann::json pseudo2d_to_json(
    const std::vector<std::vector<std::pair<Eigen::Vector2d, bool>>>& views) {
  nlohmann::json vs = nlohmann::json::array();
  for (const auto& view : views) {
    nlohmann::json joints = nlohmann::json::array();
    for (const auto& [pt, valid] : view) {
      if (valid)
        joints.push_back({json_num(pt.x()), json_num(pt.y())});
      else
        joints.push_back(nullptr);
    }
    vs.push_back(std::move(joints));
  }
  return {{"v", kSchemaVersion}, {"views", std::move(vs)}};
}

std::vector<std::vector<std::pair<Eigen::Vector2d, bool>>> pseudo2d_from_json(
    const nlohmann::json& j) {
  check_version(j);
  std::vector<std::vector<std::pair<Eigen::Vector2d, bool>>> views;
  for (const nlohmann::json& vj : j.at("views")) {
    std::vector<std::pair<Eigen::Vector2d, bool>> view;
    for (const nlohmann::json& jj : vj) {
      if (jj.is_null()) {
        view.emplace_back(Eigen::Vector2d::Zero(), false);
      } else {
        if (!jj.is_array() || jj.size() != 2)
          throw std::runtime_error("pseudo 2D joint must be [u, v] or null");
        view.emplace_back(Eigen::Vector2d(jj[0].get<double>(), jj[1].get<double>()),
                          true);
      }
    }
    views.push_back(std::move(view));
  }
  return views;
}

void write_heatmap(const std::string& meta_path, const std::string& data_path,
                   const Heatmap3D& h) {
  static_assert(sizeof(float) == 4);
  std::ofstream data(data_path, std::ios::binary);
  if (!data) throw std::runtime_error("cannot open " + data_path);
  for (double v : h.values) {
    float f = static_cast<float>(v);
    uint32_t bits;
    std::memcpy(&bits, &f, 4);
    if constexpr (std::endian::native == std::endian::big)
      bits = __builtin_bswap32(bits);
    data.write(reinterpret_cast<const char*>(&bits), 4);
  }
  data.close();
  if (!data) throw std::runtime_error("failed writing " + data_path);

  const nlohmann::json meta{
      {"v", kSchemaVersion},
      {"data", std::filesystem::path(data_path).filename().string()},
      {"dims", {h.nx, h.ny, h.nz}},
      {"origin", vec3_to_json(h.origin)},
      {"pitch", json_num(h.pitch)},
      {"dtype", "f32le"}};
  std::ofstream ms(meta_path);
  if (!ms) throw std::runtime_error("cannot open " + meta_path);
  ms << meta.dump(2) << '\n';
}

Heatmap3D read_heatmap(const std::string& meta_path) {
  std::ifstream ms(meta_path);
  if (!ms) throw std::runtime_error("cannot open " + meta_path);
  nlohmann::json meta;
  ms >> meta;
  check_version(meta);
  if (meta.at("dtype").get<std::string>() != "f32le")
    throw std::runtime_error("heatmap dtype must be f32le");
  const auto& dims = meta.at("dims");
  if (!dims.is_array() || dims.size() != 3)
    throw std::runtime_error("heatmap dims must have 3 entries");
  Heatmap3D h(dims[0].get<int>(), dims[1].get<int>(), dims[2].get<int>(),
              vec3_from_json(meta.at("origin")), meta.at("pitch").get<double>());

  const std::filesystem::path data_path =
      std::filesystem::path(meta_path).parent_path() /
      meta.at("data").get<std::string>();
  std::ifstream data(data_path, std::ios::binary);
  if (!data) throw std::runtime_error("cannot open " + data_path.string());
  for (double& v : h.values) {
    uint32_t bits;
    if (!data.read(reinterpret_cast<char*>(&bits), 4))
      throw std::runtime_error("heatmap data truncated: " + data_path.string());
    if constexpr (std::endian::native == std::endian::big)
      bits = __builtin_bswap32(bits);
    float f;
    std::memcpy(&f, &bits, 4);
    v = f;
  }
  char extra;
  if (data.read(&extra, 1))
    throw std::runtime_error("heatmap data has trailing bytes: " +
                             data_path.string());
  return h;
}

}  // namespace courttrack
