#include "sldisp/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json_fields.hpp"

namespace sldisp {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw Error(ErrorCode::ValidationError, message);
}

}  // namespace

void PipelineConfig::validate() const {
  intrinsics.validate();
  jig.validate();
  require(std::abs(initial_pitch_deg) <= 60.0, "initial_angles.pitch_deg must lie within +-60");
  require(std::abs(initial_yaw_deg) <= 60.0, "initial_angles.yaw_deg must lie within +-60");
  require(min_blob_area >= 1, "detection.min_blob_area must be at least 1");

  const TrackerOptions& t = tracking.tracker;
  require(t.window >= 3 && t.window % 2 == 1, "tracker.window must be an odd integer >= 3");
  require(t.levels >= 1, "tracker.levels must be at least 1");
  require(t.max_iter >= 1, "tracker.max_iter must be at least 1");
  require(t.eps > 0.0, "tracker.eps must be positive");
  const CornerOptions& c = tracking.corners;
  require(c.max_points >= 1, "tracker.max_points must be at least 1");
  require(c.quality > 0.0 && c.quality <= 1.0, "tracker.quality must lie in (0, 1]");
  require(c.min_separation >= 0.0, "tracker.min_separation must be non-negative");
  if (roi) require(roi->width > 0 && roi->height > 0 && roi->x >= 0 && roi->y >= 0,
                   "tracker.roi must have non-negative origin and positive size");
  require(fps > 0.0, "fps must be positive");
}

bool PipelineConfig::operator==(const PipelineConfig& o) const {
  auto same_roi = [](const std::optional<Rect>& a, const std::optional<Rect>& b) {
    if (a.has_value() != b.has_value()) return false;
    return !a || (a->x == b->x && a->y == b->y && a->width == b->width && a->height == b->height);
  };
  const TrackerOptions &t = tracking.tracker, &ot = o.tracking.tracker;
  const CornerOptions &c = tracking.corners, &oc = o.tracking.corners;
  return intrinsics.fx == o.intrinsics.fx && intrinsics.fy == o.intrinsics.fy &&
         intrinsics.cx == o.intrinsics.cx && intrinsics.cy == o.intrinsics.cy &&
         jig.side_length == o.jig.side_length && jig.distance == o.jig.distance &&
         initial_pitch_deg == o.initial_pitch_deg && initial_yaw_deg == o.initial_yaw_deg &&
         min_blob_area == o.min_blob_area && t.window == ot.window && t.levels == ot.levels &&
         t.max_iter == ot.max_iter && t.eps == ot.eps && c.max_points == oc.max_points &&
         c.quality == oc.quality && c.min_separation == oc.min_separation &&
         same_roi(roi, o.roi) && fps == o.fps && seed == o.seed;
}

PipelineConfig parse_config(const std::string& json_text) {
  const nlohmann::json root = detail::parse_json(json_text);
  detail::FieldReader doc(root, "");
  PipelineConfig cfg;

  auto k = doc.object("intrinsics", true);
  cfg.intrinsics = {k.number("fx"), k.number("fy"), k.number("cx"), k.number("cy")};
  k.finish();

  auto jig = doc.object("jig", true);
  cfg.jig = {jig.number("side_length_m"), jig.number("distance_m")};
  jig.finish();

  auto angles = doc.object("initial_angles", false);
  cfg.initial_pitch_deg = angles.number("pitch_deg", 0.0);
  cfg.initial_yaw_deg = angles.number("yaw_deg", 0.0);
  angles.finish();

  auto detection = doc.object("detection", false);
  cfg.min_blob_area = detection.integer("min_blob_area", cfg.min_blob_area);
  detection.finish();

  auto tracker = doc.object("tracker", false);
  TrackerOptions& t = cfg.tracking.tracker;
  CornerOptions& c = cfg.tracking.corners;
  t.window = tracker.integer("window", t.window);
  t.levels = tracker.integer("levels", t.levels);
  t.max_iter = tracker.integer("max_iter", t.max_iter);
  t.eps = tracker.number("eps", t.eps);
  c.max_points = tracker.integer("max_points", c.max_points);
  c.quality = tracker.number("quality", c.quality);
  c.min_separation = tracker.number("min_separation", c.min_separation);
  if (tracker.has("roi")) {
    const std::vector<int> r = tracker.integer_list("roi");
    if (r.size() != 4) {
      throw Error(ErrorCode::ValidationError, "tracker.roi must be [x, y, width, height]");
    }
    cfg.roi = Rect{r[0], r[1], r[2], r[3]};
  }
  tracker.finish();

  cfg.fps = doc.number("fps", cfg.fps);
  cfg.seed = doc.unsigned_integer("seed", cfg.seed);
  doc.finish();

  cfg.validate();
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_config(buffer.str());
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::string serialize_config(const PipelineConfig& cfg) {
  nlohmann::ordered_json j;
  j["intrinsics"] = {{"fx", cfg.intrinsics.fx},
                     {"fy", cfg.intrinsics.fy},
                     {"cx", cfg.intrinsics.cx},
                     {"cy", cfg.intrinsics.cy}};
  j["jig"] = {{"side_length_m", cfg.jig.side_length}, {"distance_m", cfg.jig.distance}};
  j["initial_angles"] = {{"pitch_deg", cfg.initial_pitch_deg}, {"yaw_deg", cfg.initial_yaw_deg}};
  j["detection"] = {{"min_blob_area", cfg.min_blob_area}};
  const TrackerOptions& t = cfg.tracking.tracker;
  const CornerOptions& c = cfg.tracking.corners;
  nlohmann::ordered_json tracker = {{"window", t.window},         {"levels", t.levels},
                                    {"max_iter", t.max_iter},     {"eps", t.eps},
                                    {"max_points", c.max_points}, {"quality", c.quality},
                                    {"min_separation", c.min_separation}};
  if (cfg.roi) tracker["roi"] = {cfg.roi->x, cfg.roi->y, cfg.roi->width, cfg.roi->height};
  j["tracker"] = tracker;
  j["fps"] = cfg.fps;
  j["seed"] = cfg.seed;
  return j.dump(2) + "\n";
}

void save_config(const std::filesystem::path& path, const PipelineConfig& config) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write config " + path.string());
  out << serialize_config(config);
  if (!out) throw Error(ErrorCode::IoError, "failed while writing " + path.string());
}

}  // namespace sldisp
