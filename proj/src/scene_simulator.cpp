#include "sldisp/scene_simulator.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/LU>

#include "json_fields.hpp"
#include "sldisp/csv.hpp"

namespace sldisp {

GrayImage make_value_noise_texture(int size, int cell, double mean, double contrast,
                                   std::uint64_t seed) {
  if (size < 1 || cell < 1 || size % cell != 0) {
    throw Error(ErrorCode::InvalidArgument, "texture size must be a positive multiple of cell");
  }
  const int lattice = size / cell;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-0.5, 0.5);
  Eigen::MatrixXd knots(lattice, lattice);
  for (int y = 0; y < lattice; ++y) {
    for (int x = 0; x < lattice; ++x) knots(y, x) = unit(rng);
  }
  auto smooth = [](double t) { return t * t * (3.0 - 2.0 * t); };

  GrayImage tile(size, size);
  for (int y = 0; y < size; ++y) {
    const int ky = y / cell;
    const double ty = smooth(static_cast<double>(y % cell) / cell);
    for (int x = 0; x < size; ++x) {
      const int kx = x / cell;
      const double tx = smooth(static_cast<double>(x % cell) / cell);
      const double a = knots(ky, kx), b = knots(ky, (kx + 1) % lattice);
      const double c = knots((ky + 1) % lattice, kx), d = knots((ky + 1) % lattice, (kx + 1) % lattice);
      const double v = (1 - ty) * ((1 - tx) * a + tx * b) + ty * ((1 - tx) * c + tx * d);
      tile(x, y) = static_cast<std::uint8_t>(std::clamp(std::lround(mean + contrast * v), 0L, 255L));
    }
  }
  return tile;
}

void SceneSpec::validate() const {
  K.validate();
  jig.validate();
  if (!pose.is_valid()) throw Error(ErrorCode::ValidationError, "pose must lie within +-90 degrees");
  if (width < 1 || height < 1) throw Error(ErrorCode::ValidationError, "image size must be positive");
  if (texture.empty()) throw Error(ErrorCode::ValidationError, "texture tile is empty");
  if (!(mm_per_texel > 0.0)) throw Error(ErrorCode::ValidationError, "texture.mm_per_texel must be positive");
  if (!(spot_sigma > 0.0)) throw Error(ErrorCode::ValidationError, "spot_sigma_px must be positive");
  if (!(spot_peak > background)) {
    throw Error(ErrorCode::ValidationError, "spot_peak must exceed background");
  }
  if (!(noise_sigma >= 0.0)) throw Error(ErrorCode::ValidationError, "noise_sigma must be >= 0");
  if (motion_mm.empty()) throw Error(ErrorCode::ValidationError, "motion must have at least one frame");
  if (motion_mm.front() != 0.0) throw Error(ErrorCode::ValidationError, "motion must start at rest");
  if (!(fps > 0.0)) throw Error(ErrorCode::ValidationError, "fps must be positive");
}

namespace {

double sample_tile(const GrayImage& tile, double x, double y) {
  const int w = tile.width(), h = tile.height();
  const double fx = std::floor(x), fy = std::floor(y);
  const double ax = x - fx, ay = y - fy;
  auto wrap = [](long v, int n) { return static_cast<int>(((v % n) + n) % n); };
  const int x0 = wrap(static_cast<long>(fx), w), x1 = wrap(static_cast<long>(fx) + 1, w);
  const int y0 = wrap(static_cast<long>(fy), h), y1 = wrap(static_cast<long>(fy) + 1, h);
  const double top = (1 - ax) * tile(x0, y0) + ax * tile(x1, y0);
  const double bottom = (1 - ax) * tile(x0, y1) + ax * tile(x1, y1);
  return (1 - ay) * top + ay * bottom;
}

}  // namespace

RenderedFrame render_frame(const SceneSpec& spec, int frame_index) {
  spec.validate();
  if (frame_index < 0 || frame_index >= spec.frame_count()) {
    throw Error(ErrorCode::InvalidArgument, "frame index outside the motion profile");
  }
  const RotationMatrix R = rotation_from_angles(spec.pose);
  const double offset_m = spec.motion_mm[static_cast<std::size_t>(frame_index)] / 1000.0;
  const Eigen::Vector3d T(0.0, offset_m, 0.0);
  const Eigen::Vector3d normal = R.col(2);
  // Plane: {R (s, t, D) + T}, i.e. normal . X = D + normal . T.
  const double plane_offset = spec.jig.distance + normal.dot(T);
  const Eigen::Matrix3d K_inv = spec.K.matrix().inverse();
  const double texels_per_m = 1000.0 / spec.mm_per_texel;
  const double half_extent = 0.5 * spec.texture_extent;
  const bool bounded = spec.texture_extent > 0.0;

  Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> canvas(spec.height,
                                                                                 spec.width);
  for (int v = 0; v < spec.height; ++v) {
    for (int u = 0; u < spec.width; ++u) {
      const Eigen::Vector3d ray = K_inv * Eigen::Vector3d(u, v, 1.0);
      const double denom = normal.dot(ray);
      double value = spec.background;
      if (denom > 0.0) {
        const Eigen::Vector3d X = ray * (plane_offset / denom);
        const Eigen::Vector3d local = R.transpose() * (X - T);
        const double s = local.x(), t = local.y();
        if (!bounded || (std::abs(s) <= half_extent && std::abs(t) <= half_extent)) {
          value = sample_tile(spec.texture, s * texels_per_m, t * texels_per_m);
        }
      }
      canvas(v, u) = value;
    }
  }

  RenderedFrame out;
  out.truth.spots = project_points(spec.jig, spec.K, R);
  const double radius = 5.0 * spec.spot_sigma;
  const double inv_two_var = 1.0 / (2.0 * spec.spot_sigma * spec.spot_sigma);
  for (int i = 0; i < 4; ++i) {
    const double cu = out.truth.spots(0, i), cv = out.truth.spots(1, i);
    const int u0 = std::max(0, static_cast<int>(std::floor(cu - radius)));
    const int u1 = std::min(spec.width - 1, static_cast<int>(std::ceil(cu + radius)));
    const int v0 = std::max(0, static_cast<int>(std::floor(cv - radius)));
    const int v1 = std::min(spec.height - 1, static_cast<int>(std::ceil(cv + radius)));
    for (int v = v0; v <= v1; ++v) {
      for (int u = u0; u <= u1; ++u) {
        const double r2 = (u - cu) * (u - cu) + (v - cv) * (v - cv);
        canvas(v, u) += spec.spot_peak * std::exp(-r2 * inv_two_var);
      }
    }
  }

  if (spec.noise_sigma > 0.0) {
    std::seed_seq seq{static_cast<std::uint32_t>(spec.seed), static_cast<std::uint32_t>(spec.seed >> 32),
                      static_cast<std::uint32_t>(frame_index), 0x6e6f6973u};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> noise(0.0, spec.noise_sigma);
    for (Eigen::Index i = 0; i < canvas.size(); ++i) canvas.data()[i] += noise(rng);
  }

  out.image = GrayImage(spec.width, spec.height);
  auto& px = out.image.pixels();
  for (Eigen::Index i = 0; i < canvas.size(); ++i) {
    px.data()[i] = static_cast<std::uint8_t>(std::lround(std::clamp(canvas.data()[i], 0.0, 255.0)));
  }

  const double center_depth = R(2, 2) * spec.jig.distance;
  out.truth.frame = frame_index;
  out.truth.time = frame_index / spec.fps;
  out.truth.displacement_mm = spec.motion_mm[static_cast<std::size_t>(frame_index)];
  out.truth.roi_dv_px = spec.K.fy * offset_m / center_depth;
  return out;
}

std::string frame_file_name(int frame_index) {
  char name[32];
  std::snprintf(name, sizeof(name), "frame_%06d.pgm", frame_index + 1);
  return name;
}

std::vector<GroundTruth> render_sequence(const SceneSpec& spec,
                                         const std::filesystem::path& out_dir) {
  spec.validate();
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + out_dir.string() + ": " + ec.message());

  std::vector<GroundTruth> truth;
  for (int k = 0; k < spec.frame_count(); ++k) {
    RenderedFrame frame = render_frame(spec, k);
    write_pgm(out_dir / frame_file_name(k), frame.image);
    truth.push_back(frame.truth);
  }

  CsvTable table({"frame", "time_s", "mean_dv_px", "displacement_mm"});
  for (const GroundTruth& t : truth) {
    table.add_row({std::to_string(t.frame), format_fixed(t.time, 6), format_fixed(t.roi_dv_px, 6),
                   format_fixed(t.displacement_mm, 6)});
  }
  table.write(out_dir / "truth.csv");

  spot_table(truth.front().spots).write(out_dir / "spots.csv");
  return truth;
}

std::vector<double> sinusoid_motion(double amplitude_mm, double frequency_hz, double fps,
                                    int frames) {
  std::vector<double> motion(static_cast<std::size_t>(std::max(frames, 0)));
  for (int k = 0; k < frames; ++k) {
    motion[static_cast<std::size_t>(k)] =
        amplitude_mm * std::sin(2.0 * std::numbers::pi * frequency_hz * k / fps);
  }
  return motion;
}

std::vector<double> ramp_motion(double step_mm, int frames) {
  std::vector<double> motion(static_cast<std::size_t>(std::max(frames, 0)));
  for (int k = 0; k < frames; ++k) motion[static_cast<std::size_t>(k)] = step_mm * k;
  return motion;
}

SceneSpec parse_scene(const std::string& json_text) {
  const nlohmann::json root = detail::parse_json(json_text);
  detail::FieldReader doc(root, "");
  SceneSpec spec;

  {
    auto k = doc.object("intrinsics", true);
    spec.K = {k.number("fx"), k.number("fy"), k.number("cx"), k.number("cy")};
    k.finish();
  }
  if (auto image = doc.object("image", false); image.present()) {
    spec.width = image.integer("width", spec.width);
    spec.height = image.integer("height", spec.height);
    image.finish();
  }
  {
    auto jig = doc.object("jig", true);
    spec.jig = {jig.number("side_length_m"), jig.number("distance_m")};
    jig.finish();
  }
  if (auto pose = doc.object("pose", false); pose.present()) {
    spec.pose = PoseAngles::from_degrees(pose.number("pitch_deg", 0.0), pose.number("yaw_deg", 0.0));
    pose.finish();
  }
  spec.spot_sigma = doc.number("spot_sigma_px", spec.spot_sigma);
  spec.spot_peak = doc.number("spot_peak", spec.spot_peak);
  spec.background = doc.number("background", spec.background);
  spec.noise_sigma = doc.number("noise_sigma", spec.noise_sigma);
  spec.fps = doc.number("fps", spec.fps);
  spec.seed = doc.unsigned_integer("seed", 0);

  int tile_size = 256, cell = 4;
  double contrast = 40.0, mean = spec.background;
  spec.texture_extent = 0.12;
  if (auto tex = doc.object("texture", false); tex.present()) {
    tile_size = tex.integer("size_texels", tile_size);
    cell = tex.integer("cell_texels", cell);
    spec.mm_per_texel = tex.number("mm_per_texel", spec.mm_per_texel);
    contrast = tex.number("contrast", contrast);
    mean = tex.number("mean", mean);
    spec.texture_extent = tex.number("extent_m", spec.texture_extent);
    tex.finish();
  }
  spec.texture = make_value_noise_texture(tile_size, cell, mean, contrast, spec.seed);

  {
    auto motion = doc.object("motion", true);
    const std::string kind = motion.string("kind");
    if (kind == "sinusoid") {
      spec.motion_mm = sinusoid_motion(motion.number("amplitude_mm"), motion.number("frequency_hz"),
                                       spec.fps, motion.integer("frames"));
    } else if (kind == "ramp") {
      spec.motion_mm = ramp_motion(motion.number("step_mm"), motion.integer("frames"));
    } else if (kind == "static") {
      spec.motion_mm.assign(static_cast<std::size_t>(std::max(0, motion.integer("frames"))), 0.0);
    } else if (kind == "list") {
      spec.motion_mm = motion.number_list("offsets_mm");
    } else {
      throw Error(ErrorCode::ValidationError,
                  "motion.kind must be sinusoid, ramp, static or list (got '" + kind + "')");
    }
    motion.finish();
  }
  doc.finish();

  try {
    spec.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::ValidationError, e.what());
  }
  return spec;
}

SceneSpec load_scene(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open scene file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scene(buffer.str());
}

}  // namespace sldisp
