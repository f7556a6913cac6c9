// Runs every acceptance criterion at its stated tolerance and prints one
// PASS/FAIL line per criterion. Exit status is non-zero if any fails.
//
// usage: acceptance [path/to/sldisp] [scratch_dir]

#include <chrono>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include <Eigen/Core>
#include <unsupported/Eigen/AutoDiff>

#include "sldisp/alignment.hpp"
#include "sldisp/feature_tracking.hpp"
#include "sldisp/pipeline.hpp"
#include "sldisp/pose_calibration.hpp"
#include "sldisp/scale_factor.hpp"
#include "sldisp/scene_simulator.hpp"
#include "sldisp/spot_detection.hpp"
#include "support.hpp"

using namespace sldisp;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), f, a, b, c, d);
  return buf;
}

fs::path g_cli;
fs::path g_scratch;

// ---------------------------------------------------------------------------

Outcome scale_grid() {
  const auto t0 = Clock::now();
  ScaleStudyOptions opt;  // pitch, yaw in {0..50} step 10, sigma 0.5 px, 100 trials
  const ErrorGrid g = scale_error_grid(default_intrinsics(), default_jig(), opt);
  const double secs = seconds_since(t0);
  const double worst = g.error_percent.maxCoeff();
  const double origin = g.at(0, 0), corner = g.at(50, 50);
  Outcome o;
  o.pass = worst <= 2.0 && origin <= 0.01 && corner >= 0.5 && corner <= 3.0 && secs < 60.0;
  o.detail = fmt("max %.3f%% (<= 2), (0,0) %.2e%% (<= 0.01), (50,50) %.3f%% (in [0.5, 3]), %.2f s",
                 worst, origin, corner, secs);
  return o;
}

Outcome alignment_curve() {
  const auto t0 = Clock::now();
  std::vector<double> d;
  for (int i = 0; i <= 195; ++i) d.push_back(0.5 + 0.1 * i);
  const auto curve =
      alignment_error_curve(default_intrinsics(), default_jig().side_length, deg_to_rad(10.0),
                            deg_to_rad(10.0), d);
  bool non_increasing = true;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    non_increasing &= curve[i].mean_positional_error <= curve[i - 1].mean_positional_error;
  }
  const std::vector<double> six{6.0};
  const double at6 = alignment_error_curve(default_intrinsics(), default_jig().side_length,
                                           deg_to_rad(10.0), deg_to_rad(10.0), six)
                         .front()
                         .mean_positional_error;
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = non_increasing && at6 < 1.0 && secs < 5.0;
  o.detail = fmt("non-increasing over 0.5-20 m: %.0f, error at 6 m %.4f px (< 1), %.3f s",
                 non_increasing, at6, secs);
  return o;
}

Outcome ratio_limit() {
  const auto t0 = Clock::now();
  const double f = default_intrinsics().fx, ts = default_jig().side_length, tilt = deg_to_rad(10.0);
  const double gap_100 = std::abs(length_ratio(f, {ts, 100.0 * ts}, tilt) - 1.0);
  bool monotone = true;
  double D = 100.0 * ts, previous = gap_100;
  for (int k = 0; k < 5; ++k) {
    D *= 2.0;
    const double gap = std::abs(length_ratio(f, {ts, D}, tilt) - 1.0);
    monotone &= gap < previous;
    previous = gap;
  }
  // Also from a close standoff, where the effect is large.
  D = 2.0 * ts;
  previous = std::abs(length_ratio(f, {ts, D}, tilt) - 1.0);
  for (int k = 0; k < 5; ++k) {
    D *= 2.0;
    const double gap = std::abs(length_ratio(f, {ts, D}, tilt) - 1.0);
    monotone &= gap < previous;
    previous = gap;
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = gap_100 < 1e-3 && monotone && secs < 1.0;
  o.detail = fmt("|ratio-1| at D=100 Ts %.2e (< 1e-3), closer to 1 on every doubling: %.0f, %.4f s",
                 gap_100, monotone, secs);
  return o;
}

Outcome calibration() {
  const auto t0 = Clock::now();
  const Intrinsics K = default_intrinsics();
  const JigGeometry jig = default_jig();
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> truth(-45.0, 45.0), offset(-10.0, 10.0);
  int converged = 0;
  double worst_deg = 0.0;
  for (int i = 0; i < 500; ++i) {
    const double p = truth(rng), y = truth(rng);
    const SpotQuad detected =
        project_points(jig, K, rotation_from_angles(PoseAngles::from_degrees(p, y)));
    const CalibrationResult r = calibrate_angles(
        detected, K, jig, PoseAngles::from_degrees(p + offset(rng), y + offset(rng)));
    converged += r.converged;
    worst_deg = std::max({worst_deg, std::abs(rad_to_deg(r.angles.pitch) - p),
                          std::abs(rad_to_deg(r.angles.yaw) - y)});
  }

  // Central-difference Jacobian against forward-mode differentiation.
  using AD = Eigen::AutoDiffScalar<Eigen::Vector2d>;
  std::uniform_real_distribution<double> angle(deg_to_rad(-45.0), deg_to_rad(45.0));
  double worst_rel = 0.0;
  for (int i = 0; i < 100; ++i) {
    const SpotQuad detected =
        project_points(jig, K, rotation_from_angles<double>(angle(rng), angle(rng)));
    const PoseAngles at{angle(rng), angle(rng)};
    const auto r = residuals<AD>(detected, K, jig, AD(at.pitch, 2, 0), AD(at.yaw, 2, 1));
    ResidualJacobian exact;
    for (int k = 0; k < 8; ++k) exact.row(k) = r[k].derivatives().transpose();
    const ResidualJacobian numeric = residual_jacobian(detected, K, jig, at);
    worst_rel = std::max(worst_rel, (numeric - exact).norm() / exact.norm());
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = converged == 500 && worst_deg < 1e-3 && worst_rel < 1e-5 && secs < 30.0;
  o.detail = fmt("converged %.0f/500, worst angle error %.2e deg (< 1e-3), "
                 "Jacobian rel. error %.2e (< 1e-5), %.2f s",
                 converged, worst_deg, worst_rel, secs);
  return o;
}

Outcome otsu() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(5);
  int agree = 0, total = 0;
  for (int i = 0; i < 200; ++i) {
    Histogram h{};
    std::uniform_int_distribution<int> count(0, i % 2 ? 40 : 3);
    for (auto& c : h) c = static_cast<std::uint64_t>(count(rng));
    if (i % 5 == 0) {
      for (auto& c : h)
        if (rng() % 8) c = 0;
    }
    agree += otsu_threshold(h) == testkit::otsu_oracle_exact(h);
    ++total;
  }
  std::uniform_real_distribution<double> angle(-40.0, 40.0), sigma(1.0, 3.0);
  for (int i = 0; i < 10; ++i) {
    const SceneSpec spec = testkit::centered_spot_scene(
        default_intrinsics(), default_jig(), PoseAngles::from_degrees(angle(rng), angle(rng)),
        sigma(rng), 960, 540);
    const Histogram h = histogram(render_frame(spec, 0).image);
    agree += otsu_threshold(h) == testkit::otsu_oracle_means(h);
    ++total;
  }
  const SceneSpec shaking = load_scene(fs::path(SLDISP_CONFIG_DIR) / "shaking_table_scene.json");
  for (int k : {0, 7, 22}) {
    const Histogram h = histogram(render_frame(shaking, k).image);
    agree += otsu_threshold(h) == testkit::otsu_oracle_means(h);
    ++total;
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = agree == total && secs < 5.0;
  o.detail = fmt("%.0f/%.0f thresholds equal the exhaustive scan, %.2f s", agree, total, secs);
  return o;
}

Outcome tracker() {
  const auto t0 = Clock::now();
  const GrayImage base = testkit::shifted_texture(320, 240, 0.0);
  const Rect roi{80, 60, 160, 120};
  const auto pts = detect_corners(base, roi).points;
  double worst_shift = 0.0;
  int lost = 0;
  for (double s : {0.0, 1.0, 2.0, 3.5}) {
    const GrayImage moved = testkit::shifted_texture(320, 240, s);
    const auto out = track_flow(base, moved, pts);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (!out[i].tracked) {
        ++lost;
        continue;
      }
      worst_shift = std::max({worst_shift, std::abs(out[i].position.x() - pts[i].x()),
                              std::abs(out[i].position.y() - pts[i].y() - s)});
    }
  }
  double worst_fixed = 0.0;
  {
    const auto out = track_flow(base, base, pts);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      worst_fixed = std::max(worst_fixed, (out[i].position - pts[i]).norm());
    }
  }
  double worst_fb = 0.0;
  {
    const GrayImage moved = testkit::shifted_texture(320, 240, 2.3);
    const auto fwd = track_flow(base, moved, pts);
    std::vector<Eigen::Vector2d> there;
    for (const auto& t : fwd) there.push_back(t.position);
    const auto back = track_flow(moved, base, there);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (fwd[i].tracked && back[i].tracked) {
        worst_fb = std::max(worst_fb, (back[i].position - pts[i]).norm());
      }
    }
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = worst_shift <= 0.1 && worst_fixed <= 1e-6 && worst_fb < 0.2 && lost == 0 && secs < 30.0;
  o.detail = fmt("worst shift error %.4f px (<= 0.1), fixed point %.1e px (<= 1e-6), "
                 "forward-backward %.4f px (< 0.2), %.2f s",
                 worst_shift, worst_fixed, worst_fb, secs);
  if (lost) o.detail += ", lost " + std::to_string(lost) + " points";
  return o;
}

Outcome shaking_table() {
  const auto t0 = Clock::now();
  const SceneSpec spec = load_scene(fs::path(SLDISP_CONFIG_DIR) / "shaking_table_scene.json");
  const PipelineConfig cfg =
      load_config(fs::path(SLDISP_CONFIG_DIR) / "shaking_table_pipeline.json");
  std::vector<GrayImage> frames;
  double truth_peak = 0.0;
  for (int k = 0; k < spec.frame_count(); ++k) {
    RenderedFrame f = render_frame(spec, k);
    truth_peak = std::max(truth_peak, std::abs(f.truth.displacement_mm));
    frames.push_back(std::move(f.image));
  }
  const PipelineResult r = run_pipeline(cfg, frames);
  double peak = 0.0;
  std::vector<double> x;
  for (const auto& s : r.series.samples) {
    peak = std::max(peak, std::abs(s.displacement));
    x.push_back(s.displacement);
  }
  const double peak_err = 100.0 * std::abs(peak - truth_peak) / truth_peak;

  // Magnitude spectrum of the mean-removed series; bin spacing fps / N.
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  const std::size_t N = x.size();
  std::size_t best_bin = 0;
  double best_mag = -1.0;
  for (std::size_t k = 1; k <= N / 2; ++k) {
    std::complex<double> acc = 0.0;
    for (std::size_t n = 0; n < N; ++n) {
      acc += (x[n] - mean) * std::polar(1.0, -2.0 * M_PI * double(k * n) / double(N));
    }
    if (std::abs(acc) > best_mag) {
      best_mag = std::abs(acc);
      best_bin = k;
    }
  }
  const double bin_hz = cfg.fps / static_cast<double>(N);
  const double driving_bin = 1.0 / bin_hz;  // 1 Hz drive
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = peak_err <= 2.0 && std::abs(static_cast<double>(best_bin) - driving_bin) <= 1.0 &&
           secs < 120.0;
  o.detail = fmt("peak %.4f mm vs truth %.4f mm, error %.3f%% (<= 2)", peak, truth_peak, peak_err) +
             fmt(", spectral peak %.3f Hz vs 1 Hz (bin %.3f Hz), %.1f s", best_bin * bin_hz, bin_hz,
                 secs);
  return o;
}

Outcome detection() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(808);
  std::uniform_real_distribution<double> angle(-50.0, 50.0), sigma(1.0, 3.0);
  const Intrinsics K = default_intrinsics();
  const JigGeometry jig = default_jig();
  const int w = 800, h = 600;
  double worst = 0.0;
  int failures = 0;
  for (int i = 0; i < 100; ++i) {
    const PoseAngles pose = PoseAngles::from_degrees(angle(rng), angle(rng));
    const RenderedFrame f =
        render_frame(testkit::centered_spot_scene(K, jig, pose, sigma(rng), w, h), 0);
    try {
      const SpotQuad d = detect_spots(f.image);
      worst = std::max(worst, (d - f.truth.spots).colwise().norm().maxCoeff());
    } catch (const Error&) {
      ++failures;
    }
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = failures == 0 && worst <= 0.15 && secs < 20.0;
  o.detail = fmt("worst center error %.4f px (<= 0.15) over 100 poses, %.0f detection failures, %.2f s",
                 worst, failures, secs);
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome determinism() {
  const auto t0 = Clock::now();
  if (g_cli.empty() || !fs::exists(g_cli)) {
    return {false, "command line tool not found (pass its path as the first argument)"};
  }
  const fs::path scene = fs::path(SLDISP_CONFIG_DIR) / "shaking_table_scene.json";
  const fs::path config = fs::path(SLDISP_CONFIG_DIR) / "shaking_table_pipeline.json";
  fs::path runs[2];
  for (int i = 0; i < 2; ++i) {
    runs[i] = g_scratch / ("run" + std::to_string(i));
    fs::remove_all(runs[i]);
    fs::create_directories(runs[i]);
    const std::string sim = "\"" + g_cli.string() + "\" simulate --scene \"" + scene.string() +
                            "\" --out \"" + (runs[i] / "frames").string() + "\"";
    const std::string pipe = "\"" + g_cli.string() + "\" pipeline --config \"" + config.string() +
                             "\" --frames \"" + (runs[i] / "frames").string() + "\" --out \"" +
                             (runs[i] / "out.csv").string() + "\"";
    if (std::system(sim.c_str()) != 0 || std::system(pipe.c_str()) != 0) {
      return {false, "command line run " + std::to_string(i + 1) + " failed"};
    }
  }
  int files = 0, differing = 0;
  for (const auto& entry : fs::directory_iterator(runs[0] / "frames")) {
    ++files;
    differing += slurp(entry.path()) != slurp(runs[1] / "frames" / entry.path().filename());
  }
  ++files;
  differing += slurp(runs[0] / "out.csv") != slurp(runs[1] / "out.csv");
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = differing == 0 && files > 90;
  o.detail = fmt("%.0f files compared, %.0f differ, %.1f s", files, differing, secs);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  g_cli = argc > 1 ? fs::path(argv[1]) : fs::path();
  g_scratch = argc > 2 ? fs::path(argv[2]) : fs::temp_directory_path() / "sldisp_acceptance";
  fs::create_directories(g_scratch);

  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"AC1 scale-factor error grid", scale_grid},
      {"AC2 alignment distance study", alignment_curve},
      {"AC3 pair-length ratio limit", ratio_limit},
      {"AC4 calibration recovery and Jacobian", calibration},
      {"AC5 Otsu exhaustive equivalence", otsu},
      {"AC6 tracker known warps", tracker},
      {"AC7 shaking-table closure", shaking_table},
      {"AC8 spot detection accuracy", detection},
      {"AC9 simulate + pipeline determinism", determinism},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
  }
  std::cout << (failed ? "FAILED " : "ALL PASSED ") << (9 - failed) << "/9" << std::endl;
  return failed ? 1 : 0;
}
