#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "sldisp/spot_detection.hpp"
#include "support.hpp"

using namespace sldisp;

namespace {

GrayImage gaussian_spot(int w, int h, double cu, double cv, double sigma, double peak, double bg) {
  GrayImage img(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double r2 = (x - cu) * (x - cu) + (y - cv) * (y - cv);
      img(x, y) = static_cast<std::uint8_t>(
          std::lround(std::min(255.0, bg + peak * std::exp(-r2 / (2 * sigma * sigma)))));
    }
  }
  return img;
}

}  // namespace

TEST(Otsu, ConstantImageGivesZero) {
  EXPECT_EQ(otsu_threshold(GrayImage(32, 16, 128)), 0);
  EXPECT_EQ(otsu_threshold(GrayImage(5, 5, 0)), 0);
}

TEST(Otsu, TwoLevelImageTakesLowerEdgeOfPlateau) {
  GrayImage img(10, 10, 50);
  for (int y = 5; y < 10; ++y)
    for (int x = 0; x < 10; ++x) img(x, y) = 200;
  EXPECT_EQ(otsu_threshold(img), 50);
  EXPECT_EQ(testkit::otsu_oracle_exact(histogram(img)), 50);
}

TEST(Otsu, MatchesExhaustiveScanOnRandomHistograms) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 500; ++trial) {
    Histogram h{};
    const int kind = trial % 4;
    std::uniform_int_distribution<int> count(0, kind == 0 ? 3 : 60);
    for (int i = 0; i < 256; ++i) h[i] = static_cast<std::uint64_t>(count(rng));
    if (kind == 1) {  // sparse: a handful of occupied bins
      for (int i = 0; i < 256; ++i)
        if (rng() % 16) h[i] = 0;
    }
    if (kind == 2) {  // bimodal
      for (int i = 0; i < 256; ++i) {
        const double a = std::exp(-0.5 * std::pow((i - 40) / 10.0, 2));
        const double b = std::exp(-0.5 * std::pow((i - 210) / 15.0, 2));
        h[i] = static_cast<std::uint64_t>(std::lround(200 * a + 20 * b)) + h[i] % 3;
      }
    }
    ASSERT_EQ(otsu_threshold(h), testkit::otsu_oracle_exact(h)) << "trial " << trial;
  }
}

TEST(Otsu, RenderedSpotThresholdSeparatesModes) {
  const SceneSpec spec = testkit::spot_scene(default_intrinsics(), default_jig(),
                                             PoseAngles::from_degrees(10, 20), 2.0);
  const GrayImage img = render_frame(spec, 0).image;
  const int t = otsu_threshold(img);
  EXPECT_EQ(t, testkit::otsu_oracle_means(histogram(img)));
  EXPECT_GE(t, 20);
  EXPECT_LT(t, 230);
}

TEST(Blobs, SymmetricIntegerSpotHasExactCentroid) {
  const GrayImage img = gaussian_spot(41, 31, 20.0, 12.0, 2.0, 200.0, 10.0);
  const auto blobs = find_blobs(img, otsu_threshold(img), 5);
  ASSERT_EQ(blobs.size(), 1u);
  EXPECT_DOUBLE_EQ(blobs[0].centroid.x(), 20.0);
  EXPECT_DOUBLE_EQ(blobs[0].centroid.y(), 12.0);
}

TEST(Blobs, DiagonalNeighboursAreConnectedAndSmallBlobsDropped) {
  GrayImage img(10, 10, 0);
  img(2, 2) = 255;
  img(3, 3) = 255;
  img(4, 4) = 255;
  img(8, 1) = 255;  // isolated hot pixel
  const auto blobs = find_blobs(img, 100, 2);
  ASSERT_EQ(blobs.size(), 1u);
  EXPECT_EQ(blobs[0].area, 3);
  EXPECT_DOUBLE_EQ(blobs[0].centroid.x(), 3.0);
  EXPECT_EQ(find_blobs(img, 100, 1).size(), 2u);
}

TEST(Ordering, PermutationInvariant) {
  const SpotQuad truth = project_points(default_jig(), default_intrinsics(),
                                        rotation_from_angles(PoseAngles::from_degrees(50, 50)));
  std::array<int, 4> perm{0, 1, 2, 3};
  do {
    std::array<Eigen::Vector2d, 4> pts;
    for (int i = 0; i < 4; ++i) pts[i] = truth.col(perm[i]);
    EXPECT_EQ(order_spots(pts), truth);
  } while (std::next_permutation(perm.begin(), perm.end()));
}

TEST(Ordering, CoincidentRowsAreAmbiguous) {
  std::array<Eigen::Vector2d, 4> pts{Eigen::Vector2d(0, 0), Eigen::Vector2d(10, 0.2),
                                     Eigen::Vector2d(20, 0.4), Eigen::Vector2d(30, 0.6)};
  try {
    order_spots(pts);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::AmbiguousQuadrant);
  }
}

TEST(Detection, SingleSpotIsCountMismatch) {
  const GrayImage img = gaussian_spot(64, 64, 30.3, 31.7, 2.0, 200.0, 10.0);
  try {
    detect_spots(img);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SpotCountMismatch);
    EXPECT_NE(std::string(e.what()).find("found 1"), std::string::npos);
  }
}

TEST(Detection, RecoversRenderedCentersAcrossPoses) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> angle(-40, 40), sigma(1.0, 3.0);
  for (int i = 0; i < 20; ++i) {
    const PoseAngles pose = PoseAngles::from_degrees(angle(rng), angle(rng));
    const RenderedFrame f =
        render_frame(testkit::centered_spot_scene(default_intrinsics(), default_jig(), pose, sigma(rng)), 0);
    const SpotQuad d = detect_spots(f.image);
    EXPECT_LT((d - f.truth.spots).cwiseAbs().maxCoeff(), 0.15) << "pose " << i;
  }
}

TEST(Detection, BrightnessOffsetBarelyMovesCentroids) {
  const RenderedFrame f = render_frame(
      testkit::centered_spot_scene(default_intrinsics(), default_jig(),
                                   PoseAngles::from_degrees(20, -15), 2.0),
      0);
  const SpotQuad base = detect_spots(f.image);
  GrayImage brighter = f.image;
  brighter.pixels() = (f.image.pixels().cast<int>().array() + 17).min(255).cast<std::uint8_t>().matrix();
  const SpotQuad shifted = detect_spots(brighter);
  EXPECT_LT((base - shifted).cwiseAbs().maxCoeff(), 0.05);
  EXPECT_EQ(detect_spots(f.image), base);
}
