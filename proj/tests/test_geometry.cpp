#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace panolayout;
using pltest::fixture;

namespace {

const ImageGrid kGrid{1024, 512};
const CameraModel kCam{1.6};

LayoutCorner corner_at(double column, double distance, CornerKind kind = CornerKind::visible,
                       double room_height = 3.2) {
  return corner_at_distance(column, distance, kind, kCam, room_height);
}

TEST(FloorPoint, Examples) {
  const auto a = floor_point(0.0, -kPi / 4, kCam);
  EXPECT_NEAR(a.x, 1.6, 1e-12);
  EXPECT_NEAR(a.y, 0.0, 1e-12);
  const auto b = floor_point(kHalfPi, -std::atan(1.6 / 2.0), kCam);
  EXPECT_NEAR(b.x, 0.0, 1e-12);
  EXPECT_NEAR(b.y, 2.0, 1e-12);
  const auto c = floor_point(0.0, -kHalfPi + 1e-9, kCam);
  EXPECT_NEAR(c.x, 1.6e-9, 1e-15);
}

TEST(FloorPoint, AboveHorizonIsAnError) {
  EXPECT_THROW(floor_point(0.0, 0.0, kCam), GeometryError);
  EXPECT_THROW(floor_point(0.0, 0.3, kCam), GeometryError);
}

TEST(WallDistanceProfile, ConstantFloor) {
  const std::vector<double> yf(64, -kPi / 4);
  for (double d : wall_distance_profile(yf, Boundary::floor, kCam, 3.2)) EXPECT_NEAR(d, 1.6, 1e-12);
}

TEST(WallDistanceProfile, StepRoom) {
  std::vector<double> yf(64);
  for (int i = 0; i < 64; ++i) yf[std::size_t(i)] = -std::atan(1.6 / (i < 20 ? 1.6 : 3.2));
  const auto d = wall_distance_profile(yf, Boundary::floor, kCam, 3.2);
  EXPECT_NEAR(d[19], 1.6, 1e-12);
  EXPECT_NEAR(d[20], 3.2, 1e-12);
}

TEST(WallDistanceProfile, Ceiling) {
  const std::vector<double> yc(8, std::atan(1.4 / 2.0));
  EXPECT_NEAR(wall_distance_profile(yc, Boundary::ceiling, kCam, 3.0)[0], 2.0, 1e-12);
}

TEST(WallDistanceProfile, WrongSideNamesColumn) {
  std::vector<double> yf(16, -0.5);
  yf[7] = 0.1;
  try {
    wall_distance_profile(yf, Boundary::floor, kCam, 3.2);
    FAIL() << "expected GeometryError";
  } catch (const GeometryError& e) {
    EXPECT_NE(std::string(e.what()).find("column 7"), std::string::npos) << e.what();
  }
  EXPECT_THROW(wall_distance_profile(std::vector<double>(4, 0.5), Boundary::ceiling, kCam, 1.5),
               GeometryError);
}

TEST(EstimateRoomHeight, SymmetricRoom) {
  const auto s = pltest::constant_signal(64, kPi / 4, -kPi / 4);
  EXPECT_NEAR(estimate_room_height(s, kCam), 3.2, 1e-12);
}

TEST(EstimateRoomHeight, OraclePentagon) {
  SyntheticRoom room = fixture(RoomFamily::pentagon, 3).room;
  room.room_height = 2.8;
  const auto r = render_signal(room, kGrid);
  EXPECT_NEAR(estimate_room_height(r.signal, kCam), 2.8, 1e-6);
}

TEST(EstimateRoomHeight, NoisyHalfColumns) {
  SyntheticRoom room = fixture(RoomFamily::pentagon, 3).room;
  room.room_height = 2.8;
  auto s = render_signal(room, kGrid).signal;
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> sign(0, 1);
  for (std::size_t i = 0; i < s.y_c.size(); i += 2) s.y_c[i] += sign(rng) ? 0.002 : -0.002;
  EXPECT_NEAR(estimate_room_height(s, kCam), 2.8, 0.028);
}

TEST(EstimateRoomHeight, TooFewColumns) {
  EXPECT_THROW(estimate_room_height(pltest::constant_signal(4, 0.5, -0.5), kCam), EstimationError);
}

TEST(AssembleLayout, SquareRoom) {
  std::vector<LayoutCorner> corners;
  const double half_diag = 1.6 * std::sqrt(2.0);
  for (double deg : {-135.0, -45.0, 45.0, 135.0}) {
    corners.push_back(corner_at(lon_to_col(deg * kPi / 180.0, kGrid), half_diag));
  }
  const auto layout = assemble_layout(corners, kGrid, kCam, 3.2);
  EXPECT_EQ(layout.corners.size(), 4u);
  EXPECT_NEAR(signed_area(layout.floor_polygon()), 10.24, 1e-9);
  EXPECT_EQ(layout.occlusion_pair_count(), 0u);
}

TEST(AssembleLayout, OracleLRoomHasOnePairAlongTheRay) {
  const auto& f = fixture(RoomFamily::l_room, 0);
  const auto& layout = f.rendered.truth;
  EXPECT_EQ(layout.occlusion_pair_count(), 1u);
  // 4 visible corners plus the near/far pair.
  EXPECT_EQ(layout.corners.size(), 6u);
  const auto poly = layout.floor_polygon();
  const auto occl = layout.occlusion_edges();
  for (std::size_t i = 0; i < poly.size(); ++i) {
    if (!occl[i]) continue;
    const auto a = poly[i], b = poly[(i + 1) % poly.size()];
    EXPECT_NEAR(std::remainder(a.angle() - b.angle(), kTwoPi), 0.0, 1e-6);
    EXPECT_NEAR(cross(a, b), 0.0, 1e-9);
  }
}

TEST(AssembleLayout, SnapsPairToSharedColumn) {
  std::vector<LayoutCorner> corners = {corner_at(100.0, 2.0), corner_at(400.0, 1.5, CornerKind::occlusion_near),
                                       corner_at(402.0, 3.0, CornerKind::occlusion_far),
                                       corner_at(700.0, 2.5), corner_at(900.0, 2.0)};
  const auto layout = assemble_layout(corners, kGrid, kCam, 3.2);
  ASSERT_EQ(layout.corners.size(), 5u);
  EXPECT_DOUBLE_EQ(layout.corners[1].column, 401.0);
  EXPECT_DOUBLE_EQ(layout.corners[2].column, 401.0);
  const auto poly = layout.floor_polygon();
  EXPECT_NEAR(cross(poly[1], poly[2]), 0.0, 1e-9);
}

TEST(AssembleLayout, SortsUnitsByColumn) {
  std::vector<LayoutCorner> corners = {corner_at(700.0, 2.5), corner_at(100.0, 2.0), corner_at(400.0, 2.2)};
  const auto layout = assemble_layout(corners, kGrid, kCam, 3.2);
  EXPECT_DOUBLE_EQ(layout.corners[0].column, 100.0);
  EXPECT_DOUBLE_EQ(layout.corners[2].column, 700.0);
}

TEST(AssembleLayout, BowTieIsNotSimple) {
  const std::vector<FloorPoint> bowtie = {{-1, -1}, {1, 1}, {1, -1}, {-1, 1}};
  EXPECT_FALSE(is_simple(bowtie));
  const std::vector<FloorPoint> square = {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
  EXPECT_TRUE(is_simple(square));
}

TEST(AssembleLayout, RejectsCornersNotSurroundingTheCamera) {
  std::vector<LayoutCorner> corners = {corner_at(500.0, 2.0), corner_at(520.0, 2.0), corner_at(540.0, 2.0)};
  EXPECT_THROW(assemble_layout(corners, kGrid, kCam, 3.2), AssemblyError);
}

TEST(AssembleLayout, RejectsBadPairs) {
  std::vector<LayoutCorner> lone = {corner_at(100.0, 2.0), corner_at(400.0, 1.5, CornerKind::occlusion_near),
                                    corner_at(700.0, 2.5)};
  EXPECT_THROW(assemble_layout(lone, kGrid, kCam, 3.2), AssemblyError);
  std::vector<LayoutCorner> inverted = {corner_at(100.0, 2.0), corner_at(400.0, 3.0, CornerKind::occlusion_near),
                                        corner_at(400.0, 1.5, CornerKind::occlusion_far),
                                        corner_at(700.0, 2.5)};
  EXPECT_THROW(assemble_layout(inverted, kGrid, kCam, 3.2), AssemblyError);
  std::vector<LayoutCorner> shared = {corner_at(100.0, 2.0), corner_at(100.0, 2.0), corner_at(400.0, 2.0),
                                      corner_at(700.0, 2.5)};
  EXPECT_THROW(assemble_layout(shared, kGrid, kCam, 3.2), AssemblyError);
  EXPECT_THROW(assemble_layout({corner_at(1, 2), corner_at(2, 2)}, kGrid, kCam, 3.2), AssemblyError);
  EXPECT_THROW(assemble_layout({corner_at(100, 2), corner_at(400, 2), corner_at(700, 2)}, kGrid, kCam, 0.0),
               GeometryError);
}

TEST(GeometryProperties, ScaleCovariance) {
  const auto& layout = fixture(RoomFamily::hexagon, 1).rendered.truth;
  for (double s : {0.5, 2.0, 1.7, 3.1}) {
    VisibleLayout scaled = layout;
    scaled.camera.camera_height *= s;
    const auto a = layout.floor_polygon(), b = scaled.floor_polygon();
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (s == 0.5 || s == 2.0) {
        EXPECT_EQ(b[i].x, s * a[i].x);
        EXPECT_EQ(b[i].y, s * a[i].y);
      } else {
        EXPECT_NEAR(b[i].x, s * a[i].x, 1e-12 * s * a[i].norm());
        EXPECT_NEAR(b[i].y, s * a[i].y, 1e-12 * s * a[i].norm());
      }
      EXPECT_NEAR(b[i].angle(), a[i].angle(), 1e-12);
    }
  }
}

TEST(GeometryProperties, LatitudeDistanceRoundTrip) {
  for (double lat = -kHalfPi + 0.01; lat < -0.01; lat += 1e-3) {
    const double d = boundary_distance(lat, kCam.camera_height);
    ASSERT_NEAR(floor_lat_at_distance(d, kCam), lat, 1e-12);
  }
}

TEST(GeometryProperties, OracleLayoutsAreSimpleWithRayAlignedOcclusionEdges) {
  for (auto fam : kAllFamilies) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto& layout = fixture(fam, seed).rendered.truth;
      const auto poly = layout.floor_polygon();
      ASSERT_TRUE(is_simple(poly)) << to_string(fam) << " " << seed;
      const auto occl = layout.occlusion_edges();
      for (std::size_t i = 0; i < poly.size(); ++i) {
        if (occl[i]) ASSERT_NEAR(cross(poly[i], poly[(i + 1) % poly.size()]), 0.0, 1e-9);
      }
    }
  }
}

TEST(PolygonUtilities, AreaAndContainment) {
  const std::vector<FloorPoint> sq = {{0, 0}, {2, 0}, {2, 2}, {0, 2}};
  EXPECT_DOUBLE_EQ(signed_area(sq), 4.0);
  EXPECT_TRUE(contains(sq, {1, 1}));
  EXPECT_FALSE(contains(sq, {3, 1}));
  const std::vector<FloorPoint> repeated = {{0, 0}, {2, 0}, {2, 0}, {0, 2}};
  EXPECT_FALSE(is_simple(repeated));
}

TEST(PolygonUtilities, Median) {
  EXPECT_DOUBLE_EQ(median({3, 1, 2}), 2.0);
  EXPECT_DOUBLE_EQ(median({4, 1, 3, 2}), 2.5);
  EXPECT_THROW(median({}), EstimationError);
}

}  // namespace
