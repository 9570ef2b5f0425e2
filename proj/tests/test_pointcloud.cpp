#include "test_support.hpp"

#include <gtest/gtest.h>

#include <set>
#include <sstream>

using namespace vhf;
using namespace vhf::testing;

namespace {

const char* kThreePoints =
    "ply\nformat ascii 1.0\nelement vertex 3\n"
    "property float x\nproperty float y\nproperty float z\n"
    "property uchar red\nproperty uchar green\nproperty uchar blue\nend_header\n"
    "0 0 0 255 0 0\n1 0 0 0 255 0\n0 1 0 0 0 255\n";

std::string vertex_header(std::size_t n, const std::string& props) {
  return "ply\nformat ascii 1.0\nelement vertex " + std::to_string(n) + "\n" + props + "end_header\n";
}

const std::string kXyzRgb =
    "property float x\nproperty float y\nproperty float z\n"
    "property uchar red\nproperty uchar green\nproperty uchar blue\n";

}  // namespace

TEST(LoadCloud, RescalesEightBitColours) {
  TempDir dir("pc");
  write_text(dir.file("a.ply"), kThreePoints);
  const PointCloud c = load_cloud(dir.file("a.ply"));
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c.points[0].color, Vec3(1, 0, 0));
  EXPECT_EQ(c.points[2].color, Vec3(0, 0, 1));
  EXPECT_EQ(c.points[1].position, Vec3(1, 0, 0));
}

TEST(LoadCloud, EmptyElement) {
  TempDir dir("pc");
  write_text(dir.file("e.ply"), vertex_header(0, kXyzRgb));
  EXPECT_EQ(load_cloud(dir.file("e.ply")).size(), 0u);
}

TEST(LoadCloud, ExtraPropertiesAndElementsAreTolerated) {
  TempDir dir("pc");
  write_text(dir.file("x.ply"),
             "ply\nformat ascii 1.0\ncomment made by hand\nelement vertex 2\n"
             "property float x\nproperty float y\nproperty float z\nproperty float nx\n"
             "property uchar red\nproperty uchar green\nproperty uchar blue\n"
             "element face 1\nproperty list uchar int vertex_indices\nend_header\n"
             "0 0 0 1 10 20 30\n1 2 3 0 40 50 60\n3 0 1 1\n");
  const PointCloud c = load_cloud(dir.file("x.ply"));
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c.points[1].position, Vec3(1, 2, 3));
  EXPECT_NEAR(c.points[1].color.z(), 60.0 / 255.0, 1e-15);
}

TEST(LoadCloud, MissingFileIsIoError) {
  EXPECT_THROW(load_cloud("/nonexistent/dir/cloud.ply"), IoError);
}

TEST(LoadCloud, MalformedHeaderNamesLine) {
  TempDir dir("pc");
  write_text(dir.file("m.ply"), "ply\nformat ascii 1.0\nelement vertex two\nend_header\n");
  try {
    load_cloud(dir.file("m.ply"));
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(LoadCloud, BinaryFormatRejected) {
  TempDir dir("pc");
  write_text(dir.file("b.ply"), "ply\nformat binary_little_endian 1.0\nelement vertex 0\nend_header\n");
  EXPECT_THROW(load_cloud(dir.file("b.ply")), ParseError);
}

TEST(LoadCloud, MissingRequiredProperty) {
  TempDir dir("pc");
  write_text(dir.file("p.ply"), vertex_header(1, "property float x\nproperty float y\nproperty float z\n") + "0 0 0\n");
  try {
    load_cloud(dir.file("p.ply"));
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("red"), std::string::npos);
  }
}

TEST(LoadCloud, NonFiniteCoordinateNamesFirstOffendingLine) {
  TempDir dir("pc");
  // header is 10 lines; the bad row is line 12
  write_text(dir.file("n.ply"), vertex_header(3, kXyzRgb) + "0 0 0 1 2 3\n0 nan 0 1 2 3\n0 inf 0 1 2 3\n");
  try {
    load_cloud(dir.file("n.ply"));
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 12u);
  }
}

TEST(LoadCloud, TruncatedBody) {
  TempDir dir("pc");
  write_text(dir.file("t.ply"), vertex_header(2, kXyzRgb) + "0 0 0 1 2 3\n");
  EXPECT_THROW(load_cloud(dir.file("t.ply")), ParseError);
}

TEST(SaveCloud, AnnotatedVertexLineEndsWithValues) {
  PointCloud c;
  c.points.push_back({Vec3(0.1, 0.2, 0.3), Vec3(1, 0.5, 0)});
  std::ostringstream os;
  FrictionAnnotations ann{{0.3}, {0.01}};
  write_cloud(os, c, &ann);
  const std::string out = os.str();
  EXPECT_NE(out.find("property float friction\nproperty float variance\n"), std::string::npos);
  const std::string last = out.substr(out.rfind("end_header\n") + 11);
  EXPECT_EQ(last.substr(last.size() - 9), "0.3 0.01\n");
}

TEST(SaveCloud, PlainCloudHasSixProperties) {
  PointCloud c;
  c.points.push_back({Vec3(0, 0, 0), Vec3(0, 0, 0)});
  std::ostringstream os;
  write_cloud(os, c);
  std::size_t props = 0, pos = 0;
  while ((pos = os.str().find("property ", pos)) != std::string::npos) {
    ++props;
    ++pos;
  }
  EXPECT_EQ(props, 6u);
}

TEST(SaveCloud, LengthMismatchAndUnwritablePath) {
  PointCloud c;
  c.points.resize(2);
  EXPECT_THROW(save_cloud(c, FrictionAnnotations{{0.1}, {0.1}}, "/tmp/never.ply"), InvalidArgument);
  EXPECT_THROW(save_cloud(c, "/nonexistent/dir/x.ply"), IoError);
}

TEST(SaveCloud, RoundTripIsLossless) {
  TempDir dir("pc");
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(0, 60)(rng);
    PointCloud c = random_cloud(rng, n, 2.0);
    c.frame_id = "frame_" + std::to_string(trial);
    FrictionAnnotations ann;
    for (std::size_t i = 0; i < n; ++i) {
      ann.friction.push_back(uniform(rng, 0, 1.5));
      ann.variance.push_back(uniform(rng, 0, 0.3));
    }
    const bool annotate = trial % 2 == 0;
    save_cloud(c, annotate ? std::optional(ann) : std::nullopt, dir.file("r.ply"));
    const AnnotatedCloud back = load_annotated_cloud(dir.file("r.ply"));
    ASSERT_EQ(back.cloud.size(), n);
    EXPECT_EQ(back.cloud.frame_id, c.frame_id);
    ASSERT_EQ(back.annotations.has_value(), annotate);
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_LE((back.cloud.points[i].position - c.points[i].position).cwiseAbs().maxCoeff(), 1e-6);
      EXPECT_EQ(back.cloud.points[i].color, c.points[i].color);
      if (annotate) {
        EXPECT_NEAR(back.annotations->friction[i], ann.friction[i], 1e-6);
        EXPECT_NEAR(back.annotations->variance[i], ann.variance[i], 1e-6);
      }
    }
  }
}

// ---------------------------------------------------------------------------

TEST(CropDepth, AllInsideIsIdentity) {
  Rng rng(1);
  const PointCloud c = random_cloud(rng, 50, 0.5);
  const FilterResult r = crop_depth(c, 10.0);
  ASSERT_EQ(r.cloud.size(), c.size());
  for (std::size_t i = 0; i < c.size(); ++i) EXPECT_EQ(r.cloud.points[i].position, c.points[i].position);
}

TEST(CropDepth, BoundaryIsClosed) {
  PointCloud c;
  c.points.push_back({Vec3(0.5, 0, 0), Vec3::Zero()});
  c.points.push_back({Vec3(0, 0.5000001, 0), Vec3::Zero()});
  const FilterResult r = crop_depth(c, 0.5);
  ASSERT_EQ(r.kept.size(), 1u);
  EXPECT_EQ(r.kept[0], 0u);
}

TEST(CropDepth, MatchesBruteForceAndIsIdempotent) {
  Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const PointCloud c = random_cloud(rng, 200, 1.0);
    const Vec3 origin = random_vec3(rng, -0.5, 0.5);
    const double r = uniform(rng, 0.2, 1.5);
    const FilterResult once = crop_depth(c, r, origin);
    std::vector<std::size_t> expect;
    for (std::size_t i = 0; i < c.size(); ++i)
      if (std::sqrt(std::pow(c.points[i].position.x() - origin.x(), 2) +
                    std::pow(c.points[i].position.y() - origin.y(), 2) +
                    std::pow(c.points[i].position.z() - origin.z(), 2)) <= r)
        expect.push_back(i);
    EXPECT_EQ(once.kept, expect);
    const FilterResult twice = crop_depth(once.cloud, r, origin);
    EXPECT_EQ(twice.cloud.size(), once.cloud.size());
    EXPECT_TRUE(twice.removed.empty());
  }
}

TEST(CropDepth, RejectsNonPositiveDistance) {
  PointCloud c;
  EXPECT_THROW(crop_depth(c, 0.0), InvalidArgument);
}

// ---------------------------------------------------------------------------

TEST(RemovePlane, AllOnPlaneLeavesNothing) {
  Rng rng(3);
  PointCloud c;
  for (int i = 0; i < 100; ++i) c.points.push_back({Vec3(uniform(rng), uniform(rng), 0.0), Vec3::Zero()});
  const PlaneRemoval r = remove_plane(c, std::nullopt, 0.01, 5);
  EXPECT_TRUE(r.filtered.cloud.empty());
  EXPECT_NEAR(std::abs(r.plane.normal.z()), 1.0, 1e-9);
}

TEST(RemovePlane, HalfAndHalf) {
  Rng rng(4);
  PointCloud c;
  for (int i = 0; i < 200; ++i)
    c.points.push_back({Vec3(uniform(rng), uniform(rng), i % 2 ? 0.1 : 0.0), Vec3::Zero()});
  // equal support: the plane is given so the expected survivors are unambiguous
  const PlaneRemoval r = remove_plane(c, PlaneModel(Vec3::UnitZ(), 0.0), 0.01);
  ASSERT_EQ(r.filtered.kept.size(), 100u);
  for (auto i : r.filtered.kept) EXPECT_EQ(i % 2, 1u);
}

TEST(RemovePlane, MajorityPlaneIsFound) {
  Rng rng(5);
  PointCloud c;
  for (int i = 0; i < 300; ++i)
    c.points.push_back({Vec3(uniform(rng), uniform(rng), i < 200 ? 0.0 : 0.1), Vec3::Zero()});
  const PlaneRemoval r = remove_plane(c, std::nullopt, 0.01, 9);
  ASSERT_EQ(r.filtered.kept.size(), 100u);
  for (auto i : r.filtered.kept) EXPECT_GE(i, 200u);
}

TEST(RemovePlane, SyntheticSceneLeavesExactlyTheObject) {
  for (Shape shape : {Shape::box, Shape::two_band_cylinder, Shape::mug}) {
    SceneParams sp;
    sp.shape = shape;
    sp.seed = 21;
    const SyntheticScene s = make_scene(sp);
    const FilterResult cropped = crop_depth(s.cloud, 1.5);
    const PlaneRemoval pr = remove_plane(cropped.cloud, std::nullopt, 0.01, 3);
    std::vector<std::size_t> survivors;
    for (auto i : pr.filtered.kept) survivors.push_back(cropped.kept[i]);
    EXPECT_EQ(survivors, object_indices(s)) << shape_name(shape);
  }
}

TEST(RemovePlane, OutputAndRemovedPartitionTheInput) {
  Rng rng(6);
  for (int trial = 0; trial < 30; ++trial) {
    const PointCloud c = random_cloud(rng, 150, 1.0);
    const PlaneRemoval r = remove_plane(c, std::nullopt, uniform(rng, 0.01, 0.3), trial);
    std::set<std::size_t> all(r.filtered.kept.begin(), r.filtered.kept.end());
    for (auto i : r.filtered.removed) EXPECT_TRUE(all.insert(i).second);
    EXPECT_EQ(all.size(), c.size());
  }
}

TEST(RemovePlane, RecoversTiltedPlaneNormal) {
  Rng rng(7);
  int good = 0;
  const int trials = 20;
  for (int trial = 0; trial < trials; ++trial) {
    const Vec3 n = random_unit(rng);
    const Vec3 t1 = any_orthogonal(n), t2 = n.cross(t1);
    PointCloud c;
    for (int i = 0; i < 400; ++i) {
      Vec3 p = uniform(rng, -1, 1) * t1 + uniform(rng, -1, 1) * t2 + 0.3 * n;
      if (i % 5 == 4) p = random_vec3(rng, -1, 1);  // 80% inliers
      c.points.push_back({p, Vec3::Zero()});
    }
    const PlaneRemoval r = remove_plane(c, std::nullopt, 0.005, trial);
    const double angle = std::acos(std::min(1.0, std::abs(r.plane.normal.dot(n)))) * 180.0 / M_PI;
    good += angle <= 0.5;
  }
  EXPECT_EQ(good, trials);
}

TEST(RemovePlane, Preconditions) {
  PointCloud two;
  two.points.resize(2);
  EXPECT_THROW(remove_plane(two, std::nullopt, 0.01), InvalidArgument);
  PointCloud line;
  for (int i = 0; i < 10; ++i) line.points.push_back({Vec3(i, 2.0 * i, 0), Vec3::Zero()});
  EXPECT_THROW(remove_plane(line, std::nullopt, 0.01), InvalidArgument);
  EXPECT_THROW(remove_plane(line, PlaneModel(), 0.0), InvalidArgument);
}

TEST(PlaneModel, NormalIsUnit) {
  const PlaneModel p(Vec3(0, 3, 4), 10.0);
  EXPECT_NEAR(p.normal.norm(), 1.0, 1e-12);
  EXPECT_NEAR(p.offset, 2.0, 1e-12);
  EXPECT_THROW(PlaneModel(Vec3::Zero(), 1.0), InvalidArgument);
}

// ---------------------------------------------------------------------------

TEST(KdTree, MatchesLinearScan) {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Vec3> pts;
    const int n = 1 + trial * 37;
    for (int i = 0; i < n; ++i) {
      // coarse grid so exact ties occur
      pts.push_back(Vec3(std::floor(uniform(rng, 0, 6)), std::floor(uniform(rng, 0, 6)), std::floor(uniform(rng, 0, 6))));
    }
    const KdTree tree(pts);
    for (int q = 0; q < 100; ++q) {
      const Vec3 query = random_vec3(rng, -1, 7);
      std::size_t best = 0;
      for (std::size_t i = 1; i < pts.size(); ++i)
        if ((pts[i] - query).squaredNorm() < (pts[best] - query).squaredNorm()) best = i;
      EXPECT_EQ(tree.nearest(query), best);
      const double r = uniform(rng, 0, 3);
      std::vector<std::size_t> in;
      for (std::size_t i = 0; i < pts.size(); ++i)
        if ((pts[i] - query).norm() <= r) in.push_back(i);
      EXPECT_EQ(tree.radius(query, r), in);
    }
  }
}
