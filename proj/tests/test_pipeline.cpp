#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace vhf;
using namespace vhf::testing;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code = -1;
  std::string out, err;
};

std::string quote(const std::string& s) { return "'" + s + "'"; }

CliRun cli(const std::string& args, const TempDir& dir) {
  const std::string out = dir.file("stdout.txt"), err = dir.file("stderr.txt");
  const std::string cmd = quote(VHF_CLI_PATH) + " " + args + " >" + quote(out) + " 2>" + quote(err);
  const int status = std::system(cmd.c_str());
  CliRun r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = read_text(out);
  r.err = read_text(err);
  return r;
}

std::vector<int> read_face_labels(const std::string& path) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  std::vector<int> labels;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string face, label;
    std::getline(ss, face, ',');
    std::getline(ss, label, ',');
    labels.push_back(std::stoi(label));
  }
  return labels;
}

}  // namespace

TEST(Cli, BoxPipelineRecoversUniformFriction) {
  TempDir dir("cli");
  const std::string scene = dir.file("box");
  const CliRun s = cli("synth --shape box --seed 3 --out " + quote(scene), dir);
  ASSERT_EQ(s.code, 0) << s.err;
  EXPECT_TRUE(s.err.empty());
  const CliRun p = cli("pipeline --config " + quote(scene + "/pipeline.json") + " --out " + quote(scene + "/run"), dir);
  ASSERT_EQ(p.code, 0) << p.err;
  EXPECT_TRUE(p.err.empty());
  const AnnotatedCloud ac = load_annotated_cloud(scene + "/run/friction.ply");
  ASSERT_TRUE(ac.annotations.has_value());
  ASSERT_GT(ac.cloud.size(), 100u);
  for (double f : ac.annotations->friction) EXPECT_NEAR(f, 0.3, 0.05);
  for (const char* name : {"model.json", "density.csv", "regions.csv", "trace.csv", "manifest.json"})
    EXPECT_TRUE(fs::exists(scene + "/run/" + name)) << name;
  EXPECT_EQ(read_text(scene + "/run/density.csv").substr(0, 22), "bin_low,bin_high,count");
  EXPECT_NO_THROW(load_model(scene + "/run/model.json"));
}

TEST(Cli, ExitCodes) {
  TempDir dir("cli");
  const std::string scene = dir.file("box");
  ASSERT_EQ(cli("synth --shape box --out " + quote(scene), dir).code, 0);
  const std::string cfg = quote(scene + "/pipeline.json");

  // configuration
  EXPECT_EQ(cli("synth --shape pyramid --out " + quote(dir.file("x")), dir).code, 1);
  EXPECT_EQ(cli("pipeline --config " + cfg + " -n 0", dir).code, 1);
  EXPECT_EQ(cli("repeat --config " + cfg + " --runs 1", dir).code, 1);
  EXPECT_EQ(cli("pipeline --no-such-flag", dir).code, 1);
  EXPECT_EQ(cli("synth --shape two-band-cylinder -m 1,1,1:0.3 --out " + quote(dir.file("y")), dir).code, 1);

  // I/O
  Json j = load_json(scene + "/pipeline.json");
  j["cloud"] = "missing.ply";
  save_json(j, scene + "/missing.json");
  const CliRun missing = cli("pipeline --config " + quote(scene + "/missing.json"), dir);
  EXPECT_EQ(missing.code, 2);
  EXPECT_NE(missing.err.find("missing.ply"), std::string::npos);
  EXPECT_EQ(std::count(missing.err.begin(), missing.err.end(), '\n'), 1);
  write_text(scene + "/broken.json", "{");
  EXPECT_EQ(cli("pipeline --config " + quote(scene + "/broken.json"), dir).code, 2);

  // grasp validation and infeasibility
  ASSERT_EQ(cli("pipeline --config " + cfg + " --out " + quote(scene + "/run"), dir).code, 0);
  const std::string fply = quote(scene + "/run/friction.ply");
  EXPECT_EQ(cli("grasp --friction " + fply + " --mesh " + quote(scene + "/mesh.off") + " --count 0", dir).code, 1);
  write_text(scene + "/tet.off", "OFF\n4 4 0\n0 0 0\n0.05 0 0\n0 0.05 0\n0 0 0.05\n3 0 2 1\n3 0 1 3\n3 0 3 2\n3 1 2 3\n");
  const CliRun inf = cli("grasp --friction " + fply + " --mesh " + quote(scene + "/tet.off") +
                             " --uniform-friction 0 --count 10 --out " + quote(dir.file("g")),
                         dir);
  EXPECT_EQ(inf.code, 4) << inf.err;
}

TEST(Cli, OverflowingTraceIsNumericalFailure) {
  TempDir dir("cli");
  const std::string scene = dir.file("box");
  ASSERT_EQ(cli("synth --shape box --out " + quote(scene), dir).code, 0);
  const SyntheticScene s = make_scene(SceneParams{});
  // contacts on the object with a tangential force far beyond double range once squared
  std::ostringstream csv;
  write_trace_csv(csv, [&] {
    HapticTrace t;
    const auto obj = object_indices(s);
    for (std::size_t k = 0; k < 20; ++k) {
      ContactSample c;
      c.time = 0.01 * static_cast<double>(k);
      c.contact_position = s.cloud.points[obj[k * 7]].position;
      c.force = Vec3(1e300 * (1.0 + 0.1 * static_cast<double>(k)), 0.0, 5.0);
      t.samples.push_back(c);
    }
    return t;
  }());
  write_text(scene + "/huge.csv", csv.str());
  const CliRun r = cli("pipeline --config " + quote(scene + "/pipeline.json") + " --trace " + quote(scene + "/huge.csv") +
                           " --out " + quote(scene + "/huge"),
                       dir);
  EXPECT_EQ(r.code, 3) << r.err;
  EXPECT_FALSE(r.err.empty());
}

TEST(Cli, SynthIsByteIdenticalForASeed) {
  TempDir dir("cli");
  const std::string a = dir.file("a"), b = dir.file("b"), c = dir.file("c");
  ASSERT_EQ(cli("synth --shape two-band-cylinder --seed 5 --out " + quote(a), dir).code, 0);
  ASSERT_EQ(cli("synth --shape two-band-cylinder --seed 5 --out " + quote(b), dir).code, 0);
  ASSERT_EQ(cli("synth --shape two-band-cylinder --seed 6 --out " + quote(c), dir).code, 0);
  for (const char* name : {"cloud.ply", "truth.csv", "mesh.off", "mesh_labels.csv", "pipeline.json"})
    EXPECT_EQ(read_text(a + "/" + name), read_text(b + "/" + name)) << name;
  EXPECT_NE(read_text(a + "/cloud.ply"), read_text(c + "/cloud.ply"));
  EXPECT_EQ(load_json(a + "/manifest.json")["artifacts"], load_json(b + "/manifest.json")["artifacts"]);
  EXPECT_EQ(load_json(a + "/manifest.json")["seed"], 5);
}

TEST(Cli, PipelineManifestIsReproducible) {
  TempDir dir("cli");
  const std::string scene = dir.file("s");
  ASSERT_EQ(cli("synth --shape two-band-cylinder --out " + quote(scene), dir).code, 0);
  const std::string cfg = quote(scene + "/pipeline.json");
  ASSERT_EQ(cli("pipeline --config " + cfg + " --seed 4 --out " + quote(scene + "/r1"), dir).code, 0);
  ASSERT_EQ(cli("pipeline --config " + cfg + " --seed 4 --out " + quote(scene + "/r2"), dir).code, 0);
  const Json m1 = load_json(scene + "/r1/manifest.json"), m2 = load_json(scene + "/r2/manifest.json");
  EXPECT_EQ(m1["artifacts"], m2["artifacts"]);
  EXPECT_EQ(m1["seed"], 4);
  for (const auto& [name, sum] : m1["artifacts"].items())
    EXPECT_EQ(sum.get<std::string>(), file_checksum(scene + "/r1/" + name)) << name;
}

TEST(Cli, RepeatAndDensity) {
  TempDir dir("cli");
  const std::string scene = dir.file("s");
  ASSERT_EQ(cli("synth --shape two-band-cylinder --out " + quote(scene), dir).code, 0);
  const CliRun r = cli("repeat --config " + quote(scene + "/pipeline.json") + " --runs 2 --out " + quote(scene + "/rep"), dir);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.err.empty());
  const Json peaks = load_json(scene + "/rep/peaks.json");
  ASSERT_EQ(peaks.size(), 2u);
  const CliRun d = cli("density --regions " + quote(scene + "/rep/run_0/regions.csv") + " --bin-width 0.025", dir);
  ASSERT_EQ(d.code, 0) << d.err;
  EXPECT_EQ(d.out.substr(0, 22), "bin_low,bin_high,count");
}

TEST(Cli, MugGraspsLandOnTheHighFrictionBand) {
  TempDir dir("cli");
  const std::string scene = dir.file("mug");
  ASSERT_EQ(cli("synth --shape mug --out " + quote(scene), dir).code, 0);
  ASSERT_EQ(cli("pipeline --config " + quote(scene + "/pipeline.json") + " --out " + quote(scene + "/run"), dir).code, 0);
  const CliRun g = cli("grasp --friction " + quote(scene + "/run/friction.ply") + " --mesh " + quote(scene + "/mesh.off") +
                           " --count 1000 --top-k 5 --out " + quote(scene + "/grasps"),
                       dir);
  ASSERT_EQ(g.code, 0) << g.err;
  EXPECT_TRUE(g.err.empty());
  const std::vector<int> labels = read_face_labels(scene + "/mesh_labels.csv");
  const Json grasps = load_json(scene + "/grasps/grasps.json");
  ASSERT_EQ(grasps.size(), 5u);
  int high = 0;
  for (const auto& x : grasps) {
    high += labels.at(x["face_a"].get<std::size_t>()) == 1;
    high += labels.at(x["face_b"].get<std::size_t>()) == 1;
  }
  EXPECT_GE(high, 9);

  // the uniform baseline ignores the field
  const CliRun u = cli("grasp --friction " + quote(scene + "/run/friction.ply") + " --mesh " + quote(scene + "/mesh.off") +
                           " --count 300 --uniform-friction 0.6 --out " + quote(scene + "/uniform"),
                       dir);
  ASSERT_EQ(u.code, 0) << u.err;
  EXPECT_TRUE(load_json(scene + "/uniform/manifest.json")["config"]["uniform_friction"] == 0.6);
}
