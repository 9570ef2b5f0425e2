// vhfriction: command-line front end.
//
//   vhfriction synth    --shape two-band-cylinder --out scene/
//   vhfriction pipeline --config scene/pipeline.json
//   vhfriction repeat   --config scene/pipeline.json --runs 5
//   vhfriction density  --regions scene/run/regions.csv
//   vhfriction grasp    --friction scene/run/friction.ply --mesh scene/mesh.off
//
// Exit codes: 0 ok, 1 configuration, 2 I/O, 3 numerical, 4 infeasible.

#include "vhfriction/vhfriction.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

namespace {

vhf::Material parse_material(const std::string& text) {
  // "r,g,b:cof"
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw vhf::InvalidArgument("material '" + text + "' must look like r,g,b:cof");
  std::vector<double> rgb;
  std::stringstream ss(text.substr(0, colon));
  std::string tok;
  try {
    while (std::getline(ss, tok, ',')) rgb.push_back(std::stod(tok));
    if (rgb.size() != 3) throw std::invalid_argument("rgb");
    return {vhf::Vec3(rgb[0], rgb[1], rgb[2]), std::stod(text.substr(colon + 1))};
  } catch (const std::exception&) {
    throw vhf::InvalidArgument("material '" + text + "' must look like r,g,b:cof");
  }
}

std::string absolute(const std::string& p) {
  return p.empty() ? p : std::filesystem::absolute(p).lexically_normal().string();
}

struct PipelineFlags {
  std::string config, cloud, trace, truth, out;
  int n_materials = 0;
  std::uint64_t seed = 0;
  double bin_width = 0.025, noise = 0.0;
  bool per_point = false;
  CLI::Option *o_cloud{}, *o_trace{}, *o_nm{}, *o_seed{}, *o_out{}, *o_bin{}, *o_noise{}, *o_pp{};

  void add(CLI::App* app) {
    app->add_option("-c,--config", config, "pipeline config JSON (paths resolve against its directory)");
    o_cloud = app->add_option("--cloud", cloud, "input scene PLY");
    o_trace = app->add_option("--trace", trace, "haptic trace CSV (time,x,y,z,fx,fy,fz)");
    o_nm = app->add_option("-n,--n-materials", n_materials, "number of materials n (C = n + 1)");
    o_seed = app->add_option("-s,--seed", seed, "RNG seed");
    o_out = app->add_option("-o,--out", out, "output directory");
    o_bin = app->add_option("--bin-width", bin_width, "density histogram bin width");
    o_noise = app->add_option("--trace-noise", noise, "c.o.f. noise std of the synthetic trace");
    o_pp = app->add_flag("--per-point", per_point, "per-point GMR in the friction PLY");
  }

  // Flags win over the config file.
  vhf::PipelineConfig resolve() const {
    vhf::Json j = vhf::Json::object();
    std::string base;
    if (!config.empty()) {
      j = vhf::load_json(config);
      base = std::filesystem::path(config).parent_path().string();
    }
    vhf::PipelineConfig c = vhf::PipelineConfig::from_json(j, base);
    if (o_cloud->count()) c.cloud = absolute(cloud);
    if (o_trace->count()) {
      c.trace = absolute(trace);
      c.synthetic_trace.reset();
    }
    if (o_nm->count()) c.n_materials = n_materials;
    if (o_seed->count()) c.seed = seed;
    if (o_out->count()) c.output_dir = absolute(out);
    if (o_bin->count()) c.bin_width = bin_width;
    if (o_noise->count()) {
      if (!c.synthetic_trace) throw vhf::InvalidArgument("--trace-noise needs a synthetic_trace in the config");
      c.synthetic_trace->slide.noise_std = noise;
    }
    if (o_pp->count()) c.per_point = per_point;
    return c;
  }
};

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const vhf::InvalidArgument*>(&e)) return 1;
  if (dynamic_cast<const vhf::IoError*>(&e)) return 2;
  if (dynamic_cast<const vhf::NumericalError*>(&e)) return 3;
  if (dynamic_cast<const vhf::InfeasibleError*>(&e)) return 4;
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Visuo-haptic friction estimation and friction-aware grasp sampling"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic table-top scene");
  std::string shape = "box", synth_out = "scene", decal;
  std::vector<std::string> materials;
  vhf::SceneParams sp;
  synth->add_option("--shape", shape, "box | cylinder | two-band-cylinder | checker-board | mug");
  synth->add_option("-m,--material", materials, "material as r,g,b:cof (repeat per material)");
  synth->add_option("--color-noise", sp.color_noise, "RGB noise std");
  synth->add_option("--position-noise", sp.position_noise, "object point noise std (m)");
  synth->add_option("--spacing", sp.spacing, "object point spacing (m)");
  synth->add_option("--decal", decal, "add a small patch of a further material r,g,b:cof");
  synth->add_option("-s,--seed", sp.seed, "RNG seed");
  synth->add_option("-o,--out", synth_out, "output directory");

  // pipeline
  auto* pipeline = app.add_subcommand("pipeline", "filter, segment, explore, fit and infer");
  PipelineFlags pflags;
  pflags.add(pipeline);

  // repeat
  auto* repeat = app.add_subcommand("repeat", "run the pipeline with seeds seed+0..runs-1");
  PipelineFlags rflags;
  rflags.add(repeat);
  int runs = 5;
  repeat->add_option("-r,--runs", runs, "number of runs (>= 2)");

  // density
  auto* density = app.add_subcommand("density", "region density histogram and peaks");
  std::string regions_csv, density_out;
  double density_bin = 0.025;
  density->add_option("--regions", regions_csv, "regions.csv from a pipeline run")->required();
  density->add_option("--bin-width", density_bin, "bin width");
  density->add_option("-o,--out", density_out, "density CSV path (stdout when omitted)");

  // grasp
  auto* grasp = app.add_subcommand("grasp", "friction-aware antipodal grasp sampling and ranking");
  vhf::GraspConfig gc;
  double uniform = -1.0;
  grasp->add_option("--friction", gc.friction_ply, "friction PLY from a pipeline run")->required();
  grasp->add_option("--mesh", gc.mesh, "object mesh (OFF or PLY)")->required();
  grasp->add_option("--count", gc.sampler.count, "antipodal candidates to sample");
  grasp->add_option("-s,--seed", gc.sampler.seed, "RNG seed");
  auto* o_uniform = grasp->add_option("--uniform-friction", uniform, "ignore the field and use this c.o.f. everywhere");
  grasp->add_option("--top-k", gc.top_k, "grasps to keep");
  grasp->add_option("--cone-edges", gc.scoring.cone_edges, "friction cone edges");
  grasp->add_option("--torsional-radius", gc.scoring.torsional_radius, "soft-contact patch radius (m); 0 = point contact");
  grasp->add_option("--finger-length", gc.gripper.finger_length, "m");
  grasp->add_option("--finger-width", gc.gripper.finger_width, "m");
  grasp->add_option("--max-opening", gc.gripper.max_opening, "m");
  grasp->add_option("--palm-depth", gc.gripper.palm_depth, "m");
  grasp->add_option("-o,--out", gc.output_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    if (*synth) {
      sp.shape = vhf::parse_shape(shape);
      for (const auto& m : materials) sp.materials.push_back(parse_material(m));
      if (!decal.empty()) sp.decal = parse_material(decal);
      std::cout << vhf::run_synth(sp, synth_out).summary << '\n';
    } else if (*pipeline) {
      std::cout << vhf::run_pipeline(pflags.resolve()).summary << '\n';
    } else if (*repeat) {
      std::cout << vhf::run_repeat(rflags.resolve(), runs).summary << '\n';
    } else if (*density) {
      std::cout << vhf::run_density(regions_csv, density_bin, density_out) << '\n';
    } else if (*grasp) {
      if (o_uniform->count()) gc.sampler.uniform_friction = uniform;
      std::cout << vhf::run_grasp(gc).summary << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
  return 0;
}
