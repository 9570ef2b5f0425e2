#pragma once

// File-level commands: synth, pipeline, repeat, density, grasp. Each writes
// its artifacts plus a manifest.json with the config hash, seed and FNV-1a
// checksums of every artifact.

#include "vhfriction/frictionmodel.hpp"
#include "vhfriction/grasping.hpp"
#include "vhfriction/haptics.hpp"
#include "vhfriction/json_io.hpp"
#include "vhfriction/pointcloud.hpp"
#include "vhfriction/scene.hpp"
#include "vhfriction/segmentation.hpp"

#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace vhf {

namespace fs = std::filesystem;

inline std::string read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::string file_checksum(const std::string& path) { return hex64(fnv1a64(read_bytes(path))); }

inline void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create directory '" + dir + "'");
}

inline void require_file(const std::string& path, const std::string& what) {
  if (path.empty()) throw InvalidArgument(what + " path is required");
  if (!fs::is_regular_file(path)) throw IoError(what + " file '" + path + "' does not exist");
}

/// Writes manifest.json listing each artifact (relative to dir) with its checksum.
inline Json write_manifest(const std::string& dir, const std::string& command, const Json& config,
                           std::uint64_t seed, const std::vector<std::string>& artifacts,
                           const Json& summary = Json::object()) {
  Json sums = Json::object();
  for (const auto& a : artifacts) sums[a] = file_checksum((fs::path(dir) / a).string());
  Json m = {{"command", command},
            {"config", config},
            {"config_hash", hex64(fnv1a64(config.dump()))},
            {"seed", seed},
            {"artifacts", sums},
            {"summary", summary}};
  save_json(m, (fs::path(dir) / "manifest.json").string());
  return m;
}

// ---------------------------------------------------------------------------
// Config helpers

inline std::string resolve_path(const std::string& p, const std::string& base) {
  if (p.empty() || base.empty() || fs::path(p).is_absolute()) return p;
  return (fs::path(base) / p).lexically_normal().string();
}

inline Json vec3_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

template <typename T>
T json_get(const Json& j, const char* key, const T& fallback) {
  if (!j.contains(key) || j[key].is_null()) return fallback;
  try {
    return j[key].get<T>();
  } catch (const Json::exception&) {
    throw InvalidArgument(std::string("config key '") + key + "' has the wrong type");
  }
}

struct SyntheticTraceConfig {
  std::string truth;  // truth CSV aligned with the input cloud
  Vec3 start = Vec3::Zero(), end = Vec3::Zero();
  SlideParams slide;
};

struct PipelineConfig {
  std::string cloud;
  std::optional<std::string> trace;
  std::optional<SyntheticTraceConfig> synthetic_trace;
  int n_materials = 0;
  double crop_max_distance = 1.5;
  Vec3 crop_origin = Vec3::Zero();
  double plane_threshold = 0.01;
  int plane_iterations = kPlaneIterations;
  SegmentationParams segmentation;
  FitOptions em;
  BackgroundPrior background;
  double min_normal_force = kDefaultMinNormalForce;
  bool per_point = false;
  double bin_width = 0.025;
  std::string output_dir = "out";
  std::uint64_t seed = 0;

  Json to_json() const {
    Json j = {{"cloud", cloud},
              {"n_materials", n_materials},
              {"crop", {{"max_distance", crop_max_distance}, {"origin", vec3_json(crop_origin)}}},
              {"plane", {{"threshold", plane_threshold}, {"iterations", plane_iterations}}},
              {"segmentation",
               {{"seed_resolution", segmentation.seed_resolution},
                {"color_weight", segmentation.color_weight},
                {"spatial_weight", segmentation.spatial_weight},
                {"refinement_rounds", segmentation.refinement_rounds}}},
              {"em",
               {{"max_iter", em.max_iter},
                {"log_lik_tol", em.log_lik_tol},
                {"cov_floor", em.cov_floor},
                {"min_background_prior", em.min_background_prior}}},
              {"background", {{"h_mean", background.h_mean}, {"h_var", background.h_var}}},
              {"min_normal_force", min_normal_force},
              {"per_point", per_point},
              {"bin_width", bin_width},
              {"output_dir", output_dir},
              {"seed", seed}};
    if (trace) j["trace"] = *trace;
    if (synthetic_trace) {
      const auto& s = *synthetic_trace;
      j["synthetic_trace"] = {{"truth", s.truth},
                              {"start", vec3_json(s.start)},
                              {"end", vec3_json(s.end)},
                              {"noise_std", s.slide.noise_std},
                              {"normal_force", s.slide.normal_force},
                              {"speed", s.slide.speed},
                              {"rate", s.slide.rate}};
    }
    return j;
  }

  /// Paths are resolved against base_dir (the config file's directory).
  static PipelineConfig from_json(const Json& j, const std::string& base_dir = "") {
    if (!j.is_object()) throw InvalidArgument("pipeline config must be a JSON object");
    PipelineConfig c;
    c.cloud = resolve_path(json_get<std::string>(j, "cloud", ""), base_dir);
    if (j.contains("trace") && !j["trace"].is_null())
      c.trace = resolve_path(json_get<std::string>(j, "trace", ""), base_dir);
    if (j.contains("synthetic_trace") && !j["synthetic_trace"].is_null()) {
      const Json& s = j["synthetic_trace"];
      SyntheticTraceConfig t;
      t.truth = resolve_path(json_get<std::string>(s, "truth", ""), base_dir);
      if (!s.contains("start") || !s.contains("end"))
        throw InvalidArgument("synthetic_trace needs start and end");
      t.start = json_to_vec<3>(s["start"], "synthetic_trace.start");
      t.end = json_to_vec<3>(s["end"], "synthetic_trace.end");
      t.slide.noise_std = json_get(s, "noise_std", t.slide.noise_std);
      t.slide.normal_force = json_get(s, "normal_force", t.slide.normal_force);
      t.slide.speed = json_get(s, "speed", t.slide.speed);
      t.slide.rate = json_get(s, "rate", t.slide.rate);
      c.synthetic_trace = t;
    }
    c.n_materials = json_get(j, "n_materials", 0);
    if (j.contains("crop")) {
      c.crop_max_distance = json_get(j["crop"], "max_distance", c.crop_max_distance);
      if (j["crop"].contains("origin")) c.crop_origin = json_to_vec<3>(j["crop"]["origin"], "crop.origin");
    }
    if (j.contains("plane")) {
      c.plane_threshold = json_get(j["plane"], "threshold", c.plane_threshold);
      c.plane_iterations = json_get(j["plane"], "iterations", c.plane_iterations);
    }
    if (j.contains("segmentation")) {
      const Json& s = j["segmentation"];
      c.segmentation.seed_resolution = json_get(s, "seed_resolution", c.segmentation.seed_resolution);
      c.segmentation.color_weight = json_get(s, "color_weight", c.segmentation.color_weight);
      c.segmentation.spatial_weight = json_get(s, "spatial_weight", c.segmentation.spatial_weight);
      c.segmentation.refinement_rounds = json_get(s, "refinement_rounds", c.segmentation.refinement_rounds);
    }
    if (j.contains("em")) {
      const Json& e = j["em"];
      c.em.max_iter = json_get(e, "max_iter", c.em.max_iter);
      c.em.log_lik_tol = json_get(e, "log_lik_tol", c.em.log_lik_tol);
      c.em.cov_floor = json_get(e, "cov_floor", c.em.cov_floor);
      c.em.min_background_prior = json_get(e, "min_background_prior", c.em.min_background_prior);
    }
    if (j.contains("background")) {
      c.background.h_mean = json_get(j["background"], "h_mean", c.background.h_mean);
      c.background.h_var = json_get(j["background"], "h_var", c.background.h_var);
    }
    c.min_normal_force = json_get(j, "min_normal_force", c.min_normal_force);
    c.per_point = json_get(j, "per_point", c.per_point);
    c.bin_width = json_get(j, "bin_width", c.bin_width);
    c.output_dir = resolve_path(json_get<std::string>(j, "output_dir", c.output_dir), base_dir);
    c.seed = json_get<std::uint64_t>(j, "seed", c.seed);
    return c;
  }

  /// Value checks first (exit 1), then input existence (exit 2).
  void validate() const {
    require(n_materials >= 1, "n_materials must be >= 1");
    require(crop_max_distance > 0, "crop.max_distance must be positive");
    require(plane_threshold > 0, "plane.threshold must be positive");
    require(plane_iterations >= 1, "plane.iterations must be >= 1");
    require(segmentation.seed_resolution > 0, "segmentation.seed_resolution must be positive");
    require(segmentation.refinement_rounds >= 0, "segmentation.refinement_rounds must be >= 0");
    require(em.max_iter >= 1, "em.max_iter must be >= 1");
    require(em.cov_floor > 0, "em.cov_floor must be positive");
    require(em.min_background_prior >= 0 && em.min_background_prior < 1,
            "em.min_background_prior must be in [0, 1)");
    require(background.h_var > 0, "background.h_var must be positive");
    require(min_normal_force > 0, "min_normal_force must be positive");
    require(bin_width > 0, "bin_width must be positive");
    require(!output_dir.empty(), "output_dir is required");
    require(trace.has_value() != synthetic_trace.has_value(),
            "exactly one of 'trace' and 'synthetic_trace' must be given");
    if (synthetic_trace) {
      require((synthetic_trace->end - synthetic_trace->start).norm() > 0,
              "synthetic_trace start and end must differ");
      require(synthetic_trace->slide.noise_std >= 0, "synthetic_trace.noise_std must be >= 0");
      require(synthetic_trace->slide.speed > 0 && synthetic_trace->slide.rate > 0 &&
                  synthetic_trace->slide.normal_force > 0,
              "synthetic_trace speed, rate and normal_force must be positive");
    }
    require_file(cloud, "cloud");
    if (trace) require_file(*trace, "trace");
    if (synthetic_trace) require_file(synthetic_trace->truth, "truth");
  }
};

inline PipelineConfig load_pipeline_config(const std::string& path) {
  const Json j = load_json(path);
  return PipelineConfig::from_json(j, fs::path(path).parent_path().string());
}

// ---------------------------------------------------------------------------
// synth

struct SynthResult {
  SyntheticScene scene;
  std::string summary;
};

inline SynthResult run_synth(const SceneParams& params, const std::string& out_dir) {
  SynthResult r;
  r.scene = make_scene(params);
  const auto& s = r.scene;
  ensure_dir(out_dir);
  const fs::path dir(out_dir);
  save_cloud(s.cloud, (dir / "cloud.ply").string());
  {
    std::ofstream os(dir / "truth.csv");
    if (!os) throw IoError("cannot write truth.csv in '" + out_dir + "'");
    write_truth_csv(os, s);
  }
  save_off(s.mesh, (dir / "mesh.off").string());
  {
    std::ofstream os(dir / "mesh_labels.csv");
    os << "face,label,cof\n";
    for (std::size_t f = 0; f < s.mesh.faces.size(); ++f)
      os << f << ',' << s.mesh_label[f] << ',' << ply::format_float(s.mesh.friction(f)) << '\n';
    if (!os) throw IoError("cannot write mesh_labels.csv");
  }
  const std::size_t n_mat = s.params.materials.size();
  PipelineConfig pc;
  pc.cloud = "cloud.ply";
  pc.n_materials = static_cast<int>(n_mat);
  pc.output_dir = "run";
  pc.seed = params.seed;
  SyntheticTraceConfig st;
  st.truth = "truth.csv";
  st.start = s.trace_start;
  st.end = s.trace_end;
  pc.synthetic_trace = st;
  save_json(pc.to_json(), (dir / "pipeline.json").string());

  Json mats = Json::array();
  for (const auto& m : s.params.materials) mats.push_back({{"color", vec3_json(m.color)}, {"cof", m.cof}});
  Json config = {{"shape", shape_name(s.params.shape)},
                 {"materials", mats},
                 {"color_noise", s.params.color_noise},
                 {"position_noise", s.params.position_noise},
                 {"table_noise", s.params.table_noise},
                 {"spacing", s.params.spacing},
                 {"seed", s.params.seed}};
  if (s.params.decal) config["decal"] = {{"color", vec3_json(s.params.decal->color)}, {"cof", s.params.decal->cof}};
  Json summary = {{"points", s.cloud.size()},
                  {"object_points", object_indices(s).size()},
                  {"trace_start", vec3_json(s.trace_start)},
                  {"trace_end", vec3_json(s.trace_end)},
                  {"mesh_faces", s.mesh.faces.size()}};
  write_manifest(out_dir, "synth", config, params.seed,
                 {"cloud.ply", "truth.csv", "mesh.off", "mesh_labels.csv", "pipeline.json"}, summary);
  r.summary = "synth: " + shape_name(s.params.shape) + ", " + std::to_string(s.cloud.size()) + " points (" +
              std::to_string(object_indices(s).size()) + " object) -> " + out_dir;
  return r;
}

// ---------------------------------------------------------------------------
// pipeline

struct PipelineResult {
  PointCloud scene;          // as loaded
  PointCloud object;         // after crop + plane removal
  std::vector<std::size_t> object_to_scene;
  Partition partition;
  HapticTrace trace;
  std::vector<PointAnnotation> annotations;
  VisuoHapticDataset dataset;
  FitResult fit;
  FrictionField field;
  Histogram histogram;
  std::vector<Peak> peaks;
  std::string summary;
};

inline void write_density_csv(std::ostream& os, const Histogram& h) {
  os << "bin_low,bin_high,count\n";
  for (std::size_t k = 0; k < h.counts.size(); ++k)
    os << ply::format_float(h.bin_low(k)) << ',' << ply::format_float(h.bin_high(k)) << ',' << h.counts[k] << '\n';
}

inline void write_regions_csv(std::ostream& os, const Partition& p, const FrictionField& f) {
  os << "region_id,size,mean,variance,explored,red,green,blue\n";
  for (std::size_t r = 0; r < p.regions.size(); ++r) {
    const auto& reg = p.regions[r];
    const auto& e = f.regions[r];
    char buf[256];
    std::snprintf(buf, sizeof buf, "%d,%zu,%.17g,%.17g,%d,%.9g,%.9g,%.9g\n", reg.id, reg.member_indices.size(),
                  e.mean, e.variance, e.explored ? 1 : 0, reg.mean_color.x(), reg.mean_color.y(),
                  reg.mean_color.z());
    os << buf;
  }
}

inline std::vector<double> read_region_means(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line.rfind("region_id,size,mean", 0) != 0)
    throw ParseError("expected a regions CSV header", 1, path);
  std::vector<double> means;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string id, size, mean;
    if (!std::getline(ss, id, ',') || !std::getline(ss, size, ',') || !std::getline(ss, mean, ','))
      throw ParseError("expected at least 3 columns", lineno, path);
    char* end = nullptr;
    const double v = std::strtod(mean.c_str(), &end);
    if (end != mean.c_str() + mean.size() || !std::isfinite(v)) throw ParseError("invalid mean", lineno, path);
    means.push_back(v);
  }
  return means;
}

inline std::string peaks_text(const std::vector<Peak>& peaks) {
  std::ostringstream os;
  os << peaks.size() << " peak(s)";
  for (std::size_t i = 0; i < peaks.size(); ++i) {
    os << (i == 0 ? " at " : ", ");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", peaks[i].location);
    os << buf;
  }
  return os.str();
}

inline Json peaks_json(const std::vector<Peak>& peaks) {
  Json a = Json::array();
  for (const auto& p : peaks) a.push_back({{"bin", p.bin}, {"location", p.location}, {"count", p.count}});
  return a;
}

inline PipelineResult run_pipeline(const PipelineConfig& cfg) {
  cfg.validate();
  PipelineResult r;
  r.scene = load_cloud(cfg.cloud);
  require(r.scene.size() >= 2, "cloud must contain at least 2 points");

  // filter
  const FilterResult cropped = crop_depth(r.scene, cfg.crop_max_distance, cfg.crop_origin);
  require(cropped.cloud.size() >= 3, "fewer than 3 points survive the depth crop");
  const PlaneRemoval pr = remove_plane(cropped.cloud, std::nullopt, cfg.plane_threshold, cfg.seed, cfg.plane_iterations);
  r.object = pr.filtered.cloud;
  require(!r.object.empty(), "no points remain after plane removal");
  for (auto i : pr.filtered.kept) r.object_to_scene.push_back(cropped.kept[i]);

  // segment
  r.partition = segment(r.object, cfg.segmentation, cfg.seed);

  // explore
  if (cfg.trace) {
    r.trace = load_trace_csv(*cfg.trace);
  } else {
    const auto& st = *cfg.synthetic_trace;
    const GroundTruth truth = load_truth_csv(st.truth);
    if (truth.cof.size() != r.scene.size())
      throw InvalidArgument("truth CSV has " + std::to_string(truth.cof.size()) + " rows but the cloud has " +
                            std::to_string(r.scene.size()) + " points");
    std::vector<double> object_truth;
    object_truth.reserve(r.object.size());
    for (auto i : r.object_to_scene) object_truth.push_back(truth.cof[i]);
    r.trace = synth_trace(r.object, st.start, st.end, object_truth, st.slide, cfg.seed);
  }
  const auto estimates = estimate_trace(r.trace, cfg.min_normal_force);
  if (estimates.empty()) throw InvalidArgument("no trace sample passes the normal-force gate");
  r.annotations = associate(r.trace, estimates, r.object);

  // fit and infer
  r.dataset = build_dataset(r.partition, r.object, r.annotations);
  const GaussianComponent bg = make_background(r.scene, cfg.background, cfg.em.cov_floor);
  FitOptions em = cfg.em;
  em.seed = cfg.seed;
  r.fit = fit(r.dataset, cfg.n_materials, bg, em);
  r.field = infer_field(r.fit.model, r.partition, r.object, cfg.per_point, &r.dataset.region_explored);
  r.histogram = density_histogram(r.field, cfg.bin_width);
  r.peaks = detect_peaks(r.histogram);

  // export
  ensure_dir(cfg.output_dir);
  const fs::path dir(cfg.output_dir);
  save_cloud(r.object, r.field.annotations(), (dir / "friction.ply").string());
  save_model(r.fit.model, (dir / "model.json").string());
  {
    std::ofstream os(dir / "density.csv");
    write_density_csv(os, r.histogram);
    if (!os) throw IoError("cannot write density.csv");
  }
  {
    std::ofstream os(dir / "regions.csv");
    write_regions_csv(os, r.partition, r.field);
    if (!os) throw IoError("cannot write regions.csv");
  }
  save_trace_csv(r.trace, (dir / "trace.csv").string());

  std::size_t explored = 0;
  for (bool e : r.dataset.region_explored) explored += e;
  Json summary = {{"object_points", r.object.size()},
                  {"regions", r.partition.regions.size()},
                  {"explored_regions", explored},
                  {"annotations", r.annotations.size()},
                  {"em_iterations", r.fit.iterations},
                  {"em_converged", r.fit.converged},
                  {"final_log_likelihood", r.fit.log_likelihood.back()},
                  {"peaks", peaks_json(r.peaks)}};
  write_manifest(cfg.output_dir, "pipeline", cfg.to_json(), cfg.seed,
                 {"friction.ply", "model.json", "density.csv", "regions.csv", "trace.csv"}, summary);
  r.summary = "pipeline: " + std::to_string(r.partition.regions.size()) + " regions (" +
              std::to_string(explored) + " explored), " + std::to_string(r.annotations.size()) +
              " annotations, EM " + std::to_string(r.fit.iterations) + " iterations, " + peaks_text(r.peaks) +
              " -> " + cfg.output_dir;
  return r;
}

// ---------------------------------------------------------------------------
// repeat

struct RepeatResult {
  std::vector<std::vector<Peak>> peaks;  // per run
  std::string summary;
};

inline RepeatResult run_repeat(const PipelineConfig& base, int runs) {
  require(runs >= 2, "runs must be >= 2");
  base.validate();
  RepeatResult out;
  Json per_run = Json::array();
  std::vector<std::string> artifacts;
  std::ostringstream text;
  for (int k = 0; k < runs; ++k) {
    PipelineConfig cfg = base;
    cfg.seed = base.seed + static_cast<std::uint64_t>(k);
    cfg.output_dir = (fs::path(base.output_dir) / ("run_" + std::to_string(k))).string();
    PipelineResult r;
    try {
      r = run_pipeline(cfg);
    } catch (const InvalidArgument& e) {
      throw InvalidArgument("run " + std::to_string(k) + ": " + e.what());
    } catch (const ParseError& e) {
      throw IoError("run " + std::to_string(k) + ": " + e.what());
    } catch (const IoError& e) {
      throw IoError("run " + std::to_string(k) + ": " + e.what());
    } catch (const NumericalError& e) {
      throw NumericalError("run " + std::to_string(k) + ": " + e.what());
    }
    out.peaks.push_back(r.peaks);
    per_run.push_back({{"run", k}, {"seed", cfg.seed}, {"peaks", peaks_json(r.peaks)}});
    const std::string density = "run_" + std::to_string(k) + "/density.csv";
    artifacts.push_back(density);
    text << "run " << k << " (seed " << cfg.seed << "): " << peaks_text(r.peaks) << '\n';
  }
  ensure_dir(base.output_dir);
  save_json(per_run, (fs::path(base.output_dir) / "peaks.json").string());
  artifacts.push_back("peaks.json");
  Json cfg_json = base.to_json();
  cfg_json["runs"] = runs;
  write_manifest(base.output_dir, "repeat", cfg_json, base.seed, artifacts, {{"runs", per_run}});
  out.summary = text.str();
  if (!out.summary.empty() && out.summary.back() == '\n') out.summary.pop_back();
  return out;
}

// ---------------------------------------------------------------------------
// density

inline std::string run_density(const std::string& regions_csv, double bin_width, const std::string& out_csv) {
  require(bin_width > 0, "bin_width must be positive");
  const auto means = read_region_means(regions_csv);
  const Histogram h = density_histogram(means, bin_width);
  if (!out_csv.empty()) {
    std::ofstream os(out_csv);
    if (!os) throw IoError("cannot write '" + out_csv + "'");
    write_density_csv(os, h);
  } else {
    std::ostringstream os;
    write_density_csv(os, h);
    return os.str() + "density: " + peaks_text(detect_peaks(h));
  }
  return "density: " + std::to_string(means.size()) + " regions, " + peaks_text(detect_peaks(h)) + " -> " + out_csv;
}

// ---------------------------------------------------------------------------
// grasp

struct GraspConfig {
  std::string friction_ply;
  std::string mesh;
  SamplerParams sampler;
  GripperGeometry gripper;
  ScoringParams scoring;
  std::size_t top_k = 5;
  std::string output_dir = "grasps";

  Json to_json() const {
    Json j = {{"friction_ply", friction_ply},
              {"mesh", mesh},
              {"count", sampler.count},
              {"seed", sampler.seed},
              {"top_k", top_k},
              {"cone_edges", scoring.cone_edges},
              {"torsional_radius", scoring.torsional_radius},
              {"gripper",
               {{"finger_length", gripper.finger_length},
                {"finger_width", gripper.finger_width},
                {"max_opening", gripper.max_opening},
                {"palm_depth", gripper.palm_depth}}},
              {"output_dir", output_dir}};
    j["uniform_friction"] = sampler.uniform_friction ? Json(*sampler.uniform_friction) : Json(nullptr);
    return j;
  }
};

struct GraspRunResult {
  TriangleMesh mesh;
  SamplingResult sampling;
  std::vector<RankedGrasp> ranked;
  std::string summary;
};

inline GraspRunResult run_grasp(const GraspConfig& cfg) {
  require(cfg.sampler.count >= 1, "count must be >= 1");
  require(cfg.top_k >= 1, "top_k must be >= 1");
  require(cfg.scoring.cone_edges >= 3, "cone_edges must be >= 3");
  require(cfg.scoring.torsional_radius >= 0, "torsional_radius must be >= 0");
  if (cfg.sampler.uniform_friction) require(*cfg.sampler.uniform_friction >= 0, "uniform friction must be >= 0");
  cfg.gripper.validate();
  require_file(cfg.friction_ply, "friction PLY");
  require_file(cfg.mesh, "mesh");

  GraspRunResult r;
  const AnnotatedCloud ac = load_annotated_cloud(cfg.friction_ply);
  if (!ac.annotations) throw ParseError("PLY has no friction/variance properties", 1, cfg.friction_ply);
  r.mesh = assign_face_friction(load_mesh(cfg.mesh), ac.cloud, ac.annotations->friction);
  r.sampling = sample_antipodal(r.mesh, cfg.sampler);
  ScoringParams sp = cfg.scoring;
  sp.uniform_friction = cfg.sampler.uniform_friction;
  r.ranked = rank_grasps(r.sampling.candidates, r.mesh, cfg.gripper, cfg.top_k, sp);

  ensure_dir(cfg.output_dir);
  save_json(grasps_to_json(r.ranked), (fs::path(cfg.output_dir) / "grasps.json").string());
  char q[32];
  std::snprintf(q, sizeof q, "%.6g", r.ranked.front().score.quality);
  Json summary = {{"accepted", r.sampling.candidates.size()},
                  {"attempts", r.sampling.attempts},
                  {"returned", r.ranked.size()},
                  {"top_quality", r.ranked.front().score.quality}};
  write_manifest(cfg.output_dir, "grasp", cfg.to_json(), cfg.sampler.seed, {"grasps.json"}, summary);
  r.summary = "grasp: accepted " + std::to_string(r.sampling.candidates.size()) + " of " +
              std::to_string(r.sampling.attempts) + " attempts, top quality " + q + " -> " + cfg.output_dir;
  return r;
}

}  // namespace vhf
