#pragma once

#include "vhfriction/frictionmodel.hpp"
#include "vhfriction/grasping.hpp"

#include "json.hpp"

#include <fstream>
#include <string>

namespace vhf {

using Json = nlohmann::json;

inline Json vec_to_json(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

template <int N>
Eigen::Matrix<double, N, 1> json_to_vec(const Json& j, const std::string& what) {
  if (!j.is_array() || j.size() != static_cast<std::size_t>(N))
    throw InvalidArgument(what + " must be an array of " + std::to_string(N) + " numbers");
  Eigen::Matrix<double, N, 1> v;
  for (int i = 0; i < N; ++i) {
    if (!j[static_cast<std::size_t>(i)].is_number()) throw InvalidArgument(what + " must hold numbers");
    v(i) = j[static_cast<std::size_t>(i)].get<double>();
  }
  return v;
}

// ---------------------------------------------------------------------------
// Model: {n_materials, components: [{prior, mean[4], covariance[4][4], is_background}]}

inline Json model_to_json(const VhGmm& m) {
  Json comps = Json::array();
  for (const auto& c : m.components) {
    Json cov = Json::array();
    for (int r = 0; r < 4; ++r) cov.push_back(vec_to_json(c.covariance.row(r).transpose()));
    comps.push_back({{"prior", c.prior},
                     {"mean", vec_to_json(c.mean)},
                     {"covariance", cov},
                     {"is_background", c.is_background}});
  }
  return {{"n_materials", m.n_materials}, {"components", comps}};
}

inline VhGmm model_from_json(const Json& j) {
  try {
    VhGmm m;
    m.n_materials = j.at("n_materials").get<int>();
    for (const auto& c : j.at("components")) {
      GaussianComponent g;
      g.prior = c.at("prior").get<double>();
      g.mean = json_to_vec<4>(c.at("mean"), "mean");
      const Json& cov = c.at("covariance");
      if (!cov.is_array() || cov.size() != 4) throw InvalidArgument("covariance must be 4x4");
      for (int r = 0; r < 4; ++r) g.covariance.row(r) = json_to_vec<4>(cov[static_cast<std::size_t>(r)], "covariance row").transpose();
      g.is_background = c.at("is_background").get<bool>();
      m.components.push_back(g);
    }
    return m;
  } catch (const Json::exception& e) {
    throw InvalidArgument(std::string("malformed model JSON: ") + e.what());
  }
}

inline void save_json(const Json& j, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write '" + path + "'");
  os << j.dump(2) << '\n';
  if (!os) throw IoError("write failed for '" + path + "'");
}

inline Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ParseError(e.what(), 1, path);
  }
}

inline void save_model(const VhGmm& m, const std::string& path) { save_json(model_to_json(m), path); }

inline VhGmm load_model(const std::string& path) {
  const Json j = load_json(path);
  try {
    VhGmm m = model_from_json(j);
    m.validate();
    return m;
  } catch (const InvalidArgument& e) {
    throw ParseError(e.what(), 1, path);
  }
}

// ---------------------------------------------------------------------------
// Grasps: array of {contact_a, contact_b, approach, quality}, quality descending

inline Json grasps_to_json(const std::vector<RankedGrasp>& ranked) {
  Json a = Json::array();
  for (const auto& r : ranked)
    a.push_back({{"contact_a", vec_to_json(r.candidate.contact_a.point)},
                 {"contact_b", vec_to_json(r.candidate.contact_b.point)},
                 {"approach", vec_to_json(r.candidate.approach_vector)},
                 {"quality", r.score.quality},
                 {"face_a", r.candidate.contact_a.face},
                 {"face_b", r.candidate.contact_b.face},
                 {"candidate_index", r.index}});
  return a;
}

}  // namespace vhf
