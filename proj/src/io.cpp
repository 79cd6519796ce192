#include "geomet/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "geomet/closed_forms.hpp"

namespace geomet {
namespace {

using nlohmann::json;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json matrix_to_json(const Mat& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Mat matrix_from_json(const json& rows) {
  if (!rows.is_array() || rows.empty()) throw ArgumentError("field file: expected a matrix");
  const int r = static_cast<int>(rows.size());
  const int c = static_cast<int>(rows[0].size());
  Mat m(r, c);
  for (int i = 0; i < r; ++i) {
    if (static_cast<int>(rows[static_cast<size_t>(i)].size()) != c) {
      throw ArgumentError("field file: ragged matrix rows");
    }
    for (int j = 0; j < c; ++j) m(i, j) = rows[static_cast<size_t>(i)][static_cast<size_t>(j)].get<double>();
  }
  return m;
}

json vectors_to_json(const std::vector<Vec>& vs) {
  json out = json::array();
  for (const Vec& v : vs) {
    json row = json::array();
    for (int i = 0; i < v.size(); ++i) row.push_back(v(i));
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<Vec> vectors_from_json(const json& rows) {
  std::vector<Vec> out;
  for (const auto& row : rows) {
    Vec v(static_cast<int>(row.size()));
    for (int i = 0; i < v.size(); ++i) v(i) = row[static_cast<size_t>(i)].get<double>();
    out.push_back(std::move(v));
  }
  return out;
}

json parse(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ArgumentError(std::string(what) + ": invalid JSON (" + e.what() + ")");
  }
}

json field_json(const MetricField& field) {
  json j;
  j["format_version"] = 1;
  if (const auto* c = dynamic_cast<const ConstantMetric*>(&field)) {
    j["family"] = "constant";
    j["eps"] = c->floor_eps();
    j["packing"] = c->packing() == ConstantMetric::Packing::Factor ? "factor" : "direct";
    j["matrix"] = matrix_to_json(c->matrix());
    if (c->packing() == ConstantMetric::Packing::Factor) j["factor"] = matrix_to_json(c->factor());
    return j;
  }
  if (const auto* v = dynamic_cast<const VoronoiMetric*>(&field)) {
    j["family"] = "voronoi";
    j["centers"] = vectors_to_json(v->centers());
    json locals = json::array();
    for (const Mat& m : v->locals()) locals.push_back(matrix_to_json(m));
    j["locals"] = std::move(locals);
    return j;
  }
  if (const auto* k = dynamic_cast<const KernelMetric*>(&field)) {
    j["family"] = "kernel";
    j["centers"] = vectors_to_json(k->centers());
    json locals = json::array();
    for (const Mat& m : k->locals()) locals.push_back(matrix_to_json(m));
    j["locals"] = std::move(locals);
    j["sigma"] = k->sigma();
    j["eps"] = k->floor_eps();
    j["normalize"] = k->normalized();
    return j;
  }
  if (const auto* d = dynamic_cast<const DensityMetric*>(&field)) {
    j["family"] = "density";
    j["anchors"] = vectors_to_json(d->anchors());
    j["sigma"] = d->sigma();
    j["eps"] = d->floor_eps();
    return j;
  }
  if (dynamic_cast<const HyperbolicHalfPlaneField*>(&field) != nullptr) {
    j["family"] = "hyperbolic";
    return j;
  }
  if (const auto* s = dynamic_cast<const SpdAffineField*>(&field)) {
    j["family"] = "spd-affine";
    j["n"] = s->chart().n();
    return j;
  }
  throw ArgumentError("field_to_json: this field type has no file form");
}

std::unique_ptr<MetricField> field_from(const json& j) {
  if (!j.is_object() || !j.contains("family")) {
    throw ArgumentError("field file: missing family");
  }
  const std::string family = j.at("family").get<std::string>();
  if (family == "identity") {
    return std::make_unique<ConstantMetric>(ConstantMetric::identity(j.at("dim").get<int>()));
  }
  if (family == "constant") {
    const double eps = j.value("eps", 0.0);
    const bool factor = j.value("packing", std::string("factor")) == "factor";
    if (factor) {
      if (!j.contains("factor")) throw ArgumentError("field file: constant/factor needs a factor");
      return std::make_unique<ConstantMetric>(matrix_from_json(j.at("factor")), eps,
                                              ConstantMetric::Packing::Factor);
    }
    return std::make_unique<ConstantMetric>(ConstantMetric::from_matrix(
        matrix_from_json(j.at("matrix")), eps, ConstantMetric::Packing::Direct));
  }
  if (family == "voronoi" || family == "kernel") {
    std::vector<Vec> centers = vectors_from_json(j.at("centers"));
    std::vector<Mat> locals;
    for (const auto& m : j.at("locals")) locals.push_back(matrix_from_json(m));
    if (family == "voronoi") {
      return std::make_unique<VoronoiMetric>(std::move(centers), std::move(locals));
    }
    return std::make_unique<KernelMetric>(std::move(centers), std::move(locals),
                                          j.at("sigma").get<double>(), j.at("eps").get<double>(),
                                          j.value("normalize", false));
  }
  if (family == "density") {
    return std::make_unique<DensityMetric>(vectors_from_json(j.at("anchors")),
                                           j.at("sigma").get<double>(), j.at("eps").get<double>());
  }
  if (family == "hyperbolic") return std::make_unique<HyperbolicHalfPlaneField>();
  if (family == "spd-affine") return std::make_unique<SpdAffineField>(j.at("n").get<int>());
  throw ArgumentError("field file: unknown family '" + family + "'");
}

}  // namespace

void write_points(const std::string& path, const LabeledDataset& data) {
  const int d = data.points.empty() ? 0 : static_cast<int>(data.points[0].size());
  std::ostringstream out;
  out << d << ' ' << data.points.size() << ' ' << data.n_classes << '\n';
  for (size_t i = 0; i < data.points.size(); ++i) {
    for (int a = 0; a < d; ++a) out << fmt(data.points[i](a)) << ' ';
    out << data.labels[i] << '\n';
  }
  write_text_file(path, out.str());
}

LabeledDataset read_points(const std::string& path) {
  std::istringstream in(read_text_file(path));
  int d = 0;
  size_t n = 0;
  LabeledDataset data;
  if (!(in >> d >> n >> data.n_classes) || d < 1) {
    throw ArgumentError("points file: bad header in " + path);
  }
  for (size_t i = 0; i < n; ++i) {
    Vec p(d);
    for (int a = 0; a < d; ++a) {
      if (!(in >> p(a))) throw ArgumentError("points file: truncated row in " + path);
    }
    int label;
    if (!(in >> label)) throw ArgumentError("points file: missing label in " + path);
    data.points.push_back(std::move(p));
    data.labels.push_back(label);
  }
  return data;
}

void write_trajectories(const std::string& path, const TrajectorySet& set) {
  int d = 0;
  for (const Trajectory& t : set.trajectories) {
    if (!t.points.empty()) d = static_cast<int>(t.points[0].size());
  }
  std::ostringstream out;
  out << d << ' ' << set.trajectories.size() << '\n';
  for (size_t id = 0; id < set.trajectories.size(); ++id) {
    const Trajectory& t = set.trajectories[id];
    for (size_t j = 0; j < t.times.size(); ++j) {
      out << id << ' ' << fmt(t.times[j]);
      for (int a = 0; a < d; ++a) out << ' ' << fmt(t.points[j](a));
      out << '\n';
    }
  }
  write_text_file(path, out.str());
}

TrajectorySet read_trajectories(const std::string& path) {
  std::istringstream in(read_text_file(path));
  int d = 0;
  size_t n = 0;
  if (!(in >> d >> n) || d < 1) throw ArgumentError("trajectories file: bad header in " + path);
  TrajectorySet set;
  set.trajectories.resize(n);
  size_t id = 0;
  double t = 0.0;
  while (in >> id >> t) {
    if (id >= n) throw ArgumentError("trajectories file: id out of range in " + path);
    Vec p(d);
    for (int a = 0; a < d; ++a) {
      if (!(in >> p(a))) throw ArgumentError("trajectories file: truncated row in " + path);
    }
    set.trajectories[id].times.push_back(t);
    set.trajectories[id].points.push_back(std::move(p));
  }
  return set;
}

void write_observations(const std::string& path, const DistanceObservations& obs) {
  const int d = obs.items.empty() ? 0 : static_cast<int>(obs.items[0].x.size());
  std::ostringstream out;
  out << d << ' ' << obs.items.size() << '\n';
  for (const DistanceObservation& o : obs.items) {
    for (int a = 0; a < d; ++a) out << fmt(o.x(a)) << ' ';
    for (int a = 0; a < d; ++a) out << fmt(o.y(a)) << ' ';
    out << fmt(o.d_obs) << ' ' << fmt(o.weight) << '\n';
  }
  write_text_file(path, out.str());
}

DistanceObservations read_observations(const std::string& path) {
  std::istringstream in(read_text_file(path));
  int d = 0;
  size_t n = 0;
  if (!(in >> d >> n) || d < 1) throw ArgumentError("observations file: bad header in " + path);
  DistanceObservations obs;
  for (size_t i = 0; i < n; ++i) {
    DistanceObservation o;
    o.x.resize(d);
    o.y.resize(d);
    for (int a = 0; a < d; ++a) {
      if (!(in >> o.x(a))) throw ArgumentError("observations file: truncated row in " + path);
    }
    for (int a = 0; a < d; ++a) {
      if (!(in >> o.y(a))) throw ArgumentError("observations file: truncated row in " + path);
    }
    if (!(in >> o.d_obs >> o.weight)) {
      throw ArgumentError("observations file: truncated row in " + path);
    }
    obs.items.push_back(std::move(o));
  }
  return obs;
}

void write_path(const std::string& path, const GeodesicPath& geo) {
  std::ostringstream out;
  for (size_t i = 0; i < geo.times.size(); ++i) {
    out << fmt(geo.times[i]);
    for (int a = 0; a < geo.points[i].size(); ++a) out << ' ' << fmt(geo.points[i](a));
    for (int a = 0; a < geo.velocities[i].size(); ++a) out << ' ' << fmt(geo.velocities[i](a));
    out << '\n';
  }
  write_text_file(path, out.str());
}

void write_path_table(const std::string& path, const GeodesicPath& geo) {
  std::ostringstream out;
  for (size_t i = 0; i < geo.times.size(); ++i) {
    out << fmt(geo.times[i]);
    for (int a = 0; a < geo.points[i].size(); ++a) out << ' ' << fmt(geo.points[i](a));
    out << '\n';
  }
  write_text_file(path, out.str());
}

void write_graph_edges(const std::string& path, const MetricGraph& graph) {
  std::ostringstream out;
  for (int i = 0; i < graph.n_nodes(); ++i) {
    for (const auto& [j, w] : graph.adj[static_cast<size_t>(i)]) {
      if (i < j) out << i << ' ' << j << ' ' << fmt(w) << '\n';
    }
  }
  write_text_file(path, out.str());
}

void write_loss_table(const std::string& path, const std::vector<double>& loss) {
  std::ostringstream out;
  for (size_t i = 0; i < loss.size(); ++i) out << i << ' ' << fmt(loss[i]) << '\n';
  write_text_file(path, out.str());
}

std::string field_to_json(const MetricField& field) { return field_json(field).dump(2) + "\n"; }

std::unique_ptr<MetricField> field_from_json(const std::string& text) {
  return field_from(parse(text, "field file"));
}

std::unique_ptr<PackableField> packable_from_json(const std::string& text) {
  std::unique_ptr<MetricField> field = field_from(parse(text, "field file"));
  if (dynamic_cast<PackableField*>(field.get()) == nullptr) {
    throw ArgumentError("field file: family is not fittable");
  }
  return std::unique_ptr<PackableField>(static_cast<PackableField*>(field.release()));
}

void save_field(const std::string& path, const MetricField& field) {
  write_text_file(path, field_to_json(field));
}

std::unique_ptr<MetricField> load_field(const std::string& path) {
  return field_from_json(read_text_file(path));
}

std::unique_ptr<PackableField> load_packable(const std::string& path) {
  return packable_from_json(read_text_file(path));
}

std::string fit_report_to_json(const FitReport& report, const std::string& run_config_text) {
  json j;
  j["format_version"] = 1;
  j["params"] = json::array();
  for (int i = 0; i < report.params.size(); ++i) j["params"].push_back(report.params(i));
  j["loss_history"] = report.loss_history;
  j["grad_norm_history"] = report.grad_norm_history;
  switch (report.termination) {
    case Termination::Converged: j["termination"] = "converged"; break;
    case Termination::MaxIter: j["termination"] = "max-iter"; break;
    case Termination::Error: j["termination"] = "error"; break;
  }
  j["message"] = report.message;
  j["iterations"] = report.iterations;
  if (!run_config_text.empty()) {
    json rc = parse(run_config_text, "run config");
    if (!rc.is_object()) throw ArgumentError("run config: must be a json object");
    j["run_config"] = std::move(rc);
  }
  return j.dump(2) + "\n";
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("cannot write file: " + path);
  out << content;
  if (!out) throw ArgumentError("failed writing file: " + path);
}

}  // namespace geomet
