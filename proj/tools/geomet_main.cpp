#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "geomet/closed_forms.hpp"
#include "geomet/datasets.hpp"
#include "geomet/fit.hpp"
#include "geomet/graph.hpp"
#include "geomet/io.hpp"
#include "geomet/objectives.hpp"
#include "geomet/stats.hpp"
#include "geomet/transport.hpp"

namespace {

using geomet::Backend;
using geomet::Vec;
using nlohmann::json;

// Relative output paths land in $GEOMET_OUT_DIR when it is set.
std::string out_path(const std::string& path) {
  const char* dir = std::getenv("GEOMET_OUT_DIR");
  if (dir == nullptr || *dir == '\0' || path.empty() ||
      std::filesystem::path(path).is_absolute()) {
    return path;
  }
  std::filesystem::create_directories(dir);
  return (std::filesystem::path(dir) / path).string();
}

Vec parse_vec(const std::string& text) {
  std::vector<double> vals;
  std::string token;
  std::istringstream in(text);
  while (std::getline(in, token, ',')) {
    try {
      vals.push_back(std::stod(token));
    } catch (const std::exception&) {
      throw geomet::ArgumentError("cannot parse vector component '" + token + "'");
    }
  }
  if (vals.empty()) throw geomet::ArgumentError("empty vector argument");
  return Eigen::Map<const Vec>(vals.data(), static_cast<int>(vals.size()));
}

std::string format_vec(const Vec& v) {
  std::string out;
  char buf[40];
  for (int i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", v(i));
    if (i > 0) out += ",";
    out += buf;
  }
  return out;
}

Backend parse_backend(const std::string& name) {
  if (name == "auto") return Backend::Auto;
  if (name == "exact") return Backend::Exact;
  if (name == "graph") return Backend::Graph;
  if (name == "shooting") return Backend::Shooting;
  throw geomet::ArgumentError("unknown backend '" + name + "'");
}

struct ObjectiveData {
  std::string kind;
  geomet::TripletSet triplets;
  geomet::PairSets pairs;
  geomet::DistanceObservations observations;
  geomet::TrajectorySet trajectories;
};

ObjectiveData load_objective_data(const std::string& kind, const std::string& data_file) {
  ObjectiveData data;
  data.kind = kind;
  if (kind == "triplet" || kind == "contrastive") {
    const geomet::LabeledDataset pts = geomet::read_points(data_file);
    data.triplets = geomet::build_nearest_triplets(pts);
    for (const geomet::Triplet& t : data.triplets.triplets) {
      data.pairs.similar.push_back({t.anchor, t.positive});
      data.pairs.dissimilar.push_back({t.anchor, t.negative});
    }
  } else if (kind == "distance-regression") {
    data.observations = geomet::read_observations(data_file);
  } else if (kind == "trajectory") {
    data.trajectories = geomet::read_trajectories(data_file);
  } else {
    throw geomet::ArgumentError("unknown objective '" + kind + "'");
  }
  return data;
}

double objective_value(const geomet::MetricField& field, const ObjectiveData& data, double margin,
                       Backend backend, const geomet::SolverConfig& solver) {
  if (data.kind == "triplet") {
    return geomet::triplet_loss(field, data.triplets, margin, backend, solver);
  }
  if (data.kind == "contrastive") {
    return geomet::contrastive_loss(field, data.pairs, geomet::ContrastiveVariant::SumDiff,
                                    backend, solver);
  }
  if (data.kind == "distance-regression") {
    return geomet::distance_regression_loss(field, data.observations, backend, solver);
  }
  return geomet::trajectory_loss(field, data.trajectories, solver);
}

int run(int argc, char** argv) {
  CLI::App app{"Riemannian metric learning toolkit"};
  app.require_subcommand(1);

  // ---- gen ----
  auto* gen = app.add_subcommand("gen", "Generate a benchmark dataset");
  std::string gen_kind = "spiral", gen_field, gen_out = "data.txt";
  int gen_n = 150, gen_traj = 8, gen_samples = 12;
  double gen_turns = 2.0, gen_noise = 0.05, gen_sx = 2.0, gen_sy = 0.2;
  std::uint64_t gen_seed = 0;
  gen->add_option("--kind", gen_kind, "spiral | aniso | trajectories");
  gen->add_option("--n", gen_n, "points per class");
  gen->add_option("--turns", gen_turns, "spiral turns");
  gen->add_option("--noise", gen_noise, "jitter standard deviation");
  gen->add_option("--scale-x", gen_sx, "aniso grid x spacing");
  gen->add_option("--scale-y", gen_sy, "aniso grid y gap");
  gen->add_option("--field", gen_field, "field file (trajectories)");
  gen->add_option("--n-traj", gen_traj, "number of trajectories");
  gen->add_option("--samples", gen_samples, "samples per trajectory");
  gen->add_option("--seed", gen_seed, "rng seed");
  gen->add_option("--out", gen_out, "output file");

  // ---- fit ----
  auto* fit = app.add_subcommand("fit", "Fit metric parameters to data");
  std::string fit_family, fit_objective = "triplet", fit_data, fit_out = "report.json";
  std::string fit_field_out, fit_mode = "adam", fit_backend = "auto";
  double fit_margin = 1.0;
  geomet::FitConfig fit_cfg;
  geomet::SolverConfig fit_solver;
  fit->add_option("--family", fit_family, "initial field file")->required();
  fit->add_option("--objective", fit_objective,
                  "triplet | contrastive | distance-regression | trajectory");
  fit->add_option("--data", fit_data, "data file")->required();
  fit->add_option("--out", fit_out, "fit report output");
  fit->add_option("--fitted-field", fit_field_out, "write the fitted field here");
  fit->add_option("--max-iter", fit_cfg.max_iter, "iteration budget");
  fit->add_option("--step", fit_cfg.step_size, "step size");
  fit->add_option("--tol", fit_cfg.tol, "gradient tolerance");
  fit->add_option("--seed", fit_cfg.seed, "rng seed");
  fit->add_option("--batch", fit_cfg.batch_size, "minibatch size (0 = full)");
  fit->add_option("--mode", fit_mode, "adam | line-search");
  fit->add_option("--margin", fit_margin, "triplet margin");
  fit->add_option("--backend", fit_backend, "auto | exact | graph | shooting");
  fit->add_option("--graph-k", fit_solver.graph_k, "kNN degree for the graph backend");

  // ---- eval ----
  auto* eval = app.add_subcommand("eval", "Evaluate a loss or LOO accuracy");
  std::string eval_field, eval_objective = "triplet", eval_data, eval_backend = "auto";
  std::string eval_out;
  double eval_margin = 1.0;
  bool eval_loo = false;
  int eval_k = 1;
  geomet::SolverConfig eval_solver;
  eval->add_option("--field", eval_field, "field file")->required();
  eval->add_option("--objective", eval_objective,
                   "triplet | contrastive | distance-regression | trajectory");
  eval->add_option("--data", eval_data, "data file")->required();
  eval->add_flag("--loo", eval_loo, "leave-one-out accuracy instead of a loss");
  eval->add_option("--k", eval_k, "kNN vote size for --loo");
  eval->add_option("--margin", eval_margin, "triplet margin");
  eval->add_option("--backend", eval_backend, "auto | exact | graph | shooting");
  eval->add_option("--graph-k", eval_solver.graph_k, "kNN degree for the graph backend");
  eval->add_option("--out", eval_out, "also write the value to this file");

  // ---- dist ----
  auto* dist = app.add_subcommand("dist", "Distance between two points");
  std::string dist_field, dist_x, dist_y, dist_method = "shooting", dist_out;
  geomet::SolverConfig dist_cfg;
  dist->add_option("--field", dist_field, "field file")->required();
  dist->add_option("--x", dist_x, "start point, comma separated")->required();
  dist->add_option("--y", dist_y, "end point, comma separated")->required();
  dist->add_option("--method", dist_method, "shooting | bvp | curve");
  dist->add_option("--steps", dist_cfg.steps, "integrator steps");
  dist->add_option("--nodes", dist_cfg.bvp_nodes, "bvp nodes");
  dist->add_option("--out", dist_out, "also write the value to this file");

  // ---- geodesic ----
  auto* geo = app.add_subcommand("geodesic", "Geodesic path between two points");
  std::string geo_field, geo_x, geo_y, geo_method = "bvp", geo_out = "path.txt";
  int geo_basis = 8;
  geomet::SolverConfig geo_cfg;
  geo->add_option("--field", geo_field, "field file")->required();
  geo->add_option("--x", geo_x, "start point")->required();
  geo->add_option("--y", geo_y, "end point")->required();
  geo->add_option("--method", geo_method, "bvp | shooting | curve");
  geo->add_option("--steps", geo_cfg.steps, "integrator steps");
  geo->add_option("--nodes", geo_cfg.bvp_nodes, "bvp nodes");
  geo->add_option("--basis", geo_basis, "curve basis size");
  geo->add_option("--out", geo_out, "path output file");

  // ---- transport ----
  auto* trans = app.add_subcommand("transport", "Parallel transport along a geodesic");
  std::string tr_field, tr_x, tr_v, tr_w, tr_method = "ode", tr_out;
  int tr_rungs = 16, tr_steps = 100;
  geomet::SolverConfig tr_cfg;
  trans->add_option("--field", tr_field, "field file")->required();
  trans->add_option("--x", tr_x, "base point")->required();
  trans->add_option("--v", tr_v, "geodesic velocity")->required();
  trans->add_option("--w", tr_w, "vector to transport")->required();
  trans->add_option("--method", tr_method, "ode | schild | pole | fanning");
  trans->add_option("--rungs", tr_rungs, "ladder rungs");
  trans->add_option("--fanning-steps", tr_steps, "fanning steps");
  trans->add_option("--steps", tr_cfg.steps, "integrator steps");
  trans->add_option("--out", tr_out, "write endpoint and vector to this file");

  // ---- sample ----
  auto* sample = app.add_subcommand("sample", "Sample points by Riemannian volume");
  std::string sm_field, sm_lo, sm_hi, sm_out = "samples.txt";
  int sm_n = 100;
  std::uint64_t sm_seed = 0;
  sample->add_option("--field", sm_field, "field file")->required();
  sample->add_option("--lo", sm_lo, "box lower corner")->required();
  sample->add_option("--hi", sm_hi, "box upper corner")->required();
  sample->add_option("--n", sm_n, "number of samples");
  sample->add_option("--seed", sm_seed, "rng seed");
  sample->add_option("--out", sm_out, "output points file");

  // ---- export-plot ----
  auto* plot = app.add_subcommand("export-plot", "Flatten results into plot-ready tables");
  std::string pl_path, pl_report, pl_points, pl_field, pl_out = "plot.txt";
  int pl_k = 8;
  plot->add_option("--path", pl_path, "geodesic path file to tabulate");
  plot->add_option("--report", pl_report, "fit report whose loss curve to tabulate");
  plot->add_option("--points", pl_points, "points file to graph");
  plot->add_option("--field", pl_field, "field for graph edge weights");
  plot->add_option("--k", pl_k, "kNN degree for --points");
  plot->add_option("--out", pl_out, "output table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (gen->parsed()) {
    if (gen_kind == "spiral") {
      geomet::write_points(out_path(gen_out), geomet::gen_spiral(gen_n, gen_turns, gen_noise, gen_seed));
    } else if (gen_kind == "aniso") {
      geomet::write_points(out_path(gen_out), geomet::gen_aniso_grid(gen_n, gen_sx, gen_sy, gen_seed));
    } else if (gen_kind == "trajectories") {
      if (gen_field.empty()) throw geomet::ArgumentError("gen trajectories needs --field");
      const auto field = geomet::load_field(gen_field);
      geomet::write_trajectories(
          out_path(gen_out),
          geomet::gen_trajectories(*field, gen_traj, gen_samples, gen_noise, gen_seed));
    } else {
      throw geomet::ArgumentError("unknown dataset kind '" + gen_kind + "'");
    }
    return 0;
  }

  if (fit->parsed()) {
    const auto family = geomet::load_packable(fit_family);
    const ObjectiveData data = load_objective_data(fit_objective, fit_data);
    const Backend backend = parse_backend(fit_backend);
    if (fit_mode == "line-search") {
      fit_cfg.mode = geomet::FitMode::LineSearch;
    } else if (fit_mode != "adam") {
      throw geomet::ArgumentError("unknown fit mode '" + fit_mode + "'");
    }

    geomet::FitObjective objective;
    objective.value = [&](const geomet::MetricField& f) {
      return objective_value(f, data, fit_margin, backend, fit_solver);
    };
    objective.data_size = static_cast<int>(
        data.kind == "triplet" || data.kind == "contrastive" ? data.triplets.triplets.size()
        : data.kind == "distance-regression"                 ? data.observations.items.size()
                                                             : data.trajectories.trajectories.size());
    objective.batch_value = [&](const geomet::MetricField& f, const std::vector<int>& idx) {
      ObjectiveData sub;
      sub.kind = data.kind;
      for (int i : idx) {
        if (data.kind == "triplet" || data.kind == "contrastive") {
          sub.triplets.triplets.push_back(data.triplets.triplets[static_cast<size_t>(i)]);
          sub.pairs.similar.push_back(data.pairs.similar[static_cast<size_t>(i)]);
          sub.pairs.dissimilar.push_back(data.pairs.dissimilar[static_cast<size_t>(i)]);
        } else if (data.kind == "distance-regression") {
          sub.observations.items.push_back(data.observations.items[static_cast<size_t>(i)]);
        } else {
          sub.trajectories.trajectories.push_back(
              data.trajectories.trajectories[static_cast<size_t>(i)]);
        }
      }
      return objective_value(f, sub, fit_margin, backend, fit_solver);
    };

    const geomet::FitReport report = geomet::fit(*family, objective, fit_cfg);

    json run_config;
    run_config["command"] = "fit";
    run_config["family_file"] = fit_family;
    run_config["objective"] = fit_objective;
    run_config["data_file"] = fit_data;
    run_config["backend"] = fit_backend;
    run_config["mode"] = fit_mode;
    run_config["margin"] = fit_margin;
    run_config["max_iter"] = fit_cfg.max_iter;
    run_config["step_size"] = fit_cfg.step_size;
    run_config["tol"] = fit_cfg.tol;
    run_config["seed"] = fit_cfg.seed;
    run_config["batch_size"] = fit_cfg.batch_size;
    run_config["graph_k"] = fit_solver.graph_k;
    geomet::write_text_file(out_path(fit_out),
                            geomet::fit_report_to_json(report, run_config.dump()));
    if (!fit_field_out.empty()) {
      geomet::save_field(out_path(fit_field_out), *family->with_params(report.params));
    }
    std::printf("%.17g\n", report.loss_history.back());
    return 0;
  }

  if (eval->parsed()) {
    const auto field = geomet::load_field(eval_field);
    double value;
    if (eval_loo) {
      geomet::KnnConfig knn;
      knn.k = eval_k;
      knn.backend = parse_backend(eval_backend);
      knn.solver = eval_solver;
      value = geomet::loo_accuracy(*field, geomet::read_points(eval_data), knn);
    } else {
      const ObjectiveData data = load_objective_data(eval_objective, eval_data);
      value = objective_value(*field, data, eval_margin, parse_backend(eval_backend), eval_solver);
    }
    std::printf("%.17g\n", value);
    if (!eval_out.empty()) {
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.17g\n", value);
      geomet::write_text_file(out_path(eval_out), buf);
    }
    return 0;
  }

  if (dist->parsed()) {
    const auto field = geomet::load_field(dist_field);
    geomet::DistanceMethod method = geomet::DistanceMethod::Shooting;
    if (dist_method == "bvp") method = geomet::DistanceMethod::Bvp;
    else if (dist_method == "curve") method = geomet::DistanceMethod::Curve;
    else if (dist_method != "shooting") {
      throw geomet::ArgumentError("unknown distance method '" + dist_method + "'");
    }
    const double d =
        geomet::riemannian_distance(*field, parse_vec(dist_x), parse_vec(dist_y), method, dist_cfg);
    std::printf("%.17g\n", d);
    if (!dist_out.empty()) {
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.17g\n", d);
      geomet::write_text_file(out_path(dist_out), buf);
    }
    return 0;
  }

  if (geo->parsed()) {
    const auto field = geomet::load_field(geo_field);
    const Vec x = parse_vec(geo_x), y = parse_vec(geo_y);
    geomet::GeodesicPath path;
    if (geo_method == "bvp") {
      path = geomet::geodesic_bvp(*field, x, y, geo_cfg);
    } else if (geo_method == "shooting") {
      path = geomet::exp_map(*field, x, geomet::log_map_shooting(*field, x, y, geo_cfg).dir, geo_cfg);
    } else if (geo_method == "curve") {
      path = geomet::geodesic_regression_curve(*field, x, y, geo_basis, geo_cfg);
    } else {
      throw geomet::ArgumentError("unknown geodesic method '" + geo_method + "'");
    }
    geomet::write_path(out_path(geo_out), path);
    return 0;
  }

  if (trans->parsed()) {
    const auto field = geomet::load_field(tr_field);
    const Vec x = parse_vec(tr_x), v = parse_vec(tr_v), w = parse_vec(tr_w);
    geomet::TangentVector moved{x, w};
    if (tr_method == "fanning") {
      moved = geomet::fanning_scheme(*field, x, v, w, tr_steps);
    } else {
      const geomet::GeodesicPath curve = geomet::exp_map(*field, x, v, tr_cfg);
      if (tr_method == "ode") moved = geomet::parallel_transport_ode(*field, curve, w);
      else if (tr_method == "schild") moved = geomet::schild_ladder(*field, curve, w, tr_rungs);
      else if (tr_method == "pole") moved = geomet::pole_ladder(*field, curve, w, tr_rungs);
      else throw geomet::ArgumentError("unknown transport method '" + tr_method + "'");
    }
    std::printf("%s\n%s\n", format_vec(moved.base).c_str(), format_vec(moved.dir).c_str());
    if (!tr_out.empty()) {
      geomet::write_text_file(out_path(tr_out),
                              format_vec(moved.base) + "\n" + format_vec(moved.dir) + "\n");
    }
    return 0;
  }

  if (sample->parsed()) {
    const auto field = geomet::load_field(sm_field);
    geomet::LabeledDataset data;
    data.points = geomet::sample_by_volume(*field, parse_vec(sm_lo), parse_vec(sm_hi), sm_n, sm_seed);
    data.labels.assign(data.points.size(), 0);
    data.n_classes = 1;
    geomet::write_points(out_path(sm_out), data);
    return 0;
  }

  if (plot->parsed()) {
    const int chosen = (!pl_path.empty()) + (!pl_report.empty()) + (!pl_points.empty());
    if (chosen != 1) {
      throw geomet::ArgumentError("export-plot needs exactly one of --path, --report, --points");
    }
    if (!pl_path.empty()) {
      // Re-emit a stored path as (t, coords) rows.
      std::istringstream in(geomet::read_text_file(pl_path));
      std::string line;
      std::ostringstream out;
      while (std::getline(in, line)) {
        std::istringstream row(line);
        std::vector<double> vals;
        double v;
        while (row >> v) vals.push_back(v);
        if (vals.empty()) continue;
        const size_t d = (vals.size() - 1) / 2;
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", vals[0]);
        out << buf;
        for (size_t a = 1; a <= d; ++a) {
          std::snprintf(buf, sizeof(buf), "%.17g", vals[a]);
          out << ' ' << buf;
        }
        out << '\n';
      }
      geomet::write_text_file(out_path(pl_out), out.str());
    } else if (!pl_report.empty()) {
      const json j = json::parse(geomet::read_text_file(pl_report));
      geomet::write_loss_table(out_path(pl_out), j.at("loss_history").get<std::vector<double>>());
    } else {
      const geomet::LabeledDataset data = geomet::read_points(pl_points);
      std::unique_ptr<geomet::MetricField> field;
      if (!pl_field.empty()) field = geomet::load_field(pl_field);
      geomet::write_graph_edges(
          out_path(pl_out), geomet::build_knn_graph(data.points, pl_k, field.get()));
    }
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const geomet::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const geomet::SolverError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
