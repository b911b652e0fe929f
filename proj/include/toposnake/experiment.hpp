#pragma once

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "toposnake/aos.hpp"
#include "toposnake/io.hpp"
#include "toposnake/level_set.hpp"
#include "toposnake/metrics.hpp"
#include "toposnake/regularizers.hpp"
#include "toposnake/split_bregman.hpp"

namespace toposnake {

enum class SolverKind { splitbregman, aos };

struct ExperimentConfig {
  std::string input;
  InitSpec init = InitSpec::circle(64.0, 64.0, 57.0);
  SolverKind solver = SolverKind::splitbregman;
  SolverParams sb;
  AosParams aos;
  EdgeParams edge;
  std::string out_dir = "out";
  /// Progress line to stderr every this many iterations; 0 is silent.
  int progress_every = 0;
};

struct SegmentationReport {
  ScalarField phi;
  Mask mask;
  std::vector<Polyline> polylines;
  int region_count_inside = 0;
  int region_count_background = 0;
  std::string energy_csv;
  int iterations = 0;
  bool converged = false;
  double wall_seconds = 0.0;
  std::vector<double> phi_change;
  std::vector<EnergyBreakdown> energy;
  /// Inside component count after every iteration.
  std::vector<int> inside_count_log;
};

inline std::vector<double> parse_numbers(const std::string& s, char sep = ',') {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("not a number: '" + item + "'");
    }
    if (used != item.size()) throw std::invalid_argument("not a number: '" + item + "'");
    out.push_back(v);
  }
  return out;
}

/// "circle:cx,cy,r", "rect:x0,y0,x1,y1", "circles:cx,cy,r;cx,cy,r;..." or "thresh:t".
inline InitSpec parse_init(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("init needs kind:params, got '" + text + "'");
  const std::string kind = text.substr(0, colon);
  const std::string rest = text.substr(colon + 1);
  if (kind == "circle") {
    const auto v = parse_numbers(rest);
    if (v.size() != 3) throw std::invalid_argument("circle:cx,cy,r");
    return InitSpec::circle(v[0], v[1], v[2]);
  }
  if (kind == "rect") {
    const auto v = parse_numbers(rest);
    if (v.size() != 4) throw std::invalid_argument("rect:x0,y0,x1,y1");
    return InitSpec::rectangle({v[0], v[1], v[2], v[3]});
  }
  if (kind == "circles") {
    std::vector<Circle> cs;
    std::stringstream ss(rest);
    std::string one;
    while (std::getline(ss, one, ';')) {
      const auto v = parse_numbers(one);
      if (v.size() != 3) throw std::invalid_argument("circles:cx,cy,r;cx,cy,r;...");
      cs.push_back({v[0], v[1], v[2]});
    }
    return InitSpec::union_of(std::move(cs));
  }
  if (kind == "thresh") {
    const auto v = parse_numbers(rest);
    if (v.size() != 1) throw std::invalid_argument("thresh:t");
    return InitSpec::thresholded(v[0]);
  }
  throw std::invalid_argument("unknown init kind '" + kind + "'");
}

inline std::string format_init(const InitSpec& s) {
  std::ostringstream o;
  o << std::setprecision(17);
  switch (s.kind) {
    case InitKind::circle:
      o << "circle:" << s.circles[0].cx << ',' << s.circles[0].cy << ',' << s.circles[0].r;
      break;
    case InitKind::rectangle:
      o << "rect:" << s.rect.x0 << ',' << s.rect.y0 << ',' << s.rect.x1 << ',' << s.rect.y1;
      break;
    case InitKind::union_of_circles:
      o << "circles:";
      for (std::size_t k = 0; k < s.circles.size(); ++k) {
        if (k > 0) o << ';';
        o << s.circles[k].cx << ',' << s.circles[k].cy << ',' << s.circles[k].r;
      }
      break;
    case InitKind::threshold:
      o << "thresh:" << s.threshold;
      break;
  }
  return o.str();
}

/// JSON keys mirror the command-line flags. Missing keys keep their defaults.
inline void apply_json(const nlohmann::json& j, ExperimentConfig& c) {
  auto num = [&](const char* key, double& dst) {
    if (j.contains(key)) dst = j.at(key).get<double>();
  };
  auto integer = [&](const char* key, int& dst) {
    if (j.contains(key)) dst = j.at(key).get<int>();
  };
  if (j.contains("input")) c.input = j.at("input").get<std::string>();
  if (j.contains("out")) c.out_dir = j.at("out").get<std::string>();
  if (j.contains("init")) c.init = parse_init(j.at("init").get<std::string>());
  if (j.contains("solver")) {
    const auto s = j.at("solver").get<std::string>();
    if (s == "sb" || s == "splitbregman") {
      c.solver = SolverKind::splitbregman;
    } else if (s == "aos") {
      c.solver = SolverKind::aos;
    } else {
      throw std::invalid_argument("solver must be sb or aos");
    }
  }
  if (j.contains("w_mode")) {
    const auto s = j.at("w_mode").get<std::string>();
    if (s == "thresh") {
      c.sb.w_mode = WMode::threshold;
    } else if (s == "fp") {
      c.sb.w_mode = WMode::fixed_point;
    } else {
      throw std::invalid_argument("w_mode must be thresh or fp");
    }
  }
  EnergyWeights w = c.sb.weights;
  num("alpha", w.alpha);
  num("gamma", w.gamma);
  num("beta", w.beta);
  num("mu", w.mu);
  RegularizerParams r = c.sb.regs;
  num("eps", r.epsilon);
  num("l", r.band_offset);
  RepulsionParams rep = c.sb.rep;
  num("d", rep.scale);
  if (j.contains("window")) {
    const int win = j.at("window").get<int>();
    if (win < 3 || win % 2 == 0) throw std::invalid_argument("window must be odd and >= 3");
    rep.window_half = win / 2;
  }
  double tau = c.sb.tau;
  num("tau", tau);
  double tol = c.sb.tol_outer;
  num("tol", tol);
  int outer = c.sb.outer_iters;
  integer("outer_K", outer);
  integer("inner_S", c.sb.inner_iters);
  integer("w_iters", c.sb.w_iters);
  num("constraint_band", c.sb.constraint_band);
  if (j.contains("bregman_on_shrunk")) c.sb.bregman_on_shrunk = j.at("bregman_on_shrunk").get<bool>();
  integer("reinit_every", c.aos.reinit_every);
  integer("reinit_iters", c.aos.reinit_iters);
  num("reinit_dt", c.aos.reinit_dt);
  num("edge_rho", c.edge.rho);
  num("edge_sigma", c.edge.sigma);
  integer("edge_power", c.edge.power);
  integer("progress", c.progress_every);

  c.sb.weights = w;
  c.sb.regs = r;
  c.sb.rep = rep;
  c.sb.tau = tau;
  c.sb.tol_outer = tol;
  c.sb.tol_inner = tol;
  c.sb.outer_iters = outer;
  c.aos.weights = w;
  c.aos.regs = r;
  c.aos.rep = rep;
  c.aos.tau = tau;
  c.aos.tol = tol;
  c.aos.outer_iters = outer;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  ExperimentConfig c;
  apply_json(nlohmann::json::parse(in), c);
  return c;
}

inline std::string fmt_double(double v) {
  if (std::isnan(v)) return "nan";
  std::ostringstream o;
  o << std::setprecision(12) << v;
  return o.str();
}

/// Header `iter,E_g,E_a,E_r,E_penalty,E_total,rel_phi_change`; row 0 is the
/// initial state, whose change is nan.
inline void write_energy_csv(const std::string& path, const std::vector<EnergyBreakdown>& energy,
                             const std::vector<double>& change) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "iter,E_g,E_a,E_r,E_penalty,E_total,rel_phi_change\n";
  for (std::size_t k = 0; k < energy.size(); ++k) {
    const auto& e = energy[k];
    const double c = k == 0 || k - 1 >= change.size() ? std::numeric_limits<double>::quiet_NaN() : change[k - 1];
    out << k << ',' << fmt_double(e.e_g) << ',' << fmt_double(e.e_a) << ',' << fmt_double(e.e_r) << ','
        << fmt_double(e.e_penalty) << ',' << fmt_double(e.total) << ',' << fmt_double(c) << '\n';
  }
}

/// One row per vertex: `polyline,closed,x,y`.
inline void write_polylines_csv(const std::string& path, const std::vector<Polyline>& lines) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "polyline,closed,x,y\n";
  for (std::size_t p = 0; p < lines.size(); ++p) {
    for (const auto& pt : lines[p].points) {
      out << p << ',' << (lines[p].closed ? 1 : 0) << ',' << fmt_double(pt.x) << ',' << fmt_double(pt.y) << '\n';
    }
  }
}

namespace detail {

template <class Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string(name) + ": " + e.what());
  }
}

}  // namespace detail

/// Runs the configured solver on an already loaded image. Writes nothing.
inline SegmentationReport segment(const ScalarField& image, const ExperimentConfig& cfg) {
  SegmentationReport rep;
  const ScalarField g = detail::stage("edge map", [&] {
    cfg.edge.validate();
    return edge_detector(image, cfg.edge);
  });
  const ScalarField phi0 = detail::stage("initialization", [&] { return init_level_set(cfg.init, image.dims(), &image); });
  auto progress = [&](int k, double change) {
    if (cfg.progress_every > 0 && k % cfg.progress_every == 0) {
      std::fprintf(stderr, "iter %d  rel_change %.3e\n", k, change);
    }
  };
  const auto t0 = std::chrono::steady_clock::now();
  if (cfg.solver == SolverKind::splitbregman) {
    SolverState st = detail::stage("split bregman", [&] {
      SplitBregmanSolver solver(g, cfg.sb);
      return solver.run(phi0, [&](const SolverState& s, const IterationInfo& info) {
        rep.inside_count_log.push_back(count_regions(inside_mask(s.phi)));
        progress(s.k, info.phi_change);
      });
    });
    rep.phi = std::move(st.phi);
    rep.iterations = st.k;
    rep.converged = st.converged;
    rep.phi_change = std::move(st.phi_change_log);
    rep.energy = std::move(st.energy_log);
  } else {
    AosState st = detail::stage("aos", [&] {
      AosSolver solver(g, cfg.aos);
      return solver.run(phi0, [&](const AosState& s) {
        rep.inside_count_log.push_back(count_regions(inside_mask(s.phi)));
        progress(s.k, s.phi_change_log.back());
      });
    });
    rep.phi = std::move(st.phi);
    rep.iterations = st.k;
    rep.converged = st.converged;
    rep.phi_change = std::move(st.phi_change_log);
    rep.energy = std::move(st.energy_log);
  }
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  rep.mask = inside_mask(rep.phi);
  rep.region_count_inside = count_regions(rep.mask);
  rep.region_count_background = count_regions(complement(rep.mask));
  rep.polylines = extract_zero_level(rep.phi);
  return rep;
}

/// Loads the input, segments it and writes overlay.png, mask.png,
/// contours.csv, energy.csv and summary.txt into cfg.out_dir.
inline SegmentationReport run_experiment(const ExperimentConfig& cfg) {
  const ScalarField image = detail::stage("load input", [&] { return load_image(cfg.input); });
  SegmentationReport rep = segment(image, cfg);
  detail::stage("write outputs", [&] {
    namespace fs = std::filesystem;
    const fs::path dir(cfg.out_dir);
    fs::create_directories(dir);
    save_overlay_png((dir / "overlay.png").string(), image, rep.phi);
    save_mask_png((dir / "mask.png").string(), rep.mask);
    write_polylines_csv((dir / "contours.csv").string(), rep.polylines);
    rep.energy_csv = (dir / "energy.csv").string();
    write_energy_csv(rep.energy_csv, rep.energy, rep.phi_change);
    std::ofstream s(dir / "summary.txt");
    if (!s) throw std::runtime_error("cannot write summary");
    s << "solver " << (cfg.solver == SolverKind::splitbregman ? "sb" : "aos") << '\n'
      << "init " << format_init(cfg.init) << '\n'
      << "iterations " << rep.iterations << '\n'
      << "converged " << (rep.converged ? 1 : 0) << '\n'
      << "region_count_inside " << rep.region_count_inside << '\n'
      << "region_count_background " << rep.region_count_background << '\n'
      << "final_rel_phi_change " << fmt_double(rep.phi_change.empty() ? 0.0 : rep.phi_change.back()) << '\n'
      << "wall_seconds " << fmt_double(rep.wall_seconds) << '\n';
    return 0;
  });
  return rep;
}

}  // namespace toposnake
