#include "stwave/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "stwave/assembly.hpp"
#include "stwave/solver.hpp"

namespace stwave {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  size_t b = s.find_last_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  return s.substr(a, b - a + 1);
}

std::vector<double> parse_numbers(const std::string& s, char sep) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

std::string format_sig(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.11e", v);
  return buf;
}

}  // namespace

std::string RunConfig::omega_eff() const {
  if (!omega.empty()) return omega;
  return dimension == 1 ? "0,0.25;0.75,1" : "frame";
}

std::string RunConfig::region_eff() const {
  if (!region.empty()) return region;
  return dimension == 1 ? "0.25,0.75" : "full";
}

void RunConfig::validate() const {
  if (dimension != 1 && dimension != 2) throw std::invalid_argument("dimension must be 1 or 2");
  if (solution != "single" && solution != "threelayer" && solution != "zero" &&
      solution != "ramp") {
    throw std::invalid_argument("unknown solution '" + solution + "'");
  }
  if (!(final_time > 0.0)) throw std::invalid_argument("final_time must be positive");
  if (level < (dimension == 2 ? 1 : 0)) throw std::invalid_argument("level too small");
  if (k < 1 || q_eff() < 1) throw std::invalid_argument("k and q must be >= 1");
  if (kstar_eff() < 1 || qstar_eff() < 0) throw std::invalid_argument("invalid dual degrees");
  if (!(c1 > 0.0) || !(c2 > 0.0)) throw std::invalid_argument("speeds must be positive");
  if (n_slabs == 0 && !(dt_scale > 0.0)) throw std::invalid_argument("dt_scale must be positive");
  if (boundary_data != "exact" && boundary_data != "zero") {
    throw std::invalid_argument("boundary_data must be 'exact' or 'zero'");
  }
  if (solution == "threelayer" && dimension == 2) {
    throw std::invalid_argument("the three-layer solution is 1D only");
  }
}

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config: expected key=value, got '" + line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key == "dimension") cfg.dimension = std::stoi(val);
    else if (key == "solution") cfg.solution = val;
    else if (key == "c1") cfg.c1 = std::stod(val);
    else if (key == "c2") cfg.c2 = std::stod(val);
    else if (key == "p1") cfg.p1 = std::stod(val);
    else if (key == "njump") cfg.njump = std::stoi(val);
    else if (key == "final_time") cfg.final_time = std::stod(val);
    else if (key == "level") cfg.level = std::stoi(val);
    else if (key == "k") cfg.k = std::stoi(val);
    else if (key == "q") cfg.q = std::stoi(val);
    else if (key == "kstar") cfg.kstar = std::stoi(val);
    else if (key == "qstar") cfg.qstar = std::stoi(val);
    else if (key == "dt_scale") cfg.dt_scale = std::stod(val);
    else if (key == "n_slabs") cfg.n_slabs = std::stoi(val);
    else if (key == "omega") cfg.omega = val;
    else if (key == "region") cfg.region = val;
    else if (key == "boundary_data") cfg.boundary_data = val;
    else if (key == "probe_time") cfg.probe_time = std::stod(val);
    else if (key == "w_cip") cfg.w_cip = std::stod(val);
    else if (key == "w_gls") cfg.w_gls = std::stod(val);
    else if (key == "w_compat") cfg.w_compat = std::stod(val);
    else if (key == "w_bdry") cfg.w_bdry = std::stod(val);
    else if (key == "w_jump") cfg.w_jump = std::stod(val);
    else if (key == "w_dual") cfg.w_dual = std::stod(val);
    else if (key == "strong_norm") cfg.strong_norm = (val == "1" || val == "true");
    else if (key == "dump_matrix") cfg.dump_matrix = val;
    else if (key == "output") cfg.output = val;
    else throw std::invalid_argument("config: unknown key '" + key + "'");
  }
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string format_config(const RunConfig& cfg) {
  std::ostringstream out;
  out << "dimension = " << cfg.dimension << "\n";
  out << "solution = " << cfg.solution << "\n";
  out << "c1 = " << cfg.c1 << "\n";
  out << "c2 = " << cfg.c2 << "\n";
  if (cfg.solution == "threelayer") {
    out << "p1 = " << cfg.p1 << "\n";
    out << "njump = " << cfg.njump << "\n";
  }
  out << "final_time = " << cfg.final_time << "\n";
  out << "level = " << cfg.level << "\n";
  out << "k = " << cfg.k << "\n";
  out << "q = " << cfg.q_eff() << "\n";
  out << "kstar = " << cfg.kstar_eff() << "\n";
  out << "qstar = " << cfg.qstar_eff() << "\n";
  if (cfg.n_slabs > 0) {
    out << "n_slabs = " << cfg.n_slabs << "\n";
  } else {
    out << "dt_scale = " << cfg.dt_scale << "\n";
  }
  out << "omega = " << cfg.omega_eff() << "\n";
  out << "region = " << cfg.region_eff() << "\n";
  out << "boundary_data = " << cfg.boundary_data << "\n";
  out << "w_cip = " << cfg.w_cip << "\n";
  out << "w_gls = " << cfg.w_gls << "\n";
  out << "w_compat = " << cfg.w_compat << "\n";
  out << "w_bdry = " << cfg.w_bdry << "\n";
  out << "w_jump = " << cfg.w_jump << "\n";
  out << "w_dual = " << cfg.w_dual << "\n";
  if (cfg.probe_time >= 0.0) out << "probe_time = " << cfg.probe_time << "\n";
  if (cfg.strong_norm) out << "strong_norm = 1\n";
  if (!cfg.dump_matrix.empty()) out << "dump_matrix = " << cfg.dump_matrix << "\n";
  if (!cfg.output.empty()) out << "output = " << cfg.output << "\n";
  return out.str();
}

void write_config_file(const std::string& path, const RunConfig& cfg) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << format_config(cfg);
}

DataDomain parse_domain(const std::string& text, int dimension) {
  if (text == "full") {
    DataDomain d;
    d.boxes.push_back({0.0, 1.0, 0.0, 1.0});
    return d;
  }
  if (text == "frame") {
    if (dimension != 2) throw std::invalid_argument("'frame' is a 2D domain");
    return DataDomain::frame_2d();
  }
  DataDomain d;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ';')) {
    part = trim(part);
    if (part.empty()) continue;
    const std::vector<double> v = parse_numbers(part, ',');
    if (dimension == 1) {
      if (v.size() != 2) throw std::invalid_argument("1D domain boxes need 2 numbers: " + part);
      d.boxes.push_back({v[0], v[1], 0.0, 1.0});
    } else {
      if (v.size() != 4) throw std::invalid_argument("2D domain boxes need 4 numbers (x0,x1,y0,y1): " + part);
      d.boxes.push_back({v[0], v[1], v[2], v[3]});
    }
  }
  if (d.boxes.empty()) throw std::invalid_argument("empty domain string '" + text + "'");
  return d;
}

WaveSpeedModel make_speed_model(const RunConfig& cfg) {
  if (cfg.solution == "threelayer") {
    ThreeLayerSolution sol(cfg.p1, cfg.njump, cfg.c1, cfg.c2);
    return WaveSpeedModel::three_layer(cfg.p1, sol.p2(), cfg.c1, cfg.c2);
  }
  return WaveSpeedModel::single_interface(cfg.c1, cfg.c2);
}

std::unique_ptr<ExactSolution> make_solution(const RunConfig& cfg) {
  if (cfg.solution == "single") {
    return std::make_unique<SingleInterfaceSolution>(cfg.c1, cfg.c2);
  }
  if (cfg.solution == "threelayer") {
    return std::make_unique<ThreeLayerSolution>(cfg.p1, cfg.njump, cfg.c1, cfg.c2);
  }
  if (cfg.solution == "zero") return std::make_unique<ZeroSolution>();
  if (cfg.solution == "ramp") {
    return std::make_unique<RampSolution>(make_speed_model(cfg), 0.25, 0.5, 0.3, 1.0);
  }
  throw std::invalid_argument("unknown solution '" + cfg.solution + "'");
}

namespace {

TimePartition time_partition_for(const RunConfig& cfg, double h) {
  int n = cfg.n_slabs;
  if (n <= 0) {
    n = std::max<long>(1, std::llround(cfg.final_time / (cfg.dt_scale * h)));
  }
  return build_time_partition(cfg.final_time, n);
}

std::optional<DataDomain> region_for(const RunConfig& cfg) {
  const std::string r = cfg.region_eff();
  if (r == "full") return std::nullopt;
  return parse_domain(r, cfg.dimension);
}

template <class Space, class MeshT>
ErrorReport run_on_mesh(const RunConfig& cfg, const MeshT& mesh) {
  const WaveSpeedModel speed = make_speed_model(cfg);
  const std::unique_ptr<ExactSolution> sol = make_solution(cfg);
  const DataDomain omega = parse_domain(cfg.omega_eff(), cfg.dimension);
  const std::vector<double> csq = cell_coefficients(mesh, speed);

  const Space primal(mesh, cfg.k);
  const Space dual(mesh, cfg.kstar_eff());
  const TimePartition tp = time_partition_for(cfg, mesh.h_max);

  AssemblyOptions opts;
  opts.q = cfg.q_eff();
  opts.qstar = cfg.qstar_eff();
  opts.boundary_data = cfg.boundary_data == "exact";
  opts.weights = StabilizerWeights{cfg.w_cip, cfg.w_gls, cfg.w_compat,
                                   cfg.w_bdry, cfg.w_jump, cfg.w_dual};
  SaddleSystem sys = assemble_system(primal, dual, csq, tp, omega, *sol, opts);
  if (!cfg.dump_matrix.empty()) write_coo(sys.matrix, cfg.dump_matrix);

  SparseFactorization fact(sys.matrix);
  const SparseFactorization::Result res = fact.solve_refined(sys.matrix, sys.rhs);

  ErrorReport rep;
  rep.solver_residual = res.rel_residual;
  rep.refinement_steps = res.refinement_steps;
  rep.n_dofs = sys.layout.n_total();
  rep.n_slabs = tp.n_slabs;
  rep.h = mesh.h_max;
  rep.dt = tp.dt;

  const DiscreteField u1 = extract_field(res.x, sys.layout, 0);
  const DiscreteField u2 = extract_field(res.x, sys.layout, 1);
  const std::vector<int> cells = region_cells(primal, region_for(cfg));
  std::vector<int> all_cells(primal.n_cells());
  for (int c = 0; c < primal.n_cells(); ++c) all_cells[c] = c;

  rep.err_linf_l2_u = error_linf_l2(u1, primal, tp, *sol, cells);
  rep.err_l2_l2_ut = error_l2_l2_dt(u1, primal, tp, *sol, cells);
  rep.err_t0_l2 = error_l2_at_time(u1, primal, tp, *sol, 0.0, TraceSide::right,
                                   all_cells, false);

  const DiscreteField ba = best_approximation(*sol, primal, tp, cfg.q_eff());
  rep.ba_linf_l2_u = error_linf_l2(ba, primal, tp, *sol, cells);
  rep.ba_l2_l2_ut = error_l2_l2_dt(ba, primal, tp, *sol, cells);

  const StabilityNorms norms = stability_norms(sys, res.x);
  rep.norm_stab_primal = std::sqrt(std::max(0.0, norms.stab_primal_sq));
  rep.norm_time_jump = std::sqrt(std::max(0.0, norms.time_jump_sq));
  rep.norm_data = std::sqrt(std::max(0.0, norms.data_sq));
  rep.norm_dual = std::sqrt(std::max(0.0, norms.dual_sq));

  if (cfg.probe_time >= 0.0) {
    rep.probe_time = cfg.probe_time;
    rep.probe_l2_rel = error_l2_at_time(u1, primal, tp, *sol, cfg.probe_time,
                                        TraceSide::left, all_cells, true);
  }
  if (cfg.strong_norm) {
    rep.strong_norm_extra =
        std::sqrt(std::max(0.0, strong_norm_extra(u1, u2, primal, csq, tp)));
  }
  return rep;
}

std::vector<double> fit_points_1d(const RunConfig& cfg) {
  std::vector<double> pts;
  const WaveSpeedModel speed = make_speed_model(cfg);
  for (double p : speed.interfaces) pts.push_back(p);
  for (const std::string& domain_text : {cfg.omega_eff(), cfg.region_eff()}) {
    if (domain_text == "full") continue;
    const DataDomain dom = parse_domain(domain_text, 1);
    for (const auto& b : dom.boxes) {
      pts.push_back(b.x0);
      pts.push_back(b.x1);
    }
  }
  std::vector<double> inner;
  for (double p : pts) {
    if (p > 1e-12 && p < 1.0 - 1e-12) inner.push_back(p);
  }
  std::sort(inner.begin(), inner.end());
  inner.erase(std::unique(inner.begin(), inner.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-12; }),
              inner.end());
  return inner;
}

}  // namespace

ErrorReport run_single(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.dimension == 1) {
    const Mesh1D mesh = build_mesh_1d(cfg.level, fit_points_1d(cfg));
    return run_on_mesh<Space1D>(cfg, mesh);
  }
  const Mesh2D mesh = build_mesh_2d(cfg.level);
  return run_on_mesh<Space2D>(cfg, mesh);
}

SweepResult run_refinement_sweep(const RunConfig& base,
                                 std::span<const int> levels,
                                 std::span<const int> orders) {
  SweepResult result;
  for (int k : orders) {
    for (int level : levels) {
      RunConfig cfg = base;
      cfg.k = k;
      if (base.q < 0) cfg.q = -1;  // keep q tied to k
      cfg.level = level;
      const ErrorReport rep = run_single(cfg);
      result.rows.push_back({level, k, cfg.c1, rep.err_linf_l2_u, rep.err_l2_l2_ut,
                             rep.ba_linf_l2_u, rep.ba_l2_l2_ut});
    }
  }
  std::sort(result.rows.begin(), result.rows.end(), [](const SweepRow& a, const SweepRow& b) {
    return std::tie(a.order, a.contrast, a.level) < std::tie(b.order, b.contrast, b.level);
  });
  return result;
}

SweepResult run_contrast_sweep(const RunConfig& base,
                               std::span<const double> contrasts,
                               bool adapt_final_time) {
  SweepResult result;
  for (double c1 : contrasts) {
    RunConfig cfg = base;
    cfg.c1 = c1;
    if (adapt_final_time) {
      // smallest slab multiple strictly above the travel-time threshold
      const double t_min = gcc_threshold_for(cfg);
      const double h = std::pow(0.5, cfg.level + 1);
      const double dt = cfg.dt_scale * h;
      const int n = static_cast<int>(std::floor(t_min / dt)) + 1;
      cfg.n_slabs = n;
      cfg.final_time = n * dt;
    }
    const ErrorReport rep = run_single(cfg);
    result.rows.push_back({cfg.level, cfg.k, c1, rep.err_linf_l2_u, rep.err_l2_l2_ut,
                           rep.ba_linf_l2_u, rep.ba_l2_l2_ut});
  }
  std::sort(result.rows.begin(), result.rows.end(), [](const SweepRow& a, const SweepRow& b) {
    return std::tie(a.order, a.contrast, a.level) < std::tie(b.order, b.contrast, b.level);
  });
  return result;
}

std::string format_csv(const SweepResult& result) {
  std::ostringstream out;
  out << "L,order,contrast,L-infty-L2-error-u,L2-L2-error-u_t,"
         "bestapprox-L-infty-L2-error-u,bestapprox-L2-L2-error-u_t\n";
  for (const SweepRow& r : result.rows) {
    char contrast[32];
    std::snprintf(contrast, sizeof(contrast), "%.10g", r.contrast);
    out << r.level << ',' << r.order << ',' << contrast << ','
        << format_sig(r.err_linf_u) << ',' << format_sig(r.err_l2_ut) << ','
        << format_sig(r.ba_linf_u) << ',' << format_sig(r.ba_l2_ut) << '\n';
  }
  return out.str();
}

void write_csv(const std::string& path, const SweepResult& result) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << format_csv(result);
}

SweepResult parse_csv_text(const std::string& text) {
  SweepResult result;
  std::stringstream ss(text);
  std::string line;
  bool header = true;
  while (std::getline(ss, line)) {
    line = trim(line);
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    const std::vector<double> v = parse_numbers(line, ',');
    if (v.size() != 7) throw std::runtime_error("csv row needs 7 columns: " + line);
    result.rows.push_back({static_cast<int>(v[0]), static_cast<int>(v[1]), v[2],
                           v[3], v[4], v[5], v[6]});
  }
  return result;
}

SweepResult read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_csv_text(ss.str());
}

double observed_order(double err_coarse, double err_fine) {
  if (!(err_coarse > 0.0) || !(err_fine > 0.0)) return 0.0;
  return std::log2(err_coarse / err_fine);
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("loglog_slope: need two sequences of equal length >= 2");
  }
  const int n = static_cast<int>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double gcc_threshold_for(const RunConfig& cfg) {
  if (cfg.dimension != 1) {
    throw std::invalid_argument("travel-time threshold queries are 1D only");
  }
  const WaveSpeedModel speed = make_speed_model(cfg);
  const DataDomain omega = parse_domain(cfg.omega_eff(), 1);
  return gcc_threshold(speed, omega);
}

std::string format_report(const ErrorReport& r) {
  std::ostringstream out;
  auto line = [&out](const char* key, double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    out << key << " = " << buf << "\n";
  };
  line("L-infty-L2-error-u", r.err_linf_l2_u);
  line("L2-L2-error-u_t", r.err_l2_l2_ut);
  line("bestapprox-L-infty-L2-error-u", r.ba_linf_l2_u);
  line("bestapprox-L2-L2-error-u_t", r.ba_l2_l2_ut);
  line("t0-L2-error-u", r.err_t0_l2);
  line("norm-stab-primal", r.norm_stab_primal);
  line("norm-time-jump", r.norm_time_jump);
  line("norm-data-window", r.norm_data);
  line("norm-dual", r.norm_dual);
  if (r.strong_norm_extra >= 0.0) line("strong-norm-extra", r.strong_norm_extra);
  if (r.probe_time >= 0.0) {
    line("probe-time", r.probe_time);
    line("probe-L2-rel-error-u", r.probe_l2_rel);
  }
  line("solver-residual", r.solver_residual);
  out << "refinement-steps = " << r.refinement_steps << "\n";
  out << "n-dofs = " << r.n_dofs << "\n";
  out << "n-slabs = " << r.n_slabs << "\n";
  line("h", r.h);
  line("dt", r.dt);
  return out.str();
}

}  // namespace stwave
