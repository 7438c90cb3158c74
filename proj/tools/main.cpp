#include <CLI11.hpp>
#include <fstream>
#include <cstdio>
#include <iostream>
#include <map>

#include "stwave/harness.hpp"

namespace {

using stwave::RunConfig;
using stwave::SweepResult;

void add_config_flags(CLI::App* app, RunConfig& cfg, std::string& config_path) {
  app->add_option("--config", config_path, "Config file (key = value lines); flags override");
  app->add_option("--dim", cfg.dimension, "Space dimension (1 or 2)");
  app->add_option("--solution", cfg.solution, "single | threelayer | zero | ramp");
  app->add_option("--c1", cfg.c1, "Wave speed left of the (first) interface");
  app->add_option("--c2", cfg.c2, "Wave speed of the middle/right layer (default 1)");
  app->add_option("--p1", cfg.p1, "First interface of the three-layer solution");
  app->add_option("--njump", cfg.njump, "Winding number fixing the second interface");
  app->add_option("--T", cfg.final_time, "Final time");
  app->add_option("--L", cfg.level, "Refinement level, 2^(L+1) cells per direction");
  app->add_option("--k", cfg.k, "Spatial polynomial degree");
  app->add_option("--q", cfg.q, "Temporal polynomial degree (default k)");
  app->add_option("--kstar", cfg.kstar, "Dual spatial degree (default k)");
  app->add_option("--qstar", cfg.qstar, "Dual temporal degree (default q)");
  app->add_option("--dt-scale", cfg.dt_scale, "dt = dt-scale * h (slab count rounded)");
  app->add_option("--nt", cfg.n_slabs, "Explicit slab count (overrides --dt-scale)");
  app->add_option("--omega", cfg.omega, "Data domain, e.g. '0,0.25;0.75,1' or 'frame'");
  app->add_option("--region", cfg.region, "Error region, e.g. '0.25,0.75' or 'full'");
  app->add_option("--boundary-data", cfg.boundary_data,
                  "Lateral boundary trace on the rhs: exact | zero");
  app->add_option("--probe-time", cfg.probe_time,
                  "Also report the relative L2 error of u1 at this time");
  app->add_option("--w-cip", cfg.w_cip, "Facet flux-jump penalty scale");
  app->add_option("--w-gls", cfg.w_gls, "Element least-squares scale");
  app->add_option("--w-compat", cfg.w_compat, "Velocity compatibility scale");
  app->add_option("--w-bdry", cfg.w_bdry, "Boundary penalty scale");
  app->add_option("--w-jump", cfg.w_jump, "Time-jump penalty scale");
  app->add_option("--w-dual", cfg.w_dual, "Dual damping scale");
  app->add_flag("--strong-norm", cfg.strong_norm,
                "Compute the strengthened-norm diagnostic");
  app->add_option("--dump-matrix", cfg.dump_matrix,
                  "Write the assembled matrix in coordinate text format");
  app->add_option("-o,--output", cfg.output, "Output stem (csv/report + resolved config)");
}

RunConfig resolve(const CLI::App& app, const RunConfig& flags, const std::string& config_path) {
  if (config_path.empty()) return flags;
  RunConfig cfg = stwave::parse_config_file(config_path);
  // command-line values win over file values
  RunConfig merged = cfg;
  const RunConfig defaults;
  auto pick = [&app](const char* name) { return app.count(name) > 0; };
  if (pick("--dim")) merged.dimension = flags.dimension;
  if (pick("--solution")) merged.solution = flags.solution;
  if (pick("--c1")) merged.c1 = flags.c1;
  if (pick("--c2")) merged.c2 = flags.c2;
  if (pick("--p1")) merged.p1 = flags.p1;
  if (pick("--njump")) merged.njump = flags.njump;
  if (pick("--T")) merged.final_time = flags.final_time;
  if (pick("--L")) merged.level = flags.level;
  if (pick("--k")) merged.k = flags.k;
  if (pick("--q")) merged.q = flags.q;
  if (pick("--kstar")) merged.kstar = flags.kstar;
  if (pick("--qstar")) merged.qstar = flags.qstar;
  if (pick("--dt-scale")) merged.dt_scale = flags.dt_scale;
  if (pick("--nt")) merged.n_slabs = flags.n_slabs;
  if (pick("--omega")) merged.omega = flags.omega;
  if (pick("--region")) merged.region = flags.region;
  if (pick("--boundary-data")) merged.boundary_data = flags.boundary_data;
  if (pick("--probe-time")) merged.probe_time = flags.probe_time;
  if (pick("--w-cip")) merged.w_cip = flags.w_cip;
  if (pick("--w-gls")) merged.w_gls = flags.w_gls;
  if (pick("--w-compat")) merged.w_compat = flags.w_compat;
  if (pick("--w-bdry")) merged.w_bdry = flags.w_bdry;
  if (pick("--w-jump")) merged.w_jump = flags.w_jump;
  if (pick("--w-dual")) merged.w_dual = flags.w_dual;
  if (pick("--strong-norm")) merged.strong_norm = flags.strong_norm;
  if (pick("--dump-matrix")) merged.dump_matrix = flags.dump_matrix;
  if (pick("--output") || pick("-o")) merged.output = flags.output;
  return merged;
}

void print_orders(const SweepResult& result) {
  // group rows by (order, contrast) and report eoc between consecutive levels
  std::map<std::pair<int, double>, std::vector<stwave::SweepRow>> groups;
  for (const auto& r : result.rows) groups[{r.order, r.contrast}].push_back(r);
  for (const auto& [key, rows] : groups) {
    if (rows.size() < 2) continue;
    std::printf("observed orders (k=%d, contrast=%g):\n", key.first, key.second);
    for (size_t i = 1; i < rows.size(); ++i) {
      std::printf("  L%d->L%d  u: %6.3f   u_t: %6.3f   ba-u: %6.3f   ba-u_t: %6.3f\n",
                  rows[i - 1].level, rows[i].level,
                  stwave::observed_order(rows[i - 1].err_linf_u, rows[i].err_linf_u),
                  stwave::observed_order(rows[i - 1].err_l2_ut, rows[i].err_l2_ut),
                  stwave::observed_order(rows[i - 1].ba_linf_u, rows[i].ba_linf_u),
                  stwave::observed_order(rows[i - 1].ba_l2_ut, rows[i].ba_l2_ut));
    }
  }
}

void emit_sweep(const SweepResult& result, const RunConfig& cfg) {
  std::cout << stwave::format_csv(result);
  if (!cfg.output.empty()) {
    const std::string csv = cfg.output + ".csv";
    stwave::write_csv(csv, result);
    stwave::write_config_file(cfg.output + ".config", cfg);
    std::printf("wrote %s\n", csv.c_str());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Space-time FEM solver for wave data assimilation with "
               "piecewise-constant wave speed"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string config_path;

  auto* run = app.add_subcommand("run", "Solve one configuration and print the error report");
  add_config_flags(run, cfg, config_path);

  auto* sweep_h = app.add_subcommand("sweep-h", "Refinement sweep over levels (and degrees)");
  add_config_flags(sweep_h, cfg, config_path);
  std::vector<int> levels{1, 2, 3, 4};
  std::vector<int> orders;
  sweep_h->add_option("--levels", levels, "Refinement levels")->delimiter(',');
  sweep_h->add_option("--orders", orders, "Spatial degrees (default: just k)")->delimiter(',');

  auto* sweep_c = app.add_subcommand("sweep-contrast", "Contrast sweep at fixed level/degree");
  add_config_flags(sweep_c, cfg, config_path);
  std::vector<double> contrasts{1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5};
  bool adapt_T = false;
  sweep_c->add_option("--contrasts", contrasts, "c1 values")->delimiter(',');
  sweep_c->add_flag("--adapt-T", adapt_T,
                    "Pick T per contrast just above the travel-time threshold");

  auto* gcc = app.add_subcommand("gcc", "Minimal observability time of the data domain");
  add_config_flags(gcc, cfg, config_path);
  std::vector<double> breaks, speeds;
  gcc->add_option("--breaks", breaks, "Explicit speed breakpoints")->delimiter(',');
  gcc->add_option("--speeds", speeds, "Explicit per-layer speeds")->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      const RunConfig rc = resolve(*run, cfg, config_path);
      const stwave::ErrorReport rep = stwave::run_single(rc);
      std::cout << stwave::format_report(rep);
      if (!rc.output.empty()) {
        std::ofstream out(rc.output + ".report");
        out << stwave::format_report(rep);
        stwave::write_config_file(rc.output + ".config", rc);
      }
    } else if (sweep_h->parsed()) {
      const RunConfig rc = resolve(*sweep_h, cfg, config_path);
      if (orders.empty()) orders = {rc.k};
      const SweepResult result = stwave::run_refinement_sweep(rc, levels, orders);
      emit_sweep(result, rc);
      print_orders(result);
    } else if (sweep_c->parsed()) {
      const RunConfig rc = resolve(*sweep_c, cfg, config_path);
      const SweepResult result = stwave::run_contrast_sweep(rc, contrasts, adapt_T);
      emit_sweep(result, rc);
      std::vector<double> xs, e_inf, ba_inf;
      for (const auto& r : result.rows) {
        xs.push_back(r.contrast);
        e_inf.push_back(r.err_linf_u);
        ba_inf.push_back(r.ba_linf_u);
      }
      if (xs.size() >= 2) {
        std::printf("log-log slope vs contrast: error %.3f, best-approx %.3f\n",
                    stwave::loglog_slope(xs, e_inf), stwave::loglog_slope(xs, ba_inf));
      }
    } else if (gcc->parsed()) {
      const RunConfig rc = resolve(*gcc, cfg, config_path);
      double t_min = 0.0;
      if (!breaks.empty() || !speeds.empty()) {
        stwave::WaveSpeedModel model;
        model.interfaces = breaks;
        model.speeds = speeds;
        t_min = stwave::gcc_threshold(model, stwave::parse_domain(rc.omega_eff(), 1));
      } else {
        t_min = stwave::gcc_threshold_for(rc);
      }
      std::printf("minimal time T_min = %.12g\n", t_min);
      std::printf("condition: T > %.12g\n", t_min);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
