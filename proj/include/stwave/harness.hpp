#pragma once

#include <span>
#include <string>
#include <vector>

#include "stwave/postproc.hpp"
#include "stwave/problem.hpp"

namespace stwave {

/// One experiment description. String-valued members use the flat key=value
/// config syntax; see parse_config_text for the keys.
struct RunConfig {
  int dimension = 1;
  std::string solution = "single";  // single | threelayer | zero | ramp
  double c1 = 2.5;
  double c2 = 1.0;
  double p1 = 0.4;   // three-layer only
  int njump = 3;     // three-layer winding number
  double final_time = 0.5;
  int level = 2;
  int k = 3;
  int q = -1;        // -1: defaults to k
  int kstar = -1;    // -1: defaults to k
  int qstar = -1;    // -1: defaults to q
  double dt_scale = 1.0;  // dt = dt_scale * h, slab count rounded
  int n_slabs = 0;        // > 0: explicit slab count overriding dt_scale
  std::string omega;      // "" -> per-dimension default
  std::string region;     // "" -> per-dimension default; "full" -> whole domain
  std::string boundary_data = "exact";  // exact | zero
  double probe_time = -1.0;   // >= 0: report relative L2(Omega) error there
  bool strong_norm = false;   // compute the strengthened-norm diagnostic
  std::string dump_matrix;    // when set, write the system matrix in "row col value" lines
  std::string output;
  // stabilizer scaling constants; defaults calibrated on the convergence
  // studies (see README)
  double w_cip = 1e-2;
  double w_gls = 1e-4;
  double w_compat = 1e-3;
  double w_bdry = 1.0;
  double w_jump = 1.0;
  double w_dual = 100.0;

  int q_eff() const { return q >= 0 ? q : k; }
  int kstar_eff() const { return kstar >= 0 ? kstar : k; }
  int qstar_eff() const { return qstar >= 0 ? qstar : q_eff(); }
  std::string omega_eff() const;
  std::string region_eff() const;
  void validate() const;
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);
std::string format_config(const RunConfig& cfg);
void write_config_file(const std::string& path, const RunConfig& cfg);

DataDomain parse_domain(const std::string& text, int dimension);
std::unique_ptr<ExactSolution> make_solution(const RunConfig& cfg);
WaveSpeedModel make_speed_model(const RunConfig& cfg);

/// Mesh -> spaces -> system -> solve -> errors. Deterministic.
ErrorReport run_single(const RunConfig& cfg);

struct SweepRow {
  int level = 0;
  int order = 0;       // spatial degree k
  double contrast = 0.0;
  double err_linf_u = 0.0;
  double err_l2_ut = 0.0;
  double ba_linf_u = 0.0;
  double ba_l2_ut = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // sorted by (order, contrast, level)
};

SweepResult run_refinement_sweep(const RunConfig& base,
                                 std::span<const int> levels,
                                 std::span<const int> orders);
/// One row per contrast at fixed level/order. With adapt_final_time the final
/// time is the smallest slab multiple strictly above the travel-time
/// threshold of the configured data domain.
SweepResult run_contrast_sweep(const RunConfig& base,
                               std::span<const double> contrasts,
                               bool adapt_final_time);

/// CSV columns: L,order,contrast,L-infty-L2-error-u,L2-L2-error-u_t,
/// bestapprox-L-infty-L2-error-u,bestapprox-L2-L2-error-u_t
std::string format_csv(const SweepResult& result);
void write_csv(const std::string& path, const SweepResult& result);
SweepResult parse_csv_text(const std::string& text);
SweepResult read_csv(const std::string& path);

/// log2(coarse/fine): observed convergence order between consecutive levels.
double observed_order(double err_coarse, double err_fine);
/// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

double gcc_threshold_for(const RunConfig& cfg);

std::string format_report(const ErrorReport& r);

}  // namespace stwave
