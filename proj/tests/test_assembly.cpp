#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "stwave/assembly.hpp"
#include "stwave/harness.hpp"
#include "stwave/solver.hpp"
#include "support/form_oracle.hpp"

using namespace stwave;
using namespace stwave::testing;

namespace {

struct Setup1D {
  Mesh1D mesh;
  WaveSpeedModel speed;
  std::vector<double> csq;
  TimePartition tp;
  Space1D primal, dual;
  int q, qstar;

  Setup1D(int level, std::vector<double> required, int k, int kstar, int q_,
          int qstar_, int n_slabs, double final_time = 0.6)
      : mesh(build_mesh_1d(level, required)),
        speed(WaveSpeedModel::single_interface(2.5, 1.0)),
        csq(cell_coefficients(mesh, speed)),
        tp(build_time_partition(final_time, n_slabs)),
        primal(mesh, k),
        dual(mesh, kstar),
        q(q_),
        qstar(qstar_) {}
};

}  // namespace

TEST_SUITE_BEGIN("assembly");

TEST_CASE("forms match the brute-force quadrature oracle") {
  Setup1D s(0, {0.4}, 2, 1, 2, 1, 3);
  OracleCtx1D ctx{&s.primal, &s.dual, &s.speed, &s.tp};

  const SpMat a = assemble_wave_form(s.primal, s.dual, s.csq, s.tp, s.q, s.qstar);
  const SpMat sh = assemble_primal_stabilizer(s.primal, s.csq, s.tp, s.q);
  const SpMat sd = assemble_dual_stabilizer(s.dual, s.csq, s.tp, s.qstar);
  const SpMat sj = assemble_time_jump_stabilizer(s.primal, s.csq, s.tp, s.q);

  std::mt19937 rng(1234);
  for (int rep = 0; rep < 5; ++rep) {
    const FieldPair u = random_pair(s.q, s.primal.n_dofs(), s.tp.n_slabs, rng);
    const FieldPair w = random_pair(s.q, s.primal.n_dofs(), s.tp.n_slabs, rng);
    const FieldPair y = random_pair(s.qstar, s.dual.n_dofs(), s.tp.n_slabs, rng);
    const Eigen::VectorXd uv = stacked(u), wv = stacked(w), yv = stacked(y);

    CHECK(yv.dot(a * uv) == doctest::Approx(oracle_wave_form(ctx, u, y)).epsilon(1e-11));
    CHECK(wv.dot(sh * uv) ==
          doctest::Approx(oracle_primal_stabilizer(ctx, u, w)).epsilon(1e-11));
    CHECK(wv.dot(sj * uv) == doctest::Approx(oracle_time_jump(ctx, u, w)).epsilon(1e-11));

    const FieldPair z = random_pair(s.qstar, s.dual.n_dofs(), s.tp.n_slabs, rng);
    const Eigen::VectorXd zv = stacked(z);
    CHECK(yv.dot(sd * zv) ==
          doctest::Approx(oracle_dual_stabilizer(ctx, z, y)).epsilon(1e-11));
  }
}

TEST_CASE("data block matches oracle and rhs vanishes for zero data") {
  Setup1D s(1, {}, 2, 2, 1, 1, 2);
  OracleCtx1D ctx{&s.primal, &s.dual, &s.speed, &s.tp};
  DataDomain omega = parse_domain("0,0.25;0.75,1", 1);
  ZeroSolution zero;
  DataSampler sampler{&zero, &omega};
  auto [mw, rhs] = assemble_data_terms(s.primal, s.tp, s.q, omega, sampler);
  CHECK(rhs.norm() == 0.0);

  std::mt19937 rng(7);
  for (int rep = 0; rep < 3; ++rep) {
    const FieldPair u = random_pair(s.q, s.primal.n_dofs(), s.tp.n_slabs, rng);
    const FieldPair w = random_pair(s.q, s.primal.n_dofs(), s.tp.n_slabs, rng);
    CHECK(stacked(w).dot(mw * stacked(u)) ==
          doctest::Approx(oracle_data_mass(ctx, omega, u, w)).epsilon(1e-11));
  }
}

TEST_CASE("tiny system: entrywise dense oracle for the wave form") {
  Setup1D s(0, {}, 1, 1, 1, 1, 1, 0.5);
  OracleCtx1D ctx{&s.primal, &s.dual, &s.speed, &s.tp};
  const SpMat a = assemble_wave_form(s.primal, s.dual, s.csq, s.tp, 1, 1);
  const Eigen::MatrixXd ad = Eigen::MatrixXd(a);
  const int np = 2 * 2 * s.primal.n_dofs();
  const int nd = 2 * 2 * s.dual.n_dofs();
  REQUIRE(ad.rows() == nd);
  REQUIRE(ad.cols() == np);
  for (int col = 0; col < np; ++col) {
    FieldPair u{DiscreteField::zero(1, s.primal.n_dofs(), 1),
                DiscreteField::zero(1, s.primal.n_dofs(), 1)};
    Eigen::VectorXd uv = Eigen::VectorXd::Zero(np);
    uv[col] = 1.0;
    const int half = np / 2;
    u.f1.slabs[0] = uv.segment(0, half);
    u.f2.slabs[0] = uv.segment(half, half);
    for (int row = 0; row < nd; ++row) {
      FieldPair y{DiscreteField::zero(1, s.dual.n_dofs(), 1),
                  DiscreteField::zero(1, s.dual.n_dofs(), 1)};
      Eigen::VectorXd yv = Eigen::VectorXd::Zero(nd);
      yv[row] = 1.0;
      y.f1.slabs[0] = yv.segment(0, nd / 2);
      y.f2.slabs[0] = yv.segment(nd / 2, nd / 2);
      CHECK(ad(row, col) ==
            doctest::Approx(oracle_wave_form(ctx, u, y)).epsilon(1e-12).scale(1.0));
    }
  }
}

TEST_CASE("constant-field values of the stabilizers") {
  // u1 = 1, u2 = 0: every stabilizer part vanishes except the boundary
  // penalty, which integrates to 2 T / h on a uniform mesh
  const double T = 0.6;
  Setup1D s(1, {}, 2, 2, 2, 2, 4, T);
  const SpMat sh = assemble_primal_stabilizer(s.primal, s.csq, s.tp, s.q);
  DiscreteField one = DiscreteField::zero(s.q, s.primal.n_dofs(), s.tp.n_slabs);
  for (auto& slab : one.slabs) slab.setOnes();
  FieldPair u{one, DiscreteField::zero(s.q, s.primal.n_dofs(), s.tp.n_slabs)};
  const Eigen::VectorXd uv = stacked(u);
  const double h = s.mesh.h_max;
  CHECK(uv.dot(sh * uv) == doctest::Approx(2.0 * T / h).epsilon(1e-12));

  // z1 = 1, z2 = 0 with unit speed: T * |Omega| + 2 T / h
  WaveSpeedModel unit;
  unit.speeds = {1.0};
  const std::vector<double> csq1 = cell_coefficients(s.mesh, unit);
  const SpMat sd = assemble_dual_stabilizer(s.dual, csq1, s.tp, s.qstar);
  FieldPair z{one, DiscreteField::zero(s.qstar, s.dual.n_dofs(), s.tp.n_slabs)};
  const Eigen::VectorXd zv = stacked(z);
  CHECK(zv.dot(sd * zv) == doctest::Approx(T + 2.0 * T / h).epsilon(1e-12));
}

TEST_CASE("time-jump stabilizer on constructed jumps") {
  // field that equals the slab index: unit jump at the interior node
  const int n_slabs = 2;
  Setup1D s(1, {}, 1, 1, 1, 1, n_slabs, 0.5);
  const SpMat sj = assemble_time_jump_stabilizer(s.primal, s.csq, s.tp, s.q);
  DiscreteField stepped = DiscreteField::zero(s.q, s.primal.n_dofs(), n_slabs);
  for (int n = 0; n < n_slabs; ++n) stepped.slabs[n].setConstant(n);
  FieldPair u{stepped, DiscreteField::zero(s.q, s.primal.n_dofs(), n_slabs)};
  const Eigen::VectorXd uv = stacked(u);
  CHECK(uv.dot(sj * uv) == doctest::Approx(1.0 / s.tp.dt).epsilon(1e-12));

  // time-continuous interpolant has no jumps
  const auto fn = [](double x, double, double t) { return std::sin(x + t) * t; };
  DiscreteField cont = interpolate(fn, s.primal, s.tp, s.q);
  FieldPair uc{cont, cont};
  const Eigen::VectorXd ucv = stacked(uc);
  CHECK(std::abs(ucv.dot(sj * ucv)) < 1e-18);
}

TEST_CASE("time-jump coupling pattern stays on adjacent endpoint layers") {
  Setup1D s(1, {}, 1, 1, 2, 2, 3);
  const SpMat sj = assemble_time_jump_stabilizer(s.primal, s.csq, s.tp, s.q);
  DofLayout lay{s.primal.n_dofs(), 1, s.q, 0, s.tp.n_slabs};
  const int pps = lay.primal_per_slab();
  const int nsp = s.primal.n_dofs();
  for (int col = 0; col < sj.outerSize(); ++col) {
    for (SpMat::InnerIterator it(sj, col); it; ++it) {
      const int sr = static_cast<int>(it.row()) / pps;
      const int sc = static_cast<int>(it.col()) / pps;
      CHECK(std::abs(sr - sc) <= 1);
      if (sr != sc) {
        const int layer_r = (static_cast<int>(it.row()) % pps) % ((s.q + 1) * nsp) / nsp;
        const int layer_c = (static_cast<int>(it.col()) % pps) % ((s.q + 1) * nsp) / nsp;
        if (sr < sc) {
          CHECK(layer_r == s.q);
          CHECK(layer_c == 0);
        } else {
          CHECK(layer_r == 0);
          CHECK(layer_c == s.q);
        }
      }
    }
  }
}

TEST_CASE("assembled saddle system: symmetry, block identity, zero data") {
  const Mesh1D mesh = build_mesh_1d(2, std::vector<double>{0.25, 0.5, 0.75});
  const WaveSpeedModel speed = WaveSpeedModel::single_interface(2.5);
  const std::vector<double> csq = cell_coefficients(mesh, speed);
  const TimePartition tp = build_time_partition(0.5, 8);
  const Space1D primal(mesh, 2), dual(mesh, 2);
  const DataDomain omega = parse_domain("0,0.25;0.75,1", 1);
  SingleInterfaceSolution sol(2.5);
  AssemblyOptions opts{2, 2, true};
  const SaddleSystem sys = assemble_system(primal, dual, csq, tp, omega, sol, opts);

  SpMat diff = SpMat(sys.matrix.transpose()) - sys.matrix;
  double asym = 0.0, scale = 0.0;
  for (int c = 0; c < diff.outerSize(); ++c) {
    for (SpMat::InnerIterator it(diff, c); it; ++it) asym = std::max(asym, std::abs(it.value()));
  }
  for (int c = 0; c < sys.matrix.outerSize(); ++c) {
    for (SpMat::InnerIterator it(sys.matrix, c); it; ++it) scale = std::max(scale, std::abs(it.value()));
  }
  CHECK(asym < 1e-12 * scale);

  // quadratic-form identity on random vectors: the (U,-Z)-signed pairing of
  // the matrix reproduces the sum of the stability-norm blocks
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int rep = 0; rep < 20; ++rep) {
    Eigen::VectorXd x(sys.layout.n_total());
    for (int i = 0; i < x.size(); ++i) x[i] = dist(rng);
    Eigen::VectorXd x_flip = x;
    for (int d = 0; d < sys.layout.n_dual(); ++d) {
      const int g = sys.layout.global_of_dual(d);
      x_flip[g] = -x_flip[g];
    }
    const double via_matrix = x_flip.dot(sys.matrix * x);
    const StabilityNorms norms = stability_norms(sys, x);
    CHECK(via_matrix == doctest::Approx(norms.total_sq()).epsilon(1e-10));
  }

  // zero data produces the zero solution
  ZeroSolution zero;
  const SaddleSystem sys0 = assemble_system(primal, dual, csq, tp, omega, zero, opts);
  CHECK(sys0.rhs.norm() == 0.0);
  SparseFactorization fact0(sys0.matrix);
  const auto res0 = fact0.solve_refined(sys0.matrix, sys0.rhs);
  CHECK(res0.x.lpNorm<Eigen::Infinity>() < 1e-10);

  SparseFactorization fact1(sys.matrix);
  const auto res1 = fact1.solve_refined(sys.matrix, sys.rhs);
  CHECK(res1.rel_residual < 1e-9);
}

TEST_CASE("primal block is PSD and dual stabilizer PD on a small instance") {
  Setup1D s(0, {0.25, 0.75}, 1, 1, 1, 1, 2, 0.5);
  const SpMat sh = assemble_primal_stabilizer(s.primal, s.csq, s.tp, s.q);
  const SpMat sj = assemble_time_jump_stabilizer(s.primal, s.csq, s.tp, s.q);
  const SpMat sd = assemble_dual_stabilizer(s.dual, s.csq, s.tp, s.qstar);
  DataDomain omega = parse_domain("0,0.25;0.75,1", 1);
  ZeroSolution zero;
  DataSampler sampler{&zero, &omega};
  auto [mw, rhs] = assemble_data_terms(s.primal, s.tp, s.q, omega, sampler);

  const Eigen::MatrixXd k_block =
      Eigen::MatrixXd(sh) + Eigen::MatrixXd(sj) + Eigen::MatrixXd(mw);
  REQUIRE(k_block.rows() <= 400);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig_k(k_block);
  CHECK(eig_k.eigenvalues().minCoeff() > -1e-10 * eig_k.eigenvalues().maxCoeff());

  const Eigen::MatrixXd sd_dense(sd);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig_d(sd_dense);
  CHECK(eig_d.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("wave form is consistent: decays on interpolants of the solution") {
  SingleInterfaceSolution sol(2.5);
  const auto fn_u = [&](double x, double y, double t) { return sol.value(x, y, t); };
  const auto fn_ut = [&](double x, double y, double t) { return sol.dt(x, y, t); };
  std::mt19937 rng(5);
  double prev = 0.0;
  for (int level = 1; level <= 3; ++level) {
    const Mesh1D mesh = build_mesh_1d(level, std::vector<double>{0.5});
    const WaveSpeedModel speed = WaveSpeedModel::single_interface(2.5);
    const std::vector<double> csq = cell_coefficients(mesh, speed);
    const int n = 1 << (level + 1);
    const TimePartition tp = build_time_partition(0.5, n / 2);
    const Space1D primal(mesh, 2), dual(mesh, 2);
    const SpMat a = assemble_wave_form(primal, dual, csq, tp, 2, 2);
    const SpMat sd = assemble_dual_stabilizer(dual, csq, tp, 2);
    FieldPair u{interpolate(fn_u, primal, tp, 2), interpolate(fn_ut, primal, tp, 2)};
    const Eigen::VectorXd uv = stacked(u);
    double worst = 0.0;
    for (int rep = 0; rep < 5; ++rep) {
      const FieldPair y = random_pair(2, dual.n_dofs(), tp.n_slabs, rng);
      const Eigen::VectorXd yv = stacked(y);
      worst = std::max(worst, std::abs(yv.dot(a * uv)) / std::sqrt(yv.dot(sd * yv)));
    }
    if (level > 1) CHECK(worst < 0.55 * prev);
    prev = worst;
  }
}

TEST_CASE("primal stabilizer decays on interpolants of the exact solution") {
  // homogeneous speed so the boundary trace of the solution vanishes and the
  // whole stabilizer is consistency error; expect at least h^(2 min(k,q))
  SingleInterfaceSolution sol(1.0);
  WaveSpeedModel unit;
  unit.speeds = {1.0};
  const auto fn_u = [&](double x, double y, double t) { return sol.value(x, y, t); };
  const auto fn_ut = [&](double x, double y, double t) { return sol.dt(x, y, t); };
  double prev = 0.0;
  for (int level = 2; level <= 4; ++level) {
    const Mesh1D mesh = build_mesh_1d(level, std::vector<double>{});
    const auto csq = cell_coefficients(mesh, unit);
    const TimePartition tp = build_time_partition(0.5, 1 << level);
    const Space1D primal(mesh, 2);
    const SpMat sh = assemble_primal_stabilizer(primal, csq, tp, 2);
    FieldPair u{interpolate(fn_u, primal, tp, 2), interpolate(fn_ut, primal, tp, 2)};
    const Eigen::VectorXd uv = stacked(u);
    const double value = uv.dot(sh * uv);
    if (level > 2) CHECK(value < prev / 8.0);  // rate 4 with slack
    prev = value;
  }
}

TEST_CASE("repeated assembly is bit-identical") {
  const Mesh1D mesh = build_mesh_1d(2, std::vector<double>{0.25, 0.5, 0.75});
  const WaveSpeedModel speed = WaveSpeedModel::single_interface(2.5);
  const auto csq = cell_coefficients(mesh, speed);
  const TimePartition tp = build_time_partition(0.5, 4);
  const Space1D primal(mesh, 2), dual(mesh, 2);
  const DataDomain omega = parse_domain("0,0.25;0.75,1", 1);
  SingleInterfaceSolution sol(2.5);
  AssemblyOptions opts{2, 2, true};
  const SaddleSystem a = assemble_system(primal, dual, csq, tp, omega, sol, opts);
  const SaddleSystem b = assemble_system(primal, dual, csq, tp, omega, sol, opts);
  REQUIRE(a.matrix.nonZeros() == b.matrix.nonZeros());
  const double* va = a.matrix.valuePtr();
  const double* vb = b.matrix.valuePtr();
  bool identical = true;
  for (long i = 0; i < a.matrix.nonZeros(); ++i) {
    if (va[i] != vb[i]) identical = false;
  }
  CHECK(identical);
  CHECK((a.rhs - b.rhs).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("dof count follows the tensor layout") {
  const Mesh1D mesh = build_mesh_1d(2, std::vector<double>{});
  const Space1D primal(mesh, 3), dual(mesh, 3);
  CHECK(primal.n_dofs() == 25);
  DofLayout lay{primal.n_dofs(), dual.n_dofs(), 3, 3, 8};
  CHECK(lay.n_total() == 3200);
}

TEST_SUITE_END();
