#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <random>

#include "stwave/fe_space.hpp"

using namespace stwave;

TEST_SUITE_BEGIN("fe_space");

TEST_CASE("partition of unity in 1d and 2d") {
  const Mesh1D mesh1 = build_mesh_1d(2, std::vector<double>{0.37});
  const Space1D sp1(mesh1, 3);
  const Mesh2D mesh2 = build_mesh_2d(1);
  const Space2D sp2(mesh2, 2);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  for (int rep = 0; rep < 50; ++rep) {
    const double x = dist(rng), y = dist(rng);
    const PointBasis p1 = sp1.basis_at(x, 0.0, 0);
    double s1 = 0.0;
    for (double v : p1.val) s1 += v;
    CHECK(s1 == doctest::Approx(1.0).epsilon(1e-13));
    const PointBasis p2 = sp2.basis_at(x, y, 0);
    double s2 = 0.0;
    for (double v : p2.val) s2 += v;
    CHECK(s2 == doctest::Approx(1.0).epsilon(1e-13));
  }
}

TEST_CASE("constant field evaluates to constant with zero derivatives") {
  const Mesh1D mesh = build_mesh_1d(1, {});
  const Space1D space(mesh, 2);
  const TimePartition tp = build_time_partition(1.0, 4);
  DiscreteField f = DiscreteField::zero(2, space.n_dofs(), 4);
  for (auto& s : f.slabs) s.setOnes();
  CHECK(eval_field(f, space, tp, 0.33, 0.71, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(eval_field(f, space, tp, 0.33, 0.71, 0.0, Deriv::dx)) < 1e-12);
  CHECK(std::abs(eval_field(f, space, tp, 0.33, 0.71, 0.0, Deriv::dt)) < 1e-12);
}

TEST_CASE("bilinear reproduction: interpolant of t*x") {
  const Mesh1D mesh = build_mesh_1d(1, {});
  const Space1D space(mesh, 1);
  const TimePartition tp = build_time_partition(1.0, 2);
  const auto fn = [](double x, double, double t) { return t * x; };
  const DiscreteField f = interpolate(fn, space, tp, 1);
  CHECK(eval_field(f, space, tp, 0.5, 0.5, 0.0) == doctest::Approx(0.25).epsilon(1e-13));
  CHECK(eval_field(f, space, tp, 0.5, 0.5, 0.0, Deriv::dt) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(eval_field(f, space, tp, 0.5, 0.5, 0.0, Deriv::dx) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("polynomial reproduction up to the tensor degrees") {
  const Mesh1D mesh = build_mesh_1d(1, std::vector<double>{0.3});
  const int k = 3, q = 2;
  const Space1D space(mesh, k);
  const TimePartition tp = build_time_partition(0.8, 3);
  const auto fn = [](double x, double, double t) {
    return (1.0 + 2.0 * t + 0.5 * t * t) * (0.3 - x + x * x * x);
  };
  const DiscreteField f = interpolate(fn, space, tp, q);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  for (int rep = 0; rep < 40; ++rep) {
    const double x = dist(rng), t = 0.8 * dist(rng);
    CHECK(eval_field(f, space, tp, t, x, 0.0) ==
          doctest::Approx(fn(x, 0.0, t)).epsilon(1e-12));
  }
}

TEST_CASE("nodal interpolation reproduces nodal values exactly") {
  const Mesh1D mesh = build_mesh_1d(3, {});
  const Space1D space(mesh, 3);
  const TimePartition tp = build_time_partition(0.5, 2);
  const auto fn = [](double x, double, double) { return std::cos(3.0 * M_PI * x); };
  const DiscreteField f = interpolate(fn, space, tp, 1);
  for (int i = 0; i < space.n_dofs(); ++i) {
    const double x = space.dof_coord_x(i);
    CHECK(eval_field(f, space, tp, 0.0, x, 0.0) == doctest::Approx(fn(x, 0, 0)).scale(1.0).epsilon(1e-13));
  }
}

TEST_CASE("continuity across interior spatial facets") {
  const Mesh1D mesh = build_mesh_1d(2, std::vector<double>{0.55});
  const Space1D space(mesh, 3);
  std::mt19937 rng(19);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd coef(space.n_dofs());
  for (int i = 0; i < coef.size(); ++i) coef[i] = dist(rng);
  for (int v : mesh.interior_vertex_ids()) {
    const double x = mesh.vertices[v];
    const PointBasis left = space.basis_in_cell(v - 1, x, 0.0, 0);
    const PointBasis right = space.basis_in_cell(v, x, 0.0, 0);
    double vl = 0.0, vr = 0.0;
    for (size_t j = 0; j < left.dofs.size(); ++j) vl += coef[left.dofs[j]] * left.val[j];
    for (size_t j = 0; j < right.dofs.size(); ++j) vr += coef[right.dofs[j]] * right.val[j];
    CHECK(vl == doctest::Approx(vr).epsilon(1e-13));
  }
  // 2d: values agree across a vertical gridline from both sides
  const Mesh2D mesh2 = build_mesh_2d(1);
  const Space2D space2(mesh2, 2);
  Eigen::VectorXd coef2(space2.n_dofs());
  for (int i = 0; i < coef2.size(); ++i) coef2[i] = dist(rng);
  const double xline = mesh2.xs[2];
  for (double y : {0.1, 0.4, 0.9}) {
    const int cy = mesh2.locate_y(y);
    const PointBasis left = space2.basis_in_cell(mesh2.cell_id(1, cy), xline, y, 0);
    const PointBasis right = space2.basis_in_cell(mesh2.cell_id(2, cy), xline, y, 0);
    double vl = 0.0, vr = 0.0;
    for (size_t j = 0; j < left.dofs.size(); ++j) vl += coef2[left.dofs[j]] * left.val[j];
    for (size_t j = 0; j < right.dofs.size(); ++j) vr += coef2[right.dofs[j]] * right.val[j];
    CHECK(vl == doctest::Approx(vr).epsilon(1e-13));
  }
}

TEST_CASE("trace jumps") {
  const Mesh1D mesh = build_mesh_1d(1, {});
  const Space1D space(mesh, 2);
  const TimePartition tp = build_time_partition(1.0, 4);
  const int q = 2;

  // continuous-in-time interpolant: no jump anywhere
  const auto fn = [](double x, double, double t) { return std::sin(2.0 * x + t); };
  const DiscreteField cont = interpolate(fn, space, tp, q);
  for (int n = 1; n < tp.n_slabs; ++n) {
    CHECK(std::abs(trace_jump(cont, space, tp, n, 0.37, 0.0)) < 1e-14);
  }

  // slab-index field: unit jump at every node
  DiscreteField stepped = DiscreteField::zero(q, space.n_dofs(), tp.n_slabs);
  for (int n = 0; n < tp.n_slabs; ++n) stepped.slabs[n].setConstant(n);
  for (int n = 1; n < tp.n_slabs; ++n) {
    CHECK(trace_jump(stepped, space, tp, n, 0.5, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
  }

  // random field: jump equals the difference of one-sided evaluations
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  DiscreteField rnd = DiscreteField::zero(q, space.n_dofs(), tp.n_slabs);
  for (auto& s : rnd.slabs) {
    for (int i = 0; i < s.size(); ++i) s[i] = dist(rng);
  }
  const double t1 = tp.node(2);
  const double jump = trace_jump(rnd, space, tp, 2, 0.62, 0.0);
  const double manual = eval_field(rnd, space, tp, t1, 0.62, 0.0, Deriv::value, TraceSide::right) -
                        eval_field(rnd, space, tp, t1, 0.62, 0.0, Deriv::value, TraceSide::left);
  CHECK(jump == doctest::Approx(manual).epsilon(1e-14));
  CHECK_THROWS_AS(trace_jump(rnd, space, tp, 0, 0.5, 0.0), std::domain_error);
  CHECK_THROWS_AS(trace_jump(rnd, space, tp, tp.n_slabs, 0.5, 0.0), std::domain_error);
}

TEST_CASE("interpolants of continuous functions are continuous at slab nodes") {
  const Mesh1D mesh = build_mesh_1d(2, std::vector<double>{0.5});
  const Space1D space(mesh, 3);
  const TimePartition tp = build_time_partition(0.5, 4);
  // standing-wave style reference: continuous in time
  const auto fn = [](double x, double, double t) {
    return std::cos(3.0 * M_PI * 2.5 * t) * std::cos(3.0 * M_PI * (x - 0.5));
  };
  const DiscreteField f = interpolate(fn, space, tp, 3);
  for (int n = 1; n < tp.n_slabs; ++n) {
    for (double x : {0.0, 0.21, 0.5, 0.77, 1.0}) {
      CHECK(std::abs(trace_jump(f, space, tp, n, x, 0.0)) < 1e-12);
    }
  }
}

TEST_CASE("zero function interpolates to zero coefficients") {
  const Mesh1D mesh = build_mesh_1d(1, {});
  const Space1D space(mesh, 2);
  const TimePartition tp = build_time_partition(1.0, 3);
  const DiscreteField f = interpolate([](double, double, double) { return 0.0; }, space, tp, 2);
  for (const auto& s : f.slabs) CHECK(s.norm() == 0.0);
}

TEST_SUITE_END();
