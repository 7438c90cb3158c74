#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "stwave/mesh.hpp"

using namespace stwave;

TEST_SUITE_BEGIN("mesh");

TEST_CASE("uniform mesh with fitted quarter points") {
  const double req[] = {0.5, 0.25, 0.75};
  const Mesh1D mesh = build_mesh_1d(1, req);
  REQUIRE(mesh.n_cells() == 4);
  const double expect[] = {0.0, 0.25, 0.5, 0.75, 1.0};
  for (int i = 0; i < 5; ++i) CHECK(mesh.vertices[i] == doctest::Approx(expect[i]).epsilon(1e-15));
  CHECK(mesh.h_max == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("level zero is plain bisection") {
  const Mesh1D mesh = build_mesh_1d(0, {});
  REQUIRE(mesh.n_cells() == 2);
  CHECK(mesh.vertices[1] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("non-dyadic required points are inserted") {
  const double req[] = {0.4, 2.0 / 3.0};
  const Mesh1D mesh = build_mesh_1d(1, req);
  REQUIRE(mesh.n_cells() == 6);
  const double expect[] = {0.0, 0.25, 0.4, 0.5, 2.0 / 3.0, 0.75, 1.0};
  for (int i = 0; i < 7; ++i) CHECK(mesh.vertices[i] == doctest::Approx(expect[i]).epsilon(1e-14));
}

TEST_CASE("required points outside (0,1) are rejected") {
  const double bad1[] = {0.0};
  const double bad2[] = {1.2};
  CHECK_THROWS_AS(build_mesh_1d(1, bad1), std::domain_error);
  CHECK_THROWS_AS(build_mesh_1d(1, bad2), std::domain_error);
}

TEST_CASE("cells cover the interval for several levels") {
  const double req[] = {0.4, 2.0 / 3.0, 0.3};
  for (int level = 0; level <= 5; ++level) {
    const Mesh1D mesh = build_mesh_1d(level, req);
    double total = 0.0;
    for (int c = 0; c < mesh.n_cells(); ++c) {
      CHECK(mesh.cell_h(c) > 0.0);
      total += mesh.cell_h(c);
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
    // fitted property
    for (double p : req) {
      double best = 1.0;
      for (double v : mesh.vertices) best = std::min(best, std::abs(v - p));
      CHECK(best < 1e-14);
    }
    CHECK((int)mesh.interior_vertex_ids().size() == mesh.n_cells() - 1);
  }
}

TEST_CASE("locate returns the enclosing cell") {
  const Mesh1D mesh = build_mesh_1d(2, {});
  CHECK(mesh.locate(0.0) == 0);
  CHECK(mesh.locate(0.99) == mesh.n_cells() - 1);
  CHECK(mesh.locate(1.0) == mesh.n_cells() - 1);
  const int c = mesh.locate(0.3);
  CHECK(mesh.cell_x0(c) <= 0.3);
  CHECK(mesh.cell_x1(c) >= 0.3);
}

TEST_CASE("2d mesh at level 1 is the 4x4 quarter grid") {
  const Mesh2D mesh = build_mesh_2d(1);
  REQUIRE(mesh.n_cells() == 16);
  for (int i = 0; i <= 4; ++i) {
    CHECK(mesh.xs[i] == doctest::Approx(0.25 * i).epsilon(1e-15));
    CHECK(mesh.ys[i] == doctest::Approx(0.25 * i).epsilon(1e-15));
  }
}

TEST_CASE("2d mesh level 3 has 256 cells of size 1/16") {
  const Mesh2D mesh = build_mesh_2d(3);
  CHECK(mesh.n_cells() == 256);
  CHECK(mesh.h_max == doctest::Approx(1.0 / 16.0).epsilon(1e-15));
  double area = 0.0;
  for (int cy = 0; cy < mesh.ny(); ++cy) {
    for (int cx = 0; cx < mesh.nx(); ++cx) area += mesh.cell_hx(cx) * mesh.cell_hy(cy);
  }
  CHECK(area == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("2d level 0 cannot fit the data-domain boundary") {
  CHECK_THROWS_AS(build_mesh_2d(0), std::domain_error);
}

TEST_CASE("interface line is covered by interior facets") {
  const Mesh2D mesh = build_mesh_2d(2);
  // facets on x = 0.5 must exist for every y-cell, including y in [0, 0.25]
  int line = -1;
  for (int i = 0; i <= mesh.nx(); ++i) {
    if (std::abs(mesh.xs[i] - 0.5) < 1e-15) line = i;
  }
  REQUIRE(line > 0);
  int covered = 0;
  for (const auto& f : mesh.interior_facets()) {
    if (f.axis == 0 && f.line == line) ++covered;
  }
  CHECK(covered == mesh.ny());
}

TEST_CASE("facet counts and adjacency") {
  const Mesh2D mesh = build_mesh_2d(2);
  const auto interior = mesh.interior_facets();
  const auto boundary = mesh.boundary_facets();
  CHECK((int)interior.size() == (mesh.nx() - 1) * mesh.ny() + (mesh.ny() - 1) * mesh.nx());
  CHECK((int)boundary.size() == 2 * mesh.nx() + 2 * mesh.ny());
  for (const auto& f : interior) {
    CHECK(!f.boundary);
    CHECK(f.line >= 1);
    CHECK(f.line <= (f.axis == 0 ? mesh.nx() : mesh.ny()) - 1);
  }
  for (const auto& f : boundary) {
    CHECK(f.boundary);
    const int last = f.axis == 0 ? mesh.nx() : mesh.ny();
    CHECK((f.line == 0 || f.line == last));
  }
}

TEST_CASE("time partitions") {
  const TimePartition a = build_time_partition(0.5, 16);
  CHECK(a.dt == doctest::Approx(0.03125).epsilon(1e-16));
  const TimePartition b = build_time_partition(1.0, 32);
  CHECK(b.dt == doctest::Approx(1.0 / 32.0).epsilon(1e-16));
  const TimePartition c = build_time_partition(0.5, 1);
  CHECK(c.n_slabs == 1);
  CHECK(c.t_nodes.back() == 0.5);
  for (int i = 1; i <= a.n_slabs; ++i) {
    CHECK(a.t_nodes[i] - a.t_nodes[i - 1] == doctest::Approx(a.dt).epsilon(1e-15));
  }
  CHECK_THROWS_AS(build_time_partition(-1.0, 4), std::domain_error);
  CHECK_THROWS_AS(build_time_partition(1.0, 0), std::domain_error);
}

TEST_SUITE_END();
